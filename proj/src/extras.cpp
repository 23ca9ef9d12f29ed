#include "symbreak/extras.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "symbreak/errors.hpp"
#include "symbreak/rng.hpp"

namespace symbreak {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::pair<double, double> xavier_bounds(int d) {
    if (d < 1) throw domain_error("xavier_bounds: need d >= 1");
    return {(1.0 - 2.0 / kPi) * d, (1.0 - 1.0 / kPi) * d};
}

XavierEstimate xavier_mc(int d, std::uint64_t n, std::uint64_t seed) {
    if (n < 1000) throw domain_error("xavier_mc: need n >= 1000");
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    double sum = 0.0, sumsq = 0.0;
    Matrix w(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (std::uint64_t t = 0; t < n; ++t) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) w(i, j) = scale * rng.normal();
        const double l = loss(WeightConfig(d, d, w));
        sum += l;
        sumsq += l * l;
    }
    XavierEstimate est;
    const double mean = sum / static_cast<double>(n);
    est.value = mean;
    const double var = std::max(0.0, (sumsq - sum * mean) / (static_cast<double>(n) - 1.0));
    est.stderr_ = std::sqrt(var / static_cast<double>(n));
    std::tie(est.lo, est.hi) = xavier_bounds(d);
    est.within_bounds =
        est.value >= est.lo - 3.0 * est.stderr_ && est.value <= est.hi + 3.0 * est.stderr_;
    return est;
}

std::vector<std::vector<int>> FossilPartition::parts() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k_bar; ++i)
        out[static_cast<std::size_t>(part_of[static_cast<std::size_t>(i)])].push_back(i);
    return out;
}

std::vector<FossilPartition> enumerate_partitions(int k_bar, int k) {
    if (k < 1 || k_bar < k) throw domain_error("enumerate_partitions: need k_bar >= k >= 1");
    if (k_bar - k > 4) throw domain_error("enumerate_partitions: k_bar - k > 4 guard");
    const int extras = k_bar - k;
    std::vector<FossilPartition> out;
    std::vector<int> assign(static_cast<std::size_t>(extras), 0);
    while (true) {
        FossilPartition p;
        p.k_bar = k_bar;
        p.k = k;
        p.part_of.resize(static_cast<std::size_t>(k_bar));
        for (int i = 0; i < k; ++i) p.part_of[static_cast<std::size_t>(i)] = i;
        for (int e = 0; e < extras; ++e)
            p.part_of[static_cast<std::size_t>(k + e)] = assign[static_cast<std::size_t>(e)];
        out.push_back(std::move(p));
        int pos = 0;
        while (pos < extras && ++assign[static_cast<std::size_t>(pos)] == k) {
            assign[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == extras) break;
    }
    return out;
}

WeightConfig fossil_point(const WeightConfig& w, const FossilPartition& partition,
                          const std::vector<double>& weights) {
    if (partition.k != w.k) throw domain_error("fossil_point: partition does not match k");
    if (static_cast<int>(weights.size()) != partition.k_bar)
        throw domain_error("fossil_point: need one weight per row of the fossil");
    const auto parts = partition.parts();
    for (const auto& part : parts) {
        double s = 0.0;
        for (int i : part) s += weights[static_cast<std::size_t>(i)];
        if (std::fabs(s - 1.0) > 1e-12)
            throw domain_error("fossil_point: part weights must sum to 1");
    }
    Matrix out(static_cast<std::size_t>(partition.k_bar), static_cast<std::size_t>(w.d));
    for (int i = 0; i < partition.k_bar; ++i) {
        const int j = partition.part_of[static_cast<std::size_t>(i)];
        const double a = weights[static_cast<std::size_t>(i)];
        for (int c = 0; c < w.d; ++c) out(i, c) = a * w.W(j, c);
    }
    return WeightConfig(partition.k_bar, w.d, std::move(out));
}

std::vector<double> sample_simplex_weights(const FossilPartition& partition,
                                           std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> weights(static_cast<std::size_t>(partition.k_bar), 0.0);
    for (const auto& part : partition.parts()) {
        // Dirichlet(1,..,1) via normalized exponentials
        double s = 0.0;
        for (int i : part) {
            const double e = -std::log(rng.uniform_pos());
            weights[static_cast<std::size_t>(i)] = e;
            s += e;
        }
        for (int i : part) weights[static_cast<std::size_t>(i)] /= s;
    }
    return weights;
}

GlobalMinComplexReport global_min_complex_check(int k, int d, int samples,
                                                std::uint64_t seed) {
    if (k - d > 2 || d > 4) throw domain_error("global_min_complex_check: size guard");
    GlobalMinComplexReport rep;

    // Vertices: 0/1 matrices with exactly one 1 per column, in distinct rows.
    std::vector<std::vector<int>> placements;  // row index per column
    std::vector<int> cur(static_cast<std::size_t>(d), 0);
    std::function<void(int, int)> gen = [&](int col, int used_mask) {
        if (col == d) {
            placements.push_back(cur);
            return;
        }
        for (int r = 0; r < k; ++r)
            if (!(used_mask & (1 << r))) {
                cur[static_cast<std::size_t>(col)] = r;
                gen(col + 1, used_mask | (1 << r));
            }
    };
    gen(0, 0);
    for (const auto& pl : placements) {
        Matrix v(static_cast<std::size_t>(k), static_cast<std::size_t>(d));
        for (int c = 0; c < d; ++c) v(pl[static_cast<std::size_t>(c)], c) = 1.0;
        rep.vertices.push_back(std::move(v));
    }
    rep.vertex_count = static_cast<int>(rep.vertices.size());

    // Edges: vertices differing in exactly one column (the connecting segment
    // keeps every other column fixed and stays inside a common simplex).
    for (std::size_t a = 0; a < placements.size(); ++a)
        for (std::size_t b = a + 1; b < placements.size(); ++b) {
            int diff = 0;
            for (int c = 0; c < d; ++c)
                if (placements[a][static_cast<std::size_t>(c)] !=
                    placements[b][static_cast<std::size_t>(c)])
                    ++diff;
            if (diff == 1) rep.edges.push_back({static_cast<int>(a), static_cast<int>(b)});
        }
    rep.edge_count = static_cast<int>(rep.edges.size());

    // connectivity / cycle structure
    {
        std::vector<int> comp(rep.vertices.size(), -1);
        std::vector<int> stack;
        int ncomp = 0;
        for (std::size_t v = 0; v < rep.vertices.size(); ++v) {
            if (comp[v] != -1) continue;
            stack.push_back(static_cast<int>(v));
            comp[v] = ncomp;
            while (!stack.empty()) {
                const int cu = stack.back();
                stack.pop_back();
                for (const auto& e : rep.edges) {
                    int other = -1;
                    if (e.first == cu) other = e.second;
                    if (e.second == cu) other = e.first;
                    if (other >= 0 && comp[static_cast<std::size_t>(other)] == -1) {
                        comp[static_cast<std::size_t>(other)] = ncomp;
                        stack.push_back(other);
                    }
                }
            }
            ++ncomp;
        }
        rep.connected = (ncomp == 1);
        std::vector<int> degree(rep.vertices.size(), 0);
        for (const auto& e : rep.edges) {
            ++degree[static_cast<std::size_t>(e.first)];
            ++degree[static_cast<std::size_t>(e.second)];
        }
        rep.is_cycle = rep.connected && rep.vertex_count == rep.edge_count &&
                       std::all_of(degree.begin(), degree.end(), [](int x) { return x == 2; });
    }

    // sampled zero-loss check over the simplices of the identity fossil
    Rng rng(seed);
    WeightConfig v_id(k, d);
    for (int i = 0; i < d; ++i) v_id.W(i, i) = 1.0;
    const auto partitions = enumerate_partitions(k, d);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const auto& part = partitions[static_cast<std::size_t>(s) % partitions.size()];
        WeightConfig vk(d, d);
        for (int i = 0; i < d; ++i) vk.W(i, i) = 1.0;
        const auto weights = sample_simplex_weights(part, rng.next_u64());
        const WeightConfig pt = fossil_point(vk, part, weights);
        worst = std::max(worst, std::fabs(loss(pt)));
    }
    rep.max_sampled_loss = worst;
    return rep;
}

}  // namespace symbreak

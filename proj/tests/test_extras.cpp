#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "symbreak/errors.hpp"
#include "symbreak/extras.hpp"
#include "symbreak/fps.hpp"
#include "symbreak/spectrum.hpp"

using namespace symbreak;

TEST_CASE("xavier bounds closed forms") {
    auto [lo10, hi10] = xavier_bounds(10);
    CHECK(lo10 == doctest::Approx(3.63380).epsilon(1e-5));
    CHECK(hi10 == doctest::Approx(6.81690).epsilon(1e-5));
    auto [lo1, hi1] = xavier_bounds(1);
    CHECK(lo1 == doctest::Approx(0.36338).epsilon(1e-4));
    CHECK(hi1 == doctest::Approx(0.68169).epsilon(1e-4));
    // the ratio is d-independent
    CHECK(lo10 / hi10 == doctest::Approx(lo1 / hi1).epsilon(1e-12));
}

TEST_CASE("xavier monte carlo sits inside the sandwich") {
    const XavierEstimate e2 = xavier_mc(2, 20000, 7);
    CHECK(e2.within_bounds);
    CHECK(e2.value > e2.lo);
    CHECK(e2.value < e2.hi);

    const XavierEstimate e10 = xavier_mc(10, 4000, 11);
    CHECK(e10.within_bounds);

    // Monte-Carlo scaling: standard error shrinks like 1/sqrt(n)
    const XavierEstimate a = xavier_mc(3, 2000, 5);
    const XavierEstimate b = xavier_mc(3, 32000, 5);
    CHECK(b.stderr_ < a.stderr_ * 0.5);
}

TEST_CASE("partition enumeration counts") {
    CHECK(enumerate_partitions(3, 2).size() == 2);
    CHECK(enumerate_partitions(4, 2).size() == 4);
    CHECK(enumerate_partitions(5, 5).size() == 1);
    CHECK_THROWS_AS(enumerate_partitions(10, 2), domain_error);

    const auto parts = enumerate_partitions(3, 2);
    // {{1,3},{2}} and {{1},{2,3}} in 1-based labels
    bool saw_first = false, saw_second = false;
    for (const auto& p : parts) {
        if (p.part_of[2] == 0) saw_first = true;
        if (p.part_of[2] == 1) saw_second = true;
    }
    CHECK(saw_first);
    CHECK(saw_second);
}

TEST_CASE("fossil points of the identity have zero loss") {
    WeightConfig v(2, 2);
    v.W(0, 0) = v.W(1, 1) = 1.0;
    const auto parts = enumerate_partitions(3, 2);
    for (const auto& p : parts)
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            const auto w = sample_simplex_weights(p, seed);
            const WeightConfig f = fossil_point(v, p, w);
            CHECK(std::fabs(loss(f)) < 1e-12);
        }
}

TEST_CASE("splitting a row of a critical point preserves criticality") {
    const FamilyId fam = parse_family("II", 1, 0);
    const double d = 10;
    const ReducedPoint pt = solve_family_point(fam, d);
    const WeightConfig w = embed(pt);
    CHECK(gradient(w).frobenius_norm() < 1e-10);

    FossilPartition split;
    split.k_bar = w.k + 1;
    split.k = w.k;
    split.part_of.resize(static_cast<std::size_t>(split.k_bar));
    for (int i = 0; i < w.k; ++i) split.part_of[static_cast<std::size_t>(i)] = i;
    split.part_of[static_cast<std::size_t>(w.k)] = w.k - 1;  // split the last row

    std::vector<double> weights(static_cast<std::size_t>(split.k_bar), 1.0);
    weights[static_cast<std::size_t>(w.k - 1)] = 0.5;
    weights[static_cast<std::size_t>(w.k)] = 0.5;
    const WeightConfig f = fossil_point(w, split, weights);

    CHECK(loss(f) == doctest::Approx(loss(w)).epsilon(1e-12));
    CHECK(gradient(f).frobenius_norm() < 1e-8);

    // the simplex tangent direction gives a near-zero Hessian eigenvalue
    const Matrix h = hessian(f);
    const auto eig = sym_eig(h, false).values;
    double closest = 1e300;
    for (double v2 : eig) closest = std::min(closest, std::fabs(v2));
    CHECK(closest < 1e-6);

    // loss is constant across the interior of the split simplex
    double lmin = 1e300, lmax = -1e300;
    for (int s = 0; s < 100; ++s) {
        const auto ws = sample_simplex_weights(split, 100 + s);
        const double l = loss(fossil_point(w, split, ws));
        lmin = std::min(lmin, l);
        lmax = std::max(lmax, l);
    }
    CHECK(lmax - lmin < 1e-12);

    // a vertex weight vector reproduces the original matrix padded by zeros
    std::vector<double> vert(weights.size(), 1.0);
    vert[static_cast<std::size_t>(w.k)] = 0.0;
    const WeightConfig fv = fossil_point(w, split, vert);
    CHECK(loss(fv) == doctest::Approx(loss(w)).epsilon(1e-12));
}

TEST_CASE("hexagon structure of the k=3, d=2 zero-loss complex") {
    const auto rep = global_min_complex_check(3, 2, 100);
    CHECK(rep.vertex_count == 6);
    CHECK(rep.edge_count == 6);
    CHECK(rep.connected);
    CHECK(rep.is_cycle);
    CHECK(rep.max_sampled_loss < 1e-12);

    const auto rep2 = global_min_complex_check(2, 2, 10);
    CHECK(rep2.vertex_count == 2);  // the S_2 x S_2 orbit of the identity
    CHECK(rep2.edge_count == 0);

    const auto rep4 = global_min_complex_check(4, 2, 200);
    CHECK(rep4.max_sampled_loss < 1e-12);
    CHECK(rep4.vertex_count == 12);
}

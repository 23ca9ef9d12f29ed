#include "symbreak/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "symbreak/errors.hpp"
#include "symbreak/rng.hpp"

namespace symbreak {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double clamped_cos(double dotwv, double nw, double nv) {
    return std::clamp(dotwv / (nw * nv), -1.0, 1.0);
}

}  // namespace

WeightConfig::WeightConfig(int k_, int d_) : k(k_), d(d_), W(k_, d_) { validate_shape(); }

WeightConfig::WeightConfig(int k_, int d_, Matrix W_) : k(k_), d(d_), W(std::move(W_)) {
    validate_shape();
}

void WeightConfig::validate_shape() const {
    if (d < 1 || k < d) throw domain_error("WeightConfig: need k >= d >= 1");
    if (W.rows() != static_cast<std::size_t>(k) || W.cols() != static_cast<std::size_t>(d))
        throw domain_error("WeightConfig: W shape does not match (k, d)");
}

double pair_energy(const double* w, const double* v, int d) {
    const double nw = norm2(w, d);
    const double nv = norm2(v, d);
    if (nw == 0.0 || nv == 0.0) return 0.0;
    const double c = clamped_cos(dot(w, v, d), nw, nv);
    const double t = std::acos(c);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    return nw * nv * (s + (kPi - t) * c) / kTwoPi;
}

double pair_energy(const std::vector<double>& w, const std::vector<double>& v) {
    if (w.size() != v.size()) throw domain_error("pair_energy: dimension mismatch");
    return pair_energy(w.data(), v.data(), static_cast<int>(w.size()));
}

double loss(const WeightConfig& cfg) {
    cfg.validate_shape();
    const int k = cfg.k, d = cfg.d;
    const Matrix& W = cfg.W;

    double acc = 0.0;
    // student-student: 1/2 sum_{i,j} f(w_i, w_j); the diagonal is |w|^2 / 2.
    for (int i = 0; i < k; ++i) {
        acc += 0.5 * 0.5 * dot(W.row(i), W.row(i), d);
        for (int j = i + 1; j < k; ++j) acc += pair_energy(W.row(i), W.row(j), d);
    }
    // student-teacher: f(w_i, e_j) has the closed form with |v| = 1.
    for (int i = 0; i < k; ++i) {
        const double nw = norm2(W.row(i), d);
        if (nw == 0.0) continue;
        for (int j = 0; j < d; ++j) {
            const double c = std::clamp(W(i, j) / nw, -1.0, 1.0);
            const double t = std::acos(c);
            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            acc -= nw * (s + (kPi - t) * c) / kTwoPi;
        }
    }
    // teacher-teacher: d identical rows of norm 1 plus d(d-1) orthogonal pairs.
    acc += 0.25 * d + d * (d - 1.0) / (4.0 * kPi);
    return acc;
}

Matrix gradient(const WeightConfig& cfg) {
    cfg.validate_shape();
    const int k = cfg.k, d = cfg.d;
    const Matrix& W = cfg.W;

    std::vector<double> nrm(k);
    for (int i = 0; i < k; ++i) {
        nrm[i] = norm2(W.row(i), d);
        if (nrm[i] == 0.0) throw domain_error("gradient: zero row " + std::to_string(i));
    }

    // Column sums of W - V, shared by every row of the gradient.
    std::vector<double> colsum(d, -1.0);
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < d; ++a) colsum[a] += W(i, a);

    Matrix g(k, d);
    for (int i = 0; i < k; ++i) {
        const double* wi = W.row(i);
        double ti = 0.0;  // sum_j |w_j| sin t_ij - sum_j sin t^v_ij
        std::vector<double> acc(d, 0.0);  // - sum_j t_ij w_j + sum_j t^v_ij v_j
        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            const double c = clamped_cos(dot(wi, W.row(j), d), nrm[i], nrm[j]);
            const double t = std::acos(c);
            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            ti += nrm[j] * s;
            for (int a = 0; a < d; ++a) acc[a] -= t * W(j, a);
        }
        for (int j = 0; j < d; ++j) {
            const double c = std::clamp(wi[j] / nrm[i], -1.0, 1.0);
            const double t = std::acos(c);
            ti -= std::sqrt(std::max(0.0, 1.0 - c * c));
            acc[j] += t;
        }
        const double si = ti / nrm[i];
        for (int a = 0; a < d; ++a)
            g(i, a) = (si * wi[a] + acc[a]) / kTwoPi + 0.5 * colsum[a];
    }
    return g;
}

namespace {

// Angle derivative dP = dt/dw_first for a pair with cosine c and sine s:
// (c w/|w|^2 - u/(|w||u|)) / s.
void angle_grad(const double* w, const double* u, int d, double c, double s, double nw,
                double nu, double* out) {
    const double f1 = c / (nw * nw);
    const double f2 = 1.0 / (nw * nu);
    for (int a = 0; a < d; ++a) out[a] = (f1 * w[a] - f2 * u[a]) / s;
}

struct PairGeometry {
    double c, s, t;
    bool parallel_limit;  // positively parallel: angle terms cancel in the C^2 limit
};

PairGeometry pair_geometry(const double* w, const double* u, int d, double nw, double nu,
                           const char* what, int i, int j) {
    PairGeometry p;
    p.c = clamped_cos(dot(w, u, d), nw, nu);
    const double s2 = 1.0 - p.c * p.c;
    p.parallel_limit = (s2 < 1e-18 && p.c > 0.0);
    if (s2 < 1e-18 && p.c < 0.0)
        throw domain_error(std::string("hessian: ") + what + " rows " + std::to_string(i) +
                           " and " + std::to_string(j) + " are antiparallel");
    p.t = std::acos(p.c);
    p.s = std::sqrt(s2 > 0.0 ? s2 : 0.0);
    return p;
}

}  // namespace

Matrix hessian(const WeightConfig& cfg) {
    cfg.validate_shape();
    const int k = cfg.k, d = cfg.d;
    const Matrix& W = cfg.W;
    const int n = k * d;

    std::vector<double> nrm(k);
    for (int i = 0; i < k; ++i) {
        nrm[i] = norm2(W.row(i), d);
        if (nrm[i] == 0.0) throw domain_error("hessian: zero row " + std::to_string(i));
    }

    Matrix h(n, n);
    std::vector<double> pij(d), pji(d), dTn(d), diag_d(d), tmp(d);

    for (int i = 0; i < k; ++i) {
        const double* wi = W.row(i);
        const double ni = nrm[i];

        // T_i and the self-block accumulators.
        double ti = 0.0;
        std::fill(diag_d.begin(), diag_d.end(), 0.0);  // d(T_i)/dw_i
        // accumulate cross blocks as we go
        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            const double* wj = W.row(j);
            const PairGeometry pg = pair_geometry(wi, wj, d, ni, nrm[j], "weight", i, j);
            ti += nrm[j] * pg.s;
            if (pg.parallel_limit) {
                // positively parallel pair: the angle-gradient terms cancel
                // and the pair contributes only the bilinear 1/2 <w, u> part
                for (int a = 0; a < d; ++a) h(i * d + a, j * d + a) += 0.5;
                continue;
            }
            angle_grad(wi, wj, d, pg.c, pg.s, ni, nrm[j], pij.data());
            angle_grad(wj, wi, d, pg.c, pg.s, nrm[j], ni, pji.data());
            for (int a = 0; a < d; ++a) diag_d[a] += nrm[j] * pg.c * pij[a];

            // Cross block B_ij = (1/2pi)[ w_i (dT/dw_j)/n_i - t I - w_j P_ji^T ] + I/2
            for (int a = 0; a < d; ++a)
                dTn[a] = ((pg.s / nrm[j]) * wj[a] + nrm[j] * pg.c * pji[a]) / ni;
            for (int a = 0; a < d; ++a) {
                double* hrow = h.row(i * d + a);
                const double wia = wi[a];
                const double wja = wj[a];
                for (int b = 0; b < d; ++b)
                    hrow[j * d + b] =
                        (wia * dTn[b] - wja * pji[b]) / kTwoPi + 0.5 * ((a == b) ? 1.0 : 0.0);
                hrow[j * d + a] -= pg.t / kTwoPi;
            }
            // self-block contribution - sum_j w_j P_ij^T
            for (int a = 0; a < d; ++a) {
                double* hrow = h.row(i * d + a);
                const double wja = wj[a];
                for (int b = 0; b < d; ++b) hrow[i * d + b] -= wja * pij[b] / kTwoPi;
            }
        }
        for (int j = 0; j < d; ++j) {
            // teacher row e_j
            const double c = std::clamp(wi[j] / ni, -1.0, 1.0);
            if (1.0 - c * c < 1e-24)
                throw domain_error("hessian: row " + std::to_string(i) +
                                   " is parallel or antiparallel to teacher row " +
                                   std::to_string(j));
            const double s = std::sqrt(1.0 - c * c);
            ti -= s;
            // P^v = (c w / n^2 - e_j / n)/s
            for (int a = 0; a < d; ++a) tmp[a] = (c * wi[a] / (ni * ni)) / s;
            tmp[j] -= (1.0 / ni) / s;
            for (int a = 0; a < d; ++a) diag_d[a] -= c * tmp[a];
            // + sum_j v_j (P^v)^T lands on matrix row (i, j)
            double* hrow = h.row(i * d + j);
            for (int b = 0; b < d; ++b) hrow[i * d + b] += tmp[b] / kTwoPi;
        }

        // Assemble remaining self-block pieces:
        // (1/2pi)[ w_i D^T + (T_i/n_i) I ] + I/2 with
        // D = d(T_i/n_i)/dw_i = diag_d/n_i - (T_i/n_i^2) (w_i/n_i).
        const double si = ti / ni;
        for (int a = 0; a < d; ++a)
            dTn[a] = diag_d[a] / ni - si * wi[a] / (ni * ni);
        for (int a = 0; a < d; ++a) {
            double* hrow = h.row(i * d + a);
            const double wia = wi[a];
            for (int b = 0; b < d; ++b) hrow[i * d + b] += wia * dTn[b] / kTwoPi;
            hrow[i * d + a] += si / kTwoPi + 0.5;
        }
    }

    // Symmetrize away the roundoff skew.
    for (int r = 0; r < n; ++r)
        for (int c2 = r + 1; c2 < n; ++c2) {
            const double v = 0.5 * (h(r, c2) + h(c2, r));
            h(r, c2) = v;
            h(c2, r) = v;
        }
    return h;
}

Matrix hessian_vector_product(const WeightConfig& cfg, const Matrix& u) {
    cfg.validate_shape();
    const int k = cfg.k, d = cfg.d;
    if (u.rows() != static_cast<std::size_t>(k) || u.cols() != static_cast<std::size_t>(d))
        throw domain_error("hessian_vector_product: direction shape mismatch");
    const Matrix& W = cfg.W;

    std::vector<double> nrm(k);
    for (int i = 0; i < k; ++i) {
        nrm[i] = norm2(W.row(i), d);
        if (nrm[i] == 0.0)
            throw domain_error("hessian_vector_product: zero row " + std::to_string(i));
    }

    std::vector<double> ucolsum(d, 0.0);
    for (int i = 0; i < k; ++i)
        for (int a = 0; a < d; ++a) ucolsum[a] += u(i, a);

    Matrix out(k, d);
    std::vector<double> pij(d), pji(d), acc(d);

    for (int i = 0; i < k; ++i) {
        const double* wi = W.row(i);
        const double* ui = u.row(i);
        const double ni = nrm[i];

        double ti = 0.0;
        double dti = 0.0;  // directional derivative of T_i
        std::fill(acc.begin(), acc.end(), 0.0);

        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            const double* wj = W.row(j);
            const double* uj = u.row(j);
            const PairGeometry pg = pair_geometry(wi, wj, d, ni, nrm[j], "weight", i, j);
            angle_grad(wi, wj, d, pg.c, pg.s, ni, nrm[j], pij.data());
            angle_grad(wj, wi, d, pg.c, pg.s, nrm[j], ni, pji.data());
            const double dtheta = dot(pij.data(), ui, d) + dot(pji.data(), uj, d);
            const double dnj = dot(wj, uj, d) / nrm[j];
            ti += nrm[j] * pg.s;
            dti += dnj * pg.s + nrm[j] * pg.c * dtheta;
            // -(dtheta w_j + theta u_j)
            for (int a = 0; a < d; ++a) acc[a] -= dtheta * wj[a] + pg.t * uj[a];
        }
        for (int j = 0; j < d; ++j) {
            const double c = std::clamp(wi[j] / ni, -1.0, 1.0);
            if (1.0 - c * c < 1e-24)
                throw domain_error("hessian_vector_product: row " + std::to_string(i) +
                                   " is parallel or antiparallel to teacher row " +
                                   std::to_string(j));
            const double s = std::sqrt(1.0 - c * c);
            // P^v . u_i
            double dtheta = c * dot(wi, ui, d) / (ni * ni) - ui[j] / ni;
            dtheta /= s;
            ti -= s;
            dti -= c * dtheta;
            acc[j] += dtheta;
        }

        const double si = ti / ni;
        const double dni = dot(wi, ui, d) / ni;
        const double dsi = dti / ni - si * dni / ni;
        for (int a = 0; a < d; ++a)
            out(i, a) = (dsi * wi[a] + si * ui[a] + acc[a]) / kTwoPi + 0.5 * ucolsum[a];
    }
    return out;
}

McEstimate monte_carlo_loss(const WeightConfig& cfg, std::uint64_t n, std::uint64_t seed) {
    cfg.validate_shape();
    if (n < 1) throw domain_error("monte_carlo_loss: need n >= 1");
    const int k = cfg.k, d = cfg.d;
    const Matrix& W = cfg.W;

    Rng rng(seed);
    std::vector<double> x(d);
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t t = 0; t < n; ++t) {
        for (int a = 0; a < d; ++a) x[a] = rng.normal();
        double student = 0.0, teacher = 0.0;
        for (int i = 0; i < k; ++i) {
            const double z = dot(W.row(i), x.data(), d);
            if (z > 0.0) student += z;
        }
        for (int j = 0; j < d; ++j)
            if (x[j] > 0.0) teacher += x[j];
        const double r = student - teacher;
        const double val = 0.5 * r * r;
        sum += val;
        sumsq += val * val;
    }
    McEstimate est;
    est.samples = n;
    const double mean = sum / static_cast<double>(n);
    est.value = mean;
    if (n > 1) {
        const double var =
            std::max(0.0, (sumsq - sum * mean) / (static_cast<double>(n) - 1.0));
        est.stderr_ = std::sqrt(var / static_cast<double>(n));
    }
    return est;
}

}  // namespace symbreak

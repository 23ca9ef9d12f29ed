#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "symbreak/errors.hpp"
#include "symbreak/kernel.hpp"
#include "symbreak/rng.hpp"

using namespace symbreak;

namespace {

constexpr double kPi = 3.14159265358979323846;

WeightConfig random_config(int k, int d, Rng& rng, double lo = 0.5, double hi = 1.5) {
    Matrix w(k, d);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j) w(i, j) = lo + (hi - lo) * rng.uniform();
    return WeightConfig(k, d, std::move(w));
}

WeightConfig identity_config(int d) {
    Matrix w = Matrix::identity(d);
    return WeightConfig(d, d, std::move(w));
}

double fd_loss_derivative(const WeightConfig& cfg, int i, int a, double h) {
    WeightConfig p = cfg, m = cfg;
    p.W(i, a) += h;
    m.W(i, a) -= h;
    return (loss(p) - loss(m)) / (2.0 * h);
}

}  // namespace

TEST_CASE("pair energy closed-form anchors") {
    std::vector<double> v{0.3, -0.7, 1.1};
    CHECK(pair_energy(v, v) == doctest::Approx(0.5 * (0.09 + 0.49 + 1.21)).epsilon(1e-14));

    std::vector<double> neg{-0.3, 0.7, -1.1};
    CHECK(std::fabs(pair_energy(v, neg)) < 1e-14);

    std::vector<double> e1{1.0, 0.0}, e2{0.0, 1.0};
    CHECK(pair_energy(e1, e2) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));

    std::vector<double> z{0.0, 0.0};
    CHECK(pair_energy(e1, z) == 0.0);
}

TEST_CASE("pair energy positive homogeneity") {
    Rng rng(11);
    for (int t = 0; t < 40; ++t) {
        std::vector<double> w(4), v(4);
        for (auto& x : w) x = rng.normal();
        for (auto& x : v) x = rng.normal();
        const double a = 2.0 * rng.uniform(), b = 3.0 * rng.uniform();
        std::vector<double> aw = w, bv = v;
        for (auto& x : aw) x *= a;
        for (auto& x : bv) x *= b;
        CHECK(pair_energy(aw, bv) ==
              doctest::Approx(a * b * pair_energy(w, v)).epsilon(1e-12));
        CHECK(pair_energy(w, v) == doctest::Approx(pair_energy(v, w)).epsilon(1e-14));
        CHECK(pair_energy(w, v) >= -1e-15);
    }
}

TEST_CASE("loss at the global minimum and in one dimension") {
    CHECK(std::fabs(loss(identity_config(5))) < 1e-14);

    for (double w : {0.25, 1.0, 2.0, 3.5}) {
        Matrix m(1, 1);
        m(0, 0) = w;
        CHECK(loss(WeightConfig(1, 1, m)) ==
              doctest::Approx((w - 1.0) * (w - 1.0) / 4.0).epsilon(1e-13));
    }
    for (double w : {-0.5, -2.0}) {
        Matrix m(1, 1);
        m(0, 0) = w;
        CHECK(loss(WeightConfig(1, 1, m)) ==
              doctest::Approx(w * w / 4.0 + 0.25).epsilon(1e-13));
    }
}

TEST_CASE("loss permutation invariance") {
    Rng rng(7);
    const int k = 5, d = 4;
    const WeightConfig cfg = random_config(k, d, rng, -1.0, 1.5);
    const double base = loss(cfg);

    // a fixed row permutation and column permutation
    const int rp[k] = {2, 0, 4, 1, 3};
    const int cp[d] = {1, 3, 0, 2};
    Matrix w2(k, d);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j) w2(rp[i], cp[j]) = cfg.W(i, j);
    CHECK(loss(WeightConfig(k, d, w2)) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("monte carlo agrees with the analytic loss") {
    // integrand vanishes identically at W = V
    const auto mc0 = monte_carlo_loss(identity_config(3), 2000, 42);
    CHECK(mc0.value == 0.0);

    Matrix m(1, 1);
    m(0, 0) = 2.0;
    const auto est = monte_carlo_loss(WeightConfig(1, 1, m), 1000000, 9001);
    CHECK(std::fabs(est.value - 0.25) < 3.0 * est.stderr_);

    Rng rng(5);
    for (int t = 0; t < 6; ++t) {
        const int d = 2 + static_cast<int>(rng.uniform() * 5.0);
        const WeightConfig cfg = random_config(d + 1, d, rng, -0.8, 1.2);
        const double l = loss(cfg);
        const auto mc = monte_carlo_loss(cfg, 200000, 100 + t);
        CHECK(std::fabs(mc.value - l) < 4.0 * mc.stderr_);
    }

    const auto a = monte_carlo_loss(WeightConfig(1, 1, m), 5000, 77);
    const auto b = monte_carlo_loss(WeightConfig(1, 1, m), 5000, 77);
    CHECK(a.value == b.value);  // deterministic per seed
}

TEST_CASE("gradient matches central differences") {
    Rng rng(13);
    for (int t = 0; t < 8; ++t) {
        const WeightConfig cfg = random_config(5, 5, rng);
        const Matrix g = gradient(cfg);
        double worst = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int a = 0; a < 5; ++a) {
                const double fd = fd_loss_derivative(cfg, i, a, 1e-5);
                worst = std::max(worst, std::fabs(fd - g(i, a)) /
                                            std::max(1.0, std::fabs(g(i, a))));
            }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("gradient vanishes on the global-minimum orbit") {
    Matrix w(4, 4);
    const int perm[4] = {2, 3, 1, 0};
    for (int i = 0; i < 4; ++i) w(i, perm[i]) = 1.0;
    const Matrix g = gradient(WeightConfig(4, 4, w));
    CHECK(g.max_abs() < 1e-12);
}

TEST_CASE("gradient equivariance under row and column permutations") {
    Rng rng(17);
    const int k = 6, d = 4;
    const WeightConfig cfg = random_config(k, d, rng, -1.2, 1.2);
    const Matrix g = gradient(cfg);
    const int rp[k] = {3, 1, 5, 0, 2, 4};
    const int cp[d] = {2, 0, 3, 1};
    Matrix w2(k, d);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j) w2(rp[i], cp[j]) = cfg.W(i, j);
    const Matrix g2 = gradient(WeightConfig(k, d, w2));
    double worst = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j)
            worst = std::max(worst, std::fabs(g2(rp[i], cp[j]) - g(i, j)));
    CHECK(worst < 1e-12);
}

TEST_CASE("gradient rejects zero rows") {
    Matrix w(2, 2);
    w(1, 0) = 1.0;  // leave row 0 zero
    CHECK_THROWS_AS(gradient(WeightConfig(2, 2, w)), domain_error);
}

TEST_CASE("hessian matches finite differences of the gradient") {
    Rng rng(23);
    for (int t = 0; t < 5; ++t) {
        const WeightConfig cfg = random_config(3, 2, rng, 0.4, 1.6);
        const Matrix h = hessian(cfg);
        const int n = cfg.k * cfg.d;
        double worst = 0.0;
        const double step = 1e-6;
        for (int l = 0; l < cfg.k; ++l)
            for (int b = 0; b < cfg.d; ++b) {
                WeightConfig p = cfg, m2 = cfg;
                p.W(l, b) += step;
                m2.W(l, b) -= step;
                const Matrix gp = gradient(p), gm = gradient(m2);
                for (int i = 0; i < cfg.k; ++i)
                    for (int a = 0; a < cfg.d; ++a) {
                        const double fd = (gp(i, a) - gm(i, a)) / (2.0 * step);
                        worst = std::max(worst, std::fabs(fd - h(i * cfg.d + a, l * cfg.d + b)));
                    }
            }
        (void)n;
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("hessian is symmetric with real spectrum and rejects parallel rows") {
    Rng rng(29);
    const WeightConfig cfg = random_config(4, 3, rng, 0.3, 1.4);
    const Matrix h = hessian(cfg);
    double skew = 0.0;
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j)
            skew = std::max(skew, std::fabs(h(i, j) - h(j, i)));
    CHECK(skew < 1e-12);

    Matrix w(3, 2);
    w(0, 0) = 1.0;
    w(1, 0) = 2.0;  // parallel to row 0
    w(2, 1) = 1.0;
    CHECK_THROWS_AS(hessian(WeightConfig(3, 2, w)), domain_error);
}

TEST_CASE("hessian-vector product: zero, linearity, dense agreement") {
    Rng rng(31);
    const int k = 7, d = 6;
    const WeightConfig cfg = random_config(k, d, rng, 0.2, 1.3);

    CHECK(hessian_vector_product(cfg, Matrix(k, d)).max_abs() == 0.0);

    Matrix u1(k, d), u2(k, d);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j) {
            u1(i, j) = rng.normal();
            u2(i, j) = rng.normal();
        }
    const double a = 0.7, b = -1.3;
    Matrix lin(k, d);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j) lin(i, j) = a * u1(i, j) + b * u2(i, j);
    Matrix h1 = hessian_vector_product(cfg, u1);
    Matrix h2 = hessian_vector_product(cfg, u2);
    Matrix hl = hessian_vector_product(cfg, lin);
    double worst = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j)
            worst = std::max(worst, std::fabs(hl(i, j) - a * h1(i, j) - b * h2(i, j)));
    CHECK(worst < 1e-12);

    const Matrix h = hessian(cfg);
    std::vector<double> uvec(k * d);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j) uvec[i * d + j] = u1(i, j);
    const auto hv = matvec(h, uvec);
    worst = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j)
            worst = std::max(worst, std::fabs(hv[i * d + j] - h1(i, j)));
    CHECK(worst < 1e-10);
}

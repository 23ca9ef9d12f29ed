#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "symbreak/linalg.hpp"
#include "symbreak/rng.hpp"

using namespace symbreak;

TEST_CASE("symmetric eigensolver reconstructs the matrix") {
    Rng rng(3);
    for (int n : {1, 2, 5, 24, 60}) {
        Matrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) a(i, j) = a(j, i) = rng.normal();
        const SymEig e = sym_eig(a);
        // ||A - Q L Q^T|| / ||A||
        Matrix r = a;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int t = 0; t < n; ++t) s += e.vectors(i, t) * e.values[t] * e.vectors(j, t);
                r(i, j) -= s;
            }
        CHECK(r.frobenius_norm() / (a.frobenius_norm() + 1e-30) < 1e-10);
        for (int t = 1; t < n; ++t) CHECK(e.values[t - 1] <= e.values[t] + 1e-14);
        // orthonormal columns
        double worst = 0.0;
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) {
                double ip = 0.0;
                for (int i = 0; i < n; ++i) ip += e.vectors(i, s) * e.vectors(i, t);
                worst = std::max(worst, std::fabs(ip - (s == t ? 1.0 : 0.0)));
            }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("eigensolver handles clustered spectra") {
    // diag(1,1,1,2,2,5) conjugated by a rotation
    const int n = 6;
    Matrix a(n, n);
    const double lam[n] = {1, 1, 1, 2, 2, 5};
    Rng rng(9);
    // build a random orthogonal Q via Gram-Schmidt on random vectors
    Matrix q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) = rng.normal();
    for (int c = 0; c < n; ++c) {
        for (int p = 0; p < c; ++p) {
            double ip = 0.0;
            for (int i = 0; i < n; ++i) ip += q(i, c) * q(i, p);
            for (int i = 0; i < n; ++i) q(i, c) -= ip * q(i, p);
        }
        double nn = 0.0;
        for (int i = 0; i < n; ++i) nn += q(i, c) * q(i, c);
        nn = std::sqrt(nn);
        for (int i = 0; i < n; ++i) q(i, c) /= nn;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int t = 0; t < n; ++t) s += q(i, t) * lam[t] * q(j, t);
            a(i, j) = s;
        }
    const SymEig e = sym_eig(a);
    const double expect[n] = {1, 1, 1, 2, 2, 5};
    for (int i = 0; i < n; ++i) CHECK(e.values[i] == doctest::Approx(expect[i]).epsilon(1e-10));
}

TEST_CASE("lu solve and condition estimate") {
    Rng rng(17);
    const int n = 7;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    const auto b = matvec(a, x);
    double cond = 0.0;
    const auto xs = lu_solve(a, b, &cond);
    for (int i = 0; i < n; ++i) CHECK(xs[i] == doctest::Approx(x[i]).epsilon(1e-9));
    CHECK(cond >= 1.0);
}

TEST_CASE("least squares recovers polynomial coefficients") {
    const int mrows = 30, ncols = 3;
    Matrix a(mrows, ncols);
    std::vector<double> b(mrows);
    for (int i = 0; i < mrows; ++i) {
        const double t = 0.05 + 0.9 * i / (mrows - 1.0);
        a(i, 0) = 1.0;
        a(i, 1) = t;
        a(i, 2) = t * t;
        b[i] = 2.0 - 3.0 * t + 0.5 * t * t;
    }
    const auto c = lstsq(a, b);
    CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(c[1] == doctest::Approx(-3.0).epsilon(1e-10));
    CHECK(c[2] == doctest::Approx(0.5).epsilon(1e-9));
}

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace symbreak {

// Forward-mode dual number with up to MaxN partials (runtime-sized). Enough
// for the reduced fields, whose dimension never exceeds nine.
template <std::size_t MaxN = 12>
struct DualT {
    double v = 0.0;
    std::array<double, MaxN> g{};
    std::size_t n = 0;

    DualT() = default;
    DualT(double value) : v(value) {}  // NOLINT: implicit by design
    DualT(double value, std::size_t nvars, std::size_t seed_index) : v(value), n(nvars) {
        g[seed_index] = 1.0;
    }

    DualT& operator+=(const DualT& o) {
        v += o.v;
        n = std::max(n, o.n);
        for (std::size_t i = 0; i < n; ++i) g[i] += o.g[i];
        return *this;
    }
    DualT& operator-=(const DualT& o) {
        v -= o.v;
        n = std::max(n, o.n);
        for (std::size_t i = 0; i < n; ++i) g[i] -= o.g[i];
        return *this;
    }
};

template <std::size_t N>
DualT<N> operator+(DualT<N> a, const DualT<N>& b) { return a += b; }
template <std::size_t N>
DualT<N> operator-(DualT<N> a, const DualT<N>& b) { return a -= b; }
template <std::size_t N>
DualT<N> operator-(const DualT<N>& a) {
    DualT<N> r;
    r.v = -a.v;
    r.n = a.n;
    for (std::size_t i = 0; i < r.n; ++i) r.g[i] = -a.g[i];
    return r;
}

template <std::size_t N>
DualT<N> operator*(const DualT<N>& a, const DualT<N>& b) {
    DualT<N> r;
    r.v = a.v * b.v;
    r.n = std::max(a.n, b.n);
    for (std::size_t i = 0; i < r.n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    return r;
}

template <std::size_t N>
DualT<N> operator/(const DualT<N>& a, const DualT<N>& b) {
    DualT<N> r;
    r.v = a.v / b.v;
    r.n = std::max(a.n, b.n);
    const double ib2 = 1.0 / (b.v * b.v);
    for (std::size_t i = 0; i < r.n; ++i) r.g[i] = (a.g[i] * b.v - a.v * b.g[i]) * ib2;
    return r;
}

template <std::size_t N>
DualT<N> operator+(DualT<N> a, double b) { a.v += b; return a; }
template <std::size_t N>
DualT<N> operator+(double b, DualT<N> a) { a.v += b; return a; }
template <std::size_t N>
DualT<N> operator-(DualT<N> a, double b) { a.v -= b; return a; }
template <std::size_t N>
DualT<N> operator-(double b, const DualT<N>& a) { return DualT<N>(b) - a; }
template <std::size_t N>
DualT<N> operator*(DualT<N> a, double b) {
    a.v *= b;
    for (std::size_t i = 0; i < a.n; ++i) a.g[i] *= b;
    return a;
}
template <std::size_t N>
DualT<N> operator*(double b, DualT<N> a) { return a * b; }
template <std::size_t N>
DualT<N> operator/(DualT<N> a, double b) { return a * (1.0 / b); }
template <std::size_t N>
DualT<N> operator/(double b, const DualT<N>& a) { return DualT<N>(b) / a; }

template <std::size_t N>
DualT<N> sqrt(const DualT<N>& a) {
    DualT<N> r;
    r.v = std::sqrt(a.v);
    r.n = a.n;
    const double f = 0.5 / r.v;
    for (std::size_t i = 0; i < r.n; ++i) r.g[i] = f * a.g[i];
    return r;
}

// theta = acos(c), sin(theta) = sqrt(1 - c^2); the derivative is singular at
// |c| = 1, which the smooth-domain preconditions exclude.
template <std::size_t N>
void angle_from_cos(const DualT<N>& c, DualT<N>& theta, DualT<N>& sine) {
    const double cv = (c.v > 1.0) ? 1.0 : (c.v < -1.0 ? -1.0 : c.v);
    const double s2 = 1.0 - cv * cv;
    const double sv = std::sqrt(s2 > 0.0 ? s2 : 0.0);
    theta.v = std::acos(cv);
    theta.n = c.n;
    sine.v = sv;
    sine.n = c.n;
    const double dth = (sv > 0.0) ? -1.0 / sv : 0.0;
    for (std::size_t i = 0; i < c.n; ++i) {
        theta.g[i] = dth * c.g[i];
        sine.g[i] = (sv > 0.0) ? -cv / sv * c.g[i] : 0.0;
    }
}

using Dual = DualT<12>;

}  // namespace symbreak

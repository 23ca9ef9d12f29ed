#pragma once

#include <cmath>
#include <vector>

#include "symbreak/errors.hpp"

// Scalar-generic evaluation of the reduced vector field F_d and of the loss
// restricted to the fixed-point space of Delta(S_{d-p} x S_p), p in {0, 1},
// with m extra rows. The dimension d enters only through multiplicities and
// column sums, so the same template serves plain doubles (field values),
// dual numbers (Jacobians) and truncated Puiseux series (coefficient order
// extraction).
//
// Coordinate layout, p = 1 (N = 5 + 2m):
//   xi[0] diagonal of the (d-1)x(d-1) block, xi[1] its off-diagonal,
//   xi[2] last-column value of those rows; then per single row r = 0..m:
//   xi[3+2r] first-band value, xi[4+2r] last-column value.
// Coordinate layout, p = 0 (N = 2 + m):
//   xi[0] diagonal, xi[1] off-diagonal; xi[2+r] value of extra row r.
//
// The scalar type S must provide +,-,*,/ among itself and double, sqrt(S),
// and angle_from_cos(S, S&, S&), both resolving via ADL or std.

namespace symbreak {

// theta = acos(clamped c) and sin(theta); overloads for other scalar types
// (dual numbers, series) are found by argument-dependent lookup.
inline void angle_from_cos(double c, double& theta, double& sine) {
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    theta = std::acos(c);
    const double s2 = 1.0 - c * c;
    sine = std::sqrt(s2 > 0.0 ? s2 : 0.0);
}

// long double variant: the restricted loss cancels O(d^2)-sized sums down to
// O(1/d) values along the type II families, which needs the extra mantissa.
inline void angle_from_cos(long double c, long double& theta, long double& sine) {
    if (c > 1.0L) c = 1.0L;
    if (c < -1.0L) c = -1.0L;
    theta = std::acos(c);
    const long double s2 = 1.0L - c * c;
    sine = std::sqrt(s2 > 0.0L ? s2 : 0.0L);
}

inline int reduced_dim(int p, int m) { return p == 0 ? 2 + m : 5 + 2 * m; }

inline void check_family_shape(int p, int m) {
    if (p != 0 && p != 1) throw domain_error("reduced field: p must be 0 or 1");
    if (m < 0 || m > 4) throw domain_error("reduced field: m out of supported range");
}

namespace detail {

template <class S>
struct RowGeometry {
    // Row classes: 0 = the d-p symmetric rows, 1..R = single rows.
    int p = 0, m = 0, R = 0;
    S nd;                      // d - p as a scalar
    std::vector<S> tau;        // row norms per class
    std::vector<S> u, v;       // single-row band values (v only for p = 1)
    S a, b, c;                 // symmetric-row values (c only for p = 1)
    // Angles, sines and the cosines they came from:
    S Theta1, sTheta1, cTheta1;                // between two symmetric rows
    S beta1, sbeta1, theta1, stheta1;          // symmetric row vs own / other target
    S lambda12, slambda12;                     // symmetric row vs last target (p = 1)
    std::vector<S> Lam1, sLam1, cLam1;         // symmetric row vs single row r
    std::vector<std::vector<S>> Lam, sLam, cLam;  // single row r vs single row t
    std::vector<S> lam1, slam1, lam2, slam2;   // single row vs targets
    S omega1, omega2;                          // pi * (column sums of W - V)
    std::vector<S> G;                          // per-class radial accumulators
};

template <class S>
RowGeometry<S> row_geometry(int p, int m, const S& dval, const std::vector<S>& xi) {
    using std::sqrt;
    check_family_shape(p, m);
    RowGeometry<S> geo;
    geo.p = p;
    geo.m = m;
    geo.R = (p == 1) ? m + 1 : m;
    geo.nd = dval - double(p);
    const int R = geo.R;

    geo.a = xi[0];
    geo.b = xi[1];
    if (p == 1) geo.c = xi[2];
    geo.u.resize(R);
    geo.v.resize(R);
    for (int r = 0; r < R; ++r) {
        if (p == 1) {
            geo.u[r] = xi[3 + 2 * r];
            geo.v[r] = xi[4 + 2 * r];
        } else {
            geo.u[r] = xi[2 + r];
        }
    }

    geo.tau.resize(R + 1);
    {
        S t2 = geo.a * geo.a + (geo.nd - 1.0) * geo.b * geo.b;
        if (p == 1) t2 = t2 + geo.c * geo.c;
        geo.tau[0] = sqrt(t2);
    }
    for (int r = 0; r < R; ++r) {
        S t2 = geo.nd * geo.u[r] * geo.u[r];
        if (p == 1) t2 = t2 + geo.v[r] * geo.v[r];
        geo.tau[r + 1] = sqrt(t2);
    }

    {
        S ip = 2.0 * geo.a * geo.b + (geo.nd - 2.0) * geo.b * geo.b;
        if (p == 1) ip = ip + geo.c * geo.c;
        geo.cTheta1 = ip / (geo.tau[0] * geo.tau[0]);
        angle_from_cos(geo.cTheta1, geo.Theta1, geo.sTheta1);
    }
    angle_from_cos(geo.a / geo.tau[0], geo.beta1, geo.sbeta1);
    angle_from_cos(geo.b / geo.tau[0], geo.theta1, geo.stheta1);
    if (p == 1) angle_from_cos(geo.c / geo.tau[0], geo.lambda12, geo.slambda12);

    geo.Lam1.resize(R);
    geo.sLam1.resize(R);
    geo.cLam1.resize(R);
    geo.lam1.resize(R);
    geo.slam1.resize(R);
    geo.lam2.resize(R);
    geo.slam2.resize(R);
    for (int r = 0; r < R; ++r) {
        S ip = geo.u[r] * (geo.a + (geo.nd - 1.0) * geo.b);
        if (p == 1) ip = ip + geo.v[r] * geo.c;
        geo.cLam1[r] = ip / (geo.tau[0] * geo.tau[r + 1]);
        angle_from_cos(geo.cLam1[r], geo.Lam1[r], geo.sLam1[r]);
        angle_from_cos(geo.u[r] / geo.tau[r + 1], geo.lam1[r], geo.slam1[r]);
        if (p == 1) angle_from_cos(geo.v[r] / geo.tau[r + 1], geo.lam2[r], geo.slam2[r]);
    }
    geo.Lam.assign(R, std::vector<S>(R));
    geo.sLam.assign(R, std::vector<S>(R));
    geo.cLam.assign(R, std::vector<S>(R));
    for (int r = 0; r < R; ++r)
        for (int t = r + 1; t < R; ++t) {
            S ip = geo.nd * geo.u[r] * geo.u[t];
            if (p == 1) ip = ip + geo.v[r] * geo.v[t];
            geo.cLam[r][t] = ip / (geo.tau[r + 1] * geo.tau[t + 1]);
            angle_from_cos(geo.cLam[r][t], geo.Lam[r][t], geo.sLam[r][t]);
            geo.Lam[t][r] = geo.Lam[r][t];
            geo.sLam[t][r] = geo.sLam[r][t];
            geo.cLam[t][r] = geo.cLam[r][t];
        }

    constexpr double pi = 3.14159265358979323846;
    {
        S cs1 = geo.a + (geo.nd - 1.0) * geo.b - 1.0;
        for (int r = 0; r < R; ++r) cs1 = cs1 + geo.u[r];
        geo.omega1 = cs1 * pi;
        if (p == 1) {
            S cs2 = geo.nd * geo.c - 1.0;
            for (int r = 0; r < R; ++r) cs2 = cs2 + geo.v[r];
            geo.omega2 = cs2 * pi;
        }
    }

    geo.G.resize(R + 1);
    {
        S num = (geo.nd - 1.0) * (geo.tau[0] * geo.sTheta1 - geo.stheta1) - geo.sbeta1;
        for (int r = 0; r < R; ++r) num = num + geo.tau[r + 1] * geo.sLam1[r];
        if (p == 1) num = num - geo.slambda12;
        geo.G[0] = num / geo.tau[0];
    }
    for (int r = 0; r < R; ++r) {
        S num = geo.nd * (geo.tau[0] * geo.sLam1[r] - geo.slam1[r]);
        for (int t = 0; t < R; ++t)
            if (t != r) num = num + geo.tau[t + 1] * geo.sLam[r][t];
        if (p == 1) num = num - geo.slam2[r];
        geo.G[r + 1] = num / geo.tau[r + 1];
    }
    return geo;
}

}  // namespace detail

// Pullback of grad L through the block parameterization; one value per
// fixed-point coordinate (the matching matrix entry of the gradient).
template <class S>
std::vector<S> eval_reduced_field(int p, int m, const S& dval, const std::vector<S>& xi) {
    const auto geo = detail::row_geometry<S>(p, m, dval, xi);
    const int R = geo.R;
    constexpr double inv2pi = 0.15915494309189533577;

    std::vector<S> f(reduced_dim(p, m), S(0.0));
    {
        S A = (geo.nd - 1.0) * geo.Theta1 * geo.b - geo.beta1;
        for (int r = 0; r < R; ++r) A = A + geo.Lam1[r] * geo.u[r];
        f[0] = (geo.G[0] * geo.a - A + geo.omega1) * inv2pi;
    }
    {
        S A = geo.Theta1 * (geo.a + (geo.nd - 2.0) * geo.b) - geo.theta1;
        for (int r = 0; r < R; ++r) A = A + geo.Lam1[r] * geo.u[r];
        f[1] = (geo.G[0] * geo.b - A + geo.omega1) * inv2pi;
    }
    if (p == 1) {
        S A = (geo.nd - 1.0) * geo.Theta1 * geo.c - geo.lambda12;
        for (int r = 0; r < R; ++r) A = A + geo.Lam1[r] * geo.v[r];
        f[2] = (geo.G[0] * geo.c - A + geo.omega2) * inv2pi;
    }
    for (int r = 0; r < R; ++r) {
        {
            S A = geo.Lam1[r] * (geo.a + (geo.nd - 1.0) * geo.b) - geo.lam1[r];
            for (int t = 0; t < R; ++t)
                if (t != r) A = A + geo.Lam[r][t] * geo.u[t];
            const int idx = (p == 1) ? 3 + 2 * r : 2 + r;
            f[idx] = (geo.G[r + 1] * geo.u[r] - A + geo.omega1) * inv2pi;
        }
        if (p == 1) {
            S A = geo.nd * geo.Lam1[r] * geo.c - geo.lam2[r];
            for (int t = 0; t < R; ++t)
                if (t != r) A = A + geo.Lam[r][t] * geo.v[t];
            f[4 + 2 * r] = (geo.G[r + 1] * geo.v[r] - A + geo.omega2) * inv2pi;
        }
    }
    return f;
}

// Loss restricted to the fixed-point space, analytic in real d.
template <class S>
S eval_reduced_loss(int p, int m, const S& dval, const std::vector<S>& xi) {
    const auto geo = detail::row_geometry<S>(p, m, dval, xi);
    const int R = geo.R;
    constexpr double pi = 3.14159265358979323846;
    constexpr double inv2pi = 0.15915494309189533577;

    // f(w, v) from norms and the (theta, sin, cos) triple of the pair.
    auto fe = [&](const S& ta, const S& tb, const S& t, const S& s, const S& c) {
        return ta * tb * (s + (pi - t) * c) * inv2pi;
    };

    S l(0.0);

    // (1/2) sum_{i,j} f(w_i, w_j); diagonal gives tau^2 / 2 per row.
    {
        S self = geo.nd * geo.tau[0] * geo.tau[0];
        for (int r = 0; r < R; ++r) self = self + geo.tau[r + 1] * geo.tau[r + 1];
        l = l + self * 0.25;
        l = l + 0.5 * geo.nd * (geo.nd - 1.0) *
                    fe(geo.tau[0], geo.tau[0], geo.Theta1, geo.sTheta1, geo.cTheta1);
        for (int r = 0; r < R; ++r) {
            l = l + geo.nd * fe(geo.tau[0], geo.tau[r + 1], geo.Lam1[r], geo.sLam1[r],
                                geo.cLam1[r]);
            for (int t = r + 1; t < R; ++t)
                l = l + fe(geo.tau[r + 1], geo.tau[t + 1], geo.Lam[r][t], geo.sLam[r][t],
                           geo.cLam[r][t]);
        }
    }
    // - sum_{i, j<=d} f(w_i, v_j)
    {
        const S one(1.0);
        S st = geo.nd * (fe(geo.tau[0], one, geo.beta1, geo.sbeta1, geo.a / geo.tau[0]) +
                         (geo.nd - 1.0) * fe(geo.tau[0], one, geo.theta1, geo.stheta1,
                                             geo.b / geo.tau[0]));
        if (p == 1)
            st = st + geo.nd *
                          fe(geo.tau[0], one, geo.lambda12, geo.slambda12, geo.c / geo.tau[0]);
        for (int r = 0; r < R; ++r) {
            st = st + geo.nd * fe(geo.tau[r + 1], one, geo.lam1[r], geo.slam1[r],
                                  geo.u[r] / geo.tau[r + 1]);
            if (p == 1)
                st = st + fe(geo.tau[r + 1], one, geo.lam2[r], geo.slam2[r],
                             geo.v[r] / geo.tau[r + 1]);
        }
        l = l - st;
    }
    // + (1/2) sum_{i,j<=d} f(v_i, v_j) = d/4 + d(d-1)/(4 pi)
    {
        const S dv = geo.nd + double(p);
        l = l + dv * 0.25 + dv * (dv - 1.0) * (0.25 / pi);
    }
    return l;
}

}  // namespace symbreak

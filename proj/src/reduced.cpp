#include "symbreak/reduced.hpp"

#include <cmath>
#include <string>

#include "symbreak/autodiff.hpp"
#include "symbreak/errors.hpp"

namespace symbreak {

bool IsotropyDescriptor::d_is_integer() const {
    return std::fabs(d - std::round(d)) < 1e-9;
}

int IsotropyDescriptor::d_int() const {
    if (!d_is_integer()) throw domain_error("descriptor: d is not an integer");
    return static_cast<int>(std::lround(d));
}

int IsotropyDescriptor::k_of_d() const { return d_int() + m; }

void IsotropyDescriptor::validate() const {
    check_family_shape(p, m);
    const double dmin = (p == 1) ? 3.0 : 2.0;
    if (!(d > p) || d < dmin) throw domain_error("descriptor: d below the family's range");
}

WeightConfig embed(const ReducedPoint& pt) {
    const auto& ds = pt.desc;
    ds.validate();
    if (static_cast<int>(pt.xi.size()) != ds.N())
        throw domain_error("embed: coordinate count does not match descriptor");
    const int d = ds.d_int();
    const int k = d + ds.m;
    const int q = d - ds.p;
    const auto& xi = pt.xi;

    Matrix w(k, d);
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) w(i, j) = (i == j) ? xi[0] : xi[1];
        if (ds.p == 1) w(i, d - 1) = xi[2];
    }
    const int nr = (ds.p == 1) ? ds.m + 1 : ds.m;
    for (int r = 0; r < nr; ++r) {
        const int row = q + r;
        if (ds.p == 1) {
            for (int j = 0; j < q; ++j) w(row, j) = xi[3 + 2 * r];
            w(row, d - 1) = xi[4 + 2 * r];
        } else {
            for (int j = 0; j < d; ++j) w(row, j) = xi[2 + r];
        }
    }
    return WeightConfig(k, d, std::move(w));
}

ReducedPoint project(const WeightConfig& cfg, IsotropyDescriptor desc, double tol) {
    desc.validate();
    const int d = desc.d_int();
    if (cfg.d != d || cfg.k != d + desc.m)
        throw domain_error("project: weight shape does not match descriptor");
    const int q = d - desc.p;
    const Matrix& w = cfg.W;

    std::vector<double> xi(desc.N(), 0.0);
    double diag = 0.0, off = 0.0, last = 0.0;
    for (int i = 0; i < q; ++i) {
        diag += w(i, i);
        for (int j = 0; j < q; ++j)
            if (j != i) off += w(i, j);
        if (desc.p == 1) last += w(i, d - 1);
    }
    xi[0] = diag / q;
    xi[1] = (q > 1) ? off / (double(q) * (q - 1)) : 0.0;
    if (desc.p == 1) xi[2] = last / q;
    const int nr = (desc.p == 1) ? desc.m + 1 : desc.m;
    for (int r = 0; r < nr; ++r) {
        const int row = q + r;
        double band = 0.0;
        const int width = (desc.p == 1) ? q : d;
        for (int j = 0; j < width; ++j) band += w(row, j);
        if (desc.p == 1) {
            xi[3 + 2 * r] = band / q;
            xi[4 + 2 * r] = w(row, d - 1);
        } else {
            xi[2 + r] = band / d;
        }
    }

    ReducedPoint pt{desc, xi};
    const WeightConfig back = embed(pt);
    double worst = 0.0;
    int wi = 0, wj = 0;
    for (int i = 0; i < cfg.k; ++i)
        for (int j = 0; j < cfg.d; ++j) {
            const double dev = std::fabs(back.W(i, j) - w(i, j));
            if (dev > worst) {
                worst = dev;
                wi = i;
                wj = j;
            }
        }
    if (worst > tol)
        throw domain_error("project: matrix is outside the fixed-point space; worst entry (" +
                           std::to_string(wi) + "," + std::to_string(wj) + ") deviates by " +
                           std::to_string(worst));
    return pt;
}

std::vector<double> reduced_field(const ReducedPoint& pt) {
    pt.desc.validate();
    return eval_reduced_field<double>(pt.desc.p, pt.desc.m, pt.desc.d, pt.xi);
}

double reduced_loss(const ReducedPoint& pt) {
    pt.desc.validate();
    std::vector<long double> xi(pt.xi.begin(), pt.xi.end());
    return static_cast<double>(
        eval_reduced_loss<long double>(pt.desc.p, pt.desc.m, pt.desc.d, xi));
}

AngleData reduced_angles(const ReducedPoint& pt) {
    pt.desc.validate();
    const auto geo =
        detail::row_geometry<double>(pt.desc.p, pt.desc.m, pt.desc.d, pt.xi);
    AngleData a;
    a.tau = geo.tau;
    a.Theta1 = geo.Theta1;
    a.beta1 = geo.beta1;
    a.theta1 = geo.theta1;
    a.lambda12 = geo.lambda12;
    a.Lambda1 = geo.Lam1;
    a.Lambda = Matrix(geo.R, geo.R);
    for (int r = 0; r < geo.R; ++r)
        for (int t = 0; t < geo.R; ++t)
            if (r != t) a.Lambda(r, t) = geo.Lam[r][t];
    a.lambda_first = geo.lam1;
    a.lambda_last = geo.lam2;
    a.Omega1 = geo.omega1;
    a.Omega2 = geo.omega2;
    a.G = geo.G;
    return a;
}

Matrix reduced_jacobian(const ReducedPoint& pt) {
    pt.desc.validate();
    const int n = pt.desc.N();
    std::vector<Dual> xi(n);
    for (int i = 0; i < n; ++i) xi[i] = Dual(pt.xi[i], n, i);
    const Dual dval(pt.desc.d);
    const auto f = eval_reduced_field<Dual>(pt.desc.p, pt.desc.m, dval, xi);
    Matrix j(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) j(i, k) = f[i].g[k];
    return j;
}

Matrix reduced_jacobian_fd(const ReducedPoint& pt, double step) {
    const int n = pt.desc.N();
    Matrix j(n, n);
    ReducedPoint q = pt;
    for (int k = 0; k < n; ++k) {
        q.xi[k] = pt.xi[k] + step;
        const auto fp = reduced_field(q);
        q.xi[k] = pt.xi[k] - step;
        const auto fm = reduced_field(q);
        q.xi[k] = pt.xi[k];
        for (int i = 0; i < n; ++i) j(i, k) = (fp[i] - fm[i]) / (2.0 * step);
    }
    return j;
}

std::vector<double> gram_diag(const IsotropyDescriptor& desc) {
    desc.validate();
    const double q = desc.d - desc.p;
    std::vector<double> g(desc.N(), 0.0);
    if (desc.p == 1) {
        g[0] = q;
        g[1] = q * (q - 1.0);
        g[2] = q;
        for (int r = 0; r < desc.m + 1; ++r) {
            g[3 + 2 * r] = q;
            g[4 + 2 * r] = 1.0;
        }
    } else {
        g[0] = q;
        g[1] = q * (q - 1.0);
        for (int r = 0; r < desc.m; ++r) g[2 + r] = q;
    }
    return g;
}

Matrix symmetrized_jacobian(const ReducedPoint& pt) {
    const Matrix j = reduced_jacobian(pt);
    const auto g = gram_diag(pt.desc);
    const int n = pt.desc.N();
    Matrix b(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            b(i, k) = std::sqrt(g[i]) * j(i, k) / std::sqrt(g[k]);
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) {
            const double v = 0.5 * (b(i, k) + b(k, i));
            b(i, k) = v;
            b(k, i) = v;
        }
    return b;
}

}  // namespace symbreak

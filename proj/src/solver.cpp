#include "symbreak/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "symbreak/errors.hpp"

namespace symbreak {

void FamilyId::validate() const {
    if (p == 0) {
        if (type != FamilyType::I || m < 0 || m > 1)
            throw usage_error("no such family: with p=0 only type I, m in {0,1} exists");
    } else if (p == 1) {
        if (m < 0 || m > 2)
            throw usage_error("no such family: with p=1 need m in {0,1,2}");
    } else {
        throw usage_error("no such family: p must be 0 or 1");
    }
}

int FamilyId::kappa() const {
    validate();
    return (type == FamilyType::I && p == 1 && m >= 1) ? 4 : 2;
}

std::string FamilyId::name() const {
    return std::string(type == FamilyType::I ? "I" : "II") + "_p" + std::to_string(p) +
           "_m" + std::to_string(m);
}

FamilyId parse_family(const std::string& type, int p, int m) {
    FamilyId f;
    if (type == "I" || type == "i")
        f.type = FamilyType::I;
    else if (type == "II" || type == "ii")
        f.type = FamilyType::II;
    else
        throw usage_error("family type must be I or II");
    f.p = p;
    f.m = m;
    f.validate();
    return f;
}

NewtonReport newton_solve(const IsotropyDescriptor& desc, std::vector<double> xi0, double tol,
                          int max_iter) {
    desc.validate();
    const int n = desc.N();
    if (static_cast<int>(xi0.size()) != n)
        throw domain_error("newton_solve: seed size does not match descriptor");

    // Angles between nearly-aligned rows lose ~eps*d of absolute accuracy, so
    // the achievable residual floor grows linearly in d.
    const double tol_eff = std::max(tol, 1e-16 * desc.d);

    ReducedPoint pt{desc, std::move(xi0)};
    NewtonReport rep;
    rep.tol_used = tol_eff;
    auto res_inf = [&](const std::vector<double>& f) {
        double r = 0.0;
        for (double v : f) r = std::max(r, std::fabs(v));
        return r;
    };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", v);
        return std::string(buf);
    };

    const auto gram = gram_diag(desc);
    std::vector<double> f = reduced_field(pt);
    double r = res_inf(f);
    rep.residual_history.push_back(r);
    int it = 0;
    while (r > tol_eff && it < max_iter) {
        // Solve in the orthonormal basis of the fixed-point space, where the
        // Jacobian is symmetric and far better scaled than in xi coordinates:
        // B y = -D f with B = D J D^{-1}, D = sqrt(Gram), step = D^{-1} y.
        const Matrix j = reduced_jacobian(pt);
        Matrix b(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                b(i, k) = std::sqrt(gram[i]) * j(i, k) / std::sqrt(gram[k]);
        double cond = 0.0;
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -std::sqrt(gram[i]) * f[i];
        std::vector<double> step;
        try {
            step = lu_solve(b, rhs, &cond);
        } catch (const convergence_error&) {
            throw convergence_error("newton_solve: singular Jacobian at d=" +
                                    std::to_string(desc.d));
        }
        for (int i = 0; i < n; ++i) step[i] /= std::sqrt(gram[i]);
        if (cond > 1e12)
            throw convergence_error("newton_solve: Jacobian condition estimate " + fmt(cond) +
                                    " exceeds 1e12");
        // Backtracking keeps the iteration inside the smooth domain.
        double lambda = 1.0;
        ReducedPoint trial = pt;
        double rnew = r;
        for (int bt = 0;; ++bt) {
            if (bt == 30)
                throw convergence_error("newton_solve: line search failed, residual " +
                                        fmt(r) + " at d=" + std::to_string(desc.d));
            for (int i = 0; i < n; ++i) trial.xi[i] = pt.xi[i] + lambda * step[i];
            bool ok = true;
            std::vector<double> fnew;
            try {
                fnew = reduced_field(trial);
                rnew = res_inf(fnew);
            } catch (const domain_error&) {
                ok = false;
            }
            if (ok && (rnew < r || rnew < tol_eff)) {
                pt = trial;
                f = std::move(fnew);
                break;
            }
            lambda *= 0.5;
        }
        r = rnew;
        rep.residual_history.push_back(r);
        ++it;
    }
    if (r > tol_eff)
        throw convergence_error("newton_solve: max iterations reached, residual " + fmt(r));
    rep.point = pt;
    rep.iterations = it;
    rep.residual = r;
    return rep;
}

FamilyType classify_type(const ReducedPoint& pt) {
    const double x1 = pt.xi.at(0);
    if (x1 > 0.5) return FamilyType::II;
    if (x1 < -0.5) return FamilyType::I;
    throw domain_error("classify_type: |xi_1| <= 0.5, point is too close to the transition");
}

std::vector<double> family_limit(const FamilyId& family) {
    family.validate();
    const int n = reduced_dim(family.p, family.m);
    std::vector<double> lim(n, 0.0);
    lim[0] = (family.type == FamilyType::II) ? 1.0 : -1.0;
    if (family.p == 1) {
        if (family.type == FamilyType::II) {
            // last single row tends to -v_d
            lim[4 + 2 * family.m] = -1.0;
        } else if (family.m >= 1) {
            // one row to +v_d/2, one to -v_d/2
            lim[4] = 0.5;
            lim[6] = -0.5;
        } else {
            // k = d type I: the single row tends to +v_d
            lim[4] = 1.0;
        }
    }
    return lim;
}

namespace {

// v-coordinate targets of the single rows, in canonical order.
std::vector<double> single_row_targets(const FamilyId& family) {
    std::vector<double> t;
    if (family.p != 1) return t;
    const auto lim = family_limit(family);
    for (int r = 0; r <= family.m; ++r) t.push_back(lim[4 + 2 * r]);
    return t;
}

}  // namespace

void canonicalize(const FamilyId& family, ReducedPoint& pt) {
    if (family.p != 1 || family.m == 0) return;
    const int nr = family.m + 1;
    const auto targets = single_row_targets(family);
    std::vector<int> perm(nr);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_cost = 1e300;
    do {
        double cost = 0.0;
        for (int r = 0; r < nr; ++r) cost += std::fabs(pt.xi[4 + 2 * perm[r]] - targets[r]);
        // deterministic tie-break among equal targets: ascending v
        for (int r = 0; r + 1 < nr; ++r)
            if (targets[r] == targets[r + 1] &&
                pt.xi[4 + 2 * perm[r]] > pt.xi[4 + 2 * perm[r + 1]])
                cost += 1e-12;
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<double> xi = pt.xi;
    for (int r = 0; r < nr; ++r) {
        xi[3 + 2 * r] = pt.xi[3 + 2 * best[r]];
        xi[4 + 2 * r] = pt.xi[4 + 2 * best[r]];
    }
    pt.xi = std::move(xi);
}

ReducedPoint bootstrap_point(const FamilyId& family, double d, double tol) {
    family.validate();
    IsotropyDescriptor desc{family.p, family.m, d};

    // With two extra rows the crude-scale seeds tend to fall onto degenerate
    // strata; growing the solved m = 1 point by one row is far more reliable.
    if (family.p == 1 && family.m == 2) {
        const FamilyId base_fam{family.type, 1, 1};
        const ReducedPoint base = bootstrap_point(base_fam, d, tol);
        const double s4 = 1.0 / std::pow(d, 0.25);
        std::vector<std::vector<double>> seeds;
        if (family.type == FamilyType::II) {
            // insert the new middle row between (g, h) and the row at -v_d
            for (auto [su, sv] : {std::pair{0.25, 0.4}, {0.15, 0.3}, {0.4, 0.55}})
                seeds.push_back({base.xi[0], base.xi[1], base.xi[2], base.xi[3], base.xi[4],
                                 su * base.xi[3], sv * base.xi[4], base.xi[5], base.xi[6]});
        } else {
            // append a row tending to zero (last coordinate decays like
            // d^{-1/2} along this family)
            const double s2 = 1.0 / std::sqrt(d);
            for (auto [su, sv] : {std::pair{1.0, -0.9}, {1.3, -0.9}, {1.0, 0.9}, {0.5, -0.4}})
                seeds.push_back({base.xi[0], base.xi[1], base.xi[2], base.xi[3], base.xi[4],
                                 base.xi[5], base.xi[6], su / d, sv * s2});
        }
        std::string last_err;
        for (const auto& xi0 : seeds) {
            try {
                NewtonReport rep = newton_solve(desc, xi0, tol, 80);
                if (classify_type(rep.point) != family.type) continue;
                canonicalize(family, rep.point);
                bool ok = true;
                const auto targets = single_row_targets(family);
                for (int r = 0; r <= family.m; ++r)
                    if (std::fabs(rep.point.xi[4 + 2 * r] - targets[r]) > 0.45) ok = false;
                if (ok) return rep.point;
            } catch (const std::runtime_error& e) {
                last_err = e.what();
            }
        }
        throw convergence_error("bootstrap_point: no grown seed converged for family " +
                                family.name() + " at d=" + std::to_string(d) +
                                (last_err.empty() ? "" : ("; last error: " + last_err)));
    }

    const auto lim = family_limit(family);
    const double s2 = 1.0 / std::sqrt(d);       // d^{-1/2}
    const double s4 = 1.0 / std::pow(d, 0.25);  // d^{-1/4}
    const bool is2 = (family.type == FamilyType::II);

    // Scale-correct guesses for the coordinates that vanish in the limit; a
    // small grid of sign/scale alternatives backs up the primary guess.
    std::vector<std::vector<double>> seeds;
    auto push_seed = [&](double uscale, double vscale) {
        std::vector<double> xi = lim;
        xi[1] = 1.0 / d;  // off-diagonal
        if (family.p == 1) {
            xi[2] = 2.0 / d;  // shared last-column coordinate
            for (int r = 0; r <= family.m; ++r) {
                // keep same-limit rows apart: identical rows collapse onto the
                // degenerate (singular-Hessian) stratum
                const double sep = 1.0 + 0.9 * r;
                double& u = xi[3 + 2 * r];
                double& v = xi[4 + 2 * r];
                const double vlim = lim[4 + 2 * r];
                if (is2) {
                    u = uscale * sep / d;
                    if (vlim == 0.0) v = vscale * s2 / sep;
                } else if (family.m >= 1) {
                    u = uscale * sep * s2 * s4;  // d^{-3/4}
                    if (vlim == 0.0)
                        v = vscale * s4;
                    else
                        v = vlim + 0.5 * s4;
                } else {
                    u = uscale / d;
                }
            }
        } else {
            for (int r = 0; r < family.m; ++r) xi[2 + r] = vscale * s2 * (1.0 + 0.9 * r);
        }
        seeds.push_back(std::move(xi));
    };

    push_seed(1.0, is2 ? -0.7 : 0.4);
    for (double us : {0.5, 2.0})
        for (double vs : {-1.2, -0.4, 0.4, 1.2}) push_seed(us, is2 ? -std::fabs(vs) : vs);

    std::string last_err;
    for (const auto& xi0 : seeds) {
        try {
            NewtonReport rep = newton_solve(desc, xi0, tol, 80);
            if (classify_type(rep.point) != family.type) continue;
            canonicalize(family, rep.point);
            // Reject a sibling copy or a different family: at large d the
            // single-row v-coordinates sit near their limit targets.
            bool ok = true;
            if (family.p == 1) {
                const auto targets = single_row_targets(family);
                for (int r = 0; r <= family.m; ++r)
                    if (std::fabs(rep.point.xi[4 + 2 * r] - targets[r]) > 0.45) ok = false;
            }
            if (ok) return rep.point;
        } catch (const convergence_error& e) {
            last_err = e.what();
        } catch (const domain_error& e) {
            last_err = e.what();
        }
    }
    throw convergence_error("bootstrap_point: no seed converged for family " + family.name() +
                            " at d=" + std::to_string(d) +
                            (last_err.empty() ? "" : ("; last error: " + last_err)));
}

ContinuationPath continue_family(const FamilyId& family, double d_start, double d_end,
                                 const ContinuationOptions& opt) {
    family.validate();
    if (d_start <= 0.0 || d_end <= 0.0)
        throw usage_error("continue_family: d range must be positive");

    ContinuationPath path;
    path.family = family;

    const double l0 = std::log10(d_start), l1 = std::log10(d_end);
    const int npts =
        std::max(2, 1 + static_cast<int>(std::ceil(std::fabs(l1 - l0) * opt.samples_per_decade)));

    std::vector<double> xi;
    if (opt.seed) {
        xi = opt.seed(d_start);
        IsotropyDescriptor d0{family.p, family.m, d_start};
        if (static_cast<int>(xi.size()) != d0.N())
            throw domain_error("continue_family: seed has wrong dimension");
    } else {
        xi = bootstrap_point(family, d_start, opt.tol).xi;
    }

    const double base_step = (npts > 1) ? (l1 - l0) / (npts - 1) : 0.0;
    double prev_log = l0;
    double step = base_step;
    bool first = true;
    int halvings_left = opt.max_halvings;
    double cur_log = l0;

    auto solve_at = [&](double d, const std::vector<double>& guess) -> PathSample {
        IsotropyDescriptor desc{family.p, family.m, d};
        NewtonReport rep = newton_solve(desc, guess, opt.tol, 60);
        if (first) canonicalize(family, rep.point);
        PathSample s;
        s.d = d;
        s.xi = rep.point.xi;
        s.newton_iterations = rep.iterations;
        const SymEig eig = sym_eig(symmetrized_jacobian(rep.point), false);
        double mn = 1e300;
        for (double v : eig.values) mn = std::min(mn, std::fabs(v));
        s.min_abs_jac_eig = mn;
        return s;
    };

    while (true) {
        const double target =
            (base_step >= 0) ? std::min(cur_log, l1) : std::max(cur_log, l1);
        try {
            PathSample s = solve_at(std::pow(10.0, target), xi);
            xi = s.xi;
            path.samples.push_back(std::move(s));
            path.last_good_d = std::pow(10.0, target);
            first = false;
            prev_log = target;
            if (std::fabs(target - l1) < 1e-12) {
                path.complete = true;
                break;
            }
            if (std::fabs(step) < std::fabs(base_step)) step *= 2.0;  // recover step size
            cur_log = target + step;
        } catch (const std::runtime_error& e) {
            if (first || halvings_left-- <= 0) {
                if (first) throw;
                path.termination =
                    std::string("stopped after repeated Newton failure: ") + e.what();
                break;
            }
            step *= 0.5;
            cur_log = prev_log + step;
        }
    }
    return path;
}

}  // namespace symbreak

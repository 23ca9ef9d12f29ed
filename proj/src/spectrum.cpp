#include "symbreak/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "symbreak/errors.hpp"

namespace symbreak {

namespace {
constexpr double kPi = 3.14159265358979323846;

int q_of(const IsotropyDescriptor& desc) { return desc.d_int() - desc.p; }

Matrix zero_matrix(const IsotropyDescriptor& desc) {
    return Matrix(static_cast<std::size_t>(desc.k_of_d()),
                  static_cast<std::size_t>(desc.d_int()));
}

void normalize_frob(Matrix& m) {
    const double n = m.frobenius_norm();
    if (n == 0.0) throw domain_error("irrep basis: zero representative");
    m *= 1.0 / n;
}

}  // namespace

int irrep_degree(const IsotropyDescriptor& desc, const std::string& irrep) {
    const int q = q_of(desc);
    if (irrep == "t") return 1;
    if (irrep == "s") return q - 1;
    if (irrep == "x") return (q - 1) * (q - 2) / 2;
    if (irrep == "y") return q * (q - 3) / 2;
    throw usage_error("unknown irrep label: " + irrep);
}

int irrep_copies(const IsotropyDescriptor& desc, const std::string& irrep) {
    // Trivial copies span the fixed-point space (dimension N); the standard
    // count follows from the block decomposition of M(k, d) under S_q.
    if (irrep == "t") return desc.N();
    if (irrep == "s") return desc.m + 2 * desc.p + 3;
    if (irrep == "x" || irrep == "y") return 1;
    throw usage_error("unknown irrep label: " + irrep);
}

IrrepBasis build_irrep_basis(const IsotropyDescriptor& desc, const std::string& irrep) {
    desc.validate();
    const int d = desc.d_int();
    const int q = q_of(desc);
    if (d < 4) throw domain_error("build_irrep_basis: need d >= 4");

    IrrepBasis basis;
    basis.irrep = irrep;
    basis.degree = irrep_degree(desc, irrep);
    if (basis.degree <= 0)
        throw domain_error("build_irrep_basis: irrep " + irrep + " is absent at q=" +
                           std::to_string(q));

    if (irrep == "t") {
        for (int i = 0; i < desc.N(); ++i) {
            ReducedPoint e{desc, std::vector<double>(desc.N(), 0.0)};
            e.xi[static_cast<std::size_t>(i)] = 1.0;
            Matrix m = embed(e).W;
            normalize_frob(m);
            basis.reps.push_back(std::move(m));
        }
        return basis;
    }

    if (irrep == "s") {
        // zero-sum pattern vector on the q symmetric indices
        std::vector<double> z(static_cast<std::size_t>(q), 0.0);
        z[0] = 1.0 / std::sqrt(2.0);
        z[1] = -1.0 / std::sqrt(2.0);

        {
            Matrix m = zero_matrix(desc);  // diagonal slot
            for (int i = 0; i < q; ++i) m(i, i) = z[static_cast<std::size_t>(i)];
            normalize_frob(m);
            basis.reps.push_back(std::move(m));
        }
        {
            Matrix m = zero_matrix(desc);  // symmetric off-diagonal: z_i + z_j
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j)
                    if (i != j)
                        m(i, j) = z[static_cast<std::size_t>(i)] + z[static_cast<std::size_t>(j)];
            normalize_frob(m);
            basis.reps.push_back(std::move(m));
        }
        {
            Matrix m = zero_matrix(desc);  // antisymmetric: z_i - z_j
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j)
                    if (i != j)
                        m(i, j) = z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
            normalize_frob(m);
            basis.reps.push_back(std::move(m));
        }
        if (desc.p == 1) {
            Matrix m = zero_matrix(desc);  // last-column coupling
            for (int i = 0; i < q; ++i) m(i, d - 1) = z[static_cast<std::size_t>(i)];
            normalize_frob(m);
            basis.reps.push_back(std::move(m));
        }
        const int nsingle = (desc.p == 1) ? desc.m + 1 : desc.m;
        for (int r = 0; r < nsingle; ++r) {
            Matrix m = zero_matrix(desc);  // zero-sum pattern in each single row
            for (int j = 0; j < q; ++j) m(q + r, j) = z[static_cast<std::size_t>(j)];
            normalize_frob(m);
            basis.reps.push_back(std::move(m));
        }
        if (static_cast<int>(basis.reps.size()) != irrep_copies(desc, "s"))
            throw domain_error("build_irrep_basis: standard copy count mismatch");
        return basis;
    }

    if (irrep == "x" || irrep == "y") {
        // two-index pattern u v^T -+ v u^T with disjoint zero-sum u, v;
        // orthogonal to every trivial and standard slot
        Matrix m = zero_matrix(desc);
        const double u[2] = {1.0, -1.0};
        const double v[2] = {1.0, -1.0};
        const int iu[2] = {0, 1}, iv[2] = {2, 3};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const double val = u[a] * v[b];
                m(iu[a], iv[b]) += val;
                m(iv[b], iu[a]) += (irrep == "x") ? -val : val;
            }
        normalize_frob(m);
        basis.reps.push_back(std::move(m));
        return basis;
    }
    throw usage_error("unknown irrep label: " + irrep);
}

BlockSpectrum isotypic_block(const WeightConfig& cfg, const IrrepBasis& basis) {
    const int r = static_cast<int>(basis.reps.size());
    if (r == 0) throw domain_error("isotypic_block: empty basis");
    for (const auto& m : basis.reps)
        if (m.rows() != static_cast<std::size_t>(cfg.k) ||
            m.cols() != static_cast<std::size_t>(cfg.d))
            throw domain_error("isotypic_block: basis/descriptor mismatch");

    BlockSpectrum out;
    out.block = Matrix(static_cast<std::size_t>(r), static_cast<std::size_t>(r));
    std::vector<Matrix> images;
    images.reserve(static_cast<std::size_t>(r));
    for (int j = 0; j < r; ++j) images.push_back(hessian_vector_product(cfg, basis.reps[j]));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            out.block(i, j) = dot(basis.reps[static_cast<std::size_t>(i)].data(),
                                  images[static_cast<std::size_t>(j)].data(),
                                  static_cast<std::size_t>(cfg.k * cfg.d));
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            const double v = 0.5 * (out.block(i, j) + out.block(j, i));
            out.block(i, j) = v;
            out.block(j, i) = v;
        }
    out.eigenvalues = sym_eig(out.block, false).values;
    return out;
}

SpectrumReport adapted_spectrum(const WeightConfig& cfg, const IsotropyDescriptor& desc) {
    SpectrumReport rep;
    rep.desc = desc;
    rep.method = "adapted";
    for (const std::string irrep : {"t", "s", "x", "y"}) {
        const int deg = irrep_degree(desc, irrep);
        if (deg <= 0) {
            rep.notes.push_back("irrep " + irrep + " absent (degree <= 0)");
            continue;
        }
        const IrrepBasis basis = build_irrep_basis(desc, irrep);
        const BlockSpectrum bs = isotypic_block(cfg, basis);
        EigGroup g;
        g.irrep = irrep;
        g.degree = deg;
        g.eigenvalues = bs.eigenvalues;
        rep.groups.push_back(std::move(g));
    }
    return rep;
}

SpectrumReport full_spectrum(const WeightConfig& cfg, const IsotropyDescriptor& desc) {
    desc.validate();
    const int kd = cfg.k * cfg.d;
    if (kd > 4000) throw domain_error("full_spectrum: kd too large for the dense route");
    const int q = q_of(desc);

    const Matrix h = hessian(cfg);
    const SymEig eig = sym_eig(h, false);

    SpectrumReport rep;
    rep.desc = desc;
    rep.method = "dense";

    struct Cluster {
        double value;
        int size;
    };
    std::vector<Cluster> clusters;
    {
        int start = 0;
        for (int i = 1; i <= kd; ++i) {
            const bool flush =
                (i == kd) ||
                (eig.values[static_cast<std::size_t>(i)] -
                     eig.values[static_cast<std::size_t>(i - 1)] >
                 1e-6 * std::max(1.0, std::fabs(eig.values[static_cast<std::size_t>(i)])));
            if (flush) {
                double mean = 0.0;
                for (int j = start; j < i; ++j) mean += eig.values[static_cast<std::size_t>(j)];
                clusters.push_back({mean / (i - start), i - start});
                start = i;
            }
        }
    }

    struct IrrepSlot {
        std::string label;
        int degree;
        int remaining;
    };
    std::vector<IrrepSlot> slots;
    for (const std::string irrep : {"x", "y", "s", "t"}) {  // larger degrees first
        const int deg = irrep_degree(desc, irrep);
        const int cop = irrep_copies(desc, irrep);
        if (deg <= 0) {
            rep.notes.push_back("irrep " + irrep + " absent (degree <= 0)");
            continue;
        }
        slots.push_back({irrep, deg, cop});
    }
    std::sort(slots.begin(), slots.end(),
              [](const IrrepSlot& a, const IrrepSlot& b) { return a.degree > b.degree; });
    {
        const int dx = irrep_degree(desc, "x"), dy = irrep_degree(desc, "y");
        if (dx == dy && dy > 0)
            rep.notes.push_back("x and y degrees collide at q=" + std::to_string(q));
    }

    std::vector<EigGroup> groups(slots.size());
    for (std::size_t s = 0; s < slots.size(); ++s) {
        groups[s].irrep = slots[s].label;
        groups[s].degree = slots[s].degree;
    }

    const int ns = static_cast<int>(slots.size());
    for (const auto& cl : clusters) {
        std::vector<int> counts(static_cast<std::size_t>(ns), 0);
        std::vector<int> best;
        int nsolutions = 0;
        std::function<void(int, int)> rec = [&](int idx, int left) {
            if (left == 0 && idx <= ns) {
                bool rest_zero = true;
                for (int t = idx; t < ns; ++t)
                    if (counts[static_cast<std::size_t>(t)] != 0) rest_zero = false;
                (void)rest_zero;
                ++nsolutions;
                if (best.empty()) best = counts;
                return;
            }
            if (idx == ns || left < 0) return;
            const int maxc = std::min(slots[static_cast<std::size_t>(idx)].remaining,
                                      left / slots[static_cast<std::size_t>(idx)].degree);
            for (int c = maxc; c >= 0; --c) {
                counts[static_cast<std::size_t>(idx)] = c;
                rec(idx + 1, left - c * slots[static_cast<std::size_t>(idx)].degree);
                if (nsolutions > 4) break;
            }
            counts[static_cast<std::size_t>(idx)] = 0;
        };
        rec(0, cl.size);
        if (best.empty()) {
            rep.notes.push_back("unassignable cluster of size " + std::to_string(cl.size));
            continue;
        }
        if (nsolutions > 1)
            rep.notes.push_back("ambiguous cluster of size " + std::to_string(cl.size));
        for (int t = 0; t < ns; ++t)
            for (int c = 0; c < best[static_cast<std::size_t>(t)]; ++c) {
                groups[static_cast<std::size_t>(t)].eigenvalues.push_back(cl.value);
                --slots[static_cast<std::size_t>(t)].remaining;
            }
    }
    for (std::size_t s = 0; s < slots.size(); ++s) {
        if (slots[s].remaining != 0)
            rep.notes.push_back("irrep " + slots[s].label + " has " +
                                std::to_string(slots[s].remaining) + " unassigned copies");
        std::sort(groups[s].eigenvalues.begin(), groups[s].eigenvalues.end());
    }
    rep.groups = std::move(groups);
    return rep;
}

XyEigenvalues xy_eigenvalues_from_fps(const FPSExpansion& exp) {
    if (exp.family.p != 1 || exp.kappa != 4)
        throw domain_error("xy_eigenvalues_from_fps: needs a p=1, kappa=4 expansion");
    // vanishing structure of any regular quarter-power family
    const double viol = std::fabs(exp.coeff(0, 1)) + std::fabs(exp.coeff(1, 0)) +
                        std::fabs(exp.coeff(1, 1)) + std::fabs(exp.coeff(1, 2)) +
                        std::fabs(exp.coeff(1, 3)) + std::fabs(exp.coeff(2, 0)) +
                        std::fabs(exp.coeff(2, 1)) + std::fabs(exp.coeff(2, 2)) +
                        std::fabs(exp.coeff(2, 3));
    if (viol > 1e-8)
        throw domain_error(
            "xy_eigenvalues_from_fps: expansion violates the vanishing structure");

    const auto f = field_series(exp);
    const double f1_dhalf = f[0].coeff(-2);
    const double f1_dquarter = f[0].coeff(-1);
    const double f1_const = f[0].coeff(0);
    const double f2_const = f[1].coeff(0);
    const double c2 = exp.coeff(0, 2);

    XyEigenvalues xy;
    const double shared = f1_const - c2 * f1_dhalf - f2_const;
    xy.x_const = 0.25 - 1.0 / (2.0 * kPi) + shared;
    xy.y_const = 0.25 + 1.0 / (2.0 * kPi) + shared;
    xy.x_dquarter = xy.y_dquarter = f1_dquarter;
    xy.x_dhalf = xy.y_dhalf = f1_dhalf;
    return xy;
}

Matrix last_two_rows_submatrix(const Matrix& hess, int k, int d) {
    Matrix sub(static_cast<std::size_t>(2 * d), static_cast<std::size_t>(2 * d));
    const int off = (k - 2) * d;
    for (int i = 0; i < 2 * d; ++i)
        for (int j = 0; j < 2 * d; ++j)
            sub(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                hess(static_cast<std::size_t>(off + i), static_cast<std::size_t>(off + j));
    return sub;
}

InterlacingCertificate interlacing_certificate(const WeightConfig& cfg,
                                               const IsotropyDescriptor& desc) {
    desc.validate();
    if (desc.p != 1 || desc.m != 2)
        throw domain_error("interlacing_certificate: needs p=1, m=2 (two extra rows)");
    const int d = desc.d_int();
    const int q = d - 1;

    std::vector<double> z(static_cast<std::size_t>(q), 0.0);
    z[0] = 0.5 * std::sqrt(2.0);
    z[1] = -0.5 * std::sqrt(2.0);

    IrrepBasis two;
    two.irrep = "s";
    two.degree = q - 1;
    for (int a = 0; a < 2; ++a) {
        Matrix m(static_cast<std::size_t>(cfg.k), static_cast<std::size_t>(cfg.d));
        for (int j = 0; j < q; ++j) m(cfg.k - 2 + a, j) = z[static_cast<std::size_t>(j)];
        two.reps.push_back(std::move(m));
    }
    const BlockSpectrum bs = isotypic_block(cfg, two);

    InterlacingCertificate cert;
    cert.block = bs.block;
    cert.eig_low = bs.eigenvalues.front();
    cert.eig_high = bs.eigenvalues.back();
    cert.saddle_certified = cert.eig_low < 0.0;
    cert.descent_dimension = cert.saddle_certified ? d - 2 : 0;
    return cert;
}

namespace {

std::vector<std::vector<double>> spectra_along_grid(const FamilyId& family,
                                                    const std::vector<double>& ds,
                                                    const std::string& irrep) {
    std::vector<std::vector<double>> vals;
    for (double d : ds) {
        const ReducedPoint pt = solve_family_point(family, d);
        if (irrep == "t") {
            vals.push_back(sym_eig(symmetrized_jacobian(pt), false).values);
        } else {
            const WeightConfig cfg = embed(pt);
            const IsotropyDescriptor desc{family.p, family.m, d};
            const IrrepBasis basis = build_irrep_basis(desc, irrep);
            vals.push_back(isotypic_block(cfg, basis).eigenvalues);
        }
    }
    return vals;
}

}  // namespace

std::vector<TableRow> table_asymptotic(const FamilyId& family, double d_lo, double d_hi,
                                       int points) {
    family.validate();
    if (points < 6) throw usage_error("table_asymptotic: need at least 6 grid points");
    std::vector<double> ds;
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        const double lg = std::log10(d_lo) + t * (std::log10(d_hi) - std::log10(d_lo));
        ds.push_back(std::round(std::pow(10.0, lg)));  // integer d for the embeddings
    }
    const int kappa = family.kappa();

    std::vector<TableRow> rows;
    for (const std::string irrep : {"t", "s"}) {
        const auto vals = spectra_along_grid(family, ds, irrep);
        const int nb = static_cast<int>(vals.front().size());
        for (int b = 0; b < nb; ++b) {
            std::vector<double> lam(ds.size());
            for (std::size_t s = 0; s < ds.size(); ++s)
                lam[s] = vals[s][static_cast<std::size_t>(b)];
            TableRow row;
            row.irrep = irrep;
            row.branch = b;
            row.linear = std::fabs(lam.back()) > 10.0;
            const std::size_t n = ds.size();
            Matrix a(n, 3);
            std::vector<double> rhs(n);
            for (std::size_t s = 0; s < n; ++s) {
                const double x = std::pow(ds[s], -1.0 / kappa);
                if (row.linear) {
                    a(s, 0) = ds[s];
                    a(s, 1) = 1.0;
                    a(s, 2) = x;
                } else {
                    a(s, 0) = 1.0;
                    a(s, 1) = x;
                    a(s, 2) = x * x;
                }
                rhs[s] = lam[s];
            }
            const auto c = lstsq(a, rhs);
            if (row.linear) {
                row.slope = c[0];
                row.constant = c[1];
            } else {
                row.constant = c[0];
                row.slope = 0.0;
            }
            double rss = 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                double fit = 0.0;
                for (std::size_t t = 0; t < 3; ++t) fit += c[t] * a(s, t);
                rss += (fit - rhs[s]) * (fit - rhs[s]);
            }
            row.fit_rms = std::sqrt(rss / static_cast<double>(n));
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<TableRow> table_exact(const FamilyId& family, double d) {
    family.validate();
    const ReducedPoint pt = solve_family_point(family, d);
    const IsotropyDescriptor desc{family.p, family.m, d};
    std::vector<TableRow> rows;
    {
        const auto tvals = sym_eig(symmetrized_jacobian(pt), false).values;
        for (std::size_t b = 0; b < tvals.size(); ++b)
            rows.push_back({"t", static_cast<int>(b), false, tvals[b], 0.0, 0.0});
    }
    {
        const WeightConfig cfg = embed(pt);
        const IrrepBasis basis = build_irrep_basis(desc, "s");
        const auto svals = isotypic_block(cfg, basis).eigenvalues;
        for (std::size_t b = 0; b < svals.size(); ++b)
            rows.push_back({"s", static_cast<int>(b), false, svals[b], 0.0, 0.0});
    }
    return rows;
}

}  // namespace symbreak

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symbreak/series.hpp"
#include "symbreak/solver.hpp"

namespace symbreak {

// Truncated fractional power series of a family of critical points:
// xi_i(d) = sum_j coeffs[i][j] d^{-j/kappa}.
struct FPSExpansion {
    FamilyId family;
    int kappa = 2;
    int order = 0;                             // highest stored power of d^{-1/kappa}
    std::vector<std::vector<double>> coeffs;   // [coordinate][order]
    std::vector<std::vector<double>> stderrs;  // empty for direct/closed-form entries
    bool reduced_order = false;                // fit had to drop orders for conditioning

    double coeff(int i, int j) const;
    void set_coeff(int i, int j, double v);
};

std::vector<double> evaluate_fps(const FPSExpansion& exp, double d);

// The reduced field along the truncated expansion as Laurent series in
// s = d^{-1/kappa}; order bookkeeping is exact for the truncated curve.
std::vector<Series> field_series(const FPSExpansion& exp);

// ---------------------------------------------------------------------------
// Direct coefficient systems
// ---------------------------------------------------------------------------

struct Type2Kd2Coeffs {
    double c3, e4, f3, g2, h1, p2, q1, a2, b1;
    double residual;     // max |equation| at the returned solution
    double lam23, lam24, lam34, r2, r3;
};

// Leading FPS coefficients of the type II family at k = d+2 from the
// nine-equation limit system.
Type2Kd2Coeffs type2_kd2_coeffs();

// Test-only cross-check route: eliminate c3, e4, f3 and solve six equations.
Type2Kd2Coeffs type2_kd2_coeffs_reduced6();

struct Type2Kd1Coeffs {
    double vartheta;
    double c3, e4, f3, g2, h1, a2, b1;
    double p_at_root, dp_at_root, r2;
    double residual;  // max |equation| of the seven-equation system
};

// k = d+1: scalar root p(theta) = AQ - BP, then back-substitution.
Type2Kd1Coeffs type2_kd1_coeffs();

struct Type1Kd1Coeffs {
    // closed forms: xi_1 = -1 + 2 d^-1 + (pi/2) d^-3/2 + ...,
    // xi_2 = 2 d^-1 - sqrt(pi-2) d^-7/4 + ..., xi_3 = d^-1 + f5 d^-5/4 + ...,
    // xi_4 = g3 d^-3/4 + ..., xi_5 = 1/2 + h1 d^-1/4 + ..., symmetric for 6, 7.
    double c4, c6, e4, e7, f4, f5, g3, h0, h1, p3, q0, q1;
};

Type1Kd1Coeffs type1_kd1_coeffs();

// Residuals of the order-by-order relations that determine the closed forms
// (all vanish at type1_kd1_coeffs()).
std::vector<double> type1_kd1_order_residuals();

struct Type1Kd2Coeffs {
    double c6, e7, f5, g3, h1, p3, q1, a4, b1;
    double residual;  // max |picked order coefficient| of F along the solution
};

// k = d+2 type I: solved from the Puiseux order system of the reduced field
// (Gauss-Newton over the coefficient table; no closed system is available).
Type1Kd2Coeffs type1_kd2_coeffs();

// ---------------------------------------------------------------------------
// Path-based estimation and the family catalog
// ---------------------------------------------------------------------------

FPSExpansion fit_coeffs_from_path(const ContinuationPath& path, int kappa, int order);

// Comparative fit quality for base detection: RMS residual of the best fit
// with the given kappa.
double fit_residual_for_base(const ContinuationPath& path, int kappa, int order);

// Best-known expansion per family: path fit refined by the direct systems
// where one exists. Cached per process.
const FPSExpansion& catalog_expansion(const FamilyId& family);

// Newton initializer from the catalog expansion. Accurate for large d; for
// small d the returned flag marks the seed low-confidence.
struct SeedPoint {
    std::vector<double> xi;
    bool low_confidence = false;
};
SeedPoint seed_point(const FamilyId& family, double d);

// Cached bootstrap continuation path used by the catalog (d in [1e2, 1e6]).
const ContinuationPath& catalog_path(const FamilyId& family);

// Critical point of a cataloged family at the given (real) d: Newton from the
// catalog-expansion seed, with a continuation walk from the comfortable
// large-d regime as the fallback for small d.
ReducedPoint solve_family_point(const FamilyId& family, double d, double tol = 1e-12);

struct LossAsymptotics {
    FamilyId family;
    bool scaled_by_d = false;          // type II: fit of d * L instead of L
    std::vector<double> coeffs;        // fitted series in d^{-1/kappa}
    double residual_decay_exponent;    // slope of log10 |fit residual| vs log10 d
    double alpha = 0.0;                // leading constant of the fit
};

LossAsymptotics loss_asymptotics(const FamilyId& family, const ContinuationPath& path,
                                 int terms = 4);

}  // namespace symbreak

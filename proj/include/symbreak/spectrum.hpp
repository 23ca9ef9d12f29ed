#pragma once

#include <string>
#include <vector>

#include "symbreak/fps.hpp"
#include "symbreak/kernel.hpp"
#include "symbreak/reduced.hpp"

namespace symbreak {

// Eigenvalues grouped by isotypic component. Irrep labels: "t" (trivial),
// "s" (standard), "x" (exterior square), "y" (the degree q(q-3)/2 component),
// with q = d - p.
struct EigGroup {
    std::string irrep;
    int degree = 0;                       // multiplicity carried per eigenvalue
    std::vector<double> eigenvalues;      // one entry per copy
};

struct SpectrumReport {
    IsotropyDescriptor desc;
    std::string method;                   // "dense" or "adapted"
    std::vector<EigGroup> groups;
    std::vector<std::string> notes;       // absent irreps, ambiguous clusters
    double residual = 0.0;                // diagnostics (clustering slack)
};

int irrep_degree(const IsotropyDescriptor& desc, const std::string& irrep);
int irrep_copies(const IsotropyDescriptor& desc, const std::string& irrep);

struct IrrepBasis {
    std::string irrep;
    int degree = 0;
    std::vector<Matrix> reps;             // orthonormal k x d representatives
};

// One representative matrix per copy of the irrep, all transforming the same
// way, mutually orthonormal in the Frobenius inner product.
IrrepBasis build_irrep_basis(const IsotropyDescriptor& desc, const std::string& irrep);

struct BlockSpectrum {
    Matrix block;                         // r x r compression of the Hessian
    std::vector<double> eigenvalues;      // ascending
};

BlockSpectrum isotypic_block(const WeightConfig& cfg, const IrrepBasis& basis);

// Dense route: full eigensolve plus multiplicity clustering against the
// predicted isotypic degrees. Guarded to kd <= 4000.
SpectrumReport full_spectrum(const WeightConfig& cfg, const IsotropyDescriptor& desc);

// Symmetry-adapted route: small blocks per irrep, no kd x kd matrix.
SpectrumReport adapted_spectrum(const WeightConfig& cfg, const IsotropyDescriptor& desc);

// lambda_x / lambda_y as short expansions in descending powers
// {d^{1/2}, d^{1/4}, d^0}, assembled from the gradient-order coefficients of
// a p=1, kappa=4 expansion. On a critical expansion the positive powers
// vanish and the constants are 1/4 -+ 1/(2 pi).
struct XyEigenvalues {
    double x_dhalf = 0.0, x_dquarter = 0.0, x_const = 0.0;
    double y_dhalf = 0.0, y_dquarter = 0.0, y_const = 0.0;
};
XyEigenvalues xy_eigenvalues_from_fps(const FPSExpansion& exp);

// Cauchy-interlacing certificate from the two standard-representation copies
// supported on the last two rows (p = 1, m = 2 only).
struct InterlacingCertificate {
    Matrix block;                         // the 2 x 2 restriction
    double eig_low = 0.0, eig_high = 0.0;
    bool saddle_certified = false;
    int descent_dimension = 0;            // d - 2 when certified
};
InterlacingCertificate interlacing_certificate(const WeightConfig& cfg,
                                               const IsotropyDescriptor& desc);

// Principal submatrix of a dense Hessian on the coordinates of the last two
// weight rows (for the small-d interlacing cross-check).
Matrix last_two_rows_submatrix(const Matrix& hess, int k, int d);

// Branch table of trivial- and standard-representation eigenvalues.
struct TableRow {
    std::string irrep;   // "t" or "s"
    int branch = 0;      // index in ascending order at the largest d
    bool linear = false; // eigenvalue grows like d
    double constant = 0.0;  // constant term (or intercept for linear branches)
    double slope = 0.0;     // d-coefficient for linear branches
    double fit_rms = 0.0;
};

std::vector<TableRow> table_asymptotic(const FamilyId& family, double d_lo = 1e2,
                                       double d_hi = 1e3, int points = 12);
std::vector<TableRow> table_exact(const FamilyId& family, double d);

}  // namespace symbreak

#pragma once

#include <vector>

#include "symbreak/kernel.hpp"
#include "symbreak/linalg.hpp"
#include "symbreak/reduced_field.hpp"

namespace symbreak {

// Identifies the fixed-point space of Delta(S_{d-p} x S_p) acting on
// M(d+m, d). d is kept real: the reduced field is analytic in it.
struct IsotropyDescriptor {
    int p = 1;
    int m = 0;
    double d = 0.0;

    int N() const { return reduced_dim(p, m); }
    int k_of_d() const;            // d + m, requires integer d
    int d_int() const;             // requires integer d
    bool d_is_integer() const;
    void validate() const;
};

struct ReducedPoint {
    IsotropyDescriptor desc;
    std::vector<double> xi;
};

// Norms and angles of the block rows, for reporting and the identities the
// solved families satisfy. Index 0 of the single-row arrays is the first
// single row (matrix row d when p = 1).
struct AngleData {
    std::vector<double> tau;          // row norms, [0] = symmetric rows
    double Theta1 = 0.0;              // symmetric-symmetric angle
    double beta1 = 0.0, theta1 = 0.0, lambda12 = 0.0;
    std::vector<double> Lambda1;      // symmetric row vs single row
    Matrix Lambda;                    // single vs single (square, zero diag)
    std::vector<double> lambda_first; // single row vs first-band target
    std::vector<double> lambda_last;  // single row vs last target (beta2 first)
    double Omega1 = 0.0, Omega2 = 0.0;
    std::vector<double> G;
};

WeightConfig embed(const ReducedPoint& pt);
ReducedPoint project(const WeightConfig& cfg, IsotropyDescriptor desc, double tol = 1e-8);

std::vector<double> reduced_field(const ReducedPoint& pt);
double reduced_loss(const ReducedPoint& pt);
AngleData reduced_angles(const ReducedPoint& pt);

// Jacobian of the reduced field in xi (forward-mode dual numbers).
Matrix reduced_jacobian(const ReducedPoint& pt);
// Central finite-difference fallback used as a cross-check.
Matrix reduced_jacobian_fd(const ReducedPoint& pt, double step = 1e-6);

// Squared Frobenius norms of the block basis matrices Xi(e_i); diagonal Gram
// because the blocks have disjoint support. Valid for real d.
std::vector<double> gram_diag(const IsotropyDescriptor& desc);

// Similarity transform of the reduced Jacobian that is symmetric: the Hessian
// of the restricted loss in an orthonormal basis of the fixed-point space.
// Its eigenvalues are the trivial-representation Hessian eigenvalues.
Matrix symmetrized_jacobian(const ReducedPoint& pt);

}  // namespace symbreak

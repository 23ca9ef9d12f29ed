#pragma once

#include <cstdint>
#include <utility>

#include "symbreak/linalg.hpp"

namespace symbreak {

// Student weights for the two-layer ReLU model with the identity teacher.
// The teacher V is I_d extended by k - d zero rows; second-layer weights are
// all ones on both sides.
struct WeightConfig {
    int k = 0;  // student neurons (rows)
    int d = 0;  // input dimension (columns)
    Matrix W;   // k x d, row i = w^i

    WeightConfig() = default;
    WeightConfig(int k_, int d_);  // zero-initialized weights
    WeightConfig(int k_, int d_, Matrix W_);

    void validate_shape() const;  // k >= d >= 1 and W is k x d
};

// Gaussian pair kernel f(w, v) = (1/2pi) |w||v| (sin t + (pi - t) cos t) with
// t the angle between w and v; defined as 0 when either argument vanishes.
double pair_energy(const double* w, const double* v, int d);
double pair_energy(const std::vector<double>& w, const std::vector<double>& v);

// Population square loss of the student against the identity teacher.
double loss(const WeightConfig& cfg);

// Row-wise analytic gradient of the loss; k x d. Throws domain_error on a
// zero row.
Matrix gradient(const WeightConfig& cfg);

// Dense symmetric Hessian in row-major vec ordering: index (i, a) -> i*d + a.
// Requires no zero rows and no parallel/antiparallel row pairs (including
// pairs with teacher rows).
Matrix hessian(const WeightConfig& cfg);

// Hessian-vector product without materializing the kd x kd matrix. u and the
// result use the same k x d layout as the weights.
Matrix hessian_vector_product(const WeightConfig& cfg, const Matrix& u);

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::uint64_t samples = 0;
};

// Plain Monte-Carlo estimate of the expected loss; deterministic per seed.
McEstimate monte_carlo_loss(const WeightConfig& cfg, std::uint64_t n, std::uint64_t seed);

}  // namespace symbreak

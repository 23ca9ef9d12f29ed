#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "symbreak/kernel.hpp"

namespace symbreak {

// Closed-form bounds on the expected loss under Xavier initialization
// (i.i.d. N(0, 1/d) entries, k = d): (1 - 2/pi) d <= E[L] <= (1 - 1/pi) d.
std::pair<double, double> xavier_bounds(int d);

struct XavierEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    double lo = 0.0, hi = 0.0;
    bool within_bounds = false;  // inside [lo - 3 se, hi + 3 se]
};

XavierEstimate xavier_mc(int d, std::uint64_t n, std::uint64_t seed);

// Partition of [k_bar] into k parts K_1..K_k with j in K_j; extra indices
// k+1..k_bar are each attached to one part.
struct FossilPartition {
    int k_bar = 0;
    int k = 0;
    std::vector<int> part_of;  // part index (0-based) per row index 0..k_bar-1

    std::vector<std::vector<int>> parts() const;
};

// All d^(k-d)-style assignments (here: k_bar rows onto k parts). Guarded to
// k_bar - k <= 4.
std::vector<FossilPartition> enumerate_partitions(int k_bar, int k);

// Replace each row w_j of a critical point by convex copies over its part.
// weights[i] is the barycentric weight of row i within its part (rows j < k
// keep weight[j] as their own share); each part's weights must sum to 1.
WeightConfig fossil_point(const WeightConfig& w, const FossilPartition& partition,
                          const std::vector<double>& weights);

// Uniform (Dirichlet) barycentric sample of a partition's simplex.
std::vector<double> sample_simplex_weights(const FossilPartition& partition,
                                           std::uint64_t seed);

struct GlobalMinComplexReport {
    int vertex_count = 0;
    int edge_count = 0;
    bool connected = false;
    bool is_cycle = false;
    double max_sampled_loss = 0.0;
    std::vector<Matrix> vertices;
    std::vector<std::pair<int, int>> edges;
};

// Vertex/edge structure of the zero-loss complex of M(k, d) and a sampled
// zero-loss verification. Guarded to k - d <= 2, d <= 4.
GlobalMinComplexReport global_min_complex_check(int k, int d, int samples,
                                                std::uint64_t seed = 12345);

}  // namespace symbreak

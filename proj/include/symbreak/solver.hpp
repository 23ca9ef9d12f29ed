#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symbreak/reduced.hpp"

namespace symbreak {

enum class FamilyType { I, II };

// One of the eight cataloged regular families. Supported combinations:
// p = 0 with m in {0, 1} (type I only); p = 1 with m in {0, 1, 2} (both types).
struct FamilyId {
    FamilyType type = FamilyType::II;
    int p = 1;
    int m = 0;

    void validate() const;
    int kappa() const;  // Puiseux base: 2, except 4 for type I with p=1, m>=1
    std::string name() const;  // e.g. "II_p1_m2"
};

FamilyId parse_family(const std::string& type, int p, int m);

struct NewtonReport {
    ReducedPoint point;
    int iterations = 0;
    double residual = 0.0;
    double tol_used = 0.0;  // requested tolerance, floored by the eps*d limit
    std::vector<double> residual_history;
};

NewtonReport newton_solve(const IsotropyDescriptor& desc, std::vector<double> xi0,
                          double tol = 1e-12, int max_iter = 60);

struct PathSample {
    double d = 0.0;
    std::vector<double> xi;
    double min_abs_jac_eig = 0.0;  // smallest |eigenvalue| of the reduced Jacobian
    int newton_iterations = 0;
};

struct ContinuationPath {
    FamilyId family;
    std::vector<PathSample> samples;  // ordered from d_start to d_end
    bool complete = false;
    double last_good_d = 0.0;
    std::string termination;  // empty when complete
};

struct ContinuationOptions {
    int samples_per_decade = 40;
    double tol = 1e-12;
    int max_halvings = 10;
    // Optional seed for the first grid point; the built-in bootstrap is used
    // when absent.
    std::function<std::vector<double>(double)> seed;
};

ContinuationPath continue_family(const FamilyId& family, double d_start, double d_end,
                                 const ContinuationOptions& opt = {});

FamilyType classify_type(const ReducedPoint& pt);

// Crude large-d initializer built from the family's limit point plus
// scale-correct guesses for the vanishing coordinates; a small sign/scale
// multistart is attempted if Newton rejects the first guess. Intended for
// d >= ~100.
ReducedPoint bootstrap_point(const FamilyId& family, double d, double tol = 1e-12);

// Reorders the single rows of a solved point into the family's documented
// convention (the row tending to -v_d last for type II; the rows tending to
// +v_d/2, -v_d/2 first for type I with k > d).
void canonicalize(const FamilyId& family, ReducedPoint& pt);

// Limit point c_infinity of the family in reduced coordinates.
std::vector<double> family_limit(const FamilyId& family);

}  // namespace symbreak

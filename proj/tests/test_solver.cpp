#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "symbreak/errors.hpp"
#include "symbreak/fps.hpp"
#include "symbreak/solver.hpp"

using namespace symbreak;

TEST_CASE("family catalog validation") {
    CHECK_THROWS_AS(parse_family("II", 0, 0), usage_error);
    CHECK_THROWS_AS(parse_family("I", 0, 2), usage_error);
    CHECK_THROWS_AS(parse_family("I", 2, 0), usage_error);
    CHECK(parse_family("II", 1, 2).kappa() == 2);
    CHECK(parse_family("I", 1, 1).kappa() == 4);
    CHECK(parse_family("I", 0, 1).kappa() == 2);
    CHECK(parse_family("I", 1, 0).kappa() == 2);
}

TEST_CASE("newton converges and re-solving from a solution is free") {
    const FamilyId fam = parse_family("II", 1, 0);
    const ReducedPoint pt = bootstrap_point(fam, 1000.0);
    const auto f = reduced_field(pt);
    for (double v : f) CHECK(std::fabs(v) < 1e-12);

    const NewtonReport again = newton_solve(pt.desc, pt.xi, 1e-12, 10);
    CHECK(again.iterations == 0);

    // the global minimum is already critical
    const NewtonReport vrep =
        newton_solve(IsotropyDescriptor{1, 0, 9.0}, {1, 0, 0, 0, 1}, 1e-12, 10);
    CHECK(vrep.iterations == 0);
}

TEST_CASE("classification by the leading diagonal coordinate") {
    ReducedPoint a{{1, 0, 50.0}, {0.98, 0, 0, 0, -1}};
    CHECK(classify_type(a) == FamilyType::II);
    ReducedPoint b{{1, 0, 50.0}, {-0.97, 0, 0, 0, 1}};
    CHECK(classify_type(b) == FamilyType::I);
    ReducedPoint c{{1, 0, 50.0}, {0.2, 0, 0, 0, 1}};
    CHECK_THROWS_AS(classify_type(c), domain_error);
}

TEST_CASE("type II continuation approaches its limit monotonically") {
    const FamilyId fam = parse_family("II", 1, 0);
    ContinuationOptions opt;
    opt.samples_per_decade = 10;
    const ContinuationPath path = continue_family(fam, 1e4, 10.0, opt);
    CHECK(path.complete);
    CHECK(path.samples.front().d == doctest::Approx(1e4));
    CHECK(path.samples.back().d == doctest::Approx(10.0));
    // xi_1 -> +1 and the last coordinate -> -1 as d grows
    const auto& large = path.samples.front();
    const auto& small = path.samples.back();
    CHECK(large.xi[0] > 0.99);
    CHECK(large.xi[4] < -0.98);
    CHECK(small.xi[0] > 0.5);
    CHECK(std::fabs(large.xi[0] - 1.0) < std::fabs(small.xi[0] - 1.0));
    CHECK(std::fabs(large.xi[4] + 1.0) < std::fabs(small.xi[4] + 1.0));
    for (const auto& s : path.samples) {
        CHECK(s.min_abs_jac_eig > 0.0);
        ReducedPoint pt{{fam.p, fam.m, s.d}, s.xi};
        for (double v : reduced_field(pt))
            CHECK(std::fabs(v) < std::max(1e-12, 2e-16 * s.d));
    }
}

TEST_CASE("type I p=0 continuation tends to -1") {
    const FamilyId fam = parse_family("I", 0, 0);
    ContinuationOptions opt;
    opt.samples_per_decade = 8;
    const ContinuationPath path = continue_family(fam, 1e3, 10.0, opt);
    CHECK(path.complete);
    CHECK(path.samples.front().xi[0] < -0.99);
    CHECK(path.samples.front().xi[0] < path.samples.back().xi[0]);
}

TEST_CASE("type I and type II paths at equal d are distinct") {
    const ReducedPoint p1 = bootstrap_point(parse_family("I", 1, 0), 500.0);
    const ReducedPoint p2 = bootstrap_point(parse_family("II", 1, 0), 500.0);
    double gap = 0.0;
    for (int i = 0; i < 5; ++i) gap = std::max(gap, std::fabs(p1.xi[i] - p2.xi[i]));
    CHECK(gap > 0.5);
}

TEST_CASE("every cataloged family bootstraps at large d") {
    for (const char* t : {"I", "II"})
        for (int p : {0, 1})
            for (int m : {0, 1, 2}) {
                FamilyId fam;
                try {
                    fam = parse_family(t, p, m);
                } catch (const usage_error&) {
                    continue;
                }
                const ReducedPoint pt = bootstrap_point(fam, 1000.0);
                CHECK(classify_type(pt) == fam.type);
                for (double v : reduced_field(pt)) CHECK(std::fabs(v) < 1e-12);
            }
}

TEST_CASE("angle identities hold along the solved type II k=d+2 family") {
    const FamilyId fam = parse_family("II", 1, 2);
    for (double d : {50.0, 200.0, 1000.0}) {
        const ReducedPoint pt = solve_family_point(fam, d);
        const AngleData a = reduced_angles(pt);
        // single rows 0,1,2 are the paper's rows 2,3,4
        const double l23 = a.Lambda(0, 1), l24 = a.Lambda(0, 2), l34 = a.Lambda(1, 2);
        CHECK(std::fabs(l23 + l34 - l24) < 1e-8);
        const double beta2 = a.lambda_last[0], lam42 = a.lambda_last[2];
        CHECK(std::fabs(l24 + beta2 - lam42) < 1e-8);
    }
}

TEST_CASE("warm starts keep newton iteration counts small") {
    const FamilyId fam = parse_family("II", 1, 1);
    ContinuationOptions opt;
    opt.samples_per_decade = 20;
    const ContinuationPath path = continue_family(fam, 1e3, 1e2, opt);
    CHECK(path.complete);
    double total = 0.0;
    for (std::size_t i = 1; i < path.samples.size(); ++i)
        total += path.samples[i].newton_iterations;
    CHECK(total / (path.samples.size() - 1.0) < 6.0);
}

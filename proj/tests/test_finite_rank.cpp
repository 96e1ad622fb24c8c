#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "doubling/errors.hpp"
#include "doubling/finite_rank.hpp"
#include "doubling/fixed_point.hpp"
#include "doubling/induced_map.hpp"

using namespace doubling;

namespace {

const SigmaSystem& sigma() {
    static const SigmaSystem s = SigmaSystem::build(
        std::make_shared<const RenormFixedPoint>(solve_fixed_point(40)));
    return s;
}

FiniteRankOperator level_operator(int n) {
    return assemble_operator(sigma(), refine_partition(sigma(), n));
}

double max_real_eigenvalue(const FiniteRankOperator& A) {
    const auto rows = A.dense();
    const int d = A.dim();
    Eigen::MatrixXd M(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) M(i, j) = rows[i][j];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(M);
    double best = -1e300;
    for (int i = 0; i < d; ++i) {
        const auto ev = solver.eigenvalues()[i];
        if (std::fabs(ev.imag()) < 1e-9 && ev.real() > best) best = ev.real();
    }
    return best;
}

}  // namespace

TEST_CASE("level-1 operator collapses to alpha*(alpha-1)") {
    const auto A = level_operator(1);
    REQUIRE(A.dim() == 1);
    const double a = sigma().alpha();
    CHECK(std::fabs(A.dense()[0][0] - a * (a - 1.0)) < 1e-7);
    const auto r = power_iterate(A, {1.0});
    CHECK(r.iterations == 1);
    CHECK(r.v == std::vector<double>{1.0});
    CHECK(r.lambda_identity == a * (a - 1.0));
    CHECK(std::fabs(r.lambda - r.lambda_identity) < 1e-7);
}

TEST_CASE("level-2 operator has the predicted sparse rows") {
    const auto part = refine_partition(sigma(), 2);
    const auto A = assemble_operator(sigma(), part);
    REQUIRE(A.dim() == 2);
    const double a = sigma().alpha();
    // Both rows take -alpha from cell 0; both beta entries sit in column 1
    // because branch-1 preimages always land in the right half.
    CHECK(A.rows()[0][0].col == 0);
    CHECK(A.rows()[0][0].val == doctest::Approx(-a).epsilon(1e-15));
    CHECK(A.rows()[0][1].col == 1);
    CHECK(A.rows()[0][1].val == doctest::Approx(a * part.betas[0]).epsilon(1e-14));
    CHECK(A.rows()[1][0].col == 0);
    CHECK(A.rows()[1][1].col == 1);
    CHECK(A.rows()[1][1].val == doctest::Approx(a * part.betas[1]).epsilon(1e-14));
}

TEST_CASE("level-2 power iteration matches the closed form") {
    const auto part = refine_partition(sigma(), 2);
    const auto A = assemble_operator(sigma(), part);
    const double a = sigma().alpha();
    const auto cf = closed_form_lambda2(a, part.betas[0], part.betas[1]);
    const auto r = power_iterate(A, {1.0, 1.0});
    CHECK(std::fabs(r.lambda - cf.lambda) < 1e-10);
    CHECK(std::fabs(r.v[0] - cf.t21) < 1e-10);
    // The identity read differs only through beta_22 - alpha.
    CHECK(std::fabs(r.lambda_identity - cf.lambda) < 1e-6);
}

TEST_CASE("synthetic equal-beta operator separates the two lambda reads") {
    // With beta_21 = beta_22 = 3 the ray is (1, 1) and A v = 2 * alpha * v
    // exactly, while the end-row identity still reports alpha * (alpha - 1).
    const double a = 2.5;
    std::vector<std::array<SparseEntry, 2>> rows = {
        {{{0, -a}, {1, 3.0 * a}}},
        {{{0, -a}, {1, 3.0 * a}}},
    };
    const FiniteRankOperator A(2, a, std::move(rows));
    const auto r = power_iterate(A, {1.0, 1.0});
    CHECK(std::fabs(r.lambda - 2.0 * a) < 1e-12);
    CHECK(std::fabs(r.v[0] - 1.0) < 1e-12);
    CHECK(std::fabs(r.lambda_identity - a * (a - 1.0)) < 1e-12);
    const auto cf = closed_form_lambda2(a, 3.0, 3.0);
    CHECK(std::fabs(cf.lambda - 2.0 * a) < 1e-14);
    CHECK(std::fabs(cf.t21 - 1.0) < 1e-14);
}

TEST_CASE("cone membership") {
    CHECK(in_cone({1.0, 2.0, 3.0}));
    CHECK(in_cone({0.0, 0.0, 1.0}));
    CHECK(in_cone({2.0, 2.0, 2.0}));
    CHECK_FALSE(in_cone({1.0, 0.5, 2.0}));
    CHECK_FALSE(in_cone({-1.0, 0.0, 1.0}));
    CHECK_FALSE(in_cone({0.0, 0.0, 0.0}));
    CHECK_FALSE(in_cone(std::vector<double>{}));
    // Slack is relative to the top entry.
    CHECK(in_cone({1.0, 1.0 - 1e-13, 2.0}, 1e-12));
    CHECK_FALSE(in_cone({1.0, 1.0 - 1e-13, 2.0}));
}

TEST_CASE("power iteration guards") {
    const auto A = level_operator(3);
    CHECK_THROWS_AS((void)power_iterate(A, {1.0}), UsageError);
    CHECK_THROWS_AS((void)power_iterate(A, {4.0, 3.0, 2.0, 1.0}), ConeEscape);
    CHECK_THROWS_AS((void)power_iterate(A, {0.0, 0.0, 0.0, 0.0}), ConeEscape);
    CHECK_THROWS_AS((void)power_iterate(A, std::vector<double>(4, 1.0), 1e-12, 0),
                    UsageError);
    CHECK_THROWS_AS((void)power_iterate(A, std::vector<double>(4, 1.0), -1.0),
                    UsageError);
}

TEST_CASE("operator construction guards") {
    std::vector<std::array<SparseEntry, 2>> bad = {{{{0, -2.5}, {5, 1.0}}}};
    CHECK_THROWS_AS((void)FiniteRankOperator(1, 2.5, std::move(bad)), UsageError);
    const auto A = level_operator(2);
    CHECK_THROWS_AS((void)A.apply({1.0, 2.0, 3.0}), UsageError);
}

TEST_CASE("embedding duplicates coordinates along the sibling pattern") {
    const auto part3 = refine_partition(sigma(), 3);
    const auto w = embed({5.0, 7.0}, part3);
    CHECK(w == std::vector<double>{5.0, 5.0, 7.0, 7.0});
    CHECK_THROWS_AS((void)embed({1.0, 2.0, 3.0}, part3), IncidenceMismatch);
}

TEST_CASE("power iteration agrees with a dense eigensolver") {
    for (int n = 1; n <= 4; ++n) {
        const auto A = level_operator(n);
        const auto r = power_iterate(A, std::vector<double>(A.dim(), 1.0));
        const double dense = max_real_eigenvalue(A);
        CHECK(std::fabs(r.lambda - dense) < 1e-11);
        CHECK(in_cone(r.v, 1e-11));
        CHECK(r.residual <= 1e-12 * std::max(1.0, r.lambda));
    }
}

TEST_CASE("the level program climbs monotonically") {
    const auto& s = sigma();
    const double a = s.alpha();
    const auto trace = run_program(s, 6);
    REQUIRE(trace.records.size() == 6);
    CHECK(trace.last_level == 6);
    for (const auto& rec : trace.records) {
        CHECK_FALSE(rec.failed);
        CHECK(std::fabs(rec.lambda - rec.lambda_ratio) < 1e-6);
        CHECK(std::fabs(rec.lambda - rec.lambda_applied) < 1e-6);
    }
    CHECK(trace.records[0].lambda == doctest::Approx(a * (a - 1.0)).epsilon(1e-14));
    for (std::size_t i = 1; i < trace.records.size(); ++i) {
        CHECK(trace.records[i].lambda > trace.records[i - 1].lambda);
        CHECK(trace.records[i].lambda > a + 1.0);
        CHECK(trace.records[i].lambda <= a * (a + 1.0));
    }
    CHECK_NOTHROW(validate_trace(trace, a));
    CHECK(trace.direction.size() == 32);
    CHECK(in_cone(trace.direction, 1e-11));
    // Aitken extrapolation lands near the known expansion rate.
    CHECK(std::fabs(trace.lambda_extrapolated - 4.669201609102990) < 2e-2);
    CHECK(std::fabs(trace.records.back().lambda - 4.669201609102990) < 0.2);
}

TEST_CASE("trace validation rejects tampering") {
    const auto& s = sigma();
    auto trace = run_program(s, 4);
    auto bad = trace;
    bad.records[2].lambda = bad.records[1].lambda - 0.1;
    CHECK_THROWS_AS(validate_trace(bad, s.alpha()), InvariantViolation);
    bad = trace;
    bad.records.back().failed = true;
    CHECK_THROWS_AS(validate_trace(bad, s.alpha()), InvariantViolation);
    bad = trace;
    bad.records[0].lambda += 1e-6;
    CHECK_THROWS_AS(validate_trace(bad, s.alpha()), InvariantViolation);
    CHECK_THROWS_AS((void)run_program(s, 0), UsageError);
    CHECK_THROWS_AS((void)run_program(s, 17), UsageError);
}

TEST_CASE("direction pushforward flags the gaps") {
    const auto& s = sigma();
    const auto part = refine_partition(s, 4);
    std::vector<double> v(part.intervals.size() / 2);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    // g(0) = 1 sits in the last interval; the gap point maps to a flagged
    // nearest cell.
    const double gap_y = 0.5 * (s.J0().hi + s.J1().lo);
    const double gap_x = s.fixed_point().invert(gap_y);
    const auto samples = pushforward_direction(s, v, part, {0.0, gap_x, 1.0});
    REQUIRE(samples.values.size() == 3);
    CHECK(samples.values[0] == v.back());
    CHECK_FALSE(samples.gap_flags[0]);
    CHECK(samples.gap_flags[1]);
    CHECK_THROWS_AS(
        (void)pushforward_direction(s, {1.0, 2.0}, part, {0.0}), IncidenceMismatch);
    CHECK_THROWS_AS(
        (void)pushforward_direction(s, v, part, {1.5}), OutOfRange);
}

TEST_CASE("closed-form guards") {
    CHECK_THROWS_AS((void)closed_form_lambda2(0.5, 1.0, 2.0), UsageError);
    CHECK_THROWS_AS((void)closed_form_lambda2(2.5, -1.0, 2.0), UsageError);
    CHECK_THROWS_AS((void)closed_form_lambda2(2.5, 3.0, 2.0), UsageError);
}

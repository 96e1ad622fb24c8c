#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>

#include "doctest.h"
#include "doubling/errors.hpp"
#include "doubling/fixed_point.hpp"

using namespace doubling;

namespace {

const RenormFixedPoint& fp40() {
    static const RenormFixedPoint fp = solve_fixed_point(40);
    return fp;
}

}  // namespace

TEST_CASE("solver pins the universal scaling constant") {
    const auto& fp = fp40();
    CHECK(std::fabs(fp.eval(0.0) - 1.0) < 1e-13);
    CHECK(std::fabs(fp.alpha() - 2.5029078750958928) < 1e-9);
    CHECK(fp.residual() <= 1e-12);
    // alpha = -1/g(1) by construction, and the derived endpoint identities.
    CHECK(std::fabs(fp.eval(1.0) + 1.0 / fp.alpha()) < 1e-14);
    CHECK(std::fabs(std::fabs(fp.eval_prime(1.0)) - fp.alpha()) < 1e-10);
    const double g3 = fp.eval(fp.eval(fp.eval(1.0)));
    CHECK(std::fabs(g3 - 1.0 / (fp.alpha() * fp.alpha())) < 1e-10);
}

TEST_CASE("g is concave and decreasing on the right half") {
    const auto& fp = fp40();
    for (int i = 0; i <= 100; ++i) {
        const double x = -1.0 + 0.02 * i;
        CHECK(fp.eval_second(x) < 0.0);
    }
    for (int i = 1; i <= 100; ++i) {
        CHECK(fp.eval_prime(0.01 * i) < 0.0);
    }
}

TEST_CASE("inverse branch round trips") {
    const auto& fp = fp40();
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = i / 200.0;
        worst = std::max(worst, std::fabs(fp.invert(fp.eval(x)) - x));
    }
    CHECK(worst <= 1e-13);
    CHECK(std::fabs(fp.invert(1.0)) <= 1e-13);
    CHECK(std::fabs(fp.invert(fp.eval(1.0)) - 1.0) <= 1e-13);
}

TEST_CASE("domain guards") {
    const auto& fp = fp40();
    CHECK_THROWS_AS((void)fp.eval(1.2), DomainExceeded);
    CHECK_THROWS_AS((void)fp.eval_prime(-1.2), DomainExceeded);
    CHECK_NOTHROW((void)fp.eval(1.04));  // inside the 5% margin
    CHECK_THROWS_AS((void)fp.invert(1.5), OutOfRange);
    CHECK_THROWS_AS((void)fp.invert(fp.eval(1.0) - 0.1), OutOfRange);
}

TEST_CASE("solver failure modes") {
    CHECK_THROWS_AS((void)solve_fixed_point(4), NonConvergence);
    CHECK_THROWS_AS((void)solve_fixed_point(7), UsageError);
    CHECK_THROWS_AS((void)solve_fixed_point(0), UsageError);
    CHECK_THROWS_AS((void)solve_fixed_point(40, -1.0), UsageError);
    CHECK_THROWS_AS((void)solve_fixed_point(40, 1e-12, 0), UsageError);
}

TEST_CASE("alpha is stable against the truncation degree") {
    const double a30 = solve_fixed_point(30, 1e-10).alpha();
    CHECK(std::fabs(a30 - fp40().alpha()) < 1e-10);
}

TEST_CASE("json round trip preserves the polynomial exactly") {
    const auto& fp = fp40();
    const std::string text = fixed_point_to_json(fp);
    const RenormFixedPoint back = fixed_point_from_json(text);
    REQUIRE(back.g().coefficients().size() == fp.g().coefficients().size());
    for (std::size_t i = 0; i < fp.g().coefficients().size(); ++i) {
        CHECK(back.g().coefficients()[i] == fp.g().coefficients()[i]);
    }
    CHECK(back.alpha() == fp.alpha());

    std::string tampered = text;
    const auto pos = tampered.find("\"1.0\"");
    REQUIRE(pos != std::string::npos);
    tampered.replace(pos, 5, "\"2.0\"");
    CHECK_THROWS_AS((void)fixed_point_from_json(tampered), UsageError);
}

TEST_CASE("cascade oracle: exact start and limiting ratios") {
    const CascadeOracleResult shallow = cascade_oracle(3);
    REQUIRE(shallow.superstable_params.size() == 4);
    // First doubling: (1+t)t = 1, the golden section.
    CHECK(std::fabs(shallow.superstable_params[1] - 0.6180339887498949) < 1e-12);
    for (double d : shallow.delta_estimates) {
        CHECK(std::isfinite(d));
        CHECK(d > 0.0);
    }

    const CascadeOracleResult deep = cascade_oracle(10);
    const auto& ts = deep.superstable_params;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        CHECK(ts[i] > ts[i - 1]);
    }
    CHECK(std::fabs(deep.delta_estimates.back() - 4.669201609102990) < 1e-3);
    CHECK(std::fabs(deep.alpha_estimates.back() - fp40().alpha()) < 1e-4);
    // The ratio sequence settles: successive moves shrink.
    const auto& ds = deep.delta_estimates;
    for (std::size_t i = 2; i < ds.size(); ++i) {
        CHECK(std::fabs(ds[i] - ds[i - 1]) < std::fabs(ds[i - 1] - ds[i - 2]));
    }
}

TEST_CASE("cascade oracle rejects bad depths") {
    CHECK_THROWS_AS((void)cascade_oracle(1), UsageError);
    CHECK_THROWS_AS((void)cascade_oracle(17), UsageError);
}

#include "doubling/fixed_point.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>

#include "doubling/errors.hpp"
#include "json.hpp"

namespace doubling {

namespace {

constexpr double kAlphaLowerBound = 2.414213562373095;  // 1 + sqrt(2)

double defect(const EvenPolynomial& g, double alpha, double x) {
    // g is even, so g(-x/alpha) = g(x/alpha).
    return g(x) + alpha * g(g(x / alpha));
}

double dense_residual(const EvenPolynomial& g, double alpha, int grid_size) {
    double worst = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        const double x = -1.0 + 2.0 * i / (grid_size - 1);
        worst = std::max(worst, std::fabs(defect(g, alpha, x)));
    }
    return worst;
}

}  // namespace

RenormFixedPoint::RenormFixedPoint(EvenPolynomial g, double residual,
                                   int check_grid_size)
    : g_(std::move(g)), residual_(residual), check_grid_size_(check_grid_size) {
    if (check_grid_size_ < 2) {
        throw UsageError("RenormFixedPoint: check grid must have >= 2 points");
    }
    if (!(residual_ >= 0.0)) {
        throw InvariantViolation("RenormFixedPoint: residual must be >= 0");
    }
    if (std::fabs(g_(0.0) - 1.0) > 1e-12) {
        throw InvariantViolation("RenormFixedPoint: g(0) != 1");
    }
    const double g1 = g_(1.0);
    if (!(g1 < 0.0)) {
        throw InvariantViolation("RenormFixedPoint: g(1) must be negative");
    }
    alpha_ = -1.0 / g1;
    if (!(alpha_ > kAlphaLowerBound - 1e-9)) {
        throw InvariantViolation("RenormFixedPoint: alpha <= 1 + sqrt(2)");
    }
    // Strict concavity on the working interval.
    for (int i = 0; i < check_grid_size_; ++i) {
        const double x = -1.0 + 2.0 * i / (check_grid_size_ - 1);
        if (!(g_.second_derivative(x) < 0.0)) {
            throw ConcavityViolation("RenormFixedPoint: g'' >= 0 at x=" +
                                     std::to_string(x));
        }
    }
    // Derived identities of the true fixed point; fail loudly if the
    // polynomial is too crude to carry them.
    if (std::fabs(std::fabs(g_.derivative(1.0)) - alpha_) > 1e-8) {
        throw InvariantViolation("RenormFixedPoint: |g'(1)| != alpha");
    }
    const double g3 = g_(g_(g1));
    if (std::fabs(g3 - 1.0 / (alpha_ * alpha_)) > 1e-8) {
        throw InvariantViolation("RenormFixedPoint: g^3(1) != 1/alpha^2");
    }
}

double RenormFixedPoint::eval(double x) const {
    if (std::fabs(x) > kDomainMargin) {
        throw DomainExceeded("eval: |x| > domain margin, x=" + std::to_string(x));
    }
    return g_(x);
}

double RenormFixedPoint::eval_prime(double x) const {
    if (std::fabs(x) > kDomainMargin) {
        throw DomainExceeded("eval_prime: |x| > domain margin");
    }
    return g_.derivative(x);
}

double RenormFixedPoint::eval_second(double x) const {
    if (std::fabs(x) > kDomainMargin) {
        throw DomainExceeded("eval_second: |x| > domain margin");
    }
    return g_.second_derivative(x);
}

double RenormFixedPoint::invert(double y) const {
    const double ylo = g_(1.0);
    const double slack = 1e-12 * (1.0 + std::fabs(ylo));
    if (y < ylo - slack || y > 1.0 + slack) {
        throw OutOfRange("invert: y outside [g(1), 1], y=" + std::to_string(y));
    }
    y = std::clamp(y, ylo, 1.0);
    // g is strictly decreasing on [0, 1]; bracketed Newton with bisection
    // fallback.
    double lo = 0.0, hi = 1.0, x = 0.5;
    for (int it = 0; it < 200; ++it) {
        const double f = g_(x) - y;
        const double fp = g_.derivative(x);
        if (f != 0.0 && fp != 0.0 && std::fabs(f / fp) < 1e-15) {
            break;  // Newton increment below resolution: x is converged
        }
        if (f > 0.0) {
            lo = x;  // g(x) > y => x left of the root
        } else {
            // f == 0 carries no direction near the flat point x = 0; folding
            // it into this branch keeps the bracket shrinking toward the root.
            hi = x;
        }
        if (hi - lo < 1e-15) {
            x = 0.5 * (lo + hi);
            break;
        }
        double next = (fp != 0.0) ? x - f / fp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        x = next;
    }
    return x;
}

RenormFixedPoint solve_fixed_point(int degree, double tol, int max_newton_iters) {
    if (degree < 2 || degree % 2 != 0) {
        throw UsageError("solve_fixed_point: degree must be even and >= 2");
    }
    if (degree > 80) {
        throw UsageError("solve_fixed_point: degree > 80 is not supported");
    }
    if (!(tol > 0.0)) {
        throw UsageError("solve_fixed_point: tol must be positive");
    }
    if (max_newton_iters < 1) {
        throw UsageError("solve_fixed_point: need at least one iteration");
    }

    const int m = degree / 2;  // unknowns c_1 .. c_m, c_0 = 1 fixed
    // The defect is even in x, i.e. a function of t = x^2, so the collocation
    // nodes are Chebyshev points in t mapped back through x = sqrt(t).
    std::vector<double> xs(m);
    for (int i = 0; i < m; ++i) {
        xs[i] = std::sqrt(0.5 + 0.5 * std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * m)));
    }

    std::vector<double> c(m + 1, 0.0);
    c[0] = 1.0;
    c[1] = -1.5;  // close enough for Newton from any reasonable degree

    Eigen::VectorXd F(m);
    Eigen::MatrixXd J(m, m);
    double best_norm = std::numeric_limits<double>::infinity();
    int iters_since_progress = 0;
    bool converged_on_nodes = false;

    for (int iter = 0; iter < max_newton_iters; ++iter) {
        EvenPolynomial g(c);
        const double g1 = g(1.0);
        if (!(g1 < -1e-8)) {
            throw NonConvergence("solve_fixed_point: g(1) lost its sign");
        }
        const double alpha = -1.0 / g1;

        double norm = 0.0;
        for (int i = 0; i < m; ++i) {
            F(i) = defect(g, alpha, xs[i]);
            norm = std::max(norm, std::fabs(F(i)));
        }
        if (norm < 0.05 * tol) {
            converged_on_nodes = true;
            break;
        }
        if (norm < 0.5 * best_norm) {
            best_norm = norm;
            iters_since_progress = 0;
        } else if (++iters_since_progress > 8) {
            throw NonConvergence("solve_fixed_point: Newton stalled at residual " +
                                 std::to_string(norm));
        }

        const double alpha_sq = alpha * alpha;
        for (int i = 0; i < m; ++i) {
            const double x = xs[i];
            const double u = x / alpha;
            const double y = g(u);
            const double gy = g(y);
            const double gp_u = g.derivative(u);
            const double gp_y = g.derivative(y);
            // d(alpha)/dc_j = alpha^2 and d(u)/dc_j = -x for every j.
            double xp = x * x, up = u * u, yp = y * y;
            const double x2 = x * x, u2 = u * u, y2 = y * y;
            for (int j = 1; j <= m; ++j) {
                const double dy = up - gp_u * x;
                J(i, j - 1) = xp + alpha_sq * gy + alpha * (yp + gp_y * dy);
                xp *= x2;
                up *= u2;
                yp *= y2;
            }
        }

        // The Jacobian develops near-dependent trailing columns at high degree;
        // full pivoting keeps the step meaningful where partial pivoting fails.
        Eigen::VectorXd step = J.fullPivLu().solve(-F);
        if (!step.allFinite()) {
            throw NonConvergence("solve_fixed_point: singular Newton system");
        }
        for (int j = 1; j <= m; ++j) {
            c[j] += step(j - 1);
        }
    }

    if (!converged_on_nodes) {
        // Accept anyway iff the dense residual is already below tol.
        EvenPolynomial g(c);
        const double g1 = g(1.0);
        if (!(g1 < 0.0) || dense_residual(g, -1.0 / g1, 1024) > tol) {
            throw NonConvergence("solve_fixed_point: iteration limit at degree " +
                                 std::to_string(degree));
        }
    }

    EvenPolynomial g(c);
    const double alpha = -1.0 / g(1.0);
    constexpr int kCheckGrid = 1024;
    const double resid = dense_residual(g, alpha, kCheckGrid);
    if (resid > tol) {
        throw NonConvergence(
            "solve_fixed_point: dense residual " + std::to_string(resid) +
            " exceeds tol (degree too low for this tolerance)");
    }
    return RenormFixedPoint(std::move(g), resid, kCheckGrid);
}

std::string fixed_point_to_json(const RenormFixedPoint& fp) {
    nlohmann::json doc;
    doc["schema_version"] = "1.0";
    doc["degree"] = fp.g().degree();
    doc["alpha"] = fp.alpha();
    doc["residual"] = fp.residual();
    doc["check_grid_size"] = fp.check_grid_size();
    nlohmann::json coeffs = nlohmann::json::array();
    char buf[40];
    for (double ck : fp.g().coefficients()) {
        std::snprintf(buf, sizeof buf, "%.17g", ck);
        coeffs.push_back(std::string(buf));
    }
    doc["coefficients"] = coeffs;
    return doc.dump(2) + "\n";
}

RenormFixedPoint fixed_point_from_json(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    const std::string version = doc.at("schema_version").get<std::string>();
    if (version.rfind("1.", 0) != 0) {
        throw UsageError("fixed_point_from_json: unsupported schema major in '" +
                         version + "'");
    }
    std::vector<double> coeffs;
    for (const auto& item : doc.at("coefficients")) {
        coeffs.push_back(std::stod(item.get<std::string>()));
    }
    const double residual = doc.at("residual").get<double>();
    const int grid = doc.value("check_grid_size", 1024);
    RenormFixedPoint fp(EvenPolynomial(std::move(coeffs)), residual, grid);
    const double alpha_stored = doc.at("alpha").get<double>();
    if (std::fabs(alpha_stored - fp.alpha()) > 1e-12 * fp.alpha()) {
        throw InvariantViolation("fixed_point_from_json: stored alpha disagrees "
                                 "with the coefficients");
    }
    return fp;
}

namespace {

// 2^n-fold composition of f_t(x) = t - (1+t) x^2 started at the critical
// point 0.
double cascade_h(double t, int n) {
    double x = 0.0;
    const std::int64_t steps = std::int64_t{1} << n;
    for (std::int64_t i = 0; i < steps; ++i) {
        x = t - (1.0 + t) * x * x;
    }
    return x;
}

double cascade_orbit_min_step(double t, int half_steps) {
    // f^(2^(n-1))(0) at the superstable parameter: the closest return.
    double x = 0.0;
    for (int i = 0; i < half_steps; ++i) {
        x = t - (1.0 + t) * x * x;
    }
    return x;
}

}  // namespace

CascadeOracleResult cascade_oracle(int depth) {
    if (depth < 2 || depth > 16) {
        throw UsageError("cascade_oracle: depth must be in [2, 16]");
    }
    CascadeOracleResult result;
    result.depth = depth;
    auto& ts = result.superstable_params;
    ts.push_back(0.0);  // t_0: f_t(0) = t has its superstable fixed point at 0

    for (int n = 1; n <= depth; ++n) {
        // Predict the next gap from the ratio of the last two, then scan for
        // the first sign change of h_n past t_{n-1}.  The roots of h_n are
        // exactly t_0 .. t_n, so the first crossing is the one we want.
        double predicted;
        if (n == 1) {
            predicted = 0.6;
        } else if (n == 2) {
            predicted = (ts[1] - ts[0]) / 4.0;
        } else {
            const double g1 = ts[n - 1] - ts[n - 2];
            const double g0 = ts[n - 2] - ts[n - 3];
            predicted = g1 * (g1 / g0);
        }
        const double step = predicted / 8.0;
        const double t_prev = ts[n - 1];

        double lo = t_prev + step;
        double f_lo = cascade_h(lo, n);
        double hi = 0.0, f_hi = 0.0;
        bool bracketed = false;
        for (int k = 2; k <= 256; ++k) {
            hi = t_prev + step * k;
            f_hi = cascade_h(hi, n);
            if ((f_lo < 0.0) != (f_hi < 0.0)) {
                bracketed = true;
                break;
            }
            lo = hi;
            f_lo = f_hi;
        }
        if (!bracketed) {
            throw RootBracketFailure("cascade_oracle: no sign change after t_" +
                                     std::to_string(n - 1));
        }
        for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = cascade_h(mid, n);
            if ((f_mid < 0.0) == (f_lo < 0.0)) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        ts.push_back(0.5 * (lo + hi));
    }

    for (int n = 1; n + 1 <= depth; ++n) {
        const double gap0 = ts[n] - ts[n - 1];
        const double gap1 = ts[n + 1] - ts[n];
        if (!(gap1 > 0.0)) {
            throw RootBracketFailure("cascade_oracle: non-monotone cascade");
        }
        result.delta_estimates.push_back(gap0 / gap1);
    }
    for (int n = 1; n + 1 <= depth; ++n) {
        const double d0 = cascade_orbit_min_step(ts[n], 1 << (n - 1));
        const double d1 = cascade_orbit_min_step(ts[n + 1], 1 << n);
        result.alpha_estimates.push_back(std::fabs(d0 / d1));
    }
    return result;
}

}  // namespace doubling

#pragma once

#include <string>
#include <vector>

#include "doubling/even_polynomial.hpp"

namespace doubling {

// Solution of the period-doubling fixed-point equation
//     g(x) = -alpha * g(g(-x / alpha)),   g(0) = 1,  alpha = -1/g(1),
// represented by an even polynomial on [-1, 1].  Immutable once built; the
// constructor re-validates every structural invariant, so a value of this
// type is always usable.
class RenormFixedPoint {
public:
    // Evaluation is permitted on [-margin, margin] with margin = 1.05; the
    // polynomial has no meaning further out.
    static constexpr double kDomainMargin = 1.05;

    RenormFixedPoint(EvenPolynomial g, double residual, int check_grid_size);

    double eval(double x) const;
    double eval_prime(double x) const;
    double eval_second(double x) const;

    // Inverse of g restricted to [0, 1]; accepts y in [g(1), 1].
    double invert(double y) const;

    double alpha() const { return alpha_; }
    double residual() const { return residual_; }
    int check_grid_size() const { return check_grid_size_; }
    const EvenPolynomial& g() const { return g_; }

private:
    EvenPolynomial g_;
    double alpha_;
    double residual_;
    int check_grid_size_;
};

// Newton solve at the given even truncation degree.  Residual is the sup of
// |g(x) + alpha*g(g(-x/alpha))| over a dense grid in [-1, 1]; the solve
// fails (NonConvergence) if it cannot be pushed below tol.
RenormFixedPoint solve_fixed_point(int degree, double tol = 1e-12,
                                   int max_newton_iters = 50);

// JSON round-trip.  Coefficients are stored as full-precision decimal
// strings so that artifacts are byte-stable across runs.
std::string fixed_point_to_json(const RenormFixedPoint& fp);
RenormFixedPoint fixed_point_from_json(const std::string& text);

// Independent cross-validation oracle: the superstable parameter cascade of
// the family f_t(x) = t - (1+t)x^2 on [-1, 1].  Knows nothing about the
// fixed-point solver; used to pin the universal constants from the other
// side.
struct CascadeOracleResult {
    int depth = 0;
    std::vector<double> superstable_params;  // t_0 .. t_depth
    std::vector<double> delta_estimates;     // gap ratios, -> delta
    std::vector<double> alpha_estimates;     // |d_n / d_{n+1}|, -> alpha
};

CascadeOracleResult cascade_oracle(int depth);

}  // namespace doubling

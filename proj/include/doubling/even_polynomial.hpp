#pragma once

#include <cstddef>
#include <vector>

namespace doubling {

// Polynomial in x^2:  p(x) = sum_k c[k] * x^(2k).
// The leading stored coefficient is nonzero unless the polynomial is the
// constant c[0].
class EvenPolynomial {
public:
    explicit EvenPolynomial(std::vector<double> coeffs);

    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    int degree() const { return 2 * static_cast<int>(coeffs_.size() - 1); }
    const std::vector<double>& coefficients() const { return coeffs_; }

private:
    std::vector<double> coeffs_;
};

}  // namespace doubling

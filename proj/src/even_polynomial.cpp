#include "doubling/even_polynomial.hpp"

#include "doubling/errors.hpp"

namespace doubling {

EvenPolynomial::EvenPolynomial(std::vector<double> coeffs)
    : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
        throw UsageError("EvenPolynomial: empty coefficient list");
    }
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) {
        coeffs_.pop_back();
    }
}

double EvenPolynomial::operator()(double x) const {
    const double u = x * x;
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) {
        acc = acc * u + coeffs_[k];
    }
    return acc;
}

double EvenPolynomial::derivative(double x) const {
    // p'(x) = x * q(x^2),  q(u) = sum_{k>=1} 2k c_k u^(k-1)
    const double u = x * x;
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 1;) {
        acc = acc * u + 2.0 * static_cast<double>(k) * coeffs_[k];
    }
    return x * acc;
}

double EvenPolynomial::second_derivative(double x) const {
    const double u = x * x;
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 1;) {
        const double two_k = 2.0 * static_cast<double>(k);
        acc = acc * u + two_k * (two_k - 1.0) * coeffs_[k];
    }
    return acc;
}

}  // namespace doubling

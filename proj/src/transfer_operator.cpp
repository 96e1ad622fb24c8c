#include "doubling/transfer_operator.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "doubling/errors.hpp"

namespace doubling {

ChebyshevGrid::ChebyshevGrid(double lo, double hi, int n) : lo_(lo), hi_(hi) {
    if (!(lo < hi) || n < 1) {
        throw UsageError("ChebyshevGrid: need lo < hi and n >= 1");
    }
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    nodes_.resize(n + 1);
    weights_.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        nodes_[i] = mid + half * std::cos(i * std::numbers::pi / n);
        weights_[i] = (i % 2 == 0) ? 1.0 : -1.0;
    }
    weights_.front() *= 0.5;
    weights_.back() *= 0.5;
}

std::vector<double> ChebyshevGrid::cardinal_row(double p) const {
    const int count = size();
    std::vector<double> row(count, 0.0);
    // Exact node hits bypass the barycentric form.
    const double scale = std::fabs(hi_ - lo_);
    for (int j = 0; j < count; ++j) {
        if (std::fabs(p - nodes_[j]) < 1e-15 * scale) {
            row[j] = 1.0;
            return row;
        }
    }
    double denom = 0.0;
    for (int j = 0; j < count; ++j) {
        row[j] = weights_[j] / (p - nodes_[j]);
        denom += row[j];
    }
    for (int j = 0; j < count; ++j) {
        row[j] /= denom;
    }
    return row;
}

double apply_transfer(const SigmaSystem& s,
                      const std::function<double(double)>& v, double z) {
    const double a = s.alpha();
    const double w0 = s.branch_inverse(0, z);
    const double w1 = s.branch_inverse(1, z);
    return -a * v(w0) - a * s.fixed_point().eval_prime(w1) * v(w1);
}

namespace {

bool spectral_less(const std::complex<double>& x, const std::complex<double>& y) {
    return std::make_tuple(-std::abs(x), -x.real(), -x.imag()) <
           std::make_tuple(-std::abs(y), -y.real(), -y.imag());
}

Eigen::MatrixXd collocation_matrix(const SigmaSystem& s, int n) {
    const ChebyshevGrid grid(s.J().lo, s.J().hi, n);
    const int count = grid.size();
    const double a = s.alpha();
    Eigen::MatrixXd m(count, count);
    for (int i = 0; i < count; ++i) {
        const double z = grid.nodes()[i];
        const double p0 = s.branch_inverse(0, z);
        const double p1 = s.branch_inverse(1, z);
        const double w0 = -a;
        const double w1 = -a * s.fixed_point().eval_prime(p1);
        const std::vector<double> r0 = grid.cardinal_row(p0);
        const std::vector<double> r1 = grid.cardinal_row(p1);
        for (int j = 0; j < count; ++j) {
            m(i, j) = w0 * r0[j] + w1 * r1[j];
        }
    }
    return m;
}

std::vector<std::complex<double>> sorted_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw EigensolveFailure("collocation_spectrum: eigensolve failed");
    }
    std::vector<std::complex<double>> values(m.rows());
    for (int i = 0; i < m.rows(); ++i) {
        values[i] = solver.eigenvalues()(i);
    }
    std::sort(values.begin(), values.end(), spectral_less);
    return values;
}

}  // namespace

SpectrumResult collocation_spectrum(const SigmaSystem& s, int n,
                                    double stability_tol) {
    if (n < 6 || n > 80) {
        throw UsageError("collocation_spectrum: n must be in [6, 80]");
    }
    SpectrumResult result;
    result.n = n;
    result.eigenvalues = sorted_eigenvalues(collocation_matrix(s, n));
    result.leading = result.eigenvalues.front();
    result.converged = false;
    if (n >= 16) {
        const auto coarse = sorted_eigenvalues(collocation_matrix(s, n - 10));
        result.converged =
            std::abs(result.leading - coarse.front()) <= stability_tol;
    }
    return result;
}

std::function<double(double)> known_eigenvector(
    std::shared_ptr<const RenormFixedPoint> fp, int m) {
    if (!fp) {
        throw UsageError("known_eigenvector: null fixed point");
    }
    if (m < 1 || m > 4) {
        throw UsageError("known_eigenvector: m must be in [1, 4]");
    }
    const int p = 2 * m - 1;
    return [fp, p](double y) {
        const double x = fp->invert(y);
        return fp->eval_prime(x) * std::pow(x, p) - std::pow(fp->eval(x), p);
    };
}

double known_eigenvalue(const SigmaSystem& s, int m) {
    if (m < 1 || m > 4) {
        throw UsageError("known_eigenvalue: m must be in [1, 4]");
    }
    return std::pow(s.alpha(), -(2.0 * m - 2.0));
}

double known_pair_residual(const SigmaSystem& s, int m, int grid_size) {
    if (grid_size < 2) {
        throw UsageError("known_pair_residual: grid too small");
    }
    const auto v = known_eigenvector(s.fixed_point_ptr(), m);
    const double lambda = known_eigenvalue(s, m);
    const Interval J = s.J();
    double worst = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        const double z = J.lo + J.length() * i / (grid_size - 1);
        worst = std::max(worst, std::fabs(apply_transfer(s, v, z) - lambda * v(z)));
    }
    return worst;
}

ToyModel make_toy(double a, double b, double twist) {
    if (!(a > 2.0) || !(b > a)) {
        throw UsageError("make_toy: need b > a > 2");
    }
    if (!(1.0 / a + 1.0 / b < 1.0)) {
        throw UsageError("make_toy: branch domains would overlap");
    }
    ToyModel model;
    model.a = a;
    model.b = b;
    model.twist = twist;
    model.I = {-1.0, 1.0};
    model.I0 = {-1.0, -1.0 + 2.0 / a};
    model.I1 = {1.0 - 2.0 / b, 1.0};
    return model;
}

std::vector<std::complex<double>> toy_spectrum_exact(const ToyModel& model,
                                                     int n_max) {
    if (n_max < 0 || n_max > 200) {
        throw UsageError("toy_spectrum_exact: n_max out of range");
    }
    std::vector<std::complex<double>> values;
    values.reserve(n_max + 1);
    const double tau = 2.0 * std::numbers::pi * model.twist;
    for (int k = 0; k <= n_max; ++k) {
        const double bk = std::pow(model.b, 1.0 - k);
        const double ak = std::pow(model.a, 1.0 - k);
        values.push_back(bk + std::polar(ak, -tau * (k - 1)));
    }
    return values;
}

std::vector<std::complex<double>> toy_spectrum_numeric(const ToyModel& model,
                                                       int n) {
    if (n < 1 || n > 60) {
        throw UsageError("toy_spectrum_numeric: n must be in [1, 60]");
    }
    using Complex = std::complex<double>;
    const int count = n + 1;
    // Inverse branches are affine, w(z) = c + s z, so the operator is upper
    // triangular in the monomial basis; assemble it column by column from
    // the binomial expansion and eigensolve densely as a cross check.
    const Complex phase = std::polar(1.0, 2.0 * std::numbers::pi * model.twist);
    const Complex s0 = std::conj(phase) / model.a;
    const Complex c0{(1.0 - model.a) / model.a, 0.0};
    const Complex w0 = model.a * phase;
    const Complex s1{1.0 / model.b, 0.0};
    const Complex c1{(model.b - 1.0) / model.b, 0.0};
    const Complex w1{model.b, 0.0};

    std::vector<std::vector<double>> pascal(count, std::vector<double>(count, 0.0));
    for (int k = 0; k < count; ++k) {
        pascal[k][0] = 1.0;
        for (int j = 1; j <= k; ++j) {
            pascal[k][j] = pascal[k - 1][j - 1] + (j <= k - 1 ? pascal[k - 1][j] : 0.0);
        }
    }

    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(count, count);
    std::vector<Complex> pc0(count), ps0(count), pc1(count), ps1(count);
    pc0[0] = pc1[0] = ps0[0] = ps1[0] = Complex{1.0, 0.0};
    for (int j = 1; j < count; ++j) {
        pc0[j] = pc0[j - 1] * c0;
        ps0[j] = ps0[j - 1] * s0;
        pc1[j] = pc1[j - 1] * c1;
        ps1[j] = ps1[j - 1] * s1;
    }
    for (int k = 0; k < count; ++k) {
        for (int j = 0; j <= k; ++j) {
            m(j, k) = w0 * pascal[k][j] * pc0[k - j] * ps0[j] +
                      w1 * pascal[k][j] * pc1[k - j] * ps1[j];
        }
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m,
                                                       /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw EigensolveFailure("toy_spectrum_numeric: eigensolve failed");
    }
    std::vector<Complex> values(count);
    for (int i = 0; i < count; ++i) {
        values[i] = solver.eigenvalues()(i);
    }
    std::sort(values.begin(), values.end(), spectral_less);
    return values;
}

bool toy_leading_is_lambda0(const ToyModel& model, int n_max) {
    const auto exact = toy_spectrum_exact(model, n_max);
    const double head = std::abs(exact.front());
    for (std::size_t k = 1; k < exact.size(); ++k) {
        if (!(head > std::abs(exact[k]))) {
            return false;
        }
    }
    return true;
}

}  // namespace doubling

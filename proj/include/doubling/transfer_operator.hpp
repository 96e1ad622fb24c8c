#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "doubling/induced_map.hpp"

namespace doubling {

// Chebyshev-Lobatto grid on [lo, hi] with barycentric Lagrange evaluation.
class ChebyshevGrid {
public:
    ChebyshevGrid(double lo, double hi, int n);  // n+1 nodes

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    // Values of all cardinal functions at p (row of the interpolation map).
    std::vector<double> cardinal_row(double p) const;

private:
    double lo_, hi_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

// Weighted composition (transfer) operator of the induced map,
//   (L v)(z) = sum over sigma-preimages w of z of  sigma'(w) * v(w),
// discretized by collocation on a Chebyshev grid over J.
double apply_transfer(const SigmaSystem& s,
                      const std::function<double(double)>& v, double z);

struct SpectrumResult {
    int n = 0;  // polynomial degree of the collocation space
    std::vector<std::complex<double>> eigenvalues;  // sorted, largest first
    std::complex<double> leading;
    bool converged = false;  // leading stable against degree n-10
};

SpectrumResult collocation_spectrum(const SigmaSystem& s, int n,
                                    double stability_tol = 1e-8);

// Known eigenfunctions of the transfer operator:
//   v_m(y) = V_m(g^{-1}(y)),  V_m(x) = g'(x) x^(2m-1) - g(x)^(2m-1),
// with eigenvalue alpha^(-(2m-2)), for m = 1, 2, 3, ...
std::function<double(double)> known_eigenvector(
    std::shared_ptr<const RenormFixedPoint> fp, int m);
double known_eigenvalue(const SigmaSystem& s, int m);

// Sup over a dense grid in J of |L v_m - known_eigenvalue * v_m|.
double known_pair_residual(const SigmaSystem& s, int m, int grid_size = 400);

// Piecewise-affine toy model on I = [-1, 1]: branch 0 has slope modulus a
// and carries a complex twist (the angle that interpolates between the two
// orientations; twist = 1/2 is the real orientation-reversing branch),
// branch 1 has slope b.  Requires b > a > 2 and 1/a + 1/b < 1 so the
// branch domains are disjoint.
struct ToyModel {
    double a = 0.0;
    double b = 0.0;
    double twist = 0.0;
    Interval I;   // [-1, 1]
    Interval I0;  // [-1, -1 + 2/a]
    Interval I1;  // [1 - 2/b, 1]
};

ToyModel make_toy(double a, double b, double twist);

// Exact point spectrum: lambda_k = b^(1-k) + exp(-2*pi*i*twist*(k-1)) * a^(1-k)
// for k = 0 .. n_max (k = 0 gives b + exp(2*pi*i*twist)*a, k = 1 gives 2).
std::vector<std::complex<double>> toy_spectrum_exact(const ToyModel& model,
                                                     int n_max);

// Numeric spectrum from the weighted composition operator on polynomials of
// degree <= n (upper triangular in the monomial basis, solved densely as a
// cross check).
std::vector<std::complex<double>> toy_spectrum_numeric(const ToyModel& model,
                                                       int n);

// Whether lambda_0 strictly dominates the rest of the exact spectrum in
// modulus.  At twist 1/2 (real reversing branch) lambda_0 = b - a and the
// competitor is lambda_1 = 2, so this holds iff b - a > 2.
bool toy_leading_is_lambda0(const ToyModel& model, int n_max = 24);

}  // namespace doubling

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "doubling/fixed_point.hpp"

namespace doubling {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double mid() const { return 0.5 * (lo + hi); }
    double length() const { return hi - lo; }
    bool contains(double x, double slack = 0.0) const {
        return x >= lo - slack && x <= hi + slack;
    }
};

// The induced expanding map sigma on J = [g(1), 1]:
//   branch 0:  sigma(x) = -alpha * x     on J0 = [g(1), g^3(1)]
//   branch 1:  sigma(x) = -alpha * g(x)  on J1 = [g^2(1), 1]
// Both branches map onto J; |sigma'| >= alpha everywhere.
class SigmaSystem {
public:
    static SigmaSystem build(std::shared_ptr<const RenormFixedPoint> fp);

    double apply(double x) const;           // OutsideBranches off J0 u J1
    double prime(double x) const;           // sigma' (signed)
    double branch_apply(int branch, double x) const;
    double branch_prime(int branch, double x) const;
    double branch_inverse(int branch, double y) const;  // y in J

    const Interval& J() const { return J_; }
    const Interval& J0() const { return J0_; }
    const Interval& J1() const { return J1_; }
    double alpha() const { return alpha_; }
    const RenormFixedPoint& fixed_point() const { return *fp_; }
    std::shared_ptr<const RenormFixedPoint> fixed_point_ptr() const { return fp_; }

private:
    SigmaSystem() = default;
    int branch_of(double x) const;  // -1 if outside both

    std::shared_ptr<const RenormFixedPoint> fp_;
    Interval J_, J0_, J1_;
    double alpha_ = 0.0;
};

// Level-n refinement sigma^{-n}(J): 2^n closed intervals, sorted left to
// right.  codes[i] packs the branch word of interval i, first symbol in the
// lowest bit; parent[i] is the index of the level-(n-1) interval containing
// interval i (sorted order gives the sibling pattern parent[i] == i/2).
// betas[j] = |g'(right endpoint)| over the intervals lying in J1, in sorted
// order; they increase strictly to alpha.
struct LevelPartition {
    int level = 0;
    std::vector<Interval> intervals;
    std::vector<std::uint32_t> codes;
    std::vector<int> parent;
    std::vector<double> betas;
};

// Refine down to the requested level (1 <= level <= 20).
LevelPartition refine_partition(const SigmaSystem& s, int level);
// Single refinement step (exposed for incremental use).
LevelPartition refine_step(const SigmaSystem& s, const LevelPartition& prev);

// Periodic points of sigma of period n (all 2^n branch words), n <= 14.
struct PeriodicOrbitSet {
    int period = 0;
    std::vector<double> points;           // indexed by branch word
    std::vector<double> multipliers;      // |(sigma^n)'| at each point
    std::vector<double> weight_products;  // product of |sigma'| along orbit
};

PeriodicOrbitSet periodic_points(const SigmaSystem& s, int n);

// Sum over fixed points of sigma^n of the weight products, and log(sum)/n.
double pressure_sum(const SigmaSystem& s, int n);
double pressure_estimate(const SigmaSystem& s, int n);

// Checks that the forward critical orbit x_k = g^k(0) stays on the branch
// domains and that sigma acts on it as the binary-shift conjugacy predicts
// (sigma(x_k) = x_{k/2} for even k, x_{(k+1)/2} for odd k).  Never throws;
// the report carries the violations.
struct AttractorReport {
    int orbit_len = 0;
    double max_containment_violation = 0.0;
    double max_conjugacy_violation = 0.0;
    double max_violation = 0.0;
};

AttractorReport verify_attractor(const SigmaSystem& s, int orbit_len);

}  // namespace doubling

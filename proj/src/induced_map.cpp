#include "doubling/induced_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "doubling/errors.hpp"

namespace doubling {

namespace {

// Relative slack used for containment decisions on J.
constexpr double kSlack = 1e-12;

}  // namespace

SigmaSystem SigmaSystem::build(std::shared_ptr<const RenormFixedPoint> fp) {
    if (!fp) {
        throw UsageError("SigmaSystem: null fixed point");
    }
    SigmaSystem s;
    s.fp_ = std::move(fp);
    const RenormFixedPoint& g = *s.fp_;
    s.alpha_ = g.alpha();
    const double g1 = g.eval(1.0);
    const double g2 = g.eval(g1);
    const double g3 = g.eval(g2);
    s.J_ = {g1, 1.0};
    s.J0_ = {g1, g3};
    s.J1_ = {g2, 1.0};

    if (!(s.J0_.hi < s.J1_.lo)) {
        throw GeometryViolation("SigmaSystem: branch domains are not disjoint");
    }
    // Endpoint images: branch 0 reverses J0 onto J, branch 1 maps J1 onto J
    // preserving orientation, and x = 1 is fixed.
    const double a = s.alpha_;
    if (std::fabs(-a * s.J0_.lo - s.J_.hi) > 1e-10 ||
        std::fabs(-a * s.J0_.hi - s.J_.lo) > 1e-10 ||
        std::fabs(-a * g.eval(s.J1_.lo) - s.J_.lo) > 1e-10) {
        throw GeometryViolation("SigmaSystem: branch endpoints do not map onto J");
    }
    if (std::fabs(-a * g.eval(1.0) - 1.0) > 1e-12) {
        throw GeometryViolation("SigmaSystem: x = 1 is not fixed");
    }
    // Uniform expansion |sigma'| >= alpha on both branches.
    constexpr int kSamples = 512;
    for (int i = 0; i <= kSamples; ++i) {
        const double x = s.J1_.lo + s.J1_.length() * i / kSamples;
        if (std::fabs(a * g.eval_prime(x)) < a * (1.0 - 1e-9)) {
            throw GeometryViolation("SigmaSystem: expansion lost on J1 at x=" +
                                    std::to_string(x));
        }
    }
    return s;
}

int SigmaSystem::branch_of(double x) const {
    const double slack = kSlack * (1.0 + std::fabs(J_.lo));
    if (J0_.contains(x, slack)) return 0;
    if (J1_.contains(x, slack)) return 1;
    return -1;
}

double SigmaSystem::branch_apply(int branch, double x) const {
    const double slack = kSlack * (1.0 + std::fabs(J_.lo));
    if (branch == 0) {
        if (!J0_.contains(x, slack)) {
            throw OutsideBranches("branch_apply: x off J0");
        }
        return -alpha_ * x;
    }
    if (branch == 1) {
        if (!J1_.contains(x, slack)) {
            throw OutsideBranches("branch_apply: x off J1");
        }
        return -alpha_ * fp_->eval(x);
    }
    throw UsageError("branch_apply: branch must be 0 or 1");
}

double SigmaSystem::branch_prime(int branch, double x) const {
    const double slack = kSlack * (1.0 + std::fabs(J_.lo));
    if (branch == 0) {
        if (!J0_.contains(x, slack)) {
            throw OutsideBranches("branch_prime: x off J0");
        }
        return -alpha_;
    }
    if (branch == 1) {
        if (!J1_.contains(x, slack)) {
            throw OutsideBranches("branch_prime: x off J1");
        }
        return -alpha_ * fp_->eval_prime(x);
    }
    throw UsageError("branch_prime: branch must be 0 or 1");
}

double SigmaSystem::apply(double x) const {
    const int b = branch_of(x);
    if (b < 0) {
        throw OutsideBranches("apply: x in the gap or off J, x=" +
                              std::to_string(x));
    }
    return branch_apply(b, x);
}

double SigmaSystem::prime(double x) const {
    const int b = branch_of(x);
    if (b < 0) {
        throw OutsideBranches("prime: x in the gap or off J, x=" +
                              std::to_string(x));
    }
    return branch_prime(b, x);
}

double SigmaSystem::branch_inverse(int branch, double y) const {
    const double slack = kSlack * (1.0 + std::fabs(J_.lo));
    if (!J_.contains(y, slack)) {
        throw OutOfRange("branch_inverse: y off J, y=" + std::to_string(y));
    }
    if (branch == 0) {
        return -y / alpha_;
    }
    if (branch == 1) {
        return fp_->invert(-y / alpha_);
    }
    throw UsageError("branch_inverse: branch must be 0 or 1");
}

namespace {

struct Child {
    Interval iv;
    std::uint32_t code;
    int origin;  // index of the generating interval one level up
};

}  // namespace

LevelPartition refine_step(const SigmaSystem& s, const LevelPartition& prev) {
    if (prev.level < 1 || prev.intervals.empty()) {
        throw UsageError("refine_step: malformed source partition");
    }
    if (prev.level >= 20) {
        throw DepthExceeded("refine_step: level > 20");
    }
    const double alpha = s.alpha();
    const RenormFixedPoint& fp = s.fixed_point();
    const int n = prev.level + 1;
    const std::size_t count = prev.intervals.size();

    std::vector<Child> children;
    children.reserve(2 * count);
    for (std::size_t k = 0; k < count; ++k) {
        const Interval& I = prev.intervals[k];
        const std::uint32_t code = prev.codes[k];
        // Branch 0: -alpha * x in I, orientation reversing.
        children.push_back(
            {{-I.hi / alpha, -I.lo / alpha}, code << 1, static_cast<int>(k)});
        // Branch 1: g(x) in [-I.hi, -I.lo]/alpha; g decreasing flips again.
        children.push_back({{fp.invert(-I.lo / alpha), fp.invert(-I.hi / alpha)},
                            (code << 1) | 1u,
                            static_cast<int>(k)});
    }
    std::sort(children.begin(), children.end(),
              [](const Child& x, const Child& y) { return x.iv.lo < y.iv.lo; });

    const double scale = 1.0 + std::fabs(s.J().lo);
    const double slack = kSlack * scale;
    const std::size_t half = count;  // 2^(n-1)

    LevelPartition part;
    part.level = n;
    part.intervals.reserve(2 * count);
    part.codes.reserve(2 * count);
    part.parent.reserve(2 * count);
    part.betas.reserve(count);

    double max_len = 0.0;
    for (std::size_t i = 0; i < children.size(); ++i) {
        const Child& ch = children[i];
        if (!(ch.iv.lo < ch.iv.hi)) {
            throw GeometryViolation("refine_step: degenerate interval");
        }
        if (i + 1 < children.size() && !(ch.iv.hi < children[i + 1].iv.lo)) {
            throw GeometryViolation("refine_step: intervals overlap at level " +
                                    std::to_string(n));
        }
        // Sorted order must interleave as J0-children first, J1-children
        // second, in sibling pairs under the previous level.
        const bool left_half = i < half;
        if (left_half != ((ch.code & 1u) == 0u)) {
            throw CombinatoricsMismatch("refine_step: branch blocks out of order");
        }
        const Interval& outer = left_half ? s.J0() : s.J1();
        if (!outer.contains(ch.iv.lo, slack) || !outer.contains(ch.iv.hi, slack)) {
            throw GeometryViolation("refine_step: child escapes its branch");
        }
        // Containment parent at the previous level.
        const auto it = std::upper_bound(
            prev.intervals.begin(), prev.intervals.end(), ch.iv.mid(),
            [](double v, const Interval& iv) { return v < iv.lo; });
        if (it == prev.intervals.begin()) {
            throw IncidenceMismatch("refine_step: child left of every parent");
        }
        const int p = static_cast<int>(it - prev.intervals.begin()) - 1;
        if (!prev.intervals[p].contains(ch.iv.lo, slack) ||
            !prev.intervals[p].contains(ch.iv.hi, slack)) {
            throw IncidenceMismatch("refine_step: child not inside a parent");
        }
        if (p != static_cast<int>(i / 2)) {
            throw IncidenceMismatch("refine_step: sibling pattern broken");
        }
        // sigma must carry the child exactly onto its generator.
        const Interval& gen = prev.intervals[ch.origin];
        const bool reversing = (ch.code & 1u) == 0u;
        const double im_lo =
            reversing ? -alpha * ch.iv.hi : -alpha * fp.eval(ch.iv.lo);
        const double im_hi =
            reversing ? -alpha * ch.iv.lo : -alpha * fp.eval(ch.iv.hi);
        if (std::fabs(im_lo - gen.lo) > 1e-10 * scale ||
            std::fabs(im_hi - gen.hi) > 1e-10 * scale) {
            throw GeometryViolation("refine_step: sigma image misses generator");
        }

        part.intervals.push_back(ch.iv);
        part.codes.push_back(ch.code);
        part.parent.push_back(p);
        max_len = std::max(max_len, ch.iv.length());
    }

    if (max_len > s.J().length() * std::pow(alpha, -n) * 1.01) {
        throw GeometryViolation("refine_step: interval too long for level " +
                                std::to_string(n));
    }

    for (std::size_t i = half; i < part.intervals.size(); ++i) {
        part.betas.push_back(std::fabs(fp.eval_prime(part.intervals[i].hi)));
    }
    for (std::size_t j = 1; j < part.betas.size(); ++j) {
        if (!(part.betas[j] > part.betas[j - 1])) {
            throw InvariantViolation("refine_step: betas not strictly increasing");
        }
    }
    if (!(part.betas.front() > 1.0) ||
        std::fabs(part.betas.back() - alpha) > 1e-8) {
        throw InvariantViolation("refine_step: beta range violated");
    }
    return part;
}

LevelPartition refine_partition(const SigmaSystem& s, int level) {
    if (level < 1) {
        throw UsageError("refine_partition: level must be >= 1");
    }
    if (level > 20) {
        throw DepthExceeded("refine_partition: level > 20");
    }
    LevelPartition part;
    part.level = 1;
    part.intervals = {s.J0(), s.J1()};
    part.codes = {0u, 1u};
    part.parent = {0, 0};
    part.betas = {std::fabs(s.fixed_point().eval_prime(1.0))};
    for (int n = 2; n <= level; ++n) {
        part = refine_step(s, part);
    }
    return part;
}

PeriodicOrbitSet periodic_points(const SigmaSystem& s, int n) {
    if (n < 1) {
        throw UsageError("periodic_points: period must be >= 1");
    }
    if (n > 14) {
        throw DepthExceeded("periodic_points: period > 14");
    }
    PeriodicOrbitSet orbits;
    orbits.period = n;
    const std::uint32_t words = 1u << n;
    orbits.points.reserve(words);
    orbits.multipliers.reserve(words);
    orbits.weight_products.reserve(words);

    for (std::uint32_t w = 0; w < words; ++w) {
        // Contract under the word's composite inverse branch, innermost
        // symbol last so the fixed point realizes the itinerary w1 w2 ... wn.
        double z = s.J().mid();
        bool settled = false;
        for (int it = 0; it < 200; ++it) {
            double y = z;
            for (int k = n; k >= 1; --k) {
                y = s.branch_inverse((w >> (k - 1)) & 1u, y);
            }
            const double move = std::fabs(y - z);
            z = y;
            if (move < 1e-15 * (1.0 + std::fabs(z))) {
                settled = true;
                break;
            }
        }
        if (!settled) {
            throw ContractionStall("periodic_points: word " + std::to_string(w) +
                                   " did not settle");
        }
        // Forward pass: weight product along the orbit.  Each expanding step
        // amplifies rounding by alpha, so project onto the itinerary's branch
        // interval; the true orbit point lies inside it by construction.
        double x = z;
        double product = 1.0;
        for (int k = 1; k <= n; ++k) {
            const int b = (w >> (k - 1)) & 1u;
            const Interval& dom = (b == 0) ? s.J0() : s.J1();
            x = std::clamp(x, dom.lo, dom.hi);
            product *= std::fabs(s.branch_prime(b, x));
            x = s.branch_apply(b, x);
        }
        orbits.points.push_back(z);
        orbits.multipliers.push_back(product);
        orbits.weight_products.push_back(product);
    }

    std::vector<double> sorted = orbits.points;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (!(sorted[i] - sorted[i - 1] > 1e-12)) {
            throw InvariantViolation("periodic_points: points collide");
        }
    }
    return orbits;
}

double pressure_sum(const SigmaSystem& s, int n) {
    const PeriodicOrbitSet orbits = periodic_points(s, n);
    double sum = 0.0;
    for (double w : orbits.weight_products) {
        sum += w;
    }
    const double a = s.alpha();
    const double bound = std::pow(a * a + a, n);
    if (sum > bound * (1.0 + 1e-8)) {
        throw InvariantViolation("pressure_sum: bound violated at n=" +
                                 std::to_string(n));
    }
    return sum;
}

double pressure_estimate(const SigmaSystem& s, int n) {
    return std::log(pressure_sum(s, n)) / n;
}

AttractorReport verify_attractor(const SigmaSystem& s, int orbit_len) {
    if (orbit_len < 1 || orbit_len > 10000) {
        throw UsageError("verify_attractor: orbit_len must be in [1, 10000]");
    }
    AttractorReport report;
    report.orbit_len = orbit_len;
    const RenormFixedPoint& fp = s.fixed_point();
    const double alpha = s.alpha();

    // x[k] = g^k(0), one past the end for the odd-index conjugacy check.
    std::vector<double> x(orbit_len + 2);
    x[0] = 0.0;
    for (int k = 1; k <= orbit_len + 1; ++k) {
        x[k] = fp.eval(x[k - 1]);
    }

    auto gap_to = [](const Interval& iv, double v) {
        if (v < iv.lo) return iv.lo - v;
        if (v > iv.hi) return v - iv.hi;
        return 0.0;
    };
    for (int k = 1; k <= orbit_len; ++k) {
        const double d = std::min(gap_to(s.J0(), x[k]), gap_to(s.J1(), x[k]));
        report.max_containment_violation =
            std::max(report.max_containment_violation, d);
        // Binary shift: sigma halves the orbit index.
        const double image =
            (k % 2 == 0) ? -alpha * x[k] : -alpha * fp.eval(x[k]);
        const int target = (k % 2 == 0) ? k / 2 : (k + 1) / 2;
        report.max_conjugacy_violation = std::max(
            report.max_conjugacy_violation, std::fabs(image - x[target]));
    }
    report.max_violation = std::max(report.max_containment_violation,
                                    report.max_conjugacy_violation);
    return report;
}

}  // namespace doubling

#include "doubling/finite_rank.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "doubling/errors.hpp"

namespace doubling {

FiniteRankOperator::FiniteRankOperator(
    int level, double alpha, std::vector<std::array<SparseEntry, 2>> rows)
    : level_(level), alpha_(alpha), rows_(std::move(rows)) {
    if (level_ < 1 || rows_.empty()) {
        throw UsageError("FiniteRankOperator: bad level or empty rows");
    }
    const int dim = static_cast<int>(rows_.size());
    for (const auto& row : rows_) {
        for (const auto& e : row) {
            if (e.col < 0 || e.col >= dim) {
                throw UsageError("FiniteRankOperator: column out of range");
            }
        }
    }
}

std::vector<double> FiniteRankOperator::apply(const std::vector<double>& v) const {
    if (v.size() != rows_.size()) {
        throw UsageError("FiniteRankOperator::apply: dimension mismatch");
    }
    std::vector<double> out(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        out[i] = rows_[i][0].val * v[rows_[i][0].col] +
                 rows_[i][1].val * v[rows_[i][1].col];
    }
    return out;
}

std::vector<std::vector<double>> FiniteRankOperator::dense() const {
    std::vector<std::vector<double>> m(rows_.size(),
                                       std::vector<double>(rows_.size(), 0.0));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        m[i][rows_[i][0].col] += rows_[i][0].val;
        m[i][rows_[i][1].col] += rows_[i][1].val;
    }
    return m;
}

FiniteRankOperator assemble_operator(const SigmaSystem& s,
                                     const LevelPartition& part) {
    const int n = part.level;
    const std::size_t half = part.intervals.size() / 2;  // 2^(n-1) cells
    if (part.intervals.size() != 2 * half || half == 0) {
        throw UsageError("assemble_operator: malformed partition");
    }
    const double alpha = s.alpha();

    // Sorted interval index containing x, or -1.
    const double slack = 1e-12 * (1.0 + std::fabs(s.J().lo));
    auto locate = [&](double x) -> int {
        auto it = std::upper_bound(
            part.intervals.begin(), part.intervals.end(), x,
            [](double v, const Interval& iv) { return v < iv.lo; });
        if (it == part.intervals.begin()) return -1;
        const int r = static_cast<int>(it - part.intervals.begin()) - 1;
        return part.intervals[r].contains(x, slack) ? r : -1;
    };

    std::vector<std::array<SparseEntry, 2>> rows(half);
    for (std::size_t i = 0; i < half; ++i) {
        const Interval& left = part.intervals[2 * i];
        const Interval& right = part.intervals[2 * i + 1];
        for (int b = 0; b < 2; ++b) {
            const int r0 = locate(s.branch_inverse(b, left.mid()));
            const int r1 = locate(s.branch_inverse(b, right.mid()));
            if (r0 < 0 || r0 != r1) {
                throw CombinatoricsMismatch(
                    "assemble_operator: cell " + std::to_string(i) +
                    " straddles under branch " + std::to_string(b));
            }
            // Both halves of a cell pull back into one interval because the
            // cell's hull is a single interval one level up.
            if (b == 0) {
                rows[i][0] = {r0 / 2, -alpha};
            } else {
                if (static_cast<std::size_t>(r0) < half) {
                    throw CombinatoricsMismatch(
                        "assemble_operator: branch-1 preimage landed in J0");
                }
                rows[i][1] = {r0 / 2, alpha * part.betas[r0 - half]};
            }
        }
    }

    // Structural facts used downstream: the last rows pull back to the first
    // cell under branch 0, and the last row is diagonal under branch 1.
    if (half >= 2) {
        if (rows[half - 1][0].col != 0 || rows[half - 2][0].col != 0) {
            throw CombinatoricsMismatch(
                "assemble_operator: last rows miss the first cell");
        }
    }
    if (rows[half - 1][1].col != static_cast<int>(half) - 1) {
        throw CombinatoricsMismatch("assemble_operator: last row not diagonal");
    }
    return FiniteRankOperator(n, alpha, std::move(rows));
}

bool in_cone(const std::vector<double>& v, double tol) {
    if (v.empty()) return false;
    const double top = *std::max_element(v.begin(), v.end());
    if (!(top > 0.0)) return false;
    const double slack = tol * std::max(1.0, top);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < -slack) return false;
        if (i > 0 && v[i] < v[i - 1] - slack) return false;
    }
    return true;
}

PowerIterationResult power_iterate(const FiniteRankOperator& A,
                                   const std::vector<double>& v0, double tol,
                                   int max_iters) {
    if (static_cast<int>(v0.size()) != A.dim()) {
        throw UsageError("power_iterate: v0 has the wrong dimension");
    }
    if (!(tol > 0.0) || max_iters < 1) {
        throw UsageError("power_iterate: bad tol or iteration budget");
    }
    if (!in_cone(v0, 0.0)) {
        throw ConeEscape("power_iterate: v0 outside the cone");
    }

    std::vector<double> v = v0;
    if (!(v.back() > 0.0)) {
        throw ConeEscape("power_iterate: v0 has no mass at the top");
    }
    for (double& e : v) {
        e /= v0.back();
    }

    PowerIterationResult result;
    for (int it = 1; it <= max_iters; ++it) {
        std::vector<double> w = A.apply(v);
        const double scale = w.back();
        if (!(scale > 0.0)) {
            throw ConeEscape("power_iterate: image lost positivity");
        }
        double shift = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] /= scale;
            shift = std::max(shift, std::fabs(w[i] - v[i]));
        }
        if (!in_cone(w, 1e-11)) {
            throw ConeEscape("power_iterate: iterate escaped the cone at step " +
                             std::to_string(it));
        }
        v = std::move(w);

        const std::vector<double> av = A.apply(v);
        const double lambda = av.back();  // v.back() == 1
        double residual = 0.0;
        for (std::size_t i = 0; i < av.size(); ++i) {
            residual = std::max(residual, std::fabs(av[i] - lambda * v[i]));
        }
        if (shift <= tol && residual <= tol * std::max(1.0, std::fabs(lambda))) {
            result.lambda = lambda;
            result.lambda_identity = A.alpha() * (A.alpha() - v.front());
            result.v = v;
            result.iterations = it;
            result.final_shift = shift;
            result.residual = residual;
            return result;
        }
    }
    throw IterationLimit("power_iterate: no convergence within " +
                         std::to_string(max_iters) + " iterations");
}

std::vector<double> embed(const std::vector<double>& v,
                          const LevelPartition& part) {
    const std::size_t cells = part.intervals.size() / 2;
    if (2 * v.size() != cells) {
        throw IncidenceMismatch("embed: vector does not halve the cell count");
    }
    for (std::size_t r = 0; r < part.parent.size(); ++r) {
        if (part.parent[r] != static_cast<int>(r / 2)) {
            throw IncidenceMismatch("embed: partition lacks the sibling pattern");
        }
    }
    std::vector<double> w(cells);
    for (std::size_t j = 0; j < cells; ++j) {
        w[j] = v[j / 2];
    }
    return w;
}

Level2ClosedForm closed_form_lambda2(double alpha, double beta21, double beta22) {
    if (!(alpha > 1.0) || !(beta21 > 0.0) || !(beta22 >= beta21)) {
        throw UsageError("closed_form_lambda2: need alpha > 1, 0 < b21 <= b22");
    }
    const double d = beta22 - 1.0;
    const double disc = d * d + 4.0 * (beta22 - beta21);
    Level2ClosedForm out;
    out.lambda = alpha * (d + std::sqrt(disc)) / 2.0;
    out.t21 = beta22 - out.lambda / alpha;
    return out;
}

ProgramTrace run_program(const SigmaSystem& s, int n_max, double tol) {
    if (n_max < 1 || n_max > 16) {
        throw UsageError("run_program: n_max must be in [1, 16]");
    }
    ProgramTrace trace;
    const double alpha = s.alpha();

    LevelPartition part = refine_partition(s, 1);
    std::vector<double> v{1.0};
    for (int n = 1; n <= n_max; ++n) {
        LevelRecord rec;
        rec.n = n;
        try {
            if (n >= 2) {
                part = refine_step(s, part);
                v = embed(v, part);
            }
            const FiniteRankOperator A = assemble_operator(s, part);
            const PowerIterationResult r = power_iterate(A, v, tol);
            v = r.v;
            rec.lambda = r.lambda_identity;
            rec.lambda_ratio = r.lambda;
            const std::vector<double> av = A.apply(v);
            rec.lambda_applied = alpha * (alpha - av.front() / av.back());
            rec.iterations = r.iterations;
            rec.residual = r.residual;
            rec.shift = r.final_shift;
            // The two read-offs may differ only through |g'(1)| - alpha and
            // the endpoint rounding of the partition.
            if (std::fabs(rec.lambda - rec.lambda_ratio) >
                1e-6 * std::max(1.0, std::fabs(rec.lambda))) {
                throw InvariantViolation(
                    "run_program: eigenvalue read-offs disagree at level " +
                    std::to_string(n));
            }
        } catch (const UsageError&) {
            throw;  // configuration problems are not per-level data
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.error = e.what();
            trace.records.push_back(rec);
            break;
        }
        trace.records.push_back(rec);
        trace.direction = v;
        trace.last_level = n;
    }

    // Aitken delta^2 on the last three successful levels.
    std::vector<double> ok;
    for (const auto& r : trace.records) {
        if (!r.failed) ok.push_back(r.lambda);
    }
    if (!ok.empty()) {
        trace.lambda_extrapolated = ok.back();
        if (ok.size() >= 3) {
            const double la = ok[ok.size() - 3];
            const double lb = ok[ok.size() - 2];
            const double lc = ok[ok.size() - 1];
            const double denom = lc - 2.0 * lb + la;
            if (std::fabs(denom) > 1e-14) {
                const double diff = lc - lb;
                trace.lambda_extrapolated = lc - diff * diff / denom;
            }
        }
    }
    return trace;
}

void validate_trace(const ProgramTrace& trace, double alpha) {
    if (trace.records.empty()) {
        throw InvariantViolation("validate_trace: empty trace");
    }
    const double lo = alpha * (alpha - 1.0);
    const double hi = alpha * (alpha + 1.0);
    double prev = -1.0;
    for (const auto& rec : trace.records) {
        if (rec.failed) {
            throw InvariantViolation("validate_trace: level " +
                                     std::to_string(rec.n) +
                                     " failed: " + rec.error);
        }
        if (rec.n == 1) {
            if (std::fabs(rec.lambda - lo) > 1e-12) {
                throw InvariantViolation("validate_trace: lambda_1 != alpha*(alpha-1)");
            }
        } else {
            if (!(rec.lambda > prev)) {
                throw InvariantViolation("validate_trace: lambda not increasing at n=" +
                                         std::to_string(rec.n));
            }
            if (!(rec.lambda > alpha + 1.0)) {
                throw InvariantViolation("validate_trace: lambda_n <= alpha + 1");
            }
        }
        if (!(rec.lambda <= hi * (1.0 + 1e-12))) {
            throw InvariantViolation("validate_trace: lambda_n > alpha*(alpha+1)");
        }
        prev = rec.lambda;
    }
}

DirectionSamples pushforward_direction(const SigmaSystem& s,
                                       const std::vector<double>& v,
                                       const LevelPartition& part,
                                       const std::vector<double>& x_grid) {
    const std::size_t cells = part.intervals.size() / 2;
    if (v.size() != cells) {
        throw IncidenceMismatch("pushforward_direction: dimension mismatch");
    }
    std::vector<double> mids(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        mids[c] = 0.5 * (part.intervals[2 * c].lo + part.intervals[2 * c + 1].hi);
    }

    const RenormFixedPoint& fp = s.fixed_point();
    const double slack = 1e-12 * (1.0 + std::fabs(s.J().lo));
    DirectionSamples out;
    out.values.reserve(x_grid.size());
    out.gap_flags.reserve(x_grid.size());
    for (double x : x_grid) {
        if (std::fabs(x) > 1.0 + 1e-12) {
            throw OutOfRange("pushforward_direction: x off [-1, 1]");
        }
        const double y = fp.eval(x);
        auto it = std::upper_bound(
            part.intervals.begin(), part.intervals.end(), y,
            [](double val, const Interval& iv) { return val < iv.lo; });
        int r = static_cast<int>(it - part.intervals.begin()) - 1;
        if (r >= 0 && part.intervals[r].contains(y, slack)) {
            out.values.push_back(v[r / 2]);
            out.gap_flags.push_back(false);
            continue;
        }
        // Gap point: nearest cell by midpoint distance.
        const auto mit = std::lower_bound(mids.begin(), mids.end(), y);
        std::size_t c;
        if (mit == mids.end()) {
            c = cells - 1;
        } else {
            c = static_cast<std::size_t>(mit - mids.begin());
            if (c > 0 && y - mids[c - 1] <= mids[c] - y) {
                --c;
            }
        }
        out.values.push_back(v[c]);
        out.gap_flags.push_back(true);
    }
    return out;
}

}  // namespace doubling

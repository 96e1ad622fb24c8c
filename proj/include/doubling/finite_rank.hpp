#pragma once

#include <array>
#include <string>
#include <vector>

#include "doubling/induced_map.hpp"

namespace doubling {

// One nonzero of a sparse row.
struct SparseEntry {
    int col = 0;
    double val = 0.0;
};

// Level-n finite-rank transfer matrix A_n acting on vectors indexed by the
// 2^(n-1) sibling cells of the level-n partition (cell i = sorted intervals
// 2i, 2i+1).  Every row has exactly two nonzeros: -alpha from the branch-0
// preimage and +alpha*beta from the branch-1 preimage.
class FiniteRankOperator {
public:
    FiniteRankOperator(int level, double alpha,
                       std::vector<std::array<SparseEntry, 2>> rows);

    int level() const { return level_; }
    int dim() const { return static_cast<int>(rows_.size()); }
    double alpha() const { return alpha_; }
    const std::vector<std::array<SparseEntry, 2>>& rows() const { return rows_; }

    std::vector<double> apply(const std::vector<double>& v) const;
    // Dense copy (row-major), for small-n cross checks against a general
    // eigensolver.
    std::vector<std::vector<double>> dense() const;

private:
    int level_;
    double alpha_;
    std::vector<std::array<SparseEntry, 2>> rows_;
};

// Build A_n from the level-n partition by pushing each cell through the two
// inverse branches and locating the receiving cell.
FiniteRankOperator assemble_operator(const SigmaSystem& s,
                                     const LevelPartition& part);

// Cone of test vectors: nonnegative, nondecreasing, not identically zero.
bool in_cone(const std::vector<double>& v, double tol = 0.0);

struct PowerIterationResult {
    double lambda = 0.0;          // from the last row of A at the fixed ray
    double lambda_identity = 0.0; // alpha * (alpha - v[0])
    std::vector<double> v;        // normalized so v.back() == 1
    int iterations = 0;
    double final_shift = 0.0;     // sup-norm move of the last iterate
    double residual = 0.0;        // ||A v - lambda v||_inf
};

// Power iteration normalized on the last coordinate.  The iterate must stay
// in the cone (ConeEscape otherwise); stops when the iterate is stationary
// and the eigen-residual is below tol * lambda (IterationLimit otherwise).
PowerIterationResult power_iterate(const FiniteRankOperator& A,
                                   const std::vector<double>& v0,
                                   double tol = 1e-12, int max_iters = 100000);

// Re-express a cell vector of level n-1 in the cells of level n (value of a
// piecewise-constant function is unchanged; coordinates duplicate).
std::vector<double> embed(const std::vector<double>& v,
                          const LevelPartition& part);

// Closed form for the level-2 eigenvalue in the cone,
//   lambda_2 = alpha * [ (b22-1) + sqrt((b22-1)^2 + 4(b22-b21)) ] / 2,
// together with the first eigenvector coordinate t21.
struct Level2ClosedForm {
    double lambda = 0.0;
    double t21 = 0.0;
};
Level2ClosedForm closed_form_lambda2(double alpha, double beta21, double beta22);

// One level of the expanding-direction program.  lambda is the canonical
// last-row identity alpha*(alpha - v[0]); lambda_ratio re-reads it from the
// assembled matrix ((A v)_last / v_last) and lambda_applied applies A once
// more and reads the identity off the renormalized image
// (alpha*(alpha - (A v)[0] / (A v)_last)); all three agree at a converged ray.
struct LevelRecord {
    int n = 0;
    double lambda = 0.0;
    double lambda_ratio = 0.0;
    double lambda_applied = 0.0;
    int iterations = 0;
    double residual = 0.0;
    double shift = 0.0;
    bool failed = false;
    std::string error;
};

struct ProgramTrace {
    std::vector<LevelRecord> records;
    std::vector<double> direction;  // converged eigenvector at the last level
    int last_level = 0;
    double lambda_extrapolated = 0.0;  // Aitken delta^2 on the last three
};

// Run levels 1..n_max with warm starts (embed the previous eigenvector).  A
// failing level is recorded and stops the climb; earlier levels are kept.
ProgramTrace run_program(const SigmaSystem& s, int n_max, double tol = 1e-12);

// Validate the monotonicity and range invariants of a completed trace.
void validate_trace(const ProgramTrace& trace, double alpha);

// Evaluate the level-n direction vector as a function on [-1, 1] through
// y = g(x).  Points whose image falls in a gap of the partition are flagged
// and assigned the nearest cell by midpoint distance.
struct DirectionSamples {
    std::vector<double> values;
    std::vector<bool> gap_flags;
};

DirectionSamples pushforward_direction(const SigmaSystem& s,
                                       const std::vector<double>& v,
                                       const LevelPartition& part,
                                       const std::vector<double>& x_grid);

}  // namespace doubling

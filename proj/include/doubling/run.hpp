#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "doubling/finite_rank.hpp"
#include "doubling/fixed_point.hpp"
#include "doubling/induced_map.hpp"
#include "doubling/transfer_operator.hpp"

namespace doubling {

struct RunConfig {
    int degree = 40;
    double solver_tol = 1e-12;
    int n_max = 12;
    int collocation_n = 40;
    int cascade_depth = 10;
    std::string output_dir = "out";
    bool emit_eigenvectors = false;
    std::uint64_t seed = 20260821;
};

// Throws UsageError on out-of-range settings.
void validate_config(const RunConfig& cfg);

// End-to-end result of the default pipeline: solve the fixed point, run the
// level program, collocate the spectrum, and cross-check against the
// cascade oracle.
struct RunReport {
    RunConfig config;
    double alpha = 0.0;
    double solver_residual = 0.0;
    ProgramTrace trace;
    double delta_program = 0.0;      // Aitken-extrapolated lambda_n
    double delta_collocation = 0.0;  // leading collocation eigenvalue
    double delta_cascade = 0.0;      // last cascade ratio
    double alpha_cascade = 0.0;      // last cascade rescaling ratio
    double max_pressure_slack = 0.0; // max over n of sum/bound - must be <= 1
    double attractor_violation = 0.0;
    bool cone_spot_check = false;    // seeded random cone vectors stay in cone
};

RunReport run_all(const RunConfig& cfg);

// Deterministic decimal formatting used by every artifact writer: %.17g.
std::string format_double(double x);

// Artifact writers.  Each writes exactly the named file under cfg.output_dir
// (created if missing) and returns the full path.  File contents depend only
// on the inputs, never on clocks or machine identity.
std::string write_fixed_point_json(const RunConfig& cfg, const RenormFixedPoint& fp);
std::string write_delta_table_csv(const RunConfig& cfg, const ProgramTrace& trace);
std::string write_report_json(const RunConfig& cfg, const RunReport& report);
std::string write_spectrum_json(const RunConfig& cfg, const SpectrumResult& spec);
std::string write_spectrum_sweep_csv(const RunConfig& cfg,
                                     const std::vector<SpectrumResult>& sweep);
std::string write_pressure_csv(const RunConfig& cfg, const SigmaSystem& s, int n_max);
std::string write_direction_csv(const RunConfig& cfg,
                                const std::vector<double>& x_grid,
                                const DirectionSamples& samples);
std::string write_toy_csv(const RunConfig& cfg, const ToyModel& model,
                          int numeric_n);

}  // namespace doubling

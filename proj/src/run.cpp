#include "doubling/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doubling/errors.hpp"
#include "json.hpp"

namespace doubling {

void validate_config(const RunConfig& cfg) {
    if (cfg.degree < 2 || cfg.degree > 80 || cfg.degree % 2 != 0) {
        throw UsageError("config: degree must be even and in [2, 80]");
    }
    if (!(cfg.solver_tol >= 1e-14 && cfg.solver_tol <= 1e-2)) {
        throw UsageError("config: solver_tol must be in [1e-14, 1e-2]");
    }
    if (cfg.n_max < 1 || cfg.n_max > 16) {
        throw UsageError("config: n_max must be in [1, 16]");
    }
    if (cfg.collocation_n < 6 || cfg.collocation_n > 80) {
        throw UsageError("config: collocation_n must be in [6, 80]");
    }
    if (cfg.cascade_depth < 2 || cfg.cascade_depth > 16) {
        throw UsageError("config: cascade_depth must be in [2, 16]");
    }
    if (cfg.output_dir.empty()) {
        throw UsageError("config: output_dir must not be empty");
    }
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
}

namespace {

std::string write_file(const RunConfig& cfg, const std::string& name,
                       const std::string& content) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const fs::path path = fs::path(cfg.output_dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw UsageError("cannot open " + path.string() + " for writing");
    }
    out << content;
    out.close();
    if (!out) {
        throw UsageError("failed writing " + path.string());
    }
    return path.string();
}

bool cone_spot_check(const FiniteRankOperator& A, std::uint64_t seed) {
    // Random nonnegative nondecreasing vectors must stay in the cone under A.
    std::mt19937_64 rng(seed);
    const double denom = 18446744073709551616.0;  // 2^64
    for (int trial = 0; trial < 32; ++trial) {
        std::vector<double> v(A.dim());
        double acc = 1e-3;  // keep strictly positive mass at the bottom
        for (double& e : v) {
            acc += static_cast<double>(rng()) / denom;
            e = acc;
        }
        if (!in_cone(A.apply(v), 1e-11)) {
            return false;
        }
    }
    return true;
}

nlohmann::json trace_to_json(const ProgramTrace& trace) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& rec : trace.records) {
        if (rec.failed) {
            table.push_back({{"n", rec.n}, {"failed", true}, {"error", rec.error}});
            continue;
        }
        table.push_back({{"n", rec.n},
                         {"lambda", rec.lambda},
                         {"lambda_ratio", rec.lambda_ratio},
                         {"lambda_applied", rec.lambda_applied},
                         {"iterations", rec.iterations},
                         {"residual", rec.residual},
                         {"shift", rec.shift}});
    }
    return table;
}

}  // namespace

RunReport run_all(const RunConfig& cfg) {
    validate_config(cfg);
    RunReport report;
    report.config = cfg;

    auto fp = std::make_shared<const RenormFixedPoint>(
        solve_fixed_point(cfg.degree, cfg.solver_tol));
    report.alpha = fp->alpha();
    report.solver_residual = fp->residual();

    const SigmaSystem s = SigmaSystem::build(fp);
    report.trace = run_program(s, cfg.n_max, 1e-12);
    validate_trace(report.trace, s.alpha());
    report.delta_program = report.trace.lambda_extrapolated;

    const SpectrumResult spec = collocation_spectrum(s, cfg.collocation_n);
    if (std::fabs(spec.leading.imag()) >
        1e-8 * std::max(1.0, std::fabs(spec.leading.real()))) {
        throw InvariantViolation("run_all: leading eigenvalue is not real");
    }
    report.delta_collocation = spec.leading.real();

    const CascadeOracleResult cascade = cascade_oracle(cfg.cascade_depth);
    report.delta_cascade = cascade.delta_estimates.back();
    report.alpha_cascade = cascade.alpha_estimates.back();

    const int pressure_depth = std::min(cfg.n_max, 12);
    const double a = s.alpha();
    for (int n = 1; n <= pressure_depth; ++n) {
        const double ratio = pressure_sum(s, n) / std::pow(a * a + a, n);
        report.max_pressure_slack = std::max(report.max_pressure_slack, ratio);
    }

    report.attractor_violation = verify_attractor(s, 4096).max_violation;

    const LevelPartition part = refine_partition(s, std::min(cfg.n_max, 8));
    report.cone_spot_check =
        cone_spot_check(assemble_operator(s, part), cfg.seed);
    return report;
}

std::string write_fixed_point_json(const RunConfig& cfg,
                                   const RenormFixedPoint& fp) {
    return write_file(cfg, "g.json", fixed_point_to_json(fp));
}

std::string write_delta_table_csv(const RunConfig& cfg,
                                  const ProgramTrace& trace) {
    std::ostringstream out;
    out << "n,lambda,lambda_ratio,lambda_applied,iterations,residual,shift\n";
    for (const auto& rec : trace.records) {
        if (rec.failed) continue;
        out << rec.n << ',' << format_double(rec.lambda) << ','
            << format_double(rec.lambda_ratio) << ','
            << format_double(rec.lambda_applied) << ',' << rec.iterations << ','
            << format_double(rec.residual) << ',' << format_double(rec.shift)
            << '\n';
    }
    return write_file(cfg, "delta_table.csv", out.str());
}

std::string write_report_json(const RunConfig& cfg, const RunReport& report) {
    nlohmann::json doc;
    doc["schema_version"] = "1.0";
    doc["config"] = {{"degree", report.config.degree},
                     {"solver_tol", report.config.solver_tol},
                     {"n_max", report.config.n_max},
                     {"collocation_n", report.config.collocation_n},
                     {"cascade_depth", report.config.cascade_depth},
                     {"emit_eigenvectors", report.config.emit_eigenvectors},
                     {"seed", report.config.seed}};
    doc["alpha"] = report.alpha;
    doc["solver_residual"] = report.solver_residual;
    doc["lambda_table"] = trace_to_json(report.trace);
    doc["lambda_extrapolated"] = report.trace.lambda_extrapolated;
    doc["delta_program"] = report.delta_program;
    doc["delta_collocation"] = report.delta_collocation;
    doc["delta_cascade"] = report.delta_cascade;
    doc["alpha_cascade"] = report.alpha_cascade;
    doc["cross_checks"] = {
        {"program_vs_collocation",
         std::fabs(report.delta_program - report.delta_collocation)},
        {"program_vs_cascade",
         std::fabs(report.delta_program - report.delta_cascade)},
        {"collocation_vs_cascade",
         std::fabs(report.delta_collocation - report.delta_cascade)}};
    doc["max_pressure_slack"] = report.max_pressure_slack;
    doc["attractor_violation"] = report.attractor_violation;
    doc["cone_spot_check"] = report.cone_spot_check;
    if (report.config.emit_eigenvectors) {
        doc["direction"] = report.trace.direction;
    }
    return write_file(cfg, "report.json", doc.dump(2) + "\n");
}

std::string write_spectrum_json(const RunConfig& cfg,
                                const SpectrumResult& spec) {
    nlohmann::json doc;
    doc["schema_version"] = "1.0";
    doc["n"] = spec.n;
    doc["converged"] = spec.converged;
    doc["leading"] = {{"re", spec.leading.real()}, {"im", spec.leading.imag()}};
    nlohmann::json values = nlohmann::json::array();
    for (const auto& ev : spec.eigenvalues) {
        values.push_back({{"re", ev.real()}, {"im", ev.imag()}});
    }
    doc["eigenvalues"] = values;
    return write_file(cfg, "spectrum.json", doc.dump(2) + "\n");
}

std::string write_spectrum_sweep_csv(const RunConfig& cfg,
                                     const std::vector<SpectrumResult>& sweep) {
    std::ostringstream out;
    out << "n,leading_re,leading_im,converged\n";
    for (const auto& spec : sweep) {
        out << spec.n << ',' << format_double(spec.leading.real()) << ','
            << format_double(spec.leading.imag()) << ','
            << (spec.converged ? 1 : 0) << '\n';
    }
    return write_file(cfg, "spectrum_sweep.csv", out.str());
}

std::string write_pressure_csv(const RunConfig& cfg, const SigmaSystem& s,
                               int n_max) {
    if (n_max < 1 || n_max > 14) {
        throw UsageError("pressure table: n_max must be in [1, 14]");
    }
    const double a = s.alpha();
    std::ostringstream out;
    out << "n,sum,bound,ratio,estimate\n";
    for (int n = 1; n <= n_max; ++n) {
        const double sum = pressure_sum(s, n);
        const double bound = std::pow(a * a + a, n);
        out << n << ',' << format_double(sum) << ',' << format_double(bound)
            << ',' << format_double(sum / bound) << ','
            << format_double(std::log(sum) / n) << '\n';
    }
    return write_file(cfg, "pressure.csv", out.str());
}

std::string write_direction_csv(const RunConfig& cfg,
                                const std::vector<double>& x_grid,
                                const DirectionSamples& samples) {
    if (x_grid.size() != samples.values.size() ||
        x_grid.size() != samples.gap_flags.size()) {
        throw UsageError("direction table: ragged inputs");
    }
    std::ostringstream out;
    out << "x,value,gap\n";
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        out << format_double(x_grid[i]) << ',' << format_double(samples.values[i])
            << ',' << (samples.gap_flags[i] ? 1 : 0) << '\n';
    }
    return write_file(cfg, "direction.csv", out.str());
}

std::string write_toy_csv(const RunConfig& cfg, const ToyModel& model,
                          int numeric_n) {
    auto exact = toy_spectrum_exact(model, numeric_n);
    std::sort(exact.begin(), exact.end(),
              [](const std::complex<double>& x, const std::complex<double>& y) {
                  if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
                  if (x.real() != y.real()) return x.real() > y.real();
                  return x.imag() > y.imag();
              });
    const auto numeric = toy_spectrum_numeric(model, numeric_n);
    std::ostringstream out;
    out << "rank,exact_re,exact_im,numeric_re,numeric_im,abs_err\n";
    for (std::size_t k = 0; k < exact.size(); ++k) {
        out << k << ',' << format_double(exact[k].real()) << ','
            << format_double(exact[k].imag()) << ','
            << format_double(numeric[k].real()) << ','
            << format_double(numeric[k].imag()) << ','
            << format_double(std::abs(exact[k] - numeric[k])) << '\n';
    }
    return write_file(cfg, "toy.csv", out.str());
}

}  // namespace doubling

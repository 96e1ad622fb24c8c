// Command-line driver for the period-doubling expanding-direction pipeline.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <memory>
#include <vector>

#include "CLI11.hpp"
#include "doubling/errors.hpp"
#include "doubling/run.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

doubling::SigmaSystem make_system(const doubling::RunConfig& cfg) {
    auto fp = std::make_shared<const doubling::RenormFixedPoint>(
        doubling::solve_fixed_point(cfg.degree, cfg.solver_tol));
    return doubling::SigmaSystem::build(std::move(fp));
}

void add_solver_options(CLI::App* cmd, doubling::RunConfig& cfg) {
    cmd->add_option("--degree", cfg.degree, "Even truncation degree of g")
        ->envname("DOUBLING_DEGREE");
    cmd->add_option("--solver-tol", cfg.solver_tol,
                    "Sup-norm residual target for the solve")
        ->envname("DOUBLING_SOLVER_TOL");
    cmd->add_option("--output-dir", cfg.output_dir, "Artifact directory")
        ->envname("DOUBLING_OUTPUT_DIR");
}

int run_solve_g(const doubling::RunConfig& cfg) {
    doubling::validate_config(cfg);
    const auto t0 = Clock::now();
    const auto fp = doubling::solve_fixed_point(cfg.degree, cfg.solver_tol);
    const auto path = doubling::write_fixed_point_json(cfg, fp);
    std::printf("alpha     %.15f\n", fp.alpha());
    std::printf("residual  %.3e\n", fp.residual());
    std::printf("wrote %s\n", path.c_str());
    std::printf("[time] solve-g %.2fs\n", seconds_since(t0));
    return 0;
}

int run_delta(const doubling::RunConfig& cfg) {
    const auto t0 = Clock::now();
    const doubling::RunReport report = doubling::run_all(cfg);
    const auto csv = doubling::write_delta_table_csv(cfg, report.trace);
    const auto json = doubling::write_report_json(cfg, report);
    std::printf("alpha              %.15f\n", report.alpha);
    std::printf("delta (program)    %.12f\n", report.delta_program);
    std::printf("delta (spectrum)   %.12f\n", report.delta_collocation);
    std::printf("delta (cascade)    %.12f\n", report.delta_cascade);
    std::printf("wrote %s\nwrote %s\n", csv.c_str(), json.c_str());
    std::printf("[time] delta %.2fs\n", seconds_since(t0));
    return 0;
}

int run_spectrum(const doubling::RunConfig& cfg) {
    doubling::validate_config(cfg);
    const auto t0 = Clock::now();
    const auto s = make_system(cfg);
    std::vector<doubling::SpectrumResult> sweep;
    for (int n = 10; n <= cfg.collocation_n; n += 5) {
        sweep.push_back(doubling::collocation_spectrum(s, n));
    }
    if (sweep.empty() || sweep.back().n != cfg.collocation_n) {
        sweep.push_back(doubling::collocation_spectrum(s, cfg.collocation_n));
    }
    const auto json = doubling::write_spectrum_json(cfg, sweep.back());
    const auto csv = doubling::write_spectrum_sweep_csv(cfg, sweep);
    std::printf("leading eigenvalue %.12f (converged: %s)\n",
                sweep.back().leading.real(),
                sweep.back().converged ? "yes" : "no");
    std::printf("wrote %s\nwrote %s\n", json.c_str(), csv.c_str());
    std::printf("[time] spectrum %.2fs\n", seconds_since(t0));
    return 0;
}

int run_pressure(const doubling::RunConfig& cfg, int depth) {
    doubling::validate_config(cfg);
    const auto t0 = Clock::now();
    const auto s = make_system(cfg);
    const auto csv = doubling::write_pressure_csv(cfg, s, depth);
    const double cap = s.alpha() * (s.alpha() + 1.0);
    std::printf("all %d pressure sums within (alpha^2+alpha)^n, cap %.6f\n",
                depth, cap);
    std::printf("wrote %s\n", csv.c_str());
    std::printf("[time] pressure %.2fs\n", seconds_since(t0));
    return 0;
}

int run_direction(const doubling::RunConfig& cfg, int level, int grid_size) {
    doubling::validate_config(cfg);
    if (level < 1 || level > 16) {
        throw doubling::UsageError("direction: level must be in [1, 16]");
    }
    if (grid_size < 2 || grid_size > 100000) {
        throw doubling::UsageError("direction: grid size must be in [2, 1e5]");
    }
    const auto t0 = Clock::now();
    const auto s = make_system(cfg);
    const auto trace = doubling::run_program(s, level);
    doubling::validate_trace(trace, s.alpha());
    const auto part = doubling::refine_partition(s, level);
    std::vector<double> grid(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        grid[i] = -1.0 + 2.0 * i / (grid_size - 1);
    }
    const auto samples =
        doubling::pushforward_direction(s, trace.direction, part, grid);
    const auto csv = doubling::write_direction_csv(cfg, grid, samples);
    std::printf("lambda_%d = %.12f\n", level, trace.records.back().lambda);
    std::printf("wrote %s\n", csv.c_str());
    std::printf("[time] direction %.2fs\n", seconds_since(t0));
    return 0;
}

int run_toy(const doubling::RunConfig& cfg, double a, double b, double twist,
            int n) {
    doubling::validate_config(cfg);
    const auto t0 = Clock::now();
    const auto model = doubling::make_toy(a, b, twist);
    const auto csv = doubling::write_toy_csv(cfg, model, n);
    std::printf("leading dominates: %s\n",
                doubling::toy_leading_is_lambda0(model) ? "yes" : "no");
    std::printf("wrote %s\n", csv.c_str());
    std::printf("[time] toy %.2fs\n", seconds_since(t0));
    return 0;
}

int run_everything(const doubling::RunConfig& cfg) {
    const auto t0 = Clock::now();
    const doubling::RunReport report = doubling::run_all(cfg);
    const auto s = make_system(cfg);
    doubling::write_fixed_point_json(cfg, s.fixed_point());
    doubling::write_delta_table_csv(cfg, report.trace);
    doubling::write_report_json(cfg, report);
    doubling::write_spectrum_json(
        cfg, doubling::collocation_spectrum(s, cfg.collocation_n));
    doubling::write_pressure_csv(cfg, s, std::min(cfg.n_max, 12));
    doubling::write_toy_csv(cfg, doubling::make_toy(3.0, 6.0, 0.5), 12);
    const auto part = doubling::refine_partition(s, report.trace.last_level);
    std::vector<double> grid(512);
    for (int i = 0; i < 512; ++i) {
        grid[i] = -1.0 + 2.0 * i / 511.0;
    }
    doubling::write_direction_csv(
        cfg, grid, doubling::pushforward_direction(s, report.trace.direction,
                                                   part, grid));
    std::printf("alpha              %.15f\n", report.alpha);
    std::printf("alpha (cascade)    %.15f\n", report.alpha_cascade);
    std::printf("delta (program)    %.12f\n", report.delta_program);
    std::printf("delta (spectrum)   %.12f\n", report.delta_collocation);
    std::printf("delta (cascade)    %.12f\n", report.delta_cascade);
    std::printf("pressure slack     %.6f\n", report.max_pressure_slack);
    std::printf("attractor check    %.3e\n", report.attractor_violation);
    std::printf("cone spot check    %s\n", report.cone_spot_check ? "ok" : "FAIL");
    std::printf("artifacts in %s\n", cfg.output_dir.c_str());
    std::printf("[time] all %.2fs\n", seconds_since(t0));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expanding direction and rate of the period-doubling operator"};
    app.require_subcommand(1);

    doubling::RunConfig cfg;
    double toy_a = 3.0, toy_b = 6.0, toy_twist = 0.5;
    int toy_n = 12, pressure_depth = 12, dir_level = 10, dir_grid = 512;

    CLI::App* solve_g = app.add_subcommand("solve-g", "Solve the fixed point");
    add_solver_options(solve_g, cfg);

    CLI::App* delta = app.add_subcommand("delta", "Level program + cross checks");
    add_solver_options(delta, cfg);
    delta->add_option("--n-max", cfg.n_max, "Deepest level of the program");
    delta->add_option("--collocation-n", cfg.collocation_n,
                      "Collocation degree for the spectral cross check");
    delta->add_option("--cascade-depth", cfg.cascade_depth,
                      "Depth of the bifurcation-cascade oracle");
    delta->add_flag("--emit-eigenvectors", cfg.emit_eigenvectors,
                    "Embed the final direction vector in the report");
    delta->add_option("--seed", cfg.seed, "Seed for the cone spot check");

    CLI::App* spectrum = app.add_subcommand("spectrum", "Collocation spectrum");
    add_solver_options(spectrum, cfg);
    spectrum->add_option("--collocation-n", cfg.collocation_n,
                         "Collocation degree");

    CLI::App* pressure = app.add_subcommand("pressure", "Periodic-orbit sums");
    add_solver_options(pressure, cfg);
    pressure->add_option("--depth", pressure_depth, "Largest period");

    CLI::App* direction = app.add_subcommand("direction", "Sample the direction");
    add_solver_options(direction, cfg);
    direction->add_option("--level", dir_level, "Partition level");
    direction->add_option("--grid-size", dir_grid, "Sample count on [-1, 1]");

    CLI::App* toy = app.add_subcommand("toy", "Piecewise-affine toy spectrum");
    add_solver_options(toy, cfg);
    toy->add_option("--a", toy_a, "Slope modulus of the twisted branch");
    toy->add_option("--b", toy_b, "Slope of the straight branch");
    toy->add_option("--twist", toy_twist, "Branch twist (1/2 = real model)");
    toy->add_option("--n", toy_n, "Polynomial degree of the cross check");

    CLI::App* all = app.add_subcommand("all", "Full pipeline");
    add_solver_options(all, cfg);
    all->add_option("--n-max", cfg.n_max, "Deepest level of the program");
    all->add_option("--collocation-n", cfg.collocation_n, "Collocation degree");
    all->add_option("--cascade-depth", cfg.cascade_depth, "Oracle depth");
    all->add_flag("--emit-eigenvectors", cfg.emit_eigenvectors,
                  "Embed the final direction vector in the report");
    all->add_option("--seed", cfg.seed, "Seed for the cone spot check");

    try {
        app.parse(argc, argv);
        if (solve_g->parsed()) return run_solve_g(cfg);
        if (delta->parsed()) return run_delta(cfg);
        if (spectrum->parsed()) return run_spectrum(cfg);
        if (pressure->parsed()) return run_pressure(cfg, pressure_depth);
        if (direction->parsed()) return run_direction(cfg, dir_level, dir_grid);
        if (toy->parsed()) return run_toy(cfg, toy_a, toy_b, toy_twist, toy_n);
        if (all->parsed()) return run_everything(cfg);
        return 64;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    } catch (const doubling::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 64;
    } catch (const doubling::InvariantViolation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 2;
    }
}

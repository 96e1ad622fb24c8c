#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "doubling/errors.hpp"
#include "doubling/run.hpp"

using namespace doubling;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t line_count(const std::string& text) {
    std::size_t count = 0;
    for (char c : text) {
        if (c == '\n') ++count;
    }
    return count;
}

RunConfig small_config(const std::string& dir) {
    RunConfig cfg;
    cfg.degree = 24;
    cfg.solver_tol = 1e-10;
    cfg.n_max = 5;
    cfg.collocation_n = 20;
    cfg.cascade_depth = 5;
    cfg.output_dir = dir;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    RunConfig cfg;
    CHECK_NOTHROW(validate_config(cfg));
    auto expect_bad = [](RunConfig c) {
        CHECK_THROWS_AS(validate_config(c), UsageError);
    };
    { auto c = cfg; c.degree = 7; expect_bad(c); }
    { auto c = cfg; c.degree = 82; expect_bad(c); }
    { auto c = cfg; c.solver_tol = 1e-15; expect_bad(c); }
    { auto c = cfg; c.solver_tol = 0.1; expect_bad(c); }
    { auto c = cfg; c.n_max = 0; expect_bad(c); }
    { auto c = cfg; c.n_max = 17; expect_bad(c); }
    { auto c = cfg; c.collocation_n = 5; expect_bad(c); }
    { auto c = cfg; c.collocation_n = 81; expect_bad(c); }
    { auto c = cfg; c.cascade_depth = 1; expect_bad(c); }
    { auto c = cfg; c.cascade_depth = 17; expect_bad(c); }
    { auto c = cfg; c.output_dir.clear(); expect_bad(c); }
}

TEST_CASE("decimal formatting round trips bit for bit") {
    for (double x : {0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, 2.5029078750958928,
                     4.669201609102990, 1e-300, -3.5e22}) {
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("small end-to-end run lands on the universal numbers") {
    const std::string dir = "artifact_scratch/small_run";
    fs::remove_all("artifact_scratch/small_run");
    const RunConfig cfg = small_config(dir);
    const RunReport report = run_all(cfg);

    CHECK(std::fabs(report.alpha - 2.5029078750958928) < 1e-6);
    CHECK(report.solver_residual <= cfg.solver_tol);
    REQUIRE(report.trace.records.size() == 5);
    for (const auto& rec : report.trace.records) CHECK_FALSE(rec.failed);
    CHECK(std::fabs(report.delta_program - 4.669201609102990) < 0.05);
    CHECK(std::fabs(report.delta_collocation - 4.669201609102990) < 1e-2);
    CHECK(std::fabs(report.delta_cascade - 4.669201609102990) < 0.05);
    CHECK(std::fabs(report.alpha_cascade - report.alpha) < 1e-2);
    CHECK(report.max_pressure_slack > 0.99);
    CHECK(report.max_pressure_slack <= 1.0 + 1e-8);
    CHECK(report.attractor_violation <= 1e-9);
    CHECK(report.cone_spot_check);
}

TEST_CASE("artifacts depend only on the inputs, not the destination") {
    fs::remove_all("artifact_scratch/det_a");
    fs::remove_all("artifact_scratch/det_b");
    const RunConfig cfg_a = small_config("artifact_scratch/det_a");
    const RunConfig cfg_b = small_config("artifact_scratch/det_b");

    const RenormFixedPoint fp_a = solve_fixed_point(cfg_a.degree, cfg_a.solver_tol);
    const RenormFixedPoint fp_b = solve_fixed_point(cfg_b.degree, cfg_b.solver_tol);
    const RunReport rep_a = run_all(cfg_a);
    const RunReport rep_b = run_all(cfg_b);

    const std::string ga = write_fixed_point_json(cfg_a, fp_a);
    const std::string gb = write_fixed_point_json(cfg_b, fp_b);
    const std::string da = write_delta_table_csv(cfg_a, rep_a.trace);
    const std::string db = write_delta_table_csv(cfg_b, rep_b.trace);
    const std::string ra = write_report_json(cfg_a, rep_a);
    const std::string rb = write_report_json(cfg_b, rep_b);

    CHECK(slurp(ga) == slurp(gb));
    CHECK(slurp(da) == slurp(db));
    CHECK(slurp(ra) == slurp(rb));
    // And the destination paths really are distinct files.
    CHECK(ga != gb);
}

TEST_CASE("fixed-point artifact rereads to the same alpha") {
    fs::remove_all("artifact_scratch/reread");
    RunConfig cfg = small_config("artifact_scratch/reread");
    const RenormFixedPoint fp = solve_fixed_point(cfg.degree, cfg.solver_tol);
    const std::string path = write_fixed_point_json(cfg, fp);
    const RenormFixedPoint back = fixed_point_from_json(slurp(path));
    CHECK(back.alpha() == fp.alpha());
    CHECK(back.g().coefficients() == fp.g().coefficients());
}

TEST_CASE("table writers emit the promised shapes") {
    fs::remove_all("artifact_scratch/tables");
    RunConfig cfg = small_config("artifact_scratch/tables");
    const auto fp = std::make_shared<const RenormFixedPoint>(
        solve_fixed_point(cfg.degree, cfg.solver_tol));
    const SigmaSystem s = SigmaSystem::build(fp);

    const std::string pressure_path = write_pressure_csv(cfg, s, 3);
    const std::string pressure = slurp(pressure_path);
    CHECK(line_count(pressure) == 4);
    CHECK(pressure.rfind("n,sum,bound,ratio,estimate\n", 0) == 0);
    CHECK_THROWS_AS((void)write_pressure_csv(cfg, s, 15), UsageError);

    const auto part = refine_partition(s, 3);
    std::vector<double> v(part.intervals.size() / 2, 1.0);
    std::vector<double> grid;
    for (int i = 0; i <= 32; ++i) grid.push_back(-1.0 + i / 16.0);
    const auto samples = pushforward_direction(s, v, part, grid);
    const std::string dir_path = write_direction_csv(cfg, grid, samples);
    CHECK(line_count(slurp(dir_path)) == 34);
    DirectionSamples ragged = samples;
    ragged.values.pop_back();
    CHECK_THROWS_AS((void)write_direction_csv(cfg, grid, ragged), UsageError);

    const auto spec = collocation_spectrum(s, 12);
    const std::string spec_path = write_spectrum_json(cfg, spec);
    const std::string spec_text = slurp(spec_path);
    CHECK(spec_text.find("\"schema_version\": \"1.0\"") != std::string::npos);
    CHECK(spec_text.find("\"converged\": false") != std::string::npos);
    const std::string sweep_path = write_spectrum_sweep_csv(cfg, {spec});
    CHECK(line_count(slurp(sweep_path)) == 2);

    const std::string toy_path = write_toy_csv(cfg, make_toy(3.0, 6.0, 0.5), 12);
    const std::string toy = slurp(toy_path);
    CHECK(line_count(toy) == 14);
    // Last column is the exact-vs-numeric error; every row stays tiny.
    std::istringstream lines(toy);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        const auto pos = line.rfind(',');
        REQUIRE(pos != std::string::npos);
        CHECK(std::stod(line.substr(pos + 1)) < 1e-10);
    }
}

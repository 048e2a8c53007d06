#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "orbitlift/error.hpp"
#include "orbitlift/pipeline.hpp"

namespace fs = std::filesystem;
using namespace orbitlift;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<double> tol_zero;
  std::optional<double> tol_deriv;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "Configuration JSON")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Seed recorded in reports");
    app->add_option("--jobs", jobs, "Worker threads for the lift")->check(CLI::PositiveNumber);
    app->add_option("--tol-zero", tol_zero, "Relative zero threshold")->check(CLI::PositiveNumber);
    app->add_option("--tol-deriv", tol_deriv, "Derivative matching tolerance")->check(CLI::PositiveNumber);
  }

  io::Config load() const {
    io::Config cfg = config.empty() ? io::Config{} : io::read_config(config);
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (tol_zero) cfg.tol_zero = *tol_zero;
    if (tol_deriv) cfg.tol_deriv = *tol_deriv;
    return cfg;
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("orbitlift");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ORBITLIFT_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Lift sampled orbit-space curves to the representation space"};
  app.require_subcommand(1);

  Common lift_opts, analyze_opts, verify_opts;
  std::string curve_path, lift_out, report_out, events_out, oracle_path;
  auto* lift = app.add_subcommand("lift", "Lift a curve and verify the result");
  lift->add_option("curve", curve_path, "Curve CSV (t,y1..yn)")->required();
  lift->add_option("-o,--output", lift_out, "Lift CSV (t,v1..vdim)")->required();
  lift->add_option("--report", report_out, "Report JSON (stdout if omitted)");
  lift->add_option("--events", events_out, "Singular events CSV");
  lift->add_option("--fiber-oracle", oracle_path, "Fiber representatives CSV (t,v1..vdim)");
  lift_opts.attach(lift);

  std::string analyze_out;
  auto* analyze = app.add_subcommand("analyze", "Flatness orders at detected zeros");
  analyze->add_option("curve", curve_path, "Curve CSV")->required();
  analyze->add_option("-o,--output", analyze_out, "Report JSON (stdout if omitted)");
  analyze_opts.attach(analyze);

  std::string spec_path, out_dir = ".";
  std::optional<std::uint64_t> synth_seed;
  auto* synth = app.add_subcommand("synth", "Synthesize curve, scrambled and truth CSVs");
  synth->add_option("spec", spec_path, "Synthesis spec JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--out-dir", out_dir, "Output directory");
  synth->add_option("--seed", synth_seed, "Override the scramble seed");

  std::string verify_lift_path, verify_out;
  auto* verify = app.add_subcommand("verify", "Verify a lift against a curve");
  verify->add_option("curve", curve_path, "Curve CSV")->required();
  verify->add_option("lift", verify_lift_path, "Lift CSV")->required();
  verify->add_option("-o,--output", verify_out, "Report JSON (stdout if omitted)");
  verify_opts.attach(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*lift) {
      const auto cfg = lift_opts.load();
      const auto rep = io::group_from_json(cfg.group);
      const auto map = io::load_map(cfg, rep.dim());
      const auto curve = io::read_curve(curve_path, map);
      std::optional<Matrix> oracle;
      std::string oracle_file = oracle_path;
      if (oracle_file.empty() && cfg.fiber_oracle) oracle_file = (cfg.base_dir / *cfg.fiber_oracle).string();
      if (!oracle_file.empty()) {
        const auto table = io::read_lift(oracle_file);
        if (table.grid != curve.grid) throw Error(ErrorKind::ParseError, "fiber oracle grid differs from curve grid");
        oracle = table.points;
      }
      spdlog::info("lifting {} samples, group order {}", curve.samples(), rep.order());
      const auto run = run_lift(rep, map, curve, oracle, cfg);
      io::write_lift(lift_out, run.lift);
      emit(report_out, io::dump(run.report_json));
      if (!events_out.empty()) emit(events_out, events_csv(run.lift));
      spdlog::info("{} events, pass={}", run.lift.annotations.size(), run.report.pass);
      return run.exit_code;
    }
    if (*analyze) {
      const auto cfg = analyze_opts.load();
      const auto rep = io::group_from_json(cfg.group);
      const auto map = io::load_map(cfg, rep.dim());
      const auto curve = io::read_curve(curve_path, map);
      emit(analyze_out, io::dump(run_analyze(curve, cfg)));
      return 0;
    }
    if (*synth) {
      auto doc = io::synth_from_json(io::read_json(spec_path));
      if (synth_seed) doc.spec.scramble_seed = *synth_seed;
      const auto run = run_synth(doc);
      fs::create_directories(out_dir);
      io::write_curve(fs::path(out_dir) / "curve.csv", run.result.curve);
      io::write_table(fs::path(out_dir) / "scrambled.csv", run.result.curve.grid, run.result.scrambled, 'v');
      io::write_lift(fs::path(out_dir) / "truth.csv", run.result.truth);
      return 0;
    }
    if (*verify) {
      const auto cfg = verify_opts.load();
      const auto rep = io::group_from_json(cfg.group);
      const auto map = io::load_map(cfg, rep.dim());
      const auto curve = io::read_curve(curve_path, map);
      const auto lift_in = io::read_lift(verify_lift_path);
      const auto report = run_verify(rep, map, curve, lift_in, cfg);
      emit(verify_out, io::dump(io::to_json(report)));
      return report.pass ? 0 : 1;
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 1;
}

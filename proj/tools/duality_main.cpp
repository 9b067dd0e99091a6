#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "duality/coplanar.hpp"
#include "duality/distinguishability.hpp"
#include "duality/io.hpp"
#include "duality/measures.hpp"
#include "duality/properties.hpp"
#include "duality/qcore.hpp"
#include "duality/version.hpp"

namespace {

namespace io = duality::io;

std::vector<std::string> argv_vector(int argc, char** argv) {
  return std::vector<std::string>(argv, argv + argc);
}

int thread_count_from_env() {
  const char* raw = std::getenv("DUALITY_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 0 || v > 1024) {
    std::cerr << "warning: ignoring invalid DUALITY_THREADS='" << raw << "'\n";
    return 0;
  }
  return static_cast<int>(v);
}

struct SweepArgs {
  std::string min_expr = "0";
  std::string max_expr = "pi";
  int steps = 257;
  std::string csv_path;
  std::string svg_path;
  std::string manifest_path;
  bool validate = false;
  std::uint64_t seed = 0;
};

int run_sweep(const SweepArgs& args, std::vector<std::string> command_line) {
  const double theta_min = io::parse_angle(args.min_expr);
  const double theta_max = io::parse_angle(args.max_expr);

  duality::coplanar::SweepOptions options;
  options.validate_numeric = args.validate;
  options.threads = thread_count_from_env();

  const std::vector<duality::coplanar::SweepRow> rows =
      duality::coplanar::sweep(theta_min, theta_max, args.steps, options);

  io::RunManifest manifest;
  manifest.tool_version = duality::version;
  manifest.command_line = std::move(command_line);
  manifest.seed = args.seed;
  manifest.timestamp_utc = io::utc_timestamp_now();
  // The inputs that determine the output bytes, digested for reproducibility
  // checks: the resolved angle range, step count, and validation switch.
  manifest.config_digest = io::digest_string(
      "sweep:min=" + io::format_value(theta_min) + ":max=" + io::format_value(theta_max) +
      ":steps=" + std::to_string(args.steps) + ":validate=" + (args.validate ? "1" : "0"));

  const std::string csv = io::render_sweep_csv(rows);
  io::write_text_file(args.csv_path, csv);
  manifest.outputs.push_back({args.csv_path, io::digest_string(csv)});
  std::cout << "wrote " << args.csv_path << " (" << rows.size() << " rows)\n";

  if (!args.svg_path.empty()) {
    const std::string svg = io::render_sweep_svg(rows);
    io::write_text_file(args.svg_path, svg);
    manifest.outputs.push_back({args.svg_path, io::digest_string(svg)});
    std::cout << "wrote " << args.svg_path << "\n";
  }

  std::string manifest_path = args.manifest_path;
  if (manifest_path.empty()) {
    manifest_path =
        std::filesystem::path(args.csv_path).replace_extension(".manifest.json").string();
  }
  io::write_text_file(manifest_path, io::render_manifest_json(manifest));
  std::cout << "wrote " << manifest_path << "\n";
  return 0;
}

int run_eval(const std::string& config_path) {
  const io::ParsedConfig parsed = io::load_config_file(config_path);
  const duality::BeamDetectorConfig& cfg = parsed.config;

  const double v = duality::visibility(cfg);
  const double p = duality::predictability(cfg.populations());
  std::cout << "n=" << cfg.beam_count() << "\n";
  std::cout << "d=" << cfg.detector_dim() << "\n";
  std::cout << "V=" << io::format_value(v) << "\n";
  std::cout << "P=" << io::format_value(p) << "\n";
  std::cout << "P2V2=" << io::format_value(p * p + v * v) << "\n";

  if (cfg.detector_dim() == 2) {
    const duality::OptimizationResult opt = duality::optimize_refined(cfg);
    const duality::DualityReport report =
        duality::make_duality_report(v, p, opt.best_knowledge);
    std::cout << "D=" << io::format_value(opt.best_knowledge) << "\n";
    std::cout << "beta=" << io::format_value(opt.best_observable.beta) << "\n";
    std::cout << "gamma=" << io::format_value(opt.best_observable.gamma) << "\n";
    std::cout << "D2V2=" << io::format_value(report.sum_sq.value()) << "\n";
  }

  if (parsed.measurement.has_value()) {
    const duality::KnowledgeReport rep =
        duality::which_way_knowledge(cfg, *parsed.measurement);
    std::cout << "K=" << io::format_value(rep.total) << "\n";
  }
  return 0;
}

/// Recognizes the symmetric three-beam layout so the optimizer result can be
/// checked against its closed form: equal populations and Bloch vectors
/// (0,0,1), (s,0,c), (-s,0,c) in some order, within `tol` componentwise.
std::optional<double> coplanar_theta_of(const duality::BeamDetectorConfig& cfg, double tol) {
  if (cfg.beam_count() != 3 || cfg.detector_dim() != 2) return std::nullopt;
  for (std::size_t i = 0; i < 3; ++i) {
    if (std::abs(cfg.populations()[i] - 1.0 / 3.0) > tol) return std::nullopt;
  }
  std::vector<duality::BlochVector> n;
  n.reserve(3);
  for (const duality::DetectorState& s : cfg.detector_states()) {
    n.push_back(duality::state_to_bloch(s));
  }
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const duality::BlochVector& n0 = n[axis];
    if (std::abs(n0.nx) > tol || std::abs(n0.ny) > tol || std::abs(n0.nz - 1.0) > tol) continue;
    const duality::BlochVector& a = n[(axis + 1) % 3];
    const duality::BlochVector& b = n[(axis + 2) % 3];
    for (const auto& [plus, minus] : {std::pair{a, b}, std::pair{b, a}}) {
      const double theta = std::atan2(plus.nx, plus.nz);
      if (theta < -tol || theta > std::numbers::pi + tol) continue;
      const double s = std::sin(theta);
      const double c = std::cos(theta);
      if (std::abs(plus.nx - s) <= tol && std::abs(plus.ny) <= tol &&
          std::abs(plus.nz - c) <= tol && std::abs(minus.nx + s) <= tol &&
          std::abs(minus.ny) <= tol && std::abs(minus.nz - c) <= tol) {
        return std::clamp(theta, 0.0, std::numbers::pi);
      }
    }
  }
  return std::nullopt;
}

int run_optimize(const std::string& config_path, double tolerance) {
  const io::ParsedConfig parsed = io::load_config_file(config_path);
  const duality::BeamDetectorConfig& cfg = parsed.config;
  if (cfg.detector_dim() != 2) {
    std::cerr << "error: optimize requires 2-dimensional detector states (got d="
              << cfg.detector_dim() << ")\n";
    return 2;
  }

  const duality::OptimizationResult opt = duality::optimize_refined(cfg, tolerance);
  std::cout << "best_K=" << io::format_value(opt.best_knowledge) << "\n";
  std::cout << "beta=" << io::format_value(opt.best_observable.beta) << "\n";
  std::cout << "gamma=" << io::format_value(opt.best_observable.gamma) << "\n";
  std::cout << "tie_set_size=" << opt.tie_set.size() << "\n";
  std::cout << "method=refined\n";
  std::cout << "converged=" << (opt.converged ? "true" : "false") << "\n";
  std::cout << "cycles=" << opt.cycles << "\n";

  if (const std::optional<double> theta = coplanar_theta_of(cfg, 1e-9)) {
    const duality::coplanar::ClosedDistinguishability closed =
        duality::coplanar::closed_distinguishability(*theta);
    std::cout << "coplanar_theta=" << io::format_value(*theta) << "\n";
    std::cout << "closed_D=" << io::format_value(closed.value) << "\n";
    std::cout << "branch=" << io::branch_name(closed.branch) << "\n";
    std::cout << "branch_match="
              << (std::abs(opt.best_knowledge - closed.value) <= 1e-8 ? "true" : "false")
              << "\n";
  }
  return 0;
}

int run_check(std::uint64_t seed, int trials) {
  const duality::props::SuiteReport report = duality::props::run_property_suite(seed, trials);
  std::cout << "suite=randomized-invariants\n";
  std::cout << "seed=" << report.seed << "\n";
  std::cout << "trials=" << report.trials << "\n";
  for (const duality::props::PropertyResult& p : report.properties) {
    std::cout << "property=" << p.name << " trials=" << p.trials << " failures=" << p.failures
              << "\n";
    for (const std::string& detail : p.failure_details) {
      std::cout << "  failing_input=" << detail << "\n";
    }
  }
  std::cout << "result=" << (report.all_passed() ? "pass" : "fail") << "\n";
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wave-particle duality measures for multibeam interferometers"};
  app.set_version_flag("--version", std::string("duality ") + duality::version);
  app.require_subcommand(0, 1);

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Tabulate V, D, and D^2+V^2 for the symmetric three-beam family");
  sweep->add_option("--min", sweep_args.min_expr,
                    "Smallest tilt angle (number, or expressions like pi/2, 2pi/3)");
  sweep->add_option("--max", sweep_args.max_expr, "Largest tilt angle");
  sweep->add_option("--steps", sweep_args.steps, "Number of sample points (>= 2)");
  sweep->add_option("--csv", sweep_args.csv_path, "Output CSV path")->required();
  sweep->add_option("--svg", sweep_args.svg_path, "Optional output SVG plot path");
  sweep->add_option("--manifest", sweep_args.manifest_path,
                    "Manifest path (default: CSV path with .manifest.json)");
  sweep->add_flag("--validate", sweep_args.validate,
                  "Re-derive each row with the numeric optimizer and fail on disagreement");
  sweep->add_option("--seed", sweep_args.seed, "Seed recorded in the manifest");

  std::string eval_config;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate duality measures for a configuration");
  eval->add_option("--config", eval_config, "Configuration JSON path")->required();

  std::string opt_config;
  double opt_tol = 1e-12;
  CLI::App* optimize =
      app.add_subcommand("optimize", "Find the most informative two-outcome observable");
  optimize->add_option("--config", opt_config, "Configuration JSON path")->required();
  optimize->add_option("--tol", opt_tol, "Convergence tolerance (>= 1e-12)");

  std::uint64_t check_seed = 42;
  int check_trials = 1000;
  CLI::App* check = app.add_subcommand("check", "Run the randomized invariant suite");
  check->add_option("--seed", check_seed, "Base seed for the suite");
  check->add_option("--trials", check_trials, "Trials per property (>= 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help / --version
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sweep->parsed()) return run_sweep(sweep_args, argv_vector(argc, argv));
    if (eval->parsed()) return run_eval(eval_config);
    if (optimize->parsed()) return run_optimize(opt_config, opt_tol);
    if (check->parsed()) return run_check(check_seed, check_trials);
    std::cout << app.help();
    return 0;
  } catch (const io::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

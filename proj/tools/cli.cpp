#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "reram/analysis.hpp"
#include "reram/error.hpp"
#include "reram/fitting.hpp"
#include "reram/io.hpp"
#include "reram/kernels.hpp"
#include "reram/protocols.hpp"
#include "reram/simulation.hpp"
#include "reram/va_emit.hpp"

namespace reram::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Manifest {
  std::string subcommand;
  std::vector<std::string> argv;
  ordered_json config = ordered_json::object();
  ordered_json inputs = ordered_json::object();
  ordered_json outputs = ordered_json::array();
  std::uint64_t seed = 0;
};

class Outputs {
 public:
  explicit Outputs(Manifest& m) : manifest_(m) {}

  void write(const fs::path& path, std::string_view contents) {
    try {
      io::write_file_atomic(path, contents);
    } catch (const Error& e) {
      throw Error(ErrorCode::io, e.what(), "write");
    }
    manifest_.outputs.push_back(path.string());
  }

 private:
  Manifest& manifest_;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::usage:
    case ErrorCode::bad_module_name: return kUsage;
    case ErrorCode::parse: return kSchema;
    case ErrorCode::io: return kNoInput;
    default: return kComputation;
  }
}

std::pair<ModelParams, SmoothingParams> load_params(const std::string& path, Manifest& m) {
  if (path.empty()) {
    m.inputs["params"] = "preset";
    return {preset_params(), SmoothingParams{}};
  }
  m.inputs["params"] = path;
  return io::read_params(io::read_file(path));
}

fs::path sidecar_path(const fs::path& log) {
  auto p = log;
  p += ".meta";
  return p;
}

fs::path manifest_path(const fs::path& out) {
  auto p = out;
  p += ".manifest.json";
  return p;
}

MeasurementLog load_log(const std::string& path, std::optional<ProtocolTag> tag) {
  const auto csv = io::read_file(path);
  const auto side = sidecar_path(path);
  if (fs::exists(side)) {
    const auto meta = io::read_file(side);
    return read_log(csv, std::string_view(meta), tag);
  }
  return read_log(csv, std::nullopt, tag);
}

IntegrationMethod parse_method(const std::string& s) {
  return s == "numeric" ? IntegrationMethod::numeric : IntegrationMethod::closed_form;
}

ordered_json config_json(const io::KeyValueDoc& doc) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : doc.entries()) j[k] = v;
  return j;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"ReRAM switching-rate model toolkit", "reram"};
  app.require_subcommand(1);

  Manifest manifest;
  manifest.argv = args;
  Outputs outputs(manifest);
  std::function<void()> action;

  std::string out_path;
  std::string params_path;
  std::uint64_t seed = 0;
  std::string method = "closed-form";
  double r0 = 13650.0;
  double noise = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output file")->required();
  };
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--params", params_path, "Parameter file (defaults to the shipped preset)");
  };
  auto add_device = [&](CLI::App* sub) {
    sub->add_option("--r0", r0, "Initial resistive state, Ohm")->check(CLI::PositiveNumber);
    sub->add_option("--noise", noise, "Relative read-noise sigma")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "Read-noise RNG seed");
    sub->add_option("--method", method, "Pulse integration")
        ->check(CLI::IsMember({"closed-form", "numeric"}));
  };

  // simulate ---------------------------------------------------------------
  std::string waveform_path;
  auto* simulate = app.add_subcommand("simulate", "Apply a waveform to a virtual device, write its trace");
  add_common(simulate);
  add_params(simulate);
  add_device(simulate);
  simulate->add_option("--waveform", waveform_path, "Waveform CSV (amplitude_V,width_s)")->required();
  simulate->callback([&] {
    action = [&] {
      auto [params, sm] = load_params(params_path, manifest);
      manifest.inputs["waveform"] = waveform_path;
      const auto waveform = read_waveform_csv(io::read_file(waveform_path));
      VirtualDevice dev(params, r0, sm, noise, seed);
      const auto trace = run_waveform(dev, waveform, parse_method(method));
      manifest.config = {{"r0", r0}, {"method", method}};
      outputs.write(out_path, write_trace_csv(trace));
    };
  });

  // sweep ------------------------------------------------------------------
  SweeperConfig sweeper;
  auto* sweep = app.add_subcommand("sweep", "Run the operating-state sweeper protocol");
  add_common(sweep);
  add_params(sweep);
  add_device(sweep);
  sweep->add_option("--pulses", sweeper.pulses_per_train, "Pulses per train (S)");
  sweep->add_option("--t-w", sweeper.pulse_width, "Pulse width, s");
  sweep->add_option("--v-start", sweeper.v_start, "First amplitude, V");
  sweep->add_option("--v-step", sweeper.v_step, "Amplitude step, V");
  sweep->add_option("--v-stop", sweeper.v_stop, "Final amplitude, V");
  sweep->callback([&] {
    action = [&] {
      auto [params, sm] = load_params(params_path, manifest);
      VirtualDevice dev(params, r0, sm, noise, seed);
      const auto log = run_sweeper(dev, sweeper, parse_method(method));
      manifest.config = config_json(config_to_doc(log));
      manifest.config["r0"] = r0;
      manifest.config["noise"] = noise;
      manifest.config["method"] = method;
      outputs.write(out_path, write_log_csv(log));
      outputs.write(sidecar_path(out_path), write_log_sidecar(log));
    };
  });

  // optimize ---------------------------------------------------------------
  OptimizerConfig optimizer;
  std::optional<double> optimizer_r0;
  auto* optimize = app.add_subcommand("optimize", "Run the biasing optimizer protocol");
  add_common(optimize);
  add_params(optimize);
  optimize->add_option("--noise", noise, "Relative read-noise sigma")->check(CLI::NonNegativeNumber);
  optimize->add_option("--seed", seed, "Read-noise RNG seed");
  optimize->add_option("--method", method, "Pulse integration")
      ->check(CLI::IsMember({"closed-form", "numeric"}));
  optimize->add_option("--r0", optimizer_r0, "Initial resistive state, Ohm (default: target)");
  optimize->add_option("--target", optimizer.target, "Target state R_0, Ohm");
  optimize->add_option("--pulses", optimizer.pulses_per_train, "Pulses per train (N)");
  optimize->add_option("--t-w", optimizer.pulse_width, "Pulse width, s");
  optimize->add_option("--eps-opt", optimizer.band, "Tolerance band, fraction of R_0");
  optimize->add_option("--ramp-start", optimizer.ramp_start, "First ramp amplitude, V");
  optimize->add_option("--ramp-step", optimizer.ramp_step, "Ramp increment, V");
  optimize->add_option("--ramp-max", optimizer.ramp_max, "Ramp cap, V");
  optimize->add_option("--max-trains", optimizer.max_trains, "Train budget");
  optimize->add_flag("--two-sided", optimizer.two_sided, "Flip on any out-of-band read");
  optimize->callback([&] {
    action = [&] {
      auto [params, sm] = load_params(params_path, manifest);
      const double start = optimizer_r0.value_or(optimizer.target);
      VirtualDevice dev(params, start, sm, noise, seed);
      const auto log = run_optimizer(dev, optimizer, parse_method(method));
      manifest.config = config_json(config_to_doc(log));
      manifest.config["r0"] = start;
      manifest.config["noise"] = noise;
      manifest.config["method"] = method;
      outputs.write(out_path, write_log_csv(log));
      outputs.write(sidecar_path(out_path), write_log_sidecar(log));
    };
  });

  // analyze ----------------------------------------------------------------
  std::string log_path;
  std::string mode;
  RefinementConfig refinement;
  int window = kDefaultDerivativeWindow;
  std::vector<double> exclude;
  auto* analyze = app.add_subcommand("analyze", "Convert a measurement log into rate points");
  add_common(analyze);
  analyze->add_option("--log", log_path, "Measurement log CSV")->required();
  analyze->add_option("--mode", mode, "Log protocol")->required()->check(CLI::IsMember({"sweeper", "optimizer"}));
  analyze->add_option("--eps-ref", refinement.band, "Refinement band, fraction of center");
  analyze->add_option("--window", window, "Derivative window (odd, >= 5)");
  analyze->add_option("--exclude-voltage", exclude, "Sweeper amplitude to drop (repeatable)");
  analyze->callback([&] {
    action = [&] {
      const auto tag = mode == "sweeper" ? ProtocolTag::sweeper : ProtocolTag::optimizer;
      manifest.inputs["log"] = log_path;
      const auto log = load_log(log_path, tag);
      std::vector<RatePoint> points;
      manifest.config = {{"mode", mode}};
      if (tag == ProtocolTag::sweeper) {
        manifest.config["window"] = window;
        manifest.config["exclude_voltage"] = exclude;
        for (const auto& series : sweeper_timeseries(log)) {
          const bool skip = std::any_of(exclude.begin(), exclude.end(), [&](double x) {
            return std::abs(x - series.voltage) <= 1e-9 * std::max(1.0, std::abs(x));
          });
          if (skip) continue;
          const auto rates = smoothing_derivative(series, window);
          points.insert(points.end(), rates.begin(), rates.end());
        }
      } else {
        manifest.config["eps_ref"] = refinement.band;
        const auto [pos, neg] = refine_optimizer_log(log, refinement);
        manifest.config["RS_0p"] = pos.center;
        manifest.config["RS_0n"] = neg.center;
        std::fprintf(stderr, "reram analyze: positive band center %.6g Ohm (%zu points), negative band center %.6g Ohm (%zu points)\n",
                    pos.center, pos.points.size(), neg.center, neg.points.size());
        points = pos.points;
        points.insert(points.end(), neg.points.begin(), neg.points.end());
      }
      outputs.write(out_path, write_rate_points_csv(points));
    };
  });

  // fit --------------------------------------------------------------------
  std::string sweeper_log_path, optimizer_log_path, report_path;
  ExtractionConfig extraction;
  auto* fit = app.add_subcommand("fit", "Extract model parameters from sweeper and optimizer logs");
  add_common(fit);
  fit->add_option("--sweeper-log", sweeper_log_path, "Sweeper log CSV")->required();
  fit->add_option("--optimizer-log", optimizer_log_path, "Optimizer log CSV")->required();
  fit->add_option("--report", report_path, "Fit report (default: <out>.report)");
  fit->add_option("--eps-ref", extraction.refinement.band, "Refinement band, fraction of center");
  fit->add_option("--window", extraction.window, "Derivative window (odd, >= 5)");
  fit->add_option("--min-rate", extraction.min_rate, "Rate floor for window fits, Ohm/s");
  fit->add_option("--exclude-voltage", extraction.exclude_voltages, "Sweeper amplitude to drop (repeatable)");
  fit->add_option("--v-read", extraction.read_voltage, "Read-out voltage, V");
  fit->add_option("--b-r", extraction.smoothing.resistance_slope, "Resistance sigmoid slope, Ohm");
  fit->add_option("--b-v", extraction.smoothing.voltage_slope, "Voltage sigmoid slope, V");
  fit->add_option("--limexp-threshold", extraction.smoothing.limexp_knee, "limexp knee");
  bool fit_incomplete = false;
  fit->callback([&] {
    action = [&] {
      manifest.inputs["sweeper_log"] = sweeper_log_path;
      manifest.inputs["optimizer_log"] = optimizer_log_path;
      const auto sw = load_log(sweeper_log_path, ProtocolTag::sweeper);
      const auto opt = load_log(optimizer_log_path, ProtocolTag::optimizer);
      manifest.config = {{"eps_ref", extraction.refinement.band},
                         {"window", extraction.window},
                         {"min_rate", extraction.min_rate},
                         {"exclude_voltage", extraction.exclude_voltages},
                         {"V_read", extraction.read_voltage}};
      const auto result = extract_model(sw, opt, extraction);
      const fs::path report = report_path.empty() ? fs::path(out_path + ".report") : fs::path(report_path);
      outputs.write(report, report_to_doc(result, extraction.smoothing).render("parameter extraction report"));
      for (const auto& e : result.report.errors) std::fprintf(stderr, "reram fit: %s\n", e.detail.c_str());
      if (!result.params) {
        fit_incomplete = true;
        return;
      }
      outputs.write(out_path, io::write_params(*result.params, extraction.smoothing));
    };
  });

  // emit-va ----------------------------------------------------------------
  EmitOptions emit;
  auto* emit_va = app.add_subcommand("emit-va", "Write the Verilog-A module for a parameter set");
  add_common(emit_va);
  add_params(emit_va);
  emit_va->add_option("--module-name", emit.module_name, "Module identifier");
  emit_va->add_option("--r-init", emit.initial_resistance, "Initial resistive state, Ohm");
  emit_va->add_option("--precision", emit.precision, "Significant digits of literals [6, 17]");
  emit_va->callback([&] {
    action = [&] {
      auto [params, sm] = load_params(params_path, manifest);
      manifest.config = {{"module_name", emit.module_name},
                         {"r_init", emit.initial_resistance},
                         {"precision", emit.precision}};
      outputs.write(out_path, emit_verilog_a(params, sm, emit));
    };
  });

  // surface ----------------------------------------------------------------
  double r_min = 10e3, r_max = 18e3, v_min = -0.8, v_max = 0.8;
  int r_count = 81, v_count = 81;
  std::string variant = "exact";
  auto* surface = app.add_subcommand("surface", "Export the switching-rate surface on a grid");
  add_common(surface);
  add_params(surface);
  surface->add_option("--r-min", r_min, "Lowest resistance, Ohm");
  surface->add_option("--r-max", r_max, "Highest resistance, Ohm");
  surface->add_option("--r-count", r_count, "Resistance samples (>= 2)");
  surface->add_option("--v-min", v_min, "Lowest voltage, V");
  surface->add_option("--v-max", v_max, "Highest voltage, V");
  surface->add_option("--v-count", v_count, "Voltage samples (>= 2)");
  surface->add_option("--variant", variant, "Model variant")->check(CLI::IsMember({"exact", "smooth"}));
  surface->callback([&] {
    action = [&] {
      if (r_count < 2 || v_count < 2) throw Error(ErrorCode::usage, "grid counts must be >= 2", "surface");
      if (!(r_min > 0.0) || !(r_min < r_max) || !(v_min < v_max))
        throw Error(ErrorCode::usage, "ranges must be increasing with positive resistance", "surface");
      auto [params, sm] = load_params(params_path, manifest);
      manifest.config = {{"r_min", r_min}, {"r_max", r_max}, {"r_count", r_count},
                         {"v_min", v_min}, {"v_max", v_max}, {"v_count", v_count},
                         {"variant", variant}};
      const auto rs = linspace(r_min, r_max, r_count);
      const auto vs = linspace(v_min, v_max, v_count);
      note_bias(std::max(std::abs(v_min), std::abs(v_max)));
      const auto grid = parallel::rate_surface(
          params, sm, rs, vs, variant == "smooth" ? RateVariant::smooth : RateVariant::exact);
      std::vector<RatePoint> rows;
      rows.reserve(grid.size());
      for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) rows.push_back({rs[i], vs[j], grid[i * vs.size() + j]});
      outputs.write(out_path, write_rate_points_csv(rows));
    };
  });

  // replay ---------------------------------------------------------------
  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a run manifest");
  replay->add_option("manifest", replay_path, "Run manifest (*.manifest.json)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (replay->parsed()) {
    std::vector<std::string> recorded;
    try {
      const auto j = nlohmann::json::parse(io::read_file(replay_path));
      recorded = j.at("argv").get<std::vector<std::string>>();
    } catch (const Error& e) {
      std::fprintf(stderr, "reram replay: %s\n", e.what());
      return kNoInput;
    } catch (const nlohmann::json::exception& e) {
      std::fprintf(stderr, "reram replay: malformed manifest: %s\n", e.what());
      return kSchema;
    }
    if (!recorded.empty() && recorded.front() == "replay") {
      std::fprintf(stderr, "reram replay: manifest records another replay\n");
      return kUsage;
    }
    return run_cli(recorded);
  }

  manifest.subcommand = app.get_subcommands().front()->get_name();
  manifest.seed = seed;
  try {
    action();
  } catch (const Error& e) {
    std::fprintf(stderr, "reram %s: %s\n", manifest.subcommand.c_str(), e.what());
    return e.stage() == "write" ? kCannotWrite : exit_code_for(e.code());
  }

  ordered_json j;
  j["subcommand"] = manifest.subcommand;
  j["argv"] = manifest.argv;
  j["seed"] = manifest.seed;
  j["config"] = manifest.config;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;
  try {
    io::write_file_atomic(manifest_path(out_path), j.dump(2) + "\n");
  } catch (const Error& e) {
    std::fprintf(stderr, "reram %s: %s\n", manifest.subcommand.c_str(), e.what());
    return kCannotWrite;
  }
  return fit_incomplete ? kComputation : kOk;
}

}  // namespace reram::cli

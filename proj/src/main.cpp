// perclab: simulation laboratory for bootstrap percolation with
// excitatory/inhibitory vertices on directed Erdos-Renyi graphs.
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "perclab/errors.hpp"
#include "perclab/experiments.hpp"
#include "perclab/io.hpp"
#include "perclab/theory.hpp"

namespace {

using perclab::Error;
using perclab::ErrorKind;
using perclab::ModelParams;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitArgument = 2;
constexpr int kExitRegime = 3;
constexpr int kExitTruncated = 4;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

/** Flat bag of every flag; round-trips losslessly through JSON.
 *
 * Integer-valued flags are parsed as doubles so that scientific notation
 * (1e6) works; fractions are rejected later. n, p, and a0 have no sensible
 * default, so they start as NaN and a post-merge check demands them (after
 * --config had its chance to supply them). */
struct CliConfig {
  double n = kUnset;
  double p = kUnset;
  double k = 2;
  double tau = 0.0;
  double gamma = 1.0;
  double a0 = kUnset;
  std::uint64_t seed = 1;

  std::string engine = "sync";
  std::string delay = "exp";
  std::string sampler = "skip";
  double trials = 1;
  double jobs = 1;
  double time_cap = 50.0;
  double active_cap = -1;
  double round_cap = -1;

  double band = 0.25;
  double delta = 0.05;

  double target = -1;
  double c_min = 1.5;
  double c_max = 50.0;
  double chaos_delta = 0.1;
  double grid = 512;
  bool confirm = false;

  std::string sweep_param;
  std::string sweep_values;

  std::string out_csv;
  std::string out_json;
  std::string dump_realization;
  std::string emit_config;
};

ordered_json config_json(const CliConfig& c) {
  ordered_json j;
  // Never-provided values are omitted (JSON has no NaN); loading such a
  // config leaves the flag unset, so the round-trip stays lossless.
  if (!std::isnan(c.n)) j["n"] = c.n;
  if (!std::isnan(c.p)) j["p"] = c.p;
  j["k"] = c.k;
  j["tau"] = c.tau;
  j["gamma"] = c.gamma;
  if (!std::isnan(c.a0)) j["a0"] = c.a0;
  j["seed"] = c.seed;
  j["engine"] = c.engine;
  j["delay"] = c.delay;
  j["sampler"] = c.sampler;
  j["trials"] = c.trials;
  j["jobs"] = c.jobs;
  j["time_cap"] = c.time_cap;
  j["active_cap"] = c.active_cap;
  j["round_cap"] = c.round_cap;
  j["band"] = c.band;
  j["delta"] = c.delta;
  j["target"] = c.target;
  j["c_min"] = c.c_min;
  j["c_max"] = c.c_max;
  j["chaos_delta"] = c.chaos_delta;
  j["grid"] = c.grid;
  j["confirm"] = c.confirm;
  j["sweep_param"] = c.sweep_param;
  j["sweep_values"] = c.sweep_values;
  j["out_csv"] = c.out_csv;
  j["out_json"] = c.out_json;
  j["dump_realization"] = c.dump_realization;
  return j;
}

/** Maps every option name to its storage so --config can fill gaps.
 *
 * Each subcommand registers its own CLI::Option over the shared storage, so
 * the merge must consult only the invoked subcommand's bindings: the other
 * subcommands' options are always unset and would stomp explicit flags. */
struct OptionBinding {
  CLI::App* owner = nullptr;
  CLI::Option* option = nullptr;
  std::function<void(const ordered_json&)> load;
};

std::int64_t as_integer(const std::string& name, double value) {
  if (!std::isfinite(value) || std::floor(value) != value ||
      std::fabs(value) > 9.007199254740992e15)
    throw std::invalid_argument("--" + name +
                                " must be an integer (got a fraction)");
  return static_cast<std::int64_t>(value);
}

ModelParams params_from(const CliConfig& c) {
  ModelParams p;
  p.n = as_integer("n", c.n);
  p.p = c.p;
  p.k = static_cast<int>(as_integer("k", c.k));
  p.tau = c.tau;
  p.gamma = c.gamma;
  p.a0 = as_integer("a0", c.a0);
  p.seed = c.seed;
  p.validate();
  return p;
}

perclab::experiments::TrialOptions trial_options_from(const CliConfig& c) {
  perclab::experiments::TrialOptions o;
  if (c.engine == "sync") {
    o.engine = perclab::experiments::EngineKind::SYNC;
  } else if (c.engine == "async") {
    o.engine = perclab::experiments::EngineKind::ASYNC;
  } else {
    throw std::invalid_argument("--engine must be sync or async");
  }
  if (c.delay == "exp") {
    o.delay = perclab::DelayLaw::exponential();
  } else if (c.delay == "unit") {
    o.delay = perclab::DelayLaw::unit();
  } else {
    throw std::invalid_argument("--delay must be exp or unit");
  }
  if (c.sampler == "skip") {
    o.sampler = perclab::SamplerMode::GEOMETRIC_SKIP;
  } else if (c.sampler == "naive") {
    o.sampler = perclab::SamplerMode::NAIVE_BERNOULLI;
  } else {
    throw std::invalid_argument("--sampler must be skip or naive");
  }
  o.time_cap = c.time_cap;
  o.active_cap = as_integer("active-cap", c.active_cap);
  o.round_cap = as_integer("round-cap", c.round_cap);
  o.jobs = static_cast<int>(as_integer("jobs", c.jobs));
  return o;
}

/** Fails fast (before any simulation) when an output path is unwritable. */
void preflight_writable(const std::string& path) {
  if (path.empty()) return;
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path probe = target.string() + ".probe";
  std::ofstream out(probe, std::ios::binary);
  if (!out) throw std::invalid_argument("output path is not writable: " + path);
  out.close();
  fs::remove(probe);
}

void emit_outputs(const CliConfig& cfg, const ordered_json& summary,
                  const std::vector<perclab::TrajectoryRecord>* records) {
  if (!cfg.out_csv.empty() && records != nullptr)
    perclab::io::atomic_write_text(cfg.out_csv,
                                   perclab::io::trajectory_csv(*records));
  if (!cfg.out_json.empty())
    perclab::io::atomic_write_text(cfg.out_json, summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
}

int cmd_theory(const CliConfig& cfg) {
  const ModelParams params = params_from(cfg);
  const perclab::theory::TheoryReport report =
      perclab::theory::theory_report(params);
  const ordered_json j = perclab::io::theory_report_json(report);
  if (!cfg.out_json.empty())
    perclab::io::atomic_write_text(cfg.out_json, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_sim(const CliConfig& cfg) {
  const ModelParams params = params_from(cfg);
  perclab::experiments::TrialOptions options = trial_options_from(cfg);
  options.keep_records = !cfg.out_csv.empty();
  const std::int64_t trials = as_integer("trials", cfg.trials);
  preflight_writable(cfg.out_csv);
  preflight_writable(cfg.out_json);
  preflight_writable(cfg.dump_realization);

  if (!cfg.dump_realization.empty()) {
    perclab::MaterializedRealization graph = perclab::materialize_graph(
        params, options.delay, options.sampler);
    perclab::dump_realization_gz(graph, params, cfg.dump_realization);
  }

  perclab::experiments::TrialSummary summary =
      perclab::experiments::run_trials(params, trials, options);
  emit_outputs(cfg, perclab::io::trial_summary_json(summary),
               options.keep_records ? &summary.records : nullptr);
  return summary.truncated_trials > 0 ? kExitTruncated : kExitOk;
}

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string::npos) comma = csv.size();
    const std::string token = csv.substr(start, comma - start);
    if (!token.empty()) {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size())
        throw std::invalid_argument("bad numeric value: " + token);
      values.push_back(v);
    }
    start = comma + 1;
  }
  if (values.empty())
    throw std::invalid_argument("--values must list at least one number");
  return values;
}

int cmd_sweep(const CliConfig& cfg_in) {
  CliConfig cfg = cfg_in;
  // The swept field is replaced at every grid point, so it may legitimately
  // be omitted from the command line; give it a neutral stand-in that passes
  // the base-tuple validation.
  if (cfg.sweep_param == "n" && std::isnan(cfg.n))
    cfg.n = std::isnan(cfg.a0) ? 1.0 : std::max(1.0, cfg.a0);
  if (cfg.sweep_param == "p" && std::isnan(cfg.p)) cfg.p = 0.5;
  if (cfg.sweep_param == "a0" && std::isnan(cfg.a0)) cfg.a0 = 0;
  const ModelParams base = params_from(cfg);
  const perclab::experiments::TrialOptions options = trial_options_from(cfg);
  const std::int64_t trials = as_integer("trials", cfg.trials);
  preflight_writable(cfg.out_json);

  const std::vector<double> values = parse_value_list(cfg.sweep_values);
  std::vector<ModelParams> grid;
  grid.reserve(values.size());
  for (double v : values) {
    ModelParams p = base;
    if (cfg.sweep_param == "a0") {
      p.a0 = as_integer("values", v);
    } else if (cfg.sweep_param == "n") {
      p.n = as_integer("values", v);
    } else if (cfg.sweep_param == "k") {
      p.k = static_cast<int>(as_integer("values", v));
    } else if (cfg.sweep_param == "p") {
      p.p = v;
    } else if (cfg.sweep_param == "tau") {
      p.tau = v;
    } else if (cfg.sweep_param == "gamma") {
      p.gamma = v;
    } else {
      throw std::invalid_argument(
          "--param must be one of a0|n|k|p|tau|gamma");
    }
    grid.push_back(p);
  }

  const std::vector<perclab::experiments::SweepPoint> points =
      perclab::experiments::sweep(grid, trials, options);
  const ordered_json j = perclab::io::sweep_json(points);
  if (!cfg.out_json.empty())
    perclab::io::atomic_write_text(cfg.out_json, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  for (const auto& point : points)
    if (!point.failed && point.summary.truncated_trials > 0)
      return kExitTruncated;
  return kExitOk;
}

int cmd_validate(const CliConfig& cfg) {
  const ModelParams params = params_from(cfg);
  const perclab::experiments::TrialOptions options = trial_options_from(cfg);
  const std::int64_t trials = as_integer("trials", cfg.trials);
  preflight_writable(cfg.out_json);
  const perclab::experiments::ConcentrationReport report =
      perclab::experiments::validate_concentration(params, trials, cfg.band,
                                                   cfg.delta, options);
  const ordered_json j = perclab::io::concentration_json(report);
  if (!cfg.out_json.empty())
    perclab::io::atomic_write_text(cfg.out_json, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

ordered_json confirm_block(const ModelParams& base, double a_c, double c1,
                           double c2, std::int64_t trials,
                           const perclab::experiments::TrialOptions& options) {
  auto run_at = [&](double c) {
    ModelParams p = base;
    p.a0 = static_cast<std::int64_t>(std::llround(c * a_c));
    return perclab::experiments::run_trials(p, trials, options);
  };
  const perclab::experiments::TrialSummary s1 = run_at(c1);
  const perclab::experiments::TrialSummary s2 = run_at(c2);
  const double se1 =
      s1.sd_final / std::sqrt(static_cast<double>(s1.trials));
  const double se2 =
      s2.sd_final / std::sqrt(static_cast<double>(s2.trials));
  const double separation =
      (s1.mean_final - s2.mean_final) / std::sqrt(se1 * se1 + se2 * se2);
  ordered_json j;
  j["trials"] = trials;
  j["c1"] = c1;
  j["a0_1"] = s1.params.a0;
  j["mean_1"] = s1.mean_final;
  j["se_1"] = se1;
  j["c2"] = c2;
  j["a0_2"] = s2.params.a0;
  j["mean_2"] = s2.mean_final;
  j["se_2"] = se2;
  j["separation_se"] = separation;
  j["direction_inverted"] = s1.mean_final > s2.mean_final;
  return j;
}

int cmd_chaos(const CliConfig& cfg_in) {
  CliConfig cfg = cfg_in;
  // The multiplier grid supplies the starting-set sizes; --a0 is optional.
  if (std::isnan(cfg.a0)) cfg.a0 = 0;
  const ModelParams params = params_from(cfg);
  const perclab::experiments::TrialOptions options = trial_options_from(cfg);
  preflight_writable(cfg.out_json);
  const double a_c = perclab::theory::compute_threshold(params);
  const int grid = static_cast<int>(as_integer("grid", cfg.grid));
  const perclab::theory::ChaosScan scan = perclab::theory::chaos_scan(
      params, cfg.c_min, cfg.c_max, cfg.chaos_delta, grid);

  ordered_json j;
  j["a_c"] = a_c;
  j["plateau_table"] = perclab::io::plateau_json(scan);

  double c1 = 0.0, c2 = 0.0;
  if (cfg.target >= 0) {
    const double found = perclab::theory::chaos_search(
        params, cfg.target, cfg.c_min, cfg.c_max, cfg.chaos_delta);
    j["c_found"] = found;
    ModelParams probe = params;
    probe.a0 = static_cast<std::int64_t>(std::llround(found * a_c));
    // Reported value is the prediction at the integer a0 actually used.
    const perclab::theory::TheoryReport report =
        perclab::theory::theory_report(probe);
    j["predicted_final"] =
        report.ell >= 0 && report.ell < static_cast<std::int64_t>(
                                            report.traj.size())
            ? report.traj[static_cast<std::size_t>(report.ell)]
            : report.predicted_final;
    // Neighbor for the optional demonstration: next plateau to the right.
    c1 = found;
    for (std::size_t i = 0; i + 1 < scan.plateaus.size(); ++i) {
      if (scan.plateaus[i].c_lo <= found && found <= scan.plateaus[i].c_hi) {
        const auto& next = scan.plateaus[i + 1];
        c2 = next.c_lo + 0.2 * (next.c_hi - next.c_lo);
        break;
      }
    }
  } else {
    const std::pair<double, double> pair =
        perclab::theory::find_nonmonotone_pair(params, cfg.c_min, cfg.c_max,
                                               cfg.chaos_delta);
    c1 = pair.first;
    c2 = pair.second;
    j["c1"] = c1;
    j["c2"] = c2;
  }

  if (cfg.confirm && c1 > 0.0 && c2 > 0.0) {
    const std::int64_t trials = as_integer("trials", cfg.trials);
    j["confirmation"] =
        confirm_block(params, a_c, c1, c2, trials, options);
  }

  if (!cfg.out_json.empty())
    perclab::io::atomic_write_text(cfg.out_json, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidProbability:
    case ErrorKind::InvalidThreshold:
    case ErrorKind::TooLargeForEagerMode:
      return kExitArgument;
    default:
      return kExitRegime;  // wrong-regime family: the math refuses, not us
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "perclab: bootstrap percolation with excitatory/inhibitory vertices "
      "on directed random graphs"};
  app.require_subcommand(1);

  CliConfig cfg;
  std::string config_path;
  std::vector<OptionBinding> bindings;

  auto bind_double = [&](CLI::App* cmd, const std::string& name, double& ref,
                         const std::string& help) {
    CLI::Option* opt = cmd->add_option(name, ref, help);
    const std::string key = name.substr(2);
    bindings.push_back({cmd, opt, [&ref, key](const ordered_json& j) {
                          if (j.contains(key)) ref = j.at(key).get<double>();
                        }});
    return opt;
  };
  auto bind_string = [&](CLI::App* cmd, const std::string& name,
                         std::string& ref, const std::string& help) {
    CLI::Option* opt = cmd->add_option(name, ref, help);
    const std::string key = name.substr(2);
    bindings.push_back({cmd, opt, [&ref, key](const ordered_json& j) {
                          if (j.contains(key))
                            ref = j.at(key).get<std::string>();
                        }});
    return opt;
  };

  auto add_model_flags = [&](CLI::App* cmd) {
    bind_double(cmd, "--n", cfg.n, "number of vertices");
    bind_double(cmd, "--p", cfg.p, "edge probability from excitatory vertices");
    bind_double(cmd, "--k", cfg.k, "activation threshold");
    bind_double(cmd, "--tau", cfg.tau, "inhibitory vertex probability");
    bind_double(cmd, "--gamma", cfg.gamma,
                "inhibitory edge probability multiplier");
    bind_double(cmd, "--a0", cfg.a0, "starting set size");
    CLI::Option* seed_opt =
        cmd->add_option("--seed", cfg.seed, "base random seed");
    bindings.push_back({cmd, seed_opt, [&](const ordered_json& j) {
                          if (j.contains("seed"))
                            cfg.seed = j.at("seed").get<std::uint64_t>();
                        }});
    cmd->add_option("--config", config_path,
                    "JSON config supplying defaults for unset flags");
    bind_string(cmd, "--emit-config", cfg.emit_config,
                "write the effective flag values as JSON, then run");
    bind_string(cmd, "--out-json", cfg.out_json, "write the report here too");
  };
  auto add_engine_flags = [&](CLI::App* cmd) {
    bind_string(cmd, "--engine", cfg.engine, "sync | async");
    bind_string(cmd, "--delay", cfg.delay, "async delay law: exp | unit");
    bind_string(cmd, "--sampler", cfg.sampler,
                "edge sampler: skip | naive (differential testing)");
    bind_double(cmd, "--trials", cfg.trials, "independent trials");
    bind_double(cmd, "--jobs", cfg.jobs, "concurrent trial workers");
    bind_double(cmd, "--time-cap", cfg.time_cap, "async clock budget");
    bind_double(cmd, "--active-cap", cfg.active_cap,
                "async activation budget (-1: all n)");
    bind_double(cmd, "--round-cap", cfg.round_cap,
                "sync round budget (-1: no cap)");
  };

  CLI::App* theory_cmd =
      app.add_subcommand("theory", "closed-form predictors for one tuple");
  add_model_flags(theory_cmd);

  CLI::App* sim_cmd =
      app.add_subcommand("sim", "run trials, write trajectory CSV + summary");
  add_model_flags(sim_cmd);
  add_engine_flags(sim_cmd);
  bind_string(sim_cmd, "--out-csv", cfg.out_csv, "trajectory CSV path");
  bind_string(sim_cmd, "--dump-realization", cfg.dump_realization,
              "write the materialized graph as gzipped text");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run trials across a one-parameter grid");
  add_model_flags(sweep_cmd);
  add_engine_flags(sweep_cmd);
  bind_string(sweep_cmd, "--param", cfg.sweep_param,
              "swept parameter: a0|n|k|p|tau|gamma");
  bind_string(sweep_cmd, "--values", cfg.sweep_values,
              "comma-separated grid values");
  sweep_cmd->get_option("--param")->required();
  sweep_cmd->get_option("--values")->required();

  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "check per-round concentration around the predicted curve");
  add_model_flags(validate_cmd);
  add_engine_flags(validate_cmd);
  bind_double(validate_cmd, "--band", cfg.band, "relative tolerance band");
  bind_double(validate_cmd, "--delta", cfg.delta,
              "check rounds while the predicted curve is below delta*n");

  CLI::App* chaos_cmd = app.add_subcommand(
      "chaos", "locate non-monotone starting-set multipliers");
  add_model_flags(chaos_cmd);
  add_engine_flags(chaos_cmd);
  bind_double(chaos_cmd, "--target", cfg.target,
              "predicted stopping size to search for (-1: find a pair)");
  bind_double(chaos_cmd, "--c-min", cfg.c_min, "multiplier range start");
  bind_double(chaos_cmd, "--c-max", cfg.c_max, "multiplier range end");
  bind_double(chaos_cmd, "--chaos-delta", cfg.chaos_delta,
              "stopping fraction of n");
  bind_double(chaos_cmd, "--grid", cfg.grid, "scan resolution");
  chaos_cmd->add_flag("--confirm", cfg.confirm,
                      "simulate both multipliers and report the separation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitArgument;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in)
        throw std::invalid_argument("cannot read config: " + config_path);
      ordered_json j = ordered_json::parse(in);
      for (const OptionBinding& b : bindings)
        if (app.got_subcommand(b.owner) && b.option->count() == 0) b.load(j);
    }
    {
      // Required-flag check runs after the merge so --config can supply them.
      const bool is_sweep = app.got_subcommand(sweep_cmd);
      std::string missing;
      auto need = [&](const char* flag, double v) {
        if (!std::isnan(v)) return;
        if (!missing.empty()) missing += ", ";
        missing += flag;
      };
      if (!(is_sweep && cfg.sweep_param == "n")) need("--n", cfg.n);
      if (!(is_sweep && cfg.sweep_param == "p")) need("--p", cfg.p);
      if (!app.got_subcommand(chaos_cmd) &&
          !(is_sweep && cfg.sweep_param == "a0"))
        need("--a0", cfg.a0);
      if (!missing.empty())
        throw std::invalid_argument(
            "missing required flag(s): " + missing +
            " (pass on the command line or via --config)");
    }
    if (const char* env_seed = std::getenv("PERC_LAB_SEED")) {
      char* end = nullptr;
      cfg.seed = std::strtoull(env_seed, &end, 10);
      if (end == env_seed || *end != '\0')
        throw std::invalid_argument("PERC_LAB_SEED must be an integer");
    }
    if (!cfg.emit_config.empty())
      perclab::io::atomic_write_text(cfg.emit_config,
                                     config_json(cfg).dump(2) + "\n");

    if (app.got_subcommand(theory_cmd)) return cmd_theory(cfg);
    if (app.got_subcommand(sim_cmd)) return cmd_sim(cfg);
    if (app.got_subcommand(sweep_cmd)) return cmd_sweep(cfg);
    if (app.got_subcommand(validate_cmd)) return cmd_validate(cfg);
    if (app.got_subcommand(chaos_cmd)) return cmd_chaos(cfg);
    return kExitArgument;
  } catch (const Error& e) {
    std::cerr << "error [" << perclab::error_kind_name(e.kind())
              << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  }
}

#include "aoi/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "aoi/error.hpp"
#include "aoi/format.hpp"
#include "aoi/oracle.hpp"
#include "aoi/policy_io.hpp"
#include "aoi/report_io.hpp"

namespace aoi::cli {

namespace {

int resolve_threads(int configured) {
  int n = configured > 0 ? configured : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, 8);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string lambda_field(int num, int den) {
  return fmt_double(static_cast<double>(num) / den);
}

// Solved policies keyed by their config digest, shared across sweep points,
// schemes, and seeds.
using PolicyCache = std::map<std::string, std::shared_ptr<const MixedPolicy>>;

std::shared_ptr<const MixedPolicy> solve_cached(PolicyCache& cache, const SystemParams& p,
                                                const SensorConfig& cfg,
                                                const SolverSettings& st) {
  std::string key = solve_digest(p, cfg, st);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto mp = std::make_shared<const MixedPolicy>(solve_cmdp(p, cfg, st));
  cache.emplace(key, mp);
  return mp;
}

LambdaEvaluator cached_evaluator(PolicyCache& cache, const SystemParams& p,
                                 const SensorSection& sensor, const SolverSettings& st) {
  return [&cache, p, sensor, st](int num, int den) {
    SensorConfig cfg = concrete_sensor(sensor, num, den);
    LambdaEntry entry;
    entry.rate_num = num;
    entry.rate_den = den;
    try {
      auto mp = solve_cached(cache, p, cfg, st);
      entry.feasible = true;
      entry.avg_aoi = mp->avg_aoi;
      entry.avg_cost = mp->avg_cost;
      entry.theta = mp->theta;
      entry.policy = mp;
    } catch (const NoFeasiblePolicyError&) {
      entry.feasible = false;
      entry.avg_aoi = std::numeric_limits<double>::infinity();
    }
    return entry;
  };
}

int scheme_rate_upper(int n_sensors) {
  return n_sensors > 1 ? sensor_grid_upper(n_sensors) : 10;
}

int cmd_solve_single(WorkbenchConfig cfg, const std::string& out_dir) {
  SystemParams params = to_system_params(cfg.system);
  SolverSettings settings = to_solver_settings(cfg.solver);
  int threads = resolve_threads(cfg.solver.threads);
  PolicyCache cache;
  LambdaEvaluator eval = cached_evaluator(cache, params, cfg.sensor, settings);

  LambdaReport rep;
  if (cfg.sensor.lambda_tenths > 0) {
    if (cfg.sensor.lambda_tenths > 10)
      throw ConfigError("lambda_tenths must lie in 1..10");
    rep.entries.push_back(eval(cfg.sensor.lambda_tenths, 10));
    rep.best_index = rep.entries[0].feasible ? 0 : -1;
  } else {
    rep = scan_rates(eval, 10, cfg.solver.refine_cliff, threads);
  }
  if (rep.best_index < 0)
    throw AllInfeasibleError("no sampling rate satisfies the energy budget");

  std::filesystem::create_directories(out_dir);
  write_text_file(join_path(out_dir, "lambda_report.csv"), lambda_report_csv(rep, cfg));

  const LambdaEntry& best = rep.best();
  const MixedPolicy& mp = *best.policy;
  std::string summary = csv_provenance(kSchemaSolveSummary, cfg);
  summary += std::string(kHeaderSolveSummary) + "\n";
  summary += lambda_field(best.rate_num, best.rate_den);
  summary += "," + fmt_double(mp.avg_aoi);
  summary += "," + fmt_double(mp.avg_cost);
  summary += "," + fmt_double(mp.theta);
  summary += "," + fmt_double(mp.y_low);
  summary += "," + fmt_double(mp.y_high);
  summary += "," + std::to_string(mp.y_trace.size());
  summary += "\n";
  write_text_file(join_path(out_dir, "solve_summary.csv"), summary);

  SensorConfig chosen = concrete_sensor(cfg.sensor, best.rate_num, best.rate_den);
  write_policy_file(join_path(out_dir, "policy.txt"), mp,
                    solve_digest(params, chosen, settings), settings);

  std::cout << "lambda_star = " << lambda_field(best.rate_num, best.rate_den)
            << ", avg_aoi = " << fmt_double(mp.avg_aoi)
            << ", avg_cost = " << fmt_double(mp.avg_cost) << "\n";
  return kExitOk;
}

struct SimAggregate {
  double maoi_mean = 0.0;
  double maoi_stderr = 0.0;
  double energy_mean = 0.0;
  double occupancy_mean = 0.0;
  int stable_runs = 0;
};

SimAggregate aggregate_runs(const Scenario& base, const std::vector<std::uint64_t>& seeds) {
  SimAggregate agg;
  std::vector<double> maois;
  for (std::uint64_t seed : seeds) {
    Scenario sc = base;
    sc.seed = seed;
    SimReport rep = run_simulation(sc);
    maois.push_back(rep.max_epoch_avg_age);
    double energy = 0.0;
    for (const auto& m : rep.sensors) energy += m.avg_energy;
    agg.energy_mean += energy / static_cast<double>(rep.sensors.size());
    agg.occupancy_mean += rep.sum_occupancy;
    agg.stable_runs += rep.stable ? 1 : 0;
  }
  double n = static_cast<double>(seeds.size());
  for (double m : maois) agg.maoi_mean += m;
  agg.maoi_mean /= n;
  agg.energy_mean /= n;
  agg.occupancy_mean /= n;
  if (seeds.size() > 1) {
    double var = 0.0;
    for (double m : maois) var += (m - agg.maoi_mean) * (m - agg.maoi_mean);
    agg.maoi_stderr = std::sqrt(var / (n - 1) / n);
  }
  return agg;
}

// One sweep row per scheme at a fixed radio/point: schemes with sampling
// control pick the rate with the optimizer, the others sample at the fixed
// fallback rate (0.1 unless [simulate] overrides it); slot-based schemes keep
// the same rate choice so only the scheduler differs. Points where the solve
// comes up empty are skipped so the rest of the sweep still lands.
void sim_rows_for_point(std::string& out, const std::string& axis, const std::string& point,
                        const SystemParams& params, int n_sensors,
                        const WorkbenchConfig& cfg, const SolverSettings& settings,
                        PolicyCache& cache, int threads) {
  const SweepSection& sw = *cfg.sweep;
  int upper = scheme_rate_upper(n_sensors);
  int fixed = cfg.simulate ? cfg.simulate->fixed_lambda_tenths : 1;
  if (fixed < 1 || fixed > upper)
    throw ConfigError("fixed_lambda_tenths must lie in 1.." + std::to_string(upper));
  RedrawMode redraw = cfg.simulate ? cfg.simulate->redraw : RedrawMode::PerSlot;

  for (SchemeKind scheme : sw.schemes) {
    bool optimized = scheme == SchemeKind::Proposed || scheme == SchemeKind::SlotBased;
    bool semi = scheme == SchemeKind::Proposed || scheme == SchemeKind::ProposedNoSc;

    int lam = fixed;
    std::shared_ptr<const MixedPolicy> policy;
    try {
      if (optimized) {
        LambdaReport rep = scan_rates(cached_evaluator(cache, params, cfg.sensor, settings),
                                      upper, false, threads);
        lam = rep.best().rate_num;
        policy = rep.best().policy;
      } else if (semi) {
        policy = solve_cached(cache, params, concrete_sensor(cfg.sensor, lam, 10), settings);
      }
    } catch (const AllInfeasibleError&) {
      continue;
    } catch (const NoFeasiblePolicyError&) {
      continue;
    }

    Scenario sc;
    sc.params = params;
    sc.scheduler = semi ? Scheduler::SemiDistributed : Scheduler::SlotBased;
    sc.redraw = redraw;
    sc.horizon_slots = sw.horizon_slots;
    SensorConfig scfg = concrete_sensor(cfg.sensor, lam, 10);
    for (int i = 0; i < n_sensors; ++i)
      sc.sensors.push_back({scfg, semi ? policy : nullptr, static_cast<std::uint64_t>(i)});

    SimAggregate agg = aggregate_runs(sc, sw.seeds);
    out += axis + "," + point + "," + scheme_name(scheme) + ",sim," + lambda_field(lam, 10);
    out += "," + std::to_string(n_sensors);
    out += "," + std::to_string(sw.seeds.size());
    out += "," + fmt_double(agg.maoi_mean);
    out += "," + fmt_double(agg.maoi_stderr);
    out += "," + fmt_double(agg.energy_mean);
    out += "," + fmt_double(agg.occupancy_mean);
    out += "," + std::to_string(agg.stable_runs);
    out += "\n";
  }
}

int cmd_sweep(WorkbenchConfig cfg, const std::string& out_dir) {
  if (!cfg.sweep) throw ConfigError("sweep needs a [sweep] section");
  const SweepSection& sw = *cfg.sweep;
  if (sw.values.empty()) throw ConfigError("sweep has no values");
  SolverSettings settings = to_solver_settings(cfg.solver);
  int threads = resolve_threads(cfg.solver.threads);
  PolicyCache cache;

  bool analytic = sw.axis == SweepAxis::Lambda || sw.axis == SweepAxis::Cmax;
  std::string rows;

  if (sw.axis == SweepAxis::Lambda) {
    SystemParams params = to_system_params(cfg.system);
    LambdaEvaluator eval = cached_evaluator(cache, params, cfg.sensor, settings);
    for (double v : sw.values) {
      int tenths = static_cast<int>(std::lround(v));
      if (tenths < 1 || tenths > 10 || std::abs(v - tenths) > 1e-9)
        throw ConfigError("lambda axis values must be whole tenths in 1..10");
      LambdaEntry e = eval(tenths, 10);
      rows += std::string("lambda,") + fmt_double(v) + ",proposed,analytic," +
              lambda_field(e.rate_num, e.rate_den) + "," + (e.feasible ? "1" : "0") + "," +
              (e.feasible ? fmt_double(e.avg_aoi) : "inf") + "," + fmt_double(e.avg_cost) +
              "," + fmt_double(e.theta) + "\n";
    }
  } else if (sw.axis == SweepAxis::Cmax) {
    SystemParams params = to_system_params(cfg.system);
    int fixed = cfg.simulate ? cfg.simulate->fixed_lambda_tenths : 1;
    if (fixed < 1 || fixed > 10) throw ConfigError("fixed_lambda_tenths must lie in 1..10");
    for (double budget : sw.values) {
      if (!(budget > 0)) throw ConfigError("cmax axis values must be positive");
      SensorSection sensor = cfg.sensor;
      sensor.energy_budget = budget;
      LambdaEvaluator eval = cached_evaluator(cache, params, sensor, settings);
      for (SchemeKind scheme : sw.schemes) {
        if (scheme == SchemeKind::SlotBased || scheme == SchemeKind::SlotBasedNoSc)
          continue;  // scheduling does not enter the single-sensor averages
        LambdaEntry e;
        if (scheme == SchemeKind::Proposed) {
          try {
            LambdaReport rep = scan_rates(eval, 10, cfg.solver.refine_cliff, threads);
            e = rep.best();
          } catch (const AllInfeasibleError&) {
            e.rate_num = 0;
            e.avg_aoi = std::numeric_limits<double>::infinity();
          }
        } else {
          e = eval(fixed, 10);  // no sampling control: fixed fallback rate
        }
        rows += std::string("cmax,") + fmt_double(budget) + "," + scheme_name(scheme) +
                ",analytic," + lambda_field(e.rate_num, e.rate_den) + "," +
                (e.feasible ? "1" : "0") + "," +
                (e.feasible ? fmt_double(e.avg_aoi) : "inf") + "," + fmt_double(e.avg_cost) +
                "," + fmt_double(e.theta) + "\n";
      }
    }
  } else if (sw.axis == SweepAxis::Snr) {
    int n = cfg.simulate ? cfg.simulate->n_sensors : SimulateSection{}.n_sensors;
    for (double offset : sw.values) {
      SystemSection sys = cfg.system;
      for (double& db : sys.snr_db) db += offset;
      sim_rows_for_point(rows, "snr", fmt_double(offset), to_system_params(sys), n, cfg,
                         settings, cache, threads);
    }
  } else {
    SystemParams params = to_system_params(cfg.system);
    for (double v : sw.values) {
      int n = static_cast<int>(std::lround(v));
      if (n < 1 || std::abs(v - n) > 1e-9)
        throw ConfigError("n_sensors axis values must be whole counts");
      sim_rows_for_point(rows, "n_sensors", fmt_double(v), params, n, cfg, settings, cache,
                         threads);
    }
  }

  std::filesystem::create_directories(out_dir);
  std::string out = csv_provenance(kSchemaSweep, cfg);
  out += std::string(analytic ? kHeaderSweepAnalytic : kHeaderSweepSim) + "\n";
  out += rows;
  std::string name = analytic ? "sweep_analytic.csv" : "sweep_sim.csv";
  write_text_file(join_path(out_dir, name), out);
  std::cout << "wrote " << join_path(out_dir, name) << "\n";
  return kExitOk;
}

int cmd_simulate(WorkbenchConfig cfg, const std::string& out_dir, bool solve_first,
                 std::optional<std::uint64_t> seed_override) {
  if (!cfg.simulate) throw ConfigError("simulate needs a [simulate] section");
  const SimulateSection& sm = *cfg.simulate;
  if (sm.n_sensors < 1) throw ConfigError("n_sensors must be at least 1");
  if (sm.seeds.empty() && !seed_override) throw ConfigError("simulate needs at least one seed");

  SystemParams params = to_system_params(cfg.system);
  SolverSettings settings = to_solver_settings(cfg.solver);
  int threads = resolve_threads(cfg.solver.threads);
  PolicyCache cache;
  bool semi = sm.scheduler == Scheduler::SemiDistributed;

  int lam = 0;
  std::shared_ptr<const MixedPolicy> policy;
  bool from_file = !sm.policy_file.empty() && !solve_first;

  if (sm.sampling_optimized) {
    if (from_file)
      throw ConfigError("policy_file needs sampling_optimized = false (the file pins one rate)");
    int upper = scheme_rate_upper(sm.n_sensors);
    LambdaReport rep = scan_rates(cached_evaluator(cache, params, cfg.sensor, settings), upper,
                                  cfg.solver.refine_cliff, threads);
    if (rep.best_index < 0)
      throw AllInfeasibleError("no admissible rate satisfies the energy budget");
    lam = rep.best().rate_num;
    policy = rep.best().policy;
  } else {
    if (sm.fixed_lambda_tenths < 1 || sm.fixed_lambda_tenths > 10)
      throw ConfigError("fixed_lambda_tenths must lie in 1..10");
    lam = sm.fixed_lambda_tenths;
    SensorConfig scfg = concrete_sensor(cfg.sensor, lam, 10);
    if (from_file) {
      StateSpace space = enumerate_states(params, scfg, settings.state_limit);
      policy = std::make_shared<const MixedPolicy>(
          read_policy_file(sm.policy_file, space, solve_digest(params, scfg, settings)));
    } else if (semi) {
      policy = solve_cached(cache, params, scfg, settings);
    }
  }

  std::filesystem::create_directories(out_dir);
  SensorConfig scfg = concrete_sensor(cfg.sensor, lam, 10);
  if (policy && !from_file)
    write_policy_file(join_path(out_dir, "policy.txt"), *policy,
                      solve_digest(params, scfg, settings), settings);

  Scenario base;
  base.params = params;
  base.scheduler = sm.scheduler;
  base.redraw = sm.redraw;
  base.horizon_slots = sm.horizon_slots;
  base.horizon_epochs = sm.horizon_epochs;
  base.record_trace = sm.trace;
  for (int i = 0; i < sm.n_sensors; ++i)
    base.sensors.push_back({scfg, semi ? policy : nullptr, static_cast<std::uint64_t>(i)});

  std::vector<std::uint64_t> seeds =
      seed_override ? std::vector<std::uint64_t>{*seed_override} : sm.seeds;

  std::string agg = csv_provenance(kSchemaSimAggregate, cfg);
  agg += std::string(kHeaderSimAggregate) + "\n";
  for (std::uint64_t seed : seeds) {
    Scenario sc = base;
    sc.seed = seed;
    SimReport rep = run_simulation(sc);
    agg += std::to_string(seed);
    agg += "," + std::to_string(rep.epochs);
    agg += "," + std::to_string(rep.minislots);
    agg += "," + fmt_double(rep.max_epoch_avg_age);
    agg += "," + fmt_double(rep.sum_occupancy);
    agg += "," + std::to_string(rep.ties_broken);
    agg += "," + std::to_string(rep.report_count);
    agg += std::string(",") + (rep.stable ? "1" : "0");
    agg += "\n";
    write_text_file(join_path(out_dir, "sim_report_" + std::to_string(seed) + ".txt"),
                    sim_report_text(rep, sc, cfg, seed));
    if (sm.trace)
      write_text_file(join_path(out_dir, "trace_" + std::to_string(seed) + ".csv"),
                      trace_csv(rep, cfg));
  }
  write_text_file(join_path(out_dir, "sim_aggregate.csv"), agg);
  std::cout << "lambda = " << lambda_field(lam, 10) << ", " << seeds.size() << " run(s), wrote "
            << join_path(out_dir, "sim_aggregate.csv") << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"age-optimal sampling and scheduling workbench"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int lambda_tenths = 0;
  bool refine = false, solve_first = false;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
  };
  CLI::App* solve = app.add_subcommand("solve-single", "solve one sensor, write the policy");
  add_common(solve);
  solve->add_option("--lambda", lambda_tenths, "fix the sampling rate (tenths, 1..10)")
      ->check(CLI::Range(1, 10));
  solve->add_flag("--refine-cliff", refine, "probe hundredths around the feasibility cliff");

  CLI::App* sweep = app.add_subcommand("sweep", "evaluate a configured axis");
  add_common(sweep);

  CLI::App* simulate = app.add_subcommand("simulate", "run the mini-slot protocol");
  add_common(simulate);
  simulate->add_flag("--solve-first", solve_first, "solve even when policy_file is set");
  simulate->add_flag("--refine-cliff", refine, "probe hundredths around the feasibility cliff");
  simulate
      ->add_option("--seed", seed, "run a single seed instead of the configured list")
      ->each([&](const std::string&) { seed_set = true; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    WorkbenchConfig cfg = load_config(config_path);
    if (lambda_tenths > 0) cfg.sensor.lambda_tenths = lambda_tenths;
    if (refine) cfg.solver.refine_cliff = true;
    if (solve->parsed()) return cmd_solve_single(std::move(cfg), out_dir);
    if (sweep->parsed()) return cmd_sweep(std::move(cfg), out_dir);
    return cmd_simulate(std::move(cfg), out_dir, solve_first,
                        seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
  } catch (const NoFeasiblePolicyError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const AllInfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SpaceTooLargeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace aoi::cli

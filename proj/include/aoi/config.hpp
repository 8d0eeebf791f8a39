#pragma once

#include <optional>
#include <string>

#include "aoi/sampling.hpp"
#include "aoi/sim.hpp"

namespace aoi {

// Flat INI-style config: [section] headers, key = value lines, '#' comments.
// Unknown sections, unknown keys, duplicate keys, and malformed values are
// all hard errors.

struct SystemSection {
  double bandwidth_hz = 180e3;
  int packet_bits = 8;
  std::vector<double> channel_probs = {0.2, 0.2, 0.2, 0.2, 0.2};
  std::vector<double> snr_db = {-20, -10, 0, 10, 20};
};

struct SensorSection {
  int lambda_tenths = 0;  // 0 = pick the rate with the optimizer
  int queue_cap = 3;
  int age_cap = 0;        // 0 = default (twice the full-queue drain-wait)
  double sampling_cost = 1.0;
  double energy_budget = 1.0;
};

struct SolverSection {
  double gamma = 0.95;
  double zeta = 0.01;
  double epsilon = 0.01;
  double eta = 0.1;
  bool eta_decay = false;
  int i_stop = 200;
  long vi_max_iterations = 100000;
  long state_limit = 1'000'000;
  int dense_limit = 1200;
  int threads = 0;  // 0 = hardware concurrency, capped at 8
  bool refine_cliff = false;
  long mc_fallback_epochs = 200000;
};

enum class SweepAxis { Lambda, Cmax, Snr, NSensors };
enum class SchemeKind { Proposed, ProposedNoSc, SlotBased, SlotBasedNoSc };

const char* axis_name(SweepAxis a);
const char* scheme_name(SchemeKind s);

struct SweepSection {
  SweepAxis axis = SweepAxis::Lambda;
  std::vector<double> values;  // lambda: tenths; cmax: budgets; snr: dB offsets; n_sensors: counts
  std::vector<SchemeKind> schemes = {SchemeKind::Proposed, SchemeKind::ProposedNoSc,
                                     SchemeKind::SlotBased, SchemeKind::SlotBasedNoSc};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  long horizon_slots = 1000;
};

struct SimulateSection {
  int n_sensors = 4;
  Scheduler scheduler = Scheduler::SemiDistributed;
  bool sampling_optimized = true;  // false = fixed rate below
  int fixed_lambda_tenths = 1;
  long horizon_slots = 1000;
  long horizon_epochs = 0;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  RedrawMode redraw = RedrawMode::PerSlot;
  bool trace = false;
  std::string policy_file;  // loaded when not solving first
};

struct WorkbenchConfig {
  SystemSection system;
  SensorSection sensor;
  SolverSection solver;
  std::optional<SweepSection> sweep;
  std::optional<SimulateSection> simulate;
};

WorkbenchConfig parse_config(const std::string& text, const std::string& origin);
WorkbenchConfig load_config(const std::string& path);

SystemParams to_system_params(const SystemSection& s);
SolverSettings to_solver_settings(const SolverSection& s);
// age_cap stays 0 here when automatic; concrete configs are derived per rate
SensorConfig sensor_template(const SensorSection& s);
SensorConfig concrete_sensor(const SensorSection& s, int rate_num, int rate_den);

// Fingerprint of everything a solved policy depends on (radio model, sensor
// grid, solver knobs, concrete rate). Built from resolved values, so config
// formatting does not matter.
std::string solve_digest(const SystemParams& p, const SensorConfig& cfg,
                         const SolverSettings& s);

// Full resolved dump for provenance blocks: "<prefix><section>.<key> = value" lines.
std::string provenance_dump(const WorkbenchConfig& cfg, const std::string& prefix = "# cfg.");

}  // namespace aoi

#include "aoi/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "aoi/digest.hpp"
#include "aoi/error.hpp"
#include "aoi/format.hpp"

namespace aoi {

std::string digest_hex(std::uint64_t h) {
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::Lambda: return "lambda";
    case SweepAxis::Cmax: return "cmax";
    case SweepAxis::Snr: return "snr";
    case SweepAxis::NSensors: return "n_sensors";
  }
  return "?";
}

const char* scheme_name(SchemeKind s) {
  switch (s) {
    case SchemeKind::Proposed: return "proposed";
    case SchemeKind::ProposedNoSc: return "proposed_no_sc";
    case SchemeKind::SlotBased: return "slot_based";
    case SchemeKind::SlotBasedNoSc: return "slot_based_no_sc";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Parser {
  const std::string& origin;
  int line_no = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + what);
  }

  double as_double(const std::string& v) const {
    try {
      std::size_t pos = 0;
      double x = std::stod(v, &pos);
      if (pos != v.size()) fail("trailing characters in number '" + v + "'");
      return x;
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      fail("expected a number, got '" + v + "'");
    }
  }

  long as_long(const std::string& v) const {
    try {
      std::size_t pos = 0;
      long x = std::stol(v, &pos);
      if (pos != v.size()) fail("trailing characters in integer '" + v + "'");
      return x;
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      fail("expected an integer, got '" + v + "'");
    }
  }

  int as_int(const std::string& v) const { return static_cast<int>(as_long(v)); }

  bool as_bool(const std::string& v) const {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail("expected true/false, got '" + v + "'");
  }

  std::vector<std::string> split_list(const std::string& v) const {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(v);
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) fail("empty list element in '" + v + "'");
      out.push_back(item);
    }
    if (out.empty()) fail("expected a non-empty list");
    return out;
  }

  std::vector<double> as_doubles(const std::string& v) const {
    std::vector<double> out;
    for (auto& item : split_list(v)) out.push_back(as_double(item));
    return out;
  }

  std::vector<std::uint64_t> as_seeds(const std::string& v) const {
    std::vector<std::uint64_t> out;
    for (auto& item : split_list(v)) {
      try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(item, &pos);
        if (pos != item.size()) fail("trailing characters in seed '" + item + "'");
        out.push_back(x);
      } catch (const ConfigError&) {
        throw;
      } catch (...) {
        fail("expected a seed, got '" + item + "'");
      }
    }
    return out;
  }
};

}  // namespace

WorkbenchConfig parse_config(const std::string& text, const std::string& origin) {
  WorkbenchConfig cfg;
  Parser ps{origin};

  std::string section;
  std::set<std::string> seen_sections;
  std::set<std::string> seen_keys;

  std::stringstream stream(text);
  std::string raw;
  while (std::getline(stream, raw)) {
    ++ps.line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') ps.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "system" && section != "sensor" && section != "solver" &&
          section != "sweep" && section != "simulate")
        ps.fail("unknown section [" + section + "]");
      if (!seen_sections.insert(section).second)
        ps.fail("duplicate section [" + section + "]");
      if (section == "sweep") cfg.sweep.emplace();
      if (section == "simulate") cfg.simulate.emplace();
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) ps.fail("expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) ps.fail("empty key");
    if (value.empty()) ps.fail("empty value for '" + key + "'");
    if (section.empty()) ps.fail("key '" + key + "' before any section header");
    if (!seen_keys.insert(section + "." + key).second)
      ps.fail("duplicate key '" + key + "' in [" + section + "]");

    if (section == "system") {
      if (key == "bandwidth_hz") cfg.system.bandwidth_hz = ps.as_double(value);
      else if (key == "packet_bits") cfg.system.packet_bits = ps.as_int(value);
      else if (key == "channel_probs") cfg.system.channel_probs = ps.as_doubles(value);
      else if (key == "snr_db") cfg.system.snr_db = ps.as_doubles(value);
      else ps.fail("unknown key '" + key + "' in [system]");
    } else if (section == "sensor") {
      if (key == "lambda_tenths") cfg.sensor.lambda_tenths = ps.as_int(value);
      else if (key == "queue_cap") cfg.sensor.queue_cap = ps.as_int(value);
      else if (key == "age_cap") cfg.sensor.age_cap = ps.as_int(value);
      else if (key == "sampling_cost") cfg.sensor.sampling_cost = ps.as_double(value);
      else if (key == "energy_budget") cfg.sensor.energy_budget = ps.as_double(value);
      else ps.fail("unknown key '" + key + "' in [sensor]");
    } else if (section == "solver") {
      if (key == "gamma") cfg.solver.gamma = ps.as_double(value);
      else if (key == "zeta") cfg.solver.zeta = ps.as_double(value);
      else if (key == "epsilon") cfg.solver.epsilon = ps.as_double(value);
      else if (key == "eta") cfg.solver.eta = ps.as_double(value);
      else if (key == "eta_decay") cfg.solver.eta_decay = ps.as_bool(value);
      else if (key == "i_stop") cfg.solver.i_stop = ps.as_int(value);
      else if (key == "vi_max_iterations") cfg.solver.vi_max_iterations = ps.as_long(value);
      else if (key == "state_limit") cfg.solver.state_limit = ps.as_long(value);
      else if (key == "dense_limit") cfg.solver.dense_limit = ps.as_int(value);
      else if (key == "threads") cfg.solver.threads = ps.as_int(value);
      else if (key == "refine_cliff") cfg.solver.refine_cliff = ps.as_bool(value);
      else if (key == "mc_fallback_epochs") cfg.solver.mc_fallback_epochs = ps.as_long(value);
      else ps.fail("unknown key '" + key + "' in [solver]");
    } else if (section == "sweep") {
      SweepSection& sw = *cfg.sweep;
      if (key == "axis") {
        if (value == "lambda") sw.axis = SweepAxis::Lambda;
        else if (value == "cmax") sw.axis = SweepAxis::Cmax;
        else if (value == "snr") sw.axis = SweepAxis::Snr;
        else if (value == "n_sensors") sw.axis = SweepAxis::NSensors;
        else ps.fail("unknown axis '" + value + "'");
      } else if (key == "values") {
        sw.values = ps.as_doubles(value);
      } else if (key == "schemes") {
        sw.schemes.clear();
        for (auto& item : ps.split_list(value)) {
          if (item == "proposed") sw.schemes.push_back(SchemeKind::Proposed);
          else if (item == "proposed_no_sc") sw.schemes.push_back(SchemeKind::ProposedNoSc);
          else if (item == "slot_based") sw.schemes.push_back(SchemeKind::SlotBased);
          else if (item == "slot_based_no_sc") sw.schemes.push_back(SchemeKind::SlotBasedNoSc);
          else ps.fail("unknown scheme '" + item + "'");
        }
      } else if (key == "seeds") {
        sw.seeds = ps.as_seeds(value);
      } else if (key == "horizon_slots") {
        sw.horizon_slots = ps.as_long(value);
      } else {
        ps.fail("unknown key '" + key + "' in [sweep]");
      }
    } else if (section == "simulate") {
      SimulateSection& sm = *cfg.simulate;
      if (key == "n_sensors") sm.n_sensors = ps.as_int(value);
      else if (key == "scheduler") {
        if (value == "semi_distributed") sm.scheduler = Scheduler::SemiDistributed;
        else if (value == "slot_based") sm.scheduler = Scheduler::SlotBased;
        else ps.fail("unknown scheduler '" + value + "'");
      } else if (key == "sampling_optimized") sm.sampling_optimized = ps.as_bool(value);
      else if (key == "fixed_lambda_tenths") sm.fixed_lambda_tenths = ps.as_int(value);
      else if (key == "horizon_slots") sm.horizon_slots = ps.as_long(value);
      else if (key == "horizon_epochs") sm.horizon_epochs = ps.as_long(value);
      else if (key == "seeds") sm.seeds = ps.as_seeds(value);
      else if (key == "redraw") {
        if (value == "per_slot") sm.redraw = RedrawMode::PerSlot;
        else if (value == "per_epoch") sm.redraw = RedrawMode::PerEpoch;
        else ps.fail("unknown redraw mode '" + value + "'");
      } else if (key == "trace") sm.trace = ps.as_bool(value);
      else if (key == "policy_file") sm.policy_file = value;
      else ps.fail("unknown key '" + key + "' in [simulate]");
    }
  }
  return cfg;
}

WorkbenchConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

SystemParams to_system_params(const SystemSection& s) {
  return make_system_params(s.bandwidth_hz, s.packet_bits, s.channel_probs, s.snr_db);
}

SolverSettings to_solver_settings(const SolverSection& s) {
  SolverSettings out;
  out.vi.gamma = s.gamma;
  out.vi.zeta = s.zeta;
  out.vi.max_iterations = s.vi_max_iterations;
  out.stationary.dense_limit = s.dense_limit;
  out.eta = s.eta;
  out.eta_decay = s.eta_decay;
  out.epsilon = s.epsilon;
  out.i_stop = s.i_stop;
  out.state_limit = s.state_limit;
  out.fallback_epochs = s.mc_fallback_epochs;
  return out;
}

SensorConfig sensor_template(const SensorSection& s) {
  SensorConfig cfg;
  cfg.rate_num = s.lambda_tenths > 0 ? s.lambda_tenths : 1;
  cfg.rate_den = 10;
  cfg.queue_cap = s.queue_cap;
  cfg.age_cap = s.age_cap;  // 0 = derive per rate
  cfg.sampling_cost = s.sampling_cost;
  cfg.energy_budget = s.energy_budget;
  return cfg;
}

SensorConfig concrete_sensor(const SensorSection& s, int rate_num, int rate_den) {
  SensorConfig cfg = sensor_template(s);
  cfg.rate_num = rate_num;
  cfg.rate_den = rate_den;
  if (cfg.age_cap == 0) cfg.age_cap = default_age_cap(rate_num, rate_den, cfg.queue_cap);
  validate(cfg);
  return cfg;
}

std::string solve_digest(const SystemParams& p, const SensorConfig& cfg,
                         const SolverSettings& s) {
  std::string blob = "radio|" + fmt_exact(p.bandwidth_hz) + "|" +
                     std::to_string(p.packet_bits);
  for (double a : p.channel_probs) blob += "|" + fmt_exact(a);
  for (double d : p.snr_db) blob += "|" + fmt_exact(d);
  blob += "|sensor|" + std::to_string(cfg.rate_num) + "/" + std::to_string(cfg.rate_den) +
          "|" + std::to_string(cfg.queue_cap) + "|" + std::to_string(cfg.age_cap) + "|" +
          fmt_exact(cfg.sampling_cost) + "|" + fmt_exact(cfg.energy_budget);
  blob += "|solver|" + fmt_exact(s.vi.gamma) + "|" + fmt_exact(s.vi.zeta) + "|" +
          std::to_string(s.vi.max_iterations) + "|" + fmt_exact(s.eta) + "|" +
          (s.eta_decay ? "1" : "0") + "|" + fmt_exact(s.epsilon) + "|" +
          std::to_string(s.i_stop) + "|" + std::to_string(s.stationary.dense_limit) + "|" +
          std::to_string(s.fallback_epochs) + "|" + std::to_string(s.fallback_seed);
  return digest_hex(fnv1a64(blob));
}

namespace {

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt_double(v[i]);
  return out;
}

std::string join_seeds(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

std::string provenance_dump(const WorkbenchConfig& cfg, const std::string& prefix) {
  std::string out;
  auto put = [&](const std::string& key, const std::string& value) {
    out += prefix + key + " = " + value + "\n";
  };
  put("system.bandwidth_hz", fmt_double(cfg.system.bandwidth_hz));
  put("system.packet_bits", std::to_string(cfg.system.packet_bits));
  put("system.channel_probs", join_doubles(cfg.system.channel_probs));
  put("system.snr_db", join_doubles(cfg.system.snr_db));
  put("sensor.lambda_tenths", std::to_string(cfg.sensor.lambda_tenths));
  put("sensor.queue_cap", std::to_string(cfg.sensor.queue_cap));
  put("sensor.age_cap", std::to_string(cfg.sensor.age_cap));
  put("sensor.sampling_cost", fmt_double(cfg.sensor.sampling_cost));
  put("sensor.energy_budget", fmt_double(cfg.sensor.energy_budget));
  put("solver.gamma", fmt_double(cfg.solver.gamma));
  put("solver.zeta", fmt_double(cfg.solver.zeta));
  put("solver.epsilon", fmt_double(cfg.solver.epsilon));
  put("solver.eta", fmt_double(cfg.solver.eta));
  put("solver.eta_decay", cfg.solver.eta_decay ? "true" : "false");
  put("solver.i_stop", std::to_string(cfg.solver.i_stop));
  put("solver.vi_max_iterations", std::to_string(cfg.solver.vi_max_iterations));
  put("solver.state_limit", std::to_string(cfg.solver.state_limit));
  put("solver.dense_limit", std::to_string(cfg.solver.dense_limit));
  put("solver.threads", std::to_string(cfg.solver.threads));
  put("solver.refine_cliff", cfg.solver.refine_cliff ? "true" : "false");
  put("solver.mc_fallback_epochs", std::to_string(cfg.solver.mc_fallback_epochs));
  if (cfg.sweep) {
    put("sweep.axis", axis_name(cfg.sweep->axis));
    put("sweep.values", join_doubles(cfg.sweep->values));
    std::string schemes;
    for (std::size_t i = 0; i < cfg.sweep->schemes.size(); ++i)
      schemes += std::string(i ? "," : "") + scheme_name(cfg.sweep->schemes[i]);
    put("sweep.schemes", schemes);
    put("sweep.seeds", join_seeds(cfg.sweep->seeds));
    put("sweep.horizon_slots", std::to_string(cfg.sweep->horizon_slots));
  }
  if (cfg.simulate) {
    const SimulateSection& sm = *cfg.simulate;
    put("simulate.n_sensors", std::to_string(sm.n_sensors));
    put("simulate.scheduler",
        sm.scheduler == Scheduler::SemiDistributed ? "semi_distributed" : "slot_based");
    put("simulate.sampling_optimized", sm.sampling_optimized ? "true" : "false");
    put("simulate.fixed_lambda_tenths", std::to_string(sm.fixed_lambda_tenths));
    put("simulate.horizon_slots", std::to_string(sm.horizon_slots));
    put("simulate.horizon_epochs", std::to_string(sm.horizon_epochs));
    put("simulate.seeds", join_seeds(sm.seeds));
    put("simulate.redraw", sm.redraw == RedrawMode::PerSlot ? "per_slot" : "per_epoch");
    put("simulate.trace", sm.trace ? "true" : "false");
    if (!sm.policy_file.empty()) put("simulate.policy_file", sm.policy_file);
  }
  return out;
}

}  // namespace aoi

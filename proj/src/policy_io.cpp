#include "aoi/policy_io.hpp"

#include <fstream>
#include <sstream>

#include "aoi/error.hpp"
#include "aoi/format.hpp"
#include "aoi/report_io.hpp"

namespace aoi {

std::string policy_file_text(const MixedPolicy& mp, const std::string& digest,
                             const SolverSettings& st) {
  const StateSpace& space = mp.space;
  const SensorConfig& cfg = space.config();
  std::string out = "aoi-policy v" + std::to_string(kPolicyFormatVersion) + "\n";
  out += "digest " + digest + "\n";
  out += "grid " + std::to_string(cfg.rate_num) + " " + std::to_string(cfg.rate_den) + " " +
         std::to_string(cfg.queue_cap) + " " + std::to_string(cfg.age_cap) + " " +
         std::to_string(space.channels()) + "\n";
  out += "solver " + fmt_exact(st.vi.gamma) + " " + fmt_exact(st.vi.zeta) + " " +
         fmt_exact(st.epsilon) + " " + fmt_exact(st.eta) + " " +
         std::string(st.eta_decay ? "1" : "0") + " " + std::to_string(st.i_stop) + "\n";
  out += "theta " + fmt_exact(mp.theta) + "\n";
  out += "degenerate " + std::string(mp.degenerate ? "1" : "0") + "\n";
  out += "y_low " + fmt_exact(mp.y_low) + "\n";
  out += "y_high " + fmt_exact(mp.y_high) + "\n";
  out += "avg_aoi " + fmt_exact(mp.avg_aoi) + "\n";
  out += "avg_cost " + fmt_exact(mp.avg_cost) + "\n";
  out += "aoi_above " + fmt_exact(mp.aoi_above) + "\n";
  out += "cost_above " + fmt_exact(mp.cost_above) + "\n";
  out += "aoi_below " + fmt_exact(mp.aoi_below) + "\n";
  out += "cost_below " + fmt_exact(mp.cost_below) + "\n";
  out += "y_trace " + std::to_string(mp.y_trace.size());
  for (double y : mp.y_trace) out += " " + fmt_exact(y);
  out += "\n";
  out += "states " + std::to_string(space.size()) + "\n";
  for (int id = 0; id < space.size(); ++id) {
    SensorState s = space.state(id);
    const Action& lo = mp.pi_low.actions.at(id);
    const Action& hi = mp.pi_high.actions.at(id);
    out += std::to_string(id) + " " + std::to_string(s.age_scaled) + " " +
           std::to_string(s.gap_scaled) + " " + std::to_string(s.queue_scaled) + " " +
           std::to_string(s.channel) + " " + std::to_string(lo.transmit) + " " +
           std::to_string(lo.minislots) + " " + std::to_string(hi.transmit) + " " +
           std::to_string(hi.minislots) + "\n";
  }
  out += "end\n";
  return out;
}

void write_policy_file(const std::string& path, const MixedPolicy& mp,
                       const std::string& digest, const SolverSettings& st) {
  write_text_file(path, policy_file_text(mp, digest, st));
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError("policy file '" + path + "': " + what);
}

}  // namespace

MixedPolicy read_policy_file(const std::string& path, const StateSpace& space,
                             const std::string& expected_digest) {
  std::istringstream in(read_text_file(path));
  std::string token;

  auto expect_key = [&](const std::string& key) {
    if (!(in >> token) || token != key) bad(path, "expected '" + key + "'");
  };
  auto read_double = [&](const std::string& key) {
    expect_key(key);
    double v;
    if (!(in >> v)) bad(path, "malformed value for '" + key + "'");
    return v;
  };
  auto read_int = [&](const std::string& key) {
    expect_key(key);
    long long v;
    if (!(in >> v)) bad(path, "malformed value for '" + key + "'");
    return v;
  };

  expect_key("aoi-policy");
  if (!(in >> token)) bad(path, "missing version");
  if (token != "v" + std::to_string(kPolicyFormatVersion))
    bad(path, "unsupported format version '" + token + "'");

  expect_key("digest");
  std::string stored_digest;
  if (!(in >> stored_digest)) bad(path, "missing digest");
  if (!expected_digest.empty() && stored_digest != expected_digest)
    bad(path, "digest mismatch: file " + stored_digest + ", config " + expected_digest);

  expect_key("grid");
  int num, den, qcap, acap, channels;
  if (!(in >> num >> den >> qcap >> acap >> channels)) bad(path, "malformed grid line");
  const SensorConfig& cfg = space.config();
  if (num != cfg.rate_num || den != cfg.rate_den || qcap != cfg.queue_cap ||
      acap != cfg.age_cap || channels != space.channels())
    bad(path, "grid does not match the current config");

  // Solve settings travel with the file for provenance; the digest already
  // binds them, so they are not re-checked here.
  expect_key("solver");
  double gz[4];
  int decay_flag;
  long long stop;
  if (!(in >> gz[0] >> gz[1] >> gz[2] >> gz[3] >> decay_flag >> stop))
    bad(path, "malformed solver line");

  MixedPolicy mp;
  mp.space = space;
  mp.theta = read_double("theta");
  mp.degenerate = read_int("degenerate") != 0;
  mp.y_low = read_double("y_low");
  mp.y_high = read_double("y_high");
  mp.avg_aoi = read_double("avg_aoi");
  mp.avg_cost = read_double("avg_cost");
  mp.aoi_above = read_double("aoi_above");
  mp.cost_above = read_double("cost_above");
  mp.aoi_below = read_double("aoi_below");
  mp.cost_below = read_double("cost_below");
  mp.pi_low.multiplier = mp.y_low;
  mp.pi_high.multiplier = mp.y_high;

  long long trace_len = read_int("y_trace");
  for (long long i = 0; i < trace_len; ++i) {
    double y;
    if (!(in >> y)) bad(path, "truncated y_trace");
    mp.y_trace.push_back(y);
  }

  long long rows = read_int("states");
  if (rows != space.size()) bad(path, "state count does not match the current grid");
  mp.pi_low.actions.resize(space.size());
  mp.pi_high.actions.resize(space.size());
  for (long long r = 0; r < rows; ++r) {
    long long id;
    SensorState s;
    Action lo, hi;
    if (!(in >> id >> s.age_scaled >> s.gap_scaled >> s.queue_scaled >> s.channel >>
          lo.transmit >> lo.minislots >> hi.transmit >> hi.minislots))
      bad(path, "malformed state row " + std::to_string(r));
    if (id != r) bad(path, "state rows out of order at row " + std::to_string(r));
    if (space.id(s) != id) bad(path, "state tuple does not match id " + std::to_string(id));
    mp.pi_low.actions[id] = lo;
    mp.pi_high.actions[id] = hi;
  }
  expect_key("end");
  return mp;
}

}  // namespace aoi

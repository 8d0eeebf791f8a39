#include "aoi/report_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "aoi/error.hpp"
#include "aoi/format.hpp"

namespace aoi {

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("short write to '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string csv_provenance(const char* schema, const WorkbenchConfig& cfg) {
  return std::string("# ") + schema + "\n" + provenance_dump(cfg);
}

namespace {

std::string lambda_field(int num, int den) {
  // tenths and hundredths print exactly: 4/10 -> 0.4, 41/100 -> 0.41
  return fmt_double(static_cast<double>(num) / den);
}

}  // namespace

std::string lambda_report_csv(const LambdaReport& rep, const WorkbenchConfig& cfg) {
  std::string out = csv_provenance(kSchemaLambdaSweep, cfg);
  out += std::string(kHeaderLambdaReport) + "\n";
  for (const auto& e : rep.entries) {
    out += lambda_field(e.rate_num, e.rate_den);
    out += ",";
    out += e.feasible ? "1" : "0";
    out += ",";
    out += e.feasible ? fmt_double(e.avg_aoi) : "inf";
    out += "," + fmt_double(e.avg_cost);
    out += "," + fmt_double(e.theta);
    out += "\n";
  }
  return out;
}

std::string sim_report_text(const SimReport& rep, const Scenario& sc,
                            const WorkbenchConfig& cfg, std::uint64_t seed) {
  std::string out = csv_provenance(kSchemaSimReport, cfg);
  out += "seed = " + std::to_string(seed) + "\n";
  out += "epochs = " + std::to_string(rep.epochs) + "\n";
  out += "minislots = " + std::to_string(rep.minislots) + "\n";
  out += "slots = " + std::to_string(rep.slots) + "\n";
  out += "max_epoch_avg_age = " + fmt_double(rep.max_epoch_avg_age) + "\n";
  out += "sum_occupancy = " + fmt_double(rep.sum_occupancy) + "\n";
  out += "sum_rate = " + fmt_double(rep.sum_rate) + "\n";
  out += "rate_precondition = " + std::string(rep.rate_precondition ? "1" : "0") + "\n";
  out += "queues_bounded = " + std::string(rep.queues_bounded ? "1" : "0") + "\n";
  out += "stable = " + std::string(rep.stable ? "1" : "0") + "\n";
  out += "ties_broken = " + std::to_string(rep.ties_broken) + "\n";
  out += "report_count = " + std::to_string(rep.report_count) + "\n";
  out += "sensor,lambda,epoch_avg_age,time_avg_age,avg_energy,occupancy,mean_queue,"
         "max_queue,reports,grants,clamp_events\n";
  for (std::size_t i = 0; i < rep.sensors.size(); ++i) {
    const SensorMetrics& m = rep.sensors[i];
    const SensorConfig& c = sc.sensors[i].cfg;
    out += std::to_string(i);
    out += "," + lambda_field(c.rate_num, c.rate_den);
    out += "," + fmt_double(m.epoch_avg_age);
    out += "," + fmt_double(m.time_avg_age);
    out += "," + fmt_double(m.avg_energy);
    out += "," + fmt_double(m.occupancy);
    out += "," + fmt_double(m.mean_queue);
    out += "," + fmt_double(m.max_queue);
    out += "," + std::to_string(m.reports);
    out += "," + std::to_string(m.grants);
    out += "," + std::to_string(m.clamp_events);
    out += "\n";
  }
  return out;
}

std::string trace_csv(const SimReport& rep, const WorkbenchConfig& cfg) {
  std::string out = csv_provenance(kSchemaTrace, cfg);
  out += std::string(kHeaderTrace) + "\n";
  for (const auto& row : rep.trace) {
    for (std::size_t i = 0; i < row.states.size(); ++i) {
      const SensorState& s = row.states[i];
      out += std::to_string(row.epoch);
      out += "," + std::to_string(row.minislot);
      out += "," + std::to_string(row.slot_used);
      out += "," + std::to_string(row.winner);
      out += "," + std::to_string(row.minislots);
      out += "," + std::to_string(i);
      out += "," + std::to_string(s.age_scaled);
      out += "," + std::to_string(s.gap_scaled);
      out += "," + std::to_string(s.queue_scaled);
      out += "," + std::to_string(s.channel);
      out += "," + std::to_string(row.dest_scaled[i]);
      out += "\n";
    }
  }
  return out;
}

}  // namespace aoi

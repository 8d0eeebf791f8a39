#pragma once

#include <string>
#include <vector>

#include "aoi/config.hpp"

namespace aoi {

// Every emitted file starts with '#' provenance lines (schema version and the
// full resolved config; never timestamps -- artifacts must be byte-stable),
// then for CSVs one header row. Schema strings are frozen by golden tests.

inline constexpr const char* kSchemaLambdaSweep = "aoi-lambda-report v1";
inline constexpr const char* kSchemaSweep = "aoi-sweep v1";
inline constexpr const char* kSchemaSimAggregate = "aoi-sim-aggregate v1";
inline constexpr const char* kSchemaSimReport = "aoi-sim-report v1";
inline constexpr const char* kSchemaSolveSummary = "aoi-solve-summary v1";
inline constexpr const char* kSchemaTrace = "aoi-sim-trace v1";

inline constexpr const char* kHeaderLambdaReport =
    "lambda,feasible,avg_aoi,avg_cost,theta";
inline constexpr const char* kHeaderSolveSummary =
    "lambda,avg_aoi,avg_cost,theta,y_low,y_high,iterations";
inline constexpr const char* kHeaderSweepAnalytic =
    "axis,point,scheme,source,lambda,feasible,avg_aoi,avg_cost,theta";
inline constexpr const char* kHeaderSweepSim =
    "axis,point,scheme,source,lambda,n_sensors,seeds,maoi_mean,maoi_stderr,"
    "avg_energy_mean,sum_occupancy_mean,stable_runs";
inline constexpr const char* kHeaderSimAggregate =
    "seed,epochs,minislots,maoi,sum_occupancy,ties_broken,reports,stable";
inline constexpr const char* kHeaderTrace =
    "epoch,minislot,slot_used,winner,k,sensor,age_scaled,gap_scaled,queue_scaled,"
    "channel,dest_scaled";

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

std::string csv_provenance(const char* schema, const WorkbenchConfig& cfg);

std::string lambda_report_csv(const LambdaReport& rep, const WorkbenchConfig& cfg);
std::string sim_report_text(const SimReport& rep, const Scenario& sc,
                            const WorkbenchConfig& cfg, std::uint64_t seed);
std::string trace_csv(const SimReport& rep, const WorkbenchConfig& cfg);

}  // namespace aoi

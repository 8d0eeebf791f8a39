#include "aoi/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "aoi/error.hpp"

namespace aoi {

namespace {

// exact order on rates with mixed denominators
bool rate_less(const LambdaEntry& a, const LambdaEntry& b) {
  return static_cast<long long>(a.rate_num) * b.rate_den <
         static_cast<long long>(b.rate_num) * a.rate_den;
}

// argmin over feasible entries; ascending order makes first-wins keep the
// smaller rate on exact ties
int pick_best(const std::vector<LambdaEntry>& entries) {
  int best = -1;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].feasible) continue;
    if (best < 0 || entries[i].avg_aoi < entries[best].avg_aoi)
      best = static_cast<int>(i);
  }
  return best;
}

std::vector<LambdaEntry> evaluate_points(const LambdaEvaluator& eval,
                                         const std::vector<std::pair<int, int>>& points,
                                         int threads) {
  std::vector<LambdaEntry> out(points.size());
  int workers = std::min<int>({threads, 8, static_cast<int>(points.size())});
  if (workers <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i)
      out[i] = eval(points[i].first, points[i].second);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        out[i] = eval(points[i].first, points[i].second);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace

int sensor_grid_upper(int n_sensors) {
  if (n_sensors < 1) throw ConfigError("need at least one sensor");
  int upper = (10 % n_sensors == 0) ? 10 / n_sensors - 1 : 10 / n_sensors;
  if (upper < 1)
    throw ConfigError("no admissible rate for " + std::to_string(n_sensors) +
                      " sensors on the tenths grid");
  return upper;
}

LambdaReport bisect_rate(const LambdaEvaluator& eval, int grid_upper) {
  if (grid_upper < 1 || grid_upper > 10)
    throw ConfigError("grid upper end must lie in 1..10");

  std::map<int, LambdaEntry> memo;  // tenths index -> evaluation
  auto ev = [&](int i) -> const LambdaEntry& {
    auto it = memo.find(i);
    if (it == memo.end()) it = memo.emplace(i, eval(i, 10)).first;
    return it->second;
  };

  int l = 1, m = grid_upper;
  while (l < m) {
    int mid = l + (m - l + 1) / 2;
    const LambdaEntry& e = ev(mid);
    if (e.feasible && e.avg_aoi < ev(l).avg_aoi)
      l = mid;
    else
      m = mid - 1;
  }
  const LambdaEntry& anchor = ev(l);  // probe: l may be untouched so far
  if (!anchor.feasible)
    throw AllInfeasibleError("every probed rate violates the energy budget");

  LambdaReport report;
  for (auto& [i, entry] : memo) {
    if (i == l) report.best_index = static_cast<int>(report.entries.size());
    report.entries.push_back(entry);
  }
  return report;
}

LambdaReport scan_rates(const LambdaEvaluator& eval, int grid_upper,
                        bool refine_cliff, int threads) {
  if (grid_upper < 1 || grid_upper > 10)
    throw ConfigError("grid upper end must lie in 1..10");

  std::vector<std::pair<int, int>> points;
  for (int i = 1; i <= grid_upper; ++i) points.emplace_back(i, 10);
  LambdaReport report;
  report.entries = evaluate_points(eval, points, threads);

  if (refine_cliff) {
    int last_feasible = 0;
    for (int i = 0; i < grid_upper; ++i)
      if (report.entries[i].feasible) last_feasible = i + 1;
    if (last_feasible >= 1 && last_feasible < grid_upper) {
      std::vector<std::pair<int, int>> fine;
      for (int h = 1; h <= 9; ++h) fine.emplace_back(10 * last_feasible + h, 100);
      auto extra = evaluate_points(eval, fine, threads);
      report.entries.insert(report.entries.end(), extra.begin(), extra.end());
      std::sort(report.entries.begin(), report.entries.end(), rate_less);
    }
  }

  report.best_index = pick_best(report.entries);
  if (report.best_index < 0)
    throw AllInfeasibleError("every rate on the grid violates the energy budget");
  return report;
}

LambdaEvaluator cmdp_evaluator(const SystemParams& p, const SensorConfig& base,
                               const SolverSettings& settings) {
  return [p, base, settings](int rate_num, int rate_den) {
    SensorConfig cfg = base;
    cfg.rate_num = rate_num;
    cfg.rate_den = rate_den;
    if (base.age_cap == 0) cfg.age_cap = default_age_cap(rate_num, rate_den, cfg.queue_cap);
    validate(cfg);

    LambdaEntry entry;
    entry.rate_num = rate_num;
    entry.rate_den = rate_den;
    try {
      auto mp = std::make_shared<MixedPolicy>(solve_cmdp(p, cfg, settings));
      entry.feasible = true;
      entry.avg_aoi = mp->avg_aoi;
      entry.avg_cost = mp->avg_cost;
      entry.theta = mp->theta;
      entry.policy = std::move(mp);
    } catch (const NoFeasiblePolicyError&) {
      entry.feasible = false;
      entry.avg_aoi = std::numeric_limits<double>::infinity();
      entry.avg_cost = 0.0;
      entry.theta = 0.0;
    }
    return entry;
  };
}

LambdaReport optimize_sampling_rate(const SystemParams& p, const SensorConfig& base,
                                    const SolverSettings& settings, int grid_upper) {
  return bisect_rate(cmdp_evaluator(p, base, settings), grid_upper);
}

LambdaReport grid_search(const SystemParams& p, const SensorConfig& base,
                         const SolverSettings& settings, int grid_upper,
                         bool refine_cliff, int threads) {
  return scan_rates(cmdp_evaluator(p, base, settings), grid_upper, refine_cliff, threads);
}

}  // namespace aoi

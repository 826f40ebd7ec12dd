#pragma once

// Monte Carlo driver. Replication r of every pi0 grid point uses seed
// base_seed + r; one p-value sample per (pi0, r) is shared by all estimators.
// Work is split across a thread pool by (pi0, r), and results are written into
// fixed slots, so the output never depends on the thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pinull/bh.hpp"
#include "pinull/dependence.hpp"
#include "pinull/patra_sen.hpp"
#include "pinull/scenario.hpp"
#include "pinull/storey.hpp"

namespace pinull {

struct ReplicationSummary {
  std::string scenario;
  std::string estimator;
  double pi0_true = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double sd = 0.0;  // denominator R - 1; 0 for a single replication
  std::size_t replications = 0;
};

inline ReplicationSummary summarize(std::string scenario, std::string estimator, double pi0_true,
                                    std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  ReplicationSummary s{std::move(scenario), std::move(estimator), pi0_true, 0, 0, 0, 0, values.size()};
  const double R = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / R;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = values.size() > 1 ? std::sqrt(ss / (R - 1.0)) : 0.0;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  const std::size_t h = values.size() / 2;
  s.median = values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
  return s;
}

/// Every pi0_hat of a scenario run. Grid points are sorted by pi0, estimators by name.
struct ScenarioRuns {
  std::string scenario;
  std::vector<double> pi0s;
  std::vector<EstimatorKind> estimators;
  std::vector<std::vector<std::vector<double>>> estimates;  // [pi0][estimator][replication]

  std::vector<ReplicationSummary> summaries() const {
    std::vector<ReplicationSummary> out;
    for (std::size_t p = 0; p < pi0s.size(); ++p)
      for (std::size_t e = 0; e < estimators.size(); ++e)
        out.push_back(summarize(scenario, to_string(estimators[e]), pi0s[p], estimates[p][e]));
    return out;
  }
};

/// Evaluates the selected estimators on one sample, reusing the parts that only
/// depend on the scenario. Immutable after construction and safe to share.
class ScenarioEstimators {
public:
  explicit ScenarioEstimators(const Scenario& s)
      : params_(s.params),
        grid_(s.params.lambda_grid ? LambdaGrid(*s.params.lambda_grid) : LambdaGrid::standard()) {
    if (s.uses(EstimatorKind::storey_smoother)) smoother_.emplace(grid_);
  }

  double operator()(EstimatorKind k, std::span<const double> p, std::uint64_t seed) const {
    const double step = params_.gamma_step.value_or(0.001);
    switch (k) {
      case EstimatorKind::bh:
        return bh_estimate(p).pi0_hat;
      case EstimatorKind::storey_smoother:
        return (*smoother_)(p).pi0_hat;
      case EstimatorKind::storey_bootstrap:
        return storey_bootstrap(p, grid_, *params_.B, seed).pi0_hat;
      case EstimatorKind::patra_sen_fixed:
        return estimate_pi1(p, UniformCdf{}, params_.c_n.value_or(cn_fixed(p.size())), step).pi0_hat();
      case EstimatorKind::patra_sen_cv:
        return estimate_pi1_cv(p, UniformCdf{}, *params_.candidate_cs, *params_.folds, seed, step).pi0_hat();
    }
    throw std::logic_error("unhandled estimator");
  }

private:
  EstimatorParams params_;
  LambdaGrid grid_;
  std::optional<StoreySmoother> smoother_;
};

/// threads = 0 uses the hardware concurrency.
inline ScenarioRuns run_scenario_raw(const Scenario& s, unsigned threads = 0) {
  s.validate();
  ScenarioRuns runs;
  runs.scenario = s.name;
  runs.pi0s = s.pi0_list;
  std::stable_sort(runs.pi0s.begin(), runs.pi0s.end());
  runs.estimators.assign(s.estimators.begin(), s.estimators.end());
  std::sort(runs.estimators.begin(), runs.estimators.end(), [](EstimatorKind a, EstimatorKind b) {
    return std::string_view(to_string(a)) < std::string_view(to_string(b));
  });
  const std::size_t P = runs.pi0s.size(), E = runs.estimators.size(), R = s.replications;
  runs.estimates.assign(P, std::vector<std::vector<double>>(E, std::vector<double>(R)));

  const ScenarioEstimators estimate(s);
  const std::size_t tasks = P * R;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks;) {
      const std::size_t p = t / R, r = t % R;
      try {
        GaussianMixtureSpec mix = s.mixture;
        mix.pi0 = runs.pi0s[p];
        const std::uint64_t seed = s.base_seed + r;
        const auto sample = generate_sample(s.n, s.dependence, mix, seed);
        for (std::size_t e = 0; e < E; ++e)
          runs.estimates[p][e][r] = estimate(runs.estimators[e], sample.pvalues, seed);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tasks);
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return runs;
}

inline std::vector<ReplicationSummary> run_scenario(const Scenario& s, unsigned threads = 0) {
  return run_scenario_raw(s, threads).summaries();
}

inline constexpr const char* kCsvHeader = "scenario,estimator,pi0_true,mean,median,min,sd,replications";

inline void write_csv(const std::vector<ReplicationSummary>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%zu", r.pi0_true, r.mean, r.median, r.min,
                  r.sd, r.replications);
    out << r.scenario << ',' << r.estimator << ',' << buf << '\n';
  }
}

inline void write_csv(const std::vector<ReplicationSummary>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::vector<ReplicationSummary> read_csv(std::istream& in, const std::string& origin = "<csv>") {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::invalid_argument(origin + ": missing or unexpected header");
  std::vector<ReplicationSummary> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::vector<std::string_view> f = detail::split_list(line);
    if (f.size() != 8) throw std::invalid_argument(where + ": expected 8 fields");
    ReplicationSummary r;
    r.scenario = std::string(f[0]);
    r.estimator = std::string(f[1]);
    r.pi0_true = detail::parse_double(f[2], where);
    r.mean = detail::parse_double(f[3], where);
    r.median = detail::parse_double(f[4], where);
    r.min = detail::parse_double(f[5], where);
    r.sd = detail::parse_double(f[6], where);
    r.replications = detail::parse_unsigned(f[7], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<ReplicationSummary> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return read_csv(in, path);
}

}  // namespace pinull

// pinull: estimate pi0 from a p-value file, run simulation scenarios, and run
// the oracle self-checks.
//
// Exit codes: 0 success, 2 usage or input error, 1 internal failure (or a
// failed oracle check).

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pinull/bh.hpp"
#include "pinull/harness.hpp"
#include "pinull/oracles.hpp"
#include "pinull/patra_sen.hpp"
#include "pinull/scenario.hpp"
#include "pinull/storey.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kUsage = 2;

// Bad user input; reported with exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<double> read_pvalues(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<double> p;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = pinull::detail::trim(line);
    if (t.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
      throw InputError(path + ":" + std::to_string(lineno) + ": not a number: '" + std::string(t) + "'");
    if (!(v > 0.0 && v < 1.0))
      throw InputError(path + ":" + std::to_string(lineno) + ": p-value " + std::string(t) +
                       " outside (0,1)");
    p.push_back(v);
  }
  if (p.empty()) throw InputError(path + ": no p-values");
  return p;
}

struct EstimateArgs {
  std::string estimator;
  std::string file;
  std::optional<double> lambda;
  std::optional<std::size_t> B;
  std::optional<double> cn;
  bool cn_cv = false;
  std::uint64_t seed = 0;
};

void print_result(const pinull::EstimateResult& r) {
  std::cout << "estimator=" << r.estimator << '\n' << "pi0_hat=" << fmt(r.pi0_hat) << '\n';
}

int cmd_estimate(const EstimateArgs& a) {
  const auto reject = [&](bool given, const char* flag) {
    if (given) throw InputError(std::string(flag) + " does not apply to --estimator " + a.estimator);
  };
  reject(a.lambda && a.estimator != "storey-fixed", "--lambda");
  reject(a.B && a.estimator != "storey-bootstrap", "--B");
  reject((a.cn || a.cn_cv) && a.estimator != "patra-sen", "--cn/--cn-cv");

  const auto p = read_pvalues(a.file);

  if (a.estimator == "bh") {
    if (p.size() < 2) throw InputError("bh needs at least 2 p-values");
    const auto est = pinull::bh_estimate(p);
    print_result(est.to_result());
    std::cout << "j=" << (est.j ? std::to_string(*est.j) : std::string("none")) << '\n'
              << "n_hat0=" << est.n_hat0 << '\n';
  } else if (a.estimator == "storey-fixed") {
    const double lambda = a.lambda.value_or(0.5);
    if (!(lambda >= 0.0 && lambda < 1.0)) throw InputError("--lambda must lie in [0,1)");
    const double raw = pinull::storey_at(p, lambda);
    print_result({"storey_fixed", std::min(raw, 1.0), {}});
    std::cout << "lambda=" << fmt(lambda) << '\n' << "pi0_raw=" << fmt(raw) << '\n';
  } else if (a.estimator == "storey-smoother") {
    const auto r = pinull::storey_smoother(p, pinull::LambdaGrid::standard());
    print_result(r);
    std::cout << "f_hat_1=" << fmt(*r.find("f_hat_1")) << '\n';
  } else if (a.estimator == "storey-bootstrap") {
    const std::size_t B = a.B.value_or(100);
    if (B < 1) throw InputError("--B must be >= 1");
    const auto r = pinull::storey_bootstrap(p, pinull::LambdaGrid::standard(), B, a.seed);
    print_result(r);
    std::cout << "lambda_star=" << fmt(*r.find("lambda_star")) << '\n'
              << "mse=" << fmt(*r.find("mse")) << '\n'
              << "plug_in=" << fmt(*r.find("plug_in")) << '\n'
              << "B=" << B << '\n';
  } else {
    pinull::PatraSenEstimate est;
    if (a.cn_cv) {
      const std::vector<double> candidates{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
      if (p.size() / 10 < 2) throw InputError("--cn-cv needs at least 20 p-values");
      est = pinull::estimate_pi1_cv(p, pinull::UniformCdf{}, candidates, 10, a.seed);
    } else {
      double cn = 0.0;
      if (a.cn) {
        if (!(*a.cn > 0.0)) throw InputError("--cn must be > 0");
        cn = *a.cn;
      } else {
        if (p.size() < 3) throw InputError("the default c_n needs at least 3 p-values; pass --cn");
        cn = pinull::cn_fixed(p.size());
      }
      est = pinull::estimate_pi1(p, pinull::UniformCdf{}, cn);
    }
    print_result(est.to_result());
    std::cout << "pi1_hat=" << fmt(est.pi1_hat) << '\n'
              << "c_n=" << fmt(est.c_n) << '\n'
              << "c_n_method=" << pinull::to_string(est.method) << '\n';
  }
  return kOk;
}

std::string describe(const pinull::Scenario& s) {
  std::string est;
  for (auto e : s.estimators) est += (est.empty() ? "" : ",") + std::string(pinull::to_string(e));
  std::string grid;
  for (double v : s.pi0_list) {
    std::string x = std::to_string(v);
    while (x.back() == '0') x.pop_back();
    if (x.back() == '.') x.pop_back();
    grid += (grid.empty() ? "" : ",") + x;
  }
  return s.name + "\tn=" + std::to_string(s.n) + "\t" + s.dependence.describe() + "\tpi0=" + grid +
         "\testimators=" + est + "\tR=" + std::to_string(s.replications);
}

int cmd_scenarios() {
  for (const auto& [name, s] : pinull::builtin_scenarios()) std::cout << describe(s) << '\n';
  return kOk;
}

int cmd_simulate(const std::string& which, std::optional<std::string> out, std::optional<unsigned> threads,
                 std::optional<std::uint64_t> seed) {
  const auto presets = pinull::builtin_scenarios();
  pinull::Scenario s;
  if (auto it = presets.find(which); it != presets.end()) {
    s = it->second;
  } else if (std::filesystem::is_regular_file(which)) {
    try {
      s = pinull::load_scenario_file(which);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  } else {
    std::string names;
    for (const auto& [name, _] : presets) names += "\n  " + name;
    throw InputError("unknown scenario '" + which + "'; available:" + names);
  }
  if (seed) s.base_seed = *seed;
  const std::string path = out.value_or(s.name + ".csv");

  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = pinull::run_scenario(s, threads.value_or(0));
  pinull::write_csv(rows, path);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;

  std::cout << "scenario=" << s.name << " rows=" << rows.size() << " replications=" << s.replications
            << " out=" << path << '\n';
  std::cerr << "elapsed=" << fmt(dt.count()) << "s\n";
  return kOk;
}

int cmd_oracle(const std::string& check) {
  const auto& names = pinull::oracle_names();
  if (std::find(names.begin(), names.end(), check) == names.end()) {
    std::string list;
    for (const auto& n : names) list += " " + n;
    throw InputError("unknown check '" + check + "'; available:" + list);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = pinull::run_oracle(check);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  std::cout << "check=" << rep.check << '\n';
  for (const auto& [k, v] : rep.stats) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    std::cout << k << '=' << buf << '\n';
  }
  std::cout << "result=" << (rep.passed ? "pass" : "fail") << '\n';
  std::cerr << "elapsed=" << fmt(dt.count()) << "s\n";
  return rep.passed ? kOk : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pi0 estimation for multiple testing: estimators, simulations, self-checks"};
  app.require_subcommand(1);

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "estimate pi0 from a file with one p-value per line");
  est->add_option("--estimator", ea.estimator, "estimator")
      ->required()
      ->check(CLI::IsMember({"bh", "storey-fixed", "storey-smoother", "storey-bootstrap", "patra-sen"}));
  est->add_option("--lambda", ea.lambda, "lambda for storey-fixed (default 0.5)");
  est->add_option("--B", ea.B, "bootstrap resamples for storey-bootstrap (default 100)");
  auto* cn = est->add_option("--cn", ea.cn, "fixed c_n for patra-sen (default 0.1 log log n)");
  est->add_flag("--cn-cv", ea.cn_cv, "choose c_n for patra-sen by 10-fold cross-validation")->excludes(cn);
  est->add_option("--seed", ea.seed, "seed for bootstrap resampling and CV folds");
  est->add_option("FILE", ea.file, "p-value file")->required();

  std::string scenario;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> sim_seed;
  auto* sim = app.add_subcommand("simulate", "run a builtin scenario or a scenario file and write CSV");
  sim->add_option("--out", out, "output CSV (default <scenario>.csv)");
  sim->add_option("--threads", threads, "worker threads (default: hardware concurrency)")
      ->check(CLI::Range(1u, 4096u));
  sim->add_option("--seed", sim_seed, "override the scenario's base seed");
  sim->add_option("SCENARIO", scenario, "preset name or path to a key=value file")->required();

  auto* list = app.add_subcommand("scenarios", "list builtin scenarios");

  std::string check;
  auto* orc = app.add_subcommand("oracle", "run a self-check: j_law, storey_limit, pava_bruteforce, curve_identity");
  orc->add_option("CHECK", check, "check name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*est) return cmd_estimate(ea);
    if (*sim) return cmd_simulate(scenario, out, threads, sim_seed);
    if (*list) return cmd_scenarios();
    if (*orc) return cmd_oracle(check);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

// irt: command-line front end (test, simulate, verify).

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "irt/error.hpp"
#include "irt/io.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    irt::fail(irt::ErrorCode::InvalidArgument, "'" + s + "' is not a number");
  }
  if (used != s.size()) irt::fail(irt::ErrorCode::InvalidArgument, "'" + s + "' is not a number");
  return v;
}

// "lo:hi:step" or a comma list.
std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const double lo = to_double(parts[0]);
    const double hi = to_double(parts[1]);
    const double step = to_double(parts[2]);
    if (!(step > 0.0) || hi < lo) irt::fail(irt::ErrorCode::InvalidArgument, "bad grid '" + text + "'");
    const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
  }
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(to_double(s));
  if (out.empty()) irt::fail(irt::ErrorCode::InvalidArgument, "empty grid");
  return out;
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("IRT_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto seed = std::stoull(v, &used);
    if (used == std::string(v).size()) return seed;
  } catch (const std::exception&) {
  }
  irt::fail(irt::ErrorCode::InvalidArgument, std::string("IRT_SEED='") + v + "' is not an unsigned integer");
}

// Flag, then IRT_SEED, then the fallback (config). Never the clock.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const std::optional<std::uint64_t>& fallback) {
  if (flag) return *flag;
  if (auto e = env_seed()) return *e;
  if (fallback) return *fallback;
  irt::fail(irt::ErrorCode::ValidationError, "a seed is required (--seed, IRT_SEED, or config 'seed')");
}

irt::Law parse_base(const std::string& name) {
  if (name == "normal") return irt::Law::normal(0.0, 1.0);
  if (name == "chi2") return irt::Law::chi_squared(4.0);
  if (name == "t") return irt::Law::student_t(4.0);
  if (name == "binomial") return irt::Law::binomial(100, 0.1);
  if (name == "bernoulli") return irt::Law::bernoulli(0.5);
  irt::fail(irt::ErrorCode::InvalidArgument, "unknown base law '" + name + "'");
}

void emit(const std::string& out, const std::string& text, const std::string& command, const std::string& digest,
          std::uint64_t seed) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  irt::write_text(out, text);
  irt::write_text(out + ".meta.json", irt::meta_json(command, digest, seed));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imputation-based randomization tests under interference"};
  app.set_version_flag("--version", irt::version());
  app.require_subcommand(1);

  unsigned threads = 0;
  std::optional<std::uint64_t> seed_flag;
  std::string out;

  auto* test = app.add_subcommand("test", "Run one test from a JSON config");
  std::string config;
  std::optional<std::size_t> k_flag;
  test->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  test->add_option("--seed", seed_flag, "Seed; overrides IRT_SEED and the config");
  test->add_option("--k", k_flag, "Monte Carlo draws; overrides the config");
  test->add_option("--out", out, "Result JSON path (stdout when omitted)");
  test->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* simulate = app.add_subcommand("simulate", "Rejection-rate study on a simulated scenario");
  std::string scenario = "clustered";
  std::size_t n_units = 0;
  std::size_t clusters = 75;
  double radius = 0.01;
  double p = 0.8;
  std::string base = "normal";
  std::string tau_grid = "0,1";
  std::string methods = "oracle,empirical,parametric,kernel";
  double alpha = 0.05;
  std::size_t datasets = 10;
  std::size_t experiments = 1000;
  std::size_t k = irt::kDefaultDraws;
  bool fast = false;
  simulate->add_option("--scenario", scenario, "clustered or spatial")->check(CLI::IsMember({"clustered", "spatial"}));
  simulate->add_option("--N", n_units, "Units (300 clustered, 1000 spatial by default)");
  simulate->add_option("--K", clusters, "Clusters (clustered)");
  simulate->add_option("--radius", radius, "Interference radius (spatial)");
  simulate->add_option("--p", p, "Bernoulli treatment probability (spatial)");
  simulate->add_option("--base", base, "Base law of Y(0): normal, chi2, t, binomial, bernoulli");
  simulate->add_option("--tau-grid", tau_grid, "lo:hi:step or a comma list");
  simulate->add_option("--methods", methods, "Comma list of oracle, empirical, parametric, kernel");
  simulate->add_option("--alpha", alpha, "Significance level");
  simulate->add_option("--datasets", datasets, "Datasets per tau");
  simulate->add_option("--experiments", experiments, "Experiments per dataset");
  simulate->add_option("--k", k, "Monte Carlo draws per test");
  simulate->add_flag("--fast", fast, "5 datasets x 200 experiments");
  simulate->add_option("--seed", seed_flag, "Seed; overrides IRT_SEED");
  simulate->add_option("--out", out, "CSV path (stdout when omitted)");
  simulate->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* verify = app.add_subcommand("verify", "Likelihood-ratio product curves");
  std::string verify_scenario = "nig_normal";
  std::string rates = "0.5,0.6,0.7";
  std::string grid = "100,1000,10000,100000";
  std::size_t reps = 1000;
  double anchor = 0.5;
  bool verify_fast = false;
  verify->add_option("--scenario", verify_scenario,
                     "nig_normal, kernel_normal, beta_binomial, empirical_binomial, or all");
  verify->add_option("--rates", rates, "Comma list of exponents");
  verify->add_option("--grid", grid, "Comma list of N");
  verify->add_option("--reps", reps, "Repetitions per point");
  verify->add_option("--anchor", anchor, "Missing rate at N = 100");
  verify->add_flag("--fast", verify_fast, "100 repetitions");
  verify->add_option("--seed", seed_flag, "Seed; overrides IRT_SEED");
  verify->add_option("--out", out, "CSV path (stdout when omitted)");
  verify->add_option("--threads", threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (test->parsed()) {
      irt::Experiment experiment = irt::load_experiment(config);
      if (k_flag) {
        if (*k_flag < 1) irt::fail(irt::ErrorCode::ValidationError, "k must be at least 1");
        experiment.k = *k_flag;
      }
      const std::uint64_t seed = resolve_seed(seed_flag, experiment.seed);
      const irt::TestReport report = irt::run_experiment(experiment, seed, threads);
      if (report.warning) std::cerr << "warning: " << *report.warning << "\n";
      emit(out, irt::result_json(experiment, report), "test", experiment.digest, seed);
    } else if (simulate->parsed()) {
      const std::uint64_t seed = resolve_seed(seed_flag, std::nullopt);
      irt::StudyOptions options;
      options.taus = parse_grid(tau_grid);
      options.methods.clear();
      for (const auto& m : split(methods, ',')) options.methods.push_back(irt::parse_method(m));
      options.alpha = alpha;
      options.n_datasets = fast ? 5 : datasets;
      options.n_experiments = fast ? 200 : experiments;
      options.k = k;
      options.seed = seed;
      options.threads = threads;
      irt::ScenarioConfig sc;
      if (scenario == "clustered") {
        sc = irt::ClusteredConfig{n_units == 0 ? 300 : n_units, clusters, parse_base(base)};
      } else {
        sc = irt::SpatialConfig{n_units == 0 ? 1000 : n_units, radius, p, parse_base(base)};
      }
      std::ostringstream key;
      key << "simulate " << irt::scenario_id(sc) << " taus=" << tau_grid << " methods=" << methods
          << " alpha=" << alpha << " datasets=" << options.n_datasets << " experiments=" << options.n_experiments
          << " k=" << k;
      const irt::RejectionTable table = irt::run_rejection_study(sc, options);
      emit(out, irt::rejection_csv(table), "simulate", irt::sha256_hex(key.str()), seed);
    } else if (verify->parsed()) {
      const std::uint64_t seed = resolve_seed(seed_flag, std::nullopt);
      const std::size_t r = verify_fast ? 100 : reps;
      std::vector<irt::VerifyScenario> scenarios;
      if (verify_scenario == "all") {
        scenarios = {irt::VerifyScenario::NigNormal, irt::VerifyScenario::KernelNormal,
                     irt::VerifyScenario::BetaBinomial, irt::VerifyScenario::EmpiricalBinomial};
      } else {
        scenarios.push_back(irt::parse_verify_scenario(verify_scenario));
      }
      std::vector<std::size_t> n_grid;
      for (double v : parse_grid(grid)) n_grid.push_back(static_cast<std::size_t>(v));
      std::vector<irt::LrCurvePoint> points;
      for (std::size_t s = 0; s < scenarios.size(); ++s) {
        for (double rate : parse_grid(rates)) {
          const auto curve = irt::lr_expectation_curve(scenarios[s], n_grid, rate, r,
                                                       irt::Rng::derive(seed, irt::Stream::Dataset,
                                                                        static_cast<std::uint64_t>(scenarios[s])),
                                                       threads, anchor);
          points.insert(points.end(), curve.begin(), curve.end());
        }
      }
      std::ostringstream key;
      key << "verify " << verify_scenario << " rates=" << rates << " grid=" << grid << " reps=" << r
          << " anchor=" << anchor;
      emit(out, irt::curve_csv(points), "verify", irt::sha256_hex(key.str()), seed);
    }
  } catch (const irt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == irt::ErrorCode::ResampleBudgetExceeded) return kExitBudget;
    if (e.code() == irt::ErrorCode::IoError) return 1;
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

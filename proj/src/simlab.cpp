#include "irt/simlab.hpp"

#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <sstream>

#include "irt/error.hpp"
#include "irt/irt.hpp"
#include "irt/parallel.hpp"

namespace irt {

namespace {

struct MixtureComponent {
  double share;
  double mx;
  double my;
  double sd;
};

constexpr MixtureComponent kMixture[] = {
    {0.5, 0.5, 0.5, 0.1},
    {0.3, 0.25, 0.75, 0.075},
    {0.2, 0.3, 0.3, 0.075},
};

std::vector<std::vector<double>> additive_outcomes(const Law& base, std::size_t n, double tau, Rng& rng) {
  std::vector<std::vector<double>> y(3, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    y[0][i] = base.sample(rng);
    y[1][i] = y[0][i] + tau;
    y[2][i] = y[0][i] + tau;
  }
  return y;
}

OutcomeType outcome_of(const Law& law) {
  return law.is_discrete() ? OutcomeType::Discrete : OutcomeType::Continuous;
}

std::string format_number(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

}  // namespace

std::vector<double> Scenario::observe(const ExposureVector& exposures) const {
  std::vector<double> y(size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = potential[static_cast<std::size_t>(exposures[i])][i];
  return y;
}

std::string law_tag(const Law& law) {
  switch (law.family()) {
    case Law::Family::Normal: return "normal";
    case Law::Family::ChiSquared: return "chi2";
    case Law::Family::StudentT: return "t";
    case Law::Family::Bernoulli: return "bernoulli";
    case Law::Family::Binomial: return "binomial";
    case Law::Family::PointMass: return "point";
  }
  return "law";
}

std::string scenario_id(const ScenarioConfig& config) {
  if (const auto* c = std::get_if<ClusteredConfig>(&config)) {
    return "clustered_N" + std::to_string(c->n) + "_K" + std::to_string(c->clusters) + "_" + law_tag(c->base_law);
  }
  const auto& s = std::get<SpatialConfig>(config);
  return "spatial_N" + std::to_string(s.n) + "_r" + format_number(s.radius) + "_p" + format_number(s.p) + "_" +
         law_tag(s.base_law);
}

Scenario gen_clustered(const ClusteredConfig& config, double tau, Rng& rng) {
  if (config.clusters < 2 || config.n % config.clusters != 0) {
    fail(ErrorCode::IndivisibleN,
         std::to_string(config.clusters) + " clusters do not divide " + std::to_string(config.n) + " units");
  }
  const std::size_t size = config.n / config.clusters;
  std::vector<int> memberships(config.n);
  for (std::size_t i = 0; i < config.n; ++i) memberships[i] = static_cast<int>(i / size);
  auto mapping = ExposureMapping::three_level(cluster_network(memberships));
  auto design = Design::two_stage(memberships);
  auto potential = additive_outcomes(config.base_law, config.n, tau, rng);
  return Scenario{scenario_id(config),      std::move(mapping), std::move(design),     0, 1, tau,
                  config.base_law, outcome_of(config.base_law), std::move(potential)};
}

Scenario gen_spatial(const SpatialConfig& config, double tau, Rng& rng) {
  std::vector<Point2> coords;
  coords.reserve(config.n);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < std::size(kMixture); ++c) {
    const auto& comp = kMixture[c];
    const std::size_t count = c + 1 == std::size(kMixture)
                                  ? config.n - assigned
                                  : static_cast<std::size_t>(std::llround(comp.share * static_cast<double>(config.n)));
    boost::random::normal_distribution<double> gx(comp.mx, comp.sd);
    boost::random::normal_distribution<double> gy(comp.my, comp.sd);
    for (std::size_t i = 0; i < count; ++i) {
      const double x = gx(rng);
      coords.push_back({x, gy(rng)});
    }
    assigned += count;
  }
  auto mapping = ExposureMapping::three_level(spatial_network(coords, config.radius));
  auto design = Design::bernoulli(config.n, config.p);
  auto potential = additive_outcomes(config.base_law, config.n, tau, rng);
  return Scenario{scenario_id(config),      std::move(mapping), std::move(design),     0, 1, tau,
                  config.base_law, outcome_of(config.base_law), std::move(potential)};
}

Scenario generate(const ScenarioConfig& config, double tau, Rng& rng) {
  if (const auto* c = std::get_if<ClusteredConfig>(&config)) return gen_clustered(*c, tau, rng);
  return gen_spatial(std::get<SpatialConfig>(config), tau, rng);
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Oracle: return "oracle";
    case Method::Empirical: return "empirical";
    case Method::Parametric: return "parametric";
    case Method::Kernel: return "kernel";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (auto m : {Method::Oracle, Method::Empirical, Method::Parametric, Method::Kernel}) {
    if (to_string(m) == name) return m;
  }
  fail(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

ImputerSpec method_spec(Method method, const Scenario& scenario) {
  switch (method) {
    case Method::Oracle: return OracleSpec{scenario.base_law};
    case Method::Empirical: return EmpiricalSpec{};
    case Method::Kernel:
      if (scenario.outcome == OutcomeType::Discrete) return EmpiricalSpec{};
      return KernelSpec{};
    case Method::Parametric:
      if (scenario.outcome == OutcomeType::Continuous) return NigSpec{};
      if (scenario.base_law.family() == Law::Family::Binomial) {
        return BetaBinomialSpec{static_cast<int>(scenario.base_law.param1()), 1.0, 1.0};
      }
      return BetaBinomialSpec{1, 1.0, 1.0};
  }
  return EmpiricalSpec{};
}

RejectionTable run_rejection_study(const ScenarioConfig& config, const StudyOptions& options) {
  if (options.n_datasets < 1 || options.n_experiments < 1 || options.k < 1) {
    fail(ErrorCode::InvalidArgument, "datasets, experiments and k must all be at least 1");
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must be in (0,1)");
  const std::string id = scenario_id(config);
  const std::size_t n_methods = options.methods.size();
  const std::size_t n_exp = options.n_experiments;

  RejectionTable table;
  for (std::size_t ti = 0; ti < options.taus.size(); ++ti) {
    const double tau = options.taus[ti];
    const std::uint64_t tau_key = Rng::derive(options.seed, Stream::Dataset, ti);
    // outcome[m][d * n_exp + e]: 1 reject, 0 accept, -1 skipped.
    std::vector<std::vector<signed char>> outcome(n_methods,
                                                  std::vector<signed char>(options.n_datasets * n_exp, 0));
    for (std::size_t d = 0; d < options.n_datasets; ++d) {
      const std::uint64_t dataset_key = Rng::derive(tau_key, Stream::Dataset, d);
      Rng gen_rng(dataset_key);
      const Scenario scenario = generate(config, tau, gen_rng);
      const StatisticContext ctx(scenario.mapping, scenario.a, scenario.b);
      std::vector<ImputerSpec> specs;
      for (Method m : options.methods) specs.push_back(method_spec(m, scenario));

      parallel_for(n_exp, options.threads, [&](std::size_t e) {
        const std::uint64_t exp_key = Rng::derive(dataset_key, Stream::Experiment, e);
        Rng z_rng(exp_key);
        const Assignment z_obs = scenario.design.sample(z_rng);
        const ExposureVector exposures = scenario.mapping(z_obs);
        const std::size_t slot = d * n_exp + e;
        if (!diff_in_means(exposures, scenario.potential[0], scenario.a, scenario.b)) {
          for (auto& row : outcome) row[slot] = -1;
          return;
        }
        const std::vector<double> y = scenario.observe(exposures);
        const PartialTheta partial = observed_theta(exposures, y, scenario.a, scenario.b);
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
          const Imputer imputer = Imputer::fit(specs[mi], partial);
          const std::uint64_t seed =
              Rng::derive(exp_key, Stream::Method, static_cast<std::uint64_t>(options.methods[mi]));
          const IrtResult r = irt_pvalue(scenario.design, ctx, partial, imputer, z_obs, options.k, seed);
          outcome[mi][slot] = r.p_hat <= options.alpha ? 1 : 0;
        }
      });
    }

    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      RejectionRow row;
      row.scenario = id;
      row.method = to_string(options.methods[mi]);
      row.tau = tau;
      std::size_t rejected = 0;
      for (std::size_t d = 0; d < options.n_datasets; ++d) {
        std::size_t dr = 0;
        std::size_t dn = 0;
        for (std::size_t e = 0; e < n_exp; ++e) {
          const signed char o = outcome[mi][d * n_exp + e];
          if (o < 0) {
            ++row.skipped;
            continue;
          }
          ++dn;
          dr += static_cast<std::size_t>(o);
        }
        rejected += dr;
        row.replications += dn;
        row.dataset_rates.push_back(dn > 0 ? static_cast<double>(dr) / static_cast<double>(dn) : 0.0);
      }
      if (row.replications > 0) {
        const double rate = static_cast<double>(rejected) / static_cast<double>(row.replications);
        row.rejection_rate = rate;
        row.std_error = std::sqrt(rate * (1.0 - rate) / static_cast<double>(row.replications));
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace irt

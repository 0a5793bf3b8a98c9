#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "irt/designs.hpp"
#include "irt/distributions.hpp"
#include "irt/imputation.hpp"
#include "irt/network.hpp"
#include "irt/rng.hpp"

namespace irt {

enum class OutcomeType { Continuous, Discrete };

/// One simulated dataset: network, design, contrast and fixed potential
/// outcomes indexed by exposure level. Y(1) = Y(0) + tau, and Y(2) is set to
/// Y(0) + tau as well (it never enters the (0, 1) contrast).
struct Scenario {
  std::string id;
  ExposureMapping mapping;
  Design design;
  int a = 0;
  int b = 1;
  double tau = 0.0;
  Law base_law;
  OutcomeType outcome = OutcomeType::Continuous;
  std::vector<std::vector<double>> potential;  // potential[e][i] = Y_i(e)

  std::size_t size() const noexcept { return design.size(); }
  /// y_i = Y_i(m_i(z)).
  std::vector<double> observe(const ExposureVector& exposures) const;
};

struct ClusteredConfig {
  std::size_t n = 300;
  std::size_t clusters = 75;
  Law base_law = Law::normal(0.0, 1.0);
};

struct SpatialConfig {
  std::size_t n = 1000;
  double radius = 0.01;
  double p = 0.8;
  Law base_law = Law::normal(0.0, 1.0);
};

using ScenarioConfig = std::variant<ClusteredConfig, SpatialConfig>;

/// Short name for a base law, e.g. "normal", "chi2", "t".
std::string law_tag(const Law& law);
std::string scenario_id(const ScenarioConfig& config);

/// Equal clusters of n / K units on the cluster network, two-stage design.
/// Throws IndivisibleN when K does not divide n.
Scenario gen_clustered(const ClusteredConfig& config, double tau, Rng& rng);
/// Coordinates from the three-component Gaussian mixture with weights
/// 0.5 / 0.3 / 0.2 of n, radius network, Bernoulli(p) design.
Scenario gen_spatial(const SpatialConfig& config, double tau, Rng& rng);
Scenario generate(const ScenarioConfig& config, double tau, Rng& rng);

/// Imputation methods compared in the studies. Parametric means NIG for
/// continuous outcomes and beta-binomial for discrete ones.
enum class Method { Oracle, Empirical, Parametric, Kernel };

std::string to_string(Method method);
/// Accepts oracle, empirical, parametric, kernel.
Method parse_method(const std::string& name);
ImputerSpec method_spec(Method method, const Scenario& scenario);

struct StudyOptions {
  std::vector<double> taus{0.0};
  std::vector<Method> methods{Method::Oracle, Method::Empirical, Method::Parametric, Method::Kernel};
  double alpha = 0.05;
  std::size_t n_datasets = 10;
  std::size_t n_experiments = 1000;
  std::size_t k = 2000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct RejectionRow {
  std::string scenario;
  std::string method;
  double tau = 0.0;
  double rejection_rate = 0.0;
  double std_error = 0.0;
  std::size_t replications = 0;
  /// Per-dataset rejection rates, in dataset order.
  std::vector<double> dataset_rates;
  /// Experiments skipped because T at Z^obs was undefined.
  std::size_t skipped = 0;
};

struct RejectionTable {
  std::vector<RejectionRow> rows;
};

/// For every tau and dataset, fixes potential outcomes; for every experiment
/// draws Z^obs, forms theta^obs and runs each method's irt_pvalue, rejecting
/// when p_hat <= alpha. Rows are ordered by tau, then method.
RejectionTable run_rejection_study(const ScenarioConfig& config, const StudyOptions& options);

}  // namespace irt

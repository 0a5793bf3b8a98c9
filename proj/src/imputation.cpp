#include "irt/imputation.hpp"

#include <algorithm>
#include <array>
#include <boost/random/beta_distribution.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "irt/error.hpp"

namespace irt {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Kernel sums keep every point whose term is within exp(-kTailDrop) of the
// nearest point's term.
constexpr double kTailDrop = 40.0;
// Binned sums: grid spacing in bandwidths, Hermite terms kept per node, the
// largest nearest-point distance (in bandwidths) served from the grid, and
// when to switch.
constexpr double kBinsPerBandwidth = 20.0;
constexpr std::size_t kMoments = 8;
constexpr double kBinnedMaxNearest = 6.0;
// Beta-binomial fits with at most this many trials keep a pmf table.
constexpr std::size_t kPmfTableMax = std::size_t{1} << 20;
constexpr std::size_t kBinnedMinData = 4096;
constexpr std::size_t kBinnedMinQueries = 16;

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidHyperparameter, what);
}

double mean_of(std::span<const double> xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double centered_ss(std::span<const double> xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Log pmf over 0..m from the ratio P(x+1)/P(x), normalised by log-sum-exp.
// Avoids the cancellation between large lgamma terms.
std::vector<double> beta_binomial_table(const ConjugatePosterior& post) {
  const int m = post.trials;
  std::vector<double> out(static_cast<std::size_t>(m) + 1);
  out[0] = 0.0;
  for (int x = 0; x < m; ++x) {
    out[x + 1] = out[x] + std::log((m - x) * (x + post.alpha)) - std::log((x + 1.0) * (m - x - 1 + post.beta));
  }
  const double top = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double v : out) sum += std::exp(v - top);
  const double log_total = top + std::log(sum);
  for (double& v : out) v -= log_total;
  return out;
}

}  // namespace

std::string to_string(ImputerKind kind) {
  switch (kind) {
    case ImputerKind::Oracle: return "oracle";
    case ImputerKind::Empirical: return "empirical";
    case ImputerKind::Kernel: return "kernel";
    case ImputerKind::NormalKnownVar: return "normal_known_var";
    case ImputerKind::Nig: return "nig";
    case ImputerKind::BetaBinomial: return "beta_binomial";
  }
  return "unknown";
}

double kernel_bandwidth(std::span<const double> observed, double constant) {
  const std::size_t n = observed.size();
  if (n < 2) fail(ErrorCode::DegenerateSample, "bandwidth needs at least 2 observations");
  const double sd = std::sqrt(centered_ss(observed, mean_of(observed)) / static_cast<double>(n - 1));
  if (!(sd > 0.0)) fail(ErrorCode::DegenerateSample, "observed values have zero spread");
  return constant * sd * std::pow(static_cast<double>(n), -0.2);
}

Imputer Imputer::fit(const ImputerSpec& spec, const PartialTheta& partial) {
  const auto observed = partial.observed_values();
  return fit(spec, observed);
}

Imputer Imputer::fit(const ImputerSpec& spec, std::span<const double> observed) {
  for (double x : observed) {
    if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "observed values must be finite");
  }
  Imputer imp;
  const auto n1 = static_cast<double>(observed.size());
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, OracleSpec>) {
          imp.kind_ = ImputerKind::Oracle;
          imp.law_ = s.law;
        } else if constexpr (std::is_same_v<S, EmpiricalSpec> || std::is_same_v<S, KernelSpec>) {
          if (observed.empty()) fail(ErrorCode::EmptyObserved, "no observed values to fit on");
          imp.values_.assign(observed.begin(), observed.end());
          std::sort(imp.values_.begin(), imp.values_.end());
          imp.kind_ = ImputerKind::Empirical;
          if constexpr (std::is_same_v<S, KernelSpec>) {
            if (s.bandwidth) {
              require(*s.bandwidth > 0.0, "kernel bandwidth must be positive");
              imp.kind_ = ImputerKind::Kernel;
              imp.bandwidth_ = *s.bandwidth;
            } else {
              require(s.constant > 0.0, "kernel bandwidth constant must be positive");
              try {
                imp.bandwidth_ = kernel_bandwidth(observed, s.constant);
                imp.kind_ = ImputerKind::Kernel;
              } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateSample) throw;
                imp.warning_ = std::string("kernel fit fell back to empirical: ") + e.what();
              }
            }
          }
        } else if constexpr (std::is_same_v<S, NormalKnownVarSpec>) {
          require(s.sigma2 > 0.0 && s.sigma0_2 > 0.0, "normal_known_var needs sigma2 > 0 and sigma0_2 > 0");
          imp.kind_ = ImputerKind::NormalKnownVar;
          const double precision = 1.0 / s.sigma0_2 + n1 / s.sigma2;
          imp.post_.variance = 1.0 / precision;
          imp.post_.mean = (s.mu0 / s.sigma0_2 + n1 * mean_of(observed) / s.sigma2) / precision;
          imp.post_.predictive_variance = imp.post_.variance + s.sigma2;
        } else if constexpr (std::is_same_v<S, NigSpec>) {
          require(s.alpha0 > 0.0 && s.beta0 > 0.0 && s.kappa0 > 0.0 && std::isfinite(s.mu0),
                  "nig needs alpha0, beta0, kappa0 > 0");
          imp.kind_ = ImputerKind::Nig;
          const double xbar = mean_of(observed);
          auto& p = imp.post_;
          p.kappa = s.kappa0 + n1;
          p.alpha = s.alpha0 + n1 / 2.0;
          p.mean = (s.kappa0 * s.mu0 + n1 * xbar) / p.kappa;
          p.beta = s.beta0 + 0.5 * (centered_ss(observed, xbar) + n1 * s.kappa0 / p.kappa * (xbar - s.mu0) * (xbar - s.mu0));
          p.dof = 2.0 * p.alpha;
          p.variance = p.beta / p.alpha * (1.0 + 1.0 / p.kappa);
        } else if constexpr (std::is_same_v<S, BetaBinomialSpec>) {
          require(s.m >= 1 && s.alpha > 0.0 && s.beta > 0.0, "beta_binomial needs m >= 1 and alpha, beta > 0");
          for (double x : observed) {
            if (x < 0.0 || x > s.m || x != std::floor(x)) {
              fail(ErrorCode::OutOfSupport, "beta_binomial data must be integers in 0..m");
            }
          }
          imp.kind_ = ImputerKind::BetaBinomial;
          const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
          imp.post_.trials = s.m;
          imp.post_.alpha = s.alpha + total;
          imp.post_.beta = s.beta + (n1 * s.m - total);
          if (static_cast<std::size_t>(s.m) <= kPmfTableMax) imp.log_pmf_ = beta_binomial_table(imp.post_);
        }
      },
      spec);
  return imp;
}

bool Imputer::is_discrete() const noexcept {
  switch (kind_) {
    case ImputerKind::Oracle: return law_->is_discrete();
    case ImputerKind::Empirical:
    case ImputerKind::BetaBinomial: return true;
    default: return false;
  }
}

double Imputer::sample(Rng& rng) const {
  switch (kind_) {
    case ImputerKind::Oracle:
      return law_->sample(rng);
    case ImputerKind::Empirical:
      return values_[rng.below(values_.size())];
    case ImputerKind::Kernel:
      return values_[rng.below(values_.size())] + bandwidth_ * boost::random::normal_distribution<double>()(rng);
    case ImputerKind::NormalKnownVar:
      return boost::random::normal_distribution<double>(post_.mean, std::sqrt(post_.predictive_variance))(rng);
    case ImputerKind::Nig:
      return post_.mean + std::sqrt(post_.variance) * boost::random::student_t_distribution<double>(post_.dof)(rng);
    case ImputerKind::BetaBinomial: {
      const double q = boost::random::beta_distribution<double>(post_.alpha, post_.beta)(rng);
      return static_cast<double>(boost::random::binomial_distribution<int, double>(post_.trials, q)(rng));
    }
  }
  return 0.0;
}

std::vector<double> Imputer::draw(const PartialTheta& partial, Rng& rng) const {
  std::vector<double> out = partial.values;
  const auto missing = partial.missing_units();
  draw_missing(missing, rng, out);
  return out;
}

void Imputer::draw_missing(std::span<const std::size_t> missing, Rng& rng, std::span<double> out) const {
  for (std::size_t i : missing) out[i] = sample(rng);
}

double Imputer::predictive_density(double x) const { return std::exp(log_predictive_density(x)); }

double Imputer::log_predictive_density(double x) const {
  switch (kind_) {
    case ImputerKind::Oracle:
      if (law_->is_discrete()) break;
      return law_->log_density(x);
    case ImputerKind::Kernel:
      return kernel_log_density_exact(x);
    case ImputerKind::NormalKnownVar: {
      const double d = x - post_.mean;
      return -kLogSqrt2Pi - 0.5 * std::log(post_.predictive_variance) - d * d / (2.0 * post_.predictive_variance);
    }
    case ImputerKind::Nig: {
      // Location-scale t with 2 alpha_N1 degrees of freedom.
      const double a = post_.alpha;
      const double s2 = post_.variance;
      const double d = x - post_.mean;
      return std::lgamma(a + 0.5) - std::lgamma(a) - 0.5 * std::log(2.0 * a * M_PI * s2) -
             (2.0 * a + 1.0) / 2.0 * std::log1p(d * d / (2.0 * a * s2));
    }
    default:
      break;
  }
  fail(ErrorCode::DiscreteKind, to_string(kind_) + " imputer has a pmf, not a density");
}

std::vector<double> Imputer::log_predictive_density(std::span<const double> xs) const {
  if (kind_ == ImputerKind::Kernel && values_.size() >= kBinnedMinData && xs.size() >= kBinnedMinQueries) {
    return kernel_log_density_binned(xs);
  }
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(log_predictive_density(x));
  return out;
}

double Imputer::kernel_nearest(double x) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), x);
  double d = std::numeric_limits<double>::infinity();
  if (it != values_.end()) d = *it - x;
  if (it != values_.begin()) d = std::min(d, x - *std::prev(it));
  return d / bandwidth_;
}

double Imputer::kernel_log_density_exact(double x) const {
  const double h = bandwidth_;
  const double log_norm = -std::log(static_cast<double>(values_.size()) * h) - kLogSqrt2Pi;
  // Terms are scaled by exp(u_min^2 / 2) so far-tail queries do not underflow.
  const double u_min = kernel_nearest(x);
  const double reach = std::sqrt(u_min * u_min + 2.0 * kTailDrop) * h;
  auto lo = std::lower_bound(values_.begin(), values_.end(), x - reach);
  auto hi = std::upper_bound(lo, values_.end(), x + reach);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const double u = (x - *it) / h;
    sum += std::exp(-0.5 * (u * u - u_min * u_min));
  }
  return log_norm - 0.5 * u_min * u_min + std::log(sum);
}

std::vector<double> Imputer::kernel_log_density_binned(std::span<const double> xs) const {
  const double h = bandwidth_;
  const double step = h / kBinsPerBandwidth;
  const double lo = values_.front();
  const auto bins = static_cast<std::size_t>(std::llround((values_.back() - lo) / step)) + 1;
  // Each point goes to its nearest node g with offset s = (v - g)/h, |s| <= step/2h.
  // Around a node, sum_j exp(-(u - s_j)^2/2) = exp(-u^2/2) sum_n He_n(u) M_n / n!
  // with M_n = sum_j s_j^n, truncated after kMoments terms.
  std::vector<std::array<double, kMoments>> moments(bins);
  for (auto& m : moments) m.fill(0.0);
  for (double v : values_) {
    const auto k = std::min(static_cast<std::size_t>(std::llround((v - lo) / step)), bins - 1);
    const double s = (v - lo - static_cast<double>(k) * step) / h;
    double power = 1.0;
    for (std::size_t n = 0; n < kMoments; ++n) {
      moments[k][n] += power;
      power *= s;
    }
  }
  double inv_factorial[kMoments];
  inv_factorial[0] = 1.0;
  for (std::size_t n = 1; n < kMoments; ++n) inv_factorial[n] = inv_factorial[n - 1] / static_cast<double>(n);
  for (auto& m : moments) {
    for (std::size_t n = 0; n < kMoments; ++n) m[n] *= inv_factorial[n];
  }

  const double delta = step / h;
  const double grow = std::exp(-delta * delta);
  const double shift = std::exp(-0.5 * delta * delta);
  const double log_norm = -std::log(static_cast<double>(values_.size()) * h) - kLogSqrt2Pi;

  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    const double u_min = kernel_nearest(x);
    if (u_min > kBinnedMaxNearest) {
      out.push_back(kernel_log_density_exact(x));
      continue;
    }
    const double reach = (std::sqrt(u_min * u_min + 2.0 * kTailDrop) + delta) * h;
    const double first = std::ceil((x - reach - lo) / step);
    const double last = std::floor((x + reach - lo) / step);
    const double k0 = std::max(first, 0.0);
    const double k1 = std::min(last, static_cast<double>(bins - 1));
    double sum = 0.0;
    if (k0 <= k1) {
      // u_k = (x - g_k)/h; exp(-u^2/2) by multiplicative recurrence.
      double u = (x - lo - k0 * step) / h;
      double e = std::exp(-0.5 * u * u);
      double r = std::exp(u * delta);
      const auto begin = static_cast<std::size_t>(k0);
      const auto end = static_cast<std::size_t>(k1);
      for (std::size_t k = begin; k <= end; ++k) {
        const auto& m = moments[k];
        if (m[0] > 0.0) {
          double he_prev = 1.0, he = u;
          double local = m[0] + m[1] * u;
          for (std::size_t n = 2; n < kMoments; ++n) {
            const double next = u * he - static_cast<double>(n - 1) * he_prev;
            he_prev = he;
            he = next;
            local += m[n] * he;
          }
          sum += e * local;
        }
        e *= r * shift;
        r *= grow;
        u -= delta;
      }
    }
    out.push_back(log_norm + std::log(sum));
  }
  return out;
}

double Imputer::predictive_pmf(double x) const { return std::exp(log_predictive_pmf(x)); }

double Imputer::log_predictive_pmf(double x) const {
  switch (kind_) {
    case ImputerKind::Oracle:
      if (!law_->is_discrete()) break;
      return law_->log_pmf(x);
    case ImputerKind::Empirical: {
      const auto [lo, hi] = std::equal_range(values_.begin(), values_.end(), x);
      const auto count = static_cast<double>(hi - lo);
      return count > 0 ? std::log(count / static_cast<double>(values_.size())) : kNegInf;
    }
    case ImputerKind::BetaBinomial: {
      const int m = post_.trials;
      if (x < 0.0 || x > m || x != std::floor(x)) fail(ErrorCode::OutOfSupport, "beta_binomial pmf outside 0..m");
      if (!log_pmf_.empty()) return log_pmf_[static_cast<std::size_t>(x)];
      const double log_choose = std::lgamma(m + 1.0) - std::lgamma(x + 1.0) - std::lgamma(m - x + 1.0);
      return log_choose + log_beta(x + post_.alpha, m - x + post_.beta) - log_beta(post_.alpha, post_.beta);
    }
    default:
      break;
  }
  fail(ErrorCode::ContinuousKind, to_string(kind_) + " imputer has a density, not a pmf");
}

}  // namespace irt

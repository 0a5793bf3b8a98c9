#include "irt/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "irt/error.hpp"

#ifndef IRT_VERSION
#define IRT_VERSION "0.0.0"
#endif

namespace irt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(std::string s) {
  auto space = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), space));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), space).base(), s.end());
  return s;
}

struct Row {
  std::size_t line;
  std::vector<std::string> fields;
};

bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// Comma-separated rows with a fixed column count. A first row whose leading
// field is not numeric is taken as a header.
std::vector<Row> read_csv(const fs::path& path, const std::string& text, std::size_t columns) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty()) continue;
    Row row{number, {}};
    std::string field;
    std::istringstream fields(line);
    while (std::getline(fields, field, ',')) row.fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') row.fields.emplace_back();
    if (first) {
      first = false;
      if (!looks_numeric(row.fields.front())) continue;
    }
    if (row.fields.size() != columns) {
      fail(ErrorCode::ParseError, path.string() + ":" + std::to_string(number) + ": expected " +
                                      std::to_string(columns) + " columns, found " +
                                      std::to_string(row.fields.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

[[noreturn]] void parse_fail(const fs::path& path, std::size_t line, const std::string& what) {
  fail(ErrorCode::ParseError, path.string() + ":" + std::to_string(line) + ": " + what);
}

long long parse_int(const fs::path& path, std::size_t line, const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    parse_fail(path, line, "'" + s + "' is not an integer");
  }
  if (used != s.size()) parse_fail(path, line, "'" + s + "' is not an integer");
  return v;
}

double parse_double(const fs::path& path, std::size_t line, const std::string& s) {
  if (!looks_numeric(s)) parse_fail(path, line, "'" + s + "' is not a number");
  const double v = std::strtod(s.c_str(), nullptr);
  if (!std::isfinite(v)) parse_fail(path, line, "'" + s + "' is not finite");
  return v;
}

[[noreturn]] void invalid(const std::string& what) { fail(ErrorCode::ValidationError, what); }

// Loader state: config directory, indexing convention and digest inputs.
class Loader {
 public:
  Loader(fs::path config, json root, std::string config_bytes)
      : config_(std::move(config)), root_(std::move(root)), digest_input_(std::move(config_bytes)) {
    if (!root_.is_object()) invalid("config must be a JSON object");
    if (!root_.contains("units")) invalid("config needs 'units'");
    const auto n = root_.at("units").get<long long>();
    if (n < 1) invalid("'units' must be positive");
    n_ = static_cast<std::size_t>(n);
    one_indexed_ = root_.value("one_indexed", false);
  }

  std::size_t n() const { return n_; }
  const json& root() const { return root_; }
  std::string digest() const { return sha256_hex(digest_input_); }

  std::vector<Row> table(const std::string& name, std::size_t columns, fs::path* resolved) {
    *resolved = config_.parent_path() / name;
    const std::string bytes = read_file(*resolved);
    digest_input_ += '\0';
    digest_input_ += name;
    digest_input_ += '\0';
    digest_input_ += bytes;
    return read_csv(*resolved, bytes, columns);
  }

  std::size_t unit(const fs::path& path, std::size_t line, const std::string& s) const {
    long long v = parse_int(path, line, s);
    if (one_indexed_) --v;
    if (v < 0 || static_cast<std::size_t>(v) >= n_) parse_fail(path, line, "unit " + s + " out of range");
    return static_cast<std::size_t>(v);
  }

  std::size_t unit(long long v) const {
    if (one_indexed_) --v;
    if (v < 0 || static_cast<std::size_t>(v) >= n_) invalid("unit " + std::to_string(v) + " out of range");
    return static_cast<std::size_t>(v);
  }

  // Per-unit column from either an inline array or a `unit,value` CSV.
  template <typename Parse>
  auto per_unit(const json& source, const std::string& what, Parse&& parse) {
    using T = decltype(parse(fs::path{}, std::size_t{}, std::string{}));
    std::vector<T> out(n_);
    if (source.is_array()) {
      if (source.size() != n_) invalid(what + " has " + std::to_string(source.size()) + " entries, expected " +
                                       std::to_string(n_));
      for (std::size_t i = 0; i < n_; ++i) {
        const json& v = source[i];
        out[i] = parse(fs::path(what), i + 1, v.is_null() ? std::string("NA") : v.is_string() ? v.get<std::string>() : v.dump());
      }
      return out;
    }
    if (!source.is_string()) invalid(what + " must be a file name or an array");
    fs::path path;
    const auto rows = table(source.get<std::string>(), 2, &path);
    std::vector<char> seen(n_, 0);
    for (const Row& row : rows) {
      const std::size_t i = unit(path, row.line, row.fields[0]);
      if (seen[i]) parse_fail(path, row.line, "unit " + row.fields[0] + " listed twice");
      seen[i] = 1;
      out[i] = parse(path, row.line, row.fields[1]);
    }
    const auto missing = std::find(seen.begin(), seen.end(), 0);
    if (missing != seen.end()) {
      invalid(path.string() + " has no row for unit " + std::to_string(missing - seen.begin() + (one_indexed_ ? 1 : 0)));
    }
    return out;
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges(const json& spec) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (spec.contains("edges")) {
      for (const json& e : spec.at("edges")) {
        if (!e.is_array() || e.size() != 2) invalid("each edge must be a pair");
        out.emplace_back(unit(e[0].get<long long>()), unit(e[1].get<long long>()));
      }
    } else if (spec.contains("file")) {
      fs::path path;
      for (const Row& row : table(spec.at("file").get<std::string>(), 2, &path)) {
        out.emplace_back(unit(path, row.line, row.fields[0]), unit(path, row.line, row.fields[1]));
      }
    }
    return out;
  }

 private:
  fs::path config_;
  json root_;
  std::string digest_input_;
  std::size_t n_ = 0;
  bool one_indexed_ = false;
};

int parse_label(const fs::path& path, std::size_t line, const std::string& s) {
  return static_cast<int>(parse_int(path, line, s));
}

double parse_outcome(const fs::path& path, std::size_t line, const std::string& s) {
  if (s == "NA" || s.empty()) return std::nan("");
  return parse_double(path, line, s);
}

std::vector<int> memberships_of(Loader& loader, const json& source, const std::string& what) {
  return loader.per_unit(source, what, parse_label);
}

Law parse_law(const json& j) {
  const std::string family = j.value("family", "normal");
  if (family == "normal") return Law::normal(j.value("mean", 0.0), j.value("variance", 1.0));
  if (family == "chi2") return Law::chi_squared(j.value("df", 1.0));
  if (family == "t") return Law::student_t(j.value("df", 1.0));
  if (family == "bernoulli") return Law::bernoulli(j.value("q", 0.5));
  if (family == "binomial") return Law::binomial(j.value("trials", 1), j.value("q", 0.5));
  if (family == "point_mass") return Law::point_mass(j.value("value", 0.0));
  invalid("unknown law family '" + family + "'");
}

ImputerSpec parse_imputer(const json& j) {
  const std::string kind = j.value("kind", "empirical");
  if (kind == "oracle") {
    if (!j.contains("law")) invalid("oracle imputer needs 'law'");
    return OracleSpec{parse_law(j.at("law"))};
  }
  if (kind == "empirical") return EmpiricalSpec{};
  if (kind == "kernel") {
    KernelSpec s;
    s.constant = j.value("constant", s.constant);
    if (j.contains("bandwidth")) s.bandwidth = j.at("bandwidth").get<double>();
    return s;
  }
  if (kind == "normal_known_var") {
    NormalKnownVarSpec s;
    s.sigma2 = j.value("sigma2", s.sigma2);
    s.mu0 = j.value("mu0", s.mu0);
    s.sigma0_2 = j.value("sigma0_2", s.sigma0_2);
    return s;
  }
  if (kind == "nig") {
    NigSpec s;
    s.alpha0 = j.value("alpha0", s.alpha0);
    s.beta0 = j.value("beta0", s.beta0);
    s.kappa0 = j.value("kappa0", s.kappa0);
    s.mu0 = j.value("mu0", s.mu0);
    return s;
  }
  if (kind == "beta_binomial") {
    BetaBinomialSpec s;
    s.m = j.value("m", s.m);
    s.alpha = j.value("alpha", s.alpha);
    s.beta = j.value("beta", s.beta);
    return s;
  }
  invalid("unknown imputer kind '" + kind + "'");
}

int contrast_label(const ExposureSet& set, const json& j, const char* which) {
  const std::string text = j.is_string() ? j.get<std::string>() : j.dump();
  const auto code = set.parse(text);
  if (!code) invalid(std::string("contrast label ") + which + "='" + text + "' is not in the exposure set");
  return *code;
}

Experiment load(const fs::path& config_path) {
  const std::string bytes = read_file(config_path);
  json root;
  try {
    root = json::parse(bytes);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, config_path.string() + ": " + e.what());
  }
  Loader loader(config_path, root, bytes);
  const std::size_t n = loader.n();

  // Assignment.
  if (!root.contains("assignment")) invalid("config needs 'assignment'");
  Assignment z_obs{loader.per_unit(root.at("assignment"), "assignment", parse_label)};

  // Network and exposure mapping.
  if (!root.contains("network")) invalid("config needs 'network'");
  const json& net = root.at("network");
  const std::string net_kind = net.value("kind", "edges");
  std::optional<std::vector<int>> clusters;
  std::optional<ExposureMapping> mapping;
  try {
    if (net_kind == "edges") {
      const auto e = loader.edges(net);
      mapping = ExposureMapping::three_level(build_network(n, e));
    } else if (net_kind == "clusters") {
      const json& src = net.contains("memberships") ? net.at("memberships") : net.at("file");
      clusters = memberships_of(loader, src, "memberships");
      mapping = ExposureMapping::three_level(cluster_network(*clusters));
    } else if (net_kind == "coords") {
      if (!net.contains("radius")) invalid("coords network needs 'radius'");
      std::vector<Point2> pts(n);
      if (net.contains("points")) {
        const json& p = net.at("points");
        if (p.size() != n) invalid("'points' must have one entry per unit");
        for (std::size_t i = 0; i < n; ++i) pts[i] = {p[i].at(0).get<double>(), p[i].at(1).get<double>()};
      } else {
        fs::path path;
        std::vector<char> seen(n, 0);
        for (const Row& row : loader.table(net.at("file").get<std::string>(), 3, &path)) {
          const std::size_t i = loader.unit(path, row.line, row.fields[0]);
          if (seen[i]) parse_fail(path, row.line, "unit listed twice");
          seen[i] = 1;
          pts[i] = {parse_double(path, row.line, row.fields[1]), parse_double(path, row.line, row.fields[2])};
        }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end()) invalid(path.string() + " misses a unit");
      }
      mapping = ExposureMapping::three_level(spatial_network(pts, net.at("radius").get<double>()));
    } else if (net_kind == "two_round") {
      TwoRoundLayout layout;
      if (!net.contains("rounds")) invalid("two_round network needs 'rounds'");
      for (int r : memberships_of(loader, net.at("rounds"), "rounds")) {
        if (r != 1 && r != 2) invalid("rounds must be 1 or 2");
        layout.round_of.push_back(r == 1 ? Round::First : Round::Second);
      }
      if (!net.contains("intensity")) invalid("two_round network needs 'intensity'");
      for (const auto& [key, value] : net.at("intensity").items()) {
        const std::string v = value.get<std::string>();
        if (v != "simple" && v != "intensive") invalid("intensity must be 'simple' or 'intensive'");
        layout.intensity_of[std::stoi(key)] = v == "simple" ? Intensity::Simple : Intensity::Intensive;
      }
      mapping = ExposureMapping::two_round(build_network(n, loader.edges(net)), std::move(layout));
    } else {
      invalid("unknown network kind '" + net_kind + "'");
    }
    (void)(*mapping)(z_obs);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::IoError ||
        e.code() == ErrorCode::ValidationError) {
      throw;
    }
    invalid("network: " + std::string(e.what()));
  } catch (const json::exception& e) {
    invalid("network: " + std::string(e.what()));
  }

  // Design.
  if (!root.contains("design")) invalid("config needs 'design'");
  const json& des = root.at("design");
  const std::string des_kind = des.value("kind", "");
  std::optional<Design> design;
  try {
    if (des_kind == "two_stage") {
      if (des.contains("memberships")) clusters = memberships_of(loader, des.at("memberships"), "memberships");
      if (des.contains("clusters")) clusters = memberships_of(loader, des.at("clusters"), "clusters");
      if (!clusters) invalid("two_stage design needs cluster memberships");
      design = Design::two_stage(*clusters);
    } else if (des_kind == "bernoulli") {
      design = Design::bernoulli(n, des.value("p", 0.5));
    } else if (des_kind == "complete") {
      const auto treated = static_cast<std::size_t>(std::count(z_obs.labels.begin(), z_obs.labels.end(), 1));
      design = Design::complete(n, des.value("treated", treated));
    } else if (des_kind == "stratified") {
      if (!des.contains("strata")) invalid("stratified design needs 'strata'");
      design = Design::stratified(memberships_of(loader, des.at("strata"), "strata"), z_obs);
    } else {
      invalid("unknown design kind '" + des_kind + "'");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::IoError ||
        e.code() == ErrorCode::ValidationError) {
      throw;
    }
    invalid("design: " + std::string(e.what()));
  }

  // Outcomes.
  if (!root.contains("outcomes")) invalid("config needs 'outcomes'");
  std::vector<double> y = loader.per_unit(root.at("outcomes"), "outcomes", parse_outcome);

  if (!root.contains("contrast")) invalid("config needs 'contrast'");
  const json& con = root.at("contrast");
  const int a = contrast_label(mapping->exposure_set(), con.at("a"), "a");
  const int b = contrast_label(mapping->exposure_set(), con.at("b"), "b");
  if (a == b) invalid("contrast labels a and b must differ");

  const ImputerSpec imputer = parse_imputer(root.value("imputer", json::object()));
  const std::string outcome = root.value("outcome", "continuous");
  if (outcome != "continuous" && outcome != "discrete") invalid("outcome must be 'continuous' or 'discrete'");
  if (outcome == "discrete" && std::holds_alternative<KernelSpec>(imputer)) {
    invalid("kernel imputer needs a continuous outcome");
  }
  const long long k = root.value("k", static_cast<long long>(kDefaultDraws));
  if (k < 1) invalid("k must be at least 1");
  const double alpha = root.value("alpha", 0.05);
  if (!(alpha > 0.0 && alpha < 1.0)) invalid("alpha must lie in (0,1)");
  const std::string mode = root.value("mode", "paired");
  long long k_inner = 1;
  if (mode == "nested") {
    k_inner = root.value("k_inner", 1LL);
    if (k_inner < 1) invalid("k_inner must be at least 1");
  } else if (mode != "paired") {
    invalid("mode must be 'paired' or 'nested'");
  }
  std::optional<std::uint64_t> seed;
  if (root.contains("seed")) seed = root.at("seed").get<std::uint64_t>();

  Experiment out{std::move(*mapping),
                 std::move(*design),
                 std::move(z_obs),
                 std::move(y),
                 a,
                 b,
                 imputer,
                 static_cast<std::size_t>(k),
                 alpha,
                 seed,
                 static_cast<std::size_t>(k_inner),
                 loader.digest()};
  // Focal outcomes must be observed.
  (void)out.partial();
  return out;
}

std::string number(double x) {
  std::ostringstream out;
  out << std::setprecision(12) << x;
  return out.str();
}

}  // namespace

std::string version() { return IRT_VERSION; }

std::map<std::string, std::size_t> Experiment::exposure_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& [code, name] : mapping.exposure_set().entries()) out[name] = 0;
  const ExposureVector e = exposures();
  for (int code : e.labels) ++out[mapping.exposure_set().name(code)];
  return out;
}

PartialTheta Experiment::partial() const { return observed_theta(exposures(), y_obs, a, b); }

Experiment load_experiment(const fs::path& config) {
  try {
    return load(config);
  } catch (const json::exception& e) {
    fail(ErrorCode::ValidationError, config.string() + ": " + e.what());
  }
}

TestReport run_experiment(const Experiment& experiment, std::uint64_t seed, unsigned threads) {
  const PartialTheta partial = experiment.partial();
  const Imputer imputer = Imputer::fit(experiment.imputer, partial);
  const StatisticContext ctx(experiment.mapping, experiment.a, experiment.b);
  TestReport report;
  report.mode = experiment.k_inner > 1 ? "nested" : "paired";
  report.result = irt_pvalue_nested(experiment.design, ctx, partial, imputer, experiment.z_obs, experiment.k,
                                    experiment.k_inner, seed, threads);
  report.t_obs = *diff_in_means(experiment.exposures(), partial.values, experiment.a, experiment.b);
  report.missing_rate = partial.missing_rate();
  report.reject = report.result.p_hat <= experiment.alpha;
  report.warning = imputer.warning();
  return report;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::IoError, "SHA-256 failed");
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(md[i]);
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

std::string result_json(const Experiment& experiment, const TestReport& report) {
  const ExposureSet& set = experiment.mapping.exposure_set();
  json j;
  j["version"] = version();
  j["config_digest"] = experiment.digest;
  j["seed"] = report.result.seed;
  j["mode"] = report.mode;
  j["n"] = experiment.size();
  j["exposure_counts"] = experiment.exposure_counts();
  j["contrast"] = {{"a", set.name(experiment.a)}, {"b", set.name(experiment.b)}};
  j["missing_rate"] = report.missing_rate;
  j["t_obs"] = report.t_obs;
  j["alpha"] = experiment.alpha;
  j["p_hat"] = report.result.p_hat;
  j["k"] = report.result.k;
  j["extreme_count"] = report.result.extreme_count;
  j["undefined_resamples"] = report.result.undefined_resamples;
  j["reject"] = report.reject;
  if (report.warning) j["warning"] = *report.warning;
  return j.dump(2) + "\n";
}

std::string rejection_csv(const RejectionTable& table) {
  std::string out = "scenario,method,tau,rejection_rate,std_error,replications\n";
  for (const RejectionRow& r : table.rows) {
    out += r.scenario + "," + r.method + "," + number(r.tau) + "," + number(r.rejection_rate) + "," +
           number(r.std_error) + "," + std::to_string(r.replications) + "\n";
  }
  return out;
}

std::string curve_csv(const std::vector<LrCurvePoint>& points) {
  std::string out = "scenario,N,rate,N1,mean_abs_dev,reps\n";
  for (const LrCurvePoint& p : points) {
    out += p.scenario + "," + std::to_string(p.n_total) + "," + number(p.rate) + "," + std::to_string(p.n1) + "," +
           number(p.mean_abs_dev) + "," + std::to_string(p.reps) + "\n";
  }
  return out;
}

std::string meta_json(const std::string& command, const std::string& digest, std::uint64_t seed) {
  json j;
  j["command"] = command;
  j["config_digest"] = digest;
  j["version"] = version();
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

}  // namespace irt

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "irt/error.hpp"
#include "irt/io.hpp"

using namespace irt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an irt::Error");
  return ErrorCode::InvalidArgument;
}

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("irt_io_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return path / name;
  }
};

// Units 0-1 linked, unit 2 isolated; unit 0 treated. Exposures 2, 1, 0.
json fixture() {
  return json::parse(R"({
    "units": 3,
    "network": {"kind": "edges", "edges": [[0, 1]]},
    "design": {"kind": "complete", "treated": 1},
    "assignment": [1, 0, 0],
    "outcomes": [null, 1.5, 0.5],
    "contrast": {"a": "0", "b": "1"},
    "imputer": {"kind": "empirical"},
    "k": 200,
    "seed": 11
  })");
}

}  // namespace

TEST_CASE("3-unit fixture loads and round-trips through CSV files") {
  TempDir dir;
  const auto inline_cfg = dir.write("inline.json", fixture().dump());
  const Experiment a = load_experiment(inline_cfg);
  CHECK(a.size() == 3);
  CHECK(a.mapping.network().edge_count() == 1);
  CHECK(a.exposures().labels == std::vector<int>{2, 1, 0});
  CHECK(a.exposure_counts() == std::map<std::string, std::size_t>{{"0", 1}, {"1", 1}, {"2", 1}});
  CHECK(std::isnan(a.y_obs[0]));
  CHECK(a.partial().missing_rate() == doctest::Approx(1.0 / 3));
  CHECK(a.seed == 11u);
  CHECK(a.k_inner == 1);

  dir.write("edges.csv", "u,v\n0,1\n");
  dir.write("z.csv", "unit,z\n2,0\n0,1\n1,0\n");
  dir.write("y.csv", "unit,y\n0,NA\n1,1.5\n2,0.5\n");
  json files = fixture();
  files["network"] = {{"kind", "edges"}, {"file", "edges.csv"}};
  files["assignment"] = "z.csv";
  files["outcomes"] = "y.csv";
  const Experiment b = load_experiment(dir.write("files.json", files.dump()));
  CHECK(b.exposures().labels == a.exposures().labels);
  CHECK(b.z_obs.labels == a.z_obs.labels);
  CHECK(b.a == a.a);
  CHECK(b.b == a.b);
  CHECK(std::isnan(b.y_obs[0]));
  CHECK(b.y_obs[1] == a.y_obs[1]);
  CHECK(b.y_obs[2] == a.y_obs[2]);
  CHECK(b.design.enumerate(16).points.size() == a.design.enumerate(16).points.size());

  const auto ra = run_experiment(a, 11);
  const auto rb = run_experiment(b, 11);
  CHECK(ra.result.p_hat == rb.result.p_hat);
  CHECK(ra.t_obs == doctest::Approx(1.0));
}

TEST_CASE("one-indexed units") {
  TempDir dir;
  json cfg = fixture();
  cfg["one_indexed"] = true;
  cfg["network"]["edges"] = json::parse("[[1, 2]]");
  const Experiment e = load_experiment(dir.write("c.json", cfg.dump()));
  CHECK(e.exposures().labels == std::vector<int>{2, 1, 0});
}

TEST_CASE("validation errors") {
  TempDir dir;
  json cfg = fixture();
  cfg["contrast"]["b"] = "7";
  CHECK(code_of([&] { load_experiment(dir.write("a.json", cfg.dump())); }) == ErrorCode::ValidationError);

  cfg = fixture();
  cfg["outcomes"] = json::parse("[1.0, null, 0.5]");
  CHECK(code_of([&] { load_experiment(dir.write("b.json", cfg.dump())); }) == ErrorCode::ValidationError);

  cfg = fixture();
  cfg["outcome"] = "discrete";
  cfg["imputer"] = {{"kind", "kernel"}};
  CHECK(code_of([&] { load_experiment(dir.write("c.json", cfg.dump())); }) == ErrorCode::ValidationError);

  cfg = fixture();
  cfg["outcomes"] = "missing.csv";
  CHECK(code_of([&] { load_experiment(dir.write("d.json", cfg.dump())); }) == ErrorCode::IoError);

  CHECK(code_of([&] { load_experiment(dir.write("e.json", "{ not json")); }) == ErrorCode::ParseError);
}

TEST_CASE("parse errors carry file and line") {
  TempDir dir;
  dir.write("y.csv", "unit,y\n0,1\n1,abc\n2,0.5\n");
  json cfg = fixture();
  cfg["outcomes"] = "y.csv";
  const auto cfg_path = dir.write("c.json", cfg.dump());
  CHECK(code_of([&] { load_experiment(cfg_path); }) == ErrorCode::ParseError);
  CHECK(error_text([&] { load_experiment(cfg_path); }).find("y.csv:3") != std::string::npos);

  dir.write("y.csv", "unit,y\n0,1\n1,2,3\n2,0.5\n");
  CHECK(error_text([&] { load_experiment(cfg_path); }).find("y.csv:3") != std::string::npos);
}

TEST_CASE("digest covers referenced files") {
  TempDir dir;
  dir.write("y.csv", "unit,y\n0,NA\n1,1.5\n2,0.5\n");
  json cfg = fixture();
  cfg["outcomes"] = "y.csv";
  const auto path = dir.write("c.json", cfg.dump());
  const std::string d1 = load_experiment(path).digest;
  CHECK(d1 == load_experiment(path).digest);
  CHECK(d1.size() == 64);
  dir.write("y.csv", "unit,y\n0,NA\n1,1.5\n2,0.75\n");
  CHECK(load_experiment(path).digest != d1);
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("result json schema and determinism") {
  TempDir dir;
  const Experiment e = load_experiment(dir.write("c.json", fixture().dump()));
  const auto report = run_experiment(e, 5);
  const std::string text = result_json(e, report);
  CHECK(text == result_json(e, run_experiment(e, 5)));
  const json j = json::parse(text);
  for (const char* key : {"version", "config_digest", "seed", "mode", "n", "exposure_counts", "missing_rate",
                          "t_obs", "alpha", "p_hat", "k", "extreme_count", "undefined_resamples", "reject"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }
  CHECK(j.at("version") == version());
  CHECK(j.at("n") == 3);
  CHECK(j.at("seed") == 5);
  CHECK(j.at("mode") == "paired");
  CHECK(j.at("p_hat").get<double>() == doctest::Approx(static_cast<double>(j.at("extreme_count").get<std::size_t>()) / 200));
}

TEST_CASE("csv emission") {
  CHECK(rejection_csv(RejectionTable{}) == "scenario,method,tau,rejection_rate,std_error,replications\n");
  RejectionTable t;
  t.rows.push_back(RejectionRow{"s", "oracle", 0.5, 0.25, 0.01, 100, {}, 0});
  std::istringstream lines(rejection_csv(t));
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(row == "s,oracle,0.5,0.25,0.01,100");
  CHECK(curve_csv({}) == "scenario,N,rate,N1,mean_abs_dev,reps\n");

  TempDir dir;
  write_text(dir.path / "x.csv", "a\n");
  std::ifstream in(dir.path / "x.csv");
  std::string back;
  std::getline(in, back);
  CHECK(back == "a");
  CHECK(code_of([&] { write_text(dir.path / "no" / "such" / "x.csv", "a"); }) == ErrorCode::IoError);
}

TEST_CASE("same seed twice gives identical study csv") {
  StudyOptions o;
  o.methods = {Method::Empirical};
  o.n_datasets = 1;
  o.n_experiments = 10;
  o.k = 50;
  o.seed = 8;
  const ClusteredConfig c{24, 6, Law::normal(0, 1)};
  CHECK(rejection_csv(run_rejection_study(c, o)) == rejection_csv(run_rejection_study(c, o)));
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "irt/error.hpp"
#include "irt/io.hpp"
#include "irt/irt.hpp"
#include "irt/simlab.hpp"
#include "irt/verify.hpp"

namespace py = pybind11;
using namespace irt;

namespace {

std::optional<double> get(const py::dict& d, const char* key) {
  if (!d.contains(key)) return std::nullopt;
  return d[key].cast<double>();
}

Law law_from(const py::dict& d) {
  const auto family = d.contains("family") ? d["family"].cast<std::string>() : std::string("normal");
  if (family == "normal") return Law::normal(get(d, "mean").value_or(0.0), get(d, "variance").value_or(1.0));
  if (family == "chi2") return Law::chi_squared(get(d, "df").value_or(1.0));
  if (family == "t") return Law::student_t(get(d, "df").value_or(1.0));
  if (family == "bernoulli") return Law::bernoulli(get(d, "q").value_or(0.5));
  if (family == "binomial") return Law::binomial(static_cast<int>(get(d, "trials").value_or(1)), get(d, "q").value_or(0.5));
  if (family == "point_mass") return Law::point_mass(get(d, "value").value_or(0.0));
  fail(ErrorCode::InvalidArgument, "unknown law family '" + family + "'");
}

// Imputer spec from a dict such as {"kind": "nig", "alpha0": 1}.
ImputerSpec spec_from(const py::dict& d) {
  const auto kind = d.contains("kind") ? d["kind"].cast<std::string>() : std::string("empirical");
  if (kind == "oracle") return OracleSpec{law_from(d.contains("law") ? d["law"].cast<py::dict>() : py::dict())};
  if (kind == "empirical") return EmpiricalSpec{};
  if (kind == "kernel") {
    KernelSpec s;
    s.constant = get(d, "constant").value_or(s.constant);
    s.bandwidth = get(d, "bandwidth");
    return s;
  }
  if (kind == "normal_known_var") {
    NormalKnownVarSpec s;
    s.sigma2 = get(d, "sigma2").value_or(s.sigma2);
    s.mu0 = get(d, "mu0").value_or(s.mu0);
    s.sigma0_2 = get(d, "sigma0_2").value_or(s.sigma0_2);
    return s;
  }
  if (kind == "nig") {
    NigSpec s;
    s.alpha0 = get(d, "alpha0").value_or(s.alpha0);
    s.beta0 = get(d, "beta0").value_or(s.beta0);
    s.kappa0 = get(d, "kappa0").value_or(s.kappa0);
    s.mu0 = get(d, "mu0").value_or(s.mu0);
    return s;
  }
  if (kind == "beta_binomial") {
    BetaBinomialSpec s;
    s.m = static_cast<int>(get(d, "m").value_or(s.m));
    s.alpha = get(d, "alpha").value_or(s.alpha);
    s.beta = get(d, "beta").value_or(s.beta);
    return s;
  }
  fail(ErrorCode::InvalidArgument, "unknown imputer kind '" + kind + "'");
}

py::dict result_dict(const IrtResult& r) {
  py::dict d;
  d["p_hat"] = r.p_hat;
  d["k"] = r.k;
  d["extreme_count"] = r.extreme_count;
  d["undefined_resamples"] = r.undefined_resamples;
  d["seed"] = r.seed;
  return d;
}

// Mapping plus contrast kept together so the context never dangles.
struct Contrast {
  ExposureMapping mapping;
  int a;
  int b;
  StatisticContext context() const { return StatisticContext(mapping, a, b); }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Imputation-based randomization tests for experiments with interference.";

  static py::exception<Error> error(m, "IrtError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<InterferenceNetwork>(m, "Network")
      .def_property_readonly("size", &InterferenceNetwork::size)
      .def("neighbors", [](const InterferenceNetwork& net, std::size_t i) {
        const auto s = net.neighbors(i);
        return std::vector<std::size_t>(s.begin(), s.end());
      })
      .def("edges", &InterferenceNetwork::edges);

  m.def("build_network", [](std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    return build_network(n, edges);
  });
  m.def("cluster_network", [](const std::vector<int>& memberships) { return cluster_network(memberships); });
  m.def("spatial_network", [](const std::vector<std::pair<double, double>>& coords, double radius) {
    std::vector<Point2> pts;
    for (const auto& [x, y] : coords) pts.push_back({x, y});
    return spatial_network(pts, radius);
  });
  m.def("exposure_three_level", [](const InterferenceNetwork& net, const std::vector<int>& z) {
    return exposure_three_level(net, Assignment{z}).labels;
  });

  py::class_<Design>(m, "Design")
      .def_static("bernoulli", &Design::bernoulli, py::arg("n"), py::arg("p"))
      .def_static("complete", &Design::complete, py::arg("n"), py::arg("m"))
      .def_static("two_stage", &Design::two_stage, py::arg("memberships"))
      .def_property_readonly("size", &Design::size)
      .def("sample", [](const Design& d, std::uint64_t seed) {
        Rng rng(seed);
        return d.sample(rng).labels;
      })
      .def("enumerate", [](const Design& d) {
        std::vector<std::pair<std::vector<int>, double>> out;
        for (const auto& p : d.enumerate().points) out.emplace_back(p.z.labels, p.probability);
        return out;
      });

  py::class_<Contrast>(m, "Contrast")
      .def(py::init([](const InterferenceNetwork& net, int a, int b) {
             Contrast c{ExposureMapping::three_level(net), a, b};
             (void)c.context();
             return c;
           }),
           py::arg("network"), py::arg("a") = 0, py::arg("b") = 1)
      .def("statistic", [](const Contrast& c, const std::vector<int>& z, const std::vector<double>& theta) {
        return c.context().evaluate(Assignment{z}, theta);
      });

  m.def("diff_in_means", [](const std::vector<int>& exposures, const std::vector<double>& theta, int a, int b) {
    return diff_in_means(std::span<const int>(exposures), theta, a, b);
  });

  m.def(
      "exact_frt_pvalue",
      [](const Design& design, const Contrast& c, const std::vector<double>& theta, const std::vector<int>& z_obs) {
        return exact_frt_pvalue(design, c.context(), theta, Assignment{z_obs}).p;
      },
      py::arg("design"), py::arg("contrast"), py::arg("theta"), py::arg("z_obs"));

  m.def(
      "frt_pvalue_mc",
      [](const Design& design, const Contrast& c, const std::vector<double>& theta, const std::vector<int>& z_obs,
         std::size_t k, std::uint64_t seed) {
        return result_dict(frt_pvalue_mc(design, c.context(), theta, Assignment{z_obs}, k, seed));
      },
      py::arg("design"), py::arg("contrast"), py::arg("theta"), py::arg("z_obs"), py::arg("k") = kDefaultDraws,
      py::arg("seed") = 0);

  // Outcomes use None (or NaN) for units whose value was not recorded.
  m.def(
      "irt_pvalue",
      [](const Design& design, const Contrast& c, const std::vector<std::optional<double>>& y_obs,
         const std::vector<int>& z_obs, const py::dict& imputer, std::size_t k, std::size_t k_inner,
         std::uint64_t seed) {
        std::vector<double> y;
        for (const auto& v : y_obs) y.push_back(v.value_or(std::nan("")));
        const Assignment z{z_obs};
        const PartialTheta partial = observed_theta(c.mapping(z), y, c.a, c.b);
        const Imputer fitted = Imputer::fit(spec_from(imputer), partial);
        return result_dict(irt_pvalue_nested(design, c.context(), partial, fitted, z, k, k_inner, seed));
      },
      py::arg("design"), py::arg("contrast"), py::arg("y_obs"), py::arg("z_obs"), py::arg("imputer") = py::dict(),
      py::arg("k") = kDefaultDraws, py::arg("k_inner") = 1, py::arg("seed") = 0);

  py::class_<Imputer>(m, "Imputer")
      .def_static("fit", [](const py::dict& spec, const std::vector<double>& observed) {
        return Imputer::fit(spec_from(spec), observed);
      })
      .def_property_readonly("kind", [](const Imputer& imp) { return to_string(imp.kind()); })
      .def_property_readonly("bandwidth", &Imputer::bandwidth)
      .def_property_readonly("warning", &Imputer::warning)
      .def("sample", [](const Imputer& imp, std::size_t count, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<double> out(count);
        for (double& v : out) v = imp.sample(rng);
        return out;
      })
      .def("density", py::overload_cast<double>(&Imputer::predictive_density, py::const_))
      .def("pmf", py::overload_cast<double>(&Imputer::predictive_pmf, py::const_));

  m.def("kernel_bandwidth", [](const std::vector<double>& xs, double constant) { return kernel_bandwidth(xs, constant); },
        py::arg("observed"), py::arg("constant") = 1.06);

  m.def(
      "lr_expectation_curve",
      [](const std::string& scenario, const std::vector<std::size_t>& grid, double rate, std::size_t reps,
         std::uint64_t seed) {
        std::vector<py::dict> out;
        for (const auto& p : lr_expectation_curve(parse_verify_scenario(scenario), grid, rate, reps, seed)) {
          py::dict d;
          d["scenario"] = p.scenario;
          d["N"] = p.n_total;
          d["rate"] = p.rate;
          d["N1"] = p.n1;
          d["mean_abs_dev"] = p.mean_abs_dev;
          d["std_error"] = p.std_error;
          d["reps"] = p.reps;
          out.push_back(d);
        }
        return out;
      },
      py::arg("scenario"), py::arg("grid"), py::arg("rate"), py::arg("reps"), py::arg("seed") = 0);

  m.def(
      "clustered_study",
      [](std::size_t n, std::size_t clusters, const std::vector<double>& taus, const std::vector<std::string>& methods,
         std::size_t datasets, std::size_t experiments, std::size_t k, double alpha, std::uint64_t seed) {
        StudyOptions options;
        options.taus = taus;
        options.methods.clear();
        for (const auto& name : methods) options.methods.push_back(parse_method(name));
        options.n_datasets = datasets;
        options.n_experiments = experiments;
        options.k = k;
        options.alpha = alpha;
        options.seed = seed;
        return rejection_csv(run_rejection_study(ClusteredConfig{n, clusters, Law::normal(0.0, 1.0)}, options));
      },
      py::arg("n"), py::arg("clusters"), py::arg("taus"), py::arg("methods"), py::arg("datasets"),
      py::arg("experiments"), py::arg("k"), py::arg("alpha") = 0.05, py::arg("seed") = 0);

  m.def(
      "run_config",
      [](const std::filesystem::path& config, std::optional<std::uint64_t> seed) {
        const Experiment experiment = load_experiment(config);
        if (!seed) seed = experiment.seed;
        if (!seed) fail(ErrorCode::ValidationError, "a seed is required");
        return result_json(experiment, run_experiment(experiment, *seed));
      },
      py::arg("config"), py::arg("seed") = py::none());

  m.attr("__version__") = version();
}

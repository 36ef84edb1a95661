#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cumbound/bounds.hpp"
#include "cumbound/combinatorics.hpp"
#include "cumbound/estimation.hpp"
#include "cumbound/exact_models.hpp"
#include "cumbound/harness.hpp"
#include "cumbound/simulators.hpp"
#include "cumbound/specfun.hpp"

namespace py = pybind11;
using namespace cumbound;

namespace {

ModelSpec make_model(const std::string& kind, std::int64_t n, std::int64_t p, std::int64_t n2, double beta) {
  ModelSpec m{parse_model_kind(kind), n, p, n2, beta};
  m.validate();
  return m;
}

LaguerreRegime make_regime(const std::string& tag, double c) { return {parse_regime(tag), c}; }

py::array_t<double> to_array(const std::vector<double>& values) {
  return py::array_t<double>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(values.size())}, values.data());
}

SimSpec make_sim(const std::string& kind, std::int64_t n, std::int64_t replicates, std::uint64_t seed,
                 std::uint64_t stream, double p, std::int64_t m, std::int64_t dim, const std::string& pattern,
                 const std::string& kernel, const std::string& dist, const std::vector<double>& sigmas) {
  SimSpec spec;
  spec.kind = parse_sim_kind(kind);
  spec.n = n;
  spec.replicates = replicates;
  spec.seed = seed;
  spec.stream = stream;
  spec.p = p;
  spec.m = m;
  spec.dim = dim;
  spec.pattern = PatternGraph::parse(pattern);
  spec.kernel = parse_kernel(kernel);
  spec.dist = parse_summand_dist(dist);
  spec.sigmas = sigmas;
  spec.validate();
  return spec;
}

}  // namespace

PYBIND11_MODULE(_cumbound, mod) {
  mod.doc() = "Cumulant bounds, exact log-determinant models and simulators";
  mod.attr("__version__") = std::string(kLibraryVersion);

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);

  mod.def(
      "moments_from_cumulants",
      [](const std::vector<double>& cumulants) {
        const auto m = moments_from_cumulants(CumulantSequence(cumulants));
        return std::vector<double>(m.values().begin(), m.values().end());
      },
      py::arg("cumulants"), "Raw moments m_1..m_K from cumulants k_1..k_K.");
  mod.def(
      "cumulants_from_moments",
      [](const std::vector<double>& moments) {
        const auto k = cumulants_from_moments(MomentSequence(moments));
        return std::vector<double>(k.values().begin(), k.values().end());
      },
      py::arg("moments"));
  mod.def("gaussian_moment", &gaussian_moment, py::arg("k"));

  mod.def("polygamma", py::overload_cast<int, double>(&polygamma), py::arg("order"), py::arg("z"));
  mod.def("polygamma_bound", &polygamma_bound, py::arg("order"), py::arg("z"));
  mod.def("polygamma_half_sum", &polygamma_half_sum, py::arg("n"), py::arg("order"));

  mod.def(
      "moment_gap_bound",
      [](int k, const std::vector<double>& constants, double delta, double gamma, bool factorial) {
        GrowthSpec spec;
        spec.constants = constants;
        spec.delta = delta;
        spec.gamma = gamma;
        spec.form = factorial ? ConstantForm::Factorial : ConstantForm::Explicit;
        spec.validate();
        return moment_gap_bound(k, spec);
      },
      py::arg("k"), py::arg("constants"), py::arg("delta"), py::arg("gamma") = 0.0, py::arg("factorial") = false,
      "Bound on |E Z^k - E N^k|; constants[0] belongs to order 2.");

  mod.def(
      "model_cumulant",
      [](const std::string& kind, int j, std::int64_t n, std::int64_t p, std::int64_t n2, double beta) {
        return model_cumulant(make_model(kind, n, p, n2, beta), j);
      },
      py::arg("kind"), py::arg("j"), py::arg("n"), py::arg("p") = 1, py::arg("n2") = 1, py::arg("beta") = 1.0);
  mod.def(
      "standardized_moment_exact",
      [](const std::string& kind, int k, std::int64_t n, std::int64_t p, std::int64_t n2, double beta) {
        return standardized_moment_exact(make_model(kind, n, p, n2, beta), k);
      },
      py::arg("kind"), py::arg("k"), py::arg("n"), py::arg("p") = 1, py::arg("n2") = 1, py::arg("beta") = 1.0);
  mod.def(
      "model_cumulant_bound",
      [](const std::string& kind, int j, std::int64_t n, std::int64_t p, double beta, const std::string& regime,
         double c) { return model_cumulant_bound(make_model(kind, n, p, 1, beta), make_regime(regime, c), j); },
      py::arg("kind"), py::arg("j"), py::arg("n"), py::arg("p") = 1, py::arg("beta") = 1.0,
      py::arg("regime") = "FullRank", py::arg("c") = 0.0);
  mod.def(
      "model_gap_bound",
      [](const std::string& kind, int k, std::int64_t n, std::int64_t p, double beta, const std::string& regime,
         double c) {
        return moment_gap_bound(k, model_growth_spec(make_model(kind, n, p, 1, beta), make_regime(regime, c), k));
      },
      py::arg("kind"), py::arg("k"), py::arg("n"), py::arg("p") = 1, py::arg("beta") = 1.0,
      py::arg("regime") = "FullRank", py::arg("c") = 0.0);

  mod.def(
      "simulate",
      [](const std::string& kind, std::int64_t n, std::int64_t replicates, std::uint64_t seed, std::uint64_t stream,
         double p, std::int64_t m, std::int64_t dim, const std::string& pattern, const std::string& kernel,
         const std::string& dist, const std::vector<double>& sigmas, int threads) {
        const auto spec = make_sim(kind, n, replicates, seed, stream, p, m, dim, pattern, kernel, dist, sigmas);
        SampleBatch batch;
        {
          py::gil_scoped_release release;
          batch = run_batch(spec, threads);
        }
        return py::make_tuple(to_array(batch.values), batch.digest);
      },
      py::arg("kind"), py::arg("n"), py::arg("replicates"), py::arg("seed") = 0, py::arg("stream") = 0,
      py::arg("p") = 0.5, py::arg("m") = 0, py::arg("dim") = 1, py::arg("pattern") = "triangle",
      py::arg("kernel") = "default", py::arg("dist") = "rademacher", py::arg("sigmas") = std::vector<double>{},
      py::arg("threads") = 1, "Returns (values, digest).");

  mod.def("enumerate_crossings", &enumerate_pair_partitions_crossings, py::arg("n"));
  mod.def(
      "crossings_moments",
      [](int n) {
        const auto mv = crossings_moments_exact(n);
        return py::make_tuple(mv.mean, mv.variance);
      },
      py::arg("n"));
  mod.def(
      "triangle_moments",
      [](int n, double p) {
        const auto mv = gnp_triangle_moments_exact(n, p);
        return py::make_tuple(mv.mean, mv.variance);
      },
      py::arg("n"), py::arg("p"));
  mod.def("ustat_variance", &ustat_variance, py::arg("n"), py::arg("sigma1sq"), py::arg("sigma2sq"));

  mod.def(
      "summarize",
      [](const std::vector<double>& values, int max_order) {
        const auto s = summarize(values, max_order);
        py::dict out;
        out["count"] = s.count;
        out["mean"] = s.mean;
        out["raw_moments"] = s.raw_moments;
        out["central_moments"] = s.central_moments;
        out["plugin_cumulants"] = s.plugin_cumulants;
        out["k_statistics"] = s.k_statistics;
        out["std_errors"] = s.std_errors;
        return out;
      },
      py::arg("values"), py::arg("max_order") = 4);
  mod.def(
      "decay_fit",
      [](const std::vector<std::pair<double, double>>& points) {
        const auto fit = decay_fit(points);
        return py::make_tuple(fit.slope, fit.intercept, fit.r_squared);
      },
      py::arg("points"), "Returns (slope, intercept, r_squared) of log gap on log x.");

  mod.def(
      "run_report",
      [](const std::string& config_text, int threads, const std::string& format) {
        const auto config = parse_config(config_text);
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(config, {threads, true, true});
        }
        std::ostringstream out;
        if (parse_format(format) == ReportFormat::JSON) write_json(out, config, result);
        else write_csv(out, result.rows);
        return out.str();
      },
      py::arg("config"), py::arg("threads") = 1, py::arg("format") = "csv",
      "Runs a JSON config and returns the report text.");
}

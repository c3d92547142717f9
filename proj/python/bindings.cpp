#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpsens/config.hpp"
#include "gpsens/data.hpp"
#include "gpsens/diagnostics.hpp"
#include "gpsens/error.hpp"
#include "gpsens/json_io.hpp"
#include "gpsens/laplace.hpp"
#include "gpsens/mmle.hpp"
#include "gpsens/run.hpp"
#include "gpsens/spectral.hpp"
#include "gpsens/warp.hpp"
#include "gpsens/workflow.hpp"

namespace py = pybind11;
using namespace gpsens;

namespace {

Dataset make_dataset(const Matrix& x, const Vector& y) {
  Dataset d{x, y};
  validate_dataset(d);
  return d;
}

MeanFunction mean_from_name(const std::string& name, double value) {
  if (name == "zero") return MeanFunction::zero();
  if (name == "constant") return MeanFunction::constant(value);
  if (name == "training-mean") return MeanFunction::training_mean();
  throw ConfigError("unknown mean function '" + name + "'");
}

py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(dump_json(j));
}

Json from_python(const py::object& o) {
  return parse_json(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_gpsens, m) {
  m.doc() = "Kernel sensitivity analysis for Gaussian process decisions";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<FitError>(m, "FitError", base.ptr());
  py::register_exception<OptimizationError>(m, "OptimizationError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());

  py::class_<Kernel>(m, "Kernel")
      .def_static("se", &Kernel::squared_exponential, py::arg("amplitude"), py::arg("lengthscale"))
      .def_static("matern52", &Kernel::matern52, py::arg("amplitude"), py::arg("lengthscale"))
      .def_static("periodic", &Kernel::periodic, py::arg("amplitude"), py::arg("lengthscale"), py::arg("period"))
      .def_static("rq", &Kernel::rational_quadratic, py::arg("amplitude"), py::arg("lengthscale"), py::arg("alpha"))
      .def_static("parse", &parse_kernel, py::arg("text"))
      .def_static("from_json", [](const py::object& o) { return kernel_from_json(from_python(o)); })
      .def("__call__", [](const Kernel& k, const Vector& a, const Vector& b) { return eval_kernel(k, a, b); })
      .def("gram", [](const Kernel& k, const Matrix& x) { return gram(k, x); }, py::arg("x"))
      .def("gram", [](const Kernel& k, const Matrix& x, const Matrix& x2) { return gram(k, x, x2); })
      .def("to_json", [](const Kernel& k) { return to_python(kernel_to_json(k)); })
      .def("hyperparameters",
           [](const Kernel& k) {
             py::dict out;
             for (const auto& p : k.hyperparameters()) out[py::str(p.name)] = p.value;
             return out;
           })
      .def_property_readonly("kind", [](const Kernel& k) { return std::string(kind_name(k.kind())); })
      .def("__str__", &Kernel::to_string)
      .def("__repr__", [](const Kernel& k) { return "Kernel('" + k.to_string() + "')"; });

  py::class_<FittedGp>(m, "FittedGp")
      .def(py::init([](const Matrix& x, const Vector& y, const Kernel& k, double noise, const std::string& mean,
                       double mean_value) { return FittedGp(make_dataset(x, y), k, noise, mean_from_name(mean, mean_value)); }),
           py::arg("x"), py::arg("y"), py::arg("kernel"), py::arg("noise_variance"), py::arg("mean") = "zero",
           py::arg("mean_value") = 0.0)
      .def_property_readonly("kernel", &FittedGp::kernel)
      .def_property_readonly("noise_variance", &FittedGp::noise_variance)
      .def_property_readonly("x", [](const FittedGp& g) { return g.data().x; })
      .def_property_readonly("y", [](const FittedGp& g) { return g.data().y; })
      .def_readonly("log_marginal_likelihood", &FittedGp::log_marginal_likelihood)
      .def_readonly("gradient_norm", &FittedGp::gradient_norm)
      .def("with_kernel", &FittedGp::with_kernel)
      .def("posterior",
           [](const FittedGp& g, const Vector& xs) {
             PointPosterior p = posterior(g, xs);
             return py::make_tuple(p.mean, p.variance);
           },
           py::arg("x_star"))
      .def("quantile", [](const FittedGp& g, const Vector& xs, double q, bool noise) { return posterior_quantile(g, xs, q, noise); },
           py::arg("x_star"), py::arg("q"), py::arg("include_noise") = false);

  m.def("log_marginal_likelihood",
        [](const Matrix& x, const Vector& y, const Kernel& k, double noise) {
          return log_marginal_likelihood(make_dataset(x, y), k, noise);
        },
        py::arg("x"), py::arg("y"), py::arg("kernel"), py::arg("noise_variance"));

  m.def("fit_mmle",
        [](const Matrix& x, const Vector& y, const Kernel& k, int restarts, std::uint64_t seed, double noise,
           bool fix_noise, const std::string& mean, const std::string& optimizer) {
          FitOptions o;
          o.restarts = restarts;
          o.seed = seed;
          o.initial_noise_variance = noise;
          o.fix_noise = fix_noise;
          o.mean = mean_from_name(mean, 0.0);
          if (optimizer == "nelder-mead") o.optimizer = MmleOptimizer::NelderMead;
          else if (optimizer != "bfgs") throw ConfigError("unknown optimizer '" + optimizer + "'");
          return fit_mmle(make_dataset(x, y), k, o).gp;
        },
        py::arg("x"), py::arg("y"), py::arg("kernel"), py::arg("restarts") = 1, py::arg("seed") = 0,
        py::arg("noise_variance") = 0.1, py::arg("fix_noise") = false, py::arg("mean") = "zero",
        py::arg("optimizer") = "bfgs");

  py::class_<HyperPosterior>(m, "HyperPosterior")
      .def_readonly("mode", &HyperPosterior::mode)
      .def_readonly("covariance", &HyperPosterior::covariance)
      .def_readonly("warnings", &HyperPosterior::warnings);
  m.def("laplace", [](const FittedGp& g) { return laplace_hyper_posterior(g); }, py::arg("gp"));
  m.def("sample_hyperparameters", &sample_hyperparameters, py::arg("posterior"), py::arg("count"), py::arg("seed"));

  py::class_<FunctionalSpec>(m, "Functional")
      .def_static("posterior_mean", &FunctionalSpec::posterior_mean, py::arg("x_star"))
      .def_static("posterior_quantile", &FunctionalSpec::posterior_quantile, py::arg("x_star"), py::arg("q"),
                  py::arg("include_noise") = false)
      .def_static("relative_change", &FunctionalSpec::relative_change, py::arg("reference"), py::arg("x_star"))
      .def_property_readonly("kind", [](const FunctionalSpec& f) { return functional_kind_name(f.kind); })
      .def_readonly("x_star", &FunctionalSpec::x_star)
      .def("__call__", [](const FunctionalSpec& f, const FittedGp& g) { return evaluate_functional(g, f); });

  m.def("default_grid",
        [](const Kernel& k, int size, std::optional<double> top) {
          GridOptions o;
          o.max_frequency = top;
          return default_grid(k, size, o);
        },
        py::arg("kernel"), py::arg("size") = 100, py::arg("max_frequency") = py::none());
  m.def("density_of_kernel", [](const Kernel& k, const Vector& w) { return kernel_density_values(k, w); },
        py::arg("kernel"), py::arg("frequencies"));
  m.def("kernel_from_density",
        [](const Vector& w, const Vector& s) {
          SpectralGrid g{w, s};
          g.validate();
          return kernel_from_density(g);
        },
        py::arg("frequencies"), py::arg("density"));
  m.def("spectral_gradient",
        [](const FittedGp& g, const FunctionalSpec& f, const Vector& w, const Vector& s) {
          double value = 0.0;
          Vector grad = functional_gradient(g, f, SpectralGrid{w, s}, &value);
          return py::make_tuple(value, grad);
        },
        py::arg("gp"), py::arg("functional"), py::arg("frequencies"), py::arg("density"));
  m.def("maximize_spectral",
        [](const FittedGp& g, const FunctionalSpec& f, double epsilon, int grid_size, int steps, int restarts,
           std::uint64_t seed, double direction) {
          SpectralGrid s0 = density_of_kernel(g.kernel(), default_grid(g.kernel(), grid_size));
          SpectralSearchOptions o;
          o.steps = steps;
          o.restarts = restarts;
          o.seed = seed;
          o.direction = direction;
          SpectralSearchResult r = maximize_spectral(g, f, SpectralBox{s0, epsilon}, o);
          return py::make_tuple(r.value, kernel_from_density(r.best), r.best.frequencies, r.best.density);
        },
        py::arg("gp"), py::arg("functional"), py::arg("epsilon"), py::arg("grid_size") = 100, py::arg("steps") = 500,
        py::arg("restarts") = 1, py::arg("seed") = 0, py::arg("direction") = 1.0);

  m.def("relative_frobenius", &relative_frobenius, py::arg("a"), py::arg("b"));
  m.def("frobenius_comparison",
        [](const FittedGp& g, const Kernel& k1, int samples, std::uint64_t seed, std::optional<double> quantile) {
          HyperPosterior hp = laplace_hyper_posterior(g);
          VerdictRule rule = quantile ? VerdictRule::quantile(*quantile) : VerdictRule::max();
          FrobeniusComparison c = frobenius_histogram(g, k1, hp, samples, seed, rule);
          py::dict out;
          out["candidate"] = c.candidate;
          out["samples"] = c.samples;
          out["threshold"] = c.threshold;
          out["rule"] = c.rule.name();
          out["interchangeable"] = c.interchangeable;
          return out;
        },
        py::arg("gp"), py::arg("candidate"), py::arg("samples") = 500, py::arg("seed") = 0,
        py::arg("quantile") = py::none());
  m.def("noise_matched_draws",
        [](const std::vector<Kernel>& kernels, const Matrix& points, int n_draws, std::uint64_t seed) {
          std::vector<std::string> labels;
          for (std::size_t i = 0; i < kernels.size(); ++i) labels.push_back("k" + std::to_string(i));
          return noise_matched_draws(kernels, labels, points, n_draws, seed).draws;
        },
        py::arg("kernels"), py::arg("points"), py::arg("n_draws") = 4, py::arg("seed") = 0);

  m.def("generate_synthetic",
        [](std::uint64_t seed) {
          Dataset d = generate_synthetic(seed);
          return py::make_tuple(d.x, d.y);
        },
        py::arg("seed") = 0);

  m.def("run",
        [](const py::object& config) {
          RunConfig c = config_from_json(from_python(config));
          RunOutputs out = run_from_config(c);
          return py::make_tuple(to_python(out.report), out.exit_code);
        },
        py::arg("config"), "Runs fit, perturbation search and diagnostics; returns (report, exit code).");
  m.def("reassemble_verdict", [](const py::object& report) { return reassemble_verdict(from_python(report)); },
        py::arg("report"));
}

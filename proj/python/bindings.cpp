#include "noisyts/bounds.hpp"
#include "noisyts/denoising.hpp"
#include "noisyts/fit.hpp"
#include "noisyts/harness.hpp"
#include "noisyts/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace noisyts;

namespace {

ExperimentConfig config_from(const std::string& text) {
  return parse_experiment_config(nlohmann::json::parse(text));
}

py::tuple as_tuple(const Gaussian& g) { return py::make_tuple(Vec(g.mean()), Mat(g.cov())); }

// Columns of the regret CSV as flat lists.
py::dict run(const std::string& config_json, int workers) {
  const ExperimentConfig cfg = config_from(config_json);
  ExperimentResult res;
  {
    py::gil_scoped_release release;
    res = run_experiment(cfg, workers);
  }
  std::vector<int> trial;
  std::vector<Index> t;
  std::vector<std::string> algorithm;
  std::vector<double> instant, cumulative;
  for (const TrialResult& tr : res.trials) {
    for (const RegretRecord& r : tr.records) {
      trial.push_back(r.trial);
      t.push_back(r.t);
      algorithm.push_back(to_string(r.algorithm));
      instant.push_back(r.instant_regret);
      cumulative.push_back(r.cumulative_regret);
    }
  }
  py::dict out;
  out["trial"] = trial;
  out["t"] = t;
  out["algorithm"] = algorithm;
  out["instant_regret"] = instant;
  out["cumulative_regret"] = cumulative;
  out["metadata"] = metadata_json(res).dump();
  return out;
}

ChannelModel channel(const Vec& mu_c, const Mat& sc, const Mat& sn, const Mat& sg) {
  return ChannelModel(mu_c, sc, sn, sg);
}

DenoiseState state_from(Setting setting, const Mat& noisy, const Mat& truth) {
  DenoiseState st = DenoiseState::initial(setting, noisy.cols());
  for (Index i = 0; i < noisy.rows(); ++i) {
    if (setting == Setting::kDelayed) {
      st = absorb(std::move(st), noisy.row(i).transpose(), Vec(truth.row(i).transpose()));
    } else {
      st = absorb(std::move(st), noisy.row(i).transpose());
    }
  }
  return st;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Thompson sampling bandits with noisy contexts";
  m.attr("CSV_HEADER") = kCsvHeader;
  m.attr("BOUNDS_HEADER") = kBoundsHeader;
  m.def("git_describe", &git_describe);

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<FitError>(m, "FitError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<bounds::HypothesisError>(m, "HypothesisError", PyExc_ValueError);

  m.def("resolve_config", [](const std::string& text) { return to_json(config_from(text)).dump(); },
        py::arg("config_json"));
  m.def("run", &run, py::arg("config_json"), py::arg("workers") = 1);
  m.def(
      "run_to_files",
      [](const std::string& text, int workers, const std::string& out) {
        const ExperimentConfig cfg = config_from(text);
        py::gil_scoped_release release;
        run_to_files(cfg, workers, out);
      },
      py::arg("config_json"), py::arg("workers"), py::arg("out"));
  m.def(
      "bounds_csv",
      [](const std::string& text) {
        const ExperimentConfig cfg = config_from(text);
        std::ostringstream out;
        write_bounds_csv(out, bounds_table(cfg, resolve_max_trace(cfg)));
        return out.str();
      },
      py::arg("config_json"));

  m.def(
      "verify",
      [](const std::string& suite, bool mutate_rt) {
        VerifyOptions opts;
        opts.mutate_rt = mutate_rt;
        py::list out;
        for (const CheckResult& r : run_verify(suite, opts)) {
          py::dict d;
          d["suite"] = r.suite;
          d["name"] = r.name;
          d["max_deviation"] = r.max_deviation;
          d["tolerance"] = r.tolerance;
          d["passed"] = r.passed;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("suite") = "all", py::arg("mutate_rt") = false);

  m.def(
      "fit",
      [](const Mat& rows, bool diagonal) {
        const ContextFit f = fit_context_distribution(rows, diagonal);
        return py::make_tuple(f.mean, f.cov, f.jitter);
      },
      py::arg("rows"), py::arg("diagonal") = false);
  m.def(
      "fit_fragment", [](const Mat& rows, bool diagonal) { return context_fragment(fit_context_distribution(rows, diagonal)).dump(); },
      py::arg("rows"), py::arg("diagonal") = false);

  m.def(
      "oracle_predictive",
      [](const Vec& mu_c, const Mat& sc, const Mat& sn, const Mat& sg, const Vec& chat, const Vec& gamma) {
        return as_tuple(oracle_predictive(channel(mu_c, sc, sn, sg), chat, gamma));
      },
      py::arg("mu_c"), py::arg("sigma_c"), py::arg("sigma_n"), py::arg("sigma_gamma"), py::arg("noisy_context"),
      py::arg("gamma"));
  m.def(
      "predictive_posterior",
      [](const Vec& mu_c, const Mat& sc, const Mat& sn, const Mat& sg, const Mat& past_noisy,
         std::optional<Mat> past_true, const Vec& chat) {
        const ChannelModel ch = channel(mu_c, sc, sn, sg);
        const Setting s = past_true ? Setting::kDelayed : Setting::kUnobserved;
        const DenoiseState st = state_from(s, past_noisy, past_true.value_or(Mat()));
        return as_tuple(predictive_posterior(ch, st, chat));
      },
      py::arg("mu_c"), py::arg("sigma_c"), py::arg("sigma_n"), py::arg("sigma_gamma"), py::arg("past_noisy"),
      py::arg("past_true") = py::none(), py::arg("noisy_context"),
      "Past contexts are rows. Passing past_true selects the delayed setting.");

  py::class_<bounds::BoundInputs>(m, "BoundInputs")
      .def(py::init<>())
      .def_readwrite("d", &bounds::BoundInputs::d)
      .def_readwrite("m", &bounds::BoundInputs::m)
      .def_readwrite("K", &bounds::BoundInputs::K)
      .def_readwrite("T", &bounds::BoundInputs::T)
      .def_readwrite("sigma2", &bounds::BoundInputs::sigma2)
      .def_readwrite("lambda_", &bounds::BoundInputs::lambda)
      .def_readwrite("sigma_c2", &bounds::BoundInputs::sigma_c2)
      .def_readwrite("sigma_n2", &bounds::BoundInputs::sigma_n2)
      .def_readwrite("sigma_gamma2", &bounds::BoundInputs::sigma_gamma2)
      .def_readwrite("delta", &bounds::BoundInputs::delta)
      .def_readwrite("max_trace_gtg", &bounds::BoundInputs::max_trace_gtg);
  m.def("u_bound", py::overload_cast<const bounds::BoundInputs&>(&bounds::u_bound));
  m.def("mi_delayed", &bounds::mi_delayed);
  m.def("isotropic_b", &bounds::isotropic_b);
  m.def("mi_sum_unobserved", [](const bounds::BoundInputs& in) {
    const auto s = bounds::mi_sum_unobserved(in);
    return py::make_tuple(s.exact, s.bound);
  });
  m.def("theorem1_bound", &bounds::theorem1_bound);
  m.def("theorem2_bound", &bounds::theorem2_bound);
}

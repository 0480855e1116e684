// Copyright 2026 The ldpfisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "ldpfisher/channels.h"
#include "ldpfisher/errors.h"
#include "ldpfisher/estimators.h"
#include "ldpfisher/fisher.h"
#include "ldpfisher/harness.h"
#include "ldpfisher/models.h"
#include "ldpfisher/serialization.h"

namespace py = pybind11;

namespace ldpfisher {
namespace {

// JSON crosses the boundary as text; the Python wrapper parses it.
Json Parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace
}  // namespace ldpfisher

PYBIND11_MODULE(_core, m) {
  using namespace ldpfisher;
  m.doc() = "Fisher information and estimation under local differential privacy.";

  auto value_error = py::register_exception<ArgumentDomainError>(
      m, "ArgumentDomainError", PyExc_ValueError);
  py::register_exception<DimensionMismatchError>(m, "DimensionMismatchError", value_error);
  py::register_exception<SingularParameterError>(m, "SingularParameterError", value_error);
  py::register_exception<NonStochasticKernelError>(m, "NonStochasticKernelError", value_error);
  py::register_exception<PrivacyViolationError>(m, "PrivacyViolationError", value_error);
  py::register_exception<CapExceededError>(m, "CapExceededError", value_error);
  py::register_exception<InfeasiblePrivacyError>(m, "InfeasiblePrivacyError", value_error);
  py::register_exception<HypothesisError>(m, "HypothesisError", value_error);
  py::register_exception<BudgetExceededError>(m, "BudgetExceededError", value_error);
  py::register_exception<ConfigError>(m, "ConfigError", value_error);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);

  py::class_<StatModel>(m, "StatModel")
      .def_static("bernoulli_product", &StatModel::BernoulliProduct, py::arg("d"))
      .def_static("multinomial", &StatModel::Multinomial, py::arg("d"))
      .def_static("gaussian_location", &StatModel::GaussianLocation, py::arg("d"),
                  py::arg("sigma0"))
      .def_property_readonly("dim", &StatModel::dim)
      .def_property_readonly("name", &StatModel::name)
      .def("pmf", &StatModel::Pmf, py::arg("theta"))
      .def("score", &StatModel::Score, py::arg("theta"), py::arg("x"))
      .def("source_fisher_trace", &StatModel::SourceFisherTrace, py::arg("theta"));

  py::class_<FiniteChannel>(m, "FiniteChannel")
      .def(py::init<std::size_t, std::size_t, std::vector<double>, double, std::string>(),
           py::arg("nx"), py::arg("ny"), py::arg("kernel"), py::arg("eps"),
           py::arg("label") = "")
      .def_property_readonly("input_size", &FiniteChannel::input_size)
      .def_property_readonly("output_size", &FiniteChannel::output_size)
      .def_property_readonly("eps", &FiniteChannel::eps_nominal)
      .def_property_readonly("kernel", &FiniteChannel::kernel)
      .def("__call__", &FiniteChannel::operator(), py::arg("x"), py::arg("y"))
      .def("to_json", [](const FiniteChannel& c) { return ChannelToJson(c).dump(); });

  m.def("validate_eps", py::overload_cast<const FiniteChannel&>(&ValidateEps));
  m.def("push_forward",
        [](const FiniteChannel& c, const std::vector<double>& p) { return PushForward(c, p); });
  m.def("identity_channel", &IdentityChannel, py::arg("n"));
  m.def("uniform_channel", &UniformChannel, py::arg("nx"), py::arg("ny"));
  m.def("krr", [](int k, double eps) { return MakeKrr(k, eps).Materialize(); },
        py::arg("k"), py::arg("eps"));
  m.def("yebarg", [](int d, int w, double eps) { return MakeYeBarg(d, w, eps).Materialize(); },
        py::arg("d"), py::arg("w"), py::arg("eps"));
  m.def("subsample_krr",
        [](int d, int k, double eps) { return SubsampleKrrChannel::WithK(d, k, eps).Materialize(); },
        py::arg("d"), py::arg("k"), py::arg("eps"));
  m.def("select_k", [](int d, double eps, double slack) {
    const KSelection s = SelectK(d, eps, slack);
    return py::make_tuple(s.k, s.support_size, s.p_e);
  }, py::arg("d"), py::arg("eps"), py::arg("slack") = 10.0);
  m.def("compute_ab", [](int d, int k, double eps) {
    const AffineMarginal ab = ComputeAb(d, k, eps);
    return py::make_tuple(ab.a, ab.b);
  }, py::arg("d"), py::arg("k"), py::arg("eps"));

  m.def("trace_fisher_exact", &TraceFisherExact, py::arg("model"), py::arg("channel"),
        py::arg("theta"));
  m.def("van_trees_bound", [](int d, double n, double sup_trace, double half_width) {
    return VanTreesBound(d, n, sup_trace, half_width).value;
  }, py::arg("d"), py::arg("n"), py::arg("sup_trace"), py::arg("half_width"));
  m.def("fisher_bound", [](const std::string& kind, double parameter, double eps) {
    static const std::vector<std::pair<std::string, FisherBoundKind>> kinds{
        {"variance_quadratic", FisherBoundKind::kVarianceQuadratic},
        {"variance_exponential", FisherBoundKind::kVarianceExponential},
        {"subgaussian", FisherBoundKind::kSubgaussian},
        {"subexponential", FisherBoundKind::kSubexponential}};
    for (const auto& [name, value] : kinds) {
      if (name == kind) return FisherBound(value, parameter, eps);
    }
    throw ConfigError("unknown bound kind: " + kind);
  }, py::arg("kind"), py::arg("parameter"), py::arg("eps"));
  m.def("_lower_bound_json", [](const std::string& model_json, const std::string& domain_json,
                                double s, double n, double eps) {
    const StatModel model = ModelFromJson(Parse(model_json));
    const ParamDomain domain = DomainFromJson(Parse(domain_json), model, s);
    return LowerBoundToJson(MinimaxLowerBound(model, domain, n, eps)).dump();
  });

  m.def("choose_w", &ChooseW, py::arg("d"), py::arg("eps"));
  m.def("yebarg_estimator_spec", [](int d, int w, double eps) {
    const AffineEstimatorSpec spec = YeBargEstimatorSpec(d, w, eps);
    return py::make_tuple(spec.slope, spec.intercept);
  }, py::arg("d"), py::arg("w"), py::arg("eps"));
  m.def("yebarg_estimate_from_counts",
        [](const std::vector<double>& counts, double n, int d, int w, double eps) {
          return YeBargEstimateFromCounts(counts, n, d, w, eps);
        },
        py::arg("counts"), py::arg("n"), py::arg("d"), py::arg("w"), py::arg("eps"));
  m.def("yebarg_risk_formula", &YeBargRiskFormula, py::arg("d"), py::arg("w"),
        py::arg("eps"), py::arg("n"), py::arg("sum_p_sq"));
  m.def("group_params",
        [](const std::vector<double>& theta_hat, double cap) { return GroupParams(theta_hat, cap); },
        py::arg("theta_hat"), py::arg("cap") = 2.0);

  m.def("_run_experiment_json", [](const std::string& config_json) {
    const ExperimentConfig config = ExperimentConfig::FromJson(Parse(config_json));
    RiskReport report;
    {
      py::gil_scoped_release release;
      report = RunExperiment(config);
    }
    return py::make_tuple(report.ToJson().dump(), report.ToCsv());
  });
  m.def("run_verification", [](std::uint64_t seed) {
    std::vector<py::tuple> out;
    for (const CheckResult& c : RunVerification(seed)) {
      out.push_back(py::make_tuple(c.name, c.passed, c.detail));
    }
    return out;
  }, py::arg("seed") = 1);
}

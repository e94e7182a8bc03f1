#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "opm/bandit.hpp"
#include "opm/gaussian.hpp"
#include "opm/mixed_kalman.hpp"
#include "opm/simulation.hpp"
#include "opm/validation.hpp"

namespace py = pybind11;
using namespace opm;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Possibilistic filtering core";

  py::register_exception<std::domain_error>(m, "DomainError", PyExc_ValueError);

  py::class_<GaussianPossibility>(m, "GaussianPossibility")
      .def(py::init<Vector, Matrix>(), py::arg("mean"), py::arg("spread"))
      .def_property_readonly("mean", &GaussianPossibility::mean)
      .def_property_readonly("spread", &GaussianPossibility::spread)
      .def("__call__", &GaussianPossibility::operator());

  m.def("linear_transform", &linear_transform, py::arg("g"), py::arg("A"), py::arg("b"));
  m.def("sum_independent", &sum_independent);

  py::class_<ConditionalGaussianOPM>(m, "ConditionalGaussianOPM")
      .def(py::init<Vector, Matrix, Matrix, Vector, Matrix>(), py::arg("m_theta"), py::arg("P_theta"),
           py::arg("C_xtheta"), py::arg("m_x"), py::arg("P_x"))
      .def_static("weakly_informative", &ConditionalGaussianOPM::weakly_informative, py::arg("x_dim"),
                  py::arg("theta_dim"), py::arg("x_var") = 1.0, py::arg("theta_var") = 1.0)
      .def_readwrite("m_theta", &ConditionalGaussianOPM::m_theta)
      .def_readwrite("P_theta", &ConditionalGaussianOPM::P_theta)
      .def_readwrite("C_xtheta", &ConditionalGaussianOPM::C_xtheta)
      .def_readwrite("m_x", &ConditionalGaussianOPM::m_x)
      .def_readwrite("P_x", &ConditionalGaussianOPM::P_x);

  py::class_<ModelMatrices>(m, "ModelMatrices")
      .def_static("from_joint", &ModelMatrices::from_joint, py::arg("F"), py::arg("G"), py::arg("H"), py::arg("R"),
                  py::arg("x_dim"))
      .def("joint_F", &ModelMatrices::joint_F)
      .def("joint_Q", &ModelMatrices::joint_Q)
      .def("joint_H", &ModelMatrices::joint_H);

  m.def("predict", [](const ConditionalGaussianOPM& s, const ModelMatrices& md) { return predict(s, md); });
  m.def("update", [](const ConditionalGaussianOPM& s, const Vector& y, const ModelMatrices& md) {
    auto [state, gains] = update(s, y, md);
    return py::make_tuple(state, gains.likelihood);
  });
  m.def("recover_joint", [](const ConditionalGaussianOPM& s) {
    const auto j = recover_joint(s);
    return py::make_tuple(j.mean, j.cov);
  });

  py::class_<BanditPosterior>(m, "BanditPosterior")
      .def(py::init<std::vector<std::size_t>, std::vector<double>>(), py::arg("counts"), py::arg("reward"))
      .def_static("unplayed", &BanditPosterior::unplayed)
      .def("observe", &BanditPosterior::observe)
      .def_property_readonly("counts", &BanditPosterior::counts)
      .def_property_readonly("reward", &BanditPosterior::reward);
  m.def("posterior_eval",
        [](const BanditPosterior& p, const std::vector<double>& theta) { return posterior_eval(p, theta); });
  m.def("event_credibility",
        [](const BanditPosterior& p, const std::vector<std::size_t>& e) { return event_credibility(p, e); });
  m.def("max_credible_reward", &max_credible_reward);

  m.def(
      "simulate",
      [](std::vector<double> p_d, std::size_t runs, std::size_t steps, std::uint64_t seed, double prune,
         double merge) {
        MonteCarloConfig mc;
        mc.p_d_values = std::move(p_d);
        mc.runs = runs;
        mc.master_seed = seed;
        mc.base.n_steps = steps;
        mc.base.reduction.prune_threshold = prune;
        mc.base.reduction.merge_threshold = merge;
        py::list out;
        for (const auto& r : monte_carlo(mc)) {
          py::dict d;
          d["method"] = r.method;
          d["p_d"] = r.p_d;
          d["rmse"] = r.rmse;
          d["assoc_error"] = r.assoc_error;
          d["runs"] = r.runs;
          d["seed"] = r.seed;
          out.append(d);
        }
        return out;
      },
      py::arg("p_d") = std::vector<double>{0.9, 0.8, 0.7}, py::arg("runs") = 200, py::arg("steps") = 100,
      py::arg("seed") = 1, py::arg("prune") = 1e-3, py::arg("merge") = 3.22);

  m.def("validate", [] {
    py::dict out;
    for (const auto& r : validation::run_all()) out[py::str(r.name)] = py::make_tuple(r.passed, r.max_error);
    return out;
  });
}

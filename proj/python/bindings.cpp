#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pvrc/baselines.hpp"
#include "pvrc/data.hpp"
#include "pvrc/eval.hpp"
#include "pvrc/geometry.hpp"
#include "pvrc/pvrc.hpp"
#include "pvrc/selftest.hpp"

namespace py = pybind11;

PYBIND11_MODULE(pvrclib, m) {
  m.doc() = "Polyhedron volume ratio classifier and benchmark harness";

  // geometry
  m.def("pairwise_sq_dist", &pvrc::geometry::pairwise_sq_dist,
        py::arg("points"), "Squared pairwise distances of column points");
  m.def("cm_matrix", &pvrc::geometry::cm_matrix, py::arg("sq_dist"));
  m.def("unifying_factor", &pvrc::geometry::unifying_factor, py::arg("n"));
  m.def(
      "simplex_sq_volume",
      [](const Eigen::MatrixXd& points) {
        const auto v = pvrc::geometry::simplex_sq_volume(points);
        return py::make_tuple(v.value, v.degenerate);
      },
      py::arg("points"), "Returns (squared_volume, degenerate)");
  m.def("heron_sq_area", &pvrc::geometry::heron_sq_area, py::arg("a_sq"),
        py::arg("b_sq"), py::arg("c_sq"));
  m.def("block_det", &pvrc::geometry::block_det, py::arg("a"), py::arg("b"),
        py::arg("c"), py::arg("d"));

  // pvrc classifier
  py::enum_<pvrc::PvrcNorm>(m, "PvrcNorm")
      .value("derived", pvrc::PvrcNorm::derived)
      .value("paper_literal", pvrc::PvrcNorm::paper_literal);

  py::class_<pvrc::ClassModel>(m, "ClassModel")
      .def_readonly("class_id", &pvrc::ClassModel::class_id)
      .def_readonly("prototypes", &pvrc::ClassModel::prototypes)
      .def_readonly("q_matrix", &pvrc::ClassModel::q_matrix)
      .def_readonly("regularization_applied",
                    &pvrc::ClassModel::regularization_applied)
      .def_property_readonly("prototype_count",
                             &pvrc::ClassModel::prototype_count);

  py::class_<pvrc::PvrcScore>(m, "PvrcScore")
      .def_readonly("xi", &pvrc::PvrcScore::xi)
      .def_readonly("rho_sq", &pvrc::PvrcScore::rho_sq)
      .def_readonly("class_id", &pvrc::PvrcScore::class_id);

  m.def("train_class",
        py::overload_cast<int, const Eigen::MatrixXd&>(&pvrc::train_class),
        py::arg("class_id"), py::arg("prototypes"));
  m.def("score", &pvrc::score, py::arg("test"), py::arg("model"));
  m.def("naive_ratio", &pvrc::naive_ratio, py::arg("test"),
        py::arg("prototypes"));
  m.def("classify", &pvrc::classify, py::arg("test"), py::arg("models"),
        py::arg("norm") = pvrc::PvrcNorm::derived);

  // baselines over (class_id, columns) lists
  py::class_<pvrc::ClassifierDecision>(m, "ClassifierDecision")
      .def_readonly("chosen_class", &pvrc::ClassifierDecision::chosen_class)
      .def_readonly("per_class_scores",
                    &pvrc::ClassifierDecision::per_class_scores)
      .def_readonly("converged", &pvrc::ClassifierDecision::converged);

  const auto to_dataset =
      [](const std::vector<std::pair<int, Eigen::MatrixXd>>& classes) {
        pvrc::Dataset d;
        for (const auto& [id, cols] : classes) d.classes.push_back({id, cols});
        return d;
      };
  m.def("nn_classify",
        [to_dataset](const Eigen::VectorXd& x,
                     const std::vector<std::pair<int, Eigen::MatrixXd>>& cls) {
          return pvrc::baselines::nn_classify(x, to_dataset(cls));
        });
  m.def("cm_classify",
        [to_dataset](const Eigen::VectorXd& x,
                     const std::vector<std::pair<int, Eigen::MatrixXd>>& cls) {
          return pvrc::baselines::cm_classify(x, to_dataset(cls));
        });
  m.def("lrc_distance", &pvrc::baselines::lrc_distance, py::arg("test"),
        py::arg("class_columns"));
  m.def("crc_classify",
        [to_dataset](const Eigen::VectorXd& x,
                     const std::vector<std::pair<int, Eigen::MatrixXd>>& cls) {
          return pvrc::baselines::crc_classify(x, to_dataset(cls));
        });
  m.def("src_classify",
        [to_dataset](const Eigen::VectorXd& x,
                     const std::vector<std::pair<int, Eigen::MatrixXd>>& cls,
                     double lambda_scale, double tol, int max_iters) {
          pvrc::baselines::SrcParams p{lambda_scale, tol, max_iters};
          return pvrc::baselines::src_classify(x, to_dataset(cls), p);
        },
        py::arg("test"), py::arg("classes"), py::arg("lambda_scale") = 1e-3,
        py::arg("tol") = 1e-8, py::arg("max_iters") = 5000);
  m.def("tptssr_classify",
        [to_dataset](const Eigen::VectorXd& x,
                     const std::vector<std::pair<int, Eigen::MatrixXd>>& cls,
                     int k) {
          return pvrc::baselines::tptssr_classify(x, to_dataset(cls), k);
        },
        py::arg("test"), py::arg("classes"), py::arg("k"));

  // data
  py::class_<pvrc::data::Sample>(m, "Sample")
      .def_readonly("class_id", &pvrc::data::Sample::class_id)
      .def_readonly("features", &pvrc::data::Sample::features)
      .def_readonly("source_id", &pvrc::data::Sample::source_id);

  m.def("load_manifest", &pvrc::data::load_manifest, py::arg("path"));
  m.def("load_csv", &pvrc::data::load_csv, py::arg("path"));
  m.def(
      "synth_subspace_dataset",
      [](int num_classes, int per_class, int subspace_dim, int ambient_q,
         double noise_sigma, std::uint64_t seed) {
        pvrc::data::SynthParams p{num_classes, per_class,   subspace_dim,
                                  ambient_q,   noise_sigma, seed};
        return pvrc::data::synth_subspace_dataset(p);
      },
      py::arg("num_classes") = 10, py::arg("per_class") = 6,
      py::arg("subspace_dim") = 3, py::arg("ambient_q") = 50,
      py::arg("noise_sigma") = 0.01, py::arg("seed") = 1);

  // eval
  m.def(
      "run_eval",
      [](const std::string& dataset_name,
         const std::vector<pvrc::data::Sample>& samples,
         const std::string& scheme, int n,
         const std::vector<std::string>& classifiers, int tptssr_k) {
        pvrc::eval::Protocol protocol;
        protocol.kind = scheme == "loo"
                            ? pvrc::eval::ProtocolKind::leave_one_out
                            : pvrc::eval::ProtocolKind::first_n;
        protocol.n = n;
        std::vector<pvrc::eval::ClassifierSpec> specs;
        for (const auto& name : classifiers) {
          pvrc::eval::ClassifierSpec s;
          s.name = name;
          s.tptssr_k = tptssr_k;
          specs.push_back(std::move(s));
        }
        const auto report = pvrc::eval::run_protocol(dataset_name, samples,
                                                     protocol, specs);
        py::dict out;
        for (const auto& c : report.classifiers) {
          py::dict entry;
          entry["recognition_rate"] = c.recognition_rate;
          entry["correct"] = c.correct;
          entry["total"] = c.total;
          entry["mean_s"] = c.timing.mean_s;
          out[py::str(c.name)] = entry;
        }
        return out;
      },
      py::arg("dataset_name"), py::arg("samples"), py::arg("scheme") = "loo",
      py::arg("n") = 0, py::arg("classifiers") = std::vector<std::string>{"pvrc"},
      py::arg("tptssr_k") = 1);

  m.def("selftest", [] {
    py::list out;
    for (const auto& c : pvrc::run_selftest())
      out.append(py::make_tuple(c.name, c.passed, c.detail));
    return out;
  });
}

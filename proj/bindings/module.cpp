#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <utility>

#include "stabletrees/chain.hpp"
#include "stabletrees/distributions.hpp"
#include "stabletrees/io.hpp"
#include "stabletrees/linebreaking.hpp"
#include "stabletrees/shape_law.hpp"
#include "stabletrees/verify.hpp"

#ifndef STABLETREES_VERSION
#define STABLETREES_VERSION "0.0.0"
#endif

namespace py = pybind11;
using namespace stabletrees;

namespace {

py::dict report_to_dict(const TestReport& r) {
  py::dict d;
  d["name"] = r.name;
  d["kind"] = r.kind;
  d["stat"] = r.stat;
  d["pvalue"] = r.pvalue;
  d["n"] = r.n;
  d["seed"] = r.seed;
  d["verdict"] = r.verdict();
  d["reran"] = r.reran;
  d["detail"] = r.detail;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "line-breaking constructions of alpha-stable trees";
  m.attr("__version__") = STABLETREES_VERSION;

  py::class_<RTree>(m, "Tree")
      .def_property_readonly("leaves", &RTree::leaf_count)
      .def_property_readonly("vertices", &RTree::vertex_count)
      .def_property_readonly("edges", &RTree::edge_count)
      .def_property_readonly("total_length", &RTree::total_length)
      .def("shape", &RTree::shape)
      .def("labelled_shape", &RTree::labelled_shape)
      .def("degree_census", &RTree::degree_census)
      .def("distance_matrix", &RTree::distance_matrix,
           "rows/columns ordered root, L1, ..., Lp")
      .def("validate", &RTree::validate)
      .def("to_json", &tree_to_json, py::arg("alpha") = 0.0,
           py::arg("seed") = 0)
      .def("to_newick", &tree_to_newick)
      .def("to_distance_csv", &distance_matrix_csv)
      .def_static(
          "from_json",
          [](const std::string& text) { return tree_from_json(text); })
      .def_static("from_newick", &tree_from_newick)
      .def("__repr__", [](const RTree& t) {
        return "<stabletrees.Tree leaves=" + std::to_string(t.leaf_count()) +
               " length=" + std::to_string(t.total_length()) + ">";
      });

  m.def(
      "grow",
      [](double alpha, long leaves, const std::string& algorithm,
         std::uint64_t seed, std::uint64_t stream, long n_trunc,
         bool track_weights, double intensity) {
        GrowthConfig cfg;
        cfg.alpha = alpha;
        cfg.p_target = leaves;
        cfg.algorithm = algorithm_from_string(algorithm);
        cfg.seed = seed;
        cfg.stream = stream;
        cfg.n_trunc = n_trunc;
        cfg.track_weights = track_weights;
        cfg.aldous_intensity = intensity;
        GrowthResult res = grow(cfg);
        py::dict d;
        d["tree"] = py::cast(std::move(res.tree));
        d["m1"] = res.m1;
        d["m_final"] = res.m_final;
        d["trunc_warning"] = res.trunc_warning;
        return d;
      },
      py::arg("alpha"), py::arg("leaves"), py::arg("algorithm") = "I",
      py::arg("seed") = 1, py::arg("stream") = 0, py::arg("n_trunc") = 0,
      py::arg("track_weights") = false, py::arg("intensity") = 1.0,
      "grow one tree; returns {tree, m1, m_final, trunc_warning}");

  m.def(
      "chain",
      [](double alpha, long steps, std::uint64_t seed, long n_trunc) {
        RngStream rng(seed, 0);
        return chain_trajectory(alpha, steps, rng, n_trunc);
      },
      py::arg("alpha"), py::arg("steps"), py::arg("seed") = 1,
      py::arg("n_trunc") = 0, "the mass chain as a list of (p, M_p)");

  m.def(
      "ml_moment",
      [](double beta, double theta, int k) {
        return ml_moment(ml_params(beta, theta), k);
      },
      py::arg("beta"), py::arg("theta"), py::arg("k"),
      "k-th moment of the generalized Mittag-Leffler law");
  m.def("enumerate_shape_law", &enumerate_shape_law, py::arg("alpha"),
        py::arg("p"), py::arg("cap") = 6,
        "exact law of the p-leaf shape, keyed by canonical signature");
  m.def("shape_formula_law", &shape_formula_law, py::arg("alpha"), py::arg("p"),
        py::arg("cap") = 6);

  m.def(
      "run_suite",
      [](const std::string& suite, const std::vector<double>& alphas, long n,
         std::uint64_t seed, long n_trunc, double alpha_level) {
        VerifyOptions opt;
        if (!alphas.empty()) opt.alphas = alphas;
        if (n > 0) opt.n_samples = n;
        opt.seed = seed;
        opt.n_trunc = n_trunc;
        if (alpha_level > 0.0) opt.alpha_level = alpha_level;
        py::list out;
        for (const auto& r : run_suite(suite, opt)) out.append(report_to_dict(r));
        return out;
      },
      py::arg("suite") = "all", py::arg("alphas") = std::vector<double>{},
      py::arg("n") = 0, py::arg("seed") = 1, py::arg("n_trunc") = 0,
      py::arg("alpha_level") = 0.0,
      "run a verification suite; returns a list of report dicts");

  m.def("suite_names", &suite_names);
}

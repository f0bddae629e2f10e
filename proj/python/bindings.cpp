#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gegennet/error.hpp"
#include "gegennet/features.hpp"
#include "gegennet/filters.hpp"
#include "gegennet/gegenbauer.hpp"
#include "gegennet/graph.hpp"
#include "gegennet/metrics.hpp"
#include "gegennet/model.hpp"
#include "gegennet/selftest.hpp"
#include "gegennet/serialization.hpp"
#include "gegennet/synthetic.hpp"
#include "gegennet/train.hpp"


namespace py = pybind11;
using namespace gegennet;

namespace {

SignedBipartiteGraph graph_from_edges(std::size_t u_count, std::size_t v_count,
                                      const std::vector<std::tuple<std::size_t, std::size_t, int>>& edges) {
  SignedBipartiteGraph g;
  g.u_count = u_count;
  g.v_count = v_count;
  g.edges.reserve(edges.size());
  for (const auto& [u, v, s] : edges) g.edges.push_back({u, v, s});
  g.validate();
  return g;
}

std::vector<std::tuple<std::size_t, std::size_t, int>> graph_edges(const SignedBipartiteGraph& g) {
  std::vector<std::tuple<std::size_t, std::size_t, int>> out;
  out.reserve(g.edges.size());
  for (const auto& e : g.edges) out.emplace_back(e.u, e.v, e.sign);
  return out;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["auc"] = m.auc;
  d["macro_f1"] = m.macro_f1;
  d["f1_positive"] = m.f1_positive;
  d["f1_negative"] = m.f1_negative;
  return d;
}

std::vector<std::size_t> all_edges(const SignedBipartiteGraph& g) {
  std::vector<std::size_t> out(g.edges.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  return out;
}

}  // namespace

PYBIND11_MODULE(_gegennet, m) {
  m.doc() = "Gegenbauer graph filters and link sign prediction on signed bipartite graphs";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<SignedBipartiteGraph>(m, "Graph")
      .def(py::init(&graph_from_edges), py::arg("u_count"), py::arg("v_count"), py::arg("edges"))
      .def_readonly("u_count", &SignedBipartiteGraph::u_count)
      .def_readonly("v_count", &SignedBipartiteGraph::v_count)
      .def_property_readonly("edges", &graph_edges)
      .def_property_readonly("positive_count", &SignedBipartiteGraph::positive_count)
      .def_property_readonly("negative_count", &SignedBipartiteGraph::negative_count)
      .def("__len__", [](const SignedBipartiteGraph& g) { return g.edges.size(); });

  m.def("load_edge_list",
        [](const std::string& path, std::optional<double> midpoint) {
          EdgeListFormat fmt;
          fmt.rating_midpoint = midpoint;
          return load_edge_list(path, fmt);
        },
        py::arg("path"), py::arg("rating_midpoint") = py::none());
  m.def("parse_edge_list", [](const std::string& text) { return parse_edge_list(std::string_view(text)); },
        py::arg("text"));
  m.def("planted_graph",
        [](std::size_t u_count, std::size_t v_count, std::size_t edges, double noise, std::uint64_t seed) {
          SyntheticOptions o;
          o.u_count = u_count;
          o.v_count = v_count;
          o.edges = edges;
          o.noise = noise;
          o.seed = seed;
          return planted_signed_graph(o);
        },
        py::arg("u_count") = 60, py::arg("v_count") = 80, py::arg("edges") = 600, py::arg("noise") = 0.3,
        py::arg("seed") = 1);

  py::class_<EdgeSplit>(m, "Split")
      .def_readonly("train", &EdgeSplit::train)
      .def_readonly("validation", &EdgeSplit::validation)
      .def_readonly("test", &EdgeSplit::test)
      .def_readonly("seed", &EdgeSplit::seed)
      .def_readonly("ratios", &EdgeSplit::ratios)
      .def("to_json", &split_to_json);
  m.def("split_edges",
        [](const SignedBipartiteGraph& g, std::array<double, 3> ratios, std::uint64_t seed) {
          return split_edges(g, ratios, seed);
        },
        py::arg("graph"), py::arg("ratios") = std::array<double, 3>{0.8, 0.1, 0.1}, py::arg("seed") = 7);
  m.def("split_from_json", [](const std::string& text) { return split_from_json(text); }, py::arg("text"));

  // Operators are exposed as dense arrays; the graphs handled from Python are small.
  m.def("normalized_adjacency",
        [](const SignedBipartiteGraph& g, int sign) {
          const SignMatrices s = build_sign_matrices(g);
          const SparseMatrix& b = sign > 0 ? s.a_pos : sign < 0 ? s.a_neg : s.a_all;
          return normalize_adjacency(symmetrize(b)).to_dense();
        },
        py::arg("graph"), py::arg("sign") = 0);
  m.def("gegenbauer_apply",
        [](const DenseMatrix& a_hat, const DenseMatrix& h, int k, double alpha) {
          return gegenbauer_apply(SparseMatrix::from_dense(a_hat), h, k, GegenbauerParams{alpha});
        },
        py::arg("a_hat"), py::arg("h"), py::arg("k"), py::arg("alpha"));
  m.def("gegenbauer_scalar",
        [](double lambda, int k, double alpha) { return gegenbauer_scalar(lambda, k, GegenbauerParams{alpha}); },
        py::arg("lam"), py::arg("k"), py::arg("alpha"));
  m.def("filter_curve",
        [](const std::string& kind, std::optional<Hyperparameters> hp, std::size_t points) {
          const FilterKind k = parse_filter_kind(kind);
          const FilterCurve c = classic_filter_curve(k, uniform_grid(points), hp ? *hp : default_hyperparameters(k));
          std::vector<std::pair<double, double>> out;
          for (const auto& s : c.samples) out.emplace_back(s.lambda, s.value);
          return out;
        },
        py::arg("kind"), py::arg("hyperparameters") = py::none(), py::arg("points") = 201);

  m.def("spectral_features",
        [](const SignedBipartiteGraph& g, std::size_t d, double mu) {
          FeatureOptions o;
          o.d = d;
          o.mu = mu;
          return compute_spectral_features(g, all_edges(g), o).x;
        },
        py::arg("graph"), py::arg("d") = 32, py::arg("mu") = 0.3);

  m.def("roc_auc", &roc_auc, py::arg("scores"), py::arg("signs"));
  m.def("classification_metrics",
        [](const std::vector<double>& scores, const std::vector<int>& signs) {
          return metrics_dict(classification_metrics(scores, signs));
        },
        py::arg("scores"), py::arg("signs"));

  m.def("parse_config", [](const std::string& text) { return format_config(parse_config(text)); },
        py::arg("text"), "Validates a config and returns its canonical form.");
  m.def("config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("text"));

  m.def("run_experiment",
        [](const SignedBipartiteGraph& g, const EdgeSplit& split, const std::string& config) {
          const ModelConfig cfg = parse_config(config);
          ExperimentResult r;
          {
            py::gil_scoped_release release;
            r = run_experiment(g, split, cfg);
          }
          py::dict d = metrics_dict(r.test);
          d["best_epoch"] = r.training.best_epoch;
          d["epochs_run"] = r.training.epochs_run;
          d["config_hash"] = config_hash(cfg);
          py::list history;
          for (const auto& e : r.training.history) {
            py::dict h;
            h["epoch"] = e.epoch;
            h["train_loss"] = e.train_loss;
            h["val_auc"] = e.val_auc;
            history.append(h);
          }
          d["history"] = history;
          return d;
        },
        py::arg("graph"), py::arg("split"), py::arg("config") = "");

  m.def("selftest", [] {
    std::vector<std::tuple<std::string, bool, double, double>> out;
    for (const auto& r : run_selftest()) out.emplace_back(r.name, r.passed, r.measured, r.tolerance);
    return out;
  });
}

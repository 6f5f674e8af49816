#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "glssbm/analysis.hpp"
#include "glssbm/error.hpp"
#include "glssbm/model.hpp"
#include "glssbm/postprocess.hpp"
#include "glssbm/sampler.hpp"
#include "glssbm/selection.hpp"

namespace py = pybind11;
using namespace glssbm;

namespace {

using Adjacency = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

DirectedNetwork to_network(const Adjacency& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw InputError("adjacency must be a square matrix");
  const auto n = static_cast<std::size_t>(a.shape(0));
  std::vector<std::uint8_t> adj(a.data(), a.data() + n * n);
  return DirectedNetwork::from_adjacency(n, std::move(adj));
}

Adjacency to_array(const DirectedNetwork& net) {
  const auto n = static_cast<py::ssize_t>(net.size());
  Adjacency out({n, n});
  std::copy(net.adjacency().begin(), net.adjacency().end(), out.mutable_data());
  return out;
}

// Labels cross the boundary 1-based.
py::dict to_dict(const ParamState& s) {
  py::array_t<int> labels(static_cast<py::ssize_t>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) labels.mutable_at(i) = s.labels[i] + 1;
  py::dict d;
  d["labels"] = labels;
  d["positions"] = s.positions;
  d["pi"] = s.pi;
  d["tau"] = s.tau;
  d["beta"] = s.beta;
  return d;
}

ParamState from_dict(const py::dict& d) {
  ParamState s;
  for (int l : d["labels"].cast<std::vector<int>>()) s.labels.push_back(l - 1);
  s.positions = d["positions"].cast<Eigen::MatrixXd>();
  s.pi = d["pi"].cast<Eigen::VectorXd>();
  s.tau = d["tau"].cast<Eigen::MatrixXd>();
  s.beta = d["beta"].cast<Eigen::VectorXd>();
  s.validate();
  return s;
}

py::dict simulate(std::size_t n, int k, int d, std::uint64_t seed) {
  auto cfg = ModelConfig::make(k, d);
  cfg.validate();
  Rng rng(seed);
  const auto s = sample_from_prior(cfg, n, rng);
  const auto net = generate_network(s, rng);
  py::dict out;
  out["state"] = to_dict(s);
  out["adjacency"] = to_array(net);
  return out;
}

py::dict fit(const Adjacency& adjacency, int k, int d, int iterations, int burn_in, int thin, std::uint64_t seed,
             double delta, double delta_beta) {
  const auto net = to_network(adjacency);
  auto model = ModelConfig::make(k, d);
  SamplerConfig sc;
  sc.iterations = iterations;
  sc.burn_in = burn_in;
  sc.thin = thin;
  sc.seed = seed;
  sc.delta = delta;
  sc.delta_beta = delta_beta;
  TraceStore trace;
  {
    py::gil_scoped_release release;
    trace = relabel_trace(run_chain(net, DyadMask::all_observed(net.size()), model, sc));
  }
  const auto s = static_cast<py::ssize_t>(trace.size());
  const auto n = static_cast<py::ssize_t>(net.size());
  py::array_t<int> labels({s, n});
  py::array_t<double> beta({s, static_cast<py::ssize_t>(k)});
  py::array_t<double> positions({s, n, static_cast<py::ssize_t>(d)});
  for (py::ssize_t t = 0; t < s; ++t) {
    const auto& p = trace.samples[static_cast<std::size_t>(t)];
    for (py::ssize_t i = 0; i < n; ++i) {
      labels.mutable_at(t, i) = p.labels[static_cast<std::size_t>(i)] + 1;
      for (py::ssize_t c = 0; c < d; ++c) positions.mutable_at(t, i, c) = p.positions(i, c);
    }
    for (py::ssize_t a = 0; a < k; ++a) beta.mutable_at(t, a) = p.beta[a];
  }
  const auto summary = summarize(trace, net);
  py::dict out;
  out["loglik"] = py::array_t<double>(s, trace.loglik.data());
  out["labels"] = labels;
  out["beta"] = beta;
  out["positions"] = positions;
  out["node_acceptance"] = trace.acceptance.node_rate();
  out["beta_acceptance"] = trace.acceptance.beta_rate();
  out["tau_mean"] = summary.tau_mean;
  out["edge_prob"] = summary.edge_prob;
  std::vector<int> map(summary.map_labels);
  for (auto& l : map) ++l;
  out["map_labels"] = map;
  return out;
}

py::dict waic_dict(const std::vector<double>& loglik) {
  const auto w = waic(loglik);
  py::dict d;
  d["pred"] = w.pred;
  d["penalty"] = w.penalty;
  d["waic"] = w.waic;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Latent space stochastic blockmodel for directed networks";
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  m.def("simulate", &simulate, py::arg("n"), py::arg("k"), py::arg("d"), py::arg("seed") = 1,
        "Draw parameters from the prior and a network from the model.");
  m.def(
      "log_likelihood",
      [](const py::dict& state, const Adjacency& adjacency) { return log_likelihood(from_dict(state), to_network(adjacency)); },
      py::arg("state"), py::arg("adjacency"));
  m.def(
      "edge_probability",
      [](const py::dict& state, std::size_t i, std::size_t j) { return edge_probability(from_dict(state), i, j); },
      py::arg("state"), py::arg("i"), py::arg("j"));
  m.def("fit", &fit, py::arg("adjacency"), py::arg("k"), py::arg("d"), py::arg("iterations") = 20000,
        py::arg("burn_in") = 5000, py::arg("thin") = 10, py::arg("seed") = 1, py::arg("delta") = 1.0,
        py::arg("delta_beta") = 0.5, "Run one chain and return the relabelled samples with posterior summaries.");
  m.def("waic", &waic_dict, py::arg("loglik"));
  m.def(
      "roc_auc", [](const std::vector<double>& s, const std::vector<int>& y) { return roc(s, y).auc; },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "adjusted_rand_index",
      [](const std::vector<int>& a, const std::vector<int>& b) { return adjusted_rand_index(a, b); }, py::arg("a"),
      py::arg("b"));
  m.def(
      "classical_mds", [](const Adjacency& a, int d) { return classical_mds(to_network(a), d).positions; },
      py::arg("adjacency"), py::arg("d"));
}

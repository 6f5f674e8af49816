#include "glssbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "glssbm/error.hpp"

namespace glssbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double latent_distance(const Eigen::MatrixXd& z, std::size_t i, std::size_t j) {
  if (z.cols() == 0) return 0.0;
  return (z.row(static_cast<Eigen::Index>(i)) - z.row(static_cast<Eigen::Index>(j))).norm();
}

}  // namespace

ModelConfig ModelConfig::make(int num_blocks, int latent_dim) {
  ModelConfig cfg;
  cfg.num_blocks = num_blocks;
  cfg.latent_dim = latent_dim;
  cfg.position_sd.assign(static_cast<std::size_t>(std::max(num_blocks, 0)), std::sqrt(5.0));
  return cfg;
}

void ModelConfig::validate() const {
  if (num_blocks < 1) throw InputError(fmt::format("K must satisfy K >= 1 (got {})", num_blocks));
  if (latent_dim < 0) throw InputError(fmt::format("d must satisfy d >= 0 (got {})", latent_dim));
  if (!(concentration > 0)) throw InputError("T must be > 0");
  if (!(tau_prior_a > 0) || !(tau_prior_b > 0)) throw InputError("E0 and E1 must be > 0");
  if (!std::isfinite(beta_prior_mean)) throw InputError("mu_beta must be finite");
  if (!(beta_prior_sd > 0)) throw InputError("sigma_beta must be > 0");
  if (position_sd.size() != static_cast<std::size_t>(num_blocks)) {
    throw InputError(fmt::format("sigma needs {} entries (got {})", num_blocks, position_sd.size()));
  }
  for (double s : position_sd)
    if (!(s > 0)) throw InputError("every sigma entry must be > 0");
}

void ParamState::validate() const {
  const auto k = pi.size();
  if (k < 1) throw InputError("state has no blocks");
  if (beta.size() != k || tau.rows() != k || tau.cols() != k) throw InputError("state block dimensions disagree");
  if (positions.rows() != static_cast<Eigen::Index>(labels.size())) throw InputError("positions row count != N");
  double total = 0.0;
  for (Eigen::Index a = 0; a < k; ++a) {
    if (!(pi[a] >= 0)) throw InputError("pi has a negative entry");
    total += pi[a];
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError(fmt::format("pi sums to {}", total));
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      if (a != b && !(tau(a, b) >= 0 && tau(a, b) <= 1)) throw InputError("tau entry outside [0,1]");
  for (int g : labels)
    if (g < 0 || g >= k) throw InputError(fmt::format("label {} outside 1..{}", g + 1, k));
}

bool operator==(const ParamState& a, const ParamState& b) {
  auto same = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && (x.size() == 0 || x == y);
  };
  // The tau diagonal is unused and excluded.
  if (a.labels != b.labels || !same(a.positions, b.positions) || !same(a.pi, b.pi) || !same(a.beta, b.beta) ||
      a.tau.rows() != b.tau.rows())
    return false;
  for (Eigen::Index k = 0; k < a.tau.rows(); ++k)
    for (Eigen::Index l = 0; l < a.tau.cols(); ++l)
      if (k != l && a.tau(k, l) != b.tau(k, l)) return false;
  return true;
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_logistic(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double edge_probability(const ParamState& state, std::size_t i, std::size_t j) {
  if (i == j) throw InputError(fmt::format("edge probability undefined for i == j ({})", i));
  const int gi = state.labels[i];
  const int gj = state.labels[j];
  if (gi == gj) return logistic(state.beta[gi] - latent_distance(state.positions, i, j));
  return state.tau(gi, gj);
}

double log_likelihood(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask) {
  const std::size_t n = net.size();
  if (state.size() != n || mask.size() != n) {
    throw InputError(fmt::format("state has {} nodes, network {}, mask {}", state.size(), n, mask.size()));
  }
  const auto k = static_cast<std::size_t>(state.num_blocks());
  // Terms are added in dyad order, so relabelling the blocks cannot change
  // the floating-point result.
  std::vector<double> log_t(k * k, 0.0), log_1mt(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      const double t = state.tau(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      log_t[a * k + b] = std::log(t);
      log_1mt[a * k + b] = std::log1p(-t);
    }
  double ll = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int gi = state.labels[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !mask.observed(i, j)) continue;
      const int gj = state.labels[j];
      const bool y = net.edge(i, j);
      if (gi == gj) {
        const double x = state.beta[gi] - latent_distance(state.positions, i, j);
        ll += y ? log_logistic(x) : log_logistic(-x);
      } else {
        const auto c = static_cast<std::size_t>(gi) * k + static_cast<std::size_t>(gj);
        ll += y ? log_t[c] : log_1mt[c];
      }
    }
  }
  return std::isnan(ll) ? kNegInf : ll;
}

double log_likelihood(const ParamState& state, const DirectedNetwork& net) {
  return log_likelihood(state, net, DyadMask::all_observed(net.size()));
}

ParamState sample_from_prior(const ModelConfig& cfg, std::size_t n, Rng& rng) {
  cfg.validate();
  const int k = cfg.num_blocks;
  const int d = cfg.latent_dim;
  ParamState s;
  std::vector<double> alpha(static_cast<std::size_t>(k), cfg.concentration);
  const auto pi = draw_dirichlet(rng, alpha);
  s.pi = Eigen::Map<const Eigen::VectorXd>(pi.data(), k);

  std::vector<double> log_pi(pi.size());
  for (std::size_t a = 0; a < pi.size(); ++a) log_pi[a] = std::log(pi[a]);
  s.labels.resize(n);
  for (auto& g : s.labels) g = static_cast<int>(draw_categorical_log(rng, log_pi));

  s.positions.resize(static_cast<Eigen::Index>(n), d);
  for (std::size_t i = 0; i < n; ++i) {
    const double sd = cfg.position_sd[static_cast<std::size_t>(s.labels[i])];
    for (int c = 0; c < d; ++c) s.positions(static_cast<Eigen::Index>(i), c) = draw_normal(rng, 0.0, sd);
  }

  s.tau = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (a != b) s.tau(a, b) = draw_beta(rng, cfg.tau_prior_a, cfg.tau_prior_b);

  s.beta.resize(k);
  for (int a = 0; a < k; ++a) s.beta[a] = draw_normal(rng, cfg.beta_prior_mean, cfg.beta_prior_sd);
  return s;
}

DirectedNetwork generate_network(const ParamState& state, Rng& rng) {
  const std::size_t n = state.size();
  std::vector<std::uint8_t> adj(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) adj[i * n + j] = draw_uniform(rng) < edge_probability(state, i, j) ? 1 : 0;
  return DirectedNetwork::from_adjacency(n, std::move(adj));
}

std::size_t SeparationReport::bound_violations() const {
  return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return !p.bound_holds; }));
}

std::size_t SeparationReport::cap_violations() const {
  std::size_t c = 0;
  for (const auto& b : blocks) c += b.cap_violations;
  return c;
}

SeparationReport check_separation_bounds(const ParamState& state) {
  const int k = state.num_blocks();
  const std::size_t n = state.size();
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(state.labels[i])].push_back(i);

  SeparationReport report;
  std::vector<double> diameter(static_cast<std::size_t>(k), 0.0);
  for (int a = 0; a < k; ++a) {
    const auto& m = members[static_cast<std::size_t>(a)];
    if (m.empty()) {
      report.empty_blocks.push_back(a);
      continue;
    }
    BlockGeometry g;
    g.block = a;
    g.members = m.size();
    const double cap = logistic(state.beta[a]);
    for (std::size_t x : m)
      for (std::size_t y : m) {
        if (x == y) continue;
        g.diameter = std::max(g.diameter, latent_distance(state.positions, x, y));
        ++g.cap_checks;
        if (edge_probability(state, x, y) > cap) ++g.cap_violations;
      }
    diameter[static_cast<std::size_t>(a)] = g.diameter;
    report.blocks.push_back(g);
  }

  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      const auto& ma = members[static_cast<std::size_t>(a)];
      const auto& mb = members[static_cast<std::size_t>(b)];
      if (a == b || ma.empty() || mb.empty()) continue;
      PairGeometry p;
      p.from = a;
      p.to = b;
      p.min_distance = std::numeric_limits<double>::infinity();
      for (std::size_t x : ma)
        for (std::size_t y : mb) {
          const double dist = latent_distance(state.positions, x, y);
          p.max_distance = std::max(p.max_distance, dist);
          p.min_distance = std::min(p.min_distance, dist);
        }
      const double bound = diameter[static_cast<std::size_t>(a)] + diameter[static_cast<std::size_t>(b)] + p.min_distance;
      // Relative slack absorbs rounding in the three summed norms.
      p.bound_holds = p.max_distance <= bound * (1.0 + 1e-12) + 1e-12;
      p.prob_lower = logistic(state.beta[a] - p.max_distance);
      p.prob_upper = logistic(state.beta[a] - p.min_distance);
      report.pairs.push_back(p);
    }
  return report;
}

void to_json(nlohmann::json& j, const ParamState& s) {
  const auto k = s.num_blocks();
  nlohmann::json gamma = nlohmann::json::array();
  for (int g : s.labels) gamma.push_back(g + 1);
  nlohmann::json z = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.positions.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < s.positions.cols(); ++c) row.push_back(s.positions(i, c));
    z.push_back(std::move(row));
  }
  nlohmann::json tau = nlohmann::json::array();
  for (int a = 0; a < k; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (int b = 0; b < k; ++b) row.push_back(a == b ? nlohmann::json(nullptr) : nlohmann::json(s.tau(a, b)));
    tau.push_back(std::move(row));
  }
  j = nlohmann::json{{"K", k},
                     {"d", s.latent_dim()},
                     {"gamma", gamma},
                     {"Z", z},
                     {"pi", std::vector<double>(s.pi.data(), s.pi.data() + k)},
                     {"tau", tau},
                     {"beta", std::vector<double>(s.beta.data(), s.beta.data() + k)}};
}

void from_json(const nlohmann::json& j, ParamState& s) {
  try {
    const int k = j.at("K").get<int>();
    const int d = j.at("d").get<int>();
    const auto gamma = j.at("gamma").get<std::vector<int>>();
    s.labels.resize(gamma.size());
    for (std::size_t i = 0; i < gamma.size(); ++i) s.labels[i] = gamma[i] - 1;
    const auto& z = j.at("Z");
    if (z.size() != gamma.size()) throw InputError("Z row count differs from gamma length");
    s.positions.resize(static_cast<Eigen::Index>(gamma.size()), d);
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (z[i].size() != static_cast<std::size_t>(d)) throw InputError("Z row has wrong dimension");
      for (int c = 0; c < d; ++c) s.positions(static_cast<Eigen::Index>(i), c) = z[i][static_cast<std::size_t>(c)].get<double>();
    }
    const auto pi = j.at("pi").get<std::vector<double>>();
    const auto beta = j.at("beta").get<std::vector<double>>();
    if (pi.size() != static_cast<std::size_t>(k) || beta.size() != static_cast<std::size_t>(k))
      throw InputError("pi/beta length differs from K");
    s.pi = Eigen::Map<const Eigen::VectorXd>(pi.data(), k);
    s.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), k);
    s.tau = Eigen::MatrixXd::Zero(k, k);
    const auto& tau = j.at("tau");
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (a != b) s.tau(a, b) = tau.at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b)).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed parameter state: ") + e.what());
  }
  s.validate();
}

}  // namespace glssbm

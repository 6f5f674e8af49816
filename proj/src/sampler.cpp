#include "glssbm/sampler.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "glssbm/error.hpp"

namespace glssbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double xlog(double count, double p) { return count == 0.0 ? 0.0 : count * std::log(p); }
double xlog1m(double count, double p) { return count == 0.0 ? 0.0 : count * std::log1p(-p); }

double bernoulli_logit_ll(bool y, double x) { return y ? log_logistic(x) : log_logistic(-x); }

double normal_log_pdf(double x, double mean, double sd) {
  const double u = (x - mean) / sd;
  return -0.5 * u * u - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

// log MVN(z; mean, var * I)
double spherical_log_pdf(const Eigen::VectorXd& z, const Eigen::VectorXd& mean, double var) {
  const auto d = static_cast<double>(z.size());
  if (z.size() == 0) return 0.0;
  return -0.5 * d * std::log(2.0 * std::numbers::pi * var) - 0.5 * (z - mean).squaredNorm() / var;
}

struct NodeCounts {
  // Per block l, over j != i with gamma_j = l and the dyad observed.
  std::vector<double> out_dyads, out_edges, in_dyads, in_edges;
};

NodeCounts node_counts(const ParamState& s, const DirectedNetwork& net, const DyadMask& mask, std::size_t i) {
  const auto k = static_cast<std::size_t>(s.num_blocks());
  NodeCounts c{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0), std::vector<double>(k, 0.0),
               std::vector<double>(k, 0.0)};
  for (std::size_t j = 0; j < net.size(); ++j) {
    if (j == i) continue;
    const auto l = static_cast<std::size_t>(s.labels[j]);
    if (mask.observed(i, j)) {
      c.out_dyads[l] += 1.0;
      if (net.edge(i, j)) c.out_edges[l] += 1.0;
    }
    if (mask.observed(j, i)) {
      c.in_dyads[l] += 1.0;
      if (net.edge(j, i)) c.in_edges[l] += 1.0;
    }
  }
  return c;
}

// Log-likelihood of every observed dyad involving i, for each candidate
// block of i, with i placed at z. Other nodes keep their labels.
std::vector<double> node_log_likelihoods(const ParamState& s, const DirectedNetwork& net, const DyadMask& mask,
                                         std::size_t i, const NodeCounts& c, const Eigen::VectorXd& z) {
  const int k = s.num_blocks();
  const auto d = s.positions.cols();
  std::vector<double> ll(static_cast<std::size_t>(k), 0.0);
  const auto& pos = s.positions;
  for (std::size_t j = 0; j < net.size(); ++j) {
    if (j == i) continue;
    const bool out = mask.observed(i, j);
    const bool in = mask.observed(j, i);
    if (!out && !in) continue;
    const int l = s.labels[j];
    double sq = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double diff = z[c] - pos(static_cast<Eigen::Index>(j), c);
      sq += diff * diff;
    }
    const double x = s.beta[l] - std::sqrt(sq);
    const double lp = log_logistic(x);  // log P(edge)
    const double lq = lp - x;           // log P(no edge)
    double t = 0.0;
    if (out) t += net.edge(i, j) ? lp : lq;
    if (in) t += net.edge(j, i) ? lp : lq;
    ll[static_cast<std::size_t>(l)] += t;
  }
  for (int a = 0; a < k; ++a) {
    double between = 0.0;
    for (int b = 0; b < k; ++b) {
      if (a == b) continue;
      const auto bb = static_cast<std::size_t>(b);
      const double t_out = s.tau(a, b);
      const double t_in = s.tau(b, a);
      between += xlog(c.out_edges[bb], t_out) + xlog1m(c.out_dyads[bb] - c.out_edges[bb], t_out) +
                 xlog(c.in_edges[bb], t_in) + xlog1m(c.in_dyads[bb] - c.in_edges[bb], t_in);
    }
    ll[static_cast<std::size_t>(a)] += between;
    if (std::isnan(ll[static_cast<std::size_t>(a)])) ll[static_cast<std::size_t>(a)] = kNegInf;
  }
  return ll;
}

std::vector<double> add_log_pi(std::vector<double> ll, const Eigen::VectorXd& pi) {
  for (std::size_t a = 0; a < ll.size(); ++a) ll[a] += std::log(pi[static_cast<Eigen::Index>(a)]);
  return ll;
}

// Mean position of the members of `label` other than i; false if none.
bool block_mean_excluding(const ParamState& s, std::size_t i, int label, Eigen::VectorXd& mean) {
  mean = Eigen::VectorXd::Zero(s.positions.cols());
  std::size_t count = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j == i || s.labels[j] != label) continue;
    mean += s.positions.row(static_cast<Eigen::Index>(j)).transpose();
    ++count;
  }
  if (count == 0) return false;
  mean /= static_cast<double>(count);
  return true;
}

double node_prior_log_density(const ParamState& s, int label, const Eigen::VectorXd& z, const ModelConfig& cfg) {
  const double sd = cfg.position_sd[static_cast<std::size_t>(label)];
  return std::log(s.pi[label]) + spherical_log_pdf(z, Eigen::VectorXd::Zero(z.size()), sd * sd);
}

}  // namespace

void SamplerConfig::validate() const {
  if (burn_in < 0) throw InputError("burn_in must be >= 0");
  if (iterations < burn_in) throw InputError("iterations must be >= burn_in");
  if (thin < 1) throw InputError("thin must be >= 1");
  if (!(delta > 0)) throw InputError("delta must be > 0");
  if (!(delta_beta > 0)) throw InputError("delta_beta must be > 0");
}

int SamplerConfig::stored_samples() const { return (iterations - burn_in) / thin; }

Eigen::VectorXd update_pi(const ParamState& state, const ModelConfig& cfg, Rng& rng) {
  const int k = state.num_blocks();
  std::vector<double> alpha(static_cast<std::size_t>(k), cfg.concentration);
  for (int g : state.labels) alpha[static_cast<std::size_t>(g)] += 1.0;
  const auto draw = draw_dirichlet(rng, alpha);
  return Eigen::Map<const Eigen::VectorXd>(draw.data(), k);
}

BlockCounts block_counts(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask) {
  const int k = state.num_blocks();
  BlockCounts c{Eigen::MatrixXd::Zero(k, k), Eigen::MatrixXd::Zero(k, k)};
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = 0; j < net.size(); ++j) {
      if (i == j || !mask.observed(i, j)) continue;
      const int a = state.labels[i];
      const int b = state.labels[j];
      c.dyads(a, b) += 1.0;
      if (net.edge(i, j)) c.edges(a, b) += 1.0;
    }
  return c;
}

Eigen::MatrixXd update_tau(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask,
                           const ModelConfig& cfg, Rng& rng, bool paper_literal) {
  const int k = state.num_blocks();
  const auto c = block_counts(state, net, mask);
  Eigen::MatrixXd tau = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      if (a == b) continue;
      const double e = c.edges(a, b);
      const double non = c.dyads(a, b) - e;
      tau(a, b) = paper_literal ? draw_beta(rng, cfg.tau_prior_a + non, cfg.tau_prior_b + e)
                                : draw_beta(rng, cfg.tau_prior_a + e, cfg.tau_prior_b + non);
    }
  return tau;
}

double block_log_likelihood(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask, int k,
                            double beta_k) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state.labels[i] == k) members.push_back(i);
  const auto d = state.positions.cols();
  double ll = 0.0;
  for (std::size_t x : members)
    for (std::size_t y : members) {
      if (x == y || !mask.observed(x, y)) continue;
      const double dist = d == 0 ? 0.0
                                 : (state.positions.row(static_cast<Eigen::Index>(x)) -
                                    state.positions.row(static_cast<Eigen::Index>(y)))
                                       .norm();
      ll += bernoulli_logit_ll(net.edge(x, y), beta_k - dist);
    }
  return ll;
}

double beta_log_acceptance(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask,
                           const ModelConfig& cfg, int k, double beta_star) {
  const double cur = state.beta[k];
  if (beta_star == cur) return 0.0;
  return block_log_likelihood(state, net, mask, k, beta_star) - block_log_likelihood(state, net, mask, k, cur) +
         normal_log_pdf(beta_star, cfg.beta_prior_mean, cfg.beta_prior_sd) -
         normal_log_pdf(cur, cfg.beta_prior_mean, cfg.beta_prior_sd);
}

int update_beta(ParamState& state, const DirectedNetwork& net, const DyadMask& mask, const ModelConfig& cfg,
                double delta_beta, Rng& rng) {
  const int k = state.num_blocks();
  const auto d = state.positions.cols();
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < state.size(); ++i) members[static_cast<std::size_t>(state.labels[i])].push_back(i);

  int accepted = 0;
  std::vector<std::pair<double, bool>> dyads;  // (distance, edge)
  for (int a = 0; a < k; ++a) {
    dyads.clear();
    for (std::size_t x : members[static_cast<std::size_t>(a)])
      for (std::size_t y : members[static_cast<std::size_t>(a)]) {
        if (x == y || !mask.observed(x, y)) continue;
        const double dist = d == 0 ? 0.0
                                   : (state.positions.row(static_cast<Eigen::Index>(x)) -
                                      state.positions.row(static_cast<Eigen::Index>(y)))
                                         .norm();
        dyads.emplace_back(dist, net.edge(x, y));
      }
    const double cur = state.beta[a];
    const double prop = cur + delta_beta * draw_normal(rng);
    double delta_ll = 0.0;
    for (const auto& [dist, y] : dyads)
      delta_ll += bernoulli_logit_ll(y, prop - dist) - bernoulli_logit_ll(y, cur - dist);
    const double log_ratio = delta_ll + normal_log_pdf(prop, cfg.beta_prior_mean, cfg.beta_prior_sd) -
                             normal_log_pdf(cur, cfg.beta_prior_mean, cfg.beta_prior_sd);
    if (std::log(draw_uniform(rng)) < log_ratio) {
      state.beta[a] = prop;
      ++accepted;
    }
  }
  return accepted;
}

std::vector<double> label_log_weights(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask,
                                      std::size_t i, const Eigen::VectorXd& position) {
  const auto counts = node_counts(state, net, mask, i);
  return add_log_pi(node_log_likelihoods(state, net, mask, i, counts, position), state.pi);
}

double position_proposal_log_density(const ParamState& state, std::size_t i, int from_label,
                                     const Eigen::VectorXd& z_from, int label, const Eigen::VectorXd& z_to,
                                     const ModelConfig& cfg, double delta) {
  if (z_to.size() == 0) return 0.0;
  if (label == from_label) return spherical_log_pdf(z_to, z_from, delta);
  Eigen::VectorXd mean;
  if (block_mean_excluding(state, i, label, mean)) return spherical_log_pdf(z_to, mean, delta);
  const double sd = cfg.position_sd[static_cast<std::size_t>(label)];
  return spherical_log_pdf(z_to, Eigen::VectorXd::Zero(z_to.size()), sd * sd);
}

NodeProposal propose_node(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask, std::size_t i,
                          const ModelConfig& cfg, double delta, Rng& rng) {
  const auto d = state.positions.cols();
  const int cur_label = state.labels[i];
  const Eigen::VectorXd z_cur = state.positions.row(static_cast<Eigen::Index>(i)).transpose();
  const auto counts = node_counts(state, net, mask, i);

  const auto ll_cur = node_log_likelihoods(state, net, mask, i, counts, z_cur);
  const auto w_cur = add_log_pi(ll_cur, state.pi);

  NodeProposal p;
  p.node = i;
  p.label = static_cast<int>(draw_categorical_log(rng, w_cur));
  p.position.resize(d);
  Eigen::VectorXd center;
  double sd = std::sqrt(delta);
  if (p.label == cur_label) {
    center = z_cur;
  } else if (!block_mean_excluding(state, i, p.label, center)) {
    center = Eigen::VectorXd::Zero(d);
    sd = cfg.position_sd[static_cast<std::size_t>(p.label)];
  }
  for (Eigen::Index c = 0; c < d; ++c) p.position[c] = center[c] + sd * draw_normal(rng);

  const auto ll_prop = node_log_likelihoods(state, net, mask, i, counts, p.position);
  const auto w_prop = add_log_pi(ll_prop, state.pi);

  p.loglik_current = ll_cur[static_cast<std::size_t>(cur_label)];
  p.loglik_proposed = ll_prop[static_cast<std::size_t>(p.label)];
  p.log_q_forward = w_cur[static_cast<std::size_t>(p.label)] - log_sum_exp(w_cur) +
                    position_proposal_log_density(state, i, cur_label, z_cur, p.label, p.position, cfg, delta);
  p.log_q_reverse = w_prop[static_cast<std::size_t>(cur_label)] - log_sum_exp(w_prop) +
                    position_proposal_log_density(state, i, p.label, p.position, cur_label, z_cur, cfg, delta);
  return p;
}

double node_log_acceptance(const ParamState& state, const NodeProposal& p, const ModelConfig& cfg) {
  const std::size_t i = p.node;
  const int cur_label = state.labels[i];
  const Eigen::VectorXd z_cur = state.positions.row(static_cast<Eigen::Index>(i)).transpose();
  if (p.label == cur_label && p.position == z_cur) return 0.0;
  const double r = p.loglik_proposed - p.loglik_current + node_prior_log_density(state, p.label, p.position, cfg) -
                   node_prior_log_density(state, cur_label, z_cur, cfg) + p.log_q_reverse - p.log_q_forward;
  return std::isnan(r) ? kNegInf : r;
}

bool update_node(ParamState& state, const DirectedNetwork& net, const DyadMask& mask, std::size_t i,
                 const ModelConfig& cfg, double delta, Rng& rng) {
  const auto p = propose_node(state, net, mask, i, cfg, delta, rng);
  const double log_ratio = node_log_acceptance(state, p, cfg);
  if (!(std::log(draw_uniform(rng)) < log_ratio)) return false;
  state.labels[i] = p.label;
  if (p.position.size() > 0) state.positions.row(static_cast<Eigen::Index>(i)) = p.position.transpose();
  return true;
}

TraceStore run_chain(const DirectedNetwork& net, const DyadMask& mask, const ModelConfig& model_cfg,
                     const SamplerConfig& sampler_cfg) {
  model_cfg.validate();
  sampler_cfg.validate();
  if (mask.size() != net.size()) throw InputError("mask size differs from network size");

  TraceStore trace;
  trace.model = model_cfg;
  trace.sampler = sampler_cfg;
  trace.samples.reserve(static_cast<std::size_t>(sampler_cfg.stored_samples()));
  trace.loglik.reserve(static_cast<std::size_t>(sampler_cfg.stored_samples()));

  Rng rng(sampler_cfg.seed);
  ParamState state = sample_from_prior(model_cfg, net.size(), rng);
  const int k = model_cfg.num_blocks;
  const bool move_nodes = k > 1 || model_cfg.latent_dim > 0;
  auto& acc = trace.acceptance;

  for (int t = 1; t <= sampler_cfg.iterations; ++t) {
    if (move_nodes) {
      for (std::size_t i = 0; i < net.size(); ++i) {
        const int before = state.labels[i];
        ++acc.node_proposals;
        if (update_node(state, net, mask, i, model_cfg, sampler_cfg.delta, rng)) {
          ++acc.node_accepted;
          if (state.labels[i] != before) ++acc.label_changes;
        }
      }
    }
    acc.beta_proposals += static_cast<std::uint64_t>(k);
    acc.beta_accepted += static_cast<std::uint64_t>(update_beta(state, net, mask, model_cfg, sampler_cfg.delta_beta, rng));
    state.pi = update_pi(state, model_cfg, rng);
    if (k > 1) state.tau = update_tau(state, net, mask, model_cfg, rng, sampler_cfg.paper_literal_tau);

    if (t > sampler_cfg.burn_in && (t - sampler_cfg.burn_in) % sampler_cfg.thin == 0) {
      trace.samples.push_back(state);
      trace.loglik.push_back(log_likelihood(state, net, mask));
    }
  }
  return trace;
}

}  // namespace glssbm

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "glssbm/model.hpp"
#include "glssbm/network.hpp"
#include "glssbm/random.hpp"

namespace glssbm {

struct SamplerConfig {
  int iterations = 20000;
  int burn_in = 5000;
  int thin = 10;
  /// Covariance scale of the Gaussian position proposals (delta * I).
  double delta = 1.0;
  /// Standard deviation of the beta random walk.
  double delta_beta = 0.5;
  std::uint64_t seed = 1;
  /// Use beta(E0 + n - e, E1 + e) for the tau update instead of the
  /// conjugate beta(E0 + e, E1 + n - e). For comparison runs only.
  bool paper_literal_tau = false;

  void validate() const;
  /// Number of states run_chain stores.
  int stored_samples() const;
};

struct AcceptanceStats {
  std::uint64_t node_proposals = 0;
  std::uint64_t node_accepted = 0;
  std::uint64_t label_changes = 0;
  std::uint64_t beta_proposals = 0;
  std::uint64_t beta_accepted = 0;

  double node_rate() const { return node_proposals ? double(node_accepted) / double(node_proposals) : 0.0; }
  double beta_rate() const { return beta_proposals ? double(beta_accepted) / double(beta_proposals) : 0.0; }
};

/// Posterior draws in sweep order with their log-likelihoods.
struct TraceStore {
  std::vector<ParamState> samples;
  std::vector<double> loglik;
  AcceptanceStats acceptance;
  ModelConfig model;
  SamplerConfig sampler;

  std::size_t size() const { return samples.size(); }
};

/// Gibbs draw of pi from Dirichlet(T + n_1, ..., T + n_K).
Eigen::VectorXd update_pi(const ParamState& state, const ModelConfig& cfg, Rng& rng);

/// Observed ordered-dyad counts between blocks: n(k,l) dyads, e(k,l) edges.
struct BlockCounts {
  Eigen::MatrixXd dyads;
  Eigen::MatrixXd edges;
};
BlockCounts block_counts(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask);

/// Gibbs draw of every off-diagonal tau(k,l) from
/// beta(E0 + e_kl, E1 + n_kl - e_kl). The diagonal is left at 0.
Eigen::MatrixXd update_tau(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask,
                           const ModelConfig& cfg, Rng& rng, bool paper_literal = false);

/// Log-likelihood of the observed within-block dyads of block k with the
/// intercept replaced by beta_k.
double block_log_likelihood(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask, int k,
                            double beta_k);

/// log of the Metropolis-Hastings ratio for moving beta_k to beta_star.
double beta_log_acceptance(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask,
                           const ModelConfig& cfg, int k, double beta_star);

/// One random-walk Metropolis step per block. Returns the number accepted.
int update_beta(ParamState& state, const DirectedNetwork& net, const DyadMask& mask, const ModelConfig& cfg,
                double delta_beta, Rng& rng);

/// A joint (label, position) proposal for one node, with everything the
/// acceptance ratio needs.
struct NodeProposal {
  std::size_t node = 0;
  int label = 0;
  Eigen::VectorXd position;
  double log_q_forward = 0.0;   // log q((g, z) -> (g*, z*))
  double log_q_reverse = 0.0;   // log q((g*, z*) -> (g, z))
  double loglik_current = 0.0;  // likelihood terms involving the node, current state
  double loglik_proposed = 0.0;  // same terms in the proposed state
};

/// Unnormalized log label weights for node i placed at `position`:
/// log pi_k plus the log-likelihood of every observed dyad involving i
/// when i is in block k. Normalized, these are the label proposal.
std::vector<double> label_log_weights(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask,
                                      std::size_t i, const Eigen::VectorXd& position);

/// Log-density of the position proposal z_to for node i moving to block
/// `label` from a state where it sits at z_from in block `from_label`:
/// random walk around z_from when the label is kept, Gaussian around the
/// mean of the other members of the target block otherwise, and the prior
/// when the target block has no other members.
double position_proposal_log_density(const ParamState& state, std::size_t i, int from_label,
                                     const Eigen::VectorXd& z_from, int label, const Eigen::VectorXd& z_to,
                                     const ModelConfig& cfg, double delta);

/// Draws a label from the full-conditional weights at the current
/// position, then a position given that label. The reverse label
/// probability is evaluated with the node at its proposed position.
NodeProposal propose_node(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask, std::size_t i,
                          const ModelConfig& cfg, double delta, Rng& rng);

/// log of the Metropolis-Hastings ratio for a node proposal.
double node_log_acceptance(const ParamState& state, const NodeProposal& proposal, const ModelConfig& cfg);

/// Proposes and accepts/rejects a move of node i. Returns true if accepted.
bool update_node(ParamState& state, const DirectedNetwork& net, const DyadMask& mask, std::size_t i,
                 const ModelConfig& cfg, double delta, Rng& rng);

/// Runs one chain: prior initialization, then per sweep every node in
/// index order, every beta_k, then pi and tau.
TraceStore run_chain(const DirectedNetwork& net, const DyadMask& mask, const ModelConfig& model_cfg,
                     const SamplerConfig& sampler_cfg);

}  // namespace glssbm

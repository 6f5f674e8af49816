#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include "json.hpp"

#include "glssbm/network.hpp"
#include "glssbm/random.hpp"

namespace glssbm {

/// Dimensions and prior hyperparameters of the latent space stochastic
/// blockmodel. Defaults: Dirichlet(10,...,10) block proportions, uniform
/// beta(1,1) between-block probabilities, N(0, 5^2) block intercepts and
/// latent positions with variance 5 in every block.
struct ModelConfig {
  int num_blocks = 1;
  int latent_dim = 0;
  double concentration = 10.0;
  double tau_prior_a = 1.0;
  double tau_prior_b = 1.0;
  double beta_prior_mean = 0.0;
  double beta_prior_sd = 5.0;
  std::vector<double> position_sd;  // one per block

  /// Config with the default hyperparameters for K blocks in d dimensions.
  static ModelConfig make(int num_blocks, int latent_dim);

  /// Throws InputError naming the first violated constraint.
  void validate() const;
};

/// One realization of every model parameter. Block labels are 0-based in
/// memory; every file format and the Python module use 1-based labels.
struct ParamState {
  std::vector<int> labels;    // N, in [0, K)
  Eigen::MatrixXd positions;  // N x d
  Eigen::VectorXd pi;         // K, on the simplex
  Eigen::MatrixXd tau;        // K x K, diagonal unused
  Eigen::VectorXd beta;       // K

  std::size_t size() const { return labels.size(); }
  int num_blocks() const { return static_cast<int>(pi.size()); }
  int latent_dim() const { return static_cast<int>(positions.cols()); }

  /// Throws InputError if an invariant is violated.
  void validate() const;

  friend bool operator==(const ParamState& a, const ParamState& b);
};

double logistic(double x);
/// log(logistic(x)), accurate for large |x|.
double log_logistic(double x);

/// Probability that i follows j: logistic(beta_k - |Z_i - Z_j|) when both
/// nodes are in block k, tau(gamma_i, gamma_j) otherwise.
double edge_probability(const ParamState& state, std::size_t i, std::size_t j);

/// Log Bernoulli likelihood of the observed ordered dyads. Within-block
/// dyads count in both directions and every ordered block pair (k, l),
/// k != l, has its own tau. Returns -inf when an exact 0/1 probability
/// contradicts the data.
double log_likelihood(const ParamState& state, const DirectedNetwork& net, const DyadMask& mask);
double log_likelihood(const ParamState& state, const DirectedNetwork& net);

/// Draws every parameter from its prior for a network of n nodes.
ParamState sample_from_prior(const ModelConfig& cfg, std::size_t n, Rng& rng);

/// Independent Bernoulli draw of every ordered off-diagonal dyad.
DirectedNetwork generate_network(const ParamState& state, Rng& rng);

struct BlockGeometry {
  int block = 0;
  std::size_t members = 0;
  double diameter = 0.0;         // max within-block distance, 0 for < 2 members
  std::size_t cap_checks = 0;    // within-block ordered dyads examined
  std::size_t cap_violations = 0;  // dyads with p_ij > logistic(beta_k)
};

struct PairGeometry {
  int from = 0;
  int to = 0;
  double max_distance = 0.0;
  double min_distance = 0.0;
  /// logistic(beta_from - max_distance) and logistic(beta_from - min_distance):
  /// the range a single-intercept latent space model would assign to the pair.
  double prob_lower = 0.0;
  double prob_upper = 0.0;
  bool bound_holds = true;  // max_distance <= diam_from + diam_to + min_distance
};

struct SeparationReport {
  std::vector<BlockGeometry> blocks;
  std::vector<PairGeometry> pairs;  // ordered pairs of non-empty blocks
  std::vector<int> empty_blocks;

  std::size_t bound_violations() const;
  std::size_t cap_violations() const;
};

/// Within- and between-block distance extremes, the triangle-inequality
/// bound on the between-block diameter, and the within-block probability
/// cap. Empty blocks are listed and skipped.
SeparationReport check_separation_bounds(const ParamState& state);

void to_json(nlohmann::json& j, const ParamState& s);
void from_json(const nlohmann::json& j, ParamState& s);

}  // namespace glssbm

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "glssbm/model.hpp"
#include "glssbm/network.hpp"
#include "glssbm/sampler.hpp"

namespace glssbm {

/// Reference latent positions for Procrustes alignment: N x d, centered.
struct ReferenceConfiguration {
  Eigen::MatrixXd positions;
};

/// Classical (Torgerson) scaling of a symmetric dissimilarity matrix.
/// Negative eigenvalues are clamped to zero.
Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& dissimilarity, int dim);

/// Classical scaling of 1 - (A + A^T)/2 (zero diagonal). dim = 0 gives an
/// N x 0 configuration.
ReferenceConfiguration classical_mds(const DirectedNetwork& net, int dim);

enum class AlignMode {
  PerBlock,  // one rigid motion per block, fitted to that block's members
  Global,    // one rigid motion for all nodes
};

/// Rotation/reflection plus translation minimizing the squared distance to
/// the reference. Blocks with a single member are translated onto their
/// reference point.
Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& positions, std::span<const int> labels,
                                 const ReferenceConfiguration& ref, AlignMode mode = AlignMode::PerBlock);

/// Aligns the positions of every sample.
TraceStore align_trace(const TraceStore& trace, const ReferenceConfiguration& ref,
                       AlignMode mode = AlignMode::PerBlock);

/// Renames block a to perm[a] in every label-indexed quantity.
void apply_label_permutation(ParamState& state, std::span<const int> perm);

/// Permutation (old label -> reference label) that maximizes agreement of
/// `labels` with `reference`; ties go to the lexicographically smallest.
std::vector<int> best_label_permutation(std::span<const int> labels, std::span<const int> reference, int num_blocks);

/// Relabels every sample against the highest-likelihood sample.
TraceStore relabel_trace(const TraceStore& trace);

struct PosteriorSummary {
  Eigen::MatrixXd tau_mean;      // K x K, NaN diagonal
  Eigen::MatrixXd within_range;  // K x 2 (min, max); NaN when a block has < 2 members
  Eigen::VectorXd allocation;    // K
  Eigen::VectorXd beta_mean;     // K
  std::vector<int> map_labels;   // N, 0-based
  Eigen::MatrixXd mean_positions;  // N x d
  Eigen::MatrixXd edge_prob;     // N x N, NaN diagonal
};

/// Posterior means over an already relabelled and aligned trace.
PosteriorSummary summarize(const TraceStore& trace, const DirectedNetwork& net);

/// Writes block_probabilities.csv, allocation.csv, memberships.csv,
/// party_blocks.csv, positions.csv and edge_prob.csv into `dir`.
void write_summary(const PosteriorSummary& summary, const DirectedNetwork& net, std::span<const NodeMeta> meta,
                   const std::filesystem::path& dir);

}  // namespace glssbm

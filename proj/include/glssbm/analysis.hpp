#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glssbm/model.hpp"
#include "glssbm/network.hpp"
#include "glssbm/postprocess.hpp"
#include "glssbm/sampler.hpp"

namespace glssbm {

// ---------------------------------------------------------------- ROC

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), from (0,0) to (1,1)
  double auc = 0.0;
};

/// Threshold sweep over distinct scores, highest first; tied scores form
/// one step, so the area equals the rank-sum AUC with ties counted half.
RocCurve roc(std::span<const double> scores, std::span<const int> labels);

// ---------------------------------------------------- cross-validation

/// Ordered off-diagonal dyad (from, to).
using Dyad = std::pair<std::size_t, std::size_t>;

/// Random partition of all N(N-1) ordered dyads into `folds` sets whose
/// sizes differ by at most one.
std::vector<std::vector<Dyad>> partition_dyads(std::size_t n, int folds, Rng& rng);

struct CvResult {
  RocCurve roc;
  std::vector<double> fold_auc;  // NaN for a fold holding a single class
  std::vector<double> scores;    // pooled held-out scores
  std::vector<int> labels;       // matching true edge indicators
};

/// k-fold link prediction. Each fold's dyads are removed from the
/// likelihood; a held-out dyad is scored by its posterior-mean edge
/// probability. Folds run on up to `threads` workers.
CvResult kfold_dyad_cv(const DirectedNetwork& net, const ModelConfig& model, const SamplerConfig& sampler,
                       int folds, std::uint64_t seed, unsigned threads = 1);

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path);

// -------------------------------------------------------------- votes

enum class Agreement { Agree, Disagree, Absent };

const char* to_string(Agreement a);

/// Group of each ordered pair (i, j), i != j, for one vote: both YES or
/// both NO agree, one of each disagree, any absence is Absent. Row-major
/// N x N; the diagonal is Absent and never read.
std::vector<Agreement> vote_agreement_groups(const VoteTable& votes, const std::string& vote_id);

struct KdeCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
  std::vector<double> data;  // the sample the curve was fitted to

  /// Gaussian kernel density at x.
  double evaluate(double x) const;
};

/// Silverman's rule of thumb: 0.9 * min(sd, IQR / 1.34) * n^(-1/5),
/// falling back to sd when the IQR is zero.
double silverman_bandwidth(std::span<const double> values);

/// Gaussian KDE evaluated on `grid_size` uniform points spanning
/// [min - 5h, max + 5h] clipped to [0, 1]. Needs at least two values with
/// nonzero spread.
KdeCurve kde(std::span<const double> values, std::size_t grid_size = 256);

struct GroupDensity {
  Agreement group = Agreement::Absent;
  std::size_t count = 0;
  double mean = 0.0;  // NaN when empty
  /// Set unless the group has fewer than two values or zero spread, in
  /// which case it is reported as a point mass at `mean`.
  std::optional<KdeCurve> curve;
  bool point_mass() const { return !curve.has_value(); }
};

struct VoteDensity {
  std::string vote_id;
  std::vector<GroupDensity> groups;  // Agree, Disagree, Absent
};

/// Per vote, the posterior-mean edge probabilities of ordered dyads
/// grouped by voting agreement, with a density per group.
std::vector<VoteDensity> vote_density_report(const PosteriorSummary& summary, const VoteTable& votes,
                                             std::size_t grid_size = 256);

/// Columns vote_id,group,x,density. Point-mass groups get one row with
/// density "inf" at their value.
void write_kde_csv(const std::vector<VoteDensity>& report, const std::filesystem::path& path);

// ------------------------------------------------------------ scoring

/// Adjusted Rand index between two partitions of the same items.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace glssbm

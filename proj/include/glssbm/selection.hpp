#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "glssbm/model.hpp"
#include "glssbm/network.hpp"
#include "glssbm/sampler.hpp"

namespace glssbm {

/// Whole-network WAIC: log of the sample-averaged likelihood minus the
/// sample variance of the log-likelihood. Higher is better.
struct WaicResult {
  double pred = 0.0;
  double penalty = 0.0;
  double waic = 0.0;
};

/// Combines the two terms; waic = pred - penalty.
WaicResult make_waic(double pred, double penalty);

/// From per-sample log-likelihoods. Needs at least two samples; the
/// variance uses the S - 1 denominator.
WaicResult waic(std::span<const double> loglik);
WaicResult waic(const TraceStore& trace);

/// Dyad-wise WAIC summed over observed dyads (the usual pointwise form),
/// for diagnostics alongside the whole-network criterion.
WaicResult waic_pointwise(const TraceStore& trace, const DirectedNetwork& net, const DyadMask& mask);

struct GridRow {
  int dim = 0;
  int blocks = 1;
  WaicResult result;
};

struct GridResult {
  std::vector<GridRow> rows;
  std::size_t best = 0;  // index into rows

  const GridRow& best_row() const { return rows.at(best); }
};

/// Seed of the chain for grid cell (d, K).
std::uint64_t grid_cell_seed(std::uint64_t base, int dim, int blocks);

/// Runs one chain per (d, K) cell and scores it by WAIC. `model` supplies
/// the hyperparameters; K, d and sigma are overridden per cell. Cells run
/// on up to `threads` workers; results do not depend on the thread count.
/// Ties prefer smaller K, then smaller d.
GridResult fit_grid(const DirectedNetwork& net, const DyadMask& mask, std::span<const int> dims,
                    std::span<const int> blocks, const ModelConfig& model, const SamplerConfig& sampler,
                    unsigned threads = 1);

/// Index of the row with the highest WAIC; ties prefer smaller K, then
/// smaller d.
std::size_t best_grid_row(std::span<const GridRow> rows);

/// Columns dimension,k,pred,penalty,waic.
void write_grid_csv(const GridResult& grid, const std::filesystem::path& path);

}  // namespace glssbm

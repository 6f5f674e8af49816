#include "glssbm/selection.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "glssbm/csv.hpp"
#include "glssbm/error.hpp"

namespace glssbm {

WaicResult make_waic(double pred, double penalty) { return {pred, penalty, pred - penalty}; }

WaicResult waic(std::span<const double> loglik) {
  const std::size_t s = loglik.size();
  if (s < 2) throw InputError(fmt::format("WAIC needs at least 2 samples (got {})", s));
  const double pred = log_sum_exp(loglik) - std::log(static_cast<double>(s));
  double mean = 0.0;
  for (double v : loglik) mean += v;
  mean /= static_cast<double>(s);
  double ss = 0.0;
  for (double v : loglik) ss += (v - mean) * (v - mean);
  return make_waic(pred, ss / static_cast<double>(s - 1));
}

WaicResult waic(const TraceStore& trace) { return waic(trace.loglik); }

WaicResult waic_pointwise(const TraceStore& trace, const DirectedNetwork& net, const DyadMask& mask) {
  const std::size_t s = trace.size();
  if (s < 2) throw InputError(fmt::format("WAIC needs at least 2 samples (got {})", s));
  const std::size_t n = net.size();
  double pred = 0.0;
  double penalty = 0.0;
  std::vector<double> terms(s);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !mask.observed(i, j)) continue;
      const bool y = net.edge(i, j);
      for (std::size_t t = 0; t < s; ++t) {
        const double p = edge_probability(trace.samples[t], i, j);
        terms[t] = y ? std::log(p) : std::log1p(-p);
      }
      const auto w = waic(terms);
      pred += w.pred;
      penalty += w.penalty;
    }
  return make_waic(pred, penalty);
}

std::uint64_t grid_cell_seed(std::uint64_t base, int dim, int blocks) {
  return derive_seed(base, (static_cast<std::uint64_t>(dim) << 32) | static_cast<std::uint32_t>(blocks));
}

GridResult fit_grid(const DirectedNetwork& net, const DyadMask& mask, std::span<const int> dims,
                    std::span<const int> blocks, const ModelConfig& model, const SamplerConfig& sampler,
                    unsigned threads) {
  if (dims.empty() || blocks.empty()) throw InputError("model grid needs at least one dimension and one K");
  GridResult grid;
  for (int d : dims)
    for (int k : blocks) grid.rows.push_back({d, k, {}});

  const double sd = model.position_sd.empty() ? std::sqrt(5.0) : model.position_sd.front();
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t c = next++; c < grid.rows.size(); c = next++) {
      auto& row = grid.rows[c];
      try {
        ModelConfig cell = model;
        cell.num_blocks = row.blocks;
        cell.latent_dim = row.dim;
        cell.position_sd.assign(static_cast<std::size_t>(std::max(row.blocks, 0)), sd);
        SamplerConfig sc = sampler;
        sc.seed = grid_cell_seed(sampler.seed, row.dim, row.blocks);
        row.result = waic(run_chain(net, mask, cell, sc));
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(
              Error(fmt::format("grid cell d={} K={} failed: {}", row.dim, row.blocks, e.what())));
        }
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(grid.rows.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  grid.best = best_grid_row(grid.rows);
  return grid;
}

std::size_t best_grid_row(std::span<const GridRow> rows) {
  if (rows.empty()) throw InputError("empty model grid");
  std::size_t best = 0;
  for (std::size_t c = 1; c < rows.size(); ++c) {
    const auto& r = rows[c];
    const auto& b = rows[best];
    if (r.result.waic > b.result.waic ||
        (r.result.waic == b.result.waic && (r.blocks < b.blocks || (r.blocks == b.blocks && r.dim < b.dim))))
      best = c;
  }
  return best;
}

void write_grid_csv(const GridResult& grid, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << "dimension,k,pred,penalty,waic\n";
  for (const auto& r : grid.rows) {
    out << r.dim << ',' << r.blocks << ',' << csv::format_double(r.result.pred) << ','
        << csv::format_double(r.result.penalty) << ',' << csv::format_double(r.result.waic) << '\n';
  }
}

}  // namespace glssbm

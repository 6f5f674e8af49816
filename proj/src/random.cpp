#include "glssbm/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace glssbm {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double draw_uniform(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double draw_normal(Rng& rng, double mean, double sd) {
  return std::normal_distribution<double>(mean, sd)(rng);
}

double draw_gamma(Rng& rng, double shape) {
  return std::gamma_distribution<double>(shape, 1.0)(rng);
}

double draw_beta(Rng& rng, double a, double b) {
  const double x = draw_gamma(rng, a);
  const double y = draw_gamma(rng, b);
  return x / (x + y);
}

std::vector<double> draw_dirichlet(Rng& rng, std::span<const double> alpha) {
  std::vector<double> out(alpha.size());
  double total = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out[k] = draw_gamma(rng, alpha[k]);
    total += out[k];
  }
  for (double& v : out) v /= total;
  return out;
}

double log_sum_exp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

std::size_t draw_categorical_log(Rng& rng, std::span<const double> log_weights) {
  const double norm = log_sum_exp(log_weights);
  const double u = draw_uniform(rng);
  double acc = 0.0;
  std::size_t last_valid = 0;
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    if (log_weights[k] == -std::numeric_limits<double>::infinity()) continue;
    last_valid = k;
    acc += std::exp(log_weights[k] - norm);
    if (u < acc) return k;
  }
  // Rounding left acc marginally below 1.
  return last_valid;
}

}  // namespace glssbm

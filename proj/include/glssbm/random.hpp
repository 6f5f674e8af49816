#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace glssbm {

/// The one generator type used throughout. Every stochastic routine takes
/// it by reference so that runs are reproducible from a single seed.
using Rng = std::mt19937_64;

/// Mixes a base seed with a stream index (splitmix64 finalizer). Used to
/// give grid cells and CV folds independent, reproducible generators.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

double draw_uniform(Rng& rng);
double draw_normal(Rng& rng, double mean = 0.0, double sd = 1.0);
double draw_gamma(Rng& rng, double shape);
double draw_beta(Rng& rng, double a, double b);
std::vector<double> draw_dirichlet(Rng& rng, std::span<const double> alpha);

/// Draws an index with probability proportional to exp(log_weights[k]).
/// Entries equal to -inf are never drawn.
std::size_t draw_categorical_log(Rng& rng, std::span<const double> log_weights);

/// log(sum(exp(x))) without overflow; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> x);

}  // namespace glssbm

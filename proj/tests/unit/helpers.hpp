#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "glssbm/model.hpp"
#include "glssbm/network.hpp"
#include "glssbm/random.hpp"

namespace testutil {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = fs::temp_directory_path() / ("glssbm_" + tag + "_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path operator/(const std::string& name) const { return path / name; }
};

inline void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A state with moderate probabilities everywhere, so logs stay well scaled.
inline glssbm::ParamState random_state(std::size_t n, int k, int d, glssbm::Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, k - 1);
  std::normal_distribution<double> nd(0.0, 1.5);
  glssbm::ParamState s;
  s.labels.resize(n);
  for (auto& g : s.labels) g = lab(rng);
  s.positions.resize(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < s.positions.size(); ++i) s.positions.data()[i] = nd(rng);
  s.pi.resize(k);
  for (int a = 0; a < k; ++a) s.pi[a] = 0.2 + u(rng);
  s.pi /= s.pi.sum();
  s.tau = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (a != b) s.tau(a, b) = 0.02 + 0.96 * u(rng);
  s.beta.resize(k);
  for (int a = 0; a < k; ++a) s.beta[a] = -2.0 + 5.0 * u(rng);
  return s;
}

inline glssbm::DirectedNetwork random_network(std::size_t n, double density, glssbm::Rng& rng) {
  std::bernoulli_distribution e(density);
  std::vector<std::uint8_t> adj(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) adj[i * n + j] = e(rng) ? 1 : 0;
  return glssbm::DirectedNetwork::from_adjacency(n, std::move(adj));
}

// Naive per-dyad log-likelihood, written from the model definition only.
inline double naive_log_likelihood(const glssbm::ParamState& s, const glssbm::DirectedNetwork& net,
                                   const glssbm::DyadMask* mask = nullptr) {
  const std::size_t n = net.size();
  double ll = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (mask && !mask->observed(i, j)) continue;
      double p;
      if (s.labels[i] == s.labels[j]) {
        double d2 = 0.0;
        for (Eigen::Index c = 0; c < s.positions.cols(); ++c) {
          const double diff = s.positions(static_cast<Eigen::Index>(i), c) - s.positions(static_cast<Eigen::Index>(j), c);
          d2 += diff * diff;
        }
        p = 1.0 / (1.0 + std::exp(-(s.beta[s.labels[i]] - std::sqrt(d2))));
      } else {
        p = s.tau(s.labels[i], s.labels[j]);
      }
      ll += net.edge(i, j) ? std::log(p) : std::log(1.0 - p);
    }
  return ll;
}

inline double mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double variance(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Standard error of the mean of a correlated series by batch means.
inline double batch_se(const std::vector<double>& x, std::size_t batches = 50) {
  const std::size_t len = x.size() / batches;
  std::vector<double> m;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t t = b * len; t < (b + 1) * len; ++t) s += x[t];
    m.push_back(s / static_cast<double>(len));
  }
  return std::sqrt(variance(m) / static_cast<double>(batches));
}

}  // namespace testutil

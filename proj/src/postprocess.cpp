#include "glssbm/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "glssbm/assignment.hpp"
#include "glssbm/csv.hpp"
#include "glssbm/error.hpp"

namespace glssbm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Rigid fit of rows `idx` of x onto the same rows of ref, written into out.
void align_rows(const Eigen::MatrixXd& x, const Eigen::MatrixXd& ref, const std::vector<Eigen::Index>& idx,
                Eigen::MatrixXd& out) {
  if (idx.empty()) return;
  const auto d = x.cols();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(idx.size()), d), b(static_cast<Eigen::Index>(idx.size()), d);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    a.row(static_cast<Eigen::Index>(r)) = x.row(idx[r]);
    b.row(static_cast<Eigen::Index>(r)) = ref.row(idx[r]);
  }
  const Eigen::RowVectorXd ma = a.colwise().mean();
  const Eigen::RowVectorXd mb = b.colwise().mean();
  a.rowwise() -= ma;
  b.rowwise() -= mb;
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(d, d);
  if (idx.size() > 1) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    rot = svd.matrixU() * svd.matrixV().transpose();
  }
  const Eigen::MatrixXd aligned = (a * rot).rowwise() + mb;
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(idx[r]) = aligned.row(static_cast<Eigen::Index>(r));
}

}  // namespace

Eigen::MatrixXd classical_mds(const Eigen::MatrixXd& dissimilarity, int dim) {
  const auto n = dissimilarity.rows();
  if (dissimilarity.cols() != n) throw InputError("dissimilarity matrix must be square");
  if (dim < 0) throw InputError("MDS dimension must be >= 0");
  if (dim > n) throw InputError(fmt::format("MDS needs N >= d (N = {}, d = {})", n, dim));
  if (dim == 0 || n == 0) return Eigen::MatrixXd(n, dim);

  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd gram = -0.5 * centering * dissimilarity.cwiseProduct(dissimilarity) * centering;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed in classical MDS");

  // Eigenvalues come back ascending.
  Eigen::MatrixXd out(n, dim);
  for (int c = 0; c < dim; ++c) {
    const auto col = n - 1 - c;
    const double lambda = std::max(eig.eigenvalues()[col], 0.0);
    out.col(c) = eig.eigenvectors().col(col) * std::sqrt(lambda);
  }
  out.rowwise() -= out.colwise().mean();
  return out;
}

ReferenceConfiguration classical_mds(const DirectedNetwork& net, int dim) {
  const auto n = static_cast<Eigen::Index>(net.size());
  Eigen::MatrixXd diss(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto a = static_cast<std::size_t>(i);
      const auto b = static_cast<std::size_t>(j);
      diss(i, j) = i == j ? 0.0 : 1.0 - 0.5 * (double(net.edge(a, b)) + double(net.edge(b, a)));
    }
  return {classical_mds(diss, dim)};
}

Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& positions, std::span<const int> labels,
                                 const ReferenceConfiguration& ref, AlignMode mode) {
  if (positions.rows() != ref.positions.rows() || positions.cols() != ref.positions.cols()) {
    throw InputError(fmt::format("positions are {}x{}, reference {}x{}", positions.rows(), positions.cols(),
                                 ref.positions.rows(), ref.positions.cols()));
  }
  if (static_cast<Eigen::Index>(labels.size()) != positions.rows()) throw InputError("label count != N");
  Eigen::MatrixXd out = positions;
  if (positions.cols() == 0) return out;
  if (mode == AlignMode::Global) {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(positions.rows()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Eigen::Index>(i);
    align_rows(positions, ref.positions, all, out);
    return out;
  }
  std::map<int, std::vector<Eigen::Index>> blocks;
  for (std::size_t i = 0; i < labels.size(); ++i) blocks[labels[i]].push_back(static_cast<Eigen::Index>(i));
  for (const auto& [label, idx] : blocks) align_rows(positions, ref.positions, idx, out);
  return out;
}

TraceStore align_trace(const TraceStore& trace, const ReferenceConfiguration& ref, AlignMode mode) {
  TraceStore out = trace;
  for (auto& s : out.samples) s.positions = procrustes_align(s.positions, s.labels, ref, mode);
  return out;
}

void apply_label_permutation(ParamState& state, std::span<const int> perm) {
  const int k = state.num_blocks();
  if (static_cast<int>(perm.size()) != k) throw InputError("permutation length != K");
  for (int& g : state.labels) g = perm[static_cast<std::size_t>(g)];
  Eigen::VectorXd pi(k), beta(k);
  Eigen::MatrixXd tau = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a) {
    const int pa = perm[static_cast<std::size_t>(a)];
    pi[pa] = state.pi[a];
    beta[pa] = state.beta[a];
    for (int b = 0; b < k; ++b)
      if (a != b) tau(pa, perm[static_cast<std::size_t>(b)]) = state.tau(a, b);
  }
  state.pi = pi;
  state.beta = beta;
  state.tau = tau;
}

std::vector<int> best_label_permutation(std::span<const int> labels, std::span<const int> reference, int num_blocks) {
  if (labels.size() != reference.size()) throw InputError("label vectors differ in length");
  // Maximizing agreement == minimizing N - agreement; the constant N drops out.
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(num_blocks, num_blocks);
  for (std::size_t i = 0; i < labels.size(); ++i) cost(labels[i], reference[i]) -= 1.0;
  return solve_assignment_lexmin(cost);
}

TraceStore relabel_trace(const TraceStore& trace) {
  if (trace.samples.empty()) throw InputError("cannot relabel an empty trace");
  TraceStore out = trace;
  const int k = trace.samples.front().num_blocks();
  if (k == 1) return out;
  const auto best = static_cast<std::size_t>(
      std::distance(trace.loglik.begin(), std::max_element(trace.loglik.begin(), trace.loglik.end())));
  const std::vector<int> reference = trace.samples[best].labels;
  for (auto& s : out.samples) {
    const auto perm = best_label_permutation(s.labels, reference, k);
    apply_label_permutation(s, perm);
  }
  return out;
}

PosteriorSummary summarize(const TraceStore& trace, const DirectedNetwork& net) {
  if (trace.samples.empty()) throw InputError("cannot summarize an empty trace");
  const auto& first = trace.samples.front();
  const int k = first.num_blocks();
  const auto d = first.positions.cols();
  const std::size_t n = net.size();
  if (first.size() != n) throw InputError("trace and network disagree on N");
  const auto s_count = static_cast<double>(trace.size());

  PosteriorSummary out;
  out.tau_mean = Eigen::MatrixXd::Zero(k, k);
  out.allocation = Eigen::VectorXd::Zero(k);
  out.beta_mean = Eigen::VectorXd::Zero(k);
  out.edge_prob = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::vector<int>> label_counts(n, std::vector<int>(static_cast<std::size_t>(k), 0));

  for (const auto& s : trace.samples) {
    out.tau_mean += s.tau;
    out.allocation += s.pi;
    out.beta_mean += s.beta;
    for (std::size_t i = 0; i < n; ++i) {
      ++label_counts[i][static_cast<std::size_t>(s.labels[i])];
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) out.edge_prob(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += edge_probability(s, i, j);
    }
  }
  out.tau_mean /= s_count;
  out.allocation /= s_count;
  out.beta_mean /= s_count;
  out.edge_prob /= s_count;
  for (int a = 0; a < k; ++a) out.tau_mean(a, a) = kNaN;
  for (Eigen::Index i = 0; i < out.edge_prob.rows(); ++i) out.edge_prob(i, i) = kNaN;

  out.map_labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = label_counts[i];
    out.map_labels[i] = static_cast<int>(std::distance(c.begin(), std::max_element(c.begin(), c.end())));
  }

  out.mean_positions = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), d);
  std::vector<double> hits(n, 0.0);
  for (const auto& s : trace.samples)
    for (std::size_t i = 0; i < n; ++i)
      if (s.labels[i] == out.map_labels[i]) {
        out.mean_positions.row(static_cast<Eigen::Index>(i)) += s.positions.row(static_cast<Eigen::Index>(i));
        hits[i] += 1.0;
      }
  for (std::size_t i = 0; i < n; ++i) out.mean_positions.row(static_cast<Eigen::Index>(i)) /= hits[i];

  out.within_range = Eigen::MatrixXd::Constant(k, 2, kNaN);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || out.map_labels[i] != out.map_labels[j]) continue;
      const int a = out.map_labels[i];
      const double p = out.edge_prob(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      auto lo = out.within_range(a, 0);
      auto hi = out.within_range(a, 1);
      out.within_range(a, 0) = std::isnan(lo) ? p : std::min(lo, p);
      out.within_range(a, 1) = std::isnan(hi) ? p : std::max(hi, p);
    }
  return out;
}

void write_summary(const PosteriorSummary& summary, const DirectedNetwork& net, std::span<const NodeMeta> meta,
                   const std::filesystem::path& dir) {
  using csv::escape;
  using csv::format_double;
  std::filesystem::create_directories(dir);
  const auto k = summary.allocation.size();
  const std::size_t n = net.size();
  const auto& ids = net.node_ids();

  {
    auto out = csv::open_output(dir / "block_probabilities.csv");
    out << "from,to,tau_mean,within_min,within_max\n";
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) {
        out << a + 1 << ',' << b + 1 << ',';
        if (a == b) {
          out << ',' << format_double(summary.within_range(a, 0)) << ',' << format_double(summary.within_range(a, 1));
        } else {
          out << format_double(summary.tau_mean(a, b)) << ",,";
        }
        out << '\n';
      }
  }
  {
    auto out = csv::open_output(dir / "allocation.csv");
    out << "block,probability,beta_mean\n";
    for (Eigen::Index a = 0; a < k; ++a)
      out << a + 1 << ',' << format_double(summary.allocation[a]) << ',' << format_double(summary.beta_mean[a]) << '\n';
  }
  auto party_of = [&](std::size_t i) { return meta.empty() ? std::string("Unknown") : meta[i].party; };
  {
    auto out = csv::open_output(dir / "memberships.csv");
    out << "id,name,party,block\n";
    for (std::size_t i = 0; i < n; ++i) {
      const std::string name = meta.empty() ? ids[i] : meta[i].display_name;
      out << escape(ids[i]) << ',' << escape(name) << ',' << escape(party_of(i)) << ',' << summary.map_labels[i] + 1
          << '\n';
    }
  }
  {
    std::map<std::string, std::vector<int>> table;
    for (std::size_t i = 0; i < n; ++i) {
      auto& row = table.try_emplace(party_of(i), std::vector<int>(static_cast<std::size_t>(k), 0)).first->second;
      ++row[static_cast<std::size_t>(summary.map_labels[i])];
    }
    auto out = csv::open_output(dir / "party_blocks.csv");
    out << "party";
    for (Eigen::Index a = 0; a < k; ++a) out << ",block_" << a + 1;
    out << '\n';
    for (const auto& [party, row] : table) {
      out << escape(party);
      for (int c : row) out << ',' << c;
      out << '\n';
    }
  }
  {
    auto out = csv::open_output(dir / "positions.csv");
    out << "id,block";
    for (Eigen::Index c = 0; c < summary.mean_positions.cols(); ++c) out << ",x" << c + 1;
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      out << escape(ids[i]) << ',' << summary.map_labels[i] + 1;
      for (Eigen::Index c = 0; c < summary.mean_positions.cols(); ++c)
        out << ',' << format_double(summary.mean_positions(static_cast<Eigen::Index>(i), c));
      out << '\n';
    }
  }
  {
    auto out = csv::open_output(dir / "edge_prob.csv");
    out << "from,to,probability\n";
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j)
          out << escape(ids[i]) << ',' << escape(ids[j]) << ','
              << format_double(summary.edge_prob(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
  }
}

}  // namespace glssbm

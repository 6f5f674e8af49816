#include "glssbm/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "glssbm/csv.hpp"
#include "glssbm/error.hpp"

namespace glssbm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Type-7 (linear interpolation) sample quantile of sorted data.
double quantile_sorted(const std::vector<double>& x, double q) {
  const double h = (static_cast<double>(x.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double sample_sd(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

template <class Fn>
void run_parallel(std::size_t jobs, unsigned threads, Fn&& job) {
  std::atomic<std::size_t> next{0};
  std::mutex m;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t c = next++; c < jobs; c = next++) {
      try {
        job(c);
      } catch (...) {
        std::lock_guard lock(m);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

RocCurve roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty()) throw InputError("roc needs equal-length, non-empty inputs");
  double pos = 0.0;
  double neg = 0.0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw InputError("roc labels must be 0 or 1");
    (l == 1 ? pos : neg) += 1.0;
  }
  if (pos == 0.0 || neg == 0.0) throw InputError("roc needs at least one positive and one negative label");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t r = 0; r < order.size();) {
    const double s = scores[order[r]];
    while (r < order.size() && scores[order[r]] == s) {
      (labels[order[r]] == 1 ? tp : fp) += 1.0;
      ++r;
    }
    curve.points.emplace_back(fp / neg, tp / pos);
  }
  for (std::size_t p = 1; p < curve.points.size(); ++p) {
    const auto [x0, y0] = curve.points[p - 1];
    const auto [x1, y1] = curve.points[p];
    curve.auc += (x1 - x0) * (y0 + y1) * 0.5;
  }
  return curve;
}

std::vector<std::vector<Dyad>> partition_dyads(std::size_t n, int folds, Rng& rng) {
  if (folds < 2) throw InputError("cross-validation needs at least 2 folds");
  std::vector<Dyad> dyads;
  dyads.reserve(n * (n > 0 ? n - 1 : 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) dyads.emplace_back(i, j);
  if (dyads.size() < static_cast<std::size_t>(folds)) {
    throw InputError(fmt::format("{} dyads cannot fill {} folds", dyads.size(), folds));
  }
  std::shuffle(dyads.begin(), dyads.end(), rng);
  std::vector<std::vector<Dyad>> out(static_cast<std::size_t>(folds));
  for (std::size_t p = 0; p < dyads.size(); ++p) out[p % out.size()].push_back(dyads[p]);
  return out;
}

CvResult kfold_dyad_cv(const DirectedNetwork& net, const ModelConfig& model, const SamplerConfig& sampler, int folds,
                       std::uint64_t seed, unsigned threads) {
  Rng rng(seed);
  const auto parts = partition_dyads(net.size(), folds, rng);
  std::vector<std::vector<double>> fold_scores(parts.size());

  run_parallel(parts.size(), threads, [&](std::size_t f) {
    try {
      DyadMask mask = DyadMask::all_observed(net.size());
      for (const auto& [i, j] : parts[f]) mask.set(i, j, false);
      SamplerConfig sc = sampler;
      sc.seed = derive_seed(seed, f);
      const auto trace = run_chain(net, mask, model, sc);
      if (trace.samples.empty()) throw InputError("chain stored no samples");
      auto& sc_out = fold_scores[f];
      sc_out.assign(parts[f].size(), 0.0);
      for (const auto& s : trace.samples)
        for (std::size_t p = 0; p < parts[f].size(); ++p) sc_out[p] += edge_probability(s, parts[f][p].first, parts[f][p].second);
      for (double& v : sc_out) v /= static_cast<double>(trace.size());
    } catch (const std::exception& e) {
      throw Error(fmt::format("cross-validation fold {} failed: {}", f + 1, e.what()));
    }
  });

  CvResult result;
  for (std::size_t f = 0; f < parts.size(); ++f) {
    std::vector<int> labels;
    for (const auto& [i, j] : parts[f]) labels.push_back(net.edge(i, j) ? 1 : 0);
    const bool both = std::count(labels.begin(), labels.end(), 1) > 0 && std::count(labels.begin(), labels.end(), 0) > 0;
    result.fold_auc.push_back(both ? roc(fold_scores[f], labels).auc : kNaN);
    result.scores.insert(result.scores.end(), fold_scores[f].begin(), fold_scores[f].end());
    result.labels.insert(result.labels.end(), labels.begin(), labels.end());
  }
  result.roc = roc(result.scores, result.labels);
  return result;
}

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << "fpr,tpr\n";
  for (const auto& [x, y] : curve.points) out << csv::format_double(x) << ',' << csv::format_double(y) << '\n';
}

const char* to_string(Agreement a) {
  switch (a) {
    case Agreement::Agree: return "AGREE";
    case Agreement::Disagree: return "DISAGREE";
    case Agreement::Absent: return "ABSENT";
  }
  return "?";
}

std::vector<Agreement> vote_agreement_groups(const VoteTable& votes, const std::string& vote_id) {
  const auto v = votes.vote_index(vote_id);
  if (!v) throw InputError("unknown vote id '" + vote_id + "'");
  const std::size_t n = votes.node_count;
  std::vector<Agreement> out(n * n, Agreement::Absent);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Vote a = votes.at(i, *v);
      const Vote b = votes.at(j, *v);
      if (a == Vote::Absent || b == Vote::Absent) continue;
      out[i * n + j] = a == b ? Agreement::Agree : Agreement::Disagree;
    }
  return out;
}

double KdeCurve::evaluate(double x) const {
  const double norm = 1.0 / (static_cast<double>(data.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  double s = 0.0;
  for (double v : data) {
    const double u = (x - v) / bandwidth;
    s += std::exp(-0.5 * u * u);
  }
  return s * norm;
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) throw InputError("bandwidth needs at least 2 values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = sample_sd(values);
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0)) spread = sd;
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

KdeCurve kde(std::span<const double> values, std::size_t grid_size) {
  if (values.size() < 2) throw InputError("kde needs at least 2 values; report a point mass instead");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (!(*mx > *mn)) throw InputError("kde input has zero spread; report a point mass instead");
  if (grid_size < 2) throw InputError("kde grid needs at least 2 points");

  KdeCurve curve;
  curve.data.assign(values.begin(), values.end());
  curve.bandwidth = silverman_bandwidth(values);
  const double lo = std::max(0.0, *mn - 5.0 * curve.bandwidth);
  const double hi = std::min(1.0, *mx + 5.0 * curve.bandwidth);
  curve.grid.resize(grid_size);
  curve.density.resize(grid_size);
  for (std::size_t g = 0; g < grid_size; ++g) {
    curve.grid[g] = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_size - 1);
    curve.density[g] = curve.evaluate(curve.grid[g]);
  }
  return curve;
}

std::vector<VoteDensity> vote_density_report(const PosteriorSummary& summary, const VoteTable& votes,
                                             std::size_t grid_size) {
  const std::size_t n = votes.node_count;
  if (static_cast<std::size_t>(summary.edge_prob.rows()) != n) throw InputError("summary and vote table disagree on N");
  std::vector<VoteDensity> report;
  for (const auto& vote_id : votes.vote_ids) {
    const auto groups = vote_agreement_groups(votes, vote_id);
    std::vector<std::vector<double>> values(3);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j)
          values[static_cast<std::size_t>(groups[i * n + j])].push_back(
              summary.edge_prob(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    VoteDensity vd;
    vd.vote_id = vote_id;
    for (std::size_t g = 0; g < 3; ++g) {
      GroupDensity gd;
      gd.group = static_cast<Agreement>(g);
      gd.count = values[g].size();
      gd.mean = values[g].empty() ? kNaN
                                  : std::accumulate(values[g].begin(), values[g].end(), 0.0) / double(values[g].size());
      if (values[g].size() >= 2) {
        const auto [mn, mx] = std::minmax_element(values[g].begin(), values[g].end());
        if (*mx > *mn) gd.curve = kde(values[g], grid_size);
      }
      vd.groups.push_back(std::move(gd));
    }
    report.push_back(std::move(vd));
  }
  return report;
}

void write_kde_csv(const std::vector<VoteDensity>& report, const std::filesystem::path& path) {
  auto out = csv::open_output(path);
  out << "vote_id,group,x,density\n";
  for (const auto& vd : report)
    for (const auto& g : vd.groups) {
      if (g.curve) {
        for (std::size_t p = 0; p < g.curve->grid.size(); ++p)
          out << csv::escape(vd.vote_id) << ',' << to_string(g.group) << ',' << csv::format_double(g.curve->grid[p])
              << ',' << csv::format_double(g.curve->density[p]) << '\n';
      } else if (g.count > 0) {
        out << csv::escape(vd.vote_id) << ',' << to_string(g.group) << ',' << csv::format_double(g.mean) << ",inf\n";
      }
    }
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw InputError("partitions differ in length");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_joint = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [k, v] : joint) sum_joint += c2(v);
  for (const auto& [k, v] : ra) sum_a += c2(v);
  for (const auto& [k, v] : rb) sum_b += c2(v);
  const double total = c2(static_cast<double>(a.size()));
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_joint - expected) / (max_index - expected);
}

}  // namespace glssbm

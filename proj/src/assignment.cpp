#include "glssbm/assignment.hpp"

#include <limits>

#include "glssbm/error.hpp"

namespace glssbm {

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw InputError("assignment cost matrix must be square");
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return {};
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Potentials formulation with 1-based sentinels (row/column 0).
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<int> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) assignment[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return assignment;
}

namespace {

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& a) {
  double c = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) c += cost(static_cast<Eigen::Index>(r), a[r]);
  return c;
}

}  // namespace

std::vector<int> solve_assignment_lexmin(const Eigen::MatrixXd& cost) {
  const auto n = cost.rows();
  if (n == 0) return {};
  const double best = assignment_cost(cost, solve_assignment(cost));
  // Fix rows in order to the smallest column that keeps the optimum
  // reachable; forbidden cells get a prohibitive cost.
  const double big = 1.0 + 2.0 * static_cast<double>(n) * (cost.cwiseAbs().maxCoeff() + 1.0);
  Eigen::MatrixXd work = cost;
  std::vector<int> out(static_cast<std::size_t>(n), -1);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (work(r, c) >= big) continue;
      Eigen::MatrixXd trial = work;
      for (Eigen::Index cc = 0; cc < n; ++cc)
        if (cc != c) trial(r, cc) = big;
      for (Eigen::Index rr = r + 1; rr < n; ++rr) trial(rr, c) = big;
      const double total = assignment_cost(trial, solve_assignment(trial));
      if (total <= best + 1e-9) {
        out[static_cast<std::size_t>(r)] = static_cast<int>(c);
        work = trial;
        break;
      }
    }
  }
  return out;
}

}  // namespace glssbm

#pragma once

#include <vector>

#include <Eigen/Core>

namespace glssbm {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian
/// algorithm, O(n^3)). Returns assignment[row] = column.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// Among all minimum-cost assignments, the lexicographically smallest
/// row -> column vector. Costs are compared with a 1e-9 tolerance.
std::vector<int> solve_assignment_lexmin(const Eigen::MatrixXd& cost);

}  // namespace glssbm

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace jdtc {

/// Rectangular linear assignment. Rows must not outnumber columns; +inf
/// entries are forbidden pairings.
struct AssignmentSolution {
    std::vector<int> row_to_col;
    double cost = 0.0;
};

/// Minimum-cost assignment of every row to a distinct column (shortest
/// augmenting path Hungarian method). Returns false when no finite-cost
/// assignment exists.
bool solve_assignment(const Eigen::MatrixXd& cost, AssignmentSolution& out);

/// The k cheapest assignments in nondecreasing cost order (Murty's
/// partitioning). k <= 0 enumerates every feasible assignment.
[[nodiscard]] std::vector<AssignmentSolution> murty_k_best(const Eigen::MatrixXd& cost, int k);

} // namespace jdtc

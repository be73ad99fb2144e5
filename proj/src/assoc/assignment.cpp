#include "jdtc/assoc/assignment.hpp"

#include "jdtc/core/errors.hpp"
#include "jdtc/core/numeric.hpp"

#include <cmath>
#include <queue>

namespace jdtc {

bool solve_assignment(const Eigen::MatrixXd& cost, AssignmentSolution& out) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n > m) throw DomainError("solve_assignment: more rows than columns");
    out.row_to_col.assign(static_cast<std::size_t>(n), -1);
    out.cost = 0.0;
    if (n == 0) return true;

    // 1-based potentials; p[j] is the row matched to column j, 0 = free.
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0);
    std::vector<int> way(m + 1, 0);
    std::vector<double> minv(m + 1);
    std::vector<char> used(m + 1);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = -1;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double c = cost(i0 - 1, j - 1);
                if (std::isfinite(c)) {
                    const double cur = c - u[i0] - v[j];
                    if (cur < minv[j]) {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if (j1 < 0) return false;
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    for (int j = 1; j <= m; ++j) {
        if (p[j] != 0) out.row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
    }
    for (int i = 0; i < n; ++i) out.cost += cost(i, out.row_to_col[static_cast<std::size_t>(i)]);
    return true;
}

namespace {

struct MurtyNode {
    Eigen::MatrixXd cost;
    AssignmentSolution solution;
    int fixed_rows = 0;  // rows [0, fixed_rows) are forced to their solution column
};

struct NodeOrder {
    bool operator()(const MurtyNode& a, const MurtyNode& b) const {
        return a.solution.cost > b.solution.cost;
    }
};

} // namespace

std::vector<AssignmentSolution> murty_k_best(const Eigen::MatrixXd& cost, int k) {
    std::vector<AssignmentSolution> out;
    MurtyNode root{cost, {}, 0};
    if (!solve_assignment(root.cost, root.solution)) return out;

    std::priority_queue<MurtyNode, std::vector<MurtyNode>, NodeOrder> queue;
    queue.push(std::move(root));
    const int n = static_cast<int>(cost.rows());
    while (!queue.empty() && (k <= 0 || static_cast<int>(out.size()) < k)) {
        MurtyNode node = queue.top();
        queue.pop();
        out.push_back(node.solution);

        Eigen::MatrixXd partition = node.cost;
        for (int t = node.fixed_rows; t < n; ++t) {
            const int col = node.solution.row_to_col[static_cast<std::size_t>(t)];
            MurtyNode child{partition, {}, t};
            child.cost(t, col) = kInf;
            if (solve_assignment(child.cost, child.solution)) queue.push(std::move(child));
            // Force row t to col for the remaining partitions.
            const double keep = partition(t, col);
            partition.row(t).setConstant(kInf);
            partition.col(col).setConstant(kInf);
            partition(t, col) = keep;
        }
    }
    return out;
}

} // namespace jdtc

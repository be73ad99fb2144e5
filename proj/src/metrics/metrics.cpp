#include "jdtc/metrics/metrics.hpp"

#include "jdtc/assoc/assignment.hpp"
#include "jdtc/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace jdtc {

OspaResult ospa_with_assignment(const std::vector<Eigen::Vector2d>& truth,
                                const std::vector<Eigen::Vector2d>& estimates,
                                const OspaParams& params) {
    if (!(params.cutoff > 0.0) || !(params.order >= 1.0)) {
        throw DomainError("OSPA requires cutoff > 0 and order >= 1");
    }
    OspaResult out;
    out.truth_to_estimate.assign(truth.size(), kMiss);
    const std::size_t n = std::max(truth.size(), estimates.size());
    if (n == 0) return out;
    const double c = params.cutoff;
    const double p = params.order;

    // Rows index the smaller set so the assignment is rectangular-feasible.
    const bool truth_rows = truth.size() <= estimates.size();
    const auto& rows = truth_rows ? truth : estimates;
    const auto& cols = truth_rows ? estimates : truth;
    double total = std::pow(c, p) * static_cast<double>(cols.size() - rows.size());
    if (!rows.empty()) {
        Eigen::MatrixXd cost(static_cast<Eigen::Index>(rows.size()),
                             static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < cols.size(); ++j) {
                cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::pow(std::min((rows[i] - cols[j]).norm(), c), p);
            }
        }
        AssignmentSolution sol;
        solve_assignment(cost, sol);
        // Summing the matched terms in sorted order makes the result
        // independent of which set indexes the rows.
        std::vector<double> terms;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            terms.push_back(cost(static_cast<Eigen::Index>(i), sol.row_to_col[i]));
        }
        std::sort(terms.begin(), terms.end());
        for (double t : terms) total += t;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const int j = sol.row_to_col[i];
            if ((rows[i] - cols[static_cast<std::size_t>(j)]).norm() >= c) continue;
            if (truth_rows) {
                out.truth_to_estimate[i] = j;
            } else {
                out.truth_to_estimate[static_cast<std::size_t>(j)] = static_cast<int>(i);
            }
        }
    }
    out.distance = std::pow(total / static_cast<double>(n), 1.0 / p);
    return out;
}

double ospa(const std::vector<Eigen::Vector2d>& truth,
            const std::vector<Eigen::Vector2d>& estimates, const OspaParams& params) {
    return ospa_with_assignment(truth, estimates, params).distance;
}

double ClassificationCounts::rate() const {
    const int accountable = matched + unmatched_truth;
    if (accountable == 0) return 0.0;
    return static_cast<double>(matched_wrong + unmatched_truth) / accountable;
}

ClassificationCounts misclassification(const std::vector<int>& truth_classes,
                                       const std::vector<int>& estimate_classes,
                                       const std::vector<int>& truth_to_estimate) {
    if (truth_classes.size() != truth_to_estimate.size()) {
        throw DomainError("misclassification: one assignment entry per truth is required");
    }
    ClassificationCounts counts;
    for (std::size_t i = 0; i < truth_classes.size(); ++i) {
        const int e = truth_to_estimate[i];
        if (e == kMiss) {
            ++counts.unmatched_truth;
            continue;
        }
        ++counts.matched;
        if (estimate_classes.at(static_cast<std::size_t>(e)) != truth_classes[i]) {
            ++counts.matched_wrong;
        }
    }
    return counts;
}

JpmWeights JpmWeights::from(const RiskCoefficients& coeffs) {
    return {coeffs.alpha.cwiseProduct(coeffs.c).maxCoeff(), coeffs.beta.maxCoeff(), coeffs.gamma};
}

double jpm_value(const JpmWeights& w, double misclassified, double ospa_distance,
                 double cardinality_error) {
    return w.alpha * misclassified + w.beta * ospa_distance * ospa_distance +
           w.gamma * std::abs(cardinality_error);
}

ScanScore score_scan(int k, const std::vector<TruthObject>& truth,
                     const std::vector<TrackEstimate>& estimates, const OspaParams& ospa_params,
                     const JpmWeights& weights) {
    std::vector<Eigen::Vector2d> x;
    std::vector<int> truth_classes;
    for (const auto& t : truth) {
        x.push_back(position_of(t.state));
        truth_classes.push_back(t.true_class);
    }
    std::vector<Eigen::Vector2d> y;
    std::vector<int> est_classes;
    for (const auto& e : estimates) {
        y.push_back(position_of(e.state));
        est_classes.push_back(e.declared_class);
    }
    const auto o = ospa_with_assignment(x, y, ospa_params);
    ScanScore s;
    s.k = k;
    s.true_n = static_cast<int>(truth.size());
    s.est_n = static_cast<int>(estimates.size());
    s.ospa = o.distance;
    s.misclassification = misclassification(truth_classes, est_classes, o.truth_to_estimate).rate();
    s.jpm = jpm_value(weights, s.misclassification, s.ospa, s.est_n - s.true_n);
    return s;
}

std::vector<double> jpm(const std::vector<std::vector<ScanScore>>& trials) {
    if (trials.empty()) return {};
    std::vector<double> out(trials.front().size(), 0.0);
    for (const auto& trial : trials) {
        if (trial.size() != out.size()) throw DomainError("jpm: trials cover different scans");
        for (std::size_t k = 0; k < trial.size(); ++k) out[k] += trial[k].jpm;
    }
    for (double& v : out) v /= static_cast<double>(trials.size());
    return out;
}

} // namespace jdtc

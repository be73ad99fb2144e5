#pragma once

#include "jdtc/filter/update.hpp"
#include "jdtc/risk/coefficients.hpp"
#include "jdtc/sensing/sensors.hpp"

#include <Eigen/Dense>

#include <vector>

namespace jdtc {

struct OspaParams {
    double cutoff = 100.0;
    double order = 2.0;
};

struct OspaResult {
    double distance = 0.0;
    /// Estimate index matched to each truth (kMiss when unmatched or farther
    /// than the cutoff).
    std::vector<int> truth_to_estimate;
};

/// OSPA distance between position sets. Both empty gives 0. Throws
/// DomainError unless cutoff > 0 and order >= 1.
[[nodiscard]] OspaResult ospa_with_assignment(const std::vector<Eigen::Vector2d>& truth,
                                              const std::vector<Eigen::Vector2d>& estimates,
                                              const OspaParams& params);

[[nodiscard]] double ospa(const std::vector<Eigen::Vector2d>& truth,
                          const std::vector<Eigen::Vector2d>& estimates,
                          const OspaParams& params);

struct ClassificationCounts {
    int matched = 0;
    int matched_wrong = 0;
    int unmatched_truth = 0;

    /// (wrong matched + unmatched truths) / (matched + unmatched truths); 0
    /// when there is nothing to account for.
    [[nodiscard]] double rate() const;
};

[[nodiscard]] ClassificationCounts misclassification(const std::vector<int>& truth_classes,
                                                     const std::vector<int>& estimate_classes,
                                                     const std::vector<int>& truth_to_estimate);

/// Weights of the joint performance metric
/// JPM = alpha * misclassified fraction + beta * OSPA^2 + gamma * |N_est - N_true|.
struct JpmWeights {
    double alpha = 20.0;
    double beta = 1.0;
    double gamma = 100.0;

    /// Largest off-diagonal alpha c entry, largest beta, and gamma.
    [[nodiscard]] static JpmWeights from(const RiskCoefficients& coeffs);
};

[[nodiscard]] double jpm_value(const JpmWeights& w, double misclassified, double ospa_distance,
                               double cardinality_error);

struct ScanScore {
    int k = 0;
    int true_n = 0;
    int est_n = 0;
    double ospa = 0.0;
    double misclassification = 0.0;
    double jpm = 0.0;
};

[[nodiscard]] ScanScore score_scan(int k, const std::vector<TruthObject>& truth,
                                   const std::vector<TrackEstimate>& estimates,
                                   const OspaParams& ospa_params, const JpmWeights& weights);

/// Per-scan mean JPM over trials (all trials must cover the same scans).
[[nodiscard]] std::vector<double> jpm(const std::vector<std::vector<ScanScore>>& trials);

} // namespace jdtc

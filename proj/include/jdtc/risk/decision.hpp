#pragma once

#include "jdtc/filter/update.hpp"
#include "jdtc/risk/coefficients.hpp"

#include <vector>

namespace jdtc {

struct CostBreakdown {
    double classification = 0.0;
    double estimation = 0.0;
    double cardinality = 0.0;

    [[nodiscard]] double total() const { return classification + estimation + cardinality; }
};

struct DecisionSet {
    std::vector<int> decisions;
    double cost = 0.0;
    CostBreakdown breakdown;
};

/// eps = tr(P) + |x - x_decided|^2 for one class posterior.
[[nodiscard]] double state_estimation_cost(const Moments& class_posterior,
                                           const StateVec& decided_estimate);

/// Expected cardinality change sum_omega N(omega) w(omega) - sum_omega' N(omega') w'(omega')
/// between the unconditioned and decision-conditioned hypothesis tables. Signed.
[[nodiscard]] double cardinality_cost(const std::vector<HypothesisWeight>& unconditioned,
                                      const std::vector<HypothesisWeight>& decided);

/// Classification plus estimation cost of deciding class `decision` for one track:
/// r sum_j (alpha_ij c_ij + beta_ij eps^{ij}) P(H^j).
[[nodiscard]] CostBreakdown track_decision_cost(int decision, const TrackSummary& track,
                                                const RiskCoefficients& coeffs);

/// Total Bayes risk of a decision-conditioned update; unconditioned_cardinality
/// is the mean cardinality of the unconditioned update.
[[nodiscard]] DecisionSet evaluate_decision(const std::vector<int>& decisions,
                                            const UpdateOutput& output,
                                            double unconditioned_cardinality,
                                            const RiskCoefficients& coeffs);

/// Minimum-cost candidate; ties go to the lexicographically smallest decision
/// vector. Throws DomainError when there is no candidate or sizes disagree.
[[nodiscard]] DecisionSet select_decision(const std::vector<std::vector<int>>& candidates,
                                          const std::vector<UpdateOutput>& outputs,
                                          double unconditioned_cardinality,
                                          const RiskCoefficients& coeffs);

/// Suggested cardinality weight (alpha + beta max_eps) / (1 - p_bar) so that
/// dropping a track costs more than misclassifying it. Throws DomainError
/// unless p_bar < 1.
[[nodiscard]] double advise_gamma(const RiskCoefficients& coeffs, double max_estimation_cost,
                                  double p_bar);

} // namespace jdtc

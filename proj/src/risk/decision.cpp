#include "jdtc/risk/decision.hpp"

#include "jdtc/core/errors.hpp"

#include <string>

namespace jdtc {

double state_estimation_cost(const Moments& class_posterior, const StateVec& decided_estimate) {
    return class_posterior.cov.trace() + (class_posterior.mean - decided_estimate).squaredNorm();
}

double cardinality_cost(const std::vector<HypothesisWeight>& unconditioned,
                        const std::vector<HypothesisWeight>& decided) {
    double sum = 0.0;
    for (const auto& h : unconditioned) sum += static_cast<double>(h.label_set.size()) * h.weight;
    for (const auto& h : decided) sum -= static_cast<double>(h.label_set.size()) * h.weight;
    return sum;
}

CostBreakdown track_decision_cost(int decision, const TrackSummary& track,
                                  const RiskCoefficients& coeffs) {
    const int J = coeffs.num_classes();
    if (decision < 0 || decision >= J) {
        throw DomainError("decision " + std::to_string(decision) + " outside the class range");
    }
    StateVec decided = StateVec::Zero();
    for (int j = 0; j < J; ++j) {
        decided += track.class_probs(j) * track.class_moments[static_cast<std::size_t>(j)].mean;
    }
    CostBreakdown b;
    for (int j = 0; j < J; ++j) {
        const double pj = track.class_probs(j);
        b.classification += coeffs.alpha(decision, j) * coeffs.c(decision, j) * pj;
        b.estimation += coeffs.beta(decision, j) *
                        state_estimation_cost(track.class_moments[static_cast<std::size_t>(j)],
                                              decided) *
                        pj;
    }
    b.classification *= track.existence;
    b.estimation *= track.existence;
    return b;
}

DecisionSet evaluate_decision(const std::vector<int>& decisions, const UpdateOutput& output,
                              double unconditioned_cardinality, const RiskCoefficients& coeffs) {
    if (decisions.size() != output.tracks.size()) {
        throw DomainError("decision vector has " + std::to_string(decisions.size()) +
                          " entries for " + std::to_string(output.tracks.size()) + " tracks");
    }
    DecisionSet set;
    set.decisions = decisions;
    for (std::size_t t = 0; t < decisions.size(); ++t) {
        const auto b = track_decision_cost(decisions[t], output.tracks[t], coeffs);
        set.breakdown.classification += b.classification;
        set.breakdown.estimation += b.estimation;
    }
    set.breakdown.cardinality =
        coeffs.gamma * (unconditioned_cardinality - output.mean_cardinality());
    set.cost = set.breakdown.total();
    return set;
}

DecisionSet select_decision(const std::vector<std::vector<int>>& candidates,
                            const std::vector<UpdateOutput>& outputs,
                            double unconditioned_cardinality, const RiskCoefficients& coeffs) {
    if (candidates.empty()) throw DomainError("select_decision: no candidate decisions");
    if (candidates.size() != outputs.size()) {
        throw DomainError("select_decision: one update output per candidate is required");
    }
    DecisionSet best;
    bool have = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto set = evaluate_decision(candidates[i], outputs[i], unconditioned_cardinality, coeffs);
        if (!have || set.cost < best.cost ||
            (set.cost == best.cost && set.decisions < best.decisions)) {
            best = std::move(set);
            have = true;
        }
    }
    return best;
}

double advise_gamma(const RiskCoefficients& coeffs, double max_estimation_cost, double p_bar) {
    if (!(p_bar < 1.0)) throw DomainError("advise_gamma requires p_bar < 1");
    const double alpha = (coeffs.alpha.cwiseProduct(coeffs.c)).maxCoeff();
    const double beta = coeffs.beta.maxCoeff();
    return (alpha + beta * max_estimation_cost) / (1.0 - p_bar);
}

} // namespace jdtc

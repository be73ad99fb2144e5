#pragma once

#include "jdtc/core/gaussian.hpp"
#include "jdtc/core/lmb.hpp"
#include "jdtc/core/numeric.hpp"
#include "jdtc/models/motion.hpp"
#include "jdtc/risk/coefficients.hpp"
#include "jdtc/sensing/sensors.hpp"

#include <Eigen/Dense>

#include <vector>

namespace jdtc {

/// One Bernoulli birth slot with its class-conditioned birth density.
struct BirthComponent {
    double existence = 0.0;
    ClassConditionedDensity density;
};

struct BirthModel {
    std::vector<BirthComponent> components;
};

/// Single-Gaussian birth density shared by every class; multi-model classes
/// start from their initial model probabilities.
[[nodiscard]] BirthComponent make_birth_component(double existence, const StateVec& mean,
                                                  const StateCov& cov,
                                                  const Eigen::VectorXd& class_prior,
                                                  const ClassModels& models);

struct FilterParams {
    double p_survival = 0.98;
    /// Chi-square gate probability; gating is disabled when not in (0, 1).
    double gate_probability = 0.99;
    /// Number of ranked association maps kept per update; <= 0 keeps all.
    int k_best = 100;
    double existence_prune = 1e-3;
    double extraction_threshold = 0.5;
    MixtureLimits mixture_limits;
    /// Replace the missed-detection existence of surviving tracks without any
    /// measurement in their decision region by r p_s q / (p_s q + 1 - p_s)
    /// with q = 1 - p_d (radar and, when enabled, ESM).
    bool miss_existence_override = false;
    /// Search every joint decision when the track count is at most
    /// exhaustive_decision_limit; otherwise decide track by track.
    bool exhaustive_decisions = false;
    int exhaustive_decision_limit = 3;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

/// Prediction step: survival thinning, class-conditioned motion prediction
/// and birth tracks labelled (k, slot). Throws std::logic_error when a birth
/// label already exists.
[[nodiscard]] LmbDensity predict(const LmbDensity& prior, const BirthModel& births, int k,
                                 const ClassModels& models, const FilterParams& params);

/// Decision value meaning "no decision conditioning" for one track.
inline constexpr int kUnconditioned = -1;

/// Everything the update needs about one candidate measurement pair s for one track.
struct PairTerms {
    Assignment pair;
    /// log eta(s, j): per-class marginal likelihood ratio of the pair.
    Eigen::VectorXd log_eta_class;
    /// log eta(s) = log sum_j P_j eta(s, j).
    double log_eta = kNegInf;
    /// Posterior class probabilities P^s(j); equal to the prior for a zero-likelihood pair.
    Eigen::VectorXd class_post;
    /// Updated class densities (normalized mixtures, posterior model probabilities).
    std::vector<ClassDensity> classes;
    std::vector<Moments> class_moments;
    /// Decision region containing the pair; kUnconditioned for the all-miss pair,
    /// which lies in every region.
    int region = kUnconditioned;
};

struct TrackTerms {
    double existence = 0.0;
    bool newborn = false;
    std::vector<PairTerms> pairs;  // pairs[0] is the all-miss pair
    /// Pair index for (radar + 1) * (num_esm + 1) + (esm + 1); -1 when gated out.
    std::vector<int> pair_index;
    Eigen::MatrixXd predicted_eps;

    [[nodiscard]] bool has_detections() const { return pairs.size() > 1; }
};

struct ScanTerms {
    int k = 0;
    int num_radar = 0;
    int num_esm = 0;
    /// Probability that an existing target produces no measurement at all.
    double miss_probability = 1.0;
    std::vector<TrackTerms> tracks;

    [[nodiscard]] int pair_slot(const Assignment& a) const {
        return (a.radar + 1) * (num_esm + 1) + (a.esm + 1);
    }
};

/// Gating, per-pair Kalman updates, likelihood ratios and decision regions
/// for every predicted track.
[[nodiscard]] ScanTerms compute_scan_terms(const LmbDensity& predicted, const ScanData& scan,
                                           const SensorSuite& sensors,
                                           const RiskCoefficients& coeffs,
                                           const FilterParams& params);

/// True when track t may take pair s under the given decision.
[[nodiscard]] bool pair_allowed(const PairTerms& pair, int decision);

/// Unnormalized log weight of a map under decisions (nullptr = unconditioned);
/// -inf when the map is infeasible.
[[nodiscard]] double association_log_weight(const ScanTerms& terms, const AssociationMap& map,
                                            const std::vector<int>* decisions);

/// Up to k_best injective association maps ordered by decreasing weight.
/// The all-miss map is always included.
[[nodiscard]] std::vector<AssociationMap> enumerate_associations(
    const ScanTerms& terms, const std::vector<int>* decisions, int k_best);

/// Convenience form that computes unconditioned scan terms first.
[[nodiscard]] std::vector<AssociationMap> enumerate_associations(
    const LmbDensity& predicted, const ScanData& scan, const SensorSuite& sensors,
    const RiskCoefficients& coeffs, const FilterParams& params);

struct TrackSummary {
    double existence = 0.0;
    /// Posterior existence given a missed detection.
    double miss_inclusion = 0.0;
    /// rho_s: posterior probability of each pair of TrackTerms::pairs given existence.
    std::vector<double> pair_weights;
    Eigen::VectorXd class_probs;
    std::vector<Moments> class_moments;
    /// Class-averaged estimate sum_j x^j P(H^j).
    StateVec estimate = StateVec::Zero();
};

struct AssociationHypothesis {
    AssociationMap assoc;
    double weight = 0.0;
};

struct UpdateOutput {
    /// Decision per track; empty for the unconditioned update.
    std::vector<int> decisions;
    std::vector<AssociationHypothesis> hypotheses;
    std::vector<TrackSummary> tracks;
    /// Filled only when the posterior was requested.
    LmbDensity posterior;
    /// Set when every association map was infeasible and the miss-only
    /// hypothesis was used instead.
    bool fallback = false;

    [[nodiscard]] double mean_cardinality() const;
    /// Labelled multi-Bernoulli hypothesis table: every association map
    /// expanded over the subsets of missed tracks that exist.
    [[nodiscard]] std::vector<HypothesisWeight> expand_hypotheses(
        const std::vector<Label>& labels) const;
};

/// Decision-conditioned update from precomputed scan terms. decisions may be
/// nullptr (unconditioned) or hold one entry per track, each a class index or
/// kUnconditioned.
[[nodiscard]] UpdateOutput update_with_terms(const LmbDensity& predicted, const ScanTerms& terms,
                                             const std::vector<int>* decisions,
                                             const FilterParams& params, bool build_posterior);

/// Decision-conditioned update with every class index in [0, J).
/// Throws DomainError on a decision vector of the wrong size or range.
[[nodiscard]] UpdateOutput update_conditioned(const LmbDensity& predicted, const ScanData& scan,
                                              const std::vector<int>& decisions,
                                              const SensorSuite& sensors,
                                              const RiskCoefficients& coeffs,
                                              const FilterParams& params);

/// Unconditioned update (all pairs admissible).
[[nodiscard]] UpdateOutput update_unconditioned(const LmbDensity& predicted, const ScanData& scan,
                                                const SensorSuite& sensors,
                                                const RiskCoefficients& coeffs,
                                                const FilterParams& params);

struct TrackEstimate {
    Label label;
    double existence = 0.0;
    StateVec state = StateVec::Zero();
    int declared_class = 0;
    Eigen::VectorXd class_probs;
};

/// Tracks with existence above the threshold, reported with the state of
/// their summary and the given per-track class decision.
[[nodiscard]] std::vector<TrackEstimate> extract_estimates(const LmbDensity& posterior,
                                                           const UpdateOutput& output,
                                                           const std::vector<int>& decisions,
                                                           double threshold);

} // namespace jdtc

#pragma once

#include "jdtc/core/gaussian.hpp"
#include "jdtc/filter/update.hpp"
#include "jdtc/models/motion.hpp"
#include "jdtc/risk/coefficients.hpp"
#include "jdtc/sensing/sensors.hpp"

#include <Eigen/Dense>

#include <vector>

namespace jdtc {

/// Deduplicated motion models of all classes plus, per class, the indices of
/// its models in the union list.
struct UnionModels {
    std::vector<MotionModel> models;
    Eigen::MatrixXd switch_matrix;
    Eigen::VectorXd initial_model_probs;
    std::vector<std::vector<int>> class_members;

    [[nodiscard]] int size() const { return static_cast<int>(models.size()); }
};

/// The switching matrix comes from a class owning every union model when one
/// exists; otherwise each model stays with probability 0.9 and switches
/// uniformly.
[[nodiscard]] UnionModels build_union_models(const ClassModels& models);

struct GnnParams {
    double gate_probability = 0.99;
    int confirm_hits = 2;
    int confirm_window = 3;
    int max_misses = 3;
    double init_velocity_std = 40.0;
    double init_acceleration_std = 2.0;
    /// Estimation-then-decision: accumulate the class belief over scans
    /// (true) or use only the current scan's likelihood ratio (false).
    bool etd_recursive = true;
    /// Start tentative tracks only from measurements gated against a birth
    /// component (initialized by a Kalman update of that component); when
    /// false every unassigned measurement starts a track with a zero-velocity
    /// prior of init_velocity_std.
    bool birth_gated_initiation = true;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

struct GnnTrack {
    int id = 0;
    /// Union-model indices of the running model set and their states.
    std::vector<int> model_ids;
    std::vector<Moments> states;
    Eigen::VectorXd model_probs;
    Eigen::VectorXd class_belief;
    int decided_class = 0;
    int miss_streak = 0;
    int age = 0;
    /// Detection history, most recent scan in bit 0.
    unsigned hit_history = 0;
    bool confirmed = false;

    /// Moments of the model mixture.
    [[nodiscard]] Moments combined() const;
};

/// One IMM cycle over a fixed model list.
struct ImmPrediction {
    std::vector<Moments> states;
    Eigen::VectorXd model_probs;  // predicted model probabilities
};

[[nodiscard]] ImmPrediction imm_predict(const std::vector<Moments>& states,
                                        const Eigen::VectorXd& model_probs,
                                        const std::vector<MotionModel>& models,
                                        const Eigen::MatrixXd& switch_matrix);

struct ImmUpdate {
    std::vector<Moments> states;
    Eigen::VectorXd model_probs;
    /// Per-model measurement likelihoods N(z; H x_m, S_m).
    Eigen::VectorXd likelihoods;
    /// Mixture likelihood sum_m mu_m N(z; H x_m, S_m).
    double likelihood = 0.0;
};

[[nodiscard]] ImmUpdate imm_update(const ImmPrediction& pred, const Eigen::Vector2d& z,
                                   const RadarModel& radar);

/// Gated global nearest neighbour on squared Mahalanobis distances
/// (tracks x measurements): a missed track costs the gate, entries above the
/// gate are forbidden. Returns the measurement per track or kMiss.
[[nodiscard]] std::vector<int> gnn_assign(const Eigen::MatrixXd& distances, double gate);

/// Minimum-risk class: argmin_i sum_j alpha_ij c_ij L_j P_j, ties to the lower index.
[[nodiscard]] int dte_decide(const RiskCoefficients& coeffs, const Eigen::VectorXd& likelihoods,
                             const Eigen::VectorXd& priors);

struct BaselineContext {
    ClassModels models;
    UnionModels union_models;
    RadarModel radar;
    RiskCoefficients coeffs;
    GnnParams params;
    /// Birth priors for birth-gated initiation.
    std::vector<Moments> births;
};

[[nodiscard]] BaselineContext make_baseline_context(const ClassModels& models,
                                                    const RadarModel& radar,
                                                    const RiskCoefficients& coeffs,
                                                    const GnnParams& params,
                                                    std::vector<Moments> births = {});

struct GnnTrackSet {
    std::vector<GnnTrack> tracks;
    int next_id = 0;
};

/// Estimation then decision: GNN + IMM over the union model set, class from
/// the per-class likelihoods of the predicted states.
void etd_step(GnnTrackSet& set, const ScanData& scan, const BaselineContext& ctx);

/// Decision then estimation: per track pick the minimum-risk class first and
/// run the IMM over that class's model set only.
void dte_step(GnnTrackSet& set, const ScanData& scan, const BaselineContext& ctx);

/// Confirmed tracks with their combined state and decided class.
[[nodiscard]] std::vector<TrackEstimate> baseline_estimates(const GnnTrackSet& set);

enum class BaselineKind { Etd, Dte };

class GnnTracker {
public:
    GnnTracker(BaselineKind kind, BaselineContext ctx);

    std::vector<TrackEstimate> step(const ScanData& scan);
    [[nodiscard]] const GnnTrackSet& tracks() const { return set_; }

private:
    BaselineKind kind_;
    BaselineContext ctx_;
    GnnTrackSet set_;
};

} // namespace jdtc

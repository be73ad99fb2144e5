#pragma once

#include "jdtc/core/gaussian.hpp"
#include "jdtc/core/lmb.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace jdtc {

enum class MotionKind { CV, CA };

[[nodiscard]] std::string_view to_string(MotionKind kind);

/// Linear-Gaussian motion model on the common 6-D state. The noise gain of
/// the textbook x' = F x + G w form is folded into Q.
struct MotionModel {
    MotionKind kind = MotionKind::CV;
    StateCov transition = StateCov::Identity();
    StateCov process_noise = StateCov::Zero();
};

/// Acceleration variance added per scan to CV models so the unused
/// acceleration states keep an invertible covariance.
inline constexpr double kCvAccelerationFloor = 1e-6;

/// Constant velocity: per-axis [[1,T],[0,1]] with Q = sigma_v2 [[T^2,T],[T,1]];
/// accelerations carried unchanged and uncoupled.
[[nodiscard]] MotionModel build_cv_model(double T, double sigma_v2);

/// Constant acceleration: per-axis [[1,T,T^2/2],[0,1,T],[0,0,1]] with
/// Q = sigma_a2 [[T^4/4,T^3/2,T^2/2],[T^3/2,T^2,T],[T^2/2,T,1]].
[[nodiscard]] MotionModel build_ca_model(double T, double sigma_a2);

/// Motion models available to one class, Markov-switched by a row-stochastic
/// matrix (switch_matrix(i, j) = P(model j at k | model i at k-1)).
struct ClassModelSet {
    int class_id = 0;
    std::vector<MotionModel> models;
    Eigen::MatrixXd switch_matrix;
    Eigen::VectorXd initial_model_probs;

    [[nodiscard]] int size() const { return static_cast<int>(models.size()); }
    /// Throws ConfigError when the switch matrix or initial probabilities are malformed.
    void validate() const;
};

/// Indexed by 0-based class id.
using ClassModels = std::vector<ClassModelSet>;

[[nodiscard]] GaussianComponent predict_component(const GaussianComponent& c,
                                                  const MotionModel& model);
[[nodiscard]] GaussianMixture predict_mixture(const GaussianMixture& gm,
                                              const MotionModel& model);

struct PredictedClassDensity {
    ClassConditionedDensity density;
    double existence_factor = 1.0;
};

/// Class-conditioned prediction. Single-model classes push every component
/// through (F, Q); multi-model classes run an interacting-multiple-model
/// step: mixing with probabilities mu_{i|j} (mixture-level, followed by
/// prune_and_merge), then model-matched prediction. Survival is
/// state-independent, so the existence factor is p_s. Throws ConfigError when
/// a class has no model set or the model count disagrees with the density.
[[nodiscard]] PredictedClassDensity predict_class_density(const ClassConditionedDensity& d,
                                                          const ClassModels& models,
                                                          double p_s,
                                                          const MixtureLimits& limits = {});

} // namespace jdtc

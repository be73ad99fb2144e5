#pragma once

#include "jdtc/baselines/gnn.hpp"
#include "jdtc/filter/update.hpp"
#include "jdtc/metrics/metrics.hpp"
#include "jdtc/models/motion.hpp"
#include "jdtc/risk/coefficients.hpp"
#include "jdtc/sensing/sensors.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace jdtc {

enum class Algorithm { CjdeLmb, Etd, Dte };

[[nodiscard]] std::string_view to_string(Algorithm a);
/// Throws ConfigError on an unknown name.
[[nodiscard]] Algorithm parse_algorithm(std::string_view name);

/// Truth motion from scan `start` on (until the next segment). CV holds the
/// velocity and zeroes the acceleration; CA applies `acceleration`.
struct MotionSegment {
    int start = 1;
    MotionKind kind = MotionKind::CV;
    Eigen::Vector2d acceleration = Eigen::Vector2d::Zero();
};

/// A target exists on scans birth..death inclusive and starts from `initial`
/// at its birth scan. Classes are 0-based.
struct TargetSpec {
    int birth = 1;
    int death = 1;
    StateVec initial = StateVec::Zero();
    int true_class = 0;
    std::vector<MotionSegment> segments;
};

/// Process-noise variance of each motion model of one class.
struct ClassMotionSpec {
    std::vector<MotionKind> kinds;
    std::vector<double> noise_vars;
    Eigen::MatrixXd switch_matrix;
    Eigen::VectorXd initial_model_probs;
};

struct BirthSpec {
    double existence = 0.02;
    StateVec mean = StateVec::Zero();
    StateCov cov = StateCov::Identity();
    Eigen::VectorXd class_prior;
};

struct ScenarioConfig {
    std::string name = "custom";
    double scan_period = 1.0;
    int horizon = 30;
    std::vector<TargetSpec> targets;
    std::vector<ClassMotionSpec> classes;
    SensorSuite sensors;
    std::vector<BirthSpec> births;
    RiskCoefficients coeffs;
    FilterParams filter;
    GnnParams baseline;
    OspaParams ospa;
    int trials = 100;
    std::uint64_t seed = 7;
    Algorithm algorithm = Algorithm::CjdeLmb;

    [[nodiscard]] int num_classes() const { return static_cast<int>(classes.size()); }
    /// Throws ConfigError on any inconsistency.
    void validate() const;
};

/// Three targets (two class-1 CV, one class-2 CA), linear radar, ESM off.
[[nodiscard]] ScenarioConfig build_example1();

/// Example 1 with the cardinality weight overridden and target 3 flying CV
/// for five scans before its constant-acceleration manoeuvre. gamma == 0 is
/// accepted and reported through `warnings`.
[[nodiscard]] ScenarioConfig build_example2(double gamma,
                                            std::vector<std::string>* warnings = nullptr);

/// Example 1 with ESM bearing and class declarations enabled.
[[nodiscard]] ScenarioConfig build_fusion_demo();

/// Make `target` fly CV for `cv_scans` scans after birth, then accelerate
/// with the acceleration of its initial state.
void apply_maneuver_onset(ScenarioConfig& config, std::size_t target, int cv_scans);

/// First scan after the manoeuvre onset of any target with a CV-then-CA
/// history, or 0 when there is none.
[[nodiscard]] int maneuver_onset_scan(const ScenarioConfig& config);

/// Noise-free truth per scan; entry k - 1 holds scan k.
[[nodiscard]] std::vector<std::vector<TruthObject>> generate_truth(const ScenarioConfig& config);

[[nodiscard]] ClassModels build_class_models(const ScenarioConfig& config);

} // namespace jdtc

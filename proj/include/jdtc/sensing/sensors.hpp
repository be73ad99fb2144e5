#pragma once

#include "jdtc/core/gaussian.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace jdtc {

/// Axis-aligned surveillance rectangle in metres.
struct Region {
    double x_min = -400.0;
    double x_max = 1600.0;
    double y_min = 400.0;
    double y_max = 2200.0;

    [[nodiscard]] double area() const { return (x_max - x_min) * (y_max - y_min); }
    [[nodiscard]] bool contains(const Eigen::Vector2d& p) const {
        return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
    }
};

enum class RadarMode { LinearPosition, RangeBearing };

/// Lower bound on clutter densities so the detection ratio p_d g / kappa stays
/// finite when a scenario switches clutter off.
inline constexpr double kMinClutterDensity = 1e-300;

struct RadarModel {
    RadarMode mode = RadarMode::LinearPosition;
    /// (x, y) noise in linear mode, (range, bearing) noise in range-bearing mode.
    Eigen::Matrix2d noise_cov = Eigen::Vector2d(4.0, 4.0).asDiagonal();
    double p_d = 0.98;
    /// Expected number of clutter returns per scan.
    double clutter_rate = 10.0;
    Region region;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();  // range-bearing mode only
    double max_range = 5000.0;                          // range-bearing mode only

    [[nodiscard]] static Eigen::Matrix<double, 2, kStateDim> position_matrix();
    /// Uniform clutter intensity in measurement space.
    [[nodiscard]] double clutter_density() const;
};

/// Passive bearing sensor with emitter-class declarations. confusion(i, j) is
/// the probability of declaring class j when the true class is i.
struct EsmModel {
    bool enabled = false;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    double bearing_noise_var = std::pow(std::numbers::pi / 180.0, 2);
    double p_d = 0.9;
    Eigen::MatrixXd confusion = (Eigen::Matrix2d() << 0.9, 0.1, 0.1, 0.9).finished();
    double clutter_rate = 2.0;

    [[nodiscard]] int num_classes() const { return static_cast<int>(confusion.rows()); }
    /// Clutter bearings are uniform on [-pi, pi) and declare a uniform class.
    [[nodiscard]] double clutter_density() const;
    /// Throws ConfigError when confusion is not square row-stochastic or p_d is out of range.
    void validate() const;
};

struct SensorSuite {
    RadarModel radar;
    EsmModel esm;
};

struct EsmMeasurement {
    double bearing = 0.0;
    int declared_class = 0;
};

struct TruthObject {
    StateVec state = StateVec::Zero();
    int true_class = 0;
    int target_id = 0;
};

/// One scan of sensor data. Truth rides along for scoring only; no filter reads it.
struct ScanData {
    int k = 0;
    std::vector<Eigen::Vector2d> radar;
    std::vector<EsmMeasurement> esm;
    std::vector<TruthObject> truth;
};

/// Linearized measurement model evaluated at a state.
struct MeasurementPrediction {
    Eigen::VectorXd z;
    Eigen::MatrixXd H;
    Eigen::MatrixXd R;
    std::vector<bool> angular;  // rows whose innovation wraps to (-pi, pi]
};

[[nodiscard]] double wrap_angle(double a);
[[nodiscard]] double bearing_from(const Eigen::Vector2d& sensor, const StateVec& x);

[[nodiscard]] MeasurementPrediction predict_radar(const RadarModel& radar, const StateVec& x);
[[nodiscard]] MeasurementPrediction predict_esm(const EsmModel& esm, const StateVec& x);
/// Augmented measurement: stacked z and H, block-diagonal R.
[[nodiscard]] MeasurementPrediction stack(const MeasurementPrediction& a,
                                          const MeasurementPrediction& b);
[[nodiscard]] Eigen::VectorXd innovation(const Eigen::VectorXd& z,
                                         const MeasurementPrediction& pred);

/// Bernoulli detection factor: 1 - p_d for a miss, p_d * g / kappa otherwise.
[[nodiscard]] double detection_factor(double p_d, std::optional<double> g, double kappa);

/// Point-state radar likelihood ratio (missed detection when z is empty).
[[nodiscard]] double radar_likelihood(const std::optional<Eigen::Vector2d>& z, const StateVec& x,
                                      const RadarModel& radar);
/// Point-state ESM likelihood ratio for class hypothesis cls, including the
/// confusion-matrix factor for the declared class.
[[nodiscard]] double esm_likelihood(const std::optional<EsmMeasurement>& z, const StateVec& x,
                                    int cls, const EsmModel& esm);

} // namespace jdtc

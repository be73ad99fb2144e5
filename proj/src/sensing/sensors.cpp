#include "jdtc/sensing/sensors.hpp"

#include "jdtc/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace jdtc {

Eigen::Matrix<double, 2, kStateDim> RadarModel::position_matrix() {
    Eigen::Matrix<double, 2, kStateDim> H = Eigen::Matrix<double, 2, kStateDim>::Zero();
    H(0, state_index::x) = 1.0;
    H(1, state_index::y) = 1.0;
    return H;
}

double RadarModel::clutter_density() const {
    const double volume = mode == RadarMode::LinearPosition
                              ? region.area()
                              : max_range * 2.0 * std::numbers::pi;
    return std::max(clutter_rate / volume, kMinClutterDensity);
}

double EsmModel::clutter_density() const {
    const double volume = 2.0 * std::numbers::pi * static_cast<double>(num_classes());
    return std::max(clutter_rate / volume, kMinClutterDensity);
}

void EsmModel::validate() const {
    if (confusion.rows() != confusion.cols() || confusion.rows() == 0) {
        throw ConfigError("ESM confusion matrix must be square and nonempty");
    }
    for (Eigen::Index i = 0; i < confusion.rows(); ++i) {
        if (confusion.row(i).minCoeff() < 0.0 || std::abs(confusion.row(i).sum() - 1.0) > 1e-9) {
            throw ConfigError("ESM confusion matrix rows must sum to one");
        }
    }
    if (p_d < 0.0 || p_d > 1.0) throw ConfigError("ESM detection probability outside [0,1]");
}

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a;
}

double bearing_from(const Eigen::Vector2d& sensor, const StateVec& x) {
    return std::atan2(x(state_index::y) - sensor.y(), x(state_index::x) - sensor.x());
}

namespace {

// Gradient of atan2(dy, dx) and of the range w.r.t. the state.
void range_bearing_rows(const Eigen::Vector2d& sensor, const StateVec& x, double& range,
                        double& bearing, Eigen::RowVectorXd& d_range,
                        Eigen::RowVectorXd& d_bearing) {
    const double dx = x(state_index::x) - sensor.x();
    const double dy = x(state_index::y) - sensor.y();
    const double r2 = std::max(dx * dx + dy * dy, 1e-12);
    range = std::sqrt(r2);
    bearing = std::atan2(dy, dx);
    d_range = Eigen::RowVectorXd::Zero(kStateDim);
    d_bearing = Eigen::RowVectorXd::Zero(kStateDim);
    d_range(state_index::x) = dx / range;
    d_range(state_index::y) = dy / range;
    d_bearing(state_index::x) = -dy / r2;
    d_bearing(state_index::y) = dx / r2;
}

} // namespace

MeasurementPrediction predict_radar(const RadarModel& radar, const StateVec& x) {
    MeasurementPrediction p;
    p.R = radar.noise_cov;
    if (radar.mode == RadarMode::LinearPosition) {
        p.H = RadarModel::position_matrix();
        p.z = p.H * x;
        p.angular = {false, false};
        return p;
    }
    double range = 0.0;
    double bearing = 0.0;
    Eigen::RowVectorXd d_range;
    Eigen::RowVectorXd d_bearing;
    range_bearing_rows(radar.position, x, range, bearing, d_range, d_bearing);
    p.z = Eigen::Vector2d(range, bearing);
    p.H.resize(2, kStateDim);
    p.H.row(0) = d_range;
    p.H.row(1) = d_bearing;
    p.angular = {false, true};
    return p;
}

MeasurementPrediction predict_esm(const EsmModel& esm, const StateVec& x) {
    double range = 0.0;
    double bearing = 0.0;
    Eigen::RowVectorXd d_range;
    Eigen::RowVectorXd d_bearing;
    range_bearing_rows(esm.position, x, range, bearing, d_range, d_bearing);
    MeasurementPrediction p;
    p.z = Eigen::VectorXd::Constant(1, bearing);
    p.H = d_bearing;
    p.R = Eigen::MatrixXd::Constant(1, 1, esm.bearing_noise_var);
    p.angular = {true};
    return p;
}

MeasurementPrediction stack(const MeasurementPrediction& a, const MeasurementPrediction& b) {
    const Eigen::Index na = a.z.size();
    const Eigen::Index nb = b.z.size();
    MeasurementPrediction p;
    p.z.resize(na + nb);
    p.z << a.z, b.z;
    p.H.resize(na + nb, kStateDim);
    p.H << a.H, b.H;
    p.R = Eigen::MatrixXd::Zero(na + nb, na + nb);
    p.R.topLeftCorner(na, na) = a.R;
    p.R.bottomRightCorner(nb, nb) = b.R;
    p.angular = a.angular;
    p.angular.insert(p.angular.end(), b.angular.begin(), b.angular.end());
    return p;
}

Eigen::VectorXd innovation(const Eigen::VectorXd& z, const MeasurementPrediction& pred) {
    Eigen::VectorXd nu = z - pred.z;
    for (Eigen::Index i = 0; i < nu.size(); ++i) {
        if (pred.angular[static_cast<std::size_t>(i)]) nu(i) = wrap_angle(nu(i));
    }
    return nu;
}

double detection_factor(double p_d, std::optional<double> g, double kappa) {
    if (!g) return 1.0 - p_d;
    if (p_d == 0.0) return 0.0;
    return p_d * *g / std::max(kappa, kMinClutterDensity);
}

double radar_likelihood(const std::optional<Eigen::Vector2d>& z, const StateVec& x,
                        const RadarModel& radar) {
    if (!z) return detection_factor(radar.p_d, std::nullopt, radar.clutter_density());
    const auto pred = predict_radar(radar, x);
    const double g = std::exp(log_normal_density(innovation(*z, pred), pred.R));
    return detection_factor(radar.p_d, g, radar.clutter_density());
}

double esm_likelihood(const std::optional<EsmMeasurement>& z, const StateVec& x, int cls,
                      const EsmModel& esm) {
    if (!z) return detection_factor(esm.p_d, std::nullopt, esm.clutter_density());
    const auto pred = predict_esm(esm, x);
    const Eigen::VectorXd zv = Eigen::VectorXd::Constant(1, z->bearing);
    const double g = std::exp(log_normal_density(innovation(zv, pred), pred.R)) *
                     esm.confusion(cls, z->declared_class);
    return detection_factor(esm.p_d, g, esm.clutter_density());
}

} // namespace jdtc

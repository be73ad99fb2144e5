#include "jdtc/sensing/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace jdtc {

int declare_class(int true_class, const Eigen::MatrixXd& confusion, Rng& rng) {
    const Eigen::VectorXd row = confusion.row(true_class).transpose();
    std::discrete_distribution<int> dist(row.data(), row.data() + row.size());
    return dist(rng);
}

namespace {

Eigen::Vector2d sample_gaussian(const Eigen::Matrix2d& cov, Rng& rng) {
    std::normal_distribution<double> n01(0.0, 1.0);
    const Eigen::Vector2d u(n01(rng), n01(rng));
    Eigen::LLT<Eigen::Matrix2d> llt(cov);
    if (llt.info() != Eigen::Success) return Eigen::Vector2d::Zero();
    return llt.matrixL() * u;
}

} // namespace

ScanData simulate_scan(int k, const std::vector<TruthObject>& truth, const SensorSuite& sensors,
                       Rng& rng) {
    ScanData scan;
    scan.k = k;
    scan.truth = truth;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto& radar = sensors.radar;
    for (const auto& t : truth) {
        if (unit(rng) >= radar.p_d) continue;
        const auto pred = predict_radar(radar, t.state);
        Eigen::Vector2d z = pred.z + sample_gaussian(radar.noise_cov, rng);
        if (radar.mode == RadarMode::RangeBearing) z(1) = wrap_angle(z(1));
        scan.radar.push_back(z);
    }
    std::poisson_distribution<int> radar_clutter(radar.clutter_rate);
    const int n_radar_clutter = radar.clutter_rate > 0.0 ? radar_clutter(rng) : 0;
    for (int i = 0; i < n_radar_clutter; ++i) {
        if (radar.mode == RadarMode::LinearPosition) {
            const auto& r = radar.region;
            scan.radar.emplace_back(r.x_min + unit(rng) * (r.x_max - r.x_min),
                                    r.y_min + unit(rng) * (r.y_max - r.y_min));
        } else {
            scan.radar.emplace_back(unit(rng) * radar.max_range,
                                    -std::numbers::pi + unit(rng) * 2.0 * std::numbers::pi);
        }
    }
    std::shuffle(scan.radar.begin(), scan.radar.end(), rng);

    const auto& esm = sensors.esm;
    if (esm.enabled) {
        std::normal_distribution<double> bearing_noise(0.0, std::sqrt(esm.bearing_noise_var));
        for (const auto& t : truth) {
            if (unit(rng) >= esm.p_d) continue;
            EsmMeasurement m;
            m.bearing = wrap_angle(bearing_from(esm.position, t.state) + bearing_noise(rng));
            m.declared_class = declare_class(t.true_class, esm.confusion, rng);
            scan.esm.push_back(m);
        }
        std::poisson_distribution<int> esm_clutter(esm.clutter_rate);
        const int n_esm_clutter = esm.clutter_rate > 0.0 ? esm_clutter(rng) : 0;
        std::uniform_int_distribution<int> any_class(0, esm.num_classes() - 1);
        for (int i = 0; i < n_esm_clutter; ++i) {
            scan.esm.push_back({-std::numbers::pi + unit(rng) * 2.0 * std::numbers::pi,
                                any_class(rng)});
        }
        std::shuffle(scan.esm.begin(), scan.esm.end(), rng);
    }
    return scan;
}

ScanData simulate_scan(int k, const std::vector<TruthObject>& truth, const SensorSuite& sensors,
                       std::uint64_t seed) {
    Rng rng(seed);
    return simulate_scan(k, truth, sensors, rng);
}

} // namespace jdtc

#pragma once

#include "jdtc/sensing/sensors.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace jdtc {

using Rng = std::mt19937_64;

/// Sample a declared class from row true_class of the confusion matrix.
[[nodiscard]] int declare_class(int true_class, const Eigen::MatrixXd& confusion, Rng& rng);

/// Draw one scan: detections with probability p_d and Gaussian noise,
/// Poisson clutter uniform over the measurement space, ESM bearings and class
/// declarations when enabled. Measurement order is shuffled.
[[nodiscard]] ScanData simulate_scan(int k, const std::vector<TruthObject>& truth,
                                     const SensorSuite& sensors, Rng& rng);
[[nodiscard]] ScanData simulate_scan(int k, const std::vector<TruthObject>& truth,
                                     const SensorSuite& sensors, std::uint64_t seed);

} // namespace jdtc

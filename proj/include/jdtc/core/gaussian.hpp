#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace jdtc {

inline constexpr int kStateDim = 6;
using StateVec = Eigen::Matrix<double, kStateDim, 1>;
using StateCov = Eigen::Matrix<double, kStateDim, kStateDim>;

/// Index of each kinematic quantity in the common state [x, vx, ax, y, vy, ay].
namespace state_index {
inline constexpr int x = 0;
inline constexpr int vx = 1;
inline constexpr int ax = 2;
inline constexpr int y = 3;
inline constexpr int vy = 4;
inline constexpr int ay = 5;
} // namespace state_index

inline Eigen::Vector2d position_of(const StateVec& x) {
    return {x(state_index::x), x(state_index::y)};
}

struct GaussianComponent {
    double weight = 0.0;
    StateVec mean = StateVec::Zero();
    StateCov cov = StateCov::Zero();
};

struct GaussianMixture {
    std::vector<GaussianComponent> components;

    [[nodiscard]] bool empty() const { return components.empty(); }
    [[nodiscard]] std::size_t size() const { return components.size(); }
    [[nodiscard]] double total_weight() const;
    void normalize();
};

struct Moments {
    StateVec mean = StateVec::Zero();
    StateCov cov = StateCov::Zero();
};

/// Mean and spread-of-means covariance of a normalized, nonempty mixture.
/// Throws DomainError on an empty mixture.
[[nodiscard]] Moments mixture_moments(const GaussianMixture& gm);

/// Moment-preserving collapse of weighted moments. Weights need not sum to one.
[[nodiscard]] Moments combine_moments(const std::vector<double>& weights,
                                      const std::vector<Moments>& parts);

struct MixtureLimits {
    double prune_threshold = 1e-5;
    double merge_distance = 4.0;  // squared Mahalanobis distance
    int max_components = 20;
};

/// Standard GM housekeeping: drop light components, greedily merge
/// components whose squared Mahalanobis distance to the heaviest remaining
/// component is below merge_distance, cap to the heaviest max_components.
/// A nonempty input never produces an empty output.
[[nodiscard]] GaussianMixture prune_and_merge(const GaussianMixture& gm,
                                              const MixtureLimits& limits = {},
                                              bool renormalize = true);

/// Replace P with (P + P^T) / 2.
template <typename Derived>
void symmetrize(Eigen::MatrixBase<Derived>& m) {
    m = (0.5 * (m + m.transpose())).eval();
}

/// Symmetric within 1e-9 relative and no eigenvalue below -tol * largest.
[[nodiscard]] bool is_valid_covariance(const StateCov& cov, double tol = 1e-9);

/// log N(innovation; 0, S) for a symmetric positive-definite S.
/// Returns -inf when S is not positive definite.
[[nodiscard]] double log_normal_density(const Eigen::VectorXd& innovation,
                                        const Eigen::MatrixXd& S);

/// innovation^T S^{-1} innovation; +inf when S is not positive definite.
[[nodiscard]] double mahalanobis_squared(const Eigen::VectorXd& innovation,
                                         const Eigen::MatrixXd& S);

} // namespace jdtc

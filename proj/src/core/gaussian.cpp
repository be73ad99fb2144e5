#include "jdtc/core/gaussian.hpp"

#include "jdtc/core/errors.hpp"
#include "jdtc/core/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace jdtc {

double GaussianMixture::total_weight() const {
    double total = 0.0;
    for (const auto& c : components) total += c.weight;
    return total;
}

void GaussianMixture::normalize() {
    const double total = total_weight();
    if (total <= 0.0) return;
    for (auto& c : components) c.weight /= total;
}

Moments mixture_moments(const GaussianMixture& gm) {
    if (gm.empty()) throw DomainError("mixture_moments: empty mixture");
    std::vector<double> weights;
    std::vector<Moments> parts;
    weights.reserve(gm.size());
    parts.reserve(gm.size());
    for (const auto& c : gm.components) {
        weights.push_back(c.weight);
        parts.push_back({c.mean, c.cov});
    }
    return combine_moments(weights, parts);
}

Moments combine_moments(const std::vector<double>& weights, const std::vector<Moments>& parts) {
    Moments out;
    double total = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out.mean += weights[i] * parts[i].mean;
        total += weights[i];
    }
    if (total <= 0.0) return parts.empty() ? out : parts.front();
    out.mean /= total;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (weights[i] == 0.0) continue;
        const StateVec d = parts[i].mean - out.mean;
        out.cov += weights[i] * (parts[i].cov + d * d.transpose());
    }
    out.cov /= total;
    symmetrize(out.cov);
    return out;
}

GaussianMixture prune_and_merge(const GaussianMixture& gm, const MixtureLimits& limits,
                                bool renormalize) {
    if (gm.empty()) return gm;

    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < gm.size(); ++i) {
        if (gm.components[i].weight >= limits.prune_threshold) alive.push_back(i);
    }
    if (alive.empty()) {
        const auto heaviest = std::max_element(
            gm.components.begin(), gm.components.end(),
            [](const auto& a, const auto& b) { return a.weight < b.weight; });
        alive.push_back(static_cast<std::size_t>(heaviest - gm.components.begin()));
    }
    // Stable order: heavier first, ties by original position.
    std::stable_sort(alive.begin(), alive.end(), [&](std::size_t a, std::size_t b) {
        return gm.components[a].weight > gm.components[b].weight;
    });

    GaussianMixture out;
    std::vector<bool> used(gm.size(), false);
    for (std::size_t anchor_pos = 0; anchor_pos < alive.size(); ++anchor_pos) {
        const std::size_t anchor = alive[anchor_pos];
        if (used[anchor]) continue;
        const auto& a = gm.components[anchor];
        Eigen::LDLT<StateCov> ldlt(a.cov);
        const bool invertible = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                                ldlt.vectorD().minCoeff() > 0.0;

        std::vector<std::size_t> group;
        for (std::size_t pos = anchor_pos; pos < alive.size(); ++pos) {
            const std::size_t i = alive[pos];
            if (used[i]) continue;
            const StateVec d = gm.components[i].mean - a.mean;
            double dist2 = 0.0;
            if (i != anchor) {
                if (invertible) {
                    dist2 = d.dot(ldlt.solve(d));
                } else {
                    dist2 = d.isZero(0.0) ? 0.0 : kInf;
                }
            }
            if (i == anchor || dist2 < limits.merge_distance) {
                group.push_back(i);
                used[i] = true;
            }
        }

        if (group.size() == 1) {
            out.components.push_back(a);
            continue;
        }
        GaussianComponent merged;
        for (std::size_t i : group) merged.weight += gm.components[i].weight;
        for (std::size_t i : group) {
            merged.mean += gm.components[i].weight * gm.components[i].mean;
        }
        merged.mean /= merged.weight;
        for (std::size_t i : group) {
            const auto& c = gm.components[i];
            const StateVec d = c.mean - merged.mean;
            merged.cov += c.weight * (c.cov + d * d.transpose());
        }
        merged.cov /= merged.weight;
        symmetrize(merged.cov);
        out.components.push_back(std::move(merged));
    }

    std::stable_sort(out.components.begin(), out.components.end(),
                     [](const auto& a, const auto& b) { return a.weight > b.weight; });
    if (limits.max_components > 0 &&
        out.components.size() > static_cast<std::size_t>(limits.max_components)) {
        out.components.resize(static_cast<std::size_t>(limits.max_components));
    }
    if (renormalize) out.normalize();
    return out;
}

bool is_valid_covariance(const StateCov& cov, double tol) {
    if (!cov.allFinite()) return false;
    const double scale = std::max(cov.cwiseAbs().maxCoeff(), 1.0);
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
    Eigen::SelfAdjointEigenSolver<StateCov> es(cov);
    const auto& ev = es.eigenvalues();
    return ev.minCoeff() >= -tol * std::max(ev.maxCoeff(), 1.0);
}

double log_normal_density(const Eigen::VectorXd& innovation, const Eigen::MatrixXd& S) {
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) return kNegInf;
    const Eigen::VectorXd w = llt.matrixL().solve(innovation);
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < S.rows(); ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
    const double dim = static_cast<double>(innovation.size());
    return -0.5 * (w.squaredNorm() + log_det + dim * std::log(2.0 * std::numbers::pi));
}

double mahalanobis_squared(const Eigen::VectorXd& innovation, const Eigen::MatrixXd& S) {
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) return kInf;
    return llt.matrixL().solve(innovation).squaredNorm();
}

} // namespace jdtc

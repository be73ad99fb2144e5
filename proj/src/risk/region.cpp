#include "jdtc/risk/region.hpp"

#include "jdtc/core/errors.hpp"
#include "jdtc/core/numeric.hpp"

#include <cmath>
#include <string>

namespace jdtc {

RiskCoefficients RiskCoefficients::uniform(int num_classes, double alpha, double beta,
                                           double gamma) {
    RiskCoefficients rc;
    rc.alpha = Eigen::MatrixXd::Constant(num_classes, num_classes, alpha);
    rc.beta = Eigen::MatrixXd::Constant(num_classes, num_classes, beta);
    rc.c = Eigen::MatrixXd::Ones(num_classes, num_classes) -
           Eigen::MatrixXd::Identity(num_classes, num_classes);
    rc.gamma = gamma;
    return rc;
}

void RiskCoefficients::validate() const {
    const auto n = c.rows();
    if (n == 0 || c.cols() != n || alpha.rows() != n || alpha.cols() != n || beta.rows() != n ||
        beta.cols() != n) {
        throw ConfigError("risk coefficients: alpha, beta and c must all be J x J");
    }
    if (alpha.minCoeff() < 0.0 || beta.minCoeff() < 0.0 || c.minCoeff() < 0.0 || gamma < 0.0) {
        throw ConfigError("risk coefficients must be nonnegative");
    }
    if (c.diagonal().cwiseAbs().maxCoeff() != 0.0) {
        throw ConfigError("decision cost matrix c must have a zero diagonal");
    }
}

Eigen::MatrixXd predicted_estimation_costs(const std::vector<Moments>& predicted) {
    const auto J = static_cast<Eigen::Index>(predicted.size());
    Eigen::MatrixXd eps(J, J);
    for (Eigen::Index i = 0; i < J; ++i) {
        for (Eigen::Index j = 0; j < J; ++j) {
            const auto& pj = predicted[static_cast<std::size_t>(j)];
            const StateVec d = pj.mean - predicted[static_cast<std::size_t>(i)].mean;
            eps(i, j) = pj.cov.trace() + d.squaredNorm();
        }
    }
    return eps;
}

Eigen::VectorXd intermediate_costs(const RiskCoefficients& coeffs, const Eigen::MatrixXd& eps,
                                   const Eigen::VectorXd& log_likelihoods,
                                   const Eigen::VectorXd& priors) {
    const auto J = coeffs.c.rows();
    if (log_likelihoods.size() != J || priors.size() != J || eps.rows() != J || eps.cols() != J) {
        throw DomainError("intermediate_costs: size mismatch with " + std::to_string(J) +
                          " classes");
    }
    // Posterior class weights L_j P_j / rho, computed in the log domain.
    Eigen::VectorXd log_joint(J);
    for (Eigen::Index j = 0; j < J; ++j) log_joint(j) = log_likelihoods(j) + safe_log(priors(j));
    const double log_rho = log_sum_exp({log_joint.data(), static_cast<std::size_t>(J)});
    Eigen::VectorXd costs = Eigen::VectorXd::Zero(J);
    if (log_rho == kNegInf) return costs;
    Eigen::VectorXd post(J);
    for (Eigen::Index j = 0; j < J; ++j) post(j) = std::exp(log_joint(j) - log_rho);
    const Eigen::MatrixXd weights =
        coeffs.alpha.cwiseProduct(coeffs.c) + coeffs.beta.cwiseProduct(eps);
    return weights * post;
}

int decision_region(const RiskCoefficients& coeffs, const Eigen::MatrixXd& eps,
                    const Eigen::VectorXd& log_likelihoods, const Eigen::VectorXd& priors) {
    const Eigen::VectorXd costs = intermediate_costs(coeffs, eps, log_likelihoods, priors);
    int best = 0;
    for (Eigen::Index i = 1; i < costs.size(); ++i) {
        if (costs(i) < costs(best)) best = static_cast<int>(i);
    }
    return best;
}

bool decision_region_membership(int decision, const RiskCoefficients& coeffs,
                                const Eigen::MatrixXd& eps, const Eigen::VectorXd& log_likelihoods,
                                const Eigen::VectorXd& priors) {
    return decision_region(coeffs, eps, log_likelihoods, priors) == decision;
}

} // namespace jdtc

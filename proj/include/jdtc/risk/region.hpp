#pragma once

#include "jdtc/core/gaussian.hpp"
#include "jdtc/risk/coefficients.hpp"

#include <Eigen/Dense>

#include <vector>

namespace jdtc {

/// One-step predicted estimation cost used when forming decision regions:
/// eps(i, j) = tr(P^j) + |x^j - x^i|^2 over the predicted class moments, i.e.
/// the cost of reporting class i's prediction when class j is true.
[[nodiscard]] Eigen::MatrixXd predicted_estimation_costs(const std::vector<Moments>& predicted);

/// Intermediate per-decision costs
///   C_i = (1/rho) sum_j (alpha_ij c_ij + beta_ij eps_ij) L_j P_j,  rho = sum_j L_j P_j,
/// with likelihoods given as logarithms. All-zero likelihood mass yields zeros.
[[nodiscard]] Eigen::VectorXd intermediate_costs(const RiskCoefficients& coeffs,
                                                 const Eigen::MatrixXd& eps,
                                                 const Eigen::VectorXd& log_likelihoods,
                                                 const Eigen::VectorXd& priors);

/// Index of the minimal intermediate cost; ties go to the lower class index,
/// so the regions of one track partition the measurement space.
[[nodiscard]] int decision_region(const RiskCoefficients& coeffs, const Eigen::MatrixXd& eps,
                                  const Eigen::VectorXd& log_likelihoods,
                                  const Eigen::VectorXd& priors);

[[nodiscard]] bool decision_region_membership(int decision, const RiskCoefficients& coeffs,
                                              const Eigen::MatrixXd& eps,
                                              const Eigen::VectorXd& log_likelihoods,
                                              const Eigen::VectorXd& priors);

} // namespace jdtc

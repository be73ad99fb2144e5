#pragma once

#include <Eigen/Dense>

namespace jdtc {

/// Weights that put classification, state-estimation and cardinality costs
/// on one scale. alpha, beta and c are J x J (row = decision, column = true
/// class); c has a zero diagonal. gamma is shared by all class hypotheses.
struct RiskCoefficients {
    Eigen::MatrixXd alpha;
    Eigen::MatrixXd beta;
    Eigen::MatrixXd c;
    double gamma = 0.0;

    /// Constant alpha/beta, unit off-diagonal decision cost.
    [[nodiscard]] static RiskCoefficients uniform(int num_classes, double alpha, double beta,
                                                  double gamma);

    [[nodiscard]] int num_classes() const { return static_cast<int>(c.rows()); }
    /// Throws ConfigError on shape mismatch, negative entries or nonzero diagonal of c.
    void validate() const;
};

} // namespace jdtc

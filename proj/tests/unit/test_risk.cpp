#include "jdtc/core/errors.hpp"
#include "jdtc/filter/update.hpp"
#include "jdtc/risk/decision.hpp"
#include "jdtc/risk/region.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace jdtc;

Eigen::VectorXd log_gauss_1d(double z, double m0, double m1) {
    return Eigen::Vector2d(-0.5 * (z - m0) * (z - m0), -0.5 * (z - m1) * (z - m1));
}

Moments scalar_moments(double mean, double var) {
    Moments m;
    m.mean(0) = mean;
    m.cov(0, 0) = var;
    return m;
}

TrackSummary summary(double r, const Eigen::VectorXd& probs, const std::vector<Moments>& moments) {
    TrackSummary s;
    s.existence = r;
    s.class_probs = probs;
    s.class_moments = moments;
    return s;
}

TEST(Coefficients, UniformShapeAndValidation) {
    const auto c = RiskCoefficients::uniform(3, 20.0, 1.0, 100.0);
    EXPECT_EQ(c.num_classes(), 3);
    EXPECT_DOUBLE_EQ(c.c(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(c.c(0, 2), 1.0);
    EXPECT_NO_THROW(c.validate());
    auto bad = c;
    bad.c(1, 1) = 0.5;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = c;
    bad.alpha(0, 1) = -1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(DecisionRegion, SymmetricBayesTest) {
    const auto coeffs = RiskCoefficients::uniform(2, 1.0, 0.0, 0.0);
    const Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(2, 2);
    const Eigen::Vector2d priors(0.5, 0.5);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const Eigen::Vector2d ll(n(rng), n(rng));
        EXPECT_EQ(decision_region(coeffs, eps, ll, priors), ll(0) >= ll(1) ? 0 : 1);
    }
}

TEST(DecisionRegion, DominantLikelihoodWins) {
    auto coeffs = RiskCoefficients::uniform(2, 50.0, 3.0, 0.0);
    Eigen::MatrixXd eps(2, 2);
    eps << 1.0, 40.0, 70.0, 2.0;
    const Eigen::Vector2d priors(0.3, 0.7);
    EXPECT_TRUE(decision_region_membership(0, coeffs, eps, Eigen::Vector2d(0.0, -800.0), priors));
    EXPECT_TRUE(decision_region_membership(1, coeffs, eps, Eigen::Vector2d(-800.0, 0.0), priors));
}

TEST(DecisionRegion, ScalarGaussianBoundaryAtMidpoint) {
    const auto coeffs = RiskCoefficients::uniform(2, 1.0, 0.0, 0.0);
    const Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(2, 2);
    const Eigen::Vector2d priors(0.5, 0.5);
    EXPECT_EQ(decision_region(coeffs, eps, log_gauss_1d(0.999, 0.0, 2.0), priors), 0);
    EXPECT_EQ(decision_region(coeffs, eps, log_gauss_1d(1.001, 0.0, 2.0), priors), 1);
    // Exactly on the boundary the tie goes to the lower class index.
    EXPECT_EQ(decision_region(coeffs, eps, log_gauss_1d(1.0, 0.0, 2.0), priors), 0);
}

TEST(DecisionRegion, RegionsPartitionMeasurements) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto coeffs = RiskCoefficients::uniform(3, u(rng), u(rng), 0.0);
        Eigen::MatrixXd eps = Eigen::MatrixXd::NullaryExpr(3, 3, [&] { return u(rng); });
        const Eigen::Vector3d ll(-u(rng), -u(rng), -u(rng));
        const Eigen::Vector3d priors = Eigen::Vector3d(u(rng), u(rng), u(rng)).normalized().cwiseAbs2();
        int members = 0;
        for (int i = 0; i < 3; ++i) members += decision_region_membership(i, coeffs, eps, ll, priors) ? 1 : 0;
        EXPECT_EQ(members, 1);
    }
}

TEST(DecisionRegion, TwoClassLikelihoodRatioForm) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    int compared = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        RiskCoefficients coeffs;
        coeffs.alpha = Eigen::MatrixXd::NullaryExpr(2, 2, [&] { return u(rng); });
        coeffs.beta = Eigen::MatrixXd::NullaryExpr(2, 2, [&] { return u(rng); });
        coeffs.c = (Eigen::Matrix2d() << 0.0, u(rng), u(rng), 0.0).finished();
        const Eigen::MatrixXd eps = Eigen::MatrixXd::NullaryExpr(2, 2, [&] { return u(rng); });
        const Eigen::Vector2d ll(-u(rng), -u(rng));
        const double p0 = u(rng) / 10.0;
        const Eigen::Vector2d priors(p0, 1.0 - p0);
        // Decide class 0 when L0 P0 (a_10 - a_00) >= L1 P1 (a_01 - a_11) with
        // a_ij = alpha_ij c_ij + beta_ij eps_ij.
        const Eigen::MatrixXd a = coeffs.alpha.cwiseProduct(coeffs.c) + coeffs.beta.cwiseProduct(eps);
        const double lhs = std::exp(ll(0)) * priors(0) * (a(1, 0) - a(0, 0));
        const double rhs = std::exp(ll(1)) * priors(1) * (a(0, 1) - a(1, 1));
        if (std::abs(lhs - rhs) < 1e-12 * (std::abs(lhs) + std::abs(rhs))) continue;
        ++compared;
        EXPECT_EQ(decision_region_membership(0, coeffs, eps, ll, priors), lhs > rhs);
    }
    EXPECT_GT(compared, 1900);
}

TEST(DecisionRegion, ZeroLikelihoodMassGivesZeroCosts) {
    const auto coeffs = RiskCoefficients::uniform(2, 1.0, 1.0, 0.0);
    const Eigen::Vector2d ll(kNegInf, kNegInf);
    const auto costs = intermediate_costs(coeffs, Eigen::MatrixXd::Ones(2, 2), ll, Eigen::Vector2d(0.5, 0.5));
    EXPECT_TRUE(costs.isZero());
}

TEST(PredictedEstimationCosts, TraceAndSpread) {
    const auto eps = predicted_estimation_costs({scalar_moments(0.0, 2.0), scalar_moments(3.0, 5.0)});
    EXPECT_DOUBLE_EQ(eps(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(eps(0, 1), 5.0 + 9.0);
    EXPECT_DOUBLE_EQ(eps(1, 0), 2.0 + 9.0);
    EXPECT_DOUBLE_EQ(eps(1, 1), 5.0);
}

TEST(StateEstimationCost, TraceWhenEstimateMatches) {
    const auto m = scalar_moments(4.0, 1.5);
    EXPECT_DOUBLE_EQ(state_estimation_cost(m, m.mean), 1.5);
}

TEST(StateEstimationCost, ScalarPlugIn) {
    StateVec decided = StateVec::Zero();
    decided(0) = 0.5;
    EXPECT_DOUBLE_EQ(state_estimation_cost(scalar_moments(1.0, 0.5), decided), 0.75);
}

TEST(StateEstimationCost, ZeroForExactPointEstimate) {
    EXPECT_DOUBLE_EQ(state_estimation_cost(scalar_moments(2.0, 0.0), scalar_moments(2.0, 0.0).mean), 0.0);
}

TEST(CardinalityCost, IdenticalTables) {
    const std::vector<HypothesisWeight> t{{{Label{1, 0}}, {}, 0.4}, {{}, {}, 0.6}};
    EXPECT_DOUBLE_EQ(cardinality_cost(t, t), 0.0);
}

TEST(CardinalityCost, DifferenceOfMeans) {
    const Label a{1, 0};
    const Label b{1, 1};
    const std::vector<HypothesisWeight> unconditioned{{{a, b}, {}, 1.0}};
    const std::vector<HypothesisWeight> decided{{{a, b}, {}, 0.6}, {{a}, {}, 0.4}};
    EXPECT_NEAR(cardinality_cost(unconditioned, decided), 0.4, 1e-15);
}

TEST(CardinalityCost, EmptySetOnly) {
    const std::vector<HypothesisWeight> t{{{}, {}, 1.0}};
    EXPECT_DOUBLE_EQ(cardinality_cost(t, t), 0.0);
}

TEST(SelectDecision, SingleClass) {
    const auto coeffs = RiskCoefficients::uniform(1, 20.0, 1.0, 100.0);
    UpdateOutput out;
    out.tracks.push_back(summary(0.9, Eigen::VectorXd::Ones(1), {scalar_moments(0.0, 2.0)}));
    const auto set = select_decision({{0}}, {out}, 1.0, coeffs);
    EXPECT_EQ(set.decisions, std::vector<int>{0});
    EXPECT_DOUBLE_EQ(set.breakdown.classification, 0.0);
    EXPECT_NEAR(set.breakdown.estimation, 0.9 * 2.0, 1e-12);
    EXPECT_NEAR(set.breakdown.cardinality, 100.0 * 0.1, 1e-12);
    EXPECT_NEAR(set.cost, set.breakdown.total(), 1e-12);
}

TEST(SelectDecision, ClassificationCostDominance) {
    const auto coeffs = RiskCoefficients::uniform(2, 1.0, 0.0, 0.0);
    UpdateOutput out;
    out.tracks.push_back(summary(1.0, Eigen::Vector2d(1.0, 0.0), {scalar_moments(0, 1), scalar_moments(0, 1)}));
    const auto set = select_decision({{0}, {1}}, {out, out}, 1.0, coeffs);
    EXPECT_EQ(set.decisions, std::vector<int>{0});
    EXPECT_DOUBLE_EQ(set.cost, 0.0);
}

TEST(SelectDecision, MatchesHandEvaluation) {
    RiskCoefficients coeffs;
    coeffs.alpha = (Eigen::Matrix2d() << 3.0, 20.0, 15.0, 2.0).finished();
    coeffs.beta = (Eigen::Matrix2d() << 1.0, 0.5, 2.0, 1.5).finished();
    coeffs.c = (Eigen::Matrix2d() << 0.0, 1.0, 2.0, 0.0).finished();
    coeffs.gamma = 30.0;
    // Decision 0 keeps a confident track, decision 1 lowers its existence.
    UpdateOutput d0;
    d0.tracks.push_back(summary(0.8, Eigen::Vector2d(0.7, 0.3), {scalar_moments(1.0, 2.0), scalar_moments(4.0, 3.0)}));
    UpdateOutput d1;
    d1.tracks.push_back(summary(0.6, Eigen::Vector2d(0.2, 0.8), {scalar_moments(0.0, 1.0), scalar_moments(5.0, 1.0)}));

    auto hand = [&](int i, double r, double p0, double m0, double v0, double m1, double v1) {
        const double x = p0 * m0 + (1 - p0) * m1;
        const double e0 = v0 + (m0 - x) * (m0 - x);
        const double e1 = v1 + (m1 - x) * (m1 - x);
        const double own = r * ((coeffs.alpha(i, 0) * coeffs.c(i, 0) + coeffs.beta(i, 0) * e0) * p0 +
                                (coeffs.alpha(i, 1) * coeffs.c(i, 1) + coeffs.beta(i, 1) * e1) * (1 - p0));
        return own + coeffs.gamma * (0.9 - r);
    };
    const double c0 = hand(0, 0.8, 0.7, 1.0, 2.0, 4.0, 3.0);
    const double c1 = hand(1, 0.6, 0.2, 0.0, 1.0, 5.0, 1.0);
    const auto s0 = evaluate_decision({0}, d0, 0.9, coeffs);
    const auto s1 = evaluate_decision({1}, d1, 0.9, coeffs);
    EXPECT_NEAR(s0.cost, c0, 1e-10);
    EXPECT_NEAR(s1.cost, c1, 1e-10);
    const auto best = select_decision({{0}, {1}}, {d0, d1}, 0.9, coeffs);
    EXPECT_EQ(best.decisions[0], c0 <= c1 ? 0 : 1);
    EXPECT_LE(best.cost, std::min(c0, c1) + 1e-12);
}

TEST(SelectDecision, ScaleInvariant) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        RiskCoefficients coeffs = RiskCoefficients::uniform(2, 20.0 * u(rng), u(rng), 100.0 * u(rng));
        std::vector<UpdateOutput> outs(2);
        for (auto& o : outs) {
            const double p = u(rng);
            o.tracks.push_back(summary(u(rng), Eigen::Vector2d(p, 1 - p),
                                       {scalar_moments(10 * u(rng), u(rng)), scalar_moments(10 * u(rng), u(rng))}));
        }
        const auto base = select_decision({{0}, {1}}, outs, 1.0, coeffs);
        RiskCoefficients scaled = coeffs;
        scaled.alpha *= 7.5;
        scaled.beta *= 7.5;
        scaled.gamma *= 7.5;
        const auto s = select_decision({{0}, {1}}, outs, 1.0, scaled);
        EXPECT_EQ(base.decisions, s.decisions);
    }
}

TEST(SelectDecision, Errors) {
    const auto coeffs = RiskCoefficients::uniform(2, 1.0, 1.0, 1.0);
    EXPECT_THROW((void)select_decision({}, {}, 0.0, coeffs), DomainError);
    UpdateOutput out;
    out.tracks.push_back(summary(1.0, Eigen::Vector2d(0.5, 0.5), {scalar_moments(0, 1), scalar_moments(0, 1)}));
    EXPECT_THROW((void)select_decision({{0, 1}}, {out}, 0.0, coeffs), DomainError);
    EXPECT_THROW((void)select_decision({{0}}, {out, out}, 0.0, coeffs), DomainError);
}

TEST(AdviseGamma, RecoversDefaultWeight) {
    EXPECT_DOUBLE_EQ(advise_gamma(RiskCoefficients::uniform(2, 20.0, 1.0, 0.0), 60.0, 0.2), 100.0);
}

TEST(AdviseGamma, ZeroCoefficients) {
    EXPECT_DOUBLE_EQ(advise_gamma(RiskCoefficients::uniform(2, 0.0, 0.0, 0.0), 60.0, 0.5), 0.0);
}

TEST(AdviseGamma, ZeroMissExistence) {
    EXPECT_DOUBLE_EQ(advise_gamma(RiskCoefficients::uniform(2, 20.0, 1.0, 0.0), 60.0, 0.0), 80.0);
}

TEST(AdviseGamma, RejectsCertainExistence) {
    EXPECT_THROW((void)advise_gamma(RiskCoefficients::uniform(2, 1.0, 1.0, 0.0), 1.0, 1.0), DomainError);
}

} // namespace

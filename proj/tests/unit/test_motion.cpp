#include "jdtc/core/errors.hpp"
#include "jdtc/models/motion.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

namespace {

using namespace jdtc;

StateVec state(double x, double vx, double ax, double y, double vy, double ay) {
    StateVec s;
    s << x, vx, ax, y, vy, ay;
    return s;
}

ClassModelSet two_model_set() {
    ClassModelSet set;
    set.class_id = 1;
    set.models = {build_cv_model(1.0, 1.0), build_ca_model(1.0, 10.0)};
    set.switch_matrix.resize(2, 2);
    set.switch_matrix << 0.7, 0.3, 0.3, 0.7;
    set.initial_model_probs = Eigen::Vector2d(0.5, 0.5);
    return set;
}

ClassDensity point_density(const StateVec& mean, int models, const Eigen::VectorXd& probs) {
    ClassDensity cd;
    for (int m = 0; m < models; ++m) cd.models.push_back({{{1.0, mean, StateCov::Identity()}}});
    cd.model_probs = probs;
    return cd;
}

TEST(CvModel, PropagatesPosition) {
    const auto m = build_cv_model(1.0, 1.0);
    const StateVec x = m.transition * state(0, 50, 0, 700, 0, 0);
    EXPECT_TRUE(x.isApprox(state(50, 50, 0, 700, 0, 0)));
}

TEST(CvModel, ProcessNoiseBlock) {
    const auto m = build_cv_model(1.0, 1.0);
    for (int p : {0, 3}) {
        EXPECT_DOUBLE_EQ(m.process_noise(p, p), 1.0);
        EXPECT_DOUBLE_EQ(m.process_noise(p, p + 1), 1.0);
        EXPECT_DOUBLE_EQ(m.process_noise(p + 1, p), 1.0);
        EXPECT_DOUBLE_EQ(m.process_noise(p + 1, p + 1), 1.0);
        EXPECT_DOUBLE_EQ(m.process_noise(p + 2, p + 2), kCvAccelerationFloor);
    }
}

TEST(CvModel, ZeroVelocityHoldsPosition) {
    const auto m = build_cv_model(2.5, 1.0);
    const StateVec x0 = state(10, 0, 0, -4, 0, 0);
    EXPECT_TRUE((m.transition * x0).isApprox(x0));
}

TEST(CaModel, HalfATSquared) {
    const auto m = build_ca_model(1.0, 10.0);
    const StateVec x = m.transition * state(0, 0, 4, 0, 0, -3);
    EXPECT_DOUBLE_EQ(x(0), 2.0);
    EXPECT_DOUBLE_EQ(x(3), -1.5);
}

TEST(CaModel, ProcessNoiseCornerEntry) {
    const auto m = build_ca_model(1.0, 10.0);
    EXPECT_DOUBLE_EQ(m.process_noise(0, 0), 2.5);
    EXPECT_DOUBLE_EQ(m.process_noise(3, 3), 2.5);
    EXPECT_DOUBLE_EQ(m.process_noise(2, 2), 10.0);
}

TEST(CaModel, RestStateUnchanged) {
    const auto m = build_ca_model(1.0, 10.0);
    const StateVec x0 = state(3, 0, 0, 7, 0, 0);
    EXPECT_TRUE((m.transition * x0).isApprox(x0));
}

TEST(Models, NonPositivePeriodThrows) {
    EXPECT_THROW((void)build_cv_model(0.0, 1.0), DomainError);
    EXPECT_THROW((void)build_ca_model(-1.0, 1.0), DomainError);
}

TEST(Models, ProcessNoiseIsPsd) {
    for (const auto& m : {build_cv_model(1.0, 1.0), build_ca_model(1.0, 10.0), build_ca_model(0.3, 2.0)}) {
        Eigen::SelfAdjointEigenSolver<StateCov> es(m.process_noise);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
        EXPECT_TRUE(m.process_noise.isApprox(m.process_noise.transpose()));
    }
}

TEST(ClassModelSet, ValidateRejectsBadSwitchMatrix) {
    auto set = two_model_set();
    EXPECT_NO_THROW(set.validate());
    set.switch_matrix(0, 0) = 0.8;
    EXPECT_THROW(set.validate(), ConfigError);
}

TEST(PredictClassDensity, ExistenceFactorIsSurvival) {
    ClassConditionedDensity d;
    d.classes.push_back(point_density(StateVec::Zero(), 1, Eigen::VectorXd::Ones(1)));
    d.class_probs = Eigen::VectorXd::Ones(1);
    ClassModelSet set;
    set.models = {build_cv_model(1.0, 1.0)};
    set.switch_matrix = Eigen::MatrixXd::Ones(1, 1);
    set.initial_model_probs = Eigen::VectorXd::Ones(1);
    const auto out = predict_class_density(d, {set}, 0.98);
    EXPECT_DOUBLE_EQ(out.existence_factor, 0.98);
}

TEST(PredictClassDensity, ModelProbabilitiesFollowSwitchMatrix) {
    ClassConditionedDensity d;
    d.classes.push_back(point_density(StateVec::Zero(), 2, Eigen::Vector2d(1.0, 0.0)));
    d.class_probs = Eigen::VectorXd::Ones(1);
    const auto out = predict_class_density(d, {two_model_set()}, 0.98);
    EXPECT_NEAR(out.density.classes[0].model_probs(0), 0.7, 1e-15);
    EXPECT_NEAR(out.density.classes[0].model_probs(1), 0.3, 1e-15);
    EXPECT_NEAR(out.density.classes[0].models[0].total_weight(), 1.0, 1e-9);
    EXPECT_NEAR(out.density.classes[0].models[1].total_weight(), 1.0, 1e-9);
}

TEST(PredictClassDensity, IdentityDynamicsLeaveDensityUnchanged) {
    StateVec m = state(1, 2, 3, 4, 5, 6);
    ClassConditionedDensity d;
    d.classes.push_back(point_density(m, 1, Eigen::VectorXd::Ones(1)));
    d.class_probs = Eigen::VectorXd::Ones(1);
    ClassModelSet set;
    set.models = {MotionModel{}};
    set.switch_matrix = Eigen::MatrixXd::Ones(1, 1);
    set.initial_model_probs = Eigen::VectorXd::Ones(1);
    const auto out = predict_class_density(d, {set}, 1.0);
    const auto& c = out.density.classes[0].models[0].components[0];
    EXPECT_TRUE(c.mean.isApprox(m));
    EXPECT_TRUE(c.cov.isApprox(StateCov::Identity()));
}

TEST(PredictClassDensity, CovarianceGrowsMonotonically) {
    const auto cv = build_cv_model(1.0, 1.0);
    GaussianComponent c{1.0, StateVec::Zero(), 5.0 * StateCov::Identity()};
    const auto p = predict_component(c, cv);
    const StateCov diff = p.cov - cv.transition * c.cov * cv.transition.transpose();
    Eigen::SelfAdjointEigenSolver<StateCov> es(diff);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
}

TEST(PredictClassDensity, MissingModelSetThrows) {
    ClassConditionedDensity d;
    d.classes.push_back(point_density(StateVec::Zero(), 1, Eigen::VectorXd::Ones(1)));
    d.classes.push_back(point_density(StateVec::Zero(), 1, Eigen::VectorXd::Ones(1)));
    d.class_probs = Eigen::Vector2d(0.5, 0.5);
    ClassModelSet set;
    set.models = {build_cv_model(1.0, 1.0)};
    set.switch_matrix = Eigen::MatrixXd::Ones(1, 1);
    set.initial_model_probs = Eigen::VectorXd::Ones(1);
    EXPECT_THROW((void)predict_class_density(d, {set}, 0.98), ConfigError);
}

} // namespace

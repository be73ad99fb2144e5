#include "instances.hpp"
#include "oracles.hpp"

#include "jdtc/core/errors.hpp"
#include "jdtc/filter/update.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace jdtc;

ClassModels cv_classes(int J) {
    ClassModels models(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j) {
        models[static_cast<std::size_t>(j)].class_id = j;
        models[static_cast<std::size_t>(j)].models = {build_cv_model(1.0, 1.0)};
        models[static_cast<std::size_t>(j)].switch_matrix = Eigen::MatrixXd::Ones(1, 1);
        models[static_cast<std::size_t>(j)].initial_model_probs = Eigen::VectorXd::Ones(1);
    }
    return models;
}

StateVec at(double x, double y) {
    StateVec s = StateVec::Zero();
    s(state_index::x) = x;
    s(state_index::y) = y;
    return s;
}

Track make_track(Label label, double r, const StateVec& mean, const StateCov& cov,
                 const Eigen::VectorXd& prior) {
    const auto b = make_birth_component(r, mean, cov, prior, cv_classes(static_cast<int>(prior.size())));
    return {label, r, b.density};
}

SensorSuite noiseless_radar(double p_d) {
    SensorSuite s;
    s.radar.noise_cov = Eigen::Matrix2d::Identity();
    s.radar.p_d = p_d;
    s.radar.clutter_rate = 0.0;
    return s;
}

FilterParams no_gate() {
    FilterParams p;
    p.gate_probability = 1.0;
    p.k_best = 0;
    return p;
}

TEST(Predict, BirthOnlyFromEmptyPrior) {
    const auto models = cv_classes(1);
    BirthModel births;
    births.components.push_back(make_birth_component(0.02, at(0, 700), StateCov::Identity(), Eigen::VectorXd::Ones(1), models));
    const auto out = predict({}, births, 4, models, {});
    ASSERT_EQ(out.tracks.size(), 1u);
    EXPECT_DOUBLE_EQ(out.tracks[0].existence, 0.02);
    EXPECT_EQ(out.tracks[0].label, (Label{4, 0}));
}

TEST(Predict, SurvivalThinning) {
    LmbDensity prior;
    prior.tracks.push_back(make_track({1, 0}, 1.0, at(0, 700), StateCov::Identity(), Eigen::VectorXd::Ones(1)));
    const auto out = predict(prior, {}, 2, cv_classes(1), {});
    EXPECT_DOUBLE_EQ(out.tracks[0].existence, 0.98);
}

TEST(Predict, IdentityDynamicsUnchanged) {
    ClassModels models = cv_classes(1);
    models[0].models[0] = MotionModel{};
    LmbDensity prior;
    prior.tracks.push_back(make_track({1, 0}, 0.6, at(5, 900), 2 * StateCov::Identity(), Eigen::VectorXd::Ones(1)));
    FilterParams params;
    params.p_survival = 1.0;
    const auto out = predict(prior, {}, 2, models, params);
    EXPECT_DOUBLE_EQ(out.tracks[0].existence, 0.6);
    const auto& c = out.tracks[0].density.classes[0].models[0].components[0];
    EXPECT_TRUE(c.mean.isApprox(at(5, 900)));
    EXPECT_TRUE(c.cov.isApprox(2 * StateCov::Identity()));
}

TEST(Predict, DuplicateBirthLabelIsInternalError) {
    const auto models = cv_classes(1);
    LmbDensity prior;
    prior.tracks.push_back(make_track({3, 0}, 0.5, at(0, 700), StateCov::Identity(), Eigen::VectorXd::Ones(1)));
    BirthModel births;
    births.components.push_back(make_birth_component(0.02, at(0, 700), StateCov::Identity(), Eigen::VectorXd::Ones(1), models));
    EXPECT_THROW((void)predict(prior, births, 3, models, {}), std::logic_error);
}

TEST(Update, ScalarKalmanStep) {
    LmbDensity predicted;
    predicted.tracks.push_back(make_track({1, 0}, 1.0, at(0, 700), StateCov::Identity(), Eigen::VectorXd::Ones(1)));
    ScanData scan;
    scan.radar = {Eigen::Vector2d(1.0, 700.0)};
    const auto sensors = noiseless_radar(1.0);
    const auto out = update_unconditioned(predicted, scan, sensors, RiskCoefficients::uniform(1, 20, 1, 100), no_gate());
    EXPECT_NEAR(out.tracks[0].existence, 1.0, 1e-12);
    EXPECT_NEAR(out.tracks[0].estimate(state_index::x), 0.5, 1e-12);
    EXPECT_NEAR(out.tracks[0].class_moments[0].cov(0, 0), 0.5, 1e-12);
}

TEST(Update, MissedDetectionKeepsCertainTrack) {
    LmbDensity predicted;
    predicted.tracks.push_back(make_track({1, 0}, 1.0, at(0, 700), StateCov::Identity(), Eigen::VectorXd::Ones(1)));
    const auto out = update_unconditioned(predicted, ScanData{}, noiseless_radar(0.98),
                                          RiskCoefficients::uniform(1, 20, 1, 100), no_gate());
    EXPECT_NEAR(out.tracks[0].existence, 1.0, 1e-15);
}

TEST(Update, StandardBernoulliMissUpdate) {
    const double r = 0.7;
    LmbDensity predicted;
    predicted.tracks.push_back(make_track({1, 0}, r, at(0, 700), StateCov::Identity(), Eigen::VectorXd::Ones(1)));
    const auto out = update_unconditioned(predicted, ScanData{}, noiseless_radar(0.98),
                                          RiskCoefficients::uniform(1, 20, 1, 100), no_gate());
    EXPECT_NEAR(out.tracks[0].existence, r * 0.02 / (1.0 - r * 0.98), 1e-14);
}

TEST(Update, MissExistenceVariant) {
    LmbDensity predicted;
    predicted.tracks.push_back(make_track({1, 0}, 0.98, at(0, 700), StateCov::Identity(), Eigen::VectorXd::Ones(1)));
    auto params = no_gate();
    params.miss_existence_override = true;
    const auto out = update_unconditioned(predicted, ScanData{}, noiseless_radar(0.98),
                                          RiskCoefficients::uniform(1, 20, 1, 100), params);
    const double q = 0.02;
    EXPECT_NEAR(out.tracks[0].existence, 1.0 * 0.98 * q / (0.98 * q + 0.02), 1e-14);
}

TEST(Update, EsmDeclarationDrivesClassPosterior) {
    LmbDensity predicted;
    predicted.tracks.push_back(make_track({1, 0}, 1.0, at(0, 700), StateCov::Identity(), Eigen::Vector2d(0.5, 0.5)));
    SensorSuite sensors = noiseless_radar(0.98);
    sensors.esm.enabled = true;
    sensors.esm.p_d = 1.0;
    sensors.esm.clutter_rate = 0.0;
    ScanData scan;
    scan.esm = {{bearing_from(sensors.esm.position, at(0, 700)), 0}};
    const auto out = update_unconditioned(predicted, scan, sensors, RiskCoefficients::uniform(2, 20, 1, 100), no_gate());
    EXPECT_NEAR(out.tracks[0].class_probs(0), 0.9, 1e-9);
    EXPECT_NEAR(out.tracks[0].class_probs.sum(), 1.0, 1e-12);
}

TEST(Update, MatchesExhaustiveOracle) {
    std::mt19937_64 rng(77);
    FilterParams params;
    params.k_best = 0;
    for (int i = 0; i < 60; ++i) {
        const auto inst = jdtc::testing::random_micro_instance(rng);
        params.gate_probability = inst.gate ? 0.99 : 1.0;
        const std::vector<int>* dec = inst.decisions.empty() ? nullptr : &inst.decisions;
        const auto terms = compute_scan_terms(inst.predicted, inst.scan, inst.sensors, inst.coeffs, params);
        const auto out = update_with_terms(inst.predicted, terms, dec, params, true);
        const auto oracle = jdtc::testing::brute_force_update(inst.predicted, inst.scan, inst.sensors,
                                                              inst.coeffs, dec, inst.gate);
        ASSERT_EQ(out.tracks.size(), oracle.size());
        double weight_sum = 0.0;
        for (const auto& h : out.hypotheses) weight_sum += h.weight;
        EXPECT_NEAR(weight_sum, 1.0, 1e-9);
        for (std::size_t t = 0; t < oracle.size(); ++t) {
            EXPECT_NEAR(out.tracks[t].existence, oracle[t].existence, 1e-8) << "instance " << i;
            if (oracle[t].existence > 0.0) {
                EXPECT_LT((out.tracks[t].estimate - oracle[t].mean).cwiseAbs().maxCoeff(), 1e-8) << "instance " << i;
            }
            EXPECT_NEAR(out.tracks[t].class_probs.sum(), 1.0, 1e-9);
        }
        EXPECT_NO_THROW(validate(out.posterior, 1e-8));
    }
}

TEST(Update, CardinalityFirstMomentMatchesHypothesisTable) {
    std::mt19937_64 rng(78);
    FilterParams params;
    params.k_best = 0;
    for (int i = 0; i < 40; ++i) {
        const auto inst = jdtc::testing::random_micro_instance(rng);
        params.gate_probability = inst.gate ? 0.99 : 1.0;
        const auto terms = compute_scan_terms(inst.predicted, inst.scan, inst.sensors, inst.coeffs, params);
        const auto out = update_with_terms(inst.predicted, terms, nullptr, params, false);
        const auto table = out.expand_hypotheses(inst.predicted.labels());
        double mean = 0.0;
        double total = 0.0;
        for (const auto& h : table) {
            mean += static_cast<double>(h.label_set.size()) * h.weight;
            total += h.weight;
        }
        EXPECT_NEAR(total, 1.0, 1e-9);
        EXPECT_NEAR(mean, out.mean_cardinality(), 1e-8);
    }
}

TEST(Associations, OneTrackOneRadarOneEsm) {
    LmbDensity predicted;
    predicted.tracks.push_back(make_track({1, 0}, 0.9, at(0, 700), StateCov::Identity(), Eigen::Vector2d(0.5, 0.5)));
    SensorSuite sensors = noiseless_radar(0.9);
    sensors.radar.clutter_rate = 10.0;
    sensors.esm.enabled = true;
    ScanData scan;
    scan.radar = {Eigen::Vector2d(1.0, 701.0)};
    scan.esm = {{bearing_from(sensors.esm.position, at(0, 700)), 1}};
    const auto maps = enumerate_associations(predicted, scan, sensors, RiskCoefficients::uniform(2, 20, 1, 100), no_gate());
    EXPECT_EQ(maps.size(), 4u);
    std::vector<Assignment> seen;
    for (const auto& m : maps) seen.push_back(m.per_track[0]);
    for (const Assignment a : {Assignment{kMiss, kMiss}, Assignment{0, kMiss}, Assignment{kMiss, 0}, Assignment{0, 0}}) {
        EXPECT_NE(std::find(seen.begin(), seen.end(), a), seen.end());
    }
}

TEST(Associations, TwoTracksTwoMeasurementsRadarOnly) {
    LmbDensity predicted;
    predicted.tracks.push_back(make_track({1, 0}, 0.9, at(0, 700), 25 * StateCov::Identity(), Eigen::VectorXd::Ones(1)));
    predicted.tracks.push_back(make_track({1, 1}, 0.9, at(3, 703), 25 * StateCov::Identity(), Eigen::VectorXd::Ones(1)));
    SensorSuite sensors = noiseless_radar(0.9);
    sensors.radar.clutter_rate = 10.0;
    ScanData scan;
    scan.radar = {Eigen::Vector2d(1.0, 701.0), Eigen::Vector2d(2.0, 702.0)};
    const auto maps = enumerate_associations(predicted, scan, sensors, RiskCoefficients::uniform(1, 20, 1, 100), no_gate());
    EXPECT_EQ(maps.size(), 7u);
    for (const auto& m : maps) EXPECT_TRUE(m.is_injective());
}

TEST(Associations, SingleMeasurementNeverSharedAndAllMissAlwaysKept) {
    LmbDensity predicted;
    predicted.tracks.push_back(make_track({1, 0}, 0.99, at(0, 700), StateCov::Identity(), Eigen::VectorXd::Ones(1)));
    predicted.tracks.push_back(make_track({1, 1}, 0.99, at(1, 700), StateCov::Identity(), Eigen::VectorXd::Ones(1)));
    SensorSuite sensors = noiseless_radar(0.99);
    sensors.radar.clutter_rate = 1.0;
    ScanData scan;
    scan.radar = {Eigen::Vector2d(0.5, 700.0)};
    const auto coeffs = RiskCoefficients::uniform(1, 20, 1, 100);
    auto params = no_gate();
    const auto maps = enumerate_associations(predicted, scan, sensors, coeffs, params);
    EXPECT_EQ(maps.size(), 3u);
    for (const auto& m : maps) EXPECT_TRUE(m.is_injective());
    // The all-miss map takes one of the k_best slots.
    const auto terms = compute_scan_terms(predicted, scan, sensors, coeffs, params);
    const auto best = enumerate_associations(terms, nullptr, 2);
    ASSERT_EQ(best.size(), 2u);
    EXPECT_FALSE(best[0].per_track[0].is_miss() && best[0].per_track[1].is_miss());
    const bool has_all_miss = std::any_of(best.begin(), best.end(), [](const AssociationMap& m) {
        return m.per_track[0].is_miss() && m.per_track[1].is_miss();
    });
    EXPECT_TRUE(has_all_miss);
}

TEST(Update, FallbackWhenDecisionExcludesEverything) {
    LmbDensity predicted;
    Track t = make_track({1, 0}, 1.0, at(0, 700), StateCov::Identity(), Eigen::Vector2d(0.5, 0.5));
    t.density.classes[1].models[0].components[0].mean = at(300, 700);
    predicted.tracks.push_back(t);
    ScanData scan;
    scan.radar = {Eigen::Vector2d(0.0, 700.0)};
    const auto sensors = noiseless_radar(1.0);
    const auto coeffs = RiskCoefficients::uniform(2, 20, 1, 100);
    const auto inside = update_conditioned(predicted, scan, {0}, sensors, coeffs, no_gate());
    EXPECT_FALSE(inside.fallback);
    const auto outside = update_conditioned(predicted, scan, {1}, sensors, coeffs, no_gate());
    EXPECT_TRUE(outside.fallback);
    ASSERT_EQ(outside.hypotheses.size(), 1u);
    EXPECT_TRUE(outside.hypotheses[0].assoc.per_track[0].is_miss());
}

TEST(Update, DecisionVectorErrors) {
    LmbDensity predicted;
    predicted.tracks.push_back(make_track({1, 0}, 0.5, at(0, 700), StateCov::Identity(), Eigen::Vector2d(0.5, 0.5)));
    const auto sensors = noiseless_radar(0.9);
    const auto coeffs = RiskCoefficients::uniform(2, 20, 1, 100);
    EXPECT_THROW((void)update_conditioned(predicted, {}, {0, 1}, sensors, coeffs, {}), DomainError);
    EXPECT_THROW((void)update_conditioned(predicted, {}, {2}, sensors, coeffs, {}), DomainError);
    EXPECT_THROW((void)update_conditioned(predicted, {}, {-1}, sensors, coeffs, {}), DomainError);
}

TEST(Extract, ThresholdAndDecidedClass) {
    LmbDensity posterior;
    posterior.tracks.push_back(make_track({1, 0}, 0.9, at(0, 700), StateCov::Identity(), Eigen::Vector2d(0.5, 0.5)));
    posterior.tracks.push_back(make_track({1, 1}, 0.1, at(9, 700), StateCov::Identity(), Eigen::Vector2d(0.5, 0.5)));
    UpdateOutput out;
    out.tracks.resize(2);
    out.tracks[0].existence = 0.9;
    out.tracks[0].class_probs = Eigen::Vector2d(0.3, 0.7);
    out.tracks[0].estimate = at(1, 2);
    out.tracks[1].existence = 0.1;
    out.tracks[1].class_probs = Eigen::Vector2d(0.5, 0.5);
    const auto decided = extract_estimates(posterior, out, {0, 1}, 0.5);
    ASSERT_EQ(decided.size(), 1u);
    EXPECT_EQ(decided[0].declared_class, 0);
    EXPECT_TRUE(decided[0].state.isApprox(at(1, 2)));
    const auto undecided = extract_estimates(posterior, out, {}, 0.5);
    EXPECT_EQ(undecided[0].declared_class, 1);
}

TEST(Extract, ClassAveragedEstimate) {
    // P = (0.5, 0.5) with class means 0 and 2 reports the midpoint.
    LmbDensity predicted;
    Track t = make_track({1, 0}, 1.0, at(0, 700), StateCov::Identity(), Eigen::Vector2d(0.5, 0.5));
    t.density.classes[1].models[0].components[0].mean = at(2, 700);
    predicted.tracks.push_back(t);
    const auto out = update_unconditioned(predicted, ScanData{}, noiseless_radar(0.0),
                                          RiskCoefficients::uniform(2, 20, 1, 100), no_gate());
    EXPECT_NEAR(out.tracks[0].estimate(state_index::x), 1.0, 1e-12);
}

TEST(FilterParams, Validation) {
    FilterParams p;
    EXPECT_NO_THROW(p.validate());
    p.p_survival = 1.5;
    EXPECT_THROW(p.validate(), ConfigError);
    p = FilterParams{};
    p.extraction_threshold = -0.1;
    EXPECT_THROW(p.validate(), ConfigError);
}

} // namespace

#include "instances.hpp"
#include "oracles.hpp"

#include "jdtc/filter/cjde_filter.hpp"
#include "jdtc/harness/monte_carlo.hpp"
#include "jdtc/metrics/metrics.hpp"
#include "jdtc/sensing/simulate.hpp"

#include <gtest/gtest.h>

namespace {

using namespace jdtc;

TEST(CjdeLmbFilter, SingleClassMatchesPlainLmb) {
    const auto config = jdtc::testing::single_class_example1();
    const auto truth = generate_truth(config);
    CjdeLmbFilter filter(make_filter_setup(config));
    const auto& setup = filter.setup();

    jdtc::testing::PlainLmbConfig pc;
    pc.transition = setup.models[0].models[0].transition;
    pc.process_noise = setup.models[0].models[0].process_noise;
    pc.noise_cov = config.sensors.radar.noise_cov;
    pc.p_survival = config.filter.p_survival;
    pc.p_detect = config.sensors.radar.p_d;
    pc.clutter_density = config.sensors.radar.clutter_rate / config.sensors.radar.region.area();
    pc.k_best = config.filter.k_best;
    pc.existence_prune = config.filter.existence_prune;
    pc.limits = config.filter.mixture_limits;
    for (const auto& b : config.births) {
        pc.birth_existence.push_back(b.existence);
        pc.birth_density.push_back({b.mean, b.cov});
    }
    jdtc::testing::PlainLmb plain(pc);

    Rng rng(config.seed);
    for (int k = 1; k <= config.horizon; ++k) {
        const auto scan = simulate_scan(k, truth[static_cast<std::size_t>(k - 1)], config.sensors, rng);
        filter.step(scan);
        const auto& ref = plain.step(k, scan.radar);
        const auto& out = filter.last_update();
        ASSERT_EQ(ref.size(), out.tracks.size()) << "scan " << k;
        for (std::size_t t = 0; t < ref.size(); ++t) {
            ASSERT_EQ(ref[t].label, out.posterior.tracks[t].label);
            EXPECT_NEAR(ref[t].existence, out.tracks[t].existence, 1e-10) << "scan " << k;
            EXPECT_LT((ref[t].estimate - out.tracks[t].estimate).cwiseAbs().maxCoeff(), 1e-10) << "scan " << k;
        }
    }
}

TEST(CjdeLmbFilter, ClutterFreeSanity) {
    auto config = build_example1();
    config.sensors.radar.clutter_rate = 0.0;
    config.sensors.radar.noise_cov = Eigen::Matrix2d::Identity();
    const auto truth = generate_truth(config);
    CjdeLmbFilter filter(make_filter_setup(config));
    Rng rng(7);
    for (int k = 1; k <= config.horizon; ++k) {
        const auto& objects = truth[static_cast<std::size_t>(k - 1)];
        const auto scan = simulate_scan(k, objects, config.sensors, rng);
        const auto step = filter.step(scan);
        // A scan with every target detected after track initiation should be estimated closely.
        if (k < 6 || scan.radar.size() != objects.size()) continue;
        const auto s = score_scan(k, objects, step.estimates, config.ospa, JpmWeights::from(config.coeffs));
        EXPECT_EQ(s.est_n, s.true_n) << "scan " << k;
        EXPECT_LT(s.ospa, 5.0) << "scan " << k;
    }
}

TEST(CjdeLmbFilter, InvariantsHoldEveryScan) {
    const auto config = build_fusion_demo();
    const auto truth = generate_truth(config);
    CjdeLmbFilter filter(make_filter_setup(config));
    Rng rng(5);
    for (int k = 1; k <= config.horizon; ++k) {
        const auto scan = simulate_scan(k, truth[static_cast<std::size_t>(k - 1)], config.sensors, rng);
        const auto step = filter.step(scan);
        EXPECT_NO_THROW(validate(filter.posterior(), 1e-9)) << "scan " << k;
        const auto& out = filter.last_update();
        double w = 0.0;
        for (const auto& h : out.hypotheses) w += h.weight;
        EXPECT_NEAR(w, 1.0, 1e-9) << "scan " << k;
        for (const auto& t : out.tracks) {
            EXPECT_GE(t.existence, 0.0);
            EXPECT_LE(t.existence, 1.0);
            EXPECT_NEAR(t.class_probs.sum(), 1.0, 1e-9);
        }
        EXPECT_NEAR(step.decision.cost, step.decision.breakdown.total(), 1e-9);
        EXPECT_EQ(step.decision.decisions.size(), out.tracks.size());
    }
}

TEST(CjdeLmbFilter, ResetReproducesRun) {
    const auto config = build_example1();
    const auto truth = generate_truth(config);
    CjdeLmbFilter filter(make_filter_setup(config));
    auto run = [&] {
        std::vector<double> trace;
        Rng rng(12);
        for (int k = 1; k <= 12; ++k) {
            const auto scan = simulate_scan(k, truth[static_cast<std::size_t>(k - 1)], config.sensors, rng);
            for (const auto& e : filter.step(scan).estimates) trace.push_back(e.state(0));
        }
        return trace;
    };
    const auto first = run();
    filter.reset();
    EXPECT_EQ(first, run());
}

TEST(CjdeLmbFilter, ExhaustiveDecisionsNeverCostMore) {
    auto config = build_fusion_demo();
    auto exhaustive = config;
    exhaustive.filter.exhaustive_decisions = true;
    const auto truth = generate_truth(config);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CjdeLmbFilter per_track(make_filter_setup(config));
        CjdeLmbFilter joint(make_filter_setup(exhaustive));
        Rng rng(seed);
        const auto scan = simulate_scan(1, truth[0], config.sensors, rng);
        const auto a = per_track.step(scan);
        const auto b = joint.step(scan);
        EXPECT_LE(b.decision.cost, a.decision.cost + 1e-9) << "seed " << seed;
    }
}

} // namespace

#include "instances.hpp"

#include "oracles.hpp"

namespace jdtc::testing {

MicroInstance random_micro_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    std::normal_distribution<double> g(0.0, 1.0);

    MicroInstance inst;
    inst.gate = coin(rng) == 1;
    inst.sensors.radar.p_d = 0.6 + 0.39 * u01(rng);
    inst.sensors.radar.clutter_rate = 1.0 + 20.0 * u01(rng);
    inst.sensors.esm.enabled = coin(rng) == 1;
    inst.sensors.esm.p_d = 0.5 + 0.45 * u01(rng);
    inst.sensors.esm.position = Eigen::Vector2d(-300.0, 300.0);
    inst.sensors.esm.bearing_noise_var = std::pow((0.5 + 3.0 * u01(rng)) * 3.14159265358979 / 180.0, 2);
    const double p = 0.6 + 0.35 * u01(rng);
    inst.sensors.esm.confusion = (Eigen::Matrix2d() << p, 1 - p, 1 - p, p).finished();

    inst.coeffs = RiskCoefficients::uniform(2, 0.0, 0.0, 50.0);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            inst.coeffs.alpha(i, j) = 30.0 * u01(rng);
            inst.coeffs.beta(i, j) = 2.0 * u01(rng);
        }
    }

    const int n = 1 + coin(rng);
    std::vector<Eigen::Vector2d> centres;
    for (int t = 0; t < n; ++t) {
        Track tr;
        tr.label = {1, t};
        tr.existence = 0.05 + 0.9 * u01(rng);
        const double pc = 0.05 + 0.9 * u01(rng);
        tr.density.class_probs = Eigen::Vector2d(pc, 1.0 - pc);
        StateVec base;
        base << 400 + 60 * g(rng), 20 * g(rng), g(rng), 1000 + 60 * g(rng), 20 * g(rng), g(rng);
        centres.push_back(position_of(base));

        auto component = [&](double w) {
            StateVec m = base;
            for (int i = 0; i < kStateDim; ++i) m(i) += 3.0 * g(rng);
            return GaussianComponent{w, m, random_covariance(rng, 1.0, 40.0)};
        };
        ClassDensity c0;
        const double w0 = 0.2 + 0.6 * u01(rng);
        c0.models = {GaussianMixture{{component(w0), component(1.0 - w0)}}};
        c0.model_probs = Eigen::VectorXd::Ones(1);
        ClassDensity c1;
        const double mu = 0.1 + 0.8 * u01(rng);
        c1.models = {GaussianMixture{{component(1.0)}}, GaussianMixture{{component(1.0)}}};
        c1.model_probs = Eigen::Vector2d(mu, 1.0 - mu);
        tr.density.classes = {c0, c1};
        inst.predicted.tracks.push_back(std::move(tr));
    }

    const int total = std::uniform_int_distribution<int>(0, 3)(rng);
    const int num_esm = inst.sensors.esm.enabled ? std::uniform_int_distribution<int>(0, total)(rng) : 0;
    inst.scan.k = 1;
    for (int i = 0; i < total - num_esm; ++i) {
        const auto& c = centres[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, n - 1)(rng))];
        const double spread = coin(rng) == 1 ? 4.0 : 15.0;
        inst.scan.radar.emplace_back(c.x() + spread * g(rng), c.y() + spread * g(rng));
    }
    for (int i = 0; i < num_esm; ++i) {
        const auto& c = centres[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, n - 1)(rng))];
        const Eigen::Vector2d d = c - inst.sensors.esm.position;
        inst.scan.esm.push_back({std::atan2(d.y(), d.x()) + 0.03 * g(rng), coin(rng)});
    }

    if (coin(rng) == 1) {
        for (int t = 0; t < n; ++t) inst.decisions.push_back(coin(rng));
    }
    return inst;
}

ScenarioConfig single_class_example1() {
    ScenarioConfig c = build_example1();
    c.name = "example1-single-class";
    c.classes.resize(1);
    for (auto& t : c.targets) {
        t.true_class = 0;
        t.segments = {{t.birth, MotionKind::CV, {0.0, 0.0}}};
        t.initial(state_index::ax) = 0.0;
        t.initial(state_index::ay) = 0.0;
    }
    for (auto& b : c.births) b.class_prior = Eigen::VectorXd::Ones(1);
    c.coeffs = RiskCoefficients::uniform(1, 20.0, 1.0, 100.0);
    c.sensors.esm.enabled = false;
    c.sensors.esm.confusion = Eigen::MatrixXd::Ones(1, 1);
    return c;
}

} // namespace jdtc::testing

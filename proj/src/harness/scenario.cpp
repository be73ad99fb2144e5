#include "jdtc/harness/scenario.hpp"

#include "jdtc/core/errors.hpp"

#include <cmath>
#include <string>

namespace jdtc {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

bool is_stochastic_row_matrix(const Eigen::MatrixXd& m, Eigen::Index n) {
    if (m.rows() != n || m.cols() != n || m.minCoeff() < 0.0) return false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(m.row(i).sum() - 1.0) > 1e-9) return false;
    }
    return true;
}

const MotionSegment* segment_at(const TargetSpec& t, int k) {
    const MotionSegment* active = nullptr;
    for (const auto& s : t.segments) {
        if (s.start <= k) active = &s;
    }
    return active;
}

} // namespace

std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::CjdeLmb: return "cjde-lmb";
    case Algorithm::Etd: return "etd";
    case Algorithm::Dte: return "dte";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "cjde-lmb") return Algorithm::CjdeLmb;
    if (name == "etd") return Algorithm::Etd;
    if (name == "dte") return Algorithm::Dte;
    throw ConfigError("unknown algorithm '" + std::string(name) +
                      "' (expected cjde-lmb, etd or dte)");
}

void ScenarioConfig::validate() const {
    require(scan_period > 0.0 && std::isfinite(scan_period), "scan_period must be positive");
    require(horizon >= 1, "horizon must be at least one scan");
    require(!classes.empty(), "at least one class is required");
    const int J = num_classes();
    for (std::size_t j = 0; j < classes.size(); ++j) {
        const auto& c = classes[j];
        const auto M = static_cast<Eigen::Index>(c.kinds.size());
        const std::string where = "class " + std::to_string(j + 1);
        require(M >= 1, where + ": at least one motion model is required");
        require(c.noise_vars.size() == c.kinds.size(), where + ": one noise variance per model");
        for (double v : c.noise_vars) require(v >= 0.0, where + ": noise variance must be >= 0");
        require(is_stochastic_row_matrix(c.switch_matrix, M),
                where + ": switch matrix must be square row-stochastic of the model count");
        require(c.initial_model_probs.size() == M && c.initial_model_probs.minCoeff() >= 0.0 &&
                    std::abs(c.initial_model_probs.sum() - 1.0) <= 1e-9,
                where + ": initial model probabilities must be a distribution over its models");
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& t = targets[i];
        const std::string where = "target " + std::to_string(i + 1);
        require(t.birth >= 1 && t.birth < t.death && t.death <= horizon,
                where + ": need 1 <= birth < death <= horizon");
        require(t.true_class >= 0 && t.true_class < J, where + ": class out of range");
        require(t.initial.allFinite(), where + ": initial state must be finite");
        int last = t.birth - 1;
        for (const auto& s : t.segments) {
            require(s.start > last && s.start <= t.death,
                    where + ": segment starts must increase within the target's lifetime");
            require(s.acceleration.allFinite(), where + ": acceleration must be finite");
            last = s.start;
        }
    }
    for (std::size_t i = 0; i < births.size(); ++i) {
        const auto& b = births[i];
        const std::string where = "birth " + std::to_string(i + 1);
        require(b.existence >= 0.0 && b.existence <= 1.0, where + ": existence must lie in [0, 1]");
        require(b.mean.allFinite(), where + ": mean must be finite");
        require(is_valid_covariance(b.cov) && b.cov.llt().info() == Eigen::Success,
                where + ": covariance must be symmetric positive definite");
        require(b.class_prior.size() == J && b.class_prior.minCoeff() >= 0.0 &&
                    b.class_prior.sum() > 0.0,
                where + ": class prior needs one nonnegative entry per class");
    }
    coeffs.validate();
    require(coeffs.num_classes() == J, "risk coefficients must be J x J");

    const auto& radar = sensors.radar;
    require(radar.p_d >= 0.0 && radar.p_d <= 1.0, "radar p_d must lie in [0, 1]");
    require(radar.clutter_rate >= 0.0, "radar clutter rate must be >= 0");
    require(radar.noise_cov.llt().info() == Eigen::Success &&
                (radar.noise_cov - radar.noise_cov.transpose()).cwiseAbs().maxCoeff() < 1e-12,
            "radar noise covariance must be symmetric positive definite");
    require(radar.region.area() > 0.0, "radar region must have positive area");
    require(radar.max_range > 0.0, "radar max_range must be positive");
    if (sensors.esm.enabled) {
        sensors.esm.validate();
        require(sensors.esm.num_classes() == J, "ESM confusion matrix must be J x J");
        require(sensors.esm.bearing_noise_var > 0.0, "ESM bearing noise must be positive");
        require(sensors.esm.clutter_rate >= 0.0, "ESM clutter rate must be >= 0");
    }
    filter.validate();
    baseline.validate();
    require(ospa.cutoff > 0.0 && ospa.order >= 1.0, "OSPA needs cutoff > 0 and order >= 1");
    require(trials >= 1, "trials must be at least 1");
}

ScenarioConfig build_example1() {
    ScenarioConfig c;
    c.name = "example1";
    c.scan_period = 1.0;
    c.horizon = 30;

    ClassMotionSpec non_maneuvering;
    non_maneuvering.kinds = {MotionKind::CV};
    non_maneuvering.noise_vars = {1.0};
    non_maneuvering.switch_matrix = Eigen::MatrixXd::Ones(1, 1);
    non_maneuvering.initial_model_probs = Eigen::VectorXd::Ones(1);
    ClassMotionSpec maneuvering;
    maneuvering.kinds = {MotionKind::CV, MotionKind::CA};
    maneuvering.noise_vars = {1.0, 10.0};
    maneuvering.switch_matrix = (Eigen::Matrix2d() << 0.7, 0.3, 0.3, 0.7).finished();
    maneuvering.initial_model_probs = Eigen::Vector2d(0.5, 0.5);
    c.classes = {non_maneuvering, maneuvering};

    auto state = [](double x, double vx, double ax, double y, double vy, double ay) {
        StateVec s;
        s << x, vx, ax, y, vy, ay;
        return s;
    };
    c.targets.push_back({1, 30, state(-200, 50, 0, 700, 0, 0), 0, {{1, MotionKind::CV, {0, 0}}}});
    c.targets.push_back({5, 25, state(-200, 40, 0, 1000, 30, 0), 0, {{5, MotionKind::CV, {0, 0}}}});
    c.targets.push_back(
        {3, 27, state(0, 20, 4, 1900, -15, -3), 1, {{3, MotionKind::CA, {4, -3}}}});

    StateCov birth_cov = StateCov::Zero();
    birth_cov.diagonal() << 100, 10, 1, 100, 10, 1;
    const Eigen::VectorXd prior = Eigen::Vector2d(0.5, 0.5);
    c.births.push_back({0.02, state(-200, 50, 0, 700, 0, 0), birth_cov, prior});
    c.births.push_back({0.02, state(-200, 40, 0, 1000, 30, 0), birth_cov, prior});
    c.births.push_back({0.02, state(0, 20, 4, 1900, -15, -3), birth_cov, prior});

    c.coeffs = RiskCoefficients::uniform(2, 20.0, 1.0, 100.0);
    c.sensors.radar.p_d = 0.98;
    c.sensors.esm.enabled = false;
    c.filter.p_survival = 0.98;
    return c;
}

ScenarioConfig build_example2(double gamma, std::vector<std::string>* warnings) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw ConfigError("gamma must be a finite nonnegative number");
    }
    ScenarioConfig c = build_example1();
    c.name = "example2";
    c.coeffs.gamma = gamma;
    if (gamma == 0.0 && warnings != nullptr) {
        warnings->push_back("gamma = 0 removes the cardinality cost; tracks may be dropped freely");
    }
    apply_maneuver_onset(c, 2, 5);
    return c;
}

ScenarioConfig build_fusion_demo() {
    ScenarioConfig c = build_example1();
    c.name = "fusion-demo";
    c.sensors.esm.enabled = true;
    return c;
}

void apply_maneuver_onset(ScenarioConfig& config, std::size_t target, int cv_scans) {
    if (target >= config.targets.size()) throw ConfigError("maneuver onset: no such target");
    auto& t = config.targets[target];
    const Eigen::Vector2d acc(t.initial(state_index::ax), t.initial(state_index::ay));
    const int onset = t.birth + cv_scans;
    if (cv_scans < 1 || onset > t.death) {
        throw ConfigError("maneuver onset must fall within the target's lifetime");
    }
    t.initial(state_index::ax) = 0.0;
    t.initial(state_index::ay) = 0.0;
    t.segments = {{t.birth, MotionKind::CV, {0.0, 0.0}}, {onset, MotionKind::CA, acc}};
}

int maneuver_onset_scan(const ScenarioConfig& config) {
    for (const auto& t : config.targets) {
        for (std::size_t i = 1; i < t.segments.size(); ++i) {
            if (t.segments[i - 1].kind == MotionKind::CV && t.segments[i].kind == MotionKind::CA) {
                return t.segments[i].start;
            }
        }
    }
    return 0;
}

std::vector<std::vector<TruthObject>> generate_truth(const ScenarioConfig& config) {
    std::vector<std::vector<TruthObject>> truth(static_cast<std::size_t>(config.horizon));
    const double T = config.scan_period;
    for (std::size_t id = 0; id < config.targets.size(); ++id) {
        const auto& t = config.targets[id];
        // Without segments the target keeps the acceleration of its initial state.
        auto accel_at = [&](int k, const StateVec& x) -> Eigen::Vector2d {
            const MotionSegment* seg = segment_at(t, k);
            if (seg == nullptr) return {x(state_index::ax), x(state_index::ay)};
            return seg->kind == MotionKind::CA ? seg->acceleration : Eigen::Vector2d::Zero();
        };
        auto set_accel = [](StateVec& x, const Eigen::Vector2d& a) {
            x(state_index::ax) = a.x();
            x(state_index::ay) = a.y();
        };
        StateVec x = t.initial;
        set_accel(x, accel_at(t.birth, x));
        for (int k = t.birth; k <= t.death; ++k) {
            truth[static_cast<std::size_t>(k - 1)].push_back({x, t.true_class, static_cast<int>(id)});
            // Motion from k to k + 1 follows the segment active at scan k.
            const Eigen::Vector2d a = accel_at(k, x);
            x(state_index::x) += x(state_index::vx) * T + 0.5 * a.x() * T * T;
            x(state_index::y) += x(state_index::vy) * T + 0.5 * a.y() * T * T;
            x(state_index::vx) += a.x() * T;
            x(state_index::vy) += a.y() * T;
            set_accel(x, accel_at(k + 1, x));
        }
    }
    return truth;
}

ClassModels build_class_models(const ScenarioConfig& config) {
    ClassModels models;
    for (std::size_t j = 0; j < config.classes.size(); ++j) {
        const auto& spec = config.classes[j];
        ClassModelSet set;
        set.class_id = static_cast<int>(j);
        for (std::size_t m = 0; m < spec.kinds.size(); ++m) {
            set.models.push_back(spec.kinds[m] == MotionKind::CV
                                     ? build_cv_model(config.scan_period, spec.noise_vars[m])
                                     : build_ca_model(config.scan_period, spec.noise_vars[m]));
        }
        set.switch_matrix = spec.switch_matrix;
        set.initial_model_probs = spec.initial_model_probs;
        models.push_back(std::move(set));
    }
    return models;
}

} // namespace jdtc

#include "jdtc/models/motion.hpp"

#include "jdtc/core/errors.hpp"

#include <cmath>
#include <string>

namespace jdtc {

std::string_view to_string(MotionKind kind) {
    switch (kind) {
    case MotionKind::CV: return "CV";
    case MotionKind::CA: return "CA";
    }
    return "?";
}

namespace {

void require_period(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw DomainError("scan period must be positive, got " + std::to_string(T));
    }
}

} // namespace

MotionModel build_cv_model(double T, double sigma_v2) {
    require_period(T);
    MotionModel m;
    m.kind = MotionKind::CV;
    m.transition.setIdentity();
    m.process_noise.setZero();
    for (int axis = 0; axis < 2; ++axis) {
        const int p = 3 * axis;
        m.transition(p, p + 1) = T;
        m.process_noise(p, p) = sigma_v2 * T * T;
        m.process_noise(p, p + 1) = sigma_v2 * T;
        m.process_noise(p + 1, p) = sigma_v2 * T;
        m.process_noise(p + 1, p + 1) = sigma_v2;
        m.process_noise(p + 2, p + 2) = kCvAccelerationFloor;
    }
    return m;
}

MotionModel build_ca_model(double T, double sigma_a2) {
    require_period(T);
    MotionModel m;
    m.kind = MotionKind::CA;
    m.transition.setIdentity();
    m.process_noise.setZero();
    Eigen::Matrix3d f;
    f << 1, T, 0.5 * T * T, 0, 1, T, 0, 0, 1;
    Eigen::Matrix3d q;
    const double T2 = T * T;
    q << T2 * T2 / 4, T2 * T / 2, T2 / 2,
         T2 * T / 2,  T2,         T,
         T2 / 2,      T,          1;
    for (int axis = 0; axis < 2; ++axis) {
        const int p = 3 * axis;
        m.transition.block<3, 3>(p, p) = f;
        m.process_noise.block<3, 3>(p, p) = sigma_a2 * q;
    }
    return m;
}

void ClassModelSet::validate() const {
    const auto n = static_cast<Eigen::Index>(models.size());
    if (n == 0) throw ConfigError("class " + std::to_string(class_id) + " has no motion model");
    if (switch_matrix.rows() != n || switch_matrix.cols() != n) {
        throw ConfigError("class " + std::to_string(class_id) +
                          ": switch matrix must be square with side = number of models");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (switch_matrix.row(i).minCoeff() < 0.0 ||
            std::abs(switch_matrix.row(i).sum() - 1.0) > 1e-9) {
            throw ConfigError("class " + std::to_string(class_id) +
                              ": switch matrix rows must be probability vectors");
        }
    }
    if (initial_model_probs.size() != n || initial_model_probs.minCoeff() < 0.0 ||
        std::abs(initial_model_probs.sum() - 1.0) > 1e-9) {
        throw ConfigError("class " + std::to_string(class_id) +
                          ": initial model probabilities must be a probability vector");
    }
}

GaussianComponent predict_component(const GaussianComponent& c, const MotionModel& model) {
    GaussianComponent out;
    out.weight = c.weight;
    out.mean = model.transition * c.mean;
    out.cov = model.transition * c.cov * model.transition.transpose() + model.process_noise;
    symmetrize(out.cov);
    return out;
}

GaussianMixture predict_mixture(const GaussianMixture& gm, const MotionModel& model) {
    GaussianMixture out;
    out.components.reserve(gm.size());
    for (const auto& c : gm.components) out.components.push_back(predict_component(c, model));
    return out;
}

namespace {

ClassDensity predict_single_class(const ClassDensity& cd, const ClassModelSet& set,
                                  const MixtureLimits& limits) {
    const int n = set.size();
    if (static_cast<int>(cd.models.size()) != n) {
        throw ConfigError("class " + std::to_string(set.class_id) +
                          ": density holds a different number of models than its model set");
    }
    ClassDensity out;
    if (n == 1) {
        out.models.push_back(predict_mixture(cd.models.front(), set.models.front()));
        out.model_probs = cd.model_probs;
        return out;
    }

    const Eigen::VectorXd& mu = cd.model_probs;
    const Eigen::VectorXd predicted_probs = set.switch_matrix.transpose() * mu;
    out.model_probs = predicted_probs;
    out.models.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        GaussianMixture mixed;
        const double cbar = predicted_probs(j);
        for (int i = 0; i < n; ++i) {
            const double mix = cbar > 0.0 ? set.switch_matrix(i, j) * mu(i) / cbar
                                          : (i == j ? 1.0 : 0.0);
            if (mix <= 0.0) continue;
            for (const auto& c : cd.models[static_cast<std::size_t>(i)].components) {
                GaussianComponent scaled = c;
                scaled.weight *= mix;
                mixed.components.push_back(std::move(scaled));
            }
        }
        mixed = prune_and_merge(mixed, limits);
        out.models[static_cast<std::size_t>(j)] = predict_mixture(mixed, set.models[static_cast<std::size_t>(j)]);
    }
    const double total = out.model_probs.sum();
    if (total > 0.0) out.model_probs /= total;
    return out;
}

} // namespace

PredictedClassDensity predict_class_density(const ClassConditionedDensity& d,
                                            const ClassModels& models, double p_s,
                                            const MixtureLimits& limits) {
    if (models.size() < d.classes.size()) {
        throw ConfigError("predict_class_density: missing model set for class " +
                          std::to_string(models.size()));
    }
    PredictedClassDensity out;
    out.existence_factor = p_s;
    out.density.class_probs = d.class_probs;
    out.density.classes.reserve(d.classes.size());
    for (std::size_t j = 0; j < d.classes.size(); ++j) {
        out.density.classes.push_back(predict_single_class(d.classes[j], models[j], limits));
    }
    return out;
}

} // namespace jdtc

#include "jdtc/baselines/gnn.hpp"

#include "jdtc/assoc/assignment.hpp"
#include "jdtc/core/errors.hpp"
#include "jdtc/core/numeric.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <bit>
#include <cmath>
#include <string>

namespace jdtc {

namespace {

bool same_model(const MotionModel& a, const MotionModel& b) {
    return a.kind == b.kind && a.transition == b.transition && a.process_noise == b.process_noise;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

Moments predict_moments(const Moments& m, const MotionModel& model) {
    Moments out;
    out.mean = model.transition * m.mean;
    out.cov = model.transition * m.cov * model.transition.transpose() + model.process_noise;
    symmetrize(out.cov);
    return out;
}

std::vector<MotionModel> models_of(const std::vector<int>& ids, const UnionModels& u) {
    std::vector<MotionModel> out;
    for (int id : ids) out.push_back(u.models[static_cast<std::size_t>(id)]);
    return out;
}

Moments measurement_prior(const Eigen::Vector2d& z, const BaselineContext& ctx) {
    const auto& radar = ctx.radar;
    const auto& p = ctx.params;
    Moments m;
    double pos_var = 0.0;
    if (radar.mode == RadarMode::LinearPosition) {
        m.mean(state_index::x) = z.x();
        m.mean(state_index::y) = z.y();
        pos_var = radar.noise_cov.diagonal().maxCoeff();
    } else {
        m.mean(state_index::x) = radar.position.x() + z(0) * std::cos(z(1));
        m.mean(state_index::y) = radar.position.y() + z(0) * std::sin(z(1));
        pos_var = radar.noise_cov(0, 0) + z(0) * z(0) * radar.noise_cov(1, 1);
    }
    const double v2 = p.init_velocity_std * p.init_velocity_std;
    const double a2 = p.init_acceleration_std * p.init_acceleration_std;
    m.cov.diagonal() << pos_var, v2, a2, pos_var, v2, a2;
    return m;
}

/// Squared Mahalanobis distance of z to a state's predicted measurement.
double measurement_distance(const Moments& m, const Eigen::Vector2d& z, const RadarModel& radar) {
    const auto mp = predict_radar(radar, m.mean);
    Eigen::MatrixXd S = mp.H * m.cov * mp.H.transpose() + mp.R;
    symmetrize(S);
    return mahalanobis_squared(innovation(z, mp), S);
}

Moments kalman_moments(const Moments& m, const Eigen::Vector2d& z, const RadarModel& radar) {
    const ImmPrediction single{{m}, Eigen::VectorXd::Ones(1)};
    return imm_update(single, z, radar).states.front();
}

GnnTrack new_track(int id, const Moments& m, const BaselineContext& ctx, BaselineKind kind) {
    GnnTrack t;
    t.id = id;
    const int J = ctx.coeffs.num_classes();
    t.class_belief = Eigen::VectorXd::Constant(J, 1.0 / J);
    const auto& u = ctx.union_models;
    if (kind == BaselineKind::Etd) {
        for (int i = 0; i < u.size(); ++i) t.model_ids.push_back(i);
        t.model_probs = u.initial_model_probs;
        t.decided_class = dte_decide(ctx.coeffs, Eigen::VectorXd::Ones(J), t.class_belief);
    } else {
        t.decided_class = dte_decide(ctx.coeffs, Eigen::VectorXd::Ones(J), t.class_belief);
        t.model_ids = u.class_members[static_cast<std::size_t>(t.decided_class)];
        t.model_probs = ctx.models[static_cast<std::size_t>(t.decided_class)].initial_model_probs;
    }
    t.states.assign(t.model_ids.size(), m);
    t.age = 1;
    t.hit_history = 1;
    return t;
}

/// Likelihood of z under class j restarted from the track's combined state.
ImmUpdate class_restart_update(const Moments& prior, int cls, const Eigen::Vector2d& z,
                               const BaselineContext& ctx) {
    const auto& set = ctx.models[static_cast<std::size_t>(cls)];
    const std::vector<Moments> states(static_cast<std::size_t>(set.size()), prior);
    const auto pred = imm_predict(states, set.initial_model_probs, set.models, set.switch_matrix);
    return imm_update(pred, z, ctx.radar);
}

void baseline_step(GnnTrackSet& set, const ScanData& scan, const BaselineContext& ctx,
                   BaselineKind kind) {
    const auto& u = ctx.union_models;
    const auto& radar = ctx.radar;
    const int J = ctx.coeffs.num_classes();
    const std::size_t n = set.tracks.size();
    const auto m = static_cast<Eigen::Index>(scan.radar.size());

    std::vector<ImmPrediction> preds;
    preds.reserve(n);
    Eigen::MatrixXd distances(static_cast<Eigen::Index>(n), m);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& tr = set.tracks[t];
        const Eigen::MatrixXd& pi =
            kind == BaselineKind::Etd
                ? u.switch_matrix
                : ctx.models[static_cast<std::size_t>(tr.decided_class)].switch_matrix;
        preds.push_back(imm_predict(tr.states, tr.model_probs, models_of(tr.model_ids, u), pi));
        const Moments pm = combine_moments(to_vector(preds.back().model_probs), preds.back().states);
        for (Eigen::Index a = 0; a < m; ++a) {
            distances(static_cast<Eigen::Index>(t), a) =
                measurement_distance(pm, scan.radar[static_cast<std::size_t>(a)], radar);
        }
    }
    const double gate =
        boost::math::quantile(boost::math::chi_squared(2.0), ctx.params.gate_probability);
    const auto assign = gnn_assign(distances, gate);

    std::vector<bool> used(static_cast<std::size_t>(m), false);
    for (std::size_t t = 0; t < n; ++t) {
        auto& tr = set.tracks[t];
        const auto& pred = preds[t];
        ++tr.age;
        tr.hit_history <<= 1;
        if (assign[t] == kMiss) {
            tr.states = pred.states;
            tr.model_probs = pred.model_probs;
            ++tr.miss_streak;
            continue;
        }
        used[static_cast<std::size_t>(assign[t])] = true;
        tr.hit_history |= 1U;
        tr.miss_streak = 0;
        const Eigen::Vector2d& z = scan.radar[static_cast<std::size_t>(assign[t])];

        if (kind == BaselineKind::Etd) {
            const auto up = imm_update(pred, z, radar);
            Eigen::VectorXd L(J);
            for (int j = 0; j < J; ++j) {
                double num = 0.0;
                double den = 0.0;
                for (int id : u.class_members[static_cast<std::size_t>(j)]) {
                    num += pred.model_probs(id) * up.likelihoods(id);
                    den += pred.model_probs(id);
                }
                L(j) = den > 0.0 ? num / den : 0.0;
            }
            const Eigen::VectorXd prior = ctx.params.etd_recursive
                                              ? tr.class_belief
                                              : Eigen::VectorXd::Constant(J, 1.0 / J);
            const Eigen::VectorXd post = L.cwiseProduct(prior);
            if (post.sum() > 0.0) tr.class_belief = post / post.sum();
            tr.decided_class = dte_decide(ctx.coeffs, Eigen::VectorXd::Ones(J), tr.class_belief);
            tr.states = up.states;
            tr.model_probs = up.model_probs;
            continue;
        }

        const Moments prior_state = tr.combined();
        std::vector<ImmUpdate> updates(static_cast<std::size_t>(J));
        Eigen::VectorXd L(J);
        for (int j = 0; j < J; ++j) {
            updates[static_cast<std::size_t>(j)] = j == tr.decided_class
                                                       ? imm_update(pred, z, radar)
                                                       : class_restart_update(prior_state, j, z, ctx);
            L(j) = updates[static_cast<std::size_t>(j)].likelihood;
        }
        const int decision = dte_decide(ctx.coeffs, L, tr.class_belief);
        const Eigen::VectorXd post = L.cwiseProduct(tr.class_belief);
        if (post.sum() > 0.0) tr.class_belief = post / post.sum();
        auto& chosen = updates[static_cast<std::size_t>(decision)];
        tr.decided_class = decision;
        tr.model_ids = u.class_members[static_cast<std::size_t>(decision)];
        tr.states = std::move(chosen.states);
        tr.model_probs = std::move(chosen.model_probs);
    }

    const unsigned window_mask = (1U << ctx.params.confirm_window) - 1U;
    for (auto& tr : set.tracks) {
        if (!tr.confirmed &&
            std::popcount(tr.hit_history & window_mask) >= ctx.params.confirm_hits) {
            tr.confirmed = true;
        }
    }
    std::erase_if(set.tracks, [&](const GnnTrack& tr) {
        if (tr.confirmed) return tr.miss_streak >= ctx.params.max_misses;
        return tr.age >= ctx.params.confirm_window;
    });
    if (!ctx.params.birth_gated_initiation) {
        for (Eigen::Index a = 0; a < m; ++a) {
            if (used[static_cast<std::size_t>(a)]) continue;
            const auto& z = scan.radar[static_cast<std::size_t>(a)];
            set.tracks.push_back(new_track(set.next_id++, measurement_prior(z, ctx), ctx, kind));
        }
        return;
    }
    // Each birth component starts at most one track from its nearest free measurement.
    for (const auto& birth : ctx.births) {
        int best = kMiss;
        double best_d2 = gate;
        for (Eigen::Index a = 0; a < m; ++a) {
            if (used[static_cast<std::size_t>(a)]) continue;
            const double d2 =
                measurement_distance(birth, scan.radar[static_cast<std::size_t>(a)], radar);
            if (d2 <= best_d2) {
                best_d2 = d2;
                best = static_cast<int>(a);
            }
        }
        if (best == kMiss) continue;
        used[static_cast<std::size_t>(best)] = true;
        const auto& z = scan.radar[static_cast<std::size_t>(best)];
        set.tracks.push_back(new_track(set.next_id++, kalman_moments(birth, z, radar), ctx, kind));
    }
}

} // namespace

UnionModels build_union_models(const ClassModels& models) {
    UnionModels u;
    for (const auto& set : models) {
        std::vector<int> members;
        for (const auto& model : set.models) {
            int idx = -1;
            for (std::size_t i = 0; i < u.models.size(); ++i) {
                if (same_model(u.models[i], model)) idx = static_cast<int>(i);
            }
            if (idx < 0) {
                idx = static_cast<int>(u.models.size());
                u.models.push_back(model);
            }
            members.push_back(idx);
        }
        u.class_members.push_back(std::move(members));
    }
    const int M = u.size();
    for (std::size_t j = 0; j < models.size(); ++j) {
        const auto& members = u.class_members[j];
        if (static_cast<int>(members.size()) != M) continue;
        u.switch_matrix = Eigen::MatrixXd::Zero(M, M);
        u.initial_model_probs = Eigen::VectorXd::Zero(M);
        for (int a = 0; a < M; ++a) {
            u.initial_model_probs(members[static_cast<std::size_t>(a)]) =
                models[j].initial_model_probs(a);
            for (int b = 0; b < M; ++b) {
                u.switch_matrix(members[static_cast<std::size_t>(a)],
                                members[static_cast<std::size_t>(b)]) = models[j].switch_matrix(a, b);
            }
        }
        return u;
    }
    if (M == 1) {
        u.switch_matrix = Eigen::MatrixXd::Ones(1, 1);
    } else {
        u.switch_matrix = Eigen::MatrixXd::Constant(M, M, 0.1 / (M - 1));
        u.switch_matrix.diagonal().setConstant(0.9);
    }
    u.initial_model_probs = Eigen::VectorXd::Constant(M, 1.0 / M);
    return u;
}

void GnnParams::validate() const {
    if (!(gate_probability > 0.0 && gate_probability < 1.0)) {
        throw ConfigError("baseline gate probability must lie in (0, 1)");
    }
    if (confirm_window < 1 || confirm_window > 16 || confirm_hits < 1 ||
        confirm_hits > confirm_window) {
        throw ConfigError("baseline confirmation needs 1 <= M <= N <= 16");
    }
    if (max_misses < 1) throw ConfigError("baseline deletion needs at least one miss");
    if (!(init_velocity_std > 0.0) || !(init_acceleration_std > 0.0)) {
        throw ConfigError("baseline initial standard deviations must be positive");
    }
}

Moments GnnTrack::combined() const { return combine_moments(to_vector(model_probs), states); }

ImmPrediction imm_predict(const std::vector<Moments>& states, const Eigen::VectorXd& model_probs,
                          const std::vector<MotionModel>& models,
                          const Eigen::MatrixXd& switch_matrix) {
    const auto M = static_cast<Eigen::Index>(models.size());
    if (static_cast<Eigen::Index>(states.size()) != M || model_probs.size() != M ||
        switch_matrix.rows() != M || switch_matrix.cols() != M) {
        throw DomainError("imm_predict: model count mismatch");
    }
    ImmPrediction out;
    out.model_probs = switch_matrix.transpose() * model_probs;
    for (Eigen::Index j = 0; j < M; ++j) {
        Moments mixed = states[static_cast<std::size_t>(j)];
        if (out.model_probs(j) > 0.0) {
            std::vector<double> w(static_cast<std::size_t>(M));
            for (Eigen::Index i = 0; i < M; ++i) {
                w[static_cast<std::size_t>(i)] = switch_matrix(i, j) * model_probs(i);
            }
            mixed = combine_moments(w, states);
        }
        out.states.push_back(predict_moments(mixed, models[static_cast<std::size_t>(j)]));
    }
    const double total = out.model_probs.sum();
    if (total > 0.0) out.model_probs /= total;
    return out;
}

ImmUpdate imm_update(const ImmPrediction& pred, const Eigen::Vector2d& z, const RadarModel& radar) {
    const auto M = static_cast<Eigen::Index>(pred.states.size());
    ImmUpdate out;
    out.likelihoods.resize(M);
    out.model_probs.resize(M);
    for (Eigen::Index j = 0; j < M; ++j) {
        const auto& s = pred.states[static_cast<std::size_t>(j)];
        const auto mp = predict_radar(radar, s.mean);
        const Eigen::VectorXd nu = innovation(z, mp);
        const Eigen::MatrixXd PHt = s.cov * mp.H.transpose();
        Eigen::MatrixXd S = mp.H * PHt + mp.R;
        symmetrize(S);
        const Eigen::MatrixXd K = S.llt().solve(PHt.transpose()).transpose();
        Moments up;
        up.mean = s.mean + K * nu;
        const StateCov IKH = StateCov::Identity() - K * mp.H;
        up.cov = IKH * s.cov * IKH.transpose() + K * mp.R * K.transpose();
        symmetrize(up.cov);
        out.states.push_back(up);
        out.likelihoods(j) = std::exp(log_normal_density(nu, S));
        out.model_probs(j) = pred.model_probs(j) * out.likelihoods(j);
    }
    out.likelihood = out.model_probs.sum();
    if (out.likelihood > 0.0) {
        out.model_probs /= out.likelihood;
    } else {
        out.model_probs = pred.model_probs;
    }
    return out;
}

std::vector<int> gnn_assign(const Eigen::MatrixXd& distances, double gate) {
    const auto n = distances.rows();
    const auto m = distances.cols();
    std::vector<int> out(static_cast<std::size_t>(n), kMiss);
    if (n == 0) return out;
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(n, m + n, kInf);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index a = 0; a < m; ++a) {
            if (distances(i, a) <= gate) cost(i, a) = distances(i, a);
        }
        cost(i, m + i) = gate;
    }
    AssignmentSolution sol;
    if (!solve_assignment(cost, sol)) return out;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int col = sol.row_to_col[static_cast<std::size_t>(i)];
        if (col < m) out[static_cast<std::size_t>(i)] = col;
    }
    return out;
}

int dte_decide(const RiskCoefficients& coeffs, const Eigen::VectorXd& likelihoods,
               const Eigen::VectorXd& priors) {
    const Eigen::VectorXd joint = likelihoods.cwiseProduct(priors);
    const Eigen::VectorXd risk = coeffs.alpha.cwiseProduct(coeffs.c) * joint;
    int best = 0;
    for (Eigen::Index i = 1; i < risk.size(); ++i) {
        if (risk(i) < risk(best)) best = static_cast<int>(i);
    }
    return best;
}

BaselineContext make_baseline_context(const ClassModels& models, const RadarModel& radar,
                                      const RiskCoefficients& coeffs, const GnnParams& params,
                                      std::vector<Moments> births) {
    params.validate();
    coeffs.validate();
    if (static_cast<int>(models.size()) != coeffs.num_classes()) {
        throw ConfigError("baseline: motion models and risk coefficients disagree on the class count");
    }
    if (params.birth_gated_initiation && births.empty()) {
        throw ConfigError("baseline: birth-gated initiation needs at least one birth component");
    }
    return {models, build_union_models(models), radar, coeffs, params, std::move(births)};
}

void etd_step(GnnTrackSet& set, const ScanData& scan, const BaselineContext& ctx) {
    baseline_step(set, scan, ctx, BaselineKind::Etd);
}

void dte_step(GnnTrackSet& set, const ScanData& scan, const BaselineContext& ctx) {
    baseline_step(set, scan, ctx, BaselineKind::Dte);
}

std::vector<TrackEstimate> baseline_estimates(const GnnTrackSet& set) {
    std::vector<TrackEstimate> out;
    for (const auto& tr : set.tracks) {
        if (!tr.confirmed) continue;
        TrackEstimate e;
        e.label = {tr.id, 0};
        e.existence = 1.0;
        e.state = tr.combined().mean;
        e.declared_class = tr.decided_class;
        e.class_probs = tr.class_belief;
        out.push_back(std::move(e));
    }
    return out;
}

GnnTracker::GnnTracker(BaselineKind kind, BaselineContext ctx) : kind_(kind), ctx_(std::move(ctx)) {}

std::vector<TrackEstimate> GnnTracker::step(const ScanData& scan) {
    baseline_step(set_, scan, ctx_, kind_);
    return baseline_estimates(set_);
}

} // namespace jdtc

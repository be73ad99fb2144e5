#include "jdtc/filter/update.hpp"

#include "jdtc/assoc/assignment.hpp"
#include "jdtc/core/errors.hpp"
#include "jdtc/core/numeric.hpp"
#include "jdtc/risk/region.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace jdtc {

namespace {

double gate_threshold(double probability, int dim) {
    if (!(probability > 0.0 && probability < 1.0)) return kInf;
    const boost::math::chi_squared dist(dim);
    return boost::math::quantile(dist, probability);
}

struct KalmanResult {
    StateVec mean;
    StateCov cov;
    double log_q = kNegInf;
};

KalmanResult kalman_update(const GaussianComponent& c, const Eigen::VectorXd& z,
                           const MeasurementPrediction& pred) {
    KalmanResult out{c.mean, c.cov, kNegInf};
    const Eigen::VectorXd nu = innovation(z, pred);
    const Eigen::MatrixXd PHt = c.cov * pred.H.transpose();
    Eigen::MatrixXd S = pred.H * PHt + pred.R;
    symmetrize(S);
    const Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) return out;
    const Eigen::MatrixXd K = llt.solve(PHt.transpose()).transpose();
    out.mean = c.mean + K * nu;
    const StateCov IKH = StateCov::Identity() - K * pred.H;
    out.cov = IKH * c.cov * IKH.transpose() + K * pred.R * K.transpose();
    symmetrize(out.cov);
    out.log_q = log_normal_density(nu, S);
    return out;
}

/// Measurement prediction and stacked measurement vector for one pair at state x.
std::optional<MeasurementPrediction> pair_prediction(const Assignment& s, const StateVec& x,
                                                     const SensorSuite& sensors) {
    if (s.is_miss()) return std::nullopt;
    if (s.esm == kMiss) return predict_radar(sensors.radar, x);
    if (s.radar == kMiss) return predict_esm(sensors.esm, x);
    return stack(predict_radar(sensors.radar, x), predict_esm(sensors.esm, x));
}

Eigen::VectorXd pair_measurement(const Assignment& s, const ScanData& scan) {
    const int dim = (s.radar != kMiss ? 2 : 0) + (s.esm != kMiss ? 1 : 0);
    Eigen::VectorXd z(dim);
    int row = 0;
    if (s.radar != kMiss) {
        z.segment<2>(0) = scan.radar[static_cast<std::size_t>(s.radar)];
        row = 2;
    }
    if (s.esm != kMiss) z(row) = scan.esm[static_cast<std::size_t>(s.esm)].bearing;
    return z;
}

PairTerms compute_pair(const Track& track, const Assignment& s, const ScanData& scan,
                       const SensorSuite& sensors, const RiskCoefficients& coeffs,
                       const Eigen::MatrixXd& eps) {
    const auto& density = track.density;
    const int J = density.num_classes();
    PairTerms p;
    p.pair = s;
    p.log_eta_class.resize(J);
    p.classes.resize(static_cast<std::size_t>(J));
    p.class_moments.resize(static_cast<std::size_t>(J));

    const Eigen::VectorXd z = pair_measurement(s, scan);
    const auto& radar = sensors.radar;
    const auto& esm = sensors.esm;
    const double radar_factor = s.radar != kMiss
                                    ? safe_log(radar.p_d) - std::log(radar.clutter_density())
                                    : safe_log(1.0 - radar.p_d);

    for (int j = 0; j < J; ++j) {
        const auto& cd = density.classes[static_cast<std::size_t>(j)];
        double factor = radar_factor;
        if (esm.enabled) {
            if (s.esm != kMiss) {
                const int declared = scan.esm[static_cast<std::size_t>(s.esm)].declared_class;
                factor += safe_log(esm.p_d) + safe_log(esm.confusion(j, declared)) -
                          std::log(esm.clutter_density());
            } else {
                factor += safe_log(1.0 - esm.p_d);
            }
        }

        ClassDensity out;
        out.models.resize(cd.models.size());
        out.model_probs = cd.model_probs;
        std::vector<double> log_model_mass(cd.models.size(), kNegInf);
        for (std::size_t m = 0; m < cd.models.size(); ++m) {
            const auto& gm = cd.models[m];
            std::vector<double> log_w(gm.size());
            auto& comps = out.models[m].components;
            comps.resize(gm.size());
            for (std::size_t c = 0; c < gm.size(); ++c) {
                const auto& comp = gm.components[c];
                if (s.is_miss()) {
                    comps[c] = comp;
                    log_w[c] = safe_log(comp.weight);
                    continue;
                }
                const auto pred = *pair_prediction(s, comp.mean, sensors);
                const KalmanResult kr = kalman_update(comp, z, pred);
                comps[c] = {0.0, kr.mean, kr.cov};
                log_w[c] = safe_log(comp.weight) + kr.log_q;
            }
            const double lse = log_sum_exp(log_w);
            log_model_mass[m] = safe_log(cd.model_probs(static_cast<Eigen::Index>(m))) + lse;
            if (lse == kNegInf) {
                out.models[m] = gm;  // zero-likelihood model keeps its predicted shape
            } else {
                for (std::size_t c = 0; c < comps.size(); ++c) {
                    comps[c].weight = std::exp(log_w[c] - lse);
                }
            }
        }
        const double log_class = log_sum_exp(log_model_mass);
        if (log_class != kNegInf) {
            for (std::size_t m = 0; m < cd.models.size(); ++m) {
                out.model_probs(static_cast<Eigen::Index>(m)) =
                    std::exp(log_model_mass[m] - log_class);
            }
        }
        p.log_eta_class(j) = factor + log_class;
        p.class_moments[static_cast<std::size_t>(j)] = class_moments(out);
        p.classes[static_cast<std::size_t>(j)] = std::move(out);
    }

    Eigen::VectorXd log_joint(J);
    for (int j = 0; j < J; ++j) log_joint(j) = p.log_eta_class(j) + safe_log(density.class_probs(j));
    p.log_eta = log_sum_exp({log_joint.data(), static_cast<std::size_t>(J)});
    if (p.log_eta == kNegInf) {
        p.class_post = density.class_probs;
    } else {
        p.class_post = (log_joint.array() - p.log_eta).exp().matrix();
    }
    p.region = s.is_miss() ? kUnconditioned
                           : decision_region(coeffs, eps, p.log_eta_class, density.class_probs);
    return p;
}

double miss_log_term(double r, double log_eta_miss) {
    return log_add(safe_log(1.0 - r), safe_log(r) + log_eta_miss);
}

int decision_of(const std::vector<int>* decisions, std::size_t t) {
    return decisions == nullptr ? kUnconditioned : (*decisions)[t];
}

/// Ranked single-sensor assignments: per track the assigned measurement index
/// (kMiss when missed) and the approximate log score of the assignment.
struct SideSolution {
    std::vector<int> assign;
    double score = 0.0;
};

std::vector<SideSolution> rank_side(const ScanTerms& terms, const std::vector<int>* decisions,
                                    const std::vector<std::size_t>& active, bool radar_side,
                                    int k_best) {
    const std::size_t n = terms.tracks.size();
    const int num_meas = radar_side ? terms.num_radar : terms.num_esm;
    const int num_other = radar_side ? terms.num_esm : terms.num_radar;
    if (num_meas == 0 || active.empty()) return {SideSolution{std::vector<int>(n, kMiss), 0.0}};

    const auto rows = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(rows, num_meas + rows, kInf);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const std::size_t t = active[static_cast<std::size_t>(i)];
        const auto& tt = terms.tracks[t];
        const int decision = decision_of(decisions, t);
        const double log_r = safe_log(tt.existence);
        const double log_eta_miss = tt.pairs[0].log_eta;
        auto lookup = [&](int meas, int other) -> const PairTerms* {
            const Assignment a = radar_side ? Assignment{meas, other} : Assignment{other, meas};
            const int idx = tt.pair_index[static_cast<std::size_t>(terms.pair_slot(a))];
            return idx < 0 ? nullptr : &tt.pairs[static_cast<std::size_t>(idx)];
        };
        for (int meas = 0; meas < num_meas; ++meas) {
            double best = kNegInf;
            for (int other = kMiss; other < num_other; ++other) {
                const PairTerms* p = lookup(meas, other);
                if (p == nullptr || !pair_allowed(*p, decision) || p->log_eta == kNegInf) continue;
                double score = p->log_eta;
                if (other != kMiss) {
                    // Remove the other sensor's own gain so the two sides rank independently.
                    const PairTerms* single = lookup(kMiss, other);
                    if (single != nullptr) score -= single->log_eta - log_eta_miss;
                }
                best = std::max(best, score);
            }
            if (best != kNegInf) cost(i, meas) = -(log_r + best);
        }
        cost(i, num_meas + i) = -miss_log_term(tt.existence, log_eta_miss);
    }

    std::vector<SideSolution> out;
    for (const auto& sol : murty_k_best(cost, k_best)) {
        SideSolution side{std::vector<int>(n, kMiss), -sol.cost};
        for (Eigen::Index i = 0; i < rows; ++i) {
            const int col = sol.row_to_col[static_cast<std::size_t>(i)];
            if (col < num_meas) side.assign[active[static_cast<std::size_t>(i)]] = col;
        }
        out.push_back(std::move(side));
    }
    if (out.empty()) out.push_back(SideSolution{std::vector<int>(n, kMiss), 0.0});
    return out;
}

std::vector<double> normalized_weights(const std::vector<double>& log_w) {
    const double lse = log_sum_exp(log_w);
    std::vector<double> w(log_w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_w[i] - lse);
    return w;
}

} // namespace

void FilterParams::validate() const {
    if (!(p_survival > 0.0 && p_survival <= 1.0)) {
        throw ConfigError("survival probability must lie in (0, 1]");
    }
    if (!(existence_prune >= 0.0 && existence_prune < 1.0)) {
        throw ConfigError("existence prune threshold must lie in [0, 1)");
    }
    if (!(extraction_threshold >= 0.0 && extraction_threshold <= 1.0)) {
        throw ConfigError("extraction threshold must lie in [0, 1]");
    }
    if (mixture_limits.max_components < 1 || mixture_limits.merge_distance < 0.0 ||
        mixture_limits.prune_threshold < 0.0) {
        throw ConfigError("mixture limits must be nonnegative with at least one component");
    }
}

BirthComponent make_birth_component(double existence, const StateVec& mean, const StateCov& cov,
                                    const Eigen::VectorXd& class_prior,
                                    const ClassModels& models) {
    if (class_prior.size() != static_cast<Eigen::Index>(models.size())) {
        throw ConfigError("birth class prior has " + std::to_string(class_prior.size()) +
                          " entries for " + std::to_string(models.size()) + " classes");
    }
    if (class_prior.minCoeff() < 0.0 || class_prior.sum() <= 0.0) {
        throw ConfigError("birth class prior must be nonnegative with positive mass");
    }
    BirthComponent b;
    b.existence = existence;
    b.density.class_probs = class_prior / class_prior.sum();
    for (const auto& set : models) {
        ClassDensity cd;
        cd.model_probs = set.initial_model_probs;
        cd.models.assign(static_cast<std::size_t>(set.size()),
                         GaussianMixture{{GaussianComponent{1.0, mean, cov}}});
        b.density.classes.push_back(std::move(cd));
    }
    return b;
}

LmbDensity predict(const LmbDensity& prior, const BirthModel& births, int k,
                   const ClassModels& models, const FilterParams& params) {
    LmbDensity out;
    out.tracks.reserve(prior.tracks.size() + births.components.size());
    for (const auto& tr : prior.tracks) {
        auto p = predict_class_density(tr.density, models, params.p_survival,
                                       params.mixture_limits);
        out.tracks.push_back({tr.label, tr.existence * p.existence_factor, std::move(p.density)});
    }
    for (std::size_t i = 0; i < births.components.size(); ++i) {
        const Label label{k, static_cast<int>(i)};
        if (out.find(label)) {
            throw std::logic_error("birth label (" + std::to_string(k) + ", " +
                                   std::to_string(i) + ") already exists");
        }
        out.tracks.push_back({label, births.components[i].existence, births.components[i].density});
    }
    return out;
}

ScanTerms compute_scan_terms(const LmbDensity& predicted, const ScanData& scan,
                             const SensorSuite& sensors, const RiskCoefficients& coeffs,
                             const FilterParams& params) {
    ScanTerms terms;
    terms.k = scan.k;
    terms.num_radar = static_cast<int>(scan.radar.size());
    terms.num_esm = sensors.esm.enabled ? static_cast<int>(scan.esm.size()) : 0;
    terms.miss_probability = 1.0 - sensors.radar.p_d;
    if (sensors.esm.enabled) terms.miss_probability *= 1.0 - sensors.esm.p_d;

    const int J = coeffs.num_classes();
    if (sensors.esm.enabled) {
        if (sensors.esm.num_classes() != J) {
            throw ConfigError("ESM confusion matrix has " +
                              std::to_string(sensors.esm.num_classes()) + " classes, expected " +
                              std::to_string(J));
        }
        for (const auto& m : scan.esm) {
            if (m.declared_class < 0 || m.declared_class >= J) {
                throw DomainError("ESM declaration " + std::to_string(m.declared_class) +
                                  " outside the class range");
            }
        }
    }
    const double gate_radar = gate_threshold(params.gate_probability, 2);
    const double gate_esm = gate_threshold(params.gate_probability, 1);
    const std::size_t slots =
        static_cast<std::size_t>(terms.num_radar + 1) * static_cast<std::size_t>(terms.num_esm + 1);

    for (const auto& track : predicted.tracks) {
        if (track.density.num_classes() != J) {
            throw DomainError("track density has " + std::to_string(track.density.num_classes()) +
                              " classes, risk coefficients have " + std::to_string(J));
        }
        TrackTerms tt;
        tt.existence = track.existence;
        tt.newborn = track.label.birth_time == scan.k;

        std::vector<Moments> predicted_moments;
        for (int j = 0; j < J; ++j) {
            predicted_moments.push_back(class_moments(track.density.classes[static_cast<std::size_t>(j)]));
        }
        tt.predicted_eps = predicted_estimation_costs(predicted_moments);

        // Gate against every component of the class-marginal predicted mixture.
        std::vector<const GaussianComponent*> gate_components;
        for (int j = 0; j < J; ++j) {
            if (!(track.density.class_probs(j) > 0.0)) continue;
            const auto& cd = track.density.classes[static_cast<std::size_t>(j)];
            for (std::size_t m = 0; m < cd.models.size(); ++m) {
                if (!(cd.model_probs(static_cast<Eigen::Index>(m)) > 0.0)) continue;
                for (const auto& c : cd.models[m].components) {
                    if (c.weight > 0.0) gate_components.push_back(&c);
                }
            }
        }
        auto gated = [&](const Eigen::VectorXd& z, bool radar_side) {
            const double threshold = radar_side ? gate_radar : gate_esm;
            if (threshold == kInf) return true;
            for (const GaussianComponent* c : gate_components) {
                const auto pred = radar_side ? predict_radar(sensors.radar, c->mean)
                                             : predict_esm(sensors.esm, c->mean);
                Eigen::MatrixXd S = pred.H * c->cov * pred.H.transpose() + pred.R;
                symmetrize(S);
                if (mahalanobis_squared(innovation(z, pred), S) <= threshold) return true;
            }
            return false;
        };
        std::vector<int> radar_in{kMiss};
        for (int a = 0; a < terms.num_radar; ++a) {
            if (gated(scan.radar[static_cast<std::size_t>(a)], true)) radar_in.push_back(a);
        }
        std::vector<int> esm_in{kMiss};
        for (int e = 0; e < terms.num_esm; ++e) {
            Eigen::VectorXd z(1);
            z(0) = scan.esm[static_cast<std::size_t>(e)].bearing;
            if (gated(z, false)) esm_in.push_back(e);
        }

        tt.pair_index.assign(slots, -1);
        for (int a : radar_in) {
            for (int e : esm_in) {
                const Assignment s{a, e};
                tt.pair_index[static_cast<std::size_t>(terms.pair_slot(s))] =
                    static_cast<int>(tt.pairs.size());
                tt.pairs.push_back(compute_pair(track, s, scan, sensors, coeffs, tt.predicted_eps));
            }
        }
        terms.tracks.push_back(std::move(tt));
    }
    return terms;
}

bool pair_allowed(const PairTerms& pair, int decision) {
    return pair.region == kUnconditioned || decision == kUnconditioned || pair.region == decision;
}

double association_log_weight(const ScanTerms& terms, const AssociationMap& map,
                              const std::vector<int>* decisions) {
    if (map.per_track.size() != terms.tracks.size() || !map.is_injective()) return kNegInf;
    double lw = 0.0;
    for (std::size_t t = 0; t < terms.tracks.size(); ++t) {
        const auto& s = map.per_track[t];
        if (s.radar < kMiss || s.radar >= terms.num_radar || s.esm < kMiss ||
            s.esm >= terms.num_esm) {
            return kNegInf;
        }
        const auto& tt = terms.tracks[t];
        const int idx = tt.pair_index[static_cast<std::size_t>(terms.pair_slot(s))];
        if (idx < 0) return kNegInf;
        const auto& p = tt.pairs[static_cast<std::size_t>(idx)];
        if (!pair_allowed(p, decision_of(decisions, t))) return kNegInf;
        lw += s.is_miss() ? miss_log_term(tt.existence, p.log_eta)
                          : safe_log(tt.existence) + p.log_eta;
    }
    return lw;
}

std::vector<AssociationMap> enumerate_associations(const ScanTerms& terms,
                                                   const std::vector<int>* decisions,
                                                   int k_best) {
    const std::size_t n = terms.tracks.size();
    if (decisions != nullptr && decisions->size() != n) {
        throw DomainError("decision vector has " + std::to_string(decisions->size()) +
                          " entries for " + std::to_string(n) + " tracks");
    }
    std::vector<std::size_t> active;
    for (std::size_t t = 0; t < n; ++t) {
        const auto& tt = terms.tracks[t];
        const int decision = decision_of(decisions, t);
        const bool any = std::any_of(tt.pairs.begin() + 1, tt.pairs.end(), [&](const PairTerms& p) {
            return pair_allowed(p, decision) && p.log_eta != kNegInf;
        });
        if (any && tt.existence > 0.0) active.push_back(t);
    }

    const auto radar = rank_side(terms, decisions, active, true, k_best);
    const auto esm = rank_side(terms, decisions, active, false, k_best);
    struct Combo {
        std::size_t r, e;
        double score;
    };
    std::vector<Combo> combos;
    combos.reserve(radar.size() * esm.size());
    for (std::size_t i = 0; i < radar.size(); ++i) {
        for (std::size_t j = 0; j < esm.size(); ++j) {
            combos.push_back({i, j, radar[i].score + esm[j].score});
        }
    }
    std::stable_sort(combos.begin(), combos.end(),
                     [](const Combo& a, const Combo& b) { return a.score > b.score; });

    std::vector<AssociationMap> maps;
    std::vector<double> weights;
    const AssociationMap all_miss{std::vector<Assignment>(n)};
    bool has_all_miss = false;
    for (const auto& c : combos) {
        if (k_best > 0 && static_cast<int>(maps.size()) >= k_best) break;
        AssociationMap map{std::vector<Assignment>(n)};
        for (std::size_t t = 0; t < n; ++t) {
            map.per_track[t] = {radar[c.r].assign[t], esm[c.e].assign[t]};
        }
        const double lw = association_log_weight(terms, map, decisions);
        if (lw == kNegInf) continue;
        has_all_miss = has_all_miss || map == all_miss;
        maps.push_back(std::move(map));
        weights.push_back(lw);
    }
    if (!has_all_miss) {
        if (k_best > 0 && static_cast<int>(maps.size()) >= k_best) {
            maps.pop_back();
            weights.pop_back();
        }
        maps.push_back(all_miss);
        weights.push_back(association_log_weight(terms, all_miss, decisions));
    }

    std::vector<std::size_t> order(maps.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
    std::vector<AssociationMap> sorted;
    sorted.reserve(maps.size());
    for (std::size_t i : order) sorted.push_back(std::move(maps[i]));
    return sorted;
}

std::vector<AssociationMap> enumerate_associations(const LmbDensity& predicted,
                                                   const ScanData& scan,
                                                   const SensorSuite& sensors,
                                                   const RiskCoefficients& coeffs,
                                                   const FilterParams& params) {
    const auto terms = compute_scan_terms(predicted, scan, sensors, coeffs, params);
    return enumerate_associations(terms, nullptr, params.k_best);
}

double UpdateOutput::mean_cardinality() const {
    double sum = 0.0;
    for (const auto& t : tracks) sum += t.existence;
    return sum;
}

std::vector<HypothesisWeight> UpdateOutput::expand_hypotheses(
    const std::vector<Label>& labels) const {
    if (labels.size() != tracks.size()) {
        throw DomainError("expand_hypotheses: label count does not match track count");
    }
    std::vector<HypothesisWeight> out;
    for (const auto& h : hypotheses) {
        std::vector<std::size_t> missed;
        std::vector<Label> detected;
        for (std::size_t t = 0; t < tracks.size(); ++t) {
            if (h.assoc.per_track[t].is_miss()) {
                missed.push_back(t);
            } else {
                detected.push_back(labels[t]);
            }
        }
        if (missed.size() > 20) {
            throw DomainError("expand_hypotheses: too many missed tracks to expand");
        }
        const std::size_t subsets = std::size_t{1} << missed.size();
        for (std::size_t mask = 0; mask < subsets; ++mask) {
            HypothesisWeight hw;
            hw.assoc = h.assoc;
            hw.weight = h.weight;
            hw.label_set = detected;
            for (std::size_t b = 0; b < missed.size(); ++b) {
                const double q = tracks[missed[b]].miss_inclusion;
                if (mask & (std::size_t{1} << b)) {
                    hw.weight *= q;
                    hw.label_set.push_back(labels[missed[b]]);
                } else {
                    hw.weight *= 1.0 - q;
                }
            }
            std::sort(hw.label_set.begin(), hw.label_set.end());
            out.push_back(std::move(hw));
        }
    }
    return out;
}

UpdateOutput update_with_terms(const LmbDensity& predicted, const ScanTerms& terms,
                               const std::vector<int>* decisions, const FilterParams& params,
                               bool build_posterior) {
    const std::size_t n = terms.tracks.size();
    if (predicted.tracks.size() != n) {
        throw DomainError("scan terms do not match the predicted density");
    }
    UpdateOutput out;
    if (decisions != nullptr) out.decisions = *decisions;

    auto maps = enumerate_associations(terms, decisions, params.k_best);
    std::vector<double> log_w;
    for (const auto& m : maps) log_w.push_back(association_log_weight(terms, m, decisions));
    if (log_sum_exp(log_w) == kNegInf) {
        out.fallback = true;
        maps = {AssociationMap{std::vector<Assignment>(n)}};
        log_w = {0.0};
    }
    const auto w = normalized_weights(log_w);
    for (std::size_t h = 0; h < maps.size(); ++h) out.hypotheses.push_back({maps[h], w[h]});

    out.tracks.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& tt = terms.tracks[t];
        auto& sum = out.tracks[t];
        const double r = tt.existence;
        const double log_eta_miss = tt.pairs[0].log_eta;
        const double l_miss = miss_log_term(r, log_eta_miss);
        sum.miss_inclusion = l_miss == kNegInf ? r : std::exp(safe_log(r) + log_eta_miss - l_miss);

        std::vector<double> mass(tt.pairs.size(), 0.0);
        for (std::size_t h = 0; h < maps.size(); ++h) {
            const auto& s = maps[h].per_track[t];
            if (s.is_miss()) {
                mass[0] += w[h] * sum.miss_inclusion;
            } else {
                mass[static_cast<std::size_t>(tt.pair_index[static_cast<std::size_t>(
                    terms.pair_slot(s))])] += w[h];
            }
        }
        sum.existence = std::accumulate(mass.begin(), mass.end(), 0.0);
        sum.pair_weights.assign(tt.pairs.size(), 0.0);
        if (sum.existence > 0.0) {
            for (std::size_t i = 0; i < mass.size(); ++i) sum.pair_weights[i] = mass[i] / sum.existence;
        } else {
            sum.pair_weights[0] = 1.0;
        }

        if (params.miss_existence_override && !tt.newborn) {
            const int decision = decision_of(decisions, t);
            const bool none_inside =
                std::none_of(tt.pairs.begin() + 1, tt.pairs.end(),
                             [&](const PairTerms& p) { return pair_allowed(p, decision); });
            if (none_inside) {
                const double ps = params.p_survival;
                const double q = terms.miss_probability;
                const double r_prev = r / ps;
                sum.existence = r_prev * ps * q / (ps * q + 1.0 - ps);
            }
        }

        const int J = static_cast<int>(tt.pairs[0].class_post.size());
        Eigen::VectorXd class_mass = Eigen::VectorXd::Zero(J);
        for (std::size_t i = 0; i < tt.pairs.size(); ++i) {
            class_mass += sum.pair_weights[i] * tt.pairs[i].class_post;
        }
        const double total = class_mass.sum();
        sum.class_probs = total > 0.0 ? Eigen::VectorXd(class_mass / total)
                                      : Eigen::VectorXd(predicted.tracks[t].density.class_probs);
        sum.class_moments.resize(static_cast<std::size_t>(J));
        sum.estimate.setZero();
        for (int j = 0; j < J; ++j) {
            std::vector<double> weights;
            std::vector<Moments> parts;
            for (std::size_t i = 0; i < tt.pairs.size(); ++i) {
                const double wj = class_mass(j) > 0.0
                                      ? sum.pair_weights[i] * tt.pairs[i].class_post(j)
                                      : sum.pair_weights[i];
                if (wj <= 0.0) continue;
                weights.push_back(wj);
                parts.push_back(tt.pairs[i].class_moments[static_cast<std::size_t>(j)]);
            }
            auto& cm = sum.class_moments[static_cast<std::size_t>(j)];
            cm = parts.empty() ? tt.pairs[0].class_moments[static_cast<std::size_t>(j)]
                               : combine_moments(weights, parts);
            sum.estimate += sum.class_probs(j) * cm.mean;
        }

        if (!build_posterior) continue;
        Track post;
        post.label = predicted.tracks[t].label;
        post.existence = sum.existence;
        post.density.class_probs = sum.class_probs;
        for (int j = 0; j < J; ++j) {
            const auto& predicted_class = tt.pairs[0].classes[static_cast<std::size_t>(j)];
            if (!(class_mass(j) > 0.0)) {
                post.density.classes.push_back(predicted_class);
                continue;
            }
            const std::size_t M = predicted_class.models.size();
            ClassDensity cd;
            cd.models.resize(M);
            cd.model_probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M));
            for (std::size_t m = 0; m < M; ++m) {
                GaussianMixture gm;
                double model_mass = 0.0;
                for (std::size_t i = 0; i < tt.pairs.size(); ++i) {
                    const auto& pc = tt.pairs[i].classes[static_cast<std::size_t>(j)];
                    const double wsm = sum.pair_weights[i] * tt.pairs[i].class_post(j) *
                                       pc.model_probs(static_cast<Eigen::Index>(m));
                    if (wsm <= 0.0) continue;
                    model_mass += wsm;
                    for (const auto& c : pc.models[m].components) {
                        gm.components.push_back({wsm * c.weight, c.mean, c.cov});
                    }
                }
                cd.model_probs(static_cast<Eigen::Index>(m)) = model_mass;
                cd.models[m] = model_mass > 0.0 && gm.total_weight() > 0.0
                                   ? prune_and_merge(gm, params.mixture_limits)
                                   : predicted_class.models[m];
            }
            const double mp = cd.model_probs.sum();
            cd.model_probs = mp > 0.0 ? Eigen::VectorXd(cd.model_probs / mp)
                                      : Eigen::VectorXd(predicted_class.model_probs);
            post.density.classes.push_back(std::move(cd));
        }
        out.posterior.tracks.push_back(std::move(post));
    }
    return out;
}

UpdateOutput update_conditioned(const LmbDensity& predicted, const ScanData& scan,
                                const std::vector<int>& decisions, const SensorSuite& sensors,
                                const RiskCoefficients& coeffs, const FilterParams& params) {
    if (decisions.size() != predicted.tracks.size()) {
        throw DomainError("decision vector has " + std::to_string(decisions.size()) +
                          " entries for " + std::to_string(predicted.tracks.size()) + " tracks");
    }
    for (int d : decisions) {
        if (d < 0 || d >= coeffs.num_classes()) {
            throw DomainError("decision " + std::to_string(d) + " outside the class range");
        }
    }
    const auto terms = compute_scan_terms(predicted, scan, sensors, coeffs, params);
    return update_with_terms(predicted, terms, &decisions, params, true);
}

UpdateOutput update_unconditioned(const LmbDensity& predicted, const ScanData& scan,
                                  const SensorSuite& sensors, const RiskCoefficients& coeffs,
                                  const FilterParams& params) {
    const auto terms = compute_scan_terms(predicted, scan, sensors, coeffs, params);
    return update_with_terms(predicted, terms, nullptr, params, true);
}

std::vector<TrackEstimate> extract_estimates(const LmbDensity& posterior,
                                             const UpdateOutput& output,
                                             const std::vector<int>& decisions,
                                             double threshold) {
    if (posterior.tracks.size() != output.tracks.size()) {
        throw DomainError("extract_estimates: posterior and update summaries disagree");
    }
    std::vector<TrackEstimate> out;
    for (std::size_t t = 0; t < output.tracks.size(); ++t) {
        const auto& s = output.tracks[t];
        if (!(s.existence > threshold)) continue;
        TrackEstimate e;
        e.label = posterior.tracks[t].label;
        e.existence = s.existence;
        e.state = s.estimate;
        e.class_probs = s.class_probs;
        if (t < decisions.size() && decisions[t] != kUnconditioned) {
            e.declared_class = decisions[t];
        } else {
            Eigen::Index best = 0;
            s.class_probs.maxCoeff(&best);
            e.declared_class = static_cast<int>(best);
        }
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace jdtc

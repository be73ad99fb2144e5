#include "jdtc/filter/cjde_filter.hpp"

#include "jdtc/core/errors.hpp"

#include <algorithm>
#include <string>

namespace jdtc {

CjdeLmbFilter::CjdeLmbFilter(FilterSetup setup) : setup_(std::move(setup)) {
    setup_.coeffs.validate();
    setup_.params.validate();
    const int J = setup_.coeffs.num_classes();
    if (static_cast<int>(setup_.models.size()) != J) {
        throw ConfigError("motion models given for " + std::to_string(setup_.models.size()) +
                          " classes, risk coefficients for " + std::to_string(J));
    }
    for (const auto& set : setup_.models) set.validate();
    if (setup_.sensors.esm.enabled) {
        setup_.sensors.esm.validate();
        if (setup_.sensors.esm.num_classes() != J) {
            throw ConfigError("ESM confusion matrix does not match the class count");
        }
    }
    for (const auto& b : setup_.births.components) {
        if (b.density.num_classes() != J) {
            throw ConfigError("birth density does not match the class count");
        }
    }
}

void CjdeLmbFilter::reset() {
    posterior_ = {};
    last_ = {};
}

std::vector<int> CjdeLmbFilter::choose_decisions(const LmbDensity& predicted,
                                                 const ScanTerms& terms,
                                                 const UpdateOutput& unconditioned) const {
    const auto& coeffs = setup_.coeffs;
    const auto& params = setup_.params;
    const int J = coeffs.num_classes();
    const std::size_t n = terms.tracks.size();
    const double base_card = unconditioned.mean_cardinality();

    if (params.exhaustive_decisions && J > 1 &&
        static_cast<int>(n) <= params.exhaustive_decision_limit) {
        std::vector<std::vector<int>> candidates;
        std::vector<UpdateOutput> outputs;
        std::vector<int> d(n, 0);
        while (true) {
            candidates.push_back(d);
            outputs.push_back(update_with_terms(predicted, terms, &d, params, false));
            std::size_t pos = 0;
            while (pos < n && ++d[pos] == J) d[pos++] = 0;
            if (pos == n) break;
        }
        return select_decision(candidates, outputs, base_card, coeffs).decisions;
    }

    std::vector<int> decisions(n, 0);
    for (std::size_t t = 0; t < n; ++t) {
        double best = kInf;
        std::vector<int> trial(n, kUnconditioned);
        for (int i = 0; i < J; ++i) {
            double cost = 0.0;
            if (J == 1 || !terms.tracks[t].has_detections()) {
                // The decision cannot change which pairs this track may take.
                cost = track_decision_cost(i, unconditioned.tracks[t], coeffs).total();
            } else {
                trial[t] = i;
                const auto out = update_with_terms(predicted, terms, &trial, params, false);
                cost = track_decision_cost(i, out.tracks[t], coeffs).total() +
                       coeffs.gamma * (base_card - out.mean_cardinality());
            }
            if (cost < best) {
                best = cost;
                decisions[t] = i;
            }
        }
    }
    return decisions;
}

StepResult CjdeLmbFilter::step(const ScanData& scan) {
    const auto& params = setup_.params;
    const auto predicted = predict(posterior_, setup_.births, scan.k, setup_.models, params);
    const auto terms =
        compute_scan_terms(predicted, scan, setup_.sensors, setup_.coeffs, params);
    const auto unconditioned = update_with_terms(predicted, terms, nullptr, params, false);
    const auto decisions = choose_decisions(predicted, terms, unconditioned);

    last_ = update_with_terms(predicted, terms, &decisions, params, true);
    StepResult result;
    result.k = scan.k;
    result.unconditioned_cardinality = unconditioned.mean_cardinality();
    result.decision =
        evaluate_decision(decisions, last_, result.unconditioned_cardinality, setup_.coeffs);
    result.estimates =
        extract_estimates(last_.posterior, last_, decisions, params.extraction_threshold);
    result.fallback = last_.fallback;

    posterior_ = last_.posterior;
    std::erase_if(posterior_.tracks,
                  [&](const Track& t) { return t.existence < params.existence_prune; });
    return result;
}

} // namespace jdtc

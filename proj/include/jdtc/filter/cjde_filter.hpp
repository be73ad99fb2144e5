#pragma once

#include "jdtc/core/lmb.hpp"
#include "jdtc/filter/update.hpp"
#include "jdtc/models/motion.hpp"
#include "jdtc/risk/coefficients.hpp"
#include "jdtc/risk/decision.hpp"
#include "jdtc/sensing/sensors.hpp"

#include <vector>

namespace jdtc {

struct FilterSetup {
    ClassModels models;
    SensorSuite sensors;
    BirthModel births;
    RiskCoefficients coeffs;
    FilterParams params;
};

struct StepResult {
    int k = 0;
    std::vector<TrackEstimate> estimates;
    DecisionSet decision;
    double unconditioned_cardinality = 0.0;
    bool fallback = false;
};

/// Labelled multi-Bernoulli filter that jointly decides, estimates and
/// classifies: every scan it picks the per-track class decisions minimizing
/// the Bayes risk and runs the update conditioned on them.
class CjdeLmbFilter {
public:
    /// Throws ConfigError when the setup is inconsistent.
    explicit CjdeLmbFilter(FilterSetup setup);

    StepResult step(const ScanData& scan);

    [[nodiscard]] const LmbDensity& posterior() const { return posterior_; }
    [[nodiscard]] const UpdateOutput& last_update() const { return last_; }
    [[nodiscard]] const FilterSetup& setup() const { return setup_; }
    void reset();

private:
    [[nodiscard]] std::vector<int> choose_decisions(const LmbDensity& predicted,
                                                    const ScanTerms& terms,
                                                    const UpdateOutput& unconditioned) const;

    FilterSetup setup_;
    LmbDensity posterior_;
    UpdateOutput last_;
};

} // namespace jdtc

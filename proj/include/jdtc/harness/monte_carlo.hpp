#pragma once

#include "jdtc/filter/cjde_filter.hpp"
#include "jdtc/harness/scenario.hpp"
#include "jdtc/metrics/metrics.hpp"

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace jdtc {

/// One scan in, current estimates out.
using Tracker = std::function<std::vector<TrackEstimate>(const ScanData&)>;

[[nodiscard]] FilterSetup make_filter_setup(const ScenarioConfig& config);
[[nodiscard]] Tracker make_tracker(const ScenarioConfig& config);

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string failure;
    std::vector<ScanScore> scans;
};

/// Mean over the successful trials of one scan.
struct AggregateRow {
    int scan = 0;
    int true_n = 0;
    double mean_est_n = 0.0;
    double mean_ospa = 0.0;
    double mean_miscls = 0.0;
    double mean_jpm = 0.0;
    int trials = 0;
    int failures = 0;
};

struct MonteCarloResult {
    std::vector<AggregateRow> rows;
    std::vector<TrialRecord> trials;
    int failures = 0;
};

/// Simulate and score one trial seeded with config.seed + trial. A
/// non-finite estimate or an exception marks the trial failed.
[[nodiscard]] TrialRecord run_trial(const ScenarioConfig& config,
                                    const std::vector<std::vector<TruthObject>>& truth, int trial);

/// Run config.trials trials on `threads` workers (0 = hardware concurrency).
/// Results depend only on the config and seed.
[[nodiscard]] MonteCarloResult run_monte_carlo(const ScenarioConfig& config, int threads = 0);

[[nodiscard]] std::vector<AggregateRow> aggregate(
    const std::vector<TrialRecord>& trials, const std::vector<std::vector<TruthObject>>& truth);

inline constexpr const char* kSummaryCsvHeader =
    "scan,true_n,mean_est_n,mean_ospa,mean_miscls,mean_jpm,trials,failures";
inline constexpr const char* kRawCsvHeader =
    "trial,seed,failed,scan,true_n,est_n,ospa,miscls,jpm";

void write_summary_csv(std::ostream& os, const std::vector<AggregateRow>& rows);
void write_raw_csv(std::ostream& os, const std::vector<TrialRecord>& trials);

} // namespace jdtc

#include "jdtc/harness/monte_carlo.hpp"

#include "jdtc/baselines/gnn.hpp"
#include "jdtc/sensing/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <thread>

namespace jdtc {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

bool finite_scan(const std::vector<TrackEstimate>& estimates, const ScanScore& s) {
    for (const auto& e : estimates) {
        if (!e.state.allFinite() || !std::isfinite(e.existence)) return false;
    }
    return std::isfinite(s.ospa) && std::isfinite(s.jpm) && std::isfinite(s.misclassification);
}

} // namespace

FilterSetup make_filter_setup(const ScenarioConfig& config) {
    FilterSetup setup;
    setup.models = build_class_models(config);
    setup.sensors = config.sensors;
    for (const auto& b : config.births) {
        setup.births.components.push_back(
            make_birth_component(b.existence, b.mean, b.cov, b.class_prior, setup.models));
    }
    setup.coeffs = config.coeffs;
    setup.params = config.filter;
    return setup;
}

Tracker make_tracker(const ScenarioConfig& config) {
    if (config.algorithm == Algorithm::CjdeLmb) {
        auto filter = std::make_shared<CjdeLmbFilter>(make_filter_setup(config));
        return [filter](const ScanData& scan) { return filter->step(scan).estimates; };
    }
    const auto kind = config.algorithm == Algorithm::Etd ? BaselineKind::Etd : BaselineKind::Dte;
    std::vector<Moments> births;
    for (const auto& b : config.births) births.push_back({b.mean, b.cov});
    auto tracker = std::make_shared<GnnTracker>(
        kind, make_baseline_context(build_class_models(config), config.sensors.radar,
                                    config.coeffs, config.baseline, std::move(births)));
    return [tracker](const ScanData& scan) { return tracker->step(scan); };
}

TrialRecord run_trial(const ScenarioConfig& config,
                      const std::vector<std::vector<TruthObject>>& truth, int trial) {
    TrialRecord rec;
    rec.trial = trial;
    rec.seed = config.seed + static_cast<std::uint64_t>(trial);
    try {
        Rng rng(rec.seed);
        auto tracker = make_tracker(config);
        const auto weights = JpmWeights::from(config.coeffs);
        for (int k = 1; k <= config.horizon; ++k) {
            const auto scan =
                simulate_scan(k, truth[static_cast<std::size_t>(k - 1)], config.sensors, rng);
            const auto estimates = tracker(scan);
            const auto score = score_scan(k, scan.truth, estimates, config.ospa, weights);
            if (!finite_scan(estimates, score)) {
                rec.failed = true;
                rec.failure = "non-finite estimate at scan " + std::to_string(k);
                return rec;
            }
            rec.scans.push_back(score);
        }
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.failure = e.what();
    }
    return rec;
}

MonteCarloResult run_monte_carlo(const ScenarioConfig& config, int threads) {
    config.validate();
    const auto truth = generate_truth(config);
    MonteCarloResult result;
    result.trials.resize(static_cast<std::size_t>(config.trials));

    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, config.trials);
    std::atomic<int> next{0};
    auto work = [&] {
        for (int t = next++; t < config.trials; t = next++) {
            result.trials[static_cast<std::size_t>(t)] = run_trial(config, truth, t);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    for (const auto& t : result.trials) result.failures += t.failed ? 1 : 0;
    result.rows = aggregate(result.trials, truth);
    return result;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& trials,
                                    const std::vector<std::vector<TruthObject>>& truth) {
    std::vector<AggregateRow> rows(truth.size());
    int failures = 0;
    for (const auto& t : trials) failures += t.failed ? 1 : 0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        auto& row = rows[k];
        row.scan = static_cast<int>(k) + 1;
        row.true_n = static_cast<int>(truth[k].size());
        row.failures = failures;
        for (const auto& t : trials) {
            if (t.failed) continue;
            const auto& s = t.scans[k];
            row.mean_est_n += s.est_n;
            row.mean_ospa += s.ospa;
            row.mean_miscls += s.misclassification;
            row.mean_jpm += s.jpm;
            ++row.trials;
        }
        if (row.trials > 0) {
            const double n = row.trials;
            row.mean_est_n /= n;
            row.mean_ospa /= n;
            row.mean_miscls /= n;
            row.mean_jpm /= n;
        } else {
            row.mean_est_n = row.mean_ospa = row.mean_miscls = row.mean_jpm = std::nan("");
        }
    }
    return rows;
}

void write_summary_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << kSummaryCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.scan << ',' << r.true_n << ',' << fmt_double(r.mean_est_n) << ','
           << fmt_double(r.mean_ospa) << ',' << fmt_double(r.mean_miscls) << ','
           << fmt_double(r.mean_jpm) << ',' << r.trials << ',' << r.failures << '\n';
    }
}

void write_raw_csv(std::ostream& os, const std::vector<TrialRecord>& trials) {
    os << kRawCsvHeader << '\n';
    for (const auto& t : trials) {
        for (const auto& s : t.scans) {
            os << t.trial << ',' << t.seed << ',' << (t.failed ? 1 : 0) << ',' << s.k << ','
               << s.true_n << ',' << s.est_n << ',' << fmt_double(s.ospa) << ','
               << fmt_double(s.misclassification) << ',' << fmt_double(s.jpm) << '\n';
        }
    }
}

} // namespace jdtc

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "cld/detector.hpp"
#include "cld/series.hpp"

namespace cld {

/// One observed sample and the model's prediction for it.
struct StreamPoint {
    std::size_t step = 0;
    double actual = 0.0;
    double predicted = 0.0;
};

struct EvalReport {
    double detection_rate = 100.0;  // percent of attack intervals hit by some alarm event
    std::size_t false_alarm_count = 0;  // alarm events overlapping no attack interval
    std::size_t events_total = 0;
    std::size_t attacks_total = 0;
    std::size_t attacks_detected = 0;

    bool operator==(const EvalReport&) const = default;
};

struct SweepRow {
    double ret = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    EvalReport report;
};

struct CalibrationGrid {
    std::vector<double> ret_candidates;
    std::vector<double> alpha_candidates;
    std::vector<double> beta_candidates;
    std::size_t mat = 12;
    double epsilon_floor = 1e-6;

    void validate() const;
};

struct CalibrationResult {
    DetectorConfig config;
    EvalReport report;
    std::vector<SweepRow> table;  // (ret, alpha, beta) ascending
};

/// Default alpha candidates: twelve values from 0.25 to 0.92, including 0.66.
std::vector<double> default_alpha_candidates();

/// Default grid for a validation stream: 20 log-spaced RET values between
/// the 0.5 and 0.999 quantiles of the per-step relative error, and 20
/// evenly spaced beta values across the observed ARE range.
CalibrationGrid default_grid(std::span<const StreamPoint> validation, std::size_t mat,
                             double epsilon_floor);

/// Streams the points through a fresh Detector.
std::vector<StepVerdict> run_detector(const DetectorConfig& config, std::span<const StreamPoint> points);

/// Rejects overlapping intervals.
EvalReport evaluate_events(std::span<const AlarmEvent> events, std::span<const Interval> attacks);
EvalReport evaluate(std::span<const StepVerdict> verdicts, std::span<const Interval> attacks);

/// Exhaustive sweep. Picks the highest detection rate, then fewest false
/// alarms, then the largest beta, alpha and ret.
CalibrationResult calibrate(std::span<const StreamPoint> validation, std::span<const Interval> attacks,
                            const CalibrationGrid& grid);

/// One row per beta with everything else in `base` held fixed.
std::vector<SweepRow> sweep_beta(const DetectorConfig& base, std::span<const StreamPoint> points,
                                 std::span<const Interval> attacks, std::span<const double> betas);

/// "ret,alpha,beta,detection_rate_pct,false_alarms,events_total"
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

}  // namespace cld

#include "cld/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

#include "cld/error.hpp"
#include "cld/text.hpp"

namespace cld {

namespace {

void check_sorted(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw usage_error(std::string(what) + " candidates are empty");
    if (!std::is_sorted(v.begin(), v.end())) throw usage_error(std::string(what) + " candidates must be sorted");
}

double quantile(std::vector<double> sorted, double q) {
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

void CalibrationGrid::validate() const {
    check_sorted(ret_candidates, "ret");
    check_sorted(alpha_candidates, "alpha");
    check_sorted(beta_candidates, "beta");
    if (mat < 1) throw usage_error("mat must be at least 1");
    if (!(epsilon_floor > 0.0)) throw usage_error("epsilon floor must be positive");
    for (double r : ret_candidates) {
        if (!(r > 0.0)) throw usage_error("ret candidates must be positive");
    }
    for (double a : alpha_candidates) {
        if (!(a >= 0.0 && a <= 1.0)) throw usage_error("alpha candidates must lie in [0, 1]");
    }
    for (double b : beta_candidates) {
        if (!(b >= 0.0)) throw usage_error("beta candidates must be non-negative");
    }
}

std::vector<double> default_alpha_candidates() {
    return {0.25, 0.33, 0.41, 0.45, 0.5, 0.58, 0.62, 0.66, 0.7, 0.75, 0.83, 0.92};
}

CalibrationGrid default_grid(std::span<const StreamPoint> validation, std::size_t mat,
                             double epsilon_floor) {
    if (validation.empty()) throw usage_error("validation stream is empty");
    CalibrationGrid grid;
    grid.mat = mat;
    grid.epsilon_floor = epsilon_floor;
    grid.alpha_candidates = default_alpha_candidates();

    std::vector<double> errors;
    errors.reserve(validation.size());
    for (const auto& p : validation) errors.push_back(relative_error(p.actual, p.predicted, epsilon_floor));
    constexpr std::size_t kSteps = 20;
    const double lo = std::max(quantile(errors, 0.5), 1e-6);
    const double hi = std::max(quantile(errors, 0.999), lo * 1.0001);
    for (std::size_t k = 0; k < kSteps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(kSteps - 1);
        grid.ret_candidates.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
    }

    ErrorRing ring(mat);
    double are_min = 0.0, are_max = 0.0;
    bool any = false;
    for (double re : errors) {
        ring.push(re);
        if (const auto are = averaged_relative_error(ring)) {
            are_min = any ? std::min(are_min, *are) : *are;
            are_max = any ? std::max(are_max, *are) : *are;
            any = true;
        }
    }
    for (std::size_t k = 0; k < kSteps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(kSteps - 1);
        grid.beta_candidates.push_back(are_min + t * (are_max - are_min));
    }
    grid.beta_candidates.erase(std::unique(grid.beta_candidates.begin(), grid.beta_candidates.end()),
                               grid.beta_candidates.end());
    return grid;
}

std::vector<StepVerdict> run_detector(const DetectorConfig& config, std::span<const StreamPoint> points) {
    Detector detector(config);
    std::vector<StepVerdict> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(detector.step(p.step, p.actual, p.predicted));
    return out;
}

EvalReport evaluate_events(std::span<const AlarmEvent> events, std::span<const Interval> attacks) {
    std::vector<Interval> sorted(attacks.begin(), attacks.end());
    std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.start < b.start; });
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (sorted[k].start > sorted[k].end) throw usage_error("attack interval has start after end");
        if (k > 0 && sorted[k - 1].overlaps(sorted[k])) throw usage_error("attack intervals overlap");
    }

    EvalReport report;
    report.attacks_total = sorted.size();
    report.events_total = events.size();
    for (const auto& attack : sorted) {
        const bool hit = std::any_of(events.begin(), events.end(), [&](const AlarmEvent& e) {
            return attack.overlaps({e.start_step, e.end_step});
        });
        if (hit) ++report.attacks_detected;
    }
    for (const auto& e : events) {
        const Interval span{e.start_step, e.end_step};
        const bool real = std::any_of(sorted.begin(), sorted.end(),
                                      [&](const Interval& a) { return a.overlaps(span); });
        if (!real) ++report.false_alarm_count;
    }
    report.detection_rate = report.attacks_total == 0
                                ? 100.0
                                : 100.0 * static_cast<double>(report.attacks_detected) /
                                      static_cast<double>(report.attacks_total);
    return report;
}

EvalReport evaluate(std::span<const StepVerdict> verdicts, std::span<const Interval> attacks) {
    const auto events = segment_alarms(verdicts);
    return evaluate_events(events, attacks);
}

CalibrationResult calibrate(std::span<const StreamPoint> validation, std::span<const Interval> attacks,
                            const CalibrationGrid& grid) {
    grid.validate();
    if (attacks.empty()) throw data_error("validation stream carries no attack labels");
    std::size_t normal_steps = 0;
    for (const auto& p : validation) {
        const bool in_attack = std::any_of(attacks.begin(), attacks.end(),
                                           [&](const Interval& a) { return a.start <= p.step && p.step <= a.end; });
        if (!in_attack) ++normal_steps;
    }
    if (normal_steps < grid.mat) {
        throw data_error("validation stream needs at least " + std::to_string(grid.mat) + " normal steps");
    }

    CalibrationResult result;
    result.table.reserve(grid.ret_candidates.size() * grid.alpha_candidates.size() *
                         grid.beta_candidates.size());
    // Ordering key: detection rate up, false alarms down, then beta, alpha, ret up.
    auto key = [](const SweepRow& r) {
        return std::make_tuple(r.report.detection_rate, -static_cast<double>(r.report.false_alarm_count),
                               r.beta, r.alpha, r.ret);
    };
    std::size_t best = 0;
    for (double ret : grid.ret_candidates) {
        DetectorConfig config{ret, grid.mat, grid.alpha_candidates.front(), grid.beta_candidates.front(),
                              grid.epsilon_floor};
        const auto verdicts = run_detector(config, validation);
        for (double alpha : grid.alpha_candidates) {
            for (double beta : grid.beta_candidates) {
                config.alpha = alpha;
                config.beta = beta;
                const auto events = segment_alarms(verdicts, config);
                result.table.push_back({ret, alpha, beta, evaluate_events(events, attacks)});
                if (key(result.table.back()) > key(result.table[best])) best = result.table.size() - 1;
            }
        }
    }
    const auto& chosen = result.table[best];
    result.config = {chosen.ret, grid.mat, chosen.alpha, chosen.beta, grid.epsilon_floor};
    result.report = chosen.report;
    return result;
}

std::vector<SweepRow> sweep_beta(const DetectorConfig& base, std::span<const StreamPoint> points,
                                 std::span<const Interval> attacks, std::span<const double> betas) {
    if (betas.empty()) throw usage_error("beta list is empty");
    const auto verdicts = run_detector(base, points);
    std::vector<SweepRow> rows;
    rows.reserve(betas.size());
    for (double beta : betas) {
        DetectorConfig rule = base;
        rule.beta = beta;
        rule.validate();
        rows.push_back({base.ret, base.alpha, beta, evaluate_events(segment_alarms(verdicts, rule), attacks)});
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
    os << "ret,alpha,beta,detection_rate_pct,false_alarms,events_total\n";
    for (const auto& r : rows) {
        os << text::format_double(r.ret) << ',' << text::format_double(r.alpha) << ','
           << text::format_double(r.beta) << ',' << text::format_double(r.report.detection_rate) << ','
           << r.report.false_alarm_count << ',' << r.report.events_total << '\n';
    }
}

}  // namespace cld

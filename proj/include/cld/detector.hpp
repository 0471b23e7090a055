#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cld {

struct DetectorConfig {
    double ret = 0.5;   // relative error threshold for a point anomaly
    std::size_t mat = 12;  // minimum attack time, the ring capacity
    double alpha = 0.66;   // danger coefficient threshold
    double beta = 0.69;    // averaged relative error threshold
    double epsilon_floor = 1e-6;

    void validate() const;

    /// "ret=<r> mat=<m> alpha=<a> beta=<b>", plus " epsilon_floor=<e>" when
    /// the floor differs from the default.
    std::string to_string() const;
    static DetectorConfig parse(std::string_view text);
};

/// |actual - predicted| / max(|actual|, epsilon_floor).
double relative_error(double actual, double predicted, double epsilon_floor);

/// Fixed-capacity circular array of the most recent relative errors.
class ErrorRing {
public:
    explicit ErrorRing(std::size_t capacity);

    /// Overwrites the oldest slot once full. Rejects negative or NaN values.
    void push(double re);

    std::size_t capacity() const noexcept { return slots_.size(); }
    std::size_t filled() const noexcept { return filled_; }
    std::size_t write_index() const noexcept { return write_index_; }
    bool full() const noexcept { return filled_ == slots_.size(); }

    /// Stored values, oldest first.
    std::vector<double> contents() const;

    /// Number of stored values strictly above `threshold`.
    std::size_t count_above(double threshold) const;

    /// Sum of stored values, accumulated oldest to newest.
    double sum() const;

    bool operator==(const ErrorRing&) const = default;

private:
    std::vector<double> slots_;
    std::size_t write_index_ = 0;
    std::size_t filled_ = 0;
};

/// N / MAT, where N counts slots above `ret`. nullopt until the ring is full.
std::optional<double> danger_coefficient(const ErrorRing& ring, double ret);

/// Mean of the MAT stored errors. nullopt until the ring is full.
std::optional<double> averaged_relative_error(const ErrorRing& ring);

/// dc > alpha and are > beta, never during warmup.
bool collective_alarm(const DetectorConfig& config, double dc, double are, bool warmup) noexcept;

struct StepVerdict {
    std::size_t step = 0;
    double actual = 0.0;
    double predicted = 0.0;
    double re = 0.0;
    bool point_anomaly = false;
    double dc = 0.0;   // 0 during warmup
    double are = 0.0;  // 0 during warmup
    bool collective_alarm = false;
    bool warmup = true;
};

struct DetectorState {
    ErrorRing ring;
    std::optional<std::size_t> last_step;

    bool operator==(const DetectorState&) const = default;
};

/// Streaming decision engine. One instance per stream; calls must be
/// serialized.
class Detector {
public:
    explicit Detector(DetectorConfig config);
    Detector(DetectorConfig config, DetectorState state);

    /// Computes RE, pushes it, then evaluates the rule on the updated ring.
    /// Step indices must strictly increase.
    StepVerdict step(std::size_t step, double actual, double predicted);

    const DetectorConfig& config() const noexcept { return config_; }
    const DetectorState& state() const noexcept { return state_; }

private:
    DetectorConfig config_;
    DetectorState state_;
};

struct AlarmEvent {
    std::size_t start_step = 0;
    std::size_t end_step = 0;
    double peak_dc = 0.0;
    double peak_are = 0.0;

    bool operator==(const AlarmEvent&) const = default;
};

/// Maximal runs of consecutive alarmed steps, one event each.
std::vector<AlarmEvent> segment_alarms(std::span<const StepVerdict> verdicts);

/// Same, but re-applies the alpha/beta rule of `rule` to each verdict's
/// stored dc and are instead of using its collective_alarm flag.
std::vector<AlarmEvent> segment_alarms(std::span<const StepVerdict> verdicts, const DetectorConfig& rule);

void write_verdicts_csv(std::ostream& os, std::span<const StepVerdict> verdicts);
std::vector<StepVerdict> read_verdicts_csv(std::istream& is);

/// One "start,end,peak_dc,peak_are" line per event, no header.
void write_alarm_log(std::ostream& os, std::span<const AlarmEvent> events);
std::vector<AlarmEvent> read_alarm_log(std::istream& is);

}  // namespace cld

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cld/tshark_csv.hpp"
#include "cld/window_set.hpp"

namespace cld {

/// Per-step samples (packet counts) on a fixed time grid.
struct TimeSeries {
    Timestamp start_time{};
    double step_seconds = 1.0;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
};

enum class Label : std::uint8_t { normal, attack };

/// Closed range of step indices.
struct Interval {
    std::size_t start = 0;
    std::size_t end = 0;

    bool overlaps(const Interval& other) const noexcept {
        return start <= other.end && other.start <= end;
    }
    bool operator==(const Interval&) const = default;
};

struct LabeledTimeSeries {
    TimeSeries series;
    std::vector<Label> labels;
    std::vector<Interval> attack_intervals;

    /// Builds the intervals as the maximal runs of attack labels.
    static LabeledTimeSeries from_labels(TimeSeries series, std::vector<Label> labels);
    static LabeledTimeSeries all_normal(TimeSeries series);

    bool has_attacks() const noexcept { return !attack_intervals.empty(); }
};

std::vector<Interval> intervals_from_labels(std::span<const Label> labels);

/// Counts records whose timestamp falls in [start + i*step, start + (i+1)*step),
/// restricted to [start, end). Length is ceil((end - start) / step).
TimeSeries aggregate_counts(std::span<const PacketRecord> records, double step_seconds,
                            Timestamp start, Timestamp end);

/// Min-max scaling to [0, 1].
struct Scaler {
    double offset = 0.0;
    double scale = 1.0;

    double apply(double x) const noexcept { return (x - offset) / scale; }
    double invert(double y) const noexcept { return y * scale + offset; }
    std::vector<double> apply(std::span<const double> xs) const;
    std::vector<double> invert(std::span<const double> ys) const;
};

/// offset = min, scale = max - min; a constant series gets offset = mean, scale = 1.
Scaler fit_scaler(std::span<const double> values);

/// Windows for origins t = lag-1 .. n-2: inputs (x_{t-lag+1} .. x_t), target x_{t+1}.
WindowSet build_windows(std::span<const double> values, std::size_t lag);

struct SplitResult {
    TimeSeries train;
    LabeledTimeSeries validation;
    LabeledTimeSeries test;
};

/// Chronological train / validation / test split. Segment lengths are
/// floor(n * train_fraction), floor(n * validation_fraction), remainder.
/// The training segment must be attack-free.
SplitResult split_protocol(const LabeledTimeSeries& series, double train_fraction,
                           double validation_fraction);

/// Series file: optional comment lines starting with '#', then
///   step,timestamp,count[,label]
/// with label "normal" or "attack".
struct SeriesFile {
    LabeledTimeSeries data;
    bool labeled = false;
    std::optional<std::uint64_t> seed;
};

void write_series_csv(std::ostream& os, const TimeSeries& series,
                      const std::vector<Label>* labels = nullptr,
                      std::optional<std::uint64_t> seed = std::nullopt);
SeriesFile read_series_csv(std::istream& is);

}  // namespace cld

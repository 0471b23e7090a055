#include "cld/series.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "cld/error.hpp"
#include "cld/text.hpp"

namespace cld {

namespace {

std::chrono::microseconds step_duration(double step_seconds) {
    if (!(step_seconds > 0.0) || !std::isfinite(step_seconds)) {
        throw usage_error("step duration must be positive");
    }
    const auto us = std::llround(step_seconds * 1e6);
    if (us < 1) throw usage_error("step duration must be at least one microsecond");
    return std::chrono::microseconds{us};
}

TimeSeries slice(const TimeSeries& s, std::size_t begin, std::size_t end) {
    TimeSeries out;
    out.step_seconds = s.step_seconds;
    out.start_time = s.start_time + step_duration(s.step_seconds) * static_cast<std::int64_t>(begin);
    out.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(begin),
                      s.values.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

LabeledTimeSeries slice(const LabeledTimeSeries& s, std::size_t begin, std::size_t end) {
    return LabeledTimeSeries::from_labels(
        slice(s.series, begin, end),
        std::vector<Label>(s.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                           s.labels.begin() + static_cast<std::ptrdiff_t>(end)));
}

}  // namespace

std::vector<Interval> intervals_from_labels(std::span<const Label> labels) {
    std::vector<Interval> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != Label::attack) continue;
        if (!out.empty() && out.back().end + 1 == i) {
            out.back().end = i;
        } else {
            out.push_back({i, i});
        }
    }
    return out;
}

LabeledTimeSeries LabeledTimeSeries::from_labels(TimeSeries series, std::vector<Label> labels) {
    if (labels.size() != series.values.size()) {
        throw usage_error("label count does not match series length");
    }
    auto intervals = intervals_from_labels(labels);
    return {std::move(series), std::move(labels), std::move(intervals)};
}

LabeledTimeSeries LabeledTimeSeries::all_normal(TimeSeries series) {
    std::vector<Label> labels(series.values.size(), Label::normal);
    return {std::move(series), std::move(labels), {}};
}

TimeSeries aggregate_counts(std::span<const PacketRecord> records, double step_seconds,
                            Timestamp start, Timestamp end) {
    const auto step = step_duration(step_seconds);
    if (!(start < end)) throw usage_error("aggregation start must precede end");
    const auto span_us = (end - start).count();
    const auto length = static_cast<std::size_t>((span_us + step.count() - 1) / step.count());

    TimeSeries out{start, step_seconds, std::vector<double>(length, 0.0)};
    for (const auto& r : records) {
        if (r.timestamp < start || r.timestamp >= end) continue;
        const auto index = static_cast<std::size_t>((r.timestamp - start) / step);
        out.values[index] += 1.0;
    }
    return out;
}

std::vector<double> Scaler::apply(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return apply(x); });
    return out;
}

std::vector<double> Scaler::invert(std::span<const double> ys) const {
    std::vector<double> out(ys.size());
    std::transform(ys.begin(), ys.end(), out.begin(), [this](double y) { return invert(y); });
    return out;
}

Scaler fit_scaler(std::span<const double> values) {
    if (values.empty()) throw usage_error("cannot fit a scaler to an empty series");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*hi > *lo) return {*lo, *hi - *lo};
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                        static_cast<double>(values.size());
    return {mean, 1.0};
}

WindowSet build_windows(std::span<const double> values, std::size_t lag) {
    if (lag < 1 || lag > 3) throw usage_error("lag must be 1, 2 or 3");
    if (values.size() < lag + 1) {
        throw usage_error("series of length " + std::to_string(values.size()) +
                          " is too short for lag " + std::to_string(lag));
    }
    WindowSet w;
    w.lag = lag;
    const std::size_t count = values.size() - lag;
    w.inputs.reserve(count);
    w.targets.reserve(count);
    w.origin_steps.reserve(count);
    for (std::size_t t = lag - 1; t + 1 < values.size(); ++t) {
        w.inputs.emplace_back(values.begin() + static_cast<std::ptrdiff_t>(t + 1 - lag),
                              values.begin() + static_cast<std::ptrdiff_t>(t + 1));
        w.targets.push_back(values[t + 1]);
        w.origin_steps.push_back(t);
    }
    return w;
}

SplitResult split_protocol(const LabeledTimeSeries& series, double train_fraction,
                           double validation_fraction) {
    if (!(train_fraction > 0.0) || !(validation_fraction > 0.0) ||
        !(train_fraction + validation_fraction < 1.0)) {
        throw usage_error("split fractions must be positive and sum to less than 1");
    }
    const std::size_t n = series.series.size();
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
    const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * validation_fraction));
    if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
        throw usage_error("split fractions leave an empty segment for a series of length " +
                          std::to_string(n));
    }
    for (std::size_t i = 0; i < n_train; ++i) {
        if (series.labels[i] == Label::attack) {
            throw data_error("training segment contains attack-labelled step " + std::to_string(i));
        }
    }
    return {slice(series.series, 0, n_train), slice(series, n_train, n_train + n_val),
            slice(series, n_train + n_val, n)};
}

void write_series_csv(std::ostream& os, const TimeSeries& series, const std::vector<Label>* labels,
                      std::optional<std::uint64_t> seed) {
    if (labels && labels->size() != series.size()) {
        throw usage_error("label count does not match series length");
    }
    if (seed) os << "# seed=" << *seed << '\n';
    os << (labels ? "step,timestamp,count,label\n" : "step,timestamp,count\n");
    const auto step = step_duration(series.step_seconds);
    for (std::size_t i = 0; i < series.size(); ++i) {
        os << i << ',' << format_timestamp(series.start_time + step * static_cast<std::int64_t>(i))
           << ',' << text::format_double(series.values[i]);
        if (labels) os << ',' << ((*labels)[i] == Label::attack ? "attack" : "normal");
        os << '\n';
    }
}

SeriesFile read_series_csv(std::istream& is) {
    SeriesFile file;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) -> void {
        throw data_error("series file line " + std::to_string(line_no) + ": " + why);
    };

    bool have_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto t = text::trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            const auto body = text::trim(t.substr(1));
            if (body.starts_with("seed=")) {
                const auto seed = text::parse_int(body.substr(5));
                if (!seed || *seed < 0) fail("bad seed comment");
                file.seed = static_cast<std::uint64_t>(*seed);
            }
            continue;
        }
        if (t == "step,timestamp,count,label") {
            file.labeled = true;
        } else if (t != "step,timestamp,count") {
            fail("expected header 'step,timestamp,count[,label]'");
        }
        have_header = true;
        break;
    }
    if (!have_header) throw data_error("series file: missing header 'step,timestamp,count[,label]'");

    std::vector<Timestamp> stamps;
    std::vector<double> values;
    std::vector<Label> labels;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        const auto fields = text::split(line, ',');
        if (fields.size() != (file.labeled ? 4u : 3u)) fail("wrong number of fields");
        const auto step = text::parse_int(fields[0]);
        if (!step || *step != static_cast<long long>(values.size())) fail("steps must count up from 0");
        const auto ts = parse_timestamp(fields[1]);
        if (!ts) fail("unparseable timestamp");
        const auto count = text::parse_double(fields[2]);
        if (!count || !(*count >= 0.0) || !std::isfinite(*count)) fail("count must be a non-negative number");
        stamps.push_back(*ts);
        values.push_back(*count);
        if (file.labeled) {
            const auto label = text::trim(fields[3]);
            if (label == "attack" || label == "1") {
                labels.push_back(Label::attack);
            } else if (label == "normal" || label == "0") {
                labels.push_back(Label::normal);
            } else {
                fail("label must be 'normal' or 'attack'");
            }
        }
    }
    if (values.empty()) throw data_error("series file has no rows");

    TimeSeries series;
    series.start_time = stamps.front();
    series.step_seconds = 1.0;
    if (stamps.size() > 1) {
        const auto step = stamps[1] - stamps[0];
        if (step.count() <= 0) throw data_error("series timestamps must increase");
        series.step_seconds = static_cast<double>(step.count()) / 1e6;
    }
    series.values = std::move(values);
    file.data = file.labeled ? LabeledTimeSeries::from_labels(std::move(series), std::move(labels))
                             : LabeledTimeSeries::all_normal(std::move(series));
    return file;
}

}  // namespace cld

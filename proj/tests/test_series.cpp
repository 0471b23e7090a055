#include <doctest.h>

#include <numeric>
#include <sstream>

#include "cld/error.hpp"
#include "cld/rng.hpp"
#include "cld/series.hpp"

using namespace cld;
using namespace std::chrono;

namespace {

const Timestamp t0 = Timestamp{} + seconds(921139200);

PacketRecord packet_at(Timestamp t) { return PacketRecord{0, 60, t, 6}; }

LabeledTimeSeries labeled(std::vector<double> values, std::vector<Label> labels) {
    TimeSeries ts{t0, 1.0, std::move(values)};
    return LabeledTimeSeries::from_labels(std::move(ts), std::move(labels));
}

}  // namespace

TEST_CASE("aggregation examples") {
    auto ts = aggregate_counts({}, 1.0, t0, t0 + seconds(10));
    CHECK(ts.values == std::vector<double>(10, 0.0));

    std::vector<PacketRecord> five;
    for (int k = 0; k < 5; ++k) five.push_back(packet_at(t0 + milliseconds(2000 + 150 * k)));
    ts = aggregate_counts(five, 1.0, t0, t0 + seconds(4));
    CHECK(ts.values == std::vector<double>{0, 0, 5, 0});
    CHECK(ts.start_time == t0);
}

TEST_CASE("aggregation bins are half-open and out-of-range records are dropped") {
    std::vector<PacketRecord> r{packet_at(t0 - microseconds(1)), packet_at(t0), packet_at(t0 + seconds(1)),
                                packet_at(t0 + milliseconds(2500)), packet_at(t0 + seconds(3))};
    const auto ts = aggregate_counts(r, 1.0, t0, t0 + seconds(3));
    CHECK(ts.values == std::vector<double>{1, 1, 1});
    // length rounds up
    CHECK(aggregate_counts(r, 2.0, t0, t0 + seconds(3)).values == std::vector<double>{2, 1});
    CHECK_THROWS_AS(aggregate_counts(r, 0.0, t0, t0 + seconds(3)), usage_error);
    CHECK_THROWS_AS(aggregate_counts(r, 1.0, t0, t0), usage_error);
}

TEST_CASE("aggregation conserves in-range records") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PacketRecord> r;
        const int n = rng.uniform_int(0, 300);
        std::size_t inside = 0;
        for (int k = 0; k < n; ++k) {
            const auto off = microseconds(rng.uniform_int(-5'000'000, 60'000'000));
            r.push_back(packet_at(t0 + off));
            if (off >= microseconds(0) && off < seconds(50)) ++inside;
        }
        const double step = 0.25 * rng.uniform_int(1, 20);
        const auto ts = aggregate_counts(r, step, t0, t0 + seconds(50));
        CHECK(std::accumulate(ts.values.begin(), ts.values.end(), 0.0) == static_cast<double>(inside));
    }
}

TEST_CASE("scaler examples") {
    auto s = fit_scaler(std::vector<double>{0, 5, 10});
    CHECK(s.offset == 0.0);
    CHECK(s.scale == 10.0);
    CHECK(s.apply(std::vector<double>{0, 5, 10}) == std::vector<double>{0, 0.5, 1});

    s = fit_scaler(std::vector<double>{7, 7, 7});
    CHECK(s.offset == 7.0);
    CHECK(s.scale == 1.0);
    CHECK(s.apply(std::vector<double>{7, 7, 7}) == std::vector<double>{0, 0, 0});
    CHECK_THROWS_AS(fit_scaler(std::vector<double>{}), usage_error);
}

TEST_CASE("scaler round trip") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(1 + static_cast<std::size_t>(rng.uniform_int(0, 50)));
        for (double& x : v) x = rng.uniform(0.0, 1e4);
        const auto s = fit_scaler(v);
        CHECK(s.scale > 0.0);
        const auto back = s.invert(s.apply(v));
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-12).scale(1e-12));
        }
    }
}

TEST_CASE("window examples") {
    auto w = build_windows(std::vector<double>{1, 2, 3, 4, 5}, 3);
    CHECK(w.lag == 3);
    CHECK(w.inputs == std::vector<std::vector<double>>{{1, 2, 3}, {2, 3, 4}});
    CHECK(w.targets == std::vector<double>{4, 5});
    CHECK(w.origin_steps == std::vector<std::size_t>{2, 3});

    CHECK(build_windows(std::vector<double>{1, 2, 3, 4}, 3).inputs.size() == 1);
    CHECK_THROWS_AS(build_windows(std::vector<double>{1, 2, 3}, 3), usage_error);
    CHECK_THROWS_AS(build_windows(std::vector<double>{1, 2, 3, 4, 5}, 0), usage_error);
    CHECK_THROWS_AS(build_windows(std::vector<double>{1, 2, 3, 4, 5}, 4), usage_error);
}

TEST_CASE("windows are exact slices and reconstruct the series") {
    Rng rng(8);
    for (std::size_t lag = 1; lag <= 3; ++lag) {
        std::vector<double> v(40);
        for (double& x : v) x = rng.uniform(0, 100);
        const auto w = build_windows(v, lag);
        REQUIRE(w.inputs.size() == v.size() - lag);
        std::vector<double> rebuilt(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lag));
        for (std::size_t i = 0; i < w.inputs.size(); ++i) {
            const std::size_t t = w.origin_steps[i];
            CHECK(w.targets[i] == v[t + 1]);
            for (std::size_t j = 0; j < lag; ++j) CHECK(w.inputs[i][j] == v[t + 1 - lag + j]);
            rebuilt.push_back(w.targets[i]);
        }
        CHECK(rebuilt == v);
    }
}

TEST_CASE("labels and intervals agree") {
    using L = Label;
    const std::vector<Label> labels{L::normal, L::attack, L::attack, L::normal, L::attack};
    CHECK(intervals_from_labels(labels) == std::vector<Interval>{{1, 2}, {4, 4}});
    const auto s = labeled({1, 2, 3, 4, 5}, labels);
    CHECK(s.has_attacks());
    CHECK_FALSE(LabeledTimeSeries::all_normal(TimeSeries{t0, 1.0, {1, 2}}).has_attacks());
    CHECK(Interval{1, 3}.overlaps({3, 5}));
    CHECK_FALSE(Interval{1, 3}.overlaps({4, 5}));
}

TEST_CASE("split 40/20/40 on an all-normal series") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 0.0);
    const auto s = LabeledTimeSeries::all_normal(TimeSeries{t0, 2.0, v});
    const auto parts = split_protocol(s, 0.4, 0.2);
    CHECK(parts.train.size() == 40);
    CHECK(parts.validation.series.size() == 20);
    CHECK(parts.test.series.size() == 40);
    CHECK(parts.train.values.front() == 0.0);
    CHECK(parts.validation.series.values.front() == 40.0);
    CHECK(parts.test.series.values.front() == 60.0);
    CHECK(parts.test.series.values.back() == 99.0);
    CHECK(parts.validation.series.start_time == t0 + seconds(80));
    CHECK(parts.test.labels.size() == 40);
}

TEST_CASE("split keeps intervals relative to each segment") {
    std::vector<Label> labels(20, Label::normal);
    labels[12] = labels[13] = Label::attack;
    labels[17] = Label::attack;
    const auto parts = split_protocol(labeled(std::vector<double>(20, 1.0), labels), 0.5, 0.25);
    CHECK(parts.validation.attack_intervals == std::vector<Interval>{{2, 3}});
    CHECK(parts.test.attack_intervals == std::vector<Interval>{{2, 2}});
}

TEST_CASE("split rejects contamination and degenerate fractions") {
    std::vector<Label> labels(10, Label::normal);
    labels[1] = Label::attack;
    const auto s = labeled(std::vector<double>(10, 1.0), labels);
    CHECK_THROWS_AS(split_protocol(s, 0.4, 0.2), data_error);
    CHECK_THROWS_AS(split_protocol(s, 0.0, 0.2), usage_error);
    CHECK_THROWS_AS(split_protocol(s, 0.6, 0.4), usage_error);
    CHECK_THROWS_AS(split_protocol(s, 0.05, 0.2), usage_error);
}

TEST_CASE("series csv round trip") {
    std::vector<Label> labels(6, Label::normal);
    labels[3] = Label::attack;
    const auto s = labeled({0, 1.5, 20, 300, 4, 0.125}, labels);
    std::ostringstream os;
    write_series_csv(os, s.series, &s.labels, 99);
    const std::string text = os.str();
    CHECK(text.rfind("# seed=99\nstep,timestamp,count,label\n0,1999-03-11T08:00:00.000000Z,0,normal\n", 0) == 0);

    std::istringstream is(text);
    const auto back = read_series_csv(is);
    CHECK(back.labeled);
    CHECK(back.seed == std::optional<std::uint64_t>{99});
    CHECK(back.data.series.values == s.series.values);
    CHECK(back.data.series.start_time == t0);
    CHECK(back.data.series.step_seconds == 1.0);
    CHECK(back.data.labels == s.labels);

    std::ostringstream again;
    write_series_csv(again, back.data.series, &back.data.labels, back.seed);
    CHECK(again.str() == text);
}

TEST_CASE("unlabeled series files and bad input") {
    std::istringstream is("step,timestamp,count\n0,1999-03-11T08:00:00Z,3\n1,1999-03-11T08:00:05Z,4\n");
    const auto f = read_series_csv(is);
    CHECK_FALSE(f.labeled);
    CHECK_FALSE(f.seed.has_value());
    CHECK(f.data.series.step_seconds == 5.0);
    CHECK_FALSE(f.data.has_attacks());

    std::istringstream no_header("0,1999-03-11T08:00:00Z,3\n");
    CHECK_THROWS_AS(read_series_csv(no_header), data_error);
    std::istringstream bad_count("step,timestamp,count\n0,1999-03-11T08:00:00Z,x\n");
    CHECK_THROWS_AS(read_series_csv(bad_count), data_error);
    std::istringstream empty("step,timestamp,count\n");
    CHECK_THROWS_AS(read_series_csv(empty), data_error);
}

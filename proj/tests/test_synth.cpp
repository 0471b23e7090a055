#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cld/error.hpp"
#include "cld/synth.hpp"
#include "oracles.hpp"

using namespace cld;

namespace {

SynthConfig fixture_config() {
    SynthConfig c;
    c.length = 1000;
    c.attack_count = 3;
    c.attack_min_len = 20;
    c.attack_max_len = 40;
    c.attack_multiplier = 8.0;
    c.rng_seed = 7;
    return c;
}

std::string as_csv(const LabeledTimeSeries& s, std::uint64_t seed) {
    std::ostringstream os;
    write_series_csv(os, s.series, &s.labels, seed);
    return os.str();
}

}  // namespace

TEST_CASE("no attacks means all labels normal") {
    SynthConfig c;
    c.attack_count = 0;
    const auto s = generate_synthetic(c);
    CHECK(s.series.size() == c.length);
    CHECK(std::all_of(s.labels.begin(), s.labels.end(), [](Label l) { return l == Label::normal; }));
    CHECK(s.attack_intervals.empty());
}

TEST_CASE("same seed gives the same series") {
    const auto a = generate_synthetic(fixture_config());
    const auto b = generate_synthetic(fixture_config());
    CHECK(a.series.values == b.series.values);
    CHECK(a.labels == b.labels);
    auto other = fixture_config();
    other.rng_seed = 8;
    CHECK(generate_synthetic(other).series.values != a.series.values);
}

TEST_CASE("frozen fixture is reproduced and bursts dominate the baseline") {
    const auto s = generate_synthetic(fixture_config());
    const std::string frozen = test::read_file(test::data_path("synth_1000_seed7.csv"));
    CHECK(as_csv(s, 7) == frozen);

    REQUIRE(s.attack_intervals.size() == 3);
    double max_normal = 0.0;
    double min_attack = 1e300;
    for (std::size_t i = 0; i < s.series.size(); ++i) {
        if (s.labels[i] == Label::attack) {
            min_attack = std::min(min_attack, s.series.values[i]);
        } else {
            max_normal = std::max(max_normal, s.series.values[i]);
        }
    }
    CHECK(min_attack > max_normal);
}

TEST_CASE("generated series respects its configuration") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto c = fixture_config();
        c.rng_seed = seed;
        c.attack_count = 1 + seed % 5;
        const auto s = generate_synthetic(c);
        CHECK(intervals_from_labels(s.labels) == s.attack_intervals);
        REQUIRE(s.attack_intervals.size() == c.attack_count);
        CHECK(s.attack_intervals.front().start >= c.min_gap);
        CHECK(s.attack_intervals.back().end + c.min_gap < c.length);
        for (std::size_t k = 0; k < s.attack_intervals.size(); ++k) {
            const auto& iv = s.attack_intervals[k];
            const std::size_t len = iv.end - iv.start + 1;
            CHECK(len >= c.attack_min_len);
            CHECK(len <= c.attack_max_len);
            if (k > 0) CHECK(iv.start - s.attack_intervals[k - 1].end > c.min_gap);
        }
        for (double v : s.series.values) {
            CHECK(v >= 0.0);
            CHECK(v == std::round(v));
        }
    }
}

TEST_CASE("infeasible placement and bad configurations") {
    auto c = fixture_config();
    c.length = 100;
    c.attack_count = 5;
    CHECK_THROWS_AS(generate_synthetic(c), data_error);
    c = fixture_config();
    c.attack_min_len = 50;
    CHECK_THROWS_AS(generate_synthetic(c), usage_error);
    c = fixture_config();
    c.attack_multiplier = 1.0;
    CHECK_THROWS_AS(generate_synthetic(c), usage_error);
}

#include "cld/detector.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "cld/error.hpp"
#include "cld/text.hpp"

namespace cld {

namespace {

constexpr double kDefaultFloor = 1e-6;

std::optional<bool> parse_flag(std::string_view s) {
    s = text::trim(s);
    if (s == "1") return true;
    if (s == "0") return false;
    return std::nullopt;
}

}  // namespace

void DetectorConfig::validate() const {
    if (!(ret > 0.0)) throw usage_error("ret must be positive");
    if (mat < 1) throw usage_error("mat must be at least 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw usage_error("alpha must lie in [0, 1]");
    if (!(beta >= 0.0)) throw usage_error("beta must be non-negative");
    if (!(epsilon_floor > 0.0)) throw usage_error("epsilon floor must be positive");
}

std::string DetectorConfig::to_string() const {
    std::string s = "ret=" + text::format_double(ret) + " mat=" + std::to_string(mat) +
                    " alpha=" + text::format_double(alpha) + " beta=" + text::format_double(beta);
    if (epsilon_floor != kDefaultFloor) s += " epsilon_floor=" + text::format_double(epsilon_floor);
    return s;
}

DetectorConfig DetectorConfig::parse(std::string_view input) {
    DetectorConfig c;
    bool seen_ret = false, seen_mat = false, seen_alpha = false, seen_beta = false;
    std::istringstream words{std::string(input)};
    std::string word;
    while (words >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) throw data_error("detector config: expected key=value, got '" + word + "'");
        const std::string key = word.substr(0, eq);
        const std::string value = word.substr(eq + 1);
        if (key == "mat") {
            const auto m = text::parse_int(value);
            if (!m || *m < 1) throw data_error("detector config: bad mat '" + value + "'");
            c.mat = static_cast<std::size_t>(*m);
            seen_mat = true;
            continue;
        }
        const auto v = text::parse_double(value);
        if (!v) throw data_error("detector config: bad value for " + key);
        if (key == "ret") {
            c.ret = *v;
            seen_ret = true;
        } else if (key == "alpha") {
            c.alpha = *v;
            seen_alpha = true;
        } else if (key == "beta") {
            c.beta = *v;
            seen_beta = true;
        } else if (key == "epsilon_floor") {
            c.epsilon_floor = *v;
        } else {
            throw data_error("detector config: unknown key '" + key + "'");
        }
    }
    if (!seen_ret || !seen_mat || !seen_alpha || !seen_beta) {
        throw data_error("detector config must set ret, mat, alpha and beta");
    }
    try {
        c.validate();
    } catch (const usage_error& e) {
        throw data_error(std::string("detector config: ") + e.what());
    }
    return c;
}

double relative_error(double actual, double predicted, double epsilon_floor) {
    return std::abs(actual - predicted) / std::max(std::abs(actual), epsilon_floor);
}

ErrorRing::ErrorRing(std::size_t capacity) : slots_(capacity, 0.0) {
    if (capacity < 1) throw usage_error("ring capacity must be at least 1");
}

void ErrorRing::push(double re) {
    if (!(re >= 0.0)) throw usage_error("relative error must be non-negative");
    slots_[write_index_] = re;
    write_index_ = (write_index_ + 1) % slots_.size();
    if (filled_ < slots_.size()) ++filled_;
}

std::vector<double> ErrorRing::contents() const {
    std::vector<double> out;
    out.reserve(filled_);
    const std::size_t oldest = full() ? write_index_ : 0;
    for (std::size_t k = 0; k < filled_; ++k) out.push_back(slots_[(oldest + k) % slots_.size()]);
    return out;
}

std::size_t ErrorRing::count_above(double threshold) const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < filled_; ++k) {
        if (slots_[k] > threshold) ++n;
    }
    return n;
}

double ErrorRing::sum() const {
    double total = 0.0;
    const std::size_t oldest = full() ? write_index_ : 0;
    for (std::size_t k = 0; k < filled_; ++k) total += slots_[(oldest + k) % slots_.size()];
    return total;
}

std::optional<double> danger_coefficient(const ErrorRing& ring, double ret) {
    if (!ring.full()) return std::nullopt;
    return static_cast<double>(ring.count_above(ret)) / static_cast<double>(ring.capacity());
}

std::optional<double> averaged_relative_error(const ErrorRing& ring) {
    if (!ring.full()) return std::nullopt;
    return ring.sum() / static_cast<double>(ring.capacity());
}

bool collective_alarm(const DetectorConfig& config, double dc, double are, bool warmup) noexcept {
    return !warmup && dc > config.alpha && are > config.beta;
}

Detector::Detector(DetectorConfig config) : Detector(config, DetectorState{ErrorRing(config.mat), {}}) {}

Detector::Detector(DetectorConfig config, DetectorState state)
    : config_(config), state_(std::move(state)) {
    config_.validate();
    if (state_.ring.capacity() != config_.mat) throw usage_error("ring capacity must equal mat");
}

StepVerdict Detector::step(std::size_t step, double actual, double predicted) {
    if (state_.last_step && step <= *state_.last_step) {
        throw usage_error("step " + std::to_string(step) + " does not follow step " +
                          std::to_string(*state_.last_step));
    }
    StepVerdict v;
    v.step = step;
    v.actual = actual;
    v.predicted = predicted;
    v.re = relative_error(actual, predicted, config_.epsilon_floor);
    v.point_anomaly = v.re > config_.ret;
    state_.ring.push(v.re);
    state_.last_step = step;
    v.warmup = !state_.ring.full();
    if (!v.warmup) {
        v.dc = *danger_coefficient(state_.ring, config_.ret);
        v.are = *averaged_relative_error(state_.ring);
    }
    v.collective_alarm = collective_alarm(config_, v.dc, v.are, v.warmup);
    return v;
}

namespace {

template <typename Alarmed>
std::vector<AlarmEvent> segment_by(std::span<const StepVerdict> verdicts, Alarmed alarmed) {
    std::vector<AlarmEvent> events;
    bool open = false;
    for (const auto& v : verdicts) {
        if (!alarmed(v)) {
            open = false;
            continue;
        }
        if (open && events.back().end_step + 1 == v.step) {
            auto& e = events.back();
            e.end_step = v.step;
            e.peak_dc = std::max(e.peak_dc, v.dc);
            e.peak_are = std::max(e.peak_are, v.are);
        } else {
            events.push_back({v.step, v.step, v.dc, v.are});
        }
        open = true;
    }
    return events;
}

}  // namespace

std::vector<AlarmEvent> segment_alarms(std::span<const StepVerdict> verdicts) {
    return segment_by(verdicts, [](const StepVerdict& v) { return v.collective_alarm; });
}

std::vector<AlarmEvent> segment_alarms(std::span<const StepVerdict> verdicts, const DetectorConfig& rule) {
    return segment_by(verdicts, [&](const StepVerdict& v) {
        return collective_alarm(rule, v.dc, v.are, v.warmup);
    });
}

void write_verdicts_csv(std::ostream& os, std::span<const StepVerdict> verdicts) {
    os << "step,actual,predicted,re,dc,are,point_anomaly,warmup,collective_alarm\n";
    for (const auto& v : verdicts) {
        os << v.step << ',' << text::format_double(v.actual) << ',' << text::format_double(v.predicted)
           << ',' << text::format_double(v.re) << ',' << text::format_double(v.dc) << ','
           << text::format_double(v.are) << ',' << int{v.point_anomaly} << ',' << int{v.warmup} << ','
           << int{v.collective_alarm} << '\n';
    }
}

std::vector<StepVerdict> read_verdicts_csv(std::istream& is) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(is, line) ||
        text::trim(line) != "step,actual,predicted,re,dc,are,point_anomaly,warmup,collective_alarm") {
        throw data_error("verdict file: missing header");
    }
    std::vector<StepVerdict> out;
    while (std::getline(is, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto f = text::split(text::trim(line), ',');
        auto fail = [&] { throw data_error("verdict file line " + std::to_string(line_no) + ": malformed"); };
        if (f.size() != 9) fail();
        const auto step = text::parse_int(f[0]);
        const auto actual = text::parse_double(f[1]);
        const auto predicted = text::parse_double(f[2]);
        const auto re = text::parse_double(f[3]);
        const auto dc = text::parse_double(f[4]);
        const auto are = text::parse_double(f[5]);
        const auto pa = parse_flag(f[6]);
        const auto wu = parse_flag(f[7]);
        const auto ca = parse_flag(f[8]);
        if (!step || *step < 0 || !actual || !predicted || !re || !dc || !are || !pa || !wu || !ca) fail();
        out.push_back({static_cast<std::size_t>(*step), *actual, *predicted, *re, *pa, *dc, *are, *ca, *wu});
    }
    return out;
}

void write_alarm_log(std::ostream& os, std::span<const AlarmEvent> events) {
    for (const auto& e : events) {
        os << e.start_step << ',' << e.end_step << ',' << text::format_double(e.peak_dc) << ','
           << text::format_double(e.peak_are) << '\n';
    }
}

std::vector<AlarmEvent> read_alarm_log(std::istream& is) {
    std::vector<AlarmEvent> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        const auto f = text::split(text::trim(line), ',');
        auto fail = [&] { throw data_error("alarm log line " + std::to_string(line_no) + ": malformed"); };
        if (f.size() != 4) fail();
        const auto s = text::parse_int(f[0]);
        const auto e = text::parse_int(f[1]);
        const auto dc = text::parse_double(f[2]);
        const auto are = text::parse_double(f[3]);
        if (!s || !e || !dc || !are || *s < 0 || *e < *s) fail();
        out.push_back({static_cast<std::size_t>(*s), static_cast<std::size_t>(*e), *dc, *are});
    }
    return out;
}

}  // namespace cld

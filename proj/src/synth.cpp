#include "cld/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cld/error.hpp"
#include "cld/rng.hpp"

namespace cld {

void SynthConfig::validate() const {
    if (length < 1) throw usage_error("synthetic length must be at least 1");
    if (!(baseline_mean >= 0.0) || !(baseline_std >= 0.0)) {
        throw usage_error("baseline mean and std must be non-negative");
    }
    if (attack_min_len < 1 || attack_min_len > attack_max_len) {
        throw usage_error("attack lengths must satisfy 1 <= min <= max");
    }
    if (!(attack_multiplier > 1.0)) throw usage_error("attack multiplier must exceed 1");
    if (!(step_seconds > 0.0)) throw usage_error("step duration must be positive");
}

LabeledTimeSeries generate_synthetic(const SynthConfig& config) {
    config.validate();
    Rng rng(config.rng_seed);

    std::vector<std::size_t> lengths(config.attack_count);
    for (auto& len : lengths) {
        len = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(config.attack_min_len),
                                                       static_cast<std::int64_t>(config.attack_max_len)));
    }
    std::size_t required = 0;
    for (auto len : lengths) required += len;
    if (config.attack_count > 0) required += config.min_gap * (config.attack_count + 1);
    if (required > config.length) {
        throw data_error("cannot place " + std::to_string(config.attack_count) + " attacks (" +
                         std::to_string(required) + " steps needed including gaps) in a series of length " +
                         std::to_string(config.length));
    }

    std::vector<Label> labels(config.length, Label::normal);
    if (config.attack_count > 0) {
        const auto slack = static_cast<std::int64_t>(config.length - required);
        std::vector<std::int64_t> cuts(config.attack_count);
        for (auto& c : cuts) c = rng.uniform_int(0, slack);
        std::sort(cuts.begin(), cuts.end());
        std::size_t position = 0;
        std::int64_t previous_cut = 0;
        for (std::size_t a = 0; a < config.attack_count; ++a) {
            position += config.min_gap + static_cast<std::size_t>(cuts[a] - previous_cut);
            previous_cut = cuts[a];
            std::fill_n(labels.begin() + static_cast<std::ptrdiff_t>(position), lengths[a], Label::attack);
            position += lengths[a];
        }
    }

    TimeSeries series;
    series.step_seconds = config.step_seconds;
    series.values.resize(config.length);
    const double attack_mean = config.baseline_mean * config.attack_multiplier;
    const double attack_std = config.baseline_std * config.attack_multiplier;
    for (std::size_t i = 0; i < config.length; ++i) {
        const double draw = labels[i] == Label::attack ? rng.normal(attack_mean, attack_std)
                                                       : rng.normal(config.baseline_mean, config.baseline_std);
        series.values[i] = std::max(0.0, std::round(draw));
    }
    return LabeledTimeSeries::from_labels(std::move(series), std::move(labels));
}

}  // namespace cld

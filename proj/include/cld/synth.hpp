#pragma once

#include <cstddef>
#include <cstdint>

#include "cld/series.hpp"

namespace cld {

/// Labeled traffic with a noisy baseline and a few sustained bursts,
/// standing in for SYN_ACK counts under a SYN flood.
struct SynthConfig {
    std::size_t length = 2000;
    double baseline_mean = 20.0;
    double baseline_std = 3.0;
    std::size_t attack_count = 3;
    std::size_t attack_min_len = 20;
    std::size_t attack_max_len = 40;
    double attack_multiplier = 8.0;
    /// Normal steps required before, between and after bursts.
    std::size_t min_gap = 12;
    double step_seconds = 1.0;
    std::uint64_t rng_seed = 7;

    void validate() const;
};

/// Baseline steps are rounded normal(mean, std) draws clamped at zero.
/// Attack steps use mean * multiplier and std * multiplier. Burst lengths
/// are uniform in [min_len, max_len] and the spare normal steps are spread
/// uniformly over the gaps. Throws data_error when the bursts cannot fit.
LabeledTimeSeries generate_synthetic(const SynthConfig& config);

}  // namespace cld

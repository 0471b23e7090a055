#pragma once

#include <cstddef>
#include <vector>

namespace cld {

/// Supervised pairs: each input holds `lag` consecutive samples ordered
/// oldest to newest, and the target is the sample that follows them.
struct WindowSet {
    std::size_t lag = 0;
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
    /// Series index of each window's newest input.
    std::vector<std::size_t> origin_steps;

    std::size_t size() const noexcept { return targets.size(); }
    bool empty() const noexcept { return targets.empty(); }
};

}  // namespace cld

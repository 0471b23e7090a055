#pragma once

#include <stdexcept>
#include <string>

namespace cld {

/// Bad arguments or violated preconditions supplied by the caller.
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data that cannot be used: malformed files, contaminated training
/// segments, infeasible synthetic configurations.
class data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite parameter.
class divergence_error : public std::runtime_error {
public:
    divergence_error(std::size_t epoch, const std::string& what)
        : std::runtime_error(what), epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

}  // namespace cld

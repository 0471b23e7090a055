#pragma once

// Reference implementations used only by tests. Each recomputes a quantity
// from first principles rather than through the library's fast path.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cld/lstm.hpp"

namespace cld::test {

/// max over entries of |a - b| / max(|a|, |b|, 1e-8).
inline double max_relative_difference(const LstmParams& a, const LstmParams& b) {
    const auto ab = a.blocks();
    const auto bb = b.blocks();
    double worst = 0.0;
    for (std::size_t k = 0; k < ab.size(); ++k) {
        for (std::size_t j = 0; j < ab[k].values.size(); ++j) {
            const double x = ab[k].values[j];
            const double y = bb[k].values[j];
            const double denom = std::max({std::abs(x), std::abs(y), 1e-8});
            worst = std::max(worst, std::abs(x - y) / denom);
        }
    }
    return worst;
}

inline LstmParams sequence_finite_difference(const LstmParams& params,
                                             std::span<const std::vector<double>> inputs,
                                             std::span<const double> targets, double eps) {
    LstmParams probe = params;
    LstmParams grad = LstmParams::zeros(params.input_dim, params.hidden_dim);
    auto pb = probe.blocks();
    auto gb = grad.blocks();
    for (std::size_t k = 0; k < pb.size(); ++k) {
        for (std::size_t j = 0; j < pb[k].values.size(); ++j) {
            const double saved = pb[k].values[j];
            pb[k].values[j] = saved + eps;
            const double up = sequence_loss(probe, inputs, targets);
            pb[k].values[j] = saved - eps;
            const double down = sequence_loss(probe, inputs, targets);
            pb[k].values[j] = saved;
            gb[k].values[j] = (up - down) / (2 * eps);
        }
    }
    return grad;
}

/// Danger coefficient and averaged relative error from the full history:
/// take the last `mat` errors, oldest first. nullopt before `mat` pushes.
struct SuffixStats {
    double dc;
    double are;
};

inline std::optional<SuffixStats> suffix_stats(std::span<const double> history, std::size_t mat,
                                               double ret) {
    if (history.size() < mat) return std::nullopt;
    const auto tail = history.subspan(history.size() - mat);
    std::size_t above = 0;
    double sum = 0.0;
    for (double e : tail) {
        if (e > ret) ++above;
        sum += e;
    }
    return SuffixStats{static_cast<double>(above) / static_cast<double>(mat),
                       sum / static_cast<double>(mat)};
}

/// 0.5 + 0.5 sin(2 pi t / 20) over 400 steps, already inside [0, 1].
inline std::vector<double> sinusoid_fixture() {
    std::vector<double> v(400);
    for (std::size_t t = 0; t < v.size(); ++t) {
        v[t] = 0.5 + 0.5 * std::sin(2.0 * 3.14159265358979323846 * static_cast<double>(t) / 20.0);
    }
    return v;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(CLD_TEST_DATA_DIR) / name;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("cld_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace cld::test

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cld/lstm.hpp"

namespace cld {

inline constexpr const char* kModelMagic = "lstm-model v1";

/// An auxiliary labeled block carried after the network parameters
/// (for example the series normalization).
struct NamedBlock {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    bool operator==(const NamedBlock&) const = default;
};

struct ModelFile {
    LstmParams params;
    std::vector<NamedBlock> extra;

    const NamedBlock* find(std::string_view name) const;
};

/// Text model format:
///
///   lstm-model v1
///   input_dim=<k> hidden_dim=<h>
///   W_i <rows> <cols>
///   <row 0 values>
///   ...
///
/// Blocks follow LstmParams::blocks() order, then any extra blocks.
/// Values are written with 17 significant digits so doubles round-trip.
void write_model(std::ostream& os, const LstmParams& params, std::span<const NamedBlock> extra = {});

/// Throws data_error on unknown versions, missing or misshapen blocks.
ModelFile read_model(std::istream& is);

}  // namespace cld

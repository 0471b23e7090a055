#include "cld/model_io.hpp"

#include <istream>
#include <ostream>

#include "cld/error.hpp"
#include "cld/text.hpp"

namespace cld {

namespace {

void write_block(std::ostream& os, std::string_view name, std::size_t rows, std::size_t cols,
                 std::span<const double> values) {
    os << name << ' ' << rows << ' ' << cols << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) os << ' ';
            os << text::format_double17(values[r * cols + c]);
        }
        os << '\n';
    }
}

class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    bool next(std::string& line) {
        while (std::getline(is_, line)) {
            ++number_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!text::trim(line).empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw data_error("model file line " + std::to_string(number_) + ": " + why);
    }

private:
    std::istream& is_;
    std::size_t number_ = 0;
};

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    for (auto t : text::split(text::trim(line), ' ')) {
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

NamedBlock parse_block(LineReader& in, const std::string& header) {
    const auto head = tokens(header);
    if (head.size() != 3) in.fail("expected '<name> <rows> <cols>'");
    const auto rows = text::parse_int(head[1]);
    const auto cols = text::parse_int(head[2]);
    if (!rows || !cols || *rows < 0 || *cols < 0) in.fail("bad block shape");
    NamedBlock block{std::string(head[0]), static_cast<std::size_t>(*rows),
                     static_cast<std::size_t>(*cols), {}};
    block.values.reserve(block.rows * block.cols);
    std::string line;
    for (std::size_t r = 0; r < block.rows; ++r) {
        if (!in.next(line)) in.fail("block " + block.name + " is truncated");
        const auto row = tokens(line);
        if (row.size() != block.cols) in.fail("block " + block.name + " row has wrong width");
        for (auto t : row) {
            const auto v = text::parse_double(t);
            if (!v) in.fail("unparseable value '" + std::string(t) + "'");
            block.values.push_back(*v);
        }
    }
    return block;
}

}  // namespace

const NamedBlock* ModelFile::find(std::string_view name) const {
    for (const auto& b : extra) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

void write_model(std::ostream& os, const LstmParams& params, std::span<const NamedBlock> extra) {
    os << kModelMagic << '\n';
    os << "input_dim=" << params.input_dim << " hidden_dim=" << params.hidden_dim << '\n';
    for (const auto& b : params.blocks()) write_block(os, b.name, b.rows, b.cols, b.values);
    for (const auto& b : extra) write_block(os, b.name, b.rows, b.cols, b.values);
}

ModelFile read_model(std::istream& is) {
    LineReader in(is);
    std::string line;
    if (!in.next(line)) in.fail("empty model file");
    if (text::trim(line) != kModelMagic) {
        in.fail("unsupported model format '" + std::string(text::trim(line)) + "'");
    }
    if (!in.next(line)) in.fail("missing dimensions line");
    const auto dims = tokens(line);
    if (dims.size() != 2 || !dims[0].starts_with("input_dim=") || !dims[1].starts_with("hidden_dim=")) {
        in.fail("expected 'input_dim=<k> hidden_dim=<h>'");
    }
    const auto k = text::parse_int(dims[0].substr(10));
    const auto h = text::parse_int(dims[1].substr(11));
    if (!k || !h || *k < 1 || *k > 3 || *h < 1) in.fail("invalid dimensions");

    ModelFile model{LstmParams::zeros(static_cast<std::size_t>(*k), static_cast<std::size_t>(*h)), {}};
    for (auto& expected : model.params.blocks()) {
        if (!in.next(line)) in.fail("unexpected end of file");
        NamedBlock block = parse_block(in, line);
        if (block.name != expected.name) {
            in.fail("expected block " + std::string(expected.name) + ", found " + block.name);
        }
        if (block.rows != expected.rows || block.cols != expected.cols) {
            in.fail("block " + block.name + " has the wrong shape");
        }
        std::copy(block.values.begin(), block.values.end(), expected.values.begin());
    }
    while (in.next(line)) model.extra.push_back(parse_block(in, line));
    return model;
}

}  // namespace cld

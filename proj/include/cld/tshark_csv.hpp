#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cld {

/// Wall-clock instant with microsecond resolution. Timezone names in tshark
/// output are not interpreted; explicit ISO-8601 offsets are.
using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

struct PacketRecord {
    std::uint64_t frame_number = 0;
    std::uint64_t frame_len = 0;
    Timestamp timestamp{};
    int ip_proto = 0;  // 0 when the frame carries no IP header

    bool operator==(const PacketRecord&) const = default;
};

struct RejectedRow {
    std::size_t line = 0;  // 1-based line number in the input, header is line 1
    std::string reason;
};

struct IngestResult {
    std::vector<PacketRecord> records;  // sorted by timestamp, ties keep file order
    std::vector<RejectedRow> rejected;
};

inline constexpr const char* kTsharkColumns = "frame.number,frame.len,frame.time,ip.proto";

/// Reads the output of
///   tshark -T fields -e frame.number -e frame.len -e frame.time -e ip.proto
///          -E header=y -E separator=, [-E quote=d]
/// Columns are located by header name. Malformed rows are skipped and
/// listed in `rejected`; a missing header is a data_error.
IngestResult load_tshark_csv(std::istream& in);

/// Accepts tshark's default frame.time form ("Mar 11, 1999 08:00:01.123456000 EST"),
/// ISO-8601 ("1999-03-11T08:00:01.5Z", "1999-03-11 08:00:01+01:00") and
/// plain epoch seconds ("920548801.25").
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// ISO-8601 UTC with six fractional digits.
std::string format_timestamp(Timestamp ts);

/// Splits one CSV line, honouring double quotes and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace cld

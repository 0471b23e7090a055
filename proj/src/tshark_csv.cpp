#include "cld/tshark_csv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <istream>

#include "cld/error.hpp"
#include "cld/text.hpp"

namespace cld {

namespace {

using namespace std::chrono;

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::optional<int> to_int(std::string_view s) {
    if (!all_digits(s)) return std::nullopt;
    const auto v = text::parse_int(s);
    if (!v) return std::nullopt;
    return static_cast<int>(*v);
}

// Fractional digits beyond microseconds are truncated.
std::optional<microseconds> parse_fraction(std::string_view digits) {
    if (digits.empty()) return microseconds{0};
    if (!all_digits(digits)) return std::nullopt;
    std::string padded(digits.substr(0, 6));
    padded.resize(6, '0');
    return microseconds{std::stoll(padded)};
}

// "HH:MM:SS[.ffffff...]"
std::optional<microseconds> parse_clock(std::string_view s) {
    const auto parts = text::split(s, ':');
    if (parts.size() != 3) return std::nullopt;
    const auto hh = to_int(parts[0]);
    const auto mm = to_int(parts[1]);
    std::string_view sec = parts[2];
    std::string_view frac;
    if (const auto dot = sec.find('.'); dot != std::string_view::npos) {
        frac = sec.substr(dot + 1);
        sec = sec.substr(0, dot);
    }
    const auto ss = to_int(sec);
    const auto f = parse_fraction(frac);
    if (!hh || !mm || !ss || !f || *hh > 23 || *mm > 59 || *ss > 60) return std::nullopt;
    return hours{*hh} + minutes{*mm} + seconds{*ss} + *f;
}

std::optional<sys_days> make_date(int y, int m, int d) {
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::optional<Timestamp> parse_tshark_time(std::string_view s) {
    std::vector<std::string_view> words;
    for (auto w : text::split(s, ' ')) {
        if (!w.empty()) words.push_back(w);
    }
    if (words.size() < 4) return std::nullopt;
    const auto month_it = std::find(kMonths.begin(), kMonths.end(), words[0]);
    if (month_it == kMonths.end()) return std::nullopt;
    std::string_view day_word = words[1];
    if (!day_word.ends_with(',')) return std::nullopt;
    day_word.remove_suffix(1);
    const auto d = to_int(day_word);
    const auto y = to_int(words[2]);
    const auto clock = parse_clock(words[3]);
    if (!d || !y || !clock) return std::nullopt;
    const auto date = make_date(*y, static_cast<int>(month_it - kMonths.begin()) + 1, *d);
    if (!date) return std::nullopt;
    return Timestamp{*date} + *clock;
}

std::optional<Timestamp> parse_iso(std::string_view s) {
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ')) {
        return std::nullopt;
    }
    const auto y = to_int(s.substr(0, 4));
    const auto m = to_int(s.substr(5, 2));
    const auto d = to_int(s.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    const auto date = make_date(*y, *m, *d);
    if (!date) return std::nullopt;

    std::string_view rest = s.substr(11);
    microseconds offset{0};
    if (rest.ends_with('Z')) {
        rest.remove_suffix(1);
    } else if (const auto sign = rest.find_last_of("+-"); sign != std::string_view::npos) {
        const auto tz = text::split(rest.substr(sign + 1), ':');
        if (tz.size() != 2) return std::nullopt;
        const auto oh = to_int(tz[0]);
        const auto om = to_int(tz[1]);
        if (!oh || !om) return std::nullopt;
        offset = hours{*oh} + minutes{*om};
        if (rest[sign] == '-') offset = -offset;
        rest = rest.substr(0, sign);
    }
    const auto clock = parse_clock(rest);
    if (!clock) return std::nullopt;
    return Timestamp{*date} + *clock - offset;
}

std::optional<Timestamp> parse_epoch(std::string_view s) {
    std::string_view whole = s;
    std::string_view frac;
    if (const auto dot = s.find('.'); dot != std::string_view::npos) {
        whole = s.substr(0, dot);
        frac = s.substr(dot + 1);
    }
    if (!all_digits(whole)) return std::nullopt;
    const auto secs = text::parse_int(whole);
    const auto f = parse_fraction(frac);
    if (!secs || !f) return std::nullopt;
    return Timestamp{seconds{*secs} + *f};
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view raw) {
    const auto s = text::trim(raw);
    if (s.empty()) return std::nullopt;
    if (std::isalpha(static_cast<unsigned char>(s.front()))) return parse_tshark_time(s);
    if (s.size() >= 10 && s[4] == '-') return parse_iso(s);
    return parse_epoch(s);
}

std::string format_timestamp(Timestamp ts) {
    const auto day_point = floor<days>(ts);
    const year_month_day ymd{day_point};
    const auto tod = ts - day_point;
    const auto h = duration_cast<hours>(tod);
    const auto m = duration_cast<minutes>(tod - h);
    const auto sec = duration_cast<seconds>(tod - h - m);
    const auto us = tod - h - m - sec;
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02d:%02d:%02d.%06lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                  static_cast<int>(m.count()), static_cast<int>(sec.count()),
                  static_cast<long long>(us.count()));
    return buf.data();
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    fields.back() += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

IngestResult load_tshark_csv(std::istream& in) {
    const std::string missing = std::string("missing header: expected columns ") + kTsharkColumns;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!text::trim(line).empty()) {
            have_header = true;
            break;
        }
    }
    if (!have_header) throw data_error(missing);

    const auto header = split_csv_line(line);
    constexpr std::array<std::string_view, 4> names = {"frame.number", "frame.len", "frame.time",
                                                       "ip.proto"};
    std::array<std::size_t, 4> column{};
    for (std::size_t n = 0; n < names.size(); ++n) {
        const auto it = std::find_if(header.begin(), header.end(),
                                     [&](const std::string& h) { return text::trim(h) == names[n]; });
        if (it == header.end()) throw data_error(missing + " (line " + std::to_string(line_no) + ")");
        column[n] = static_cast<std::size_t>(it - header.begin());
    }

    IngestResult result;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        auto reject = [&](std::string reason) {
            result.rejected.push_back({line_no, std::move(reason)});
        };
        if (fields.size() != header.size()) {
            reject("expected " + std::to_string(header.size()) + " fields, found " +
                   std::to_string(fields.size()));
            continue;
        }
        const auto number = text::parse_int(fields[column[0]]);
        const auto len = text::parse_int(fields[column[1]]);
        const auto ts = parse_timestamp(fields[column[2]]);
        const auto proto_text = text::trim(fields[column[3]]);
        const auto proto = proto_text.empty() ? std::optional<long long>(0) : text::parse_int(proto_text);
        if (!number || *number < 0) {
            reject("unparseable frame.number");
        } else if (!len || *len < 0) {
            reject("unparseable frame.len");
        } else if (!ts) {
            reject("unparseable frame.time '" + fields[column[2]] + "'");
        } else if (!proto || *proto < 0 || *proto > 255) {
            reject("unparseable ip.proto");
        } else {
            result.records.push_back({static_cast<std::uint64_t>(*number),
                                      static_cast<std::uint64_t>(*len), *ts,
                                      static_cast<int>(*proto)});
        }
    }
    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const PacketRecord& a, const PacketRecord& b) { return a.timestamp < b.timestamp; });
    return result;
}

}  // namespace cld

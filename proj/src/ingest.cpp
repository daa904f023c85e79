#include "dsrisk/ingest.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>

#include <json.hpp>

#include "dsrisk/error.hpp"
#include "text_util.hpp"

namespace dsrisk::ingest {
namespace {

struct ParsedStamp {
    BlockStamp stamp;
    std::size_t line;
};

std::int64_t to_timestamp(std::uint64_t value, std::size_t line) {
    if (value > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        throw DataError("timestamp out of range", line);
    }
    return static_cast<std::int64_t>(value);
}

ParsedStamp parse_csv_row(std::string_view row, std::size_t line) {
    const auto fields = detail::split(row, ',');
    if (fields.size() != 2) {
        throw DataError("expected 'height,timestamp', got '" + std::string(row) + "'", line);
    }
    const auto height = detail::parse_number<std::uint64_t>(fields[0]);
    if (!height) {
        throw DataError("invalid height '" + std::string(detail::trim(fields[0])) + "'", line);
    }
    const auto time = detail::parse_number<std::uint64_t>(fields[1]);
    if (!time) {
        throw DataError("invalid timestamp '" + std::string(detail::trim(fields[1])) + "'",
                        line);
    }
    return {{*height, to_timestamp(*time, line)}, line};
}

std::uint64_t json_unsigned(const nlohmann::json& object, const char* key, std::size_t line) {
    const auto it = object.find(key);
    if (it == object.end()) {
        throw DataError(std::string("missing field '") + key + "'", line);
    }
    if (!it->is_number_unsigned()) {
        throw DataError(std::string("field '") + key + "' must be a non-negative integer", line);
    }
    return it->get<std::uint64_t>();
}

ParsedStamp parse_json_row(std::string_view row, std::size_t line) {
    nlohmann::json object;
    try {
        object = nlohmann::json::parse(row);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("invalid JSON: ") + e.what(), line);
    }
    if (!object.is_object()) {
        throw DataError("expected a JSON object", line);
    }
    return {{json_unsigned(object, "height", line),
             to_timestamp(json_unsigned(object, "time", line), line)},
            line};
}

bool is_csv_header(std::string_view row) {
    const auto fields = detail::split(row, ',');
    return fields.size() == 2 && detail::trim(fields[0]) == "height" &&
           detail::trim(fields[1]) == "timestamp";
}

}  // namespace

std::vector<BlockStamp> parse_stamps(std::string_view text, StampFormat format) {
    std::vector<ParsedStamp> parsed;
    bool first_row = true;
    const auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto row = detail::trim(lines[i]);
        if (row.empty()) {
            continue;
        }
        const std::size_t line = i + 1;
        if (format == StampFormat::csv) {
            if (first_row && is_csv_header(row)) {
                first_row = false;
                continue;
            }
            parsed.push_back(parse_csv_row(row, line));
        } else {
            parsed.push_back(parse_json_row(row, line));
        }
        first_row = false;
    }
    if (parsed.empty()) {
        throw DataError("no block stamps in input");
    }

    std::stable_sort(parsed.begin(), parsed.end(), [](const auto& a, const auto& b) {
        return a.stamp.height < b.stamp.height;
    });
    std::vector<BlockStamp> stamps;
    stamps.reserve(parsed.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        if (i > 0) {
            const auto previous = parsed[i - 1].stamp.height;
            const auto current = parsed[i].stamp.height;
            if (current == previous) {
                throw DataError("duplicate height " + std::to_string(current), parsed[i].line);
            }
            if (current != previous + 1) {
                throw DataError("gap in heights: missing height " + std::to_string(previous + 1),
                                parsed[i].line);
            }
        }
        stamps.push_back(parsed[i].stamp);
    }
    return stamps;
}

ConfirmationWindow elapsed_for_confirmations(std::span<const BlockStamp> stamps,
                                             Confirmations z) {
    const auto needed = static_cast<std::size_t>(z.value());
    if (stamps.size() < needed) {
        throw DataError("insufficient data: " + std::to_string(z.value()) +
                        " confirmations need " + std::to_string(needed) + " block stamps, got " +
                        std::to_string(stamps.size()));
    }
    const BlockStamp& first = stamps.front();
    const BlockStamp& last = stamps[needed - 1];
    const std::int64_t span = last.timestamp - first.timestamp;
    return ConfirmationWindow{
        .z = z,
        .t = span < 0 ? 0.0 : static_cast<double>(span),
        .first_height = first.height,
        .last_height = last.height,
        .clamped = span < 0,
    };
}

}  // namespace dsrisk::ingest

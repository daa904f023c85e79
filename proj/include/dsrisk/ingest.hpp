#ifndef DSRISK_INGEST_HPP
#define DSRISK_INGEST_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dsrisk/risk.hpp"

namespace dsrisk::ingest {

struct BlockStamp {
    std::uint64_t height;
    std::int64_t timestamp;  // unix seconds, >= 0

    friend bool operator==(const BlockStamp&, const BlockStamp&) = default;
};

enum class StampFormat { csv, json_lines };

/// Parse block stamps. csv: `height,timestamp` rows with an optional header
/// line of exactly those names; json_lines: one object per line with
/// integer fields `height` and `time`. Blank lines are ignored. The result
/// is sorted by height and must cover consecutive heights; anything else
/// raises DataError (with a line number where one applies).
std::vector<BlockStamp> parse_stamps(std::string_view text, StampFormat format);

struct ConfirmationWindow {
    Confirmations z;
    double t;
    std::uint64_t first_height;
    std::uint64_t last_height;
    /// Set when the z-th timestamp precedes the first and t was clamped to 0.
    bool clamped;
};

/// Time from the block containing the transaction (stamps[0]) to its z-th
/// confirmation (stamps[z - 1]).
ConfirmationWindow elapsed_for_confirmations(std::span<const BlockStamp> stamps,
                                             Confirmations z);

}  // namespace dsrisk::ingest

#endif  // DSRISK_INGEST_HPP

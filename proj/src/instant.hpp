#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace lucid {

// A UTC point in time at microsecond precision.
struct Instant {
    std::int64_t micros = 0; // since 1970-01-01T00:00:00Z

    friend auto operator<=>(const Instant&, const Instant&) = default;
};

// Parses an RFC3339-style timestamp: `YYYY-MM-DDTHH:MM:SS[.ffffff]Z`.
// Fractional digits beyond six are rejected; a missing fraction means .000000.
// Throws ParseError on anything else.
Instant parse_timestamp(std::string_view text);

// Canonical form: always six fractional digits, always `Z`.
std::string render_timestamp(Instant t);

} // namespace lucid

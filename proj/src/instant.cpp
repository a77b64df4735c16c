#include "instant.hpp"

#include "errors.hpp"

#include <array>
#include <cstdio>

namespace lucid {

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> base = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : base[static_cast<std::size_t>(m - 1)];
}

[[noreturn]] void fail(std::string_view text) {
    throw ParseError("invalid timestamp: \"" + std::string(text) + "\"");
}

int read_digits(std::string_view text, std::string_view s, std::size_t pos, std::size_t n) {
    int v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        char c = pos + i < s.size() ? s[pos + i] : '\0';
        if (c < '0' || c > '9') fail(text);
        v = v * 10 + (c - '0');
    }
    return v;
}

} // namespace

Instant parse_timestamp(std::string_view text) {
    std::string_view s = text;
    // Minimal form: 2022-12-08T22:29:00Z (20 chars).
    if (s.size() < 20) fail(text);
    int year = read_digits(text, s, 0, 4);
    if (s[4] != '-') fail(text);
    int month = read_digits(text, s, 5, 2);
    if (s[7] != '-') fail(text);
    int day = read_digits(text, s, 8, 2);
    if (s[10] != 'T' && s[10] != 't') fail(text);
    int hour = read_digits(text, s, 11, 2);
    if (s[13] != ':') fail(text);
    int minute = read_digits(text, s, 14, 2);
    if (s[16] != ':') fail(text);
    int second = read_digits(text, s, 17, 2);

    std::size_t pos = 19;
    std::int64_t micros = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            if (++digits > 6) fail(text);
            micros = micros * 10 + (s[pos] - '0');
            ++pos;
        }
        if (digits == 0) fail(text);
        for (std::size_t i = digits; i < 6; ++i) micros *= 10;
    }
    if (pos + 1 != s.size() || (s[pos] != 'Z' && s[pos] != 'z')) fail(text);

    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) ||
        hour > 23 || minute > 59 || second > 60) {
        fail(text);
    }
    if (second == 60) second = 59; // fold leap seconds

    std::int64_t days = days_from_civil(year, month, day);
    std::int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second;
    return Instant{secs * 1000000 + micros};
}

std::string render_timestamp(Instant t) {
    std::int64_t micros = t.micros % 1000000;
    std::int64_t secs = t.micros / 1000000;
    if (micros < 0) {
        micros += 1000000;
        secs -= 1;
    }
    std::int64_t days = secs / 86400;
    std::int64_t rem = secs % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%06dZ", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                  static_cast<int>(rem % 60), static_cast<int>(micros));
    return buf;
}

} // namespace lucid

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace lucid {

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Case-insensitive token equality after stripping spaces, hyphens and underscores,
// so "Red Hat", "red-hat" and "REDHAT" all compare equal.
inline std::string fold_token(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == ' ' || c == '-' || c == '_') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

// splitmix64; used to derive independent child seeds from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x51ab61c3e2f1d9bbULL));
}

// Deterministic RNG wrapper. std::uniform_*_distribution is implementation-defined,
// so bounded draws are derived from raw splitmix output directly; the stream is
// identical on every platform and toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        // Multiply-shift rejection-free reduction (bias is < 2^-64 per draw).
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Exact rational, used where the contract asks for a quotient reported at fixed
// precision (inconsistencies per image).
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

    // Half-up rounding at `decimals` places, computed in integer arithmetic.
    std::string rounded(int decimals) const;

    friend bool operator==(const Ratio&, const Ratio&) = default;
};

inline std::string Ratio::rounded(int decimals) const {
    if (den == 0) return "0";
    std::int64_t scale = 1;
    for (int i = 0; i < decimals; ++i) scale *= 10;
    std::int64_t n = num, d = den;
    bool neg = (n < 0) != (d < 0);
    if (n < 0) n = -n;
    if (d < 0) d = -d;
    std::int64_t scaled = (n * scale * 2 + d) / (2 * d); // floor(n*scale/d + 1/2)
    std::int64_t whole = scaled / scale;
    std::int64_t frac = scaled % scale;
    std::string out = (neg && scaled != 0) ? "-" : "";
    out += std::to_string(whole);
    if (decimals > 0) {
        std::string f = std::to_string(frac);
        out += "." + std::string(static_cast<std::size_t>(decimals) - f.size(), '0') + f;
    }
    return out;
}

// Locale-independent fixed-point rendering (what "%.<n>f" would produce in the
// C locale, half-up). Report bytes must not depend on the host's LC_NUMERIC.
inline std::string format_fixed(double value, int decimals) {
    bool negative = value < 0;
    double magnitude = negative ? -value : value;
    std::int64_t scale = 1;
    for (int i = 0; i < decimals; ++i) scale *= 10;
    auto scaled = static_cast<std::int64_t>(magnitude * static_cast<double>(scale) + 0.5);
    std::string out = negative && scaled != 0 ? "-" : "";
    out += std::to_string(scaled / scale);
    if (decimals > 0) {
        std::string frac = std::to_string(scaled % scale);
        out += "." + std::string(static_cast<std::size_t>(decimals) - frac.size(), '0') + frac;
    }
    return out;
}

// FNV-1a over bytes; used for store fingerprints.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Largest-remainder apportionment: splits `total` into shares.size() integer
// counts proportional to shares (floor first, remainder distributed by
// descending fractional part, ties by lower index).
inline std::vector<std::int64_t> apportion(const std::vector<double>& shares, std::int64_t total) {
    std::vector<std::int64_t> counts(shares.size(), 0);
    std::vector<std::pair<double, std::size_t>> rema;
    std::int64_t used = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        double exact = shares[i] * static_cast<double>(total);
        counts[i] = static_cast<std::int64_t>(exact);
        used += counts[i];
        rema.emplace_back(exact - static_cast<double>(counts[i]), i);
    }
    std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; used < total && k < rema.size(); ++k, ++used) counts[rema[k].second] += 1;
    return counts;
}

} // namespace lucid

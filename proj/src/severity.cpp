#include "severity.hpp"

#include "errors.hpp"
#include "util.hpp"

namespace lucid {

namespace {

constexpr std::string_view kNames[] = {"None", "Low", "Medium", "High", "Critical"};

// nullopt in the table means "maps to the Unapproved marker".
struct VocabEntry {
    std::string_view token;
    std::optional<Severity> rating;
};

constexpr VocabEntry kCanonical[] = {
    {"none", Severity::None},     {"low", Severity::Low},   {"medium", Severity::Medium},
    {"high", Severity::High},     {"critical", Severity::Critical},
    {"unapproved", std::nullopt},
};

// Red Hat rates Low/Moderate/Important/Critical; the two scales are order-parallel.
constexpr VocabEntry kRedhat[] = {
    {"moderate", Severity::Medium},
    {"important", Severity::High},
};

constexpr VocabEntry kUbuntu[] = {
    {"negligible", std::nullopt},
    {"untriaged", std::nullopt},
};

constexpr VocabEntry kClair[] = {
    {"negligible", std::nullopt},
    {"unknown", std::nullopt},
    {"defcon1", Severity::Critical},
};

constexpr VocabEntry kTrivy[] = {
    {"unknown", std::nullopt},
};

template <std::size_t N>
std::optional<SeverityLabel> lookup(const VocabEntry (&vocab)[N], const std::string& token) {
    for (const auto& e : vocab) {
        if (e.token == token) return e.rating ? SeverityLabel(*e.rating) : SeverityLabel::unapproved();
    }
    return std::nullopt;
}

} // namespace

std::string_view severity_name(Severity s) { return kNames[static_cast<int>(s)]; }

std::optional<Severity> severity_from_name(std::string_view name) {
    std::string t = to_lower(name);
    for (int i = 0; i < 5; ++i) {
        if (t == to_lower(kNames[i])) return static_cast<Severity>(i);
    }
    return std::nullopt;
}

std::optional<Severity> severity_from_code(int code) {
    if (code < 0 || code > 4) return std::nullopt;
    return static_cast<Severity>(code);
}

Severity SeverityLabel::rating() const {
    if (!rating_) throw InvalidArgument("severity is Unapproved, not a rating");
    return *rating_;
}

SeverityLabel severity_label_from_name(std::string_view name) {
    if (fold_token(name) == "unapproved") return SeverityLabel::unapproved();
    auto s = severity_from_name(name);
    if (!s) throw InvalidArgument("unknown severity name: " + std::string(name));
    return SeverityLabel(*s);
}

SeverityLabel normalize_severity(std::string_view raw_label, std::string_view assigner_or_tool) {
    if (trim(raw_label).empty()) throw InvalidArgument("empty severity label");
    std::string token = fold_token(raw_label);
    std::string source = fold_token(assigner_or_tool);

    if (auto hit = lookup(kCanonical, token)) return *hit;

    std::optional<SeverityLabel> hit;
    if (source == "redhat") hit = lookup(kRedhat, token);
    else if (source == "ubuntu") hit = lookup(kUbuntu, token);
    else if (source == "clair") hit = lookup(kClair, token);
    else if (source == "trivy") hit = lookup(kTrivy, token);
    if (hit) return *hit;

    throw InvalidArgument("unknown severity token \"" + std::string(raw_label) + "\" from source \"" +
                          std::string(assigner_or_tool) + "\"");
}

} // namespace lucid

#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace lucid {

// Canonical severity scale. Codes are part of the classifier label contract.
enum class Severity : int {
    None = 0,
    Low = 1,
    Medium = 2,
    High = 3,
    Critical = 4,
};

std::string_view severity_name(Severity s);
std::optional<Severity> severity_from_name(std::string_view name); // canonical names only
std::optional<Severity> severity_from_code(int code);

// A severity rating or the Unapproved marker. Unapproved is what tools emit for
// findings they have not triaged; such records are never voted on and never count
// toward inconsistency detection, so it is kept distinct from the rating scale.
class SeverityLabel {
public:
    SeverityLabel() = default; // Unapproved
    SeverityLabel(Severity s) : rating_(s) {} // NOLINT: ratings convert implicitly

    static SeverityLabel unapproved() { return SeverityLabel{}; }

    bool rated() const { return rating_.has_value(); }
    Severity rating() const; // throws InvalidArgument when unapproved

    std::string_view name() const { return rated() ? severity_name(*rating_) : "Unapproved"; }

    friend bool operator==(const SeverityLabel&, const SeverityLabel&) = default;
    friend auto operator<=>(const SeverityLabel& a, const SeverityLabel& b) {
        // Unapproved sorts below every rating; only used for canonical row ordering.
        int ca = a.rating_ ? static_cast<int>(*a.rating_) : -1;
        int cb = b.rating_ ? static_cast<int>(*b.rating_) : -1;
        return ca <=> cb;
    }

private:
    std::optional<Severity> rating_;
};

SeverityLabel severity_label_from_name(std::string_view name); // canonical names + "Unapproved"

// Maps a source's raw severity token onto the canonical scale.
//
// Every source accepts the canonical five names. On top of that:
//   redhat        adds Moderate -> Medium, Important -> High
//   ubuntu        adds Negligible/Untriaged -> Unapproved
//   clair         adds Negligible/Unknown -> Unapproved, Defcon1 -> Critical
//   trivy         adds Unknown -> Unapproved
//   snyk          canonical names only
//   nvd           canonical names only
// "Unapproved" maps to the marker everywhere. Matching is case-insensitive.
// Tokens outside the source's vocabulary raise InvalidArgument naming both.
SeverityLabel normalize_severity(std::string_view raw_label, std::string_view assigner_or_tool);

} // namespace lucid

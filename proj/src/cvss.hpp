#pragma once

#include "severity.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace lucid {

// CVSS v3 base metric group. All eight metrics are required.
enum class AttackVector { Network, Adjacent, Local, Physical };
enum class AttackComplexity { Low, High };
enum class PrivilegesRequired { None, Low, High };
enum class UserInteraction { None, Required };
enum class CvssScope { Unchanged, Changed };
enum class ImpactMetric { None, Low, High };

struct CvssVector {
    AttackVector attack_vector = AttackVector::Network;
    AttackComplexity attack_complexity = AttackComplexity::Low;
    PrivilegesRequired privileges_required = PrivilegesRequired::None;
    UserInteraction user_interaction = UserInteraction::None;
    CvssScope scope = CvssScope::Unchanged;
    ImpactMetric confidentiality_impact = ImpactMetric::None;
    ImpactMetric integrity_impact = ImpactMetric::None;
    ImpactMetric availability_impact = ImpactMetric::None;

    friend bool operator==(const CvssVector&, const CvssVector&) = default;
};

// Parses a v3.0/v3.1 vector string such as
//   CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H
// Segment order is irrelevant. Non-base segments (temporal/environmental) are
// skipped; a note per skipped segment is appended to `warnings` when given.
// Missing or duplicated base metrics and unknown values raise ParseError.
CvssVector parse_cvss_vector(std::string_view text, std::vector<std::string>* warnings = nullptr);

// Canonical serialization with the 3.1 prefix and AV/AC/PR/UI/S/C/I/A order.
std::string render_cvss_vector(const CvssVector& v);

// Raw (unrounded) sub-scores per the v3.1 equations.
double exploitability_subscore(const CvssVector& v);
double impact_subscore(const CvssVector& v);

// CVSS v3.1 Roundup: smallest one-decimal value >= input, computed on
// a x100000 integer grid so results never depend on platform float rounding.
double cvss_roundup(double value);

struct ScoredVector {
    CvssVector vector;
    double exploitability_score = 0.0; // rounded up to one decimal, NVD display style
    double impact_score = 0.0;         // likewise, clamped below at 0
    double base_score = 0.0;           // one decimal, 0.0 .. 10.0
};

ScoredVector base_score(const CvssVector& v);

// Qualitative banding of a one-decimal score in [0.0, 10.0]:
//   0.0 None / 0.1-3.9 Low / 4.0-6.9 Medium / 7.0-8.9 High / 9.0-10.0 Critical.
// Out-of-range input raises InvalidArgument.
Severity severity_band(double score);

// All 2592 base vectors in lexicographic metric order. Used by tests and by the
// synthetic corpus sampler.
std::vector<CvssVector> enumerate_base_vectors();

// NVD-style uppercase token for one metric column (0..7), e.g. "NETWORK",
// "ADJACENT_NETWORK", "REQUIRED". These are the categorical tokens the
// classifier encodes.
std::string_view cvss_metric_token(int column, const CvssVector& v);

} // namespace lucid

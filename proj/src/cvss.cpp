#include "cvss.hpp"

#include "errors.hpp"
#include "util.hpp"

#include <cmath>
#include <cstdio>

namespace lucid {

namespace {

double av_weight(AttackVector v) {
    switch (v) {
        case AttackVector::Network: return 0.85;
        case AttackVector::Adjacent: return 0.62;
        case AttackVector::Local: return 0.55;
        case AttackVector::Physical: return 0.20;
    }
    return 0.0;
}

double ac_weight(AttackComplexity v) { return v == AttackComplexity::Low ? 0.77 : 0.44; }

double pr_weight(PrivilegesRequired v, CvssScope s) {
    switch (v) {
        case PrivilegesRequired::None: return 0.85;
        case PrivilegesRequired::Low: return s == CvssScope::Changed ? 0.68 : 0.62;
        case PrivilegesRequired::High: return s == CvssScope::Changed ? 0.50 : 0.27;
    }
    return 0.0;
}

double ui_weight(UserInteraction v) { return v == UserInteraction::None ? 0.85 : 0.62; }

double cia_weight(ImpactMetric v) {
    switch (v) {
        case ImpactMetric::None: return 0.0;
        case ImpactMetric::Low: return 0.22;
        case ImpactMetric::High: return 0.56;
    }
    return 0.0;
}

struct MetricSpec {
    char key[3];
    const char* values; // one letter per enum value, in enum order
};

// Per-metric value letters, in enum declaration order.
constexpr MetricSpec kMetrics[8] = {
    {"AV", "NALP"}, {"AC", "LH"}, {"PR", "NLH"}, {"UI", "NR"},
    {"S", "UC"},    {"C", "NLH"}, {"I", "NLH"},  {"A", "NLH"},
};

int metric_index(std::string_view key) {
    for (int i = 0; i < 8; ++i) {
        if (key == kMetrics[i].key) return i;
    }
    return -1;
}

void assign_metric(CvssVector& v, int metric, int value) {
    switch (metric) {
        case 0: v.attack_vector = static_cast<AttackVector>(value); break;
        case 1: v.attack_complexity = static_cast<AttackComplexity>(value); break;
        case 2: v.privileges_required = static_cast<PrivilegesRequired>(value); break;
        case 3: v.user_interaction = static_cast<UserInteraction>(value); break;
        case 4: v.scope = static_cast<CvssScope>(value); break;
        case 5: v.confidentiality_impact = static_cast<ImpactMetric>(value); break;
        case 6: v.integrity_impact = static_cast<ImpactMetric>(value); break;
        case 7: v.availability_impact = static_cast<ImpactMetric>(value); break;
        default: break;
    }
}

int metric_value(const CvssVector& v, int metric) {
    switch (metric) {
        case 0: return static_cast<int>(v.attack_vector);
        case 1: return static_cast<int>(v.attack_complexity);
        case 2: return static_cast<int>(v.privileges_required);
        case 3: return static_cast<int>(v.user_interaction);
        case 4: return static_cast<int>(v.scope);
        case 5: return static_cast<int>(v.confidentiality_impact);
        case 6: return static_cast<int>(v.integrity_impact);
        case 7: return static_cast<int>(v.availability_impact);
        default: return 0;
    }
}

} // namespace

CvssVector parse_cvss_vector(std::string_view text, std::vector<std::string>* warnings) {
    auto segments = split(text, '/');
    if (segments.empty()) throw ParseError("empty CVSS vector");
    std::string_view prefix = trim(segments[0]);
    if (prefix != "CVSS:3.1" && prefix != "CVSS:3.0") {
        throw ParseError("CVSS vector must start with CVSS:3.0 or CVSS:3.1, got \"" +
                         std::string(prefix) + "\"");
    }

    CvssVector v;
    bool seen[8] = {};
    for (std::size_t i = 1; i < segments.size(); ++i) {
        std::string_view seg = trim(segments[i]);
        std::size_t colon = seg.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 >= seg.size()) {
            throw ParseError("malformed CVSS segment \"" + std::string(seg) + "\"");
        }
        std::string_view key = seg.substr(0, colon);
        std::string_view val = seg.substr(colon + 1);
        int m = metric_index(key);
        if (m < 0) {
            // Temporal/environmental metrics are out of scope for base scoring.
            if (warnings) warnings->push_back("ignoring non-base CVSS segment \"" + std::string(seg) + "\"");
            continue;
        }
        if (seen[m]) throw ParseError(std::string("duplicate CVSS metric ") + kMetrics[m].key);
        const char* letters = kMetrics[m].values;
        int value = -1;
        for (int j = 0; letters[j]; ++j) {
            if (val.size() == 1 && val[0] == letters[j]) value = j;
        }
        if (value < 0) {
            throw ParseError("unknown value \"" + std::string(val) + "\" for CVSS metric " +
                             kMetrics[m].key);
        }
        assign_metric(v, m, value);
        seen[m] = true;
    }
    for (int m = 0; m < 8; ++m) {
        if (!seen[m]) throw ParseError(std::string("missing CVSS base metric ") + kMetrics[m].key);
    }
    return v;
}

std::string render_cvss_vector(const CvssVector& v) {
    std::string out = "CVSS:3.1";
    for (int m = 0; m < 8; ++m) {
        out += '/';
        out += kMetrics[m].key;
        out += ':';
        out += kMetrics[m].values[metric_value(v, m)];
    }
    return out;
}

double exploitability_subscore(const CvssVector& v) {
    return 8.22 * av_weight(v.attack_vector) * ac_weight(v.attack_complexity) *
           pr_weight(v.privileges_required, v.scope) * ui_weight(v.user_interaction);
}

double impact_subscore(const CvssVector& v) {
    double iss = 1.0 - (1.0 - cia_weight(v.confidentiality_impact)) *
                           (1.0 - cia_weight(v.integrity_impact)) *
                           (1.0 - cia_weight(v.availability_impact));
    if (v.scope == CvssScope::Unchanged) return 6.42 * iss;
    return 7.52 * (iss - 0.029) - 3.25 * std::pow(iss - 0.02, 15.0);
}

double cvss_roundup(double value) {
    std::int64_t scaled = std::llround(value * 100000.0);
    if (scaled % 10000 == 0) return static_cast<double>(scaled) / 100000.0;
    return static_cast<double>(scaled / 10000 + 1) / 10.0;
}

ScoredVector base_score(const CvssVector& v) {
    ScoredVector out;
    out.vector = v;
    double expl = exploitability_subscore(v);
    double impact = impact_subscore(v);
    out.exploitability_score = cvss_roundup(expl);
    out.impact_score = impact <= 0.0 ? 0.0 : cvss_roundup(impact);
    if (impact <= 0.0) {
        out.base_score = 0.0;
    } else if (v.scope == CvssScope::Unchanged) {
        out.base_score = cvss_roundup(std::min(impact + expl, 10.0));
    } else {
        out.base_score = cvss_roundup(std::min(1.08 * (impact + expl), 10.0));
    }
    return out;
}

Severity severity_band(double score) {
    std::int64_t tenths = std::llround(score * 10.0);
    if (tenths < 0 || tenths > 100 || std::fabs(score * 10.0 - static_cast<double>(tenths)) > 1e-6) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "score %.4f outside one-decimal [0,10]", score);
        throw InvalidArgument(buf);
    }
    if (tenths == 0) return Severity::None;
    if (tenths <= 39) return Severity::Low;
    if (tenths <= 69) return Severity::Medium;
    if (tenths <= 89) return Severity::High;
    return Severity::Critical;
}

std::vector<CvssVector> enumerate_base_vectors() {
    std::vector<CvssVector> out;
    out.reserve(2592);
    for (int av = 0; av < 4; ++av)
        for (int ac = 0; ac < 2; ++ac)
            for (int pr = 0; pr < 3; ++pr)
                for (int ui = 0; ui < 2; ++ui)
                    for (int s = 0; s < 2; ++s)
                        for (int c = 0; c < 3; ++c)
                            for (int i = 0; i < 3; ++i)
                                for (int a = 0; a < 3; ++a) {
                                    CvssVector v;
                                    assign_metric(v, 0, av);
                                    assign_metric(v, 1, ac);
                                    assign_metric(v, 2, pr);
                                    assign_metric(v, 3, ui);
                                    assign_metric(v, 4, s);
                                    assign_metric(v, 5, c);
                                    assign_metric(v, 6, i);
                                    assign_metric(v, 7, a);
                                    out.push_back(v);
                                }
    return out;
}

std::string_view cvss_metric_token(int column, const CvssVector& v) {
    static constexpr std::string_view kAv[] = {"NETWORK", "ADJACENT_NETWORK", "LOCAL", "PHYSICAL"};
    static constexpr std::string_view kLowHigh[] = {"LOW", "HIGH"};
    static constexpr std::string_view kNlh[] = {"NONE", "LOW", "HIGH"};
    static constexpr std::string_view kUi[] = {"NONE", "REQUIRED"};
    static constexpr std::string_view kScope[] = {"UNCHANGED", "CHANGED"};
    int value = metric_value(v, column);
    switch (column) {
        case 0: return kAv[value];
        case 1: return kLowHigh[value];
        case 2: return kNlh[value];
        case 3: return kUi[value];
        case 4: return kScope[value];
        case 5:
        case 6:
        case 7: return kNlh[value];
        default: throw InvalidArgument("CVSS metric column out of range");
    }
}

} // namespace lucid

#pragma once

#include "cvss.hpp"
#include "instant.hpp"
#include "severity.hpp"

#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace lucid {

// OS flavor of the image a finding was reported against, as the scanner saw it.
// Unknown covers images that ship no OS; those are excluded from manifest-based
// false-positive filtering.
enum class PackageType { Debian, Alpine, Redhat, Unknown };

std::string_view package_type_name(PackageType t);
std::optional<PackageType> package_type_from_name(std::string_view name);

// One normalized scanner finding (a scan_results row).
struct VulnRecord {
    std::string image_name;
    std::string tool_name;
    std::string cve_identifier;
    std::string package_name;
    std::string package_version;
    SeverityLabel severity;
    PackageType package_type = PackageType::Unknown;
    std::optional<std::string> assigner;
    std::optional<Instant> modification_time;
    std::optional<Instant> inner_modification_time; // per-assigner last update, when the tool reports one

    auto tie() const {
        return std::tie(image_name, tool_name, cve_identifier, package_name, package_version,
                        severity, package_type, assigner, modification_time,
                        inner_modification_time);
    }
    friend bool operator==(const VulnRecord& a, const VulnRecord& b) { return a.tie() == b.tie(); }
    friend bool operator<(const VulnRecord& a, const VulnRecord& b) { return a.tie() < b.tie(); }
};

enum class AssignerId { NVD, Redhat, Ubuntu };

std::string_view assigner_name(AssignerId a);
std::optional<AssignerId> assigner_from_name(std::string_view name); // tolerant: "red hat", "REDHAT", ...

// One advisory entry from an assigner feed (an assigner_results row).
struct AdvisoryRecord {
    std::string cve_identifier;
    AssignerId cve_assigner = AssignerId::NVD;
    SeverityLabel severity; // normalized form of raw_severity_label
    std::string raw_severity_label;
    std::optional<Instant> modification_time;
    std::optional<CvssVector> cvss;

    auto tie() const {
        return std::make_tuple(std::cref(cve_identifier), cve_assigner, severity,
                               std::cref(raw_severity_label), modification_time, cvss_key());
    }
    std::string cvss_key() const { return cvss ? render_cvss_vector(*cvss) : std::string(); }
    friend bool operator==(const AdvisoryRecord& a, const AdvisoryRecord& b) { return a.tie() == b.tie(); }
    friend bool operator<(const AdvisoryRecord& a, const AdvisoryRecord& b) { return a.tie() < b.tie(); }
};

enum class PackageOrigin { PackageManager, SourceInstall };

// One installed package inside an image. Names are lowercased on ingest;
// versions compare as exact strings.
struct PackageEntry {
    std::string name;
    std::string version;
    PackageOrigin origin = PackageOrigin::PackageManager;

    auto tie() const { return std::tie(name, version, origin); }
    friend bool operator==(const PackageEntry& a, const PackageEntry& b) { return a.tie() == b.tie(); }
    friend bool operator<(const PackageEntry& a, const PackageEntry& b) { return a.tie() < b.tie(); }
};

struct PackageInventory {
    std::string image_name;
    PackageType os_family = PackageType::Unknown;
    std::vector<PackageEntry> entries; // unique (name, version) pairs

    bool contains_name(std::string_view name) const;
    bool contains(std::string_view name, std::string_view version) const;
};

// True iff the text matches CVE-\d{4}-\d{4,}.
bool is_cve_identifier(std::string_view text);

} // namespace lucid

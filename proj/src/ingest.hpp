#pragma once

#include "records.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace lucid {

enum class ReportFormat { Canonical, TrivyLike, ClairLike, SnykLike };

std::string_view report_format_name(ReportFormat f);
std::optional<ReportFormat> report_format_from_name(std::string_view name);

enum class PackageManager { Dpkg, Rpm, Apk };

std::optional<PackageManager> package_manager_from_name(std::string_view name);
PackageType os_family_for_manager(PackageManager m);

struct ScanParseResult {
    std::vector<VulnRecord> records;
    std::vector<std::string> warnings;
};

// Parses one scanner report document into normalized records.
//
// Canonical is this toolkit's own JSON shape (see render_scan_reports); the
// *Like formats accept the native JSON layout of the corresponding tool family.
// Unknown severity tokens degrade to the Unapproved marker with a warning;
// structurally bad documents raise ParseError with the byte offset.
ScanParseResult parse_scan_report(std::string_view raw, ReportFormat format);

// Canonical serializer: groups records by (image, tool, package_type) and emits
// one document per group, as a single object or an array of objects. Re-parsing
// the output yields the identical record list (ordered by group, then input
// order within a group).
std::string render_scan_reports(const std::vector<VulnRecord>& records);

struct ManifestParseResult {
    std::vector<PackageEntry> entries;
    std::vector<std::string> warnings;
    std::size_t skipped_lines = 0;
};

// Parses the raw stdout of `dpkg -l`, `rpm -qa`, or `apk info -vv`.
// Unrecognized lines are skipped and counted; an empty result from nonempty
// input raises ParseError (the whole document was unintelligible).
ManifestParseResult parse_package_manifest(std::string_view raw, PackageManager manager);

struct AdvisoryParseResult {
    std::vector<AdvisoryRecord> records;
    std::vector<std::string> warnings;
};

// Parses a canonical advisory feed:
//   {"assigner": "NVD", "entries": [{"cve_identifier": ..., "severity": ...,
//    "modification_time"?: ..., "cvss_vector"?: ...}]}
// Entries without a cve_identifier are rejected individually; duplicate
// (cve, assigner, modification_time) triples are dropped with a warning.
AdvisoryParseResult load_advisory_feed(std::string_view raw);

// Same, but with the assigner forced by the caller (overrides the document).
AdvisoryParseResult load_advisory_feed(std::string_view raw, AssignerId assigner);

std::string render_advisory_feed(AssignerId assigner, const std::vector<AdvisoryRecord>& records);

} // namespace lucid

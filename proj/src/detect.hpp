#pragma once

#include "store.hpp"
#include "util.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace lucid {

// Inconsistency levels. L1 is the umbrella set (any severity disagreement for a
// CVE); L2..L6 are the per-cause predicates:
//   L2  same image + CVE, different package name, different severity
//   L3  same image + CVE + package name, different version, different severity
//   L4  same CVE, different assigner, different severity
//   L5  same CVE + assigner, different modification time, different severity
//   L6  same CVE + assigner + modification time + tool, different severity
// Absent assigners/timestamps compare equal to each other and unequal to any
// concrete value. Unapproved records never participate.
enum class Level { L1 = 1, L2, L3, L4, L5, L6 };

std::string_view level_name(Level level);

struct Finding {
    Level level = Level::L2;
    std::string cve_identifier;
    std::vector<RecordRef> evidence; // >= 2, sorted, all rated
    std::string note;                // the shared group key, for reports
};

// CVEs carrying two or more distinct severity ratings across scan records.
std::set<std::string> inconsistent_cves(const Store& store);

// All findings for one level (L2..L6). Levels are computed independently; a CVE
// may appear at several levels. Requesting L1 here raises InvalidArgument.
std::vector<Finding> level_findings(const Store& store, Level level);

struct LevelBreakdown {
    struct Row {
        std::size_t distinct_cves = 0;
        double percent_of_l1 = 0.0;

        friend bool operator==(const Row&, const Row&) = default;
    };
    std::map<Level, Row> per_level;                      // L2..L6
    std::size_t l1_total = 0;
    Ratio per_image_average;                             // l1_total / image count
    std::map<Level, std::set<std::string>> level_cves;   // evidence for scoring
    std::uint64_t store_fingerprint = 0;
};

// Counts distinct CVEs per level and the per-image average. `threads` > 1 runs
// the five level scans concurrently; output is identical either way.
// Throws InvalidArgument when the store has no images.
LevelBreakdown level_breakdown(const Store& store, int threads = 1);

// Scan records naming a package that does not appear at all in the image's
// inventory. Images without an inventory or with Unknown os_family are skipped.
std::vector<RecordRef> hard_false_positives(const Store& store);

// Scan records whose package name is installed but at no matching version.
// Mutually exclusive with hard_false_positives by construction.
std::vector<RecordRef> soft_false_positives(const Store& store);

} // namespace lucid

#pragma once

#include "detect.hpp"
#include "store.hpp"
#include "util.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace lucid {

enum class ResolveMethod { Recent, Voting, RecentThenVoting };

std::string_view resolve_method_name(ResolveMethod m);

struct ResolveOptions {
    // Assigners whose severities may decide an L4 conflict.
    std::vector<std::string> credible_assigners = {"NVD", "Redhat", "Ubuntu"};
    int threads = 1;
};

// Drops (a) hard false positives and (b) Unapproved records duplicating a CVE
// that already has a rated record in the same image and tool. Soft false
// positives stay in. Returns the re-sealed store and the removed row handles
// (valid against the input store).
struct StripResult {
    Store store;
    std::vector<RecordRef> removed;
};
StripResult strip_false_positives(const Store& store);

// Keeps the records carrying the most recent update time. Records without any
// timestamp are dropped when at least one record has one; when no record has a
// timestamp the input comes back unchanged. A record's update time is
// inner_modification_time when present, else modification_time.
// Throws InvalidArgument on empty input or mixed CVEs.
std::vector<VulnRecord> recent_filter(const std::vector<VulnRecord>& records);

// The severity with the greatest multiplicity; ties go to the higher severity.
Severity vote(const std::vector<Severity>& severities);
Severity vote_records(const std::vector<VulnRecord>& records);

// Keeps only the records whose assigner is the designated advisory source for
// the image OS (Debian -> Ubuntu, Redhat -> Redhat, Alpine/Unknown -> NVD).
// When no record matches, the input is returned unchanged.
std::vector<VulnRecord> source_priority_filter(const std::vector<VulnRecord>& records,
                                               PackageType os_family);

AssignerId source_for_os(PackageType os_family);

// Resolves every finding of one level whose CVE is not yet settled.
// L6/L5: recent_filter then vote. L4: restrict to credible assigners (none
// present -> no resolution), source-priority filter, then vote. L3/L2: vote.
std::map<std::string, std::pair<Severity, ResolveMethod>> resolve_level(
    const Store& store, Level level, const std::set<std::string>& already_resolved,
    const ResolveOptions& options = {});

struct Resolution {
    Severity severity = Severity::None;
    Level level = Level::L6;
    ResolveMethod method = ResolveMethod::Voting;
};

struct ResolutionOutcome {
    std::map<std::string, Resolution> resolved;
    std::map<Level, std::size_t> per_level_resolved;
    std::set<std::string> residual_inconsistent;
    std::vector<RecordRef> removed_false_positives; // refs into the pre-strip store
    Ratio per_image_average_after;
    std::uint64_t store_fingerprint = 0; // of the input store
};

// The full bottom-up pipeline: strip false positives, then resolve L6 -> L2,
// excluding CVEs settled at a lower level. The returned store is the stripped
// store with every resolved CVE rewritten to its resolved severity.
struct ResolveResult {
    ResolutionOutcome outcome;
    Store rewritten;
};
ResolveResult resolve_all(const Store& store, const ResolveOptions& options = {});

} // namespace lucid

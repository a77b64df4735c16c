#include "resolve.hpp"

#include "errors.hpp"

#include <algorithm>
#include <array>

namespace lucid {

namespace {

std::optional<Instant> effective_time(const VulnRecord& r) {
    return r.inner_modification_time ? r.inner_modification_time : r.modification_time;
}

bool is_credible(const std::optional<std::string>& assigner, const std::vector<std::string>& credible) {
    if (!assigner) return false;
    std::string token = fold_token(*assigner);
    for (const auto& c : credible) {
        if (fold_token(c) == token) return true;
    }
    return false;
}

PackageType dominant_os(const std::vector<VulnRecord>& records) {
    std::array<std::size_t, 4> counts{};
    for (const auto& r : records) counts[static_cast<std::size_t>(r.package_type)] += 1;
    std::size_t best = 3; // Unknown when nothing dominates
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] > best_count) {
            best = i;
            best_count = counts[i];
        }
    }
    return static_cast<PackageType>(best);
}

} // namespace

std::string_view resolve_method_name(ResolveMethod m) {
    switch (m) {
        case ResolveMethod::Recent: return "Recent";
        case ResolveMethod::Voting: return "Voting";
        case ResolveMethod::RecentThenVoting: return "RecentThenVoting";
    }
    return "Voting";
}

StripResult strip_false_positives(const Store& store) {
    auto hard = hard_false_positives(store);
    std::set<std::uint32_t> drop;
    for (const auto& ref : hard) drop.insert(ref.index);

    // Unapproved leftovers: the tool updated the record but kept the stale one.
    const auto& scan = store.scan_results();
    std::set<std::tuple<std::string, std::string, std::string>> rated_groups;
    for (const auto& r : scan) {
        if (r.severity.rated()) rated_groups.insert({r.image_name, r.tool_name, r.cve_identifier});
    }
    for (std::uint32_t i = 0; i < scan.size(); ++i) {
        const auto& r = scan[i];
        if (!r.severity.rated() &&
            rated_groups.count({r.image_name, r.tool_name, r.cve_identifier})) {
            drop.insert(i);
        }
    }

    StripResult out;
    std::vector<VulnRecord> kept;
    kept.reserve(scan.size());
    for (std::uint32_t i = 0; i < scan.size(); ++i) {
        if (drop.count(i)) out.removed.push_back({TableId::ScanResults, i});
        else kept.push_back(scan[i]);
    }
    out.store.add_scan_records(kept);
    out.store.add_advisories(store.assigner_results());
    out.store.add_inventories(store.image_packages());
    out.store.seal();
    return out;
}

std::vector<VulnRecord> recent_filter(const std::vector<VulnRecord>& records) {
    if (records.empty()) throw InvalidArgument("recent_filter: empty input");
    for (const auto& r : records) {
        if (r.cve_identifier != records.front().cve_identifier) {
            throw InvalidArgument("recent_filter: records span multiple CVEs");
        }
    }
    std::optional<Instant> max_time;
    for (const auto& r : records) {
        auto t = effective_time(r);
        if (t && (!max_time || *t > *max_time)) max_time = t;
    }
    if (!max_time) return records; // nothing dated; Voting decides downstream
    std::vector<VulnRecord> out;
    for (const auto& r : records) {
        auto t = effective_time(r);
        if (t && *t == *max_time) out.push_back(r);
    }
    return out;
}

Severity vote(const std::vector<Severity>& severities) {
    if (severities.empty()) throw InvalidArgument("vote: empty input");
    std::array<std::size_t, 5> counts{};
    for (Severity s : severities) counts[static_cast<std::size_t>(s)] += 1;
    // Highest multiplicity; ties break toward the higher severity.
    std::size_t best = 0;
    for (std::size_t s = 1; s < counts.size(); ++s) {
        if (counts[s] >= counts[best] && counts[s] > 0) best = s;
    }
    return static_cast<Severity>(best);
}

Severity vote_records(const std::vector<VulnRecord>& records) {
    std::vector<Severity> severities;
    severities.reserve(records.size());
    for (const auto& r : records) {
        if (!r.severity.rated()) throw InvalidArgument("vote: Unapproved record in input");
        severities.push_back(r.severity.rating());
    }
    return vote(severities);
}

AssignerId source_for_os(PackageType os_family) {
    switch (os_family) {
        case PackageType::Debian: return AssignerId::Ubuntu;
        case PackageType::Redhat: return AssignerId::Redhat;
        case PackageType::Alpine: return AssignerId::NVD; // no Alpine feed; NVD is the generalist
        case PackageType::Unknown: return AssignerId::NVD;
    }
    return AssignerId::NVD;
}

std::vector<VulnRecord> source_priority_filter(const std::vector<VulnRecord>& records,
                                               PackageType os_family) {
    std::string source = fold_token(assigner_name(source_for_os(os_family)));
    std::vector<VulnRecord> matched;
    for (const auto& r : records) {
        if (r.assigner && fold_token(*r.assigner) == source) matched.push_back(r);
    }
    return matched.empty() ? records : matched;
}

std::map<std::string, std::pair<Severity, ResolveMethod>> resolve_level(
    const Store& store, Level level, const std::set<std::string>& already_resolved,
    const ResolveOptions& options) {
    if (level == Level::L1) throw InvalidArgument("resolve_level: L1 is not resolvable directly");

    // Union the level's evidence per CVE; findings at one level may be split
    // across several groups (e.g. two assigners both stale at L5).
    std::map<std::string, std::set<std::uint32_t>> evidence;
    for (const auto& f : level_findings(store, level)) {
        if (already_resolved.count(f.cve_identifier)) continue;
        for (const auto& ref : f.evidence) evidence[f.cve_identifier].insert(ref.index);
    }

    std::map<std::string, std::pair<Severity, ResolveMethod>> out;
    for (const auto& [cve, indexes] : evidence) {
        std::vector<VulnRecord> group;
        group.reserve(indexes.size());
        for (std::uint32_t idx : indexes) group.push_back(store.scan_at(idx));

        if (level == Level::L6 || level == Level::L5) {
            auto recent = recent_filter(group);
            std::set<Severity> distinct;
            for (const auto& r : recent) distinct.insert(r.severity.rating());
            Severity s = vote_records(recent);
            out[cve] = {s, distinct.size() == 1 ? ResolveMethod::Recent
                                                : ResolveMethod::RecentThenVoting};
        } else if (level == Level::L4) {
            std::vector<VulnRecord> credible;
            for (const auto& r : group) {
                if (is_credible(r.assigner, options.credible_assigners)) credible.push_back(r);
            }
            if (credible.empty()) continue; // only disreputable sources; leave unresolved
            auto prioritized = source_priority_filter(credible, dominant_os(group));
            out[cve] = {vote_records(prioritized), ResolveMethod::Voting};
        } else {
            out[cve] = {vote_records(group), ResolveMethod::Voting};
        }
    }
    return out;
}

ResolveResult resolve_all(const Store& store, const ResolveOptions& options) {
    ResolveResult result;
    result.outcome.store_fingerprint = store.fingerprint();

    StripResult stripped = strip_false_positives(store);
    result.outcome.removed_false_positives = stripped.removed;

    auto pre = inconsistent_cves(stripped.store);

    std::set<std::string> already;
    constexpr Level kBottomUp[] = {Level::L6, Level::L5, Level::L4, Level::L3, Level::L2};
    for (Level level : kBottomUp) {
        auto resolved = resolve_level(stripped.store, level, already, options);
        result.outcome.per_level_resolved[level] = resolved.size();
        for (const auto& [cve, decision] : resolved) {
            result.outcome.resolved[cve] = {decision.first, level, decision.second};
            already.insert(cve);
        }
    }

    for (const auto& cve : pre) {
        if (!result.outcome.resolved.count(cve)) result.outcome.residual_inconsistent.insert(cve);
    }

    // Rewrite: every rated record of a resolved CVE takes the resolved severity.
    std::vector<VulnRecord> rewritten = stripped.store.scan_results();
    for (auto& r : rewritten) {
        auto it = result.outcome.resolved.find(r.cve_identifier);
        if (it != result.outcome.resolved.end() && r.severity.rated()) {
            r.severity = it->second.severity;
        }
    }
    result.rewritten.add_scan_records(rewritten);
    result.rewritten.add_advisories(stripped.store.assigner_results());
    result.rewritten.add_inventories(stripped.store.image_packages());
    result.rewritten.seal();

    auto images = result.rewritten.distinct_images();
    result.outcome.per_image_average_after =
        Ratio{static_cast<std::int64_t>(result.outcome.residual_inconsistent.size()),
              static_cast<std::int64_t>(images.empty() ? 1 : images.size())};
    return result;
}

} // namespace lucid

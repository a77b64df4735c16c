#include "detect.hpp"

#include "errors.hpp"

#include <algorithm>
#include <future>

namespace lucid {

namespace {

std::string opt_key(const std::optional<std::string>& v) { return v ? "+" + *v : std::string("-"); }

std::string opt_key(const std::optional<Instant>& v) {
    return v ? "+" + std::to_string(v->micros) : std::string("-");
}

// Emits one finding per group when the group's rated members disagree on
// severity under the level's pairing rule.
template <typename GroupKeyFn, typename PairRuleFn>
std::vector<Finding> findings_by_group(const Store& store, Level level, GroupKeyFn group_key,
                                       PairRuleFn pair_rule, std::string (*describe)(const VulnRecord&)) {
    const auto& scan = store.scan_results();
    std::map<std::string, std::vector<std::uint32_t>> groups;
    for (std::uint32_t i = 0; i < scan.size(); ++i) {
        if (!scan[i].severity.rated()) continue;
        groups[group_key(scan[i])].push_back(i);
    }
    std::vector<Finding> findings;
    for (const auto& [key, members] : groups) {
        if (members.size() < 2) continue;
        std::set<std::uint32_t> participants;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const auto& ra = scan[members[a]];
                const auto& rb = scan[members[b]];
                if (ra.severity != rb.severity && pair_rule(ra, rb)) {
                    participants.insert(members[a]);
                    participants.insert(members[b]);
                }
            }
        }
        if (participants.empty()) continue;
        Finding f;
        f.level = level;
        f.cve_identifier = scan[*participants.begin()].cve_identifier;
        for (std::uint32_t idx : participants) f.evidence.push_back({TableId::ScanResults, idx});
        f.note = describe(scan[*participants.begin()]);
        findings.push_back(std::move(f));
    }
    return findings;
}

} // namespace

std::string_view level_name(Level level) {
    switch (level) {
        case Level::L1: return "L1";
        case Level::L2: return "L2";
        case Level::L3: return "L3";
        case Level::L4: return "L4";
        case Level::L5: return "L5";
        case Level::L6: return "L6";
    }
    return "L1";
}

std::set<std::string> inconsistent_cves(const Store& store) {
    std::set<std::string> out;
    std::map<std::string, std::set<Severity>> ratings;
    for (const auto& r : store.scan_results()) {
        if (r.severity.rated()) ratings[r.cve_identifier].insert(r.severity.rating());
    }
    for (const auto& [cve, seen] : ratings) {
        if (seen.size() >= 2) out.insert(cve);
    }
    return out;
}

std::vector<Finding> level_findings(const Store& store, Level level) {
    switch (level) {
        case Level::L1:
            throw InvalidArgument("L1 has no findings; use inconsistent_cves");
        case Level::L2:
            return findings_by_group(
                store, level,
                [](const VulnRecord& r) { return r.cve_identifier + '\x1f' + r.image_name; },
                [](const VulnRecord& a, const VulnRecord& b) { return a.package_name != b.package_name; },
                [](const VulnRecord& r) { return "image=" + r.image_name; });
        case Level::L3:
            return findings_by_group(
                store, level,
                [](const VulnRecord& r) {
                    return r.cve_identifier + '\x1f' + r.image_name + '\x1f' + r.package_name;
                },
                [](const VulnRecord& a, const VulnRecord& b) {
                    return a.package_version != b.package_version;
                },
                [](const VulnRecord& r) {
                    return "image=" + r.image_name + " package=" + r.package_name;
                });
        case Level::L4:
            return findings_by_group(
                store, level, [](const VulnRecord& r) { return r.cve_identifier; },
                [](const VulnRecord& a, const VulnRecord& b) { return a.assigner != b.assigner; },
                [](const VulnRecord&) { return std::string("assigners differ"); });
        case Level::L5:
            return findings_by_group(
                store, level,
                [](const VulnRecord& r) { return r.cve_identifier + '\x1f' + opt_key(r.assigner); },
                [](const VulnRecord& a, const VulnRecord& b) {
                    return a.modification_time != b.modification_time;
                },
                [](const VulnRecord& r) { return "assigner=" + r.assigner.value_or("(none)"); });
        case Level::L6:
            return findings_by_group(
                store, level,
                [](const VulnRecord& r) {
                    return r.cve_identifier + '\x1f' + opt_key(r.assigner) + '\x1f' +
                           opt_key(r.modification_time) + '\x1f' + r.tool_name;
                },
                [](const VulnRecord&, const VulnRecord&) { return true; },
                [](const VulnRecord& r) {
                    return "assigner=" + r.assigner.value_or("(none)") + " tool=" + r.tool_name;
                });
    }
    throw InvalidArgument("unknown level");
}

LevelBreakdown level_breakdown(const Store& store, int threads) {
    auto images = store.distinct_images();
    if (images.empty()) throw InvalidArgument("level_breakdown: store has no images");

    LevelBreakdown out;
    out.store_fingerprint = store.fingerprint();
    out.l1_total = inconsistent_cves(store).size();
    out.per_image_average = Ratio{static_cast<std::int64_t>(out.l1_total),
                                  static_cast<std::int64_t>(images.size())};

    constexpr Level kLevels[] = {Level::L2, Level::L3, Level::L4, Level::L5, Level::L6};
    auto cves_of = [&store](Level level) {
        std::set<std::string> cves;
        for (const auto& f : level_findings(store, level)) cves.insert(f.cve_identifier);
        return cves;
    };

    if (threads > 1) {
        std::vector<std::future<std::set<std::string>>> futures;
        for (Level level : kLevels) {
            futures.push_back(std::async(std::launch::async, cves_of, level));
        }
        for (std::size_t i = 0; i < futures.size(); ++i) out.level_cves[kLevels[i]] = futures[i].get();
    } else {
        for (Level level : kLevels) out.level_cves[level] = cves_of(level);
    }

    for (Level level : kLevels) {
        const auto& cves = out.level_cves[level];
        double percent = out.l1_total == 0
                             ? 0.0
                             : 100.0 * static_cast<double>(cves.size()) / static_cast<double>(out.l1_total);
        out.per_level[level] = {cves.size(), percent};
    }
    return out;
}

namespace {

enum class FpKind { Hard, Soft };

std::vector<RecordRef> false_positives(const Store& store, FpKind kind) {
    std::vector<RecordRef> out;
    const auto& scan = store.scan_results();
    for (std::uint32_t i = 0; i < scan.size(); ++i) {
        const auto& r = scan[i];
        const PackageInventory* inv = store.inventory_for(r.image_name);
        if (!inv || inv->os_family == PackageType::Unknown) continue;
        bool name_present = inv->contains_name(r.package_name);
        bool exact_present = name_present && inv->contains(r.package_name, r.package_version);
        if (kind == FpKind::Hard ? !name_present : (name_present && !exact_present)) {
            out.push_back({TableId::ScanResults, i});
        }
    }
    return out;
}

} // namespace

std::vector<RecordRef> hard_false_positives(const Store& store) {
    return false_positives(store, FpKind::Hard);
}

std::vector<RecordRef> soft_false_positives(const Store& store) {
    return false_positives(store, FpKind::Soft);
}

} // namespace lucid

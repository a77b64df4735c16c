#include "resolve.hpp"

#include "errors.hpp"

#include <doctest.h>

using namespace lucid;

namespace {

VulnRecord rec(std::string cve, std::string image, std::string pkg, std::string ver,
               SeverityLabel sev, std::string tool, std::optional<std::string> assigner,
               std::optional<std::string> mtime, PackageType os = PackageType::Debian) {
    VulnRecord r;
    r.cve_identifier = std::move(cve);
    r.image_name = std::move(image);
    r.package_name = std::move(pkg);
    r.package_version = std::move(ver);
    r.severity = sev;
    r.tool_name = std::move(tool);
    r.package_type = os;
    r.assigner = std::move(assigner);
    if (mtime) r.modification_time = parse_timestamp(*mtime);
    return r;
}

Store sealed(std::vector<VulnRecord> records, std::vector<PackageInventory> inventories = {}) {
    Store store;
    store.add_scan_records(records);
    store.add_inventories(inventories);
    store.seal();
    return store;
}

} // namespace

TEST_CASE("recent_filter keeps the records at the newest timestamp") {
    auto critical = rec("CVE-2022-1292", "img", "openssl", "1.1", Severity::Critical, "snyk", "NVD",
                        "2023-02-14T15:08:45.939691Z");
    auto medium = rec("CVE-2022-1292", "img", "openssl", "1.1", Severity::Medium, "snyk", "NVD",
                      "2023-03-27T02:04:36.826085Z");
    auto kept = recent_filter({critical, medium});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].severity.rating() == Severity::Medium);
}

TEST_CASE("recent_filter is identity when timestamps are uniform or absent") {
    auto a = rec("CVE-2020-0001", "img", "p", "1", Severity::Low, "snyk", "NVD",
                 "2023-01-01T00:00:00Z");
    auto b = rec("CVE-2020-0001", "img", "p", "2", Severity::High, "snyk", "NVD",
                 "2023-01-01T00:00:00Z");
    CHECK(recent_filter({a, b}).size() == 2);

    auto c = rec("CVE-2020-0002", "img", "p", "1", Severity::Low, "clair", {}, {});
    auto d = rec("CVE-2020-0002", "img", "p", "2", Severity::High, "clair", {}, {});
    CHECK(recent_filter({c, d}).size() == 2);
}

TEST_CASE("recent_filter drops undated records when any record is dated") {
    auto h1 = rec("CVE-2020-0001", "img", "p", "1", Severity::High, "snyk", "NVD",
                  "2023-01-01T00:00:00Z");
    auto h2 = rec("CVE-2020-0001", "img", "p", "2", Severity::High, "trivy", "NVD",
                  "2023-01-01T00:00:00Z");
    auto undated = rec("CVE-2020-0001", "img", "p", "3", Severity::Low, "clair", {}, {});
    auto kept = recent_filter({h1, h2, undated});
    REQUIRE(kept.size() == 2);
    for (const auto& r : kept) CHECK(r.severity.rating() == Severity::High);
}

TEST_CASE("recent_filter output shares one timestamp equal to the input maximum") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<VulnRecord> records;
        std::optional<Instant> max_time;
        int n = 1 + static_cast<int>(rng.next_below(6));
        for (int i = 0; i < n; ++i) {
            bool dated = rng.next_below(4) != 0;
            std::optional<std::string> mtime;
            if (dated) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "2023-01-%02dT00:00:00Z",
                              static_cast<int>(rng.next_int(1, 28)));
                mtime = buf;
            }
            auto r = rec("CVE-2020-0001", "img", "p", std::to_string(i),
                         static_cast<Severity>(rng.next_int(0, 4)), "snyk", "NVD", mtime);
            if (r.modification_time && (!max_time || *r.modification_time > *max_time)) {
                max_time = r.modification_time;
            }
            records.push_back(std::move(r));
        }
        auto kept = recent_filter(records);
        REQUIRE(!kept.empty());
        if (max_time) {
            for (const auto& r : kept) CHECK(r.modification_time == max_time);
        } else {
            CHECK(kept.size() == records.size());
        }
    }
}

TEST_CASE("recent_filter prefers the per-assigner inner time when present") {
    auto stale = rec("CVE-2020-0001", "img", "p", "1", Severity::Low, "snyk", "NVD",
                     "2023-06-01T00:00:00Z");
    auto fresh = rec("CVE-2020-0001", "img", "p", "1", Severity::High, "snyk", "NVD",
                     "2023-01-01T00:00:00Z");
    // The general modification time says `stale` is newer, but the
    // per-assigner inner time decides the other way.
    stale.inner_modification_time = parse_timestamp("2023-02-01T00:00:00Z");
    fresh.inner_modification_time = parse_timestamp("2023-03-01T00:00:00Z");
    auto kept = recent_filter({stale, fresh});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].severity.rating() == Severity::High);
}

TEST_CASE("recent_filter rejects empty and mixed-CVE input") {
    CHECK_THROWS_AS(recent_filter({}), InvalidArgument);
    auto a = rec("CVE-2020-0001", "img", "p", "1", Severity::Low, "snyk", "NVD", {});
    auto b = rec("CVE-2020-0002", "img", "p", "1", Severity::Low, "snyk", "NVD", {});
    CHECK_THROWS_AS(recent_filter({a, b}), InvalidArgument);
}

TEST_CASE("vote picks the majority severity") {
    std::vector<Severity> ballots(4, Severity::Low);
    ballots.insert(ballots.end(), 5, Severity::Medium);
    CHECK(vote(ballots) == Severity::Medium);
    CHECK(vote({Severity::High}) == Severity::High);
}

TEST_CASE("vote breaks ties toward the higher severity") {
    CHECK(vote({Severity::Low, Severity::Low, Severity::High, Severity::High}) == Severity::High);
    CHECK(vote({Severity::Critical, Severity::Low}) == Severity::Critical);
    CHECK(vote({Severity::None, Severity::None, Severity::Low, Severity::Low}) == Severity::Low);
}

TEST_CASE("vote output is always drawn from its input") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Severity> ballots;
        std::set<Severity> present;
        for (int i = 0, n = 1 + static_cast<int>(rng.next_below(8)); i < n; ++i) {
            auto s = static_cast<Severity>(rng.next_int(0, 4));
            ballots.push_back(s);
            present.insert(s);
        }
        CHECK(present.count(vote(ballots)) == 1);
    }
}

TEST_CASE("vote rejects empty input and Unapproved members") {
    CHECK_THROWS_AS(vote({}), InvalidArgument);
    auto unapproved = rec("CVE-2020-0001", "img", "p", "1", SeverityLabel::unapproved(), "t", {}, {});
    CHECK_THROWS_AS(vote_records({unapproved}), InvalidArgument);
}

TEST_CASE("source_priority_filter keeps the OS-matched assigner") {
    auto ubuntu = rec("CVE-2022-41903", "img", "git", "2.30", Severity::Low, "trivy", "Ubuntu", {});
    auto nvd = rec("CVE-2022-41903", "img", "git", "2.30", Severity::Critical, "snyk", "NVD", {});

    auto debian_pick = source_priority_filter({ubuntu, nvd}, PackageType::Debian);
    REQUIRE(debian_pick.size() == 1);
    CHECK(debian_pick[0].assigner == "Ubuntu");

    // No source match: unchanged.
    auto alpine_pick = source_priority_filter({ubuntu}, PackageType::Alpine);
    CHECK(alpine_pick.size() == 1);
    CHECK(alpine_pick[0].assigner == "Ubuntu");
}

TEST_CASE("source_priority_filter composes with vote for multi-record matches") {
    auto m1 = rec("CVE-2020-0001", "img", "p", "1", Severity::Medium, "trivy", "Redhat", {});
    auto m2 = rec("CVE-2020-0001", "img", "p", "2", Severity::Medium, "snyk", "Redhat", {});
    auto lo = rec("CVE-2020-0001", "img", "p", "3", Severity::Low, "clair2", "Redhat", {});
    auto kept = source_priority_filter({m1, m2, lo}, PackageType::Redhat);
    CHECK(kept.size() == 3);
    CHECK(vote_records(kept) == Severity::Medium);
}

TEST_CASE("resolve_level: L6 tie-break goes to the higher severity") {
    auto store = sealed({
        rec("CVE-2021-33574", "img", "glibc", "2.31", Severity::Critical, "snyk", "SNYK",
            "2023-03-01T10:00:00Z"),
        rec("CVE-2021-33574", "img", "glibc", "2.31", Severity::Low, "snyk", "SNYK",
            "2023-03-01T10:00:00Z"),
    });
    auto resolved = resolve_level(store, Level::L6, {});
    REQUIRE(resolved.count("CVE-2021-33574"));
    CHECK(resolved["CVE-2021-33574"].first == Severity::Critical);
    CHECK(resolved["CVE-2021-33574"].second == ResolveMethod::RecentThenVoting);
}

TEST_CASE("resolve_level: L5 settles by recency alone when it can") {
    auto store = sealed({
        rec("CVE-2020-35527", "img", "sqlite", "3.34", Severity::Critical, "snyk", "NVD",
            "2022-12-08T22:29:00Z"),
        rec("CVE-2020-35527", "img", "sqlite", "3.34", Severity::Medium, "snyk", "NVD",
            "2023-02-14T13:33:10.363339Z"),
    });
    auto resolved = resolve_level(store, Level::L5, {});
    REQUIRE(resolved.count("CVE-2020-35527"));
    CHECK(resolved["CVE-2020-35527"].first == Severity::Medium);
    CHECK(resolved["CVE-2020-35527"].second == ResolveMethod::Recent);
}

TEST_CASE("resolve_level: L4 ignores disreputable assigners entirely") {
    auto store = sealed({
        rec("CVE-2020-0001", "img", "p", "1", Severity::Low, "trivy", "gentoo-glsa", {}),
        rec("CVE-2020-0001", "img", "p", "1", Severity::High, "snyk", "suse-sec", {}),
    });
    auto resolved = resolve_level(store, Level::L4, {});
    CHECK(resolved.empty());
}

TEST_CASE("resolve_level: L4 uses source priority then vote") {
    auto store = sealed({
        rec("CVE-2022-41903", "img", "git", "2.30", Severity::Medium, "trivy", "Ubuntu", {}),
        rec("CVE-2022-41903", "img", "git", "2.30", Severity::Critical, "snyk", "NVD", {}),
    });
    auto resolved = resolve_level(store, Level::L4, {});
    REQUIRE(resolved.count("CVE-2022-41903"));
    CHECK(resolved["CVE-2022-41903"].first == Severity::Medium); // Debian image -> Ubuntu wins
}

TEST_CASE("resolve_level skips CVEs already settled at a lower level") {
    auto store = sealed({
        rec("CVE-2020-0001", "img", "a", "1", Severity::Low, "trivy", "NVD", "2023-01-01T00:00:00Z"),
        rec("CVE-2020-0001", "img", "a", "1", Severity::High, "snyk", "Ubuntu", "2023-01-01T00:00:00Z"),
    });
    CHECK(resolve_level(store, Level::L4, {}).size() == 1);
    CHECK(resolve_level(store, Level::L4, {"CVE-2020-0001"}).empty());
}

TEST_CASE("strip_false_positives drops hard FPs and stale Unapproved duplicates") {
    PackageInventory inv;
    inv.image_name = "img";
    inv.os_family = PackageType::Debian;
    inv.entries = {{"curl", "1.0", PackageOrigin::PackageManager}};
    auto store = sealed(
        {
            rec("CVE-2020-0001", "img", "curl", "1.0", Severity::Medium, "trivy", {}, {}),
            // stale Unapproved duplicate in the same image and tool
            rec("CVE-2020-0001", "img", "curl", "1.0", SeverityLabel::unapproved(), "trivy", {}, {}),
            // same CVE, Unapproved but in another tool: kept
            rec("CVE-2020-0001", "img", "curl", "1.0", SeverityLabel::unapproved(), "snyk", {}, {}),
            // phantom package
            rec("CVE-2020-0002", "img", "ghostpkg", "1.0", Severity::Low, "trivy", {}, {}),
            // soft FP: version not in inventory; retained
            rec("CVE-2020-0003", "img", "curl", "9.9", Severity::Low, "trivy", {}, {}),
        },
        {inv});
    auto result = strip_false_positives(store);
    CHECK(result.removed.size() == 2);
    CHECK(result.store.scan_results().size() == 3);
    for (const auto& r : result.store.scan_results()) {
        CHECK(r.package_name != "ghostpkg");
        if (!r.severity.rated()) CHECK(r.tool_name == "snyk");
    }
}

TEST_CASE("strip_false_positives without inventories changes nothing") {
    auto store = sealed({
        rec("CVE-2020-0001", "img", "anything", "1.0", Severity::Low, "trivy", {}, {}),
    });
    auto result = strip_false_positives(store);
    CHECK(result.removed.empty());
    CHECK(result.store.scan_results().size() == 1);
}

TEST_CASE("resolve_all walks bottom-up and excludes settled CVEs upward") {
    auto store = sealed({
        // L6 CVE (also matches L5's fields with a third stale record)
        rec("CVE-2020-0001", "img", "a", "1", Severity::High, "snyk", "SNYK", "2023-03-01T00:00:00Z"),
        rec("CVE-2020-0001", "img2", "a", "1", Severity::High, "snyk", "SNYK", "2023-03-01T00:00:00Z"),
        rec("CVE-2020-0001", "img", "a", "1", Severity::Low, "snyk", "SNYK", "2023-03-01T00:00:00Z"),
        rec("CVE-2020-0001", "img", "a", "1", Severity::Medium, "snyk", "SNYK", "2023-01-01T00:00:00Z"),
        // plain L5 CVE
        rec("CVE-2020-0002", "img", "b", "1", Severity::Critical, "snyk", "NVD", "2023-01-01T00:00:00Z"),
        rec("CVE-2020-0002", "img", "b", "1", Severity::Medium, "snyk", "NVD", "2023-02-01T00:00:00Z"),
        // L4 CVE with credible assigners
        rec("CVE-2020-0003", "img", "c", "1", Severity::Medium, "trivy", "Ubuntu", "2023-01-01T00:00:00Z"),
        rec("CVE-2020-0003", "img", "c", "1", Severity::Low, "snyk", "NVD", "2023-01-01T00:00:00Z"),
        // L2 CVE, no assigners
        rec("CVE-2020-0004", "img", "d", "1", Severity::Low, "trivy", {}, {}),
        rec("CVE-2020-0004", "img", "e", "1", Severity::High, "snyk", {}, {}),
        // residual: non-credible assigner divergence only
        rec("CVE-2020-0005", "img", "f", "1", Severity::Low, "trivy", "suse-sec", {}),
        rec("CVE-2020-0005", "img", "f", "1", Severity::High, "snyk", "gentoo-glsa", {}),
    });
    auto result = resolve_all(store);
    const auto& out = result.outcome;

    REQUIRE(out.resolved.count("CVE-2020-0001"));
    CHECK(out.resolved.at("CVE-2020-0001").level == Level::L6);
    CHECK(out.resolved.at("CVE-2020-0001").severity == Severity::High); // 2x High vs 1x Low at L6
    REQUIRE(out.resolved.count("CVE-2020-0002"));
    CHECK(out.resolved.at("CVE-2020-0002").level == Level::L5);
    CHECK(out.resolved.at("CVE-2020-0002").severity == Severity::Medium);
    REQUIRE(out.resolved.count("CVE-2020-0003"));
    CHECK(out.resolved.at("CVE-2020-0003").level == Level::L4);
    CHECK(out.resolved.at("CVE-2020-0003").severity == Severity::Medium);
    REQUIRE(out.resolved.count("CVE-2020-0004"));
    CHECK(out.resolved.at("CVE-2020-0004").level == Level::L2);
    CHECK(out.residual_inconsistent == std::set<std::string>{"CVE-2020-0005"});

    std::size_t per_level_total = 0;
    for (const auto& [level, count] : out.per_level_resolved) per_level_total += count;
    CHECK(per_level_total == out.resolved.size());

    // The rewritten store carries the resolved severities and resolves nothing
    // further (idempotence).
    auto second = resolve_all(result.rewritten);
    CHECK(second.outcome.resolved.empty());
    CHECK(second.outcome.residual_inconsistent == out.residual_inconsistent);
}

TEST_CASE("resolve_all on a consistent store is a fixed point") {
    auto store = sealed({
        rec("CVE-2020-0001", "img", "a", "1", Severity::Low, "trivy", {}, {}),
        rec("CVE-2020-0001", "img", "a", "1", Severity::Low, "snyk", {}, {}),
    });
    auto result = resolve_all(store);
    CHECK(result.outcome.resolved.empty());
    CHECK(result.outcome.residual_inconsistent.empty());
    CHECK(result.outcome.removed_false_positives.empty());
    CHECK(result.rewritten.scan_results() == store.scan_results());
}

TEST_CASE("removing the L6 evidence moves a resolution up, never duplicates it") {
    std::vector<VulnRecord> records = {
        rec("CVE-2020-0001", "img", "a", "1", Severity::High, "snyk", "SNYK", "2023-03-01T00:00:00Z"),
        rec("CVE-2020-0001", "img2", "a", "1", Severity::High, "snyk", "SNYK", "2023-03-01T00:00:00Z"),
        rec("CVE-2020-0001", "img", "a", "1", Severity::Low, "snyk", "SNYK", "2023-03-01T00:00:00Z"),
        rec("CVE-2020-0001", "img", "a", "1", Severity::Medium, "snyk", "SNYK", "2023-01-01T00:00:00Z"),
    };
    auto with_l6 = resolve_all(sealed(records));
    CHECK(with_l6.outcome.resolved.at("CVE-2020-0001").level == Level::L6);

    // Drop the intra-tool duplicate; the stale record now decides at L5.
    records.erase(records.begin() + 2);
    auto without_l6 = resolve_all(sealed(records));
    CHECK(without_l6.outcome.resolved.at("CVE-2020-0001").level == Level::L5);
    CHECK(without_l6.outcome.resolved.at("CVE-2020-0001").severity == Severity::High);
    CHECK(without_l6.outcome.per_level_resolved.at(Level::L5) == 1);
    CHECK(without_l6.outcome.per_level_resolved.at(Level::L6) == 0);
}

TEST_CASE("resolved and residual partition the pre-resolution inconsistent set") {
    auto store = sealed({
        rec("CVE-2020-0001", "img", "a", "1", Severity::Low, "trivy", "NVD", "2023-01-01T00:00:00Z"),
        rec("CVE-2020-0001", "img", "a", "1", Severity::High, "trivy", "NVD", "2023-02-01T00:00:00Z"),
        rec("CVE-2020-0002", "img", "b", "1", Severity::Low, "trivy", "x-db", {}),
        rec("CVE-2020-0002", "img", "b", "1", Severity::High, "snyk", "y-db", {}),
    });
    auto pre = inconsistent_cves(store);
    auto result = resolve_all(store);
    std::set<std::string> uni = result.outcome.residual_inconsistent;
    for (const auto& [cve, res] : result.outcome.resolved) {
        CHECK(uni.insert(cve).second); // disjoint
    }
    CHECK(uni == pre);
}

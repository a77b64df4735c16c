#include "detect.hpp"

#include "errors.hpp"
#include "store.hpp"

#include <doctest.h>

using namespace lucid;

namespace {

VulnRecord rec(std::string cve, std::string image, std::string pkg, std::string ver,
               SeverityLabel sev, std::string tool, std::optional<std::string> assigner,
               std::optional<std::string> mtime) {
    VulnRecord r;
    r.cve_identifier = std::move(cve);
    r.image_name = std::move(image);
    r.package_name = std::move(pkg);
    r.package_version = std::move(ver);
    r.severity = sev;
    r.tool_name = std::move(tool);
    r.package_type = PackageType::Debian;
    r.assigner = std::move(assigner);
    if (mtime) r.modification_time = parse_timestamp(*mtime);
    return r;
}

Store sealed(std::vector<VulnRecord> records,
             std::vector<PackageInventory> inventories = {}) {
    Store store;
    store.add_scan_records(records);
    store.add_inventories(inventories);
    store.seal();
    return store;
}

std::set<std::string> finding_cves(const std::vector<Finding>& findings) {
    std::set<std::string> cves;
    for (const auto& f : findings) cves.insert(f.cve_identifier);
    return cves;
}

} // namespace

TEST_CASE("inconsistent_cves follows the rating-set rule") {
    auto store = sealed({
        rec("CVE-2019-15847", "img", "gcc-8", "1", Severity::Low, "trivy", {}, {}),
        rec("CVE-2019-15847", "img", "libmpx-2", "1", Severity::High, "snyk", {}, {}),
        rec("CVE-2020-0002", "img", "curl", "1", Severity::Medium, "trivy", {}, {}),
        rec("CVE-2020-0002", "img", "curl", "1", Severity::Medium, "snyk", {}, {}),
        rec("CVE-2020-0002", "img", "curl", "1", Severity::Medium, "clair", {}, {}),
        rec("CVE-2020-0003", "img", "tar", "1", Severity::Medium, "trivy", {}, {}),
        rec("CVE-2020-0003", "img", "tar", "1", SeverityLabel::unapproved(), "snyk", {}, {}),
    });
    auto cves = inconsistent_cves(store);
    CHECK(cves == std::set<std::string>{"CVE-2019-15847"});
}

TEST_CASE("L2: same image and CVE, different package names and severities") {
    auto store = sealed({
        rec("CVE-2019-15847", "img", "gcc-8", "8.3", Severity::Low, "trivy", {}, {}),
        rec("CVE-2019-15847", "img", "libmpx-2", "8.3", Severity::High, "snyk", {}, {}),
        // same packages, different severity: not an L2 matter
        rec("CVE-2020-0002", "img", "curl", "1", Severity::Low, "trivy", {}, {}),
        rec("CVE-2020-0002", "img", "curl", "1", Severity::High, "snyk", {}, {}),
        // different image: no pairing
        rec("CVE-2020-0003", "img", "tar", "1", Severity::Low, "trivy", {}, {}),
        rec("CVE-2020-0003", "other", "gzip", "1", Severity::High, "trivy", {}, {}),
    });
    auto findings = level_findings(store, Level::L2);
    CHECK(finding_cves(findings) == std::set<std::string>{"CVE-2019-15847"});
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].evidence.size() == 2);
}

TEST_CASE("L3: same package, different version and severity") {
    auto store = sealed({
        rec("CVE-2021-23840", "img", "curl", "7.77.0.1-ph4", Severity::High, "trivy", {}, {}),
        rec("CVE-2021-23840", "img", "curl", "7.68.0-1ubuntu2.6", Severity::Medium, "snyk", {}, {}),
        // same version: no L3
        rec("CVE-2020-0002", "img", "tar", "1.34", Severity::Low, "trivy", {}, {}),
        rec("CVE-2020-0002", "img", "tar", "1.34", Severity::High, "snyk", {}, {}),
    });
    auto findings = level_findings(store, Level::L3);
    CHECK(finding_cves(findings) == std::set<std::string>{"CVE-2021-23840"});
}

TEST_CASE("L4: same CVE, different assigner and severity") {
    auto store = sealed({
        rec("CVE-2021-4193", "img", "vim", "8.2", Severity::Medium, "trivy", "REDHAT", {}),
        rec("CVE-2021-4193", "img", "vim", "8.2", Severity::Low, "snyk", "UBUNTU", {}),
        // same assigner: no L4
        rec("CVE-2020-0002", "img", "curl", "1", Severity::Low, "trivy", "NVD", {}),
        rec("CVE-2020-0002", "img", "curl", "1", Severity::High, "snyk", "NVD", {}),
    });
    auto findings = level_findings(store, Level::L4);
    CHECK(finding_cves(findings) == std::set<std::string>{"CVE-2021-4193"});
}

TEST_CASE("L4 treats an absent assigner as unequal to any concrete one") {
    auto store = sealed({
        rec("CVE-2020-0001", "img", "curl", "1", Severity::Low, "clair", {}, {}),
        rec("CVE-2020-0001", "img", "curl", "1", Severity::High, "trivy", "NVD", {}),
        // two absents compare equal: no divergence
        rec("CVE-2020-0002", "img", "tar", "1", Severity::Low, "clair", {}, {}),
        rec("CVE-2020-0002", "img", "tar", "2", Severity::High, "clair", {}, {}),
    });
    auto findings = level_findings(store, Level::L4);
    CHECK(finding_cves(findings) == std::set<std::string>{"CVE-2020-0001"});
}

TEST_CASE("L5: same assigner, different modification time and severity") {
    auto store = sealed({
        rec("CVE-2020-35527", "img", "sqlite", "3.34", Severity::Critical, "snyk", "NVD",
            "2022-12-08T22:29:00Z"),
        rec("CVE-2020-35527", "img", "sqlite", "3.34", Severity::Medium, "snyk", "NVD",
            "2023-02-14T13:33:10.363339Z"),
        // different assigners: L4's business, not L5's
        rec("CVE-2020-0002", "img", "curl", "1", Severity::Low, "trivy", "NVD",
            "2023-01-01T00:00:00Z"),
        rec("CVE-2020-0002", "img", "curl", "1", Severity::High, "snyk", "UBUNTU",
            "2023-01-02T00:00:00Z"),
    });
    auto findings = level_findings(store, Level::L5);
    CHECK(finding_cves(findings) == std::set<std::string>{"CVE-2020-35527"});
}

TEST_CASE("L6: everything equal except the severity") {
    auto store = sealed({
        rec("CVE-2021-33574", "img", "glibc", "2.31", Severity::Critical, "snyk", "SNYK",
            "2023-03-01T10:00:00Z"),
        rec("CVE-2021-33574", "img", "glibc", "2.31", Severity::Low, "snyk", "SNYK",
            "2023-03-01T10:00:00Z"),
        // same fields but different tool: not intra-tool
        rec("CVE-2020-0002", "img", "curl", "1", Severity::Low, "trivy", "NVD",
            "2023-01-01T00:00:00Z"),
        rec("CVE-2020-0002", "img", "curl", "1", Severity::High, "snyk", "NVD",
            "2023-01-01T00:00:00Z"),
    });
    auto findings = level_findings(store, Level::L6);
    CHECK(finding_cves(findings) == std::set<std::string>{"CVE-2021-33574"});
}

TEST_CASE("L1 is not a findings level") {
    auto store = sealed({});
    CHECK_THROWS_AS(level_findings(store, Level::L1), InvalidArgument);
}

TEST_CASE("level findings only name L1-inconsistent CVEs") {
    auto store = sealed({
        rec("CVE-2020-0001", "img", "a", "1", Severity::Low, "trivy", "NVD", "2023-01-01T00:00:00Z"),
        rec("CVE-2020-0001", "img", "b", "2", Severity::High, "snyk", "UBUNTU", "2023-01-02T00:00:00Z"),
        rec("CVE-2020-0002", "img", "c", "1", Severity::Medium, "trivy", "NVD", "2023-01-01T00:00:00Z"),
    });
    auto l1 = inconsistent_cves(store);
    for (Level level : {Level::L2, Level::L3, Level::L4, Level::L5, Level::L6}) {
        for (const auto& cve : finding_cves(level_findings(store, level))) {
            CHECK(l1.count(cve) == 1);
        }
    }
}

TEST_CASE("every L6 evidence pair satisfies the L5 equality fields") {
    auto store = sealed({
        rec("CVE-2020-0001", "img", "a", "1", Severity::Low, "snyk", "SNYK", "2023-01-01T00:00:00Z"),
        rec("CVE-2020-0001", "img", "a", "1", Severity::High, "snyk", "SNYK", "2023-01-01T00:00:00Z"),
        rec("CVE-2020-0001", "img", "a", "1", Severity::Medium, "snyk", "SNYK", "2023-02-01T00:00:00Z"),
    });
    for (const auto& f : level_findings(store, Level::L6)) {
        for (std::size_t i = 0; i < f.evidence.size(); ++i) {
            for (std::size_t j = i + 1; j < f.evidence.size(); ++j) {
                const auto& a = store.scan_at(f.evidence[i].index);
                const auto& b = store.scan_at(f.evidence[j].index);
                CHECK(a.cve_identifier == b.cve_identifier);
                CHECK(a.assigner == b.assigner);
                CHECK(a.modification_time == b.modification_time);
                CHECK(a.tool_name == b.tool_name);
            }
        }
    }
}

TEST_CASE("level_breakdown reports counts, percentages and the per-image average") {
    auto store = sealed({
        rec("CVE-2020-0001", "img-a", "a", "1", Severity::Low, "trivy", "REDHAT", {}),
        rec("CVE-2020-0001", "img-a", "a", "1", Severity::High, "snyk", "UBUNTU", {}),
        rec("CVE-2020-0002", "img-b", "b", "1", Severity::Low, "trivy", {}, {}),
        rec("CVE-2020-0002", "img-b", "c", "1", Severity::High, "snyk", {}, {}),
        rec("CVE-2020-0003", "img-b", "d", "1", Severity::Medium, "trivy", {}, {}),
    });
    auto breakdown = level_breakdown(store);
    CHECK(breakdown.l1_total == 2);
    CHECK(breakdown.per_level.at(Level::L2).distinct_cves == 1);
    CHECK(breakdown.per_level.at(Level::L2).percent_of_l1 == doctest::Approx(50.0));
    CHECK(breakdown.per_level.at(Level::L4).distinct_cves == 1);
    CHECK(breakdown.per_level.at(Level::L3).distinct_cves == 0);
    CHECK(breakdown.per_image_average == Ratio{2, 2});

    // threads must not change anything
    auto parallel = level_breakdown(store, 4);
    CHECK(parallel.per_level == breakdown.per_level);
    CHECK(parallel.level_cves == breakdown.level_cves);
}

TEST_CASE("per-image average formats as an exact half-up rational") {
    CHECK(Ratio{1669, 168}.rounded(2) == "9.93");
    CHECK(Ratio{1669, 168}.value() == doctest::Approx(9.934523809));
    CHECK(Ratio{486, 168}.rounded(2) == "2.89");
    CHECK(Ratio{487, 168}.rounded(2) == "2.90");
    CHECK(Ratio{0, 7}.rounded(2) == "0.00");
}

TEST_CASE("fully consistent store yields an all-zero breakdown") {
    auto store = sealed({
        rec("CVE-2020-0001", "img", "a", "1", Severity::Low, "trivy", {}, {}),
        rec("CVE-2020-0001", "img", "a", "1", Severity::Low, "snyk", {}, {}),
    });
    auto breakdown = level_breakdown(store);
    CHECK(breakdown.l1_total == 0);
    for (const auto& [level, row] : breakdown.per_level) {
        CHECK(row.distinct_cves == 0);
        CHECK(row.percent_of_l1 == 0.0);
    }
    CHECK(breakdown.per_image_average == Ratio{0, 1});
}

TEST_CASE("level_breakdown without images is an error") {
    auto store = sealed({});
    CHECK_THROWS_AS(level_breakdown(store), InvalidArgument);
}

TEST_CASE("hard and soft false positives split by inventory membership") {
    PackageInventory inv;
    inv.image_name = "img";
    inv.os_family = PackageType::Debian;
    inv.entries = {{"curl", "7.68.0-1ubuntu2.6", PackageOrigin::PackageManager},
                   {"tar", "1.34-r0", PackageOrigin::PackageManager}};
    auto store = sealed(
        {
            rec("CVE-2020-0001", "img", "ghostpkg", "1.0", Severity::Low, "trivy", {}, {}),
            rec("CVE-2020-0002", "img", "curl", "7.68.0-1ubuntu2.6", Severity::Low, "trivy", {}, {}),
            rec("CVE-2020-0003", "img", "tar", "1.30.5.318", Severity::Medium, "snyk", {}, {}),
        },
        {inv});
    auto hard = hard_false_positives(store);
    auto soft = soft_false_positives(store);
    REQUIRE(hard.size() == 1);
    CHECK(store.scan_at(hard[0].index).package_name == "ghostpkg");
    REQUIRE(soft.size() == 1);
    CHECK(store.scan_at(soft[0].index).package_name == "tar");

    // mutual exclusion, structurally
    for (const auto& h : hard) {
        for (const auto& s : soft) CHECK(h != s);
    }
}

TEST_CASE("images without a usable inventory are exempt from FP detection") {
    PackageInventory unknown;
    unknown.image_name = "scratch";
    unknown.os_family = PackageType::Unknown;
    auto store = sealed(
        {
            rec("CVE-2020-0001", "scratch", "ghostpkg", "1.0", Severity::Low, "trivy", {}, {}),
            rec("CVE-2020-0002", "no-inventory", "phantom", "1.0", Severity::Low, "trivy", {}, {}),
        },
        {unknown});
    CHECK(hard_false_positives(store).empty());
    CHECK(soft_false_positives(store).empty());
}

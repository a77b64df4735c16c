#include "ingest.hpp"

#include "errors.hpp"
#include "util.hpp"

#include <json.hpp>

#include <set>
#include <sstream>

namespace lucid {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

json parse_json(std::string_view raw) {
    try {
        return json::parse(raw);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed document at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

std::optional<std::string> opt_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ParseError(std::string("field \"") + key + "\" must be a string");
    std::string v = it->get<std::string>();
    if (v.empty()) return std::nullopt; // absent means absent, never ""
    return v;
}

std::string require_string(const json& obj, const char* key) {
    auto v = opt_string(obj, key);
    if (!v) throw ParseError(std::string("missing required field \"") + key + "\"");
    return *v;
}

std::optional<Instant> opt_instant(const json& obj, const char* key) {
    auto v = opt_string(obj, key);
    if (!v) return std::nullopt;
    return parse_timestamp(*v);
}

SeverityLabel severity_or_unapproved(std::string_view raw, std::string_view source,
                                     std::vector<std::string>* warnings) {
    try {
        return normalize_severity(raw, source);
    } catch (const InvalidArgument& e) {
        if (warnings) warnings->push_back(std::string(e.what()) + "; record kept as Unapproved");
        return SeverityLabel::unapproved();
    }
}

bool clair_style_tool(std::string_view tool) { return fold_token(tool) == "clair"; }

void finish_record(VulnRecord& rec, std::vector<std::string>* warnings) {
    rec.package_name = to_lower(rec.package_name);
    if (clair_style_tool(rec.tool_name) && (rec.assigner || rec.modification_time)) {
        // Clair-style sources carry neither field; normalize rather than store junk.
        if (warnings) {
            warnings->push_back("clair-style record for " + rec.cve_identifier +
                                " carried assigner/modification_time; fields dropped");
        }
        rec.assigner.reset();
        rec.modification_time.reset();
    }
}

PackageType package_type_from_os_token(std::string_view token) {
    std::string t = fold_token(token);
    if (t == "debian" || t == "ubuntu") return PackageType::Debian;
    if (t == "alpine") return PackageType::Alpine;
    if (t == "redhat" || t == "rhel" || t == "centos" || t == "fedora" || t == "amazon" ||
        t == "oracle" || t == "rocky" || t == "almalinux") {
        return PackageType::Redhat;
    }
    return PackageType::Unknown;
}

void parse_canonical_document(const json& doc, ScanParseResult& out) {
    std::string image = require_string(doc, "image_name");
    std::string tool = require_string(doc, "tool_name");
    PackageType ptype = PackageType::Unknown;
    if (auto pt = opt_string(doc, "package_type")) {
        auto parsed = package_type_from_name(*pt);
        if (!parsed) throw ParseError("unknown package_type \"" + *pt + "\"");
        ptype = *parsed;
    }
    auto findings = doc.find("findings");
    if (findings == doc.end() || !findings->is_array()) {
        throw ParseError("canonical report needs a findings[] array");
    }
    for (const auto& f : *findings) {
        VulnRecord rec;
        rec.image_name = image;
        rec.tool_name = tool;
        rec.package_type = ptype;
        rec.cve_identifier = require_string(f, "cve_identifier");
        if (!is_cve_identifier(rec.cve_identifier)) {
            throw ParseError("invalid CVE identifier \"" + rec.cve_identifier + "\"");
        }
        rec.package_name = require_string(f, "package_name");
        rec.package_version = require_string(f, "package_version");
        rec.severity = severity_or_unapproved(require_string(f, "severity"), tool, &out.warnings);
        rec.assigner = opt_string(f, "assigner");
        rec.modification_time = opt_instant(f, "modification_time");
        rec.inner_modification_time = opt_instant(f, "inner_modification_time");
        finish_record(rec, &out.warnings);
        out.records.push_back(std::move(rec));
    }
}

void parse_trivylike_document(const json& doc, ScanParseResult& out) {
    std::string image = require_string(doc, "ArtifactName");
    PackageType ptype = PackageType::Unknown;
    if (doc.contains("Metadata") && doc["Metadata"].contains("OS")) {
        const auto& os = doc["Metadata"]["OS"];
        if (auto fam = opt_string(os, "Family")) ptype = package_type_from_os_token(*fam);
    }
    auto results = doc.find("Results");
    if (results == doc.end() || !results->is_array()) {
        throw ParseError("trivy-like report needs a Results[] array");
    }
    for (const auto& result : *results) {
        auto vulns = result.find("Vulnerabilities");
        if (vulns == result.end() || !vulns->is_array()) continue;
        for (const auto& v : *vulns) {
            VulnRecord rec;
            rec.image_name = image;
            rec.tool_name = "trivy";
            rec.package_type = ptype;
            rec.cve_identifier = require_string(v, "VulnerabilityID");
            if (!is_cve_identifier(rec.cve_identifier)) {
                out.warnings.push_back("skipping non-CVE vulnerability id \"" + rec.cve_identifier + "\"");
                continue;
            }
            rec.package_name = require_string(v, "PkgName");
            rec.package_version = require_string(v, "InstalledVersion");
            rec.severity = severity_or_unapproved(require_string(v, "Severity"), "trivy", &out.warnings);
            rec.assigner = opt_string(v, "SeveritySource");
            rec.modification_time = opt_instant(v, "LastModifiedDate");
            finish_record(rec, &out.warnings);
            out.records.push_back(std::move(rec));
        }
    }
}

void parse_clairlike_document(const json& doc, ScanParseResult& out) {
    std::string image = require_string(doc, "image");
    auto vulns = doc.find("vulnerabilities");
    if (vulns == doc.end() || !vulns->is_array()) {
        throw ParseError("clair-like report needs a vulnerabilities[] array");
    }
    for (const auto& v : *vulns) {
        VulnRecord rec;
        rec.image_name = image;
        rec.tool_name = "clair";
        rec.cve_identifier = require_string(v, "Name");
        if (!is_cve_identifier(rec.cve_identifier)) {
            out.warnings.push_back("skipping non-CVE vulnerability id \"" + rec.cve_identifier + "\"");
            continue;
        }
        if (auto ns = opt_string(v, "NamespaceName")) {
            rec.package_type = package_type_from_os_token(split(*ns, ':')[0]);
        }
        rec.package_name = require_string(v, "FeatureName");
        rec.package_version = require_string(v, "FeatureVersion");
        rec.severity = severity_or_unapproved(require_string(v, "Severity"), "clair", &out.warnings);
        // No assigner, no modification time: the source does not publish them.
        finish_record(rec, &out.warnings);
        out.records.push_back(std::move(rec));
    }
}

void parse_snyklike_document(const json& doc, ScanParseResult& out) {
    std::string image = require_string(doc, "projectName");
    PackageType ptype = PackageType::Unknown;
    if (auto mgr = opt_string(doc, "packageManager")) {
        std::string m = fold_token(*mgr);
        if (m == "deb") ptype = PackageType::Debian;
        else if (m == "apk") ptype = PackageType::Alpine;
        else if (m == "rpm") ptype = PackageType::Redhat;
    }
    auto vulns = doc.find("vulnerabilities");
    if (vulns == doc.end() || !vulns->is_array()) {
        throw ParseError("snyk-like report needs a vulnerabilities[] array");
    }
    for (const auto& v : *vulns) {
        std::vector<std::string> cves;
        if (v.contains("identifiers") && v["identifiers"].contains("CVE")) {
            for (const auto& id : v["identifiers"]["CVE"]) cves.push_back(id.get<std::string>());
        }
        if (cves.empty()) {
            out.warnings.push_back("skipping snyk finding without CVE identifiers");
            continue;
        }
        std::optional<std::string> assigner;
        std::optional<Instant> inner;
        if (v.contains("cvssDetails") && v["cvssDetails"].is_array() && !v["cvssDetails"].empty()) {
            const auto& d = v["cvssDetails"][0];
            assigner = opt_string(d, "assigner");
            inner = opt_instant(d, "modificationTime");
        }
        for (const auto& cve : cves) {
            if (!is_cve_identifier(cve)) {
                out.warnings.push_back("skipping non-CVE identifier \"" + cve + "\"");
                continue;
            }
            VulnRecord rec;
            rec.image_name = image;
            rec.tool_name = "snyk";
            rec.package_type = ptype;
            rec.cve_identifier = cve;
            rec.package_name = require_string(v, "packageName");
            rec.package_version = require_string(v, "version");
            rec.severity = severity_or_unapproved(require_string(v, "severity"), "snyk", &out.warnings);
            rec.assigner = assigner;
            rec.modification_time = opt_instant(v, "modificationTime");
            rec.inner_modification_time = inner;
            finish_record(rec, &out.warnings);
            out.records.push_back(std::move(rec));
        }
    }
}

} // namespace

std::string_view report_format_name(ReportFormat f) {
    switch (f) {
        case ReportFormat::Canonical: return "canonical";
        case ReportFormat::TrivyLike: return "trivy";
        case ReportFormat::ClairLike: return "clair";
        case ReportFormat::SnykLike: return "snyk";
    }
    return "canonical";
}

std::optional<ReportFormat> report_format_from_name(std::string_view name) {
    std::string t = fold_token(name);
    if (t == "canonical") return ReportFormat::Canonical;
    if (t == "trivy" || t == "trivylike") return ReportFormat::TrivyLike;
    if (t == "clair" || t == "clairlike") return ReportFormat::ClairLike;
    if (t == "snyk" || t == "snyklike") return ReportFormat::SnykLike;
    return std::nullopt;
}

std::optional<PackageManager> package_manager_from_name(std::string_view name) {
    std::string t = fold_token(name);
    if (t == "dpkg" || t == "deb") return PackageManager::Dpkg;
    if (t == "rpm") return PackageManager::Rpm;
    if (t == "apk") return PackageManager::Apk;
    return std::nullopt;
}

PackageType os_family_for_manager(PackageManager m) {
    switch (m) {
        case PackageManager::Dpkg: return PackageType::Debian;
        case PackageManager::Rpm: return PackageType::Redhat;
        case PackageManager::Apk: return PackageType::Alpine;
    }
    return PackageType::Unknown;
}

ScanParseResult parse_scan_report(std::string_view raw, ReportFormat format) {
    ScanParseResult out;
    json doc = parse_json(raw);
    std::vector<json> documents;
    if (doc.is_array()) {
        for (auto& d : doc) documents.push_back(std::move(d));
    } else if (doc.is_object()) {
        documents.push_back(std::move(doc));
    } else {
        throw ParseError("report must be a JSON object or array of objects");
    }
    try {
        for (const auto& d : documents) {
            if (!d.is_object()) throw ParseError("report array elements must be objects");
            switch (format) {
                case ReportFormat::Canonical: parse_canonical_document(d, out); break;
                case ReportFormat::TrivyLike: parse_trivylike_document(d, out); break;
                case ReportFormat::ClairLike: parse_clairlike_document(d, out); break;
                case ReportFormat::SnykLike: parse_snyklike_document(d, out); break;
            }
        }
    } catch (const json::exception& e) {
        // Field-shape surprises (wrong JSON types) are malformed documents too.
        throw ParseError(std::string("malformed report: ") + e.what());
    }
    return out;
}

std::string render_scan_reports(const std::vector<VulnRecord>& records) {
    // Group by (image, tool, package_type), preserving first-seen group order.
    std::vector<std::tuple<std::string, std::string, PackageType>> group_order;
    auto group_of = [&](const VulnRecord& r) {
        return std::make_tuple(r.image_name, r.tool_name, r.package_type);
    };
    for (const auto& r : records) {
        auto g = group_of(r);
        bool seen = false;
        for (const auto& existing : group_order) seen = seen || existing == g;
        if (!seen) group_order.push_back(g);
    }

    ordered_json docs = ordered_json::array();
    for (const auto& g : group_order) {
        ordered_json doc;
        doc["image_name"] = std::get<0>(g);
        doc["tool_name"] = std::get<1>(g);
        doc["package_type"] = std::string(package_type_name(std::get<2>(g)));
        ordered_json findings = ordered_json::array();
        for (const auto& r : records) {
            if (group_of(r) != g) continue;
            ordered_json f;
            f["cve_identifier"] = r.cve_identifier;
            f["package_name"] = r.package_name;
            f["package_version"] = r.package_version;
            f["severity"] = std::string(r.severity.name());
            if (r.assigner) f["assigner"] = *r.assigner;
            if (r.modification_time) f["modification_time"] = render_timestamp(*r.modification_time);
            if (r.inner_modification_time) {
                f["inner_modification_time"] = render_timestamp(*r.inner_modification_time);
            }
            findings.push_back(std::move(f));
        }
        doc["findings"] = std::move(findings);
        docs.push_back(std::move(doc));
    }
    if (docs.size() == 1) return docs[0].dump(2) + "\n";
    return docs.dump(2) + "\n";
}

namespace {

void parse_dpkg(std::string_view raw, ManifestParseResult& out) {
    std::istringstream in{std::string(raw)};
    std::string line;
    while (std::getline(in, line)) {
        std::string_view l = trim(line);
        if (l.empty()) continue;
        std::istringstream fields{std::string(l)};
        std::string state, name, version;
        fields >> state >> name >> version;
        if (state != "ii") {
            // Headers, separator art, and non-installed states (rc, un, ...) all land here.
            bool header = l.front() == '|' || l.front() == '+' || l.find('=') == 0 ||
                          l.rfind("Desired", 0) == 0;
            if (!header) ++out.skipped_lines;
            continue;
        }
        if (name.empty() || version.empty()) {
            ++out.skipped_lines;
            continue;
        }
        // dpkg lists multi-arch packages as name:arch; scanners report the bare name.
        if (auto colon = name.find(':'); colon != std::string::npos) name.resize(colon);
        out.entries.push_back({to_lower(name), version, PackageOrigin::PackageManager});
    }
}

bool known_rpm_arch(std::string_view token) {
    static const std::set<std::string_view> kArch = {"x86_64", "i686", "i386",  "noarch",
                                                     "aarch64", "armv7hl", "ppc64le", "s390x", "src"};
    return kArch.count(token) > 0;
}

void parse_rpm(std::string_view raw, ManifestParseResult& out) {
    std::istringstream in{std::string(raw)};
    std::string line;
    while (std::getline(in, line)) {
        std::string_view l = trim(line);
        if (l.empty()) continue;
        std::string nvra(l);
        // Strip the trailing ".arch" when present (release strings contain dots too).
        if (auto dot = nvra.rfind('.'); dot != std::string::npos && known_rpm_arch(std::string_view(nvra).substr(dot + 1))) {
            nvra.resize(dot);
        }
        // name-version-release: release after the last dash, version before it.
        auto last = nvra.rfind('-');
        if (last == std::string::npos || last == 0) {
            ++out.skipped_lines;
            continue;
        }
        auto prev = nvra.rfind('-', last - 1);
        if (prev == std::string::npos || prev == 0) {
            ++out.skipped_lines;
            continue;
        }
        std::string name = nvra.substr(0, prev);
        std::string version = nvra.substr(prev + 1); // version-release as one string
        // Versions start with a digit; anything else (gpg-pubkey rows and other
        // non-package lines) is unsplittable and gets skipped.
        if (version.empty() || version[0] < '0' || version[0] > '9') {
            ++out.skipped_lines;
            continue;
        }
        out.entries.push_back({to_lower(name), version, PackageOrigin::PackageManager});
    }
}

void parse_apk(std::string_view raw, ManifestParseResult& out) {
    std::istringstream in{std::string(raw)};
    std::string line;
    while (std::getline(in, line)) {
        std::string_view l = trim(line);
        if (l.empty() || l.rfind("WARNING", 0) == 0 || l.rfind("fetch", 0) == 0) continue;
        // "tar-1.34-r0 - tape archiver"
        std::string pkgver(l.substr(0, l.find(" - ")));
        auto rdash = pkgver.rfind("-r");
        bool release_ok = rdash != std::string::npos && rdash + 2 < pkgver.size();
        for (std::size_t i = rdash + 2; release_ok && i < pkgver.size(); ++i) {
            release_ok = pkgver[i] >= '0' && pkgver[i] <= '9';
        }
        auto vdash = release_ok ? pkgver.rfind('-', rdash - 1) : std::string::npos;
        if (!release_ok || vdash == std::string::npos || vdash == 0) {
            ++out.skipped_lines;
            continue;
        }
        out.entries.push_back({to_lower(pkgver.substr(0, vdash)), pkgver.substr(vdash + 1),
                               PackageOrigin::PackageManager});
    }
}

} // namespace

ManifestParseResult parse_package_manifest(std::string_view raw, PackageManager manager) {
    ManifestParseResult out;
    switch (manager) {
        case PackageManager::Dpkg: parse_dpkg(raw, out); break;
        case PackageManager::Rpm: parse_rpm(raw, out); break;
        case PackageManager::Apk: parse_apk(raw, out); break;
    }
    if (out.skipped_lines > 0) {
        out.warnings.push_back("skipped " + std::to_string(out.skipped_lines) +
                               " unrecognized manifest line(s)");
    }
    if (out.entries.empty() && !trim(raw).empty()) {
        throw ParseError("manifest text yielded no package entries");
    }
    return out;
}

AdvisoryParseResult load_advisory_feed(std::string_view raw) {
    json doc = parse_json(raw);
    if (!doc.is_object()) throw ParseError("advisory feed must be a JSON object");
    std::string name = require_string(doc, "assigner");
    auto assigner = assigner_from_name(name);
    if (!assigner) throw ParseError("unknown assigner \"" + name + "\"");
    return load_advisory_feed(raw, *assigner);
}

AdvisoryParseResult load_advisory_feed(std::string_view raw, AssignerId assigner) {
    AdvisoryParseResult out;
    json doc = parse_json(raw);
    if (!doc.is_object()) throw ParseError("advisory feed must be a JSON object");
    auto entries = doc.find("entries");
    if (entries == doc.end() || !entries->is_array()) {
        throw ParseError("advisory feed needs an entries[] array");
    }
    std::set<std::tuple<std::string, AssignerId, std::optional<Instant>>> seen;
    for (const auto& e : *entries) {
        auto cve = opt_string(e, "cve_identifier");
        if (!cve || !is_cve_identifier(*cve)) {
            out.warnings.push_back("rejecting advisory entry without a valid cve_identifier");
            continue;
        }
        AdvisoryRecord rec;
        rec.cve_identifier = *cve;
        rec.cve_assigner = assigner;
        rec.raw_severity_label = require_string(e, "severity");
        rec.severity = normalize_severity(rec.raw_severity_label, assigner_name(assigner));
        rec.modification_time = opt_instant(e, "modification_time");
        if (auto vec = opt_string(e, "cvss_vector")) {
            rec.cvss = parse_cvss_vector(*vec, &out.warnings);
        }
        auto key = std::make_tuple(rec.cve_identifier, rec.cve_assigner, rec.modification_time);
        if (!seen.insert(key).second) {
            out.warnings.push_back("dropping duplicate advisory entry for " + rec.cve_identifier);
            continue;
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

std::string render_advisory_feed(AssignerId assigner, const std::vector<AdvisoryRecord>& records) {
    ordered_json doc;
    doc["assigner"] = std::string(assigner_name(assigner));
    ordered_json entries = ordered_json::array();
    for (const auto& r : records) {
        if (r.cve_assigner != assigner) continue;
        ordered_json e;
        e["cve_identifier"] = r.cve_identifier;
        e["severity"] = r.raw_severity_label;
        if (r.modification_time) e["modification_time"] = render_timestamp(*r.modification_time);
        if (r.cvss) e["cvss_vector"] = render_cvss_vector(*r.cvss);
        entries.push_back(std::move(e));
    }
    doc["entries"] = std::move(entries);
    return doc.dump(2) + "\n";
}

} // namespace lucid

#include "store.hpp"

#include "csv.hpp"
#include "errors.hpp"
#include "util.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lucid {

namespace {

constexpr const char* kScanHeader =
    "image_name,tool_name,cve_identifier,package_name,package_version,severity,package_type,"
    "assigner,modification_time,inner_modification_time";
constexpr const char* kAdvisoryHeader =
    "cve_identifier,cve_assigner,severity,raw_severity_label,modification_time,cvss_vector";
constexpr const char* kPackagesHeader = "image_name,os_family,package_name,package_version,origin";

std::vector<std::string> header_fields(const char* header) {
    std::vector<std::string> out;
    for (auto part : split(header, ',')) out.emplace_back(part);
    return out;
}

std::string opt_instant_str(const std::optional<Instant>& t) {
    return t ? render_timestamp(*t) : std::string();
}

std::optional<Instant> instant_from_field(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_timestamp(s);
}

} // namespace

std::string_view table_name(TableId t) {
    switch (t) {
        case TableId::ScanResults: return "scan_results";
        case TableId::AssignerResults: return "assigner_results";
        case TableId::ImagePackages: return "image_packages";
    }
    return "scan_results";
}

std::optional<TableId> table_from_name(std::string_view name) {
    std::string t = fold_token(name);
    if (t == "scanresults") return TableId::ScanResults;
    if (t == "assignerresults") return TableId::AssignerResults;
    if (t == "imagepackages") return TableId::ImagePackages;
    return std::nullopt;
}

std::string_view scan_field_name(ScanField f) {
    switch (f) {
        case ScanField::ImageName: return "image_name";
        case ScanField::ToolName: return "tool_name";
        case ScanField::CveIdentifier: return "cve_identifier";
        case ScanField::PackageName: return "package_name";
        case ScanField::PackageVersion: return "package_version";
        case ScanField::Severity: return "severity";
        case ScanField::PackageType: return "package_type";
        case ScanField::Assigner: return "assigner";
        case ScanField::ModificationTime: return "modification_time";
        case ScanField::InnerModificationTime: return "inner_modification_time";
    }
    return "";
}

std::optional<ScanField> scan_field_from_name(std::string_view name) {
    static constexpr ScanField kAll[] = {
        ScanField::ImageName,      ScanField::ToolName,       ScanField::CveIdentifier,
        ScanField::PackageName,    ScanField::PackageVersion, ScanField::Severity,
        ScanField::PackageType,    ScanField::Assigner,       ScanField::ModificationTime,
        ScanField::InnerModificationTime};
    for (ScanField f : kAll) {
        if (scan_field_name(f) == name) return f;
    }
    return std::nullopt;
}

void Store::require_sealed() const {
    if (!sealed_) throw StateError("operation requires a sealed store");
}

void Store::require_unsealed() const {
    if (sealed_) throw StateError("store is sealed; no further inserts");
}

std::size_t Store::add_scan_records(const std::vector<VulnRecord>& records) {
    require_unsealed();
    std::size_t added = 0;
    for (const auto& r : records) {
        if (!is_cve_identifier(r.cve_identifier)) {
            throw InvalidArgument("invalid CVE identifier \"" + r.cve_identifier + "\"");
        }
        added += scan_set_.insert(r).second;
    }
    return added;
}

std::size_t Store::add_advisories(const std::vector<AdvisoryRecord>& records) {
    require_unsealed();
    std::size_t added = 0;
    for (const auto& r : records) added += advisory_set_.insert(r).second;
    return added;
}

std::size_t Store::add_inventories(const std::vector<PackageInventory>& inventories) {
    require_unsealed();
    std::size_t added = 0;
    for (const auto& inv : inventories) {
        auto [it, fresh] = inventories_.try_emplace(inv.image_name, PackageInventory{inv.image_name, inv.os_family, {}});
        if (!fresh && it->second.os_family != inv.os_family) {
            throw InvalidArgument("conflicting os_family for image \"" + inv.image_name + "\"");
        }
        for (const auto& e : inv.entries) {
            if (e.name.empty()) throw InvalidArgument("package entry with empty name");
            if (e.version.empty() && e.origin == PackageOrigin::PackageManager) {
                throw InvalidArgument("package-manager entry with empty version: " + e.name);
            }
            if (!it->second.contains(e.name, e.version)) {
                it->second.entries.push_back(e);
                ++added;
            }
        }
        if (fresh) ++added; // the image row itself
    }
    return added;
}

void Store::seal() {
    require_unsealed();
    // The build sets iterate in canonical row order already.
    scan_.assign(scan_set_.begin(), scan_set_.end());
    advisories_.assign(advisory_set_.begin(), advisory_set_.end());
    scan_set_.clear();
    advisory_set_.clear();
    inventory_rows_.clear();
    inventory_rows_.reserve(inventories_.size());
    for (auto& [name, inv] : inventories_) {
        std::sort(inv.entries.begin(), inv.entries.end());
        inventory_rows_.push_back(inv);
    }
    by_cve_.clear();
    by_image_.clear();
    by_tool_.clear();
    by_assigner_.clear();
    for (std::uint32_t i = 0; i < scan_.size(); ++i) {
        const auto& r = scan_[i];
        by_cve_[r.cve_identifier].push_back(i);
        by_image_[r.image_name].push_back(i);
        by_tool_[r.tool_name].push_back(i);
        if (r.assigner) by_assigner_[*r.assigner].push_back(i);
    }
    inventory_index_.clear();
    for (std::size_t i = 0; i < inventory_rows_.size(); ++i) {
        inventory_index_[inventory_rows_[i].image_name] = i;
    }
    sealed_ = true;
}

const std::vector<VulnRecord>& Store::scan_results() const {
    require_sealed();
    return scan_;
}

const std::vector<AdvisoryRecord>& Store::assigner_results() const {
    require_sealed();
    return advisories_;
}

const std::vector<PackageInventory>& Store::image_packages() const {
    require_sealed();
    return inventory_rows_;
}

const PackageInventory* Store::inventory_for(std::string_view image) const {
    require_sealed();
    auto it = inventory_index_.find(std::string(image));
    return it == inventory_index_.end() ? nullptr : &inventory_rows_[it->second];
}

const std::vector<std::uint32_t>& Store::scan_refs_for_cve(const std::string& cve) const {
    require_sealed();
    static const std::vector<std::uint32_t> kEmpty;
    auto it = by_cve_.find(cve);
    return it == by_cve_.end() ? kEmpty : it->second;
}

const std::vector<std::uint32_t>& Store::scan_refs_for_image(const std::string& image) const {
    require_sealed();
    static const std::vector<std::uint32_t> kEmpty;
    auto it = by_image_.find(image);
    return it == by_image_.end() ? kEmpty : it->second;
}

std::vector<std::string> Store::distinct_images() const {
    require_sealed();
    std::vector<std::string> out;
    out.reserve(by_image_.size());
    for (const auto& [name, refs] : by_image_) out.push_back(name);
    std::sort(out.begin(), out.end());
    return out;
}

std::set<std::string> Store::distinct_cves() const {
    require_sealed();
    std::set<std::string> out;
    for (const auto& [cve, refs] : by_cve_) out.insert(cve);
    return out;
}

namespace {

// Unified row view used by mismatch pairing: scan and advisory rows project the
// same seven key fields, with fields an advisory does not have left absent.
struct PairView {
    RecordRef ref;
    SeverityLabel severity;
    const std::string* cve = nullptr;
    const std::string* image = nullptr;
    const std::string* package_name = nullptr;
    const std::string* package_version = nullptr;
    const std::string* tool = nullptr;
    std::optional<std::string> assigner;
    std::optional<Instant> modification_time;

    std::string key_part(ScanField f) const {
        switch (f) {
            case ScanField::CveIdentifier: return cve ? *cve : std::string();
            case ScanField::ImageName: return image ? *image : std::string();
            case ScanField::PackageName: return package_name ? *package_name : std::string();
            case ScanField::PackageVersion: return package_version ? *package_version : std::string();
            case ScanField::ToolName: return tool ? *tool : std::string();
            case ScanField::Assigner: return assigner ? "+" + *assigner : std::string("-");
            case ScanField::ModificationTime:
                return modification_time ? "+" + render_timestamp(*modification_time) : std::string("-");
            default: throw InvalidArgument("field not usable in a MatchKey: " +
                                           std::string(scan_field_name(f)));
        }
    }
};

} // namespace

std::vector<std::pair<RecordRef, RecordRef>> Store::severity_mismatch_pairs(const MatchKey& key) const {
    require_sealed();
    if (key.empty()) throw InvalidArgument("MatchKey must be nonempty");
    std::set<ScanField> distinct(key.begin(), key.end());
    if (distinct.size() != key.size()) throw InvalidArgument("MatchKey fields must be distinct");
    for (ScanField f : key) {
        if (f == ScanField::Severity || f == ScanField::PackageType ||
            f == ScanField::InnerModificationTime) {
            throw InvalidArgument("field not usable in a MatchKey: " +
                                  std::string(scan_field_name(f)));
        }
    }

    std::vector<PairView> views;
    views.reserve(scan_.size() + advisories_.size());
    for (std::uint32_t i = 0; i < scan_.size(); ++i) {
        const auto& r = scan_[i];
        PairView v;
        v.ref = {TableId::ScanResults, i};
        v.severity = r.severity;
        v.cve = &r.cve_identifier;
        v.image = &r.image_name;
        v.package_name = &r.package_name;
        v.package_version = &r.package_version;
        v.tool = &r.tool_name;
        v.assigner = r.assigner;
        v.modification_time = r.modification_time;
        views.push_back(std::move(v));
    }
    for (std::uint32_t i = 0; i < advisories_.size(); ++i) {
        const auto& r = advisories_[i];
        PairView v;
        v.ref = {TableId::AssignerResults, i};
        v.severity = r.severity;
        v.cve = &r.cve_identifier;
        v.assigner = std::string(assigner_name(r.cve_assigner));
        v.modification_time = r.modification_time;
        views.push_back(std::move(v));
    }

    std::map<std::string, std::vector<const PairView*>> groups;
    for (const auto& v : views) {
        if (!v.severity.rated()) continue;
        std::string k;
        for (ScanField f : key) {
            k += v.key_part(f);
            k += '\x1f';
        }
        groups[k].push_back(&v);
    }

    std::vector<std::pair<RecordRef, RecordRef>> pairs;
    for (const auto& [k, members] : groups) {
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                if (members[a]->severity != members[b]->severity) {
                    auto lo = std::min(members[a]->ref, members[b]->ref);
                    auto hi = std::max(members[a]->ref, members[b]->ref);
                    pairs.emplace_back(lo, hi);
                }
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

std::vector<GroupCountRow> Store::group_count(const std::vector<ScanField>& dimensions) const {
    require_sealed();
    if (dimensions.empty()) throw InvalidArgument("group_count needs at least one dimension");
    auto field_value = [](const VulnRecord& r, ScanField f) -> std::string {
        switch (f) {
            case ScanField::ImageName: return r.image_name;
            case ScanField::ToolName: return r.tool_name;
            case ScanField::CveIdentifier: return r.cve_identifier;
            case ScanField::PackageName: return r.package_name;
            case ScanField::PackageVersion: return r.package_version;
            case ScanField::Severity: return std::string(r.severity.name());
            case ScanField::PackageType: return std::string(package_type_name(r.package_type));
            case ScanField::Assigner: return r.assigner.value_or("");
            case ScanField::ModificationTime: return opt_instant_str(r.modification_time);
            case ScanField::InnerModificationTime: return opt_instant_str(r.inner_modification_time);
        }
        return "";
    };
    std::map<std::vector<std::string>, std::size_t> counts;
    for (const auto& r : scan_) {
        std::vector<std::string> values;
        values.reserve(dimensions.size());
        for (ScanField f : dimensions) values.push_back(field_value(r, f));
        counts[values] += 1;
    }
    std::vector<GroupCountRow> rows;
    rows.reserve(counts.size());
    for (auto& [values, count] : counts) rows.push_back({values, count});
    return rows;
}

std::string Store::export_csv(TableId table) const {
    require_sealed();
    std::string out;
    switch (table) {
        case TableId::ScanResults: {
            out = std::string(kScanHeader) + "\n";
            for (const auto& r : scan_) {
                out += csv::render_row({r.image_name, r.tool_name, r.cve_identifier, r.package_name,
                                        r.package_version, std::string(r.severity.name()),
                                        std::string(package_type_name(r.package_type)),
                                        r.assigner.value_or(""), opt_instant_str(r.modification_time),
                                        opt_instant_str(r.inner_modification_time)});
            }
            break;
        }
        case TableId::AssignerResults: {
            out = std::string(kAdvisoryHeader) + "\n";
            for (const auto& r : advisories_) {
                out += csv::render_row({r.cve_identifier, std::string(assigner_name(r.cve_assigner)),
                                        std::string(r.severity.name()), r.raw_severity_label,
                                        opt_instant_str(r.modification_time), r.cvss_key()});
            }
            break;
        }
        case TableId::ImagePackages: {
            out = std::string(kPackagesHeader) + "\n";
            for (const auto& inv : inventory_rows_) {
                for (const auto& e : inv.entries) {
                    out += csv::render_row({inv.image_name, std::string(package_type_name(inv.os_family)),
                                            e.name, e.version,
                                            e.origin == PackageOrigin::PackageManager ? "PackageManager"
                                                                                      : "SourceInstall"});
                }
                if (inv.entries.empty()) {
                    out += csv::render_row({inv.image_name, std::string(package_type_name(inv.os_family)),
                                            "", "", ""});
                }
            }
            break;
        }
    }
    return out;
}

namespace {

void check_header(const std::vector<std::string>& got, const char* expected_header,
                  std::string_view table) {
    auto expected = header_fields(expected_header);
    if (got == expected) return;
    std::string msg = "CSV header mismatch for " + std::string(table) + ": missing [";
    bool first = true;
    for (const auto& col : expected) {
        if (std::find(got.begin(), got.end(), col) == got.end()) {
            if (!first) msg += ", ";
            msg += col;
            first = false;
        }
    }
    msg += "], extra [";
    first = true;
    for (const auto& col : got) {
        if (std::find(expected.begin(), expected.end(), col) == expected.end()) {
            if (!first) msg += ", ";
            msg += col;
            first = false;
        }
    }
    msg += "]";
    throw ParseError(msg);
}

} // namespace

std::size_t Store::import_csv(TableId table, std::string_view text) {
    require_unsealed();
    auto rows = csv::parse(text);
    if (rows.empty()) throw ParseError("CSV document has no header row");
    switch (table) {
        case TableId::ScanResults: {
            check_header(rows[0], kScanHeader, table_name(table));
            std::vector<VulnRecord> records;
            for (std::size_t i = 1; i < rows.size(); ++i) {
                const auto& f = rows[i];
                if (f.size() != 10) throw ParseError("scan_results row " + std::to_string(i) + " has " +
                                                     std::to_string(f.size()) + " fields, want 10");
                VulnRecord r;
                r.image_name = f[0];
                r.tool_name = f[1];
                r.cve_identifier = f[2];
                r.package_name = f[3];
                r.package_version = f[4];
                r.severity = severity_label_from_name(f[5]);
                auto pt = package_type_from_name(f[6]);
                if (!pt) throw ParseError("unknown package_type \"" + f[6] + "\"");
                r.package_type = *pt;
                if (!f[7].empty()) r.assigner = f[7];
                r.modification_time = instant_from_field(f[8]);
                r.inner_modification_time = instant_from_field(f[9]);
                records.push_back(std::move(r));
            }
            return add_scan_records(records);
        }
        case TableId::AssignerResults: {
            check_header(rows[0], kAdvisoryHeader, table_name(table));
            std::vector<AdvisoryRecord> records;
            for (std::size_t i = 1; i < rows.size(); ++i) {
                const auto& f = rows[i];
                if (f.size() != 6) throw ParseError("assigner_results row " + std::to_string(i) +
                                                    " has " + std::to_string(f.size()) + " fields, want 6");
                AdvisoryRecord r;
                r.cve_identifier = f[0];
                auto a = assigner_from_name(f[1]);
                if (!a) throw ParseError("unknown cve_assigner \"" + f[1] + "\"");
                r.cve_assigner = *a;
                r.severity = severity_label_from_name(f[2]);
                r.raw_severity_label = f[3];
                r.modification_time = instant_from_field(f[4]);
                if (!f[5].empty()) r.cvss = parse_cvss_vector(f[5]);
                records.push_back(std::move(r));
            }
            return add_advisories(records);
        }
        case TableId::ImagePackages: {
            check_header(rows[0], kPackagesHeader, table_name(table));
            std::vector<PackageInventory> inventories;
            std::map<std::string, std::size_t> index;
            for (std::size_t i = 1; i < rows.size(); ++i) {
                const auto& f = rows[i];
                if (f.size() != 5) throw ParseError("image_packages row " + std::to_string(i) + " has " +
                                                    std::to_string(f.size()) + " fields, want 5");
                auto os = package_type_from_name(f[1]);
                if (!os) throw ParseError("unknown os_family \"" + f[1] + "\"");
                auto [it, fresh] = index.try_emplace(f[0], inventories.size());
                if (fresh) inventories.push_back({f[0], *os, {}});
                if (f[2].empty()) continue; // image row without packages
                PackageEntry e{f[2], f[3],
                               f[4] == "SourceInstall" ? PackageOrigin::SourceInstall
                                                       : PackageOrigin::PackageManager};
                inventories[it->second].entries.push_back(std::move(e));
            }
            return add_inventories(inventories);
        }
    }
    throw InvalidArgument("unknown table");
}

std::uint64_t Store::fingerprint() const {
    require_sealed();
    std::uint64_t h = fnv1a(export_csv(TableId::ScanResults));
    h = fnv1a(export_csv(TableId::AssignerResults), h);
    h = fnv1a(export_csv(TableId::ImagePackages), h);
    return h;
}

void save_store_csv(const Store& store, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    for (TableId t : {TableId::ScanResults, TableId::AssignerResults, TableId::ImagePackages}) {
        fs::path path = fs::path(dir) / (std::string(table_name(t)) + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out << store.export_csv(t);
    }
}

Store load_store_csv(const std::string& dir) {
    namespace fs = std::filesystem;
    Store store;
    for (TableId t : {TableId::ScanResults, TableId::AssignerResults, TableId::ImagePackages}) {
        fs::path path = fs::path(dir) / (std::string(table_name(t)) + ".csv");
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot read " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        store.import_csv(t, buf.str());
    }
    store.seal();
    return store;
}

} // namespace lucid

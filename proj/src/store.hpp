#pragma once

#include "records.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace lucid {

enum class TableId { ScanResults, AssignerResults, ImagePackages };

std::string_view table_name(TableId t);
std::optional<TableId> table_from_name(std::string_view name);

// Stable handle to a row of a sealed store. Indexes are assigned at seal time in
// (table, sorted-row) order, so handles are reproducible across runs.
struct RecordRef {
    TableId table = TableId::ScanResults;
    std::uint32_t index = 0;

    std::int64_t encoded() const { return static_cast<std::int64_t>(table) * (1LL << 32) + index; }
    friend auto operator<=>(const RecordRef&, const RecordRef&) = default;
};

// Queryable fields of scan_results rows.
enum class ScanField {
    ImageName,
    ToolName,
    CveIdentifier,
    PackageName,
    PackageVersion,
    Severity,
    PackageType,
    Assigner,
    ModificationTime,
    InnerModificationTime,
};

std::string_view scan_field_name(ScanField f);
std::optional<ScanField> scan_field_from_name(std::string_view name);

// Join key for severity_mismatch_pairs: a nonempty, duplicate-free subset of
// {cve_identifier, image_name, package_name, package_version, assigner,
//  modification_time, tool_name}.
using MatchKey = std::vector<ScanField>;

struct GroupCountRow {
    std::vector<std::string> values; // one per requested dimension
    std::size_t count = 0;
};

// Embedded store over the three tables. Build phase is single-writer; after
// seal() the snapshot is immutable and all queries are read-only.
class Store {
public:
    Store() = default;

    // Build phase. Exact-duplicate rows collapse on insert; each call returns
    // the number of rows actually added. Throws StateError once sealed.
    std::size_t add_scan_records(const std::vector<VulnRecord>& records);
    std::size_t add_advisories(const std::vector<AdvisoryRecord>& records);
    std::size_t add_inventories(const std::vector<PackageInventory>& inventories);

    void seal();
    bool sealed() const { return sealed_; }

    // Sealed accessors. Row order is the canonical sorted order.
    const std::vector<VulnRecord>& scan_results() const;
    const std::vector<AdvisoryRecord>& assigner_results() const;
    const std::vector<PackageInventory>& image_packages() const;

    const VulnRecord& scan_at(std::uint32_t index) const { return scan_results().at(index); }

    const PackageInventory* inventory_for(std::string_view image) const;
    const std::vector<std::uint32_t>& scan_refs_for_cve(const std::string& cve) const;
    const std::vector<std::uint32_t>& scan_refs_for_image(const std::string& image) const;

    std::vector<std::string> distinct_images() const; // sorted, over scan_results
    std::set<std::string> distinct_cves() const;      // over scan_results

    // All unordered pairs of records (scan and advisory rows alike) that agree
    // on every key field but carry different severity ratings. Unapproved rows
    // never pair. Optional fields compare absent==absent, absent!=present.
    std::vector<std::pair<RecordRef, RecordRef>> severity_mismatch_pairs(const MatchKey& key) const;

    // GROUP BY over scan_results. Rows come back sorted by dimension values.
    std::vector<GroupCountRow> group_count(const std::vector<ScanField>& dimensions) const;

    // CSV import/export, bit-stable: export(import(export(s))) == export(s).
    // Export needs a sealed store; import needs an unsealed one.
    std::string export_csv(TableId table) const;
    std::size_t import_csv(TableId table, std::string_view text);

    // FNV-1a over the three exported tables; identifies the snapshot.
    std::uint64_t fingerprint() const;

private:
    void require_sealed() const;
    void require_unsealed() const;

    bool sealed_ = false;
    std::vector<VulnRecord> scan_;           // sealed order after seal()
    std::vector<AdvisoryRecord> advisories_;
    std::set<VulnRecord> scan_set_;          // build-phase dedup
    std::set<AdvisoryRecord> advisory_set_;
    std::map<std::string, PackageInventory> inventories_; // by image name

    // Sealed state.
    std::vector<PackageInventory> inventory_rows_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> by_cve_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> by_image_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> by_tool_;
    std::unordered_map<std::string, std::vector<std::uint32_t>> by_assigner_;
    std::unordered_map<std::string, std::size_t> inventory_index_;
};

// Directory persistence: scan_results.csv, assigner_results.csv,
// image_packages.csv under `dir`.
void save_store_csv(const Store& store, const std::string& dir);
Store load_store_csv(const std::string& dir); // returns a sealed store

} // namespace lucid

#pragma once

#include "detect.hpp"
#include "resolve.hpp"
#include "store.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lucid {

// The five injectable inconsistency kinds, one per level predicate L2..L6.
enum class InconsistencyKind {
    NameMismatch,           // L2
    VersionMismatch,        // L3
    AssignerDivergence,     // L4
    StaleModificationTime,  // L5
    IntraToolDuplicate,     // L6
};

std::string_view kind_name(InconsistencyKind k);
std::optional<InconsistencyKind> kind_from_name(std::string_view name);
Level kind_level(InconsistencyKind k);

struct CorpusConfig {
    int image_count = 168;
    int cves_per_image = 22;
    // Distinct CVE total; when set it overrides image_count * cves_per_image.
    std::optional<std::int64_t> total_cves = 3766;
    double inconsistent_fraction = 1669.0 / 3766.0;

    // Fraction of inconsistent CVEs carrying each kind (kinds overlap freely).
    std::map<InconsistencyKind, double> inconsistency_mix = {
        {InconsistencyKind::NameMismatch, 0.4910},
        {InconsistencyKind::VersionMismatch, 0.1300},
        {InconsistencyKind::AssignerDivergence, 0.9500},
        {InconsistencyKind::StaleModificationTime, 0.5750},
        {InconsistencyKind::IntraToolDuplicate, 0.1800},
    };
    // Fraction of inconsistent CVEs that resolve at each kind's level under the
    // bottom-up procedure. The generator realizes these by choosing how kinds
    // overlap and which assigner-divergence records cite credible sources.
    std::map<InconsistencyKind, double> solvable_mix = {
        {InconsistencyKind::NameMismatch, 0.1120},
        {InconsistencyKind::VersionMismatch, 0.0168},
        {InconsistencyKind::AssignerDivergence, 0.0036},
        {InconsistencyKind::StaleModificationTime, 0.3960},
        {InconsistencyKind::IntraToolDuplicate, 0.1800},
    };

    std::int64_t hard_fp_count = 120;
    std::int64_t soft_fp_count = 80;
    std::int64_t unapproved_dupe_count = 40;

    std::int64_t advisory_count = 1200;
    // Advisory severity distribution over {None, Low, Medium, High, Critical}.
    // The raw shares (3.44/7.53/47.40/36.40/5.21 percent) leave 0.02% on the
    // table; normalizing keeps the sum-to-one invariant
    std::array<double, 5> class_shares = {344.0 / 9998.0, 753.0 / 9998.0, 4740.0 / 9998.0,
                                          3640.0 / 9998.0, 521.0 / 9998.0};

    std::uint64_t seed = 0;
    std::vector<std::string> tool_names = {"trivy", "clair", "snyk"};
};

CorpusConfig parse_corpus_config_json(std::string_view text);
std::string render_corpus_config_json(const CorpusConfig& config);

enum class FpEntryKind { Hard, Soft, UnapprovedDupe };

struct LedgerCve {
    std::string cve;
    Severity truth = Severity::Low;
    std::set<InconsistencyKind> kinds;        // empty for consistent CVEs
    std::optional<Level> expected_resolution; // absent: consistent or unresolvable
};

struct LedgerFp {
    FpEntryKind kind = FpEntryKind::Hard;
    std::string cve;
    std::string image;
    std::string package_name;
    std::string package_version;
    std::string tool;
};

struct Ledger {
    std::vector<LedgerCve> cves;
    std::vector<LedgerFp> fps;
};

struct SyntheticCorpus {
    std::vector<VulnRecord> scan;
    std::vector<AdvisoryRecord> advisories;
    std::vector<PackageInventory> inventories;
    Ledger ledger;
    std::uint64_t fingerprint = 0; // of the sealed store built from the corpus
};

// Deterministic under (config, seed). Every injected artifact satisfies exactly
// its level predicate; overlaps demanded by the mix are recorded per CVE in the
// ledger. Throws InvalidArgument on infeasible configurations.
SyntheticCorpus generate_corpus(const CorpusConfig& config);

Store build_store(const SyntheticCorpus& corpus);

// Corpus persistence: the three store CSVs plus ledger.csv.
void write_corpus(const SyntheticCorpus& corpus, const std::string& dir);
std::string render_ledger_csv(const Ledger& ledger);
Ledger parse_ledger_csv(std::string_view text);

struct KindScore {
    std::optional<double> recall;
    std::optional<double> precision;
};

struct HarnessScore {
    std::map<InconsistencyKind, KindScore> detection;
    std::map<Level, std::optional<double>> resolution_accuracy; // resolved == truth, per level
    std::optional<double> resolution_accuracy_overall;
    std::optional<double> fp_hard_recall;
    std::optional<double> fp_removal_precision; // removed rows that were injected removables
    std::optional<double> fp_soft_recall;
    std::optional<double> fp_soft_precision;
    double resolved_fraction = 0.0; // |resolved| / |inconsistent|
};

// Scores detection/resolution outputs against the injection ledger. The
// breakdown and outcome must have been computed from this corpus's store
// (fingerprints are compared; mismatch raises InvalidArgument).
HarnessScore evaluate_pipeline(const SyntheticCorpus& corpus, const Store& store,
                               const LevelBreakdown& breakdown, const ResolutionOutcome& outcome);

} // namespace lucid

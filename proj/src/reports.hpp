#pragma once

#include "classify.hpp"
#include "detect.hpp"
#include "resolve.hpp"
#include "synth.hpp"

#include <map>
#include <string>

namespace lucid {

// A finished result document: one canonical JSON rendering plus named CSV
// sections. Everything is computed eagerly so the C API can hand out stable
// pointers.
struct ReportDoc {
    std::string json;                            // canonical (ordered keys, 2-space indent)
    std::map<std::string, std::string> csv;      // section name -> CSV text
    std::string default_section;
    std::map<std::string, double> metrics;       // flat numeric lookups for callers

    const std::string* csv_section(const std::string& name) const {
        auto it = csv.find(name.empty() ? default_section : name);
        return it == csv.end() ? nullptr : &it->second;
    }
};

ReportDoc make_detect_report(const Store& store, const LevelBreakdown& breakdown,
                             const std::vector<Finding>& findings,
                             const std::vector<RecordRef>& hard_fps,
                             const std::vector<RecordRef>& soft_fps);

ReportDoc make_resolve_report(const Store& store, const ResolutionOutcome& outcome);

ReportDoc make_classify_report(const TrainerParams& params, const Dataset& ds,
                               const EvalReport& eval);

ReportDoc make_synth_report(const CorpusConfig& config, const SyntheticCorpus& corpus);

} // namespace lucid

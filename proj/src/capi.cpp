#include "lucid/lucid.h"

#include "classify.hpp"
#include "cvss.hpp"
#include "detect.hpp"
#include "errors.hpp"
#include "ingest.hpp"
#include "reports.hpp"
#include "resolve.hpp"
#include "store.hpp"
#include "synth.hpp"

#include <memory>
#include <string>

using namespace lucid;

struct lucid_store_t {
    Store store;
};

struct lucid_report_t {
    ReportDoc doc;
};

namespace {

thread_local std::string g_last_error;

lucid_status_t fail(lucid_status_t code, const std::string& message) {
    g_last_error = message;
    return code;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
lucid_status_t guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        fn();
        return LUCID_OK;
    } catch (const ParseError& e) {
        return fail(LUCID_E_PARSE, e.what());
    } catch (const StateError& e) {
        return fail(LUCID_E_STATE, e.what());
    } catch (const InvalidArgument& e) {
        return fail(LUCID_E_ARG, e.what());
    } catch (const IoError& e) {
        return fail(LUCID_E_IO, e.what());
    } catch (const std::exception& e) {
        return fail(LUCID_E_INTERNAL, e.what());
    }
}

lucid_status_t require(bool cond, const char* message) {
    return cond ? LUCID_OK : fail(LUCID_E_ARG, message);
}

} // namespace

extern "C" {

const char* lucid_version(void) { return "1.0.0"; }

const char* lucid_last_error(void) { return g_last_error.c_str(); }

lucid_status_t lucid_store_create(lucid_store_t** out) {
    if (require(out != nullptr, "out must not be NULL")) return LUCID_E_ARG;
    return guarded([&] { *out = new lucid_store_t(); });
}

void lucid_store_free(lucid_store_t* store) { delete store; }

lucid_status_t lucid_store_add_scan_report(lucid_store_t* store, const char* format,
                                           const char* text, size_t* added) {
    if (require(store && format && text, "store, format, and text are required")) return LUCID_E_ARG;
    return guarded([&] {
        auto fmt = report_format_from_name(format);
        if (!fmt) throw InvalidArgument("unknown report format \"" + std::string(format) + "\"");
        auto parsed = parse_scan_report(text, *fmt);
        std::size_t n = store->store.add_scan_records(parsed.records);
        if (added) *added = n;
    });
}

lucid_status_t lucid_store_add_manifest(lucid_store_t* store, const char* image,
                                        const char* manager, const char* text, size_t* added) {
    if (require(store && image && manager && text, "store, image, manager, and text are required")) {
        return LUCID_E_ARG;
    }
    return guarded([&] {
        auto mgr = package_manager_from_name(manager);
        if (!mgr) throw InvalidArgument("unknown package manager \"" + std::string(manager) + "\"");
        auto parsed = parse_package_manifest(text, *mgr);
        PackageInventory inv;
        inv.image_name = image;
        inv.os_family = os_family_for_manager(*mgr);
        inv.entries = parsed.entries;
        std::size_t n = store->store.add_inventories({inv});
        if (added) *added = n;
    });
}

lucid_status_t lucid_store_add_advisories(lucid_store_t* store, const char* text, size_t* added) {
    if (require(store && text, "store and text are required")) return LUCID_E_ARG;
    return guarded([&] {
        auto parsed = load_advisory_feed(text);
        std::size_t n = store->store.add_advisories(parsed.records);
        if (added) *added = n;
    });
}

lucid_status_t lucid_store_seal(lucid_store_t* store) {
    if (require(store != nullptr, "store is required")) return LUCID_E_ARG;
    return guarded([&] { store->store.seal(); });
}

lucid_status_t lucid_store_load_dir(lucid_store_t* store, const char* dir) {
    if (require(store && dir, "store and dir are required")) return LUCID_E_ARG;
    return guarded([&] { store->store = load_store_csv(dir); });
}

lucid_status_t lucid_store_save_dir(const lucid_store_t* store, const char* dir) {
    if (require(store && dir, "store and dir are required")) return LUCID_E_ARG;
    return guarded([&] { save_store_csv(store->store, dir); });
}

lucid_status_t lucid_store_row_count(const lucid_store_t* store, const char* table, size_t* out) {
    if (require(store && table && out, "store, table, and out are required")) return LUCID_E_ARG;
    return guarded([&] {
        auto t = table_from_name(table);
        if (!t) throw InvalidArgument("unknown table \"" + std::string(table) + "\"");
        switch (*t) {
            case TableId::ScanResults: *out = store->store.scan_results().size(); break;
            case TableId::AssignerResults: *out = store->store.assigner_results().size(); break;
            case TableId::ImagePackages: {
                std::size_t n = 0;
                for (const auto& inv : store->store.image_packages()) n += inv.entries.size();
                *out = n;
                break;
            }
        }
    });
}

void lucid_report_free(lucid_report_t* report) { delete report; }

const char* lucid_report_json(const lucid_report_t* report) {
    return report ? report->doc.json.c_str() : nullptr;
}

const char* lucid_report_csv(const lucid_report_t* report, const char* section) {
    if (!report) return nullptr;
    const std::string* text = report->doc.csv_section(section ? section : "");
    return text ? text->c_str() : nullptr;
}

lucid_status_t lucid_report_metric(const lucid_report_t* report, const char* key, double* out) {
    if (require(report && key && out, "report, key, and out are required")) return LUCID_E_ARG;
    auto it = report->doc.metrics.find(key);
    if (it == report->doc.metrics.end()) {
        return fail(LUCID_E_ARG, "unknown metric \"" + std::string(key) + "\"");
    }
    *out = it->second;
    return LUCID_OK;
}

lucid_status_t lucid_detect(const lucid_store_t* store, int threads, lucid_report_t** out) {
    if (require(store && out, "store and out are required")) return LUCID_E_ARG;
    return guarded([&] {
        LevelBreakdown breakdown = level_breakdown(store->store, threads);
        std::vector<Finding> findings;
        for (Level level : {Level::L2, Level::L3, Level::L4, Level::L5, Level::L6}) {
            auto fs = level_findings(store->store, level);
            findings.insert(findings.end(), fs.begin(), fs.end());
        }
        auto report = std::make_unique<lucid_report_t>();
        report->doc = make_detect_report(store->store, breakdown, findings,
                                         hard_false_positives(store->store),
                                         soft_false_positives(store->store));
        *out = report.release();
    });
}

void lucid_resolve_opts_init(lucid_resolve_opts_t* opts) {
    if (!opts) return;
    opts->credible_assigners = nullptr;
    opts->credible_count = 0;
    opts->threads = 1;
}

lucid_status_t lucid_resolve(const lucid_store_t* store, const lucid_resolve_opts_t* opts,
                             lucid_report_t** report, lucid_store_t** rewritten) {
    if (require(store && report, "store and report are required")) return LUCID_E_ARG;
    return guarded([&] {
        ResolveOptions options;
        if (opts) {
            options.threads = opts->threads > 0 ? opts->threads : 1;
            if (opts->credible_assigners && opts->credible_count > 0) {
                options.credible_assigners.assign(opts->credible_assigners,
                                                  opts->credible_assigners + opts->credible_count);
            }
        }
        ResolveResult result = resolve_all(store->store, options);
        auto doc = std::make_unique<lucid_report_t>();
        doc->doc = make_resolve_report(store->store, result.outcome);
        if (rewritten) {
            auto rw = std::make_unique<lucid_store_t>();
            rw->store = std::move(result.rewritten);
            *rewritten = rw.release();
        }
        *report = doc.release();
    });
}

void lucid_classify_opts_init(lucid_classify_opts_t* opts) {
    if (!opts) return;
    opts->algorithm = "decision_tree";
    opts->seed = 0;
    opts->folds = 5;
    opts->threads = 1;
    opts->tree_max_depth = 0;
    opts->tree_max_features = 0;
    opts->n_estimators = 200;
    opts->forest_max_depth = 32;
    opts->k_neighbors = 5;
    opts->minkowski_p = 2;
    opts->variance_smoothing = 0.0;
}

lucid_status_t lucid_classify(const lucid_store_t* store, const lucid_classify_opts_t* opts,
                              lucid_report_t** out) {
    if (require(store && out, "store and out are required")) return LUCID_E_ARG;
    return guarded([&] {
        lucid_classify_opts_t defaults;
        lucid_classify_opts_init(&defaults);
        const lucid_classify_opts_t& o = opts ? *opts : defaults;

        TrainerParams params;
        auto algo = algorithm_from_name(o.algorithm ? o.algorithm : "decision_tree");
        if (!algo) throw InvalidArgument("unknown algorithm \"" + std::string(o.algorithm) + "\"");
        params.algorithm = *algo;
        if (o.tree_max_depth > 0) params.tree.max_depth = o.tree_max_depth;
        if (o.tree_max_features > 0) params.tree.max_features = o.tree_max_features;
        if (o.n_estimators > 0) params.forest.n_estimators = o.n_estimators;
        if (o.forest_max_depth > 0) params.forest.max_depth = o.forest_max_depth;
        if (o.k_neighbors > 0) params.knn.k = o.k_neighbors;
        if (o.minkowski_p > 0) params.knn.minkowski_p = o.minkowski_p;
        if (o.variance_smoothing > 0.0) params.gnb.variance_smoothing = o.variance_smoothing;

        Dataset ds = assemble_dataset(store->store.assigner_results());
        int folds = o.folds >= 2 ? o.folds : 5;
        EvalReport eval = cross_validate(params, ds, folds, o.seed, o.threads > 0 ? o.threads : 1);
        auto report = std::make_unique<lucid_report_t>();
        report->doc = make_classify_report(params, ds, eval);
        *out = report.release();
    });
}

lucid_status_t lucid_synth(const char* config_json, const char* out_dir, lucid_report_t** out) {
    if (require(out != nullptr, "out is required")) return LUCID_E_ARG;
    return guarded([&] {
        CorpusConfig config =
            config_json && *config_json ? parse_corpus_config_json(config_json) : CorpusConfig{};
        SyntheticCorpus corpus = generate_corpus(config);
        if (out_dir && *out_dir) write_corpus(corpus, out_dir);
        auto report = std::make_unique<lucid_report_t>();
        report->doc = make_synth_report(config, corpus);
        *out = report.release();
    });
}

lucid_status_t lucid_cvss_score(const char* vector_text, double* base_score_out,
                                double* exploitability, double* impact, const char** band) {
    if (require(vector_text != nullptr, "vector_text is required")) return LUCID_E_ARG;
    return guarded([&] {
        ScoredVector scored = base_score(parse_cvss_vector(vector_text));
        if (base_score_out) *base_score_out = scored.base_score;
        if (exploitability) *exploitability = scored.exploitability_score;
        if (impact) *impact = scored.impact_score;
        if (band) *band = severity_name(severity_band(scored.base_score)).data();
    });
}

} // extern "C"

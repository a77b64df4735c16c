#include "reports.hpp"

#include "csv.hpp"
#include "util.hpp"

#include <json.hpp>

#include <cmath>

namespace lucid {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string finish(ordered_json& doc) { return doc.dump(2) + "\n"; }

double round6(double v) { return std::round(v * 1e6) / 1e6; }

ordered_json ref_json(const RecordRef& ref) {
    ordered_json j;
    j["table"] = std::string(table_name(ref.table));
    j["row"] = ref.index;
    return j;
}

std::string record_summary(const Store& store, const RecordRef& ref) {
    if (ref.table != TableId::ScanResults) return std::string(table_name(ref.table));
    const auto& r = store.scan_at(ref.index);
    std::string s = r.image_name + " " + r.tool_name + " " + r.package_name + ":" +
                    r.package_version + " " + std::string(r.severity.name());
    return s;
}

} // namespace

ReportDoc make_detect_report(const Store& store, const LevelBreakdown& breakdown,
                             const std::vector<Finding>& findings,
                             const std::vector<RecordRef>& hard_fps,
                             const std::vector<RecordRef>& soft_fps) {
    ReportDoc doc;
    doc.default_section = "breakdown";

    ordered_json j;
    j["inconsistent_cves"] = breakdown.l1_total;
    j["images"] = store.distinct_images().size();
    j["per_image_average"] = breakdown.per_image_average.rounded(2);
    ordered_json rows = ordered_json::array();
    std::string csv_text = "level,count,percent\n";
    {
        // The L1 row leads, mirroring the top-down table shape.
        ordered_json row;
        row["level"] = "L1";
        row["count"] = breakdown.l1_total;
        row["percent"] = 100.0;
        rows.push_back(row);
        csv_text += csv::render_row({"L1", std::to_string(breakdown.l1_total), "100.00"});
    }
    for (const auto& [level, info] : breakdown.per_level) {
        ordered_json row;
        row["level"] = std::string(level_name(level));
        row["count"] = info.distinct_cves;
        row["percent"] = round6(info.percent_of_l1);
        rows.push_back(row);
        csv_text += csv::render_row({std::string(level_name(level)),
                                     std::to_string(info.distinct_cves),
                                     format_fixed(info.percent_of_l1, 2)});
        doc.metrics["percent." + std::string(level_name(level))] = info.percent_of_l1;
        doc.metrics["count." + std::string(level_name(level))] =
            static_cast<double>(info.distinct_cves);
    }
    j["breakdown"] = rows;

    ordered_json finding_rows = ordered_json::array();
    std::string findings_csv = "level,cve,note,evidence\n";
    for (const auto& f : findings) {
        ordered_json fr;
        fr["level"] = std::string(level_name(f.level));
        fr["cve"] = f.cve_identifier;
        fr["note"] = f.note;
        ordered_json ev = ordered_json::array();
        std::string ev_text;
        for (const auto& ref : f.evidence) {
            ev.push_back(ref_json(ref));
            if (!ev_text.empty()) ev_text += "; ";
            ev_text += record_summary(store, ref);
        }
        fr["evidence"] = ev;
        finding_rows.push_back(std::move(fr));
        findings_csv += csv::render_row({std::string(level_name(f.level)), f.cve_identifier,
                                         f.note, ev_text});
    }
    j["findings"] = finding_rows;

    auto fps_json = [&](const std::vector<RecordRef>& refs) {
        ordered_json arr = ordered_json::array();
        for (const auto& ref : refs) {
            ordered_json e = ref_json(ref);
            e["record"] = record_summary(store, ref);
            arr.push_back(std::move(e));
        }
        return arr;
    };
    j["hard_false_positives"] = fps_json(hard_fps);
    j["soft_false_positives"] = fps_json(soft_fps);
    doc.metrics["hard_false_positives"] = static_cast<double>(hard_fps.size());
    doc.metrics["soft_false_positives"] = static_cast<double>(soft_fps.size());
    doc.metrics["inconsistent_cves"] = static_cast<double>(breakdown.l1_total);
    doc.metrics["per_image_average"] = breakdown.per_image_average.value();

    doc.json = finish(j);
    doc.csv["breakdown"] = csv_text;
    doc.csv["findings"] = findings_csv;
    return doc;
}

ReportDoc make_resolve_report(const Store& store, const ResolutionOutcome& outcome) {
    ReportDoc doc;
    doc.default_section = "summary";

    std::size_t l1 = outcome.resolved.size() + outcome.residual_inconsistent.size();
    ordered_json j;
    j["inconsistent_cves"] = l1;
    j["resolved"] = outcome.resolved.size();
    j["residual"] = outcome.residual_inconsistent.size();
    j["removed_false_positives"] = outcome.removed_false_positives.size();
    j["per_image_average_after"] = outcome.per_image_average_after.rounded(2);

    std::string summary_csv = "level,resolved,percent\n";
    ordered_json summary = ordered_json::array();
    double total_pct = l1 == 0 ? 0.0
                               : 100.0 * static_cast<double>(outcome.resolved.size()) /
                                     static_cast<double>(l1);
    {
        ordered_json row;
        row["level"] = "L1";
        row["resolved"] = outcome.resolved.size();
        row["percent"] = round6(total_pct);
        summary.push_back(row);
        summary_csv += csv::render_row({"L1", std::to_string(outcome.resolved.size()),
                                        format_fixed(total_pct, 2)});
    }
    for (const auto& [level, count] : outcome.per_level_resolved) {
        double pct = l1 == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(l1);
        ordered_json row;
        row["level"] = std::string(level_name(level));
        row["resolved"] = count;
        row["percent"] = round6(pct);
        summary.push_back(row);
        summary_csv += csv::render_row({std::string(level_name(level)), std::to_string(count),
                                        format_fixed(pct, 2)});
        doc.metrics["resolved." + std::string(level_name(level))] = static_cast<double>(count);
    }
    j["summary"] = summary;

    std::string res_csv = "cve,resolved_severity,level,method\n";
    ordered_json resolutions = ordered_json::array();
    for (const auto& [cve, res] : outcome.resolved) {
        ordered_json row;
        row["cve"] = cve;
        row["severity"] = std::string(severity_name(res.severity));
        row["level"] = std::string(level_name(res.level));
        row["method"] = std::string(resolve_method_name(res.method));
        resolutions.push_back(std::move(row));
        res_csv += csv::render_row({cve, std::string(severity_name(res.severity)),
                                    std::string(level_name(res.level)),
                                    std::string(resolve_method_name(res.method))});
    }
    j["resolutions"] = resolutions;

    ordered_json residual = ordered_json::array();
    for (const auto& cve : outcome.residual_inconsistent) residual.push_back(cve);
    j["residual_cves"] = residual;

    ordered_json removed = ordered_json::array();
    for (const auto& ref : outcome.removed_false_positives) {
        ordered_json e = ref_json(ref);
        e["record"] = record_summary(store, ref);
        removed.push_back(std::move(e));
    }
    j["removed"] = removed;

    doc.metrics["resolved"] = static_cast<double>(outcome.resolved.size());
    doc.metrics["residual"] = static_cast<double>(outcome.residual_inconsistent.size());
    doc.metrics["removed_false_positives"] =
        static_cast<double>(outcome.removed_false_positives.size());
    doc.metrics["resolved_percent"] = total_pct;
    doc.metrics["per_image_average_after"] = outcome.per_image_average_after.value();

    doc.json = finish(j);
    doc.csv["summary"] = summary_csv;
    doc.csv["resolutions"] = res_csv;
    return doc;
}

namespace {

ordered_json metrics_json(const MacroMetrics& m) {
    ordered_json j;
    j["accuracy"] = round6(m.accuracy);
    j["macro_precision"] = round6(m.precision);
    j["macro_recall"] = round6(m.recall);
    j["macro_f1"] = round6(m.f1);
    return j;
}

ordered_json confusion_json(const Confusion& c) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : c) {
        ordered_json r = ordered_json::array();
        for (auto v : row) r.push_back(v);
        rows.push_back(std::move(r));
    }
    return rows;
}

ordered_json auc_json(const std::array<std::optional<double>, 5>& auc) {
    ordered_json arr = ordered_json::array();
    for (const auto& v : auc) {
        if (v) arr.push_back(round6(*v));
        else arr.push_back(nullptr);
    }
    return arr;
}

} // namespace

ReportDoc make_classify_report(const TrainerParams& params, const Dataset& ds,
                               const EvalReport& eval) {
    ReportDoc doc;
    doc.default_section = "metrics";

    ordered_json j;
    j["algorithm"] = std::string(algorithm_name(params.algorithm));
    j["samples"] = ds.size();
    j["folds"] = eval.per_fold.size();
    j["metrics"] = metrics_json(eval.metrics);
    j["auc_per_class"] = auc_json(eval.auc);
    j["confusion"] = confusion_json(eval.confusion);

    ordered_json encoders;
    for (int col = 0; col < Dataset::kCategoricalCount; ++col) {
        ordered_json table = ordered_json::array();
        for (const auto& token : ds.encoders[static_cast<std::size_t>(col)]) table.push_back(token);
        encoders[std::string(Dataset::kColumns[static_cast<std::size_t>(col)])] = std::move(table);
    }
    j["encoders"] = std::move(encoders);

    ordered_json folds = ordered_json::array();
    for (const auto& fold : eval.per_fold) {
        ordered_json f;
        f["metrics"] = metrics_json(fold.metrics);
        f["auc_per_class"] = auc_json(fold.auc);
        f["confusion"] = confusion_json(fold.confusion);
        folds.push_back(std::move(f));
    }
    j["per_fold"] = folds;

    ordered_json warnings = ordered_json::array();
    for (const auto& w : eval.warnings) warnings.push_back(w);
    j["warnings"] = warnings;

    // metrics CSV
    std::string metrics_csv = "metric,value\n";
    auto add_metric = [&](const std::string& name, double v) {
        metrics_csv += csv::render_row({name, format_fixed(v, 6)});
        doc.metrics[name] = v;
    };
    add_metric("accuracy", eval.metrics.accuracy);
    add_metric("macro_precision", eval.metrics.precision);
    add_metric("macro_recall", eval.metrics.recall);
    add_metric("macro_f1", eval.metrics.f1);
    for (int c = 0; c < 5; ++c) {
        if (eval.auc[static_cast<std::size_t>(c)]) {
            add_metric("auc_class_" + std::to_string(c), *eval.auc[static_cast<std::size_t>(c)]);
        }
    }

    std::string confusion_csv = "true\\pred,0,1,2,3,4\n";
    for (int t = 0; t < 5; ++t) {
        std::vector<std::string> row{std::to_string(t)};
        for (int p = 0; p < 5; ++p) {
            row.push_back(std::to_string(eval.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)]));
        }
        confusion_csv += csv::render_row(row);
    }

    // ROC points over the pooled predictions.
    std::string roc_csv = "class,fpr,tpr\n";
    if (!eval.scores.empty()) {
        // y_true is implied by the dataset ordering used for pooled predictions.
        std::vector<int> y_true(ds.labels.begin(), ds.labels.end());
        for (int c = 0; c < 5; ++c) {
            for (const auto& pt : roc_points(y_true, eval.scores, c)) {
                roc_csv += csv::render_row({std::to_string(c), format_fixed(pt.fpr, 6),
                                            format_fixed(pt.tpr, 6)});
            }
        }
    }

    // Dataset CSV: the ten feature columns plus the label.
    std::string dataset_csv;
    for (std::size_t c = 0; c < Dataset::kColumns.size(); ++c) {
        if (c) dataset_csv += ',';
        dataset_csv += std::string(Dataset::kColumns[c]);
    }
    dataset_csv += ",label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::vector<std::string> row;
        for (int f = 0; f < Dataset::kFeatureCount; ++f) {
            double v = ds.features[i][static_cast<std::size_t>(f)];
            if (f < Dataset::kCategoricalCount) row.push_back(std::to_string(static_cast<int>(v)));
            else row.push_back(format_fixed(v, 1));
        }
        row.push_back(std::to_string(ds.labels[i]));
        dataset_csv += csv::render_row(row);
    }

    doc.json = finish(j);
    doc.csv["metrics"] = metrics_csv;
    doc.csv["confusion"] = confusion_csv;
    doc.csv["roc"] = roc_csv;
    doc.csv["dataset"] = dataset_csv;
    return doc;
}

ReportDoc make_synth_report(const CorpusConfig& config, const SyntheticCorpus& corpus) {
    ReportDoc doc;
    doc.default_section = "summary";

    std::size_t inconsistent = 0;
    std::map<InconsistencyKind, std::size_t> kind_counts;
    for (const auto& c : corpus.ledger.cves) {
        if (!c.kinds.empty()) ++inconsistent;
        for (auto k : c.kinds) kind_counts[k] += 1;
    }

    ordered_json j;
    j["images"] = config.image_count;
    j["distinct_cves"] = corpus.ledger.cves.size();
    j["inconsistent_cves"] = inconsistent;
    j["scan_records"] = corpus.scan.size();
    j["advisories"] = corpus.advisories.size();
    j["fingerprint"] = corpus.fingerprint;

    std::string summary_csv = "kind,level,count,percent_of_inconsistent\n";
    ordered_json kinds = ordered_json::array();
    for (const auto& [k, count] : kind_counts) {
        double pct = inconsistent == 0
                         ? 0.0
                         : 100.0 * static_cast<double>(count) / static_cast<double>(inconsistent);
        ordered_json row;
        row["kind"] = std::string(kind_name(k));
        row["level"] = std::string(level_name(kind_level(k)));
        row["count"] = count;
        row["percent_of_inconsistent"] = round6(pct);
        kinds.push_back(std::move(row));
        summary_csv += csv::render_row({std::string(kind_name(k)),
                                        std::string(level_name(kind_level(k))),
                                        std::to_string(count), format_fixed(pct, 2)});
        doc.metrics["kind." + std::string(kind_name(k))] = static_cast<double>(count);
    }
    j["kinds"] = kinds;

    std::size_t hard = 0, soft = 0, unapproved = 0;
    for (const auto& f : corpus.ledger.fps) {
        if (f.kind == FpEntryKind::Hard) ++hard;
        else if (f.kind == FpEntryKind::Soft) ++soft;
        else ++unapproved;
    }
    j["hard_false_positives"] = hard;
    j["soft_false_positives"] = soft;
    j["unapproved_duplicates"] = unapproved;

    doc.metrics["distinct_cves"] = static_cast<double>(corpus.ledger.cves.size());
    doc.metrics["inconsistent_cves"] = static_cast<double>(inconsistent);
    doc.metrics["scan_records"] = static_cast<double>(corpus.scan.size());

    doc.json = finish(j);
    doc.csv["summary"] = summary_csv;
    return doc;
}

} // namespace lucid

// lucid command-line front end. Talks to the core exclusively through the C
// API in lucid/lucid.h; all heavy lifting happens behind that boundary.

#include <lucid/lucid.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitThreshold = 2;

struct StoreHandle {
    lucid_store_t* ptr = nullptr;
    StoreHandle() { lucid_store_create(&ptr); }
    explicit StoreHandle(lucid_store_t* p) : ptr(p) {}
    ~StoreHandle() { lucid_store_free(ptr); }
    StoreHandle(StoreHandle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
    StoreHandle(const StoreHandle&) = delete;
    StoreHandle& operator=(const StoreHandle&) = delete;
};

struct ReportHandle {
    lucid_report_t* ptr = nullptr;
    ~ReportHandle() { lucid_report_free(ptr); }
};

[[noreturn]] void die(const std::string& message) {
    std::cerr << "lucid: " << message << "\n";
    std::exit(kExitError);
}

void check(lucid_status_t status, const std::string& context) {
    if (status != LUCID_OK) die(context + ": " + lucid_last_error());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) die("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct GlobalOpts {
    std::string data_dir;
    std::string output_format = "json";
    std::string out_path;
    unsigned long long seed = 0;
    bool seed_given = false;
    int threads = 1;
    std::optional<long long> fail_threshold;
};

void add_global_flags(CLI::App* cmd, GlobalOpts& g) {
    const char* env_dir = std::getenv("LUCID_DATA_DIR");
    if (env_dir && g.data_dir.empty()) g.data_dir = env_dir;
    cmd->add_option("--data-dir", g.data_dir, "Store directory (env LUCID_DATA_DIR)");
    cmd->add_option("--output-format", g.output_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", g.out_path, "Write the report here instead of stdout");
    cmd->add_option("--seed", g.seed, "Deterministic seed")
        ->each([&g](const std::string&) { g.seed_given = true; });
    cmd->add_option("--threads", g.threads, "Worker threads (output is identical at any value)");
    cmd->add_option("--fail-threshold", g.fail_threshold,
                    "Exit 2 when residual inconsistencies exceed this count");
}

const std::string& require_data_dir(const GlobalOpts& g) {
    if (g.data_dir.empty()) die("no data directory; pass --data-dir or set LUCID_DATA_DIR");
    return g.data_dir;
}

void emit(const GlobalOpts& g, const lucid_report_t* report) {
    const char* text = nullptr;
    if (g.output_format == "csv") {
        text = lucid_report_csv(report, nullptr);
    } else {
        text = lucid_report_json(report);
    }
    if (!text) die("report has no " + g.output_format + " rendering");
    if (g.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(g.out_path, std::ios::binary);
        if (!out) die("cannot write " + g.out_path);
        out << text;
    }
}

void write_section(const lucid_report_t* report, const std::string& section, const fs::path& path) {
    const char* text = lucid_report_csv(report, section.c_str());
    if (!text) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) die("cannot write " + path.string());
    out << text;
}

StoreHandle load_store(const GlobalOpts& g) {
    StoreHandle store;
    check(lucid_store_load_dir(store.ptr, require_data_dir(g).c_str()), "loading store");
    return store;
}

// ---- ingest ----

struct IngestArgs {
    std::vector<std::string> reports;    // [format:]path
    std::vector<std::string> manifests;  // image:manager:path
    std::vector<std::string> advisories; // path
};

int cmd_ingest(const GlobalOpts& g, const IngestArgs& args) {
    StoreHandle store;
    std::size_t scan_count = 0, manifest_count = 0, advisory_count = 0;

    for (const auto& spec : args.reports) {
        std::string format = "canonical";
        std::string path = spec;
        auto colon = spec.find(':');
        if (colon != std::string::npos) {
            std::string prefix = spec.substr(0, colon);
            if (prefix == "canonical" || prefix == "trivy" || prefix == "clair" || prefix == "snyk") {
                format = prefix;
                path = spec.substr(colon + 1);
            }
        }
        std::string text = read_file(path);
        size_t added = 0;
        check(lucid_store_add_scan_report(store.ptr, format.c_str(), text.c_str(), &added),
              "parsing report " + path);
        scan_count += added;
    }
    for (const auto& spec : args.manifests) {
        auto first = spec.find(':');
        auto second = first == std::string::npos ? std::string::npos : spec.find(':', first + 1);
        if (second == std::string::npos) {
            die("manifest spec must be image:manager:path, got \"" + spec + "\"");
        }
        std::string image = spec.substr(0, first);
        std::string manager = spec.substr(first + 1, second - first - 1);
        std::string path = spec.substr(second + 1);
        std::string text = read_file(path);
        size_t added = 0;
        check(lucid_store_add_manifest(store.ptr, image.c_str(), manager.c_str(), text.c_str(),
                                       &added),
              "parsing manifest " + path);
        manifest_count += added;
    }
    for (const auto& path : args.advisories) {
        std::string text = read_file(path);
        size_t added = 0;
        check(lucid_store_add_advisories(store.ptr, text.c_str(), &added),
              "parsing advisories " + path);
        advisory_count += added;
    }

    check(lucid_store_seal(store.ptr), "sealing store");
    check(lucid_store_save_dir(store.ptr, require_data_dir(g).c_str()), "writing store");

    if (g.output_format == "csv") {
        std::ostringstream out;
        out << "source,records\n";
        out << "scan_reports," << scan_count << "\n";
        out << "manifests," << manifest_count << "\n";
        out << "advisories," << advisory_count << "\n";
        std::cout << out.str();
    } else {
        ordered_json j;
        j["scan_records"] = scan_count;
        j["manifest_entries"] = manifest_count;
        j["advisories"] = advisory_count;
        std::cout << j.dump(2) << "\n";
    }
    return kExitOk;
}

// ---- detect ----

int cmd_detect(const GlobalOpts& g) {
    StoreHandle store = load_store(g);
    ReportHandle report;
    check(lucid_detect(store.ptr, g.threads, &report.ptr), "detect");
    fs::path dir = require_data_dir(g);
    write_section(report.ptr, "breakdown", dir / "breakdown.csv");
    write_section(report.ptr, "findings", dir / "findings.csv");
    emit(g, report.ptr);
    return kExitOk;
}

// ---- resolve ----

int cmd_resolve(const GlobalOpts& g, const std::vector<std::string>& credible) {
    StoreHandle store = load_store(g);

    lucid_resolve_opts_t opts;
    lucid_resolve_opts_init(&opts);
    opts.threads = g.threads;
    std::vector<const char*> credible_ptrs;
    for (const auto& c : credible) credible_ptrs.push_back(c.c_str());
    if (!credible_ptrs.empty()) {
        opts.credible_assigners = credible_ptrs.data();
        opts.credible_count = credible_ptrs.size();
    }

    ReportHandle report;
    lucid_store_t* rewritten_raw = nullptr;
    check(lucid_resolve(store.ptr, &opts, &report.ptr, &rewritten_raw), "resolve");
    StoreHandle rewritten(rewritten_raw);

    fs::path dir = require_data_dir(g);
    write_section(report.ptr, "summary", dir / "resolution_summary.csv");
    write_section(report.ptr, "resolutions", dir / "resolutions.csv");
    check(lucid_store_save_dir(rewritten.ptr, (dir / "resolved").string().c_str()),
          "writing resolved store");
    emit(g, report.ptr);

    if (g.fail_threshold) {
        double residual = 0.0;
        check(lucid_report_metric(report.ptr, "residual", &residual), "reading residual");
        if (static_cast<long long>(residual) > *g.fail_threshold) return kExitThreshold;
    }
    return kExitOk;
}

// ---- classify ----

struct ClassifyArgs {
    std::string algorithm = "decision_tree";
    int folds = 5;
    int tree_max_depth = 0;
    int tree_max_features = 0;
    int n_estimators = 0;
    int forest_max_depth = 0;
    int k_neighbors = 0;
    int minkowski_p = 0;
    double variance_smoothing = 0.0;
    bool emit_dataset = false;
};

int cmd_classify(const GlobalOpts& g, const ClassifyArgs& args) {
    StoreHandle store = load_store(g);

    lucid_classify_opts_t opts;
    lucid_classify_opts_init(&opts);
    opts.algorithm = args.algorithm.c_str();
    opts.seed = g.seed;
    opts.folds = args.folds;
    opts.threads = g.threads;
    opts.tree_max_depth = args.tree_max_depth;
    opts.tree_max_features = args.tree_max_features;
    opts.n_estimators = args.n_estimators;
    opts.forest_max_depth = args.forest_max_depth;
    opts.k_neighbors = args.k_neighbors;
    opts.minkowski_p = args.minkowski_p;
    opts.variance_smoothing = args.variance_smoothing;

    ReportHandle report;
    check(lucid_classify(store.ptr, &opts, &report.ptr), "classify");

    fs::path dir = require_data_dir(g);
    write_section(report.ptr, "metrics", dir / "metrics.csv");
    write_section(report.ptr, "confusion", dir / "confusion.csv");
    write_section(report.ptr, "roc", dir / "roc_points.csv");
    if (args.emit_dataset) write_section(report.ptr, "dataset", dir / "dataset.csv");
    emit(g, report.ptr);
    return kExitOk;
}

// ---- synth ----

struct SynthArgs {
    std::string config_path;
    std::optional<int> images;
    std::optional<long long> total_cves;
    std::optional<long long> advisories;
};

int cmd_synth(const GlobalOpts& g, const SynthArgs& args) {
    ordered_json config = ordered_json::object();
    if (!args.config_path.empty()) {
        try {
            config = ordered_json::parse(read_file(args.config_path));
        } catch (const std::exception& e) {
            die(std::string("bad config file: ") + e.what());
        }
    }
    // A flag seed overrides the config file; otherwise the file's seed stands.
    if (g.seed_given || !config.contains("seed")) config["seed"] = g.seed;
    if (args.images) config["image_count"] = *args.images;
    if (args.total_cves) config["total_cves"] = *args.total_cves;
    if (args.advisories) config["advisory_count"] = *args.advisories;

    ReportHandle report;
    std::string config_text = config.dump();
    check(lucid_synth(config_text.c_str(), require_data_dir(g).c_str(), &report.ptr), "synth");
    emit(g, report.ptr);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lucid: reconcile container-scanner vulnerability reports"};
    app.require_subcommand(1);

    GlobalOpts g_ingest, g_detect, g_resolve, g_classify, g_synth;
    IngestArgs ingest_args;
    ClassifyArgs classify_args;
    SynthArgs synth_args;
    std::vector<std::string> credible;

    auto* ingest = app.add_subcommand("ingest", "Parse reports/manifests/advisories into the store");
    add_global_flags(ingest, g_ingest);
    ingest->add_option("--report", ingest_args.reports, "Scan report: [canonical|trivy|clair|snyk:]path");
    ingest->add_option("--manifest", ingest_args.manifests, "Package manifest: image:manager:path");
    ingest->add_option("--advisories", ingest_args.advisories, "Advisory feed path");

    auto* detect = app.add_subcommand("detect", "Classify severity inconsistencies (L2..L6)");
    add_global_flags(detect, g_detect);

    auto* resolve = app.add_subcommand("resolve", "Strip false positives and resolve bottom-up");
    add_global_flags(resolve, g_resolve);
    resolve->add_option("--credible", credible, "Credible assigners (default NVD, Redhat, Ubuntu)");

    auto* classify = app.add_subcommand("classify", "Train/evaluate the severity classifier");
    add_global_flags(classify, g_classify);
    classify->add_option("--algorithm", classify_args.algorithm,
                         "decision_tree, random_forest, knn, or gaussian_nb");
    classify->add_option("--folds", classify_args.folds, "Cross-validation folds");
    classify->add_option("--tree-max-depth", classify_args.tree_max_depth, "Decision tree depth cap");
    classify->add_option("--tree-max-features", classify_args.tree_max_features,
                         "Split candidates per node");
    classify->add_option("--n-estimators", classify_args.n_estimators, "Forest size");
    classify->add_option("--forest-max-depth", classify_args.forest_max_depth, "Forest depth cap");
    classify->add_option("--k", classify_args.k_neighbors, "kNN neighbor count");
    classify->add_option("--minkowski-p", classify_args.minkowski_p, "kNN Minkowski exponent");
    classify->add_option("--var-smoothing", classify_args.variance_smoothing,
                         "GNB variance smoothing multiplier");
    classify->add_flag("--emit-dataset", classify_args.emit_dataset,
                       "Also write dataset.csv next to the store");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with an injection ledger");
    add_global_flags(synth, g_synth);
    synth->add_option("--config", synth_args.config_path, "Corpus config JSON file");
    synth->add_option("--images", synth_args.images, "Image count override");
    synth->add_option("--cves", synth_args.total_cves, "Distinct CVE count override");
    synth->add_option("--advisories", synth_args.advisories, "Advisory count override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(g_ingest, ingest_args);
        if (detect->parsed()) return cmd_detect(g_detect);
        if (resolve->parsed()) return cmd_resolve(g_resolve, credible);
        if (classify->parsed()) return cmd_classify(g_classify, classify_args);
        if (synth->parsed()) return cmd_synth(g_synth, synth_args);
    } catch (const std::exception& e) {
        die(e.what());
    }
    return kExitError;
}

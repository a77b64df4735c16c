// Drives the installed binary end to end: exit codes, file outputs, and
// byte-level determinism.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = LUCID_CLI_PATH;
const std::string kData = LUCID_TEST_DATA_DIR;

int run(const std::string& args, std::string* stdout_text = nullptr) {
    std::string capture = "/tmp/lucid_cli_stdout.txt";
    int status = std::system((kCli + " " + args + " > " + capture + " 2>/tmp/lucid_cli_stderr.txt").c_str());
    if (stdout_text) {
        std::ifstream in(capture, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        *stdout_text = buf.str();
    }
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("/tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
};

} // namespace

TEST_CASE("cli: ingest -> detect -> resolve on the example fixture") {
    TempDir dir("lucid_cli_fixture");
    std::string out;
    int code = run("ingest --data-dir " + dir.path.string() +
                       " --report " + kData + "/table2_reports.json" +
                       " --manifest alpha:dpkg:" + kData + "/manifests/alpha_dpkg.txt" +
                       " --manifest gamma:apk:" + kData + "/manifests/gamma_apk.txt" +
                       " --advisories " + kData + "/advisories_nvd.json" +
                       " --advisories " + kData + "/advisories_redhat.json" +
                       " --advisories " + kData + "/advisories_ubuntu.json" +
                       " --output-format csv",
                   &out);
    CHECK(code == 0);
    CHECK(out.find("scan_reports,32") != std::string::npos);
    CHECK(fs::exists(dir.path / "scan_results.csv"));
    CHECK(fs::exists(dir.path / "assigner_results.csv"));
    CHECK(fs::exists(dir.path / "image_packages.csv"));

    code = run("detect --data-dir " + dir.path.string() + " --output-format csv", &out);
    CHECK(code == 0);
    CHECK(out.rfind("level,count,percent", 0) == 0);
    CHECK(out.find("L1,16") != std::string::npos); // all 16 example CVEs disagree
    CHECK(fs::exists(dir.path / "breakdown.csv"));
    CHECK(fs::exists(dir.path / "findings.csv"));

    code = run("resolve --data-dir " + dir.path.string() + " --output-format json", &out);
    CHECK(code == 0);
    CHECK(out.find("\"residual\": 0") != std::string::npos);
    CHECK(fs::exists(dir.path / "resolutions.csv"));
    CHECK(fs::exists(dir.path / "resolved" / "scan_results.csv"));

    // the resolved store is consistent: a second resolve settles nothing
    code = run("resolve --data-dir " + (dir.path / "resolved").string() + " --output-format json",
               &out);
    CHECK(code == 0);
    CHECK(out.find("\"resolved\": 0") != std::string::npos);
}

TEST_CASE("cli: unreadable input exits 1 naming the path") {
    TempDir dir("lucid_cli_badpath");
    std::string out;
    int code = run("ingest --data-dir " + dir.path.string() + " --report /no/such/file.json", &out);
    CHECK(code == 1);
    std::string err = slurp("/tmp/lucid_cli_stderr.txt");
    CHECK(err.find("/no/such/file.json") != std::string::npos);
    CHECK(!fs::exists(dir.path / "scan_results.csv")); // no partial outputs
}

TEST_CASE("cli: missing store exits 1; corrupt header exits 1") {
    TempDir dir("lucid_cli_nostore");
    CHECK(run("detect --data-dir " + dir.path.string()) == 1);

    std::ofstream(dir.path / "scan_results.csv") << "bogus,header\n";
    std::ofstream(dir.path / "assigner_results.csv") << "x\n";
    std::ofstream(dir.path / "image_packages.csv") << "y\n";
    CHECK(run("detect --data-dir " + dir.path.string()) == 1);
}

TEST_CASE("cli: unknown algorithm exits 1 with a message") {
    TempDir dir("lucid_cli_algo");
    run("synth --data-dir " + dir.path.string() +
        " --config " + kData + "/small_corpus.json");
    CHECK(run("classify --data-dir " + dir.path.string() + " --algorithm perceptron") == 1);
    std::string err = slurp("/tmp/lucid_cli_stderr.txt");
    CHECK(err.find("perceptron") != std::string::npos);
}

TEST_CASE("cli: fail-threshold escalates the exit code") {
    TempDir dir("lucid_cli_threshold");
    std::string out;
    CHECK(run("synth --data-dir " + dir.path.string() +
              " --config " + kData + "/small_corpus.json", &out) == 0);
    // the small corpus leaves residual inconsistencies behind
    CHECK(run("resolve --data-dir " + dir.path.string() + " --fail-threshold 0", &out) == 2);
    CHECK(run("resolve --data-dir " + dir.path.string() + " --fail-threshold 100000", &out) == 0);
}

TEST_CASE("cli: --out writes exactly the stdout bytes") {
    TempDir dir("lucid_cli_out");
    std::string stdout_text;
    CHECK(run("synth --data-dir " + dir.path.string() +
              " --config " + kData + "/small_corpus.json --output-format json",
              &stdout_text) == 0);
    fs::path out_file = dir.path / "summary.json";
    std::string piped;
    CHECK(run("synth --data-dir " + dir.path.string() +
              " --config " + kData + "/small_corpus.json --output-format json --out " +
              out_file.string(), &piped) == 0);
    CHECK(piped.empty());
    CHECK(slurp(out_file) == stdout_text);
}

TEST_CASE("cli: default synth summary shows the target shares end to end") {
    TempDir dir("lucid_cli_default_scale");
    std::string out;
    CHECK(run("synth --data-dir " + dir.path.string() + " --output-format csv", &out) == 0);
    CHECK(out.find("name_mismatch,L2,819,49.07") != std::string::npos);
    CHECK(out.find("version_mismatch,L3,217,13.00") != std::string::npos);
    CHECK(out.find("assigner_divergence,L4,1586,95.03") != std::string::npos);
    CHECK(out.find("stale_modification_time,L5,960,57.52") != std::string::npos);
    CHECK(out.find("intra_tool_duplicate,L6,300,17.97") != std::string::npos);

    CHECK(run("detect --data-dir " + dir.path.string() + " --output-format csv", &out) == 0);
    CHECK(out.find("L1,1669,100.00") != std::string::npos);
    CHECK(out.find("L2,819,49.07") != std::string::npos);

    CHECK(run("resolve --data-dir " + dir.path.string() + " --output-format json", &out) == 0);
    CHECK(out.find("\"resolved\": 1182") != std::string::npos);
    CHECK(out.find("\"residual\": 487") != std::string::npos);
    CHECK(out.find("\"removed_false_positives\": 160") != std::string::npos);
    CHECK(out.find("\"per_image_average_after\": \"2.90\"") != std::string::npos);
}

TEST_CASE("cli: LUCID_DATA_DIR supplies the data directory") {
    TempDir dir("lucid_cli_env");
    std::string cmd = "LUCID_DATA_DIR=" + dir.path.string() + " " + kCli + " synth --config " +
                      kData + "/small_corpus.json > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir.path / "scan_results.csv"));
}

TEST_CASE("cli: re-running ingest on identical inputs is byte-identical") {
    TempDir a("lucid_cli_ingest_a");
    TempDir b("lucid_cli_ingest_b");
    std::string args = " --report " + kData + "/table2_reports.json" +
                       " --manifest alpha:dpkg:" + kData + "/manifests/alpha_dpkg.txt" +
                       " --advisories " + kData + "/advisories_nvd.json";
    CHECK(run("ingest --data-dir " + a.path.string() + args) == 0);
    CHECK(run("ingest --data-dir " + b.path.string() + args) == 0);
    for (const char* name : {"scan_results.csv", "assigner_results.csv", "image_packages.csv"}) {
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
}

TEST_CASE("cli: classify emits metrics and ROC files") {
    TempDir dir("lucid_cli_classify");
    CHECK(run("synth --data-dir " + dir.path.string() +
              " --config " + kData + "/small_corpus.json") == 0);
    std::string out;
    CHECK(run("classify --data-dir " + dir.path.string() +
              " --algorithm random_forest --n-estimators 30 --output-format csv --emit-dataset",
              &out) == 0);
    CHECK(out.rfind("metric,value", 0) == 0);
    CHECK(fs::exists(dir.path / "metrics.csv"));
    CHECK(fs::exists(dir.path / "confusion.csv"));
    CHECK(fs::exists(dir.path / "roc_points.csv"));
    CHECK(fs::exists(dir.path / "dataset.csv"));

    // same seed twice: identical bytes
    std::string again;
    CHECK(run("classify --data-dir " + dir.path.string() +
              " --algorithm random_forest --n-estimators 30 --output-format csv",
              &again) == 0);
    CHECK(again == out);
}

TEST_CASE("cli: identical seeds give identical bytes, different seeds differ") {
    TempDir a("lucid_cli_seed_a");
    TempDir b("lucid_cli_seed_b");
    TempDir c("lucid_cli_seed_c");
    std::string config = " --config " + kData + "/small_corpus.json";
    CHECK(run("synth --data-dir " + a.path.string() + config + " --seed 17") == 0);
    CHECK(run("synth --data-dir " + b.path.string() + config + " --seed 17") == 0);
    CHECK(run("synth --data-dir " + c.path.string() + config + " --seed 18") == 0);
    for (const char* name : {"scan_results.csv", "assigner_results.csv", "image_packages.csv",
                             "ledger.csv"}) {
        CHECK(slurp(a.path / name) == slurp(b.path / name));
    }
    CHECK(slurp(a.path / "scan_results.csv") != slurp(c.path / "scan_results.csv"));
}

TEST_CASE("cli: a config-file seed stands unless the flag overrides it") {
    TempDir dir("lucid_cli_seed_config");
    fs::path cfg = dir.path / "cfg.json";
    std::ofstream(cfg) << R"({"image_count": 6, "cves_per_image": 10, "total_cves": 60,
        "inconsistent_fraction": 0.3, "hard_fp_count": 0, "soft_fp_count": 0,
        "unapproved_dupe_count": 0, "advisory_count": 50, "seed": 55})";

    TempDir from_file("lucid_cli_seed_file");
    TempDir flag_55("lucid_cli_seed_flag55");
    TempDir flag_56("lucid_cli_seed_flag56");
    CHECK(run("synth --data-dir " + from_file.path.string() + " --config " + cfg.string()) == 0);
    CHECK(run("synth --data-dir " + flag_55.path.string() + " --config " + cfg.string() +
              " --seed 55") == 0);
    CHECK(run("synth --data-dir " + flag_56.path.string() + " --config " + cfg.string() +
              " --seed 56") == 0);
    CHECK(slurp(from_file.path / "scan_results.csv") == slurp(flag_55.path / "scan_results.csv"));
    CHECK(slurp(from_file.path / "scan_results.csv") != slurp(flag_56.path / "scan_results.csv"));
}

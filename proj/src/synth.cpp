#include "synth.hpp"

#include "csv.hpp"
#include "cvss.hpp"
#include "errors.hpp"
#include "instant.hpp"
#include "util.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace lucid {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kPackagePool[] = {
    "openssl",   "curl",     "zlib",     "glibc",    "busybox",  "libxml2", "pcre2",
    "tar",       "gzip",     "bash",     "coreutils", "util-linux", "ncurses", "readline",
    "sqlite",    "expat",    "libpng",   "freetype", "perl",     "python3", "gcc-12",
    "systemd",   "dbus",     "krb5",     "cyrus-sasl", "libgcrypt", "gnutls", "nghttp2",
    "libssh2",   "openldap", "tiff",     "vim",      "xz-utils", "libtasn1", "p11-kit",
    "libidn2",   "grep",     "sed",      "shadow",   "e2fsprogs"};

constexpr std::string_view kNonCredible[] = {
    "debian-tracker", "suse-sec",    "gentoo-glsa", "arch-secdb",  "oracle-linux",
    "amazon-alas",    "photon-os",   "chainguard",  "wolfi-db",    "cbl-mariner"};

constexpr std::string_view kCredible[] = {"NVD", "Redhat", "Ubuntu"};

enum class Destiny { L6, L5, L4, L3, L2, Residual };

struct SlotPlan {
    bool inconsistent = false;
    Destiny destiny = Destiny::Residual;
    bool add_k5 = false; // extra StaleModificationTime on an L6 slot
    bool add_k4 = false; // extra (non-credible) AssignerDivergence
    bool add_k3 = false; // extra VersionMismatch
    bool add_k2 = false; // extra NameMismatch
};

struct ImageCtx {
    std::string name;
    PackageType os = PackageType::Unknown;
    std::set<std::pair<std::string, std::string>> packages; // (name, version) for the inventory
};

std::string cve_id(std::int64_t slot) {
    return "CVE-2099-" + std::to_string(100000 + slot);
}

std::string make_version(Rng& rng, PackageType os) {
    int maj = static_cast<int>(rng.next_int(0, 9));
    int min = static_cast<int>(rng.next_int(0, 30));
    int patch = static_cast<int>(rng.next_int(0, 9));
    std::string base = std::to_string(maj) + "." + std::to_string(min) + "." + std::to_string(patch);
    switch (os) {
        case PackageType::Debian: return base + "-" + std::to_string(rng.next_int(1, 9)) + "ubuntu" +
                                         std::to_string(rng.next_int(1, 9));
        case PackageType::Redhat: return base + "-" + std::to_string(rng.next_int(1, 40)) + ".el8_" +
                                         std::to_string(rng.next_int(0, 9));
        case PackageType::Alpine: return base + "-r" + std::to_string(rng.next_int(0, 20));
        case PackageType::Unknown: return base;
    }
    return base;
}

std::int64_t round_count(double fraction, std::int64_t total) {
    return std::llround(fraction * static_cast<double>(total));
}

void check_fraction(double f, const char* what) {
    if (f < 0.0 || f > 1.0) {
        throw InvalidArgument(std::string("infeasible config: ") + what + " outside [0,1]");
    }
}

double mix_value(const std::map<InconsistencyKind, double>& mix, InconsistencyKind k) {
    auto it = mix.find(k);
    return it == mix.end() ? 0.0 : it->second;
}

} // namespace

std::string_view kind_name(InconsistencyKind k) {
    switch (k) {
        case InconsistencyKind::NameMismatch: return "name_mismatch";
        case InconsistencyKind::VersionMismatch: return "version_mismatch";
        case InconsistencyKind::AssignerDivergence: return "assigner_divergence";
        case InconsistencyKind::StaleModificationTime: return "stale_modification_time";
        case InconsistencyKind::IntraToolDuplicate: return "intra_tool_duplicate";
    }
    return "name_mismatch";
}

std::optional<InconsistencyKind> kind_from_name(std::string_view name) {
    std::string t = fold_token(name);
    if (t == "namemismatch") return InconsistencyKind::NameMismatch;
    if (t == "versionmismatch") return InconsistencyKind::VersionMismatch;
    if (t == "assignerdivergence") return InconsistencyKind::AssignerDivergence;
    if (t == "stalemodificationtime") return InconsistencyKind::StaleModificationTime;
    if (t == "intratoolduplicate") return InconsistencyKind::IntraToolDuplicate;
    return std::nullopt;
}

Level kind_level(InconsistencyKind k) {
    switch (k) {
        case InconsistencyKind::NameMismatch: return Level::L2;
        case InconsistencyKind::VersionMismatch: return Level::L3;
        case InconsistencyKind::AssignerDivergence: return Level::L4;
        case InconsistencyKind::StaleModificationTime: return Level::L5;
        case InconsistencyKind::IntraToolDuplicate: return Level::L6;
    }
    return Level::L2;
}

SyntheticCorpus generate_corpus(const CorpusConfig& config) {
    if (config.image_count < 0 || config.cves_per_image < 0) {
        throw InvalidArgument("infeasible config: negative image or CVE counts");
    }
    if (config.hard_fp_count < 0 || config.soft_fp_count < 0 || config.unapproved_dupe_count < 0 ||
        config.advisory_count < 0) {
        throw InvalidArgument("infeasible config: negative injection counts");
    }
    check_fraction(config.inconsistent_fraction, "inconsistent_fraction");
    for (const auto& [k, f] : config.inconsistency_mix) check_fraction(f, "inconsistency_mix");
    for (const auto& [k, f] : config.solvable_mix) check_fraction(f, "solvable_mix");

    const std::int64_t total =
        config.total_cves.value_or(static_cast<std::int64_t>(config.image_count) * config.cves_per_image);
    if (total > 0 && config.image_count == 0) {
        throw InvalidArgument("infeasible config: CVEs requested but image_count is 0");
    }
    const std::int64_t l1 = round_count(config.inconsistent_fraction, total);
    if (l1 > total) throw InvalidArgument("infeasible config: more inconsistent CVEs than CVEs");
    if (total == 0 && (config.inconsistent_fraction > 0.0 || config.hard_fp_count > 0 ||
                       config.soft_fp_count > 0 || config.unapproved_dupe_count > 0)) {
        throw InvalidArgument("infeasible config: injections requested with zero CVEs");
    }

    std::set<std::string> distinct_tools(config.tool_names.begin(), config.tool_names.end());
    if (distinct_tools.size() != config.tool_names.size()) {
        throw InvalidArgument("infeasible config: tool_names must be distinct");
    }
    std::vector<std::string> dated_tools;
    for (const auto& t : config.tool_names) {
        if (fold_token(t) != "clair") dated_tools.push_back(t);
    }
    if (total > 0 && dated_tools.empty()) {
        throw InvalidArgument("infeasible config: at least one tool must carry assigner and "
                              "modification_time fields");
    }
    if (l1 > 0 && dated_tools.size() < 2) {
        throw InvalidArgument("infeasible config: inconsistencies need two tools that carry "
                              "assigner and modification_time fields");
    }

    using K = InconsistencyKind;
    const std::int64_t n2 = round_count(mix_value(config.inconsistency_mix, K::NameMismatch), l1);
    const std::int64_t n3 = round_count(mix_value(config.inconsistency_mix, K::VersionMismatch), l1);
    const std::int64_t n4 = round_count(mix_value(config.inconsistency_mix, K::AssignerDivergence), l1);
    const std::int64_t n5 = round_count(mix_value(config.inconsistency_mix, K::StaleModificationTime), l1);
    const std::int64_t n6 = round_count(mix_value(config.inconsistency_mix, K::IntraToolDuplicate), l1);

    const std::int64_t g2 = round_count(mix_value(config.solvable_mix, K::NameMismatch), l1);
    const std::int64_t g3 = round_count(mix_value(config.solvable_mix, K::VersionMismatch), l1);
    const std::int64_t g4 = round_count(mix_value(config.solvable_mix, K::AssignerDivergence), l1);
    const std::int64_t g5 = round_count(mix_value(config.solvable_mix, K::StaleModificationTime), l1);
    const std::int64_t g6 = round_count(mix_value(config.solvable_mix, K::IntraToolDuplicate), l1);

    // Bottom-up arithmetic. Every intra-tool CVE resolves at L6 and every
    // surviving stale/name/version CVE resolves at its own level, so the target
    // counts constrain how kinds must overlap.
    if (g6 != n6) {
        throw InvalidArgument("infeasible mix: every intra_tool_duplicate CVE resolves at L6, so "
                              "solvable_mix and inconsistency_mix must agree there");
    }
    const std::int64_t fill5 = n5 - g5;
    if (fill5 < 0 || fill5 > g6) {
        throw InvalidArgument("infeasible mix: stale_modification_time overlap does not fit L6");
    }
    const std::int64_t sum_g = g2 + g3 + g4 + g5 + g6;
    if (sum_g > l1) throw InvalidArgument("infeasible mix: solvable counts exceed inconsistent CVEs");
    const std::int64_t residual = l1 - sum_g;
    const std::int64_t fill4 = n4 - g4 - residual;
    if (fill4 < 0 || fill4 > g5 + g6 + g3 + g2) {
        throw InvalidArgument("infeasible mix: assigner_divergence count cannot be realized "
                              "(residual CVEs all need a non-credible divergence)");
    }
    const std::int64_t fill3 = n3 - g3;
    if (fill3 < 0 || fill3 > g5 + g6 + g4) {
        throw InvalidArgument("infeasible mix: version_mismatch overlap does not fit below L3");
    }
    const std::int64_t fill2 = n2 - g2;
    if (fill2 < 0 || fill2 > g5 + g6 + g4 + g3) {
        throw InvalidArgument("infeasible mix: name_mismatch overlap does not fit below L2");
    }

    const std::int64_t fp_hosts =
        config.hard_fp_count + config.soft_fp_count + config.unapproved_dupe_count;
    if (fp_hosts > total - l1) {
        throw InvalidArgument("infeasible config: not enough consistent CVEs to host the "
                              "requested false positives");
    }

    // Slot plans. Inconsistent slots are 0..l1-1; destinies are assigned in
    // blocks (L6, L5, L4, L3, L2, residual) and overlap fills walk the blocks
    // in a fixed priority order, so the whole layout is a pure function of the
    // config.
    std::vector<SlotPlan> plans(static_cast<std::size_t>(total));
    const std::int64_t base6 = 0, base5 = g6, base4 = g6 + g5, base3 = base4 + g4, base2 = base3 + g3,
                       baseR = base2 + g2;
    for (std::int64_t i = 0; i < l1; ++i) {
        auto& p = plans[static_cast<std::size_t>(i)];
        p.inconsistent = true;
        if (i < base5) p.destiny = Destiny::L6;
        else if (i < base4) p.destiny = Destiny::L5;
        else if (i < base3) p.destiny = Destiny::L4;
        else if (i < base2) p.destiny = Destiny::L3;
        else if (i < baseR) p.destiny = Destiny::L2;
        else p.destiny = Destiny::Residual;
    }
    for (std::int64_t i = 0; i < fill5; ++i) plans[static_cast<std::size_t>(base6 + i)].add_k5 = true;

    auto fill_blocks = [&](std::int64_t need, std::initializer_list<std::pair<std::int64_t, std::int64_t>> blocks,
                           bool SlotPlan::*flag) {
        for (const auto& [start, count] : blocks) {
            for (std::int64_t i = 0; need > 0 && i < count; ++i, --need) {
                plans[static_cast<std::size_t>(start + i)].*flag = true;
            }
        }
    };
    fill_blocks(fill4, {{base5, g5}, {base6, g6}, {base3, g3}, {base2, g2}}, &SlotPlan::add_k4);
    fill_blocks(fill3, {{base5, g5}, {base6, g6}, {base4, g4}}, &SlotPlan::add_k3);
    fill_blocks(fill2, {{base5, g5}, {base6, g6}, {base4, g4}, {base3, g3}}, &SlotPlan::add_k2);

    // Images.
    std::vector<ImageCtx> images(static_cast<std::size_t>(config.image_count));
    constexpr PackageType kOsCycle[] = {PackageType::Debian, PackageType::Alpine, PackageType::Redhat};
    for (std::size_t i = 0; i < images.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "img-%03zu", i);
        images[i].name = buf;
        images[i].os = kOsCycle[i % 3];
    }

    SyntheticCorpus corpus;
    const Instant lattice_base = parse_timestamp("2023-01-01T00:00:00Z");
    auto lattice = [&](std::int64_t hours) { return Instant{lattice_base.micros + hours * 3600000000LL}; };

    auto add_record = [&](ImageCtx& img, std::string pkg, std::string ver, SeverityLabel sev,
                          const std::string& tool, std::optional<std::string> assigner,
                          std::optional<Instant> mtime, std::int64_t slot, bool inventoried = true) {
        VulnRecord r;
        r.image_name = img.name;
        r.tool_name = tool;
        r.cve_identifier = cve_id(slot);
        r.package_name = std::move(pkg);
        r.package_version = std::move(ver);
        r.severity = sev;
        r.package_type = img.os;
        if (fold_token(tool) != "clair") {
            r.assigner = std::move(assigner);
            r.modification_time = mtime;
        }
        if (inventoried) img.packages.insert({r.package_name, r.package_version});
        corpus.scan.push_back(std::move(r));
    };

    for (std::int64_t slot = 0; slot < total; ++slot) {
        const auto& plan = plans[static_cast<std::size_t>(slot)];
        Rng rng(child_seed(config.seed, 0xC0FFEE00ULL + static_cast<std::uint64_t>(slot)));
        ImageCtx& img = images[static_cast<std::size_t>(slot % config.image_count)];

        const Severity truth = static_cast<Severity>(rng.next_int(1, 4)); // Low..Critical
        const Severity wrong = static_cast<Severity>(static_cast<int>(truth) - 1);
        std::string pkgA(kPackagePool[rng.next_below(std::size(kPackagePool))]);
        std::string verA = make_version(rng, img.os);
        const Instant t_now = lattice(slot % 2000);
        const Instant t_old = lattice(slot % 2000 - 1 - rng.next_int(0, 719));

        LedgerCve entry;
        entry.cve = cve_id(slot);
        entry.truth = truth;

        if (!plan.inconsistent) {
            // Two tools agreeing; the second may be a clair-style source.
            std::string cred(kCredible[rng.next_below(3)]);
            std::size_t t1 = rng.next_below(dated_tools.size());
            std::string tool1 = dated_tools[t1];
            std::string tool2;
            for (const auto& t : config.tool_names) {
                if (t != tool1) tool2 = t;
            }
            add_record(img, pkgA, verA, truth, tool1, cred, t_now, slot);
            if (!tool2.empty()) add_record(img, pkgA, verA, truth, tool2, cred, t_now, slot);
            corpus.ledger.cves.push_back(std::move(entry));
            continue;
        }

        const std::string tool1 = dated_tools[rng.next_below(dated_tools.size())];
        std::string tool2 = dated_tools[0] == tool1 ? dated_tools[1] : dated_tools[0];
        const std::string credA(kCredible[rng.next_below(3)]);
        const std::string nc1(kNonCredible[rng.next_below(std::size(kNonCredible))]);
        std::string nc2(kNonCredible[rng.next_below(std::size(kNonCredible))]);
        while (nc2 == nc1) nc2 = kNonCredible[rng.next_below(std::size(kNonCredible))];

        switch (plan.destiny) {
            case Destiny::L6: {
                // Duplicate entry in one tool: same assigner, time, and tool;
                // two of three records carry the truth so Voting recovers it.
                ImageCtx& img2 = images[static_cast<std::size_t>((slot + 1) % config.image_count)];
                add_record(img, pkgA, verA, truth, tool1, credA, t_now, slot);
                add_record(img2, pkgA, verA, truth, tool1, credA, t_now, slot);
                add_record(img, pkgA, verA, wrong, tool1, credA, t_now, slot);
                entry.kinds.insert(K::IntraToolDuplicate);
                entry.expected_resolution = Level::L6;
                if (plan.add_k5) {
                    add_record(img, pkgA, verA, wrong, tool1, credA, t_old, slot);
                    entry.kinds.insert(K::StaleModificationTime);
                }
                break;
            }
            case Destiny::L5: {
                // Stale duplicate: the newest record holds the truth, so Recent
                // settles it before Voting is needed.
                add_record(img, pkgA, verA, truth, tool1, credA, t_now, slot);
                add_record(img, pkgA, verA, wrong, tool1, credA, t_old, slot);
                entry.kinds.insert(K::StaleModificationTime);
                entry.expected_resolution = Level::L5;
                break;
            }
            case Destiny::L4: {
                // Credible divergence: the OS-matched source carries the truth.
                std::string source(assigner_name(source_for_os(img.os)));
                std::string other;
                for (auto c : kCredible) {
                    if (std::string(c) != source) other = c;
                }
                add_record(img, pkgA, verA, truth, tool1, source, t_now, slot);
                add_record(img, pkgA, verA, wrong, tool2, other, t_now, slot);
                entry.kinds.insert(K::AssignerDivergence);
                entry.expected_resolution = Level::L4;
                break;
            }
            case Destiny::L3: {
                // Version mismatch across tools; non-credible assigners keep L4
                // from stealing the resolution.
                std::string verY = verA + "+alt" + std::to_string(rng.next_int(1, 9));
                add_record(img, pkgA, verA, truth, tool1, nc1, t_now, slot);
                add_record(img, pkgA, verY, wrong, tool2, nc1, t_now, slot);
                entry.kinds.insert(K::VersionMismatch);
                entry.expected_resolution = Level::L3;
                break;
            }
            case Destiny::L2: {
                std::string pkgB(kPackagePool[rng.next_below(std::size(kPackagePool))]);
                while (pkgB == pkgA) pkgB = kPackagePool[rng.next_below(std::size(kPackagePool))];
                std::string verB = make_version(rng, img.os);
                add_record(img, pkgA, verA, truth, tool1, nc1, t_now, slot);
                add_record(img, pkgB, verB, wrong, tool2, nc1, t_now, slot);
                entry.kinds.insert(K::NameMismatch);
                entry.expected_resolution = Level::L2;
                break;
            }
            case Destiny::Residual: {
                // Divergence between two disreputable sources; never resolved.
                add_record(img, pkgA, verA, truth, tool1, nc1, t_now, slot);
                add_record(img, pkgA, verA, wrong, tool2, nc2, t_now, slot);
                entry.kinds.insert(K::AssignerDivergence);
                break;
            }
        }

        // Overlap fills. Wrong-severity extras never outvote the truth: L6/L5
        // groups settle by Recent/majority first and the other levels pair the
        // extra only with the truth record. On L3/L2 slots the base assigner is
        // already nc1, so the divergence record needs a second source.
        if (plan.add_k4 && plan.destiny != Destiny::L4 && plan.destiny != Destiny::Residual) {
            bool base_noncredible = plan.destiny == Destiny::L3 || plan.destiny == Destiny::L2;
            add_record(img, pkgA, verA, wrong, tool1, base_noncredible ? nc2 : nc1, t_now, slot);
            entry.kinds.insert(K::AssignerDivergence);
        }
        if (plan.add_k3) {
            std::string verY = verA + "+alt" + std::to_string(rng.next_int(1, 9));
            std::string assigner = plan.destiny == Destiny::L4 ? nc1 : credA;
            add_record(img, pkgA, verY, wrong, tool2, assigner, t_now, slot);
            entry.kinds.insert(K::VersionMismatch);
        }
        if (plan.add_k2) {
            std::string pkgB(kPackagePool[rng.next_below(std::size(kPackagePool))]);
            while (pkgB == pkgA) pkgB = kPackagePool[rng.next_below(std::size(kPackagePool))];
            std::string verB = make_version(rng, img.os);
            std::string assigner = (plan.destiny == Destiny::L4 || plan.destiny == Destiny::L3 ||
                                    plan.destiny == Destiny::L2)
                                       ? nc1
                                       : credA;
            add_record(img, pkgB, verB, wrong, tool2, assigner, t_now, slot);
            entry.kinds.insert(K::NameMismatch);
        }

        corpus.ledger.cves.push_back(std::move(entry));
    }

    // False positives ride on consistent CVEs so the inconsistency counts stay
    // untouched: every injected row repeats the host severity.
    std::int64_t host = l1;
    auto host_record = [&](std::int64_t slot) -> const LedgerCve& {
        return corpus.ledger.cves[static_cast<std::size_t>(slot)];
    };
    for (std::int64_t i = 0; i < config.hard_fp_count; ++i, ++host) {
        Rng rng(child_seed(config.seed, 0xFA11ULL + static_cast<std::uint64_t>(host)));
        ImageCtx& img = images[static_cast<std::size_t>(host % config.image_count)];
        const auto& led = host_record(host);
        std::string ghost = "ghost-" + std::string(kPackagePool[rng.next_below(std::size(kPackagePool))]) +
                            "-" + std::to_string(i);
        std::string ver = make_version(rng, img.os);
        std::string tool = dated_tools[rng.next_below(dated_tools.size())];
        add_record(img, ghost, ver, led.truth, tool, std::string(kCredible[rng.next_below(3)]),
                   lattice(host % 2000), host, /*inventoried=*/false);
        corpus.ledger.fps.push_back({FpEntryKind::Hard, led.cve, img.name, ghost, ver, tool});
    }
    for (std::int64_t i = 0; i < config.soft_fp_count; ++i, ++host) {
        Rng rng(child_seed(config.seed, 0x50F7ULL + static_cast<std::uint64_t>(host)));
        ImageCtx& img = images[static_cast<std::size_t>(host % config.image_count)];
        const auto& led = host_record(host);
        // Reuse the host's package at a version the inventory does not list.
        std::string pkg;
        std::string ver;
        for (const auto& r : corpus.scan) {
            if (r.cve_identifier == led.cve && r.image_name == img.name) {
                pkg = r.package_name;
                ver = r.package_version + ".fp" + std::to_string(rng.next_int(1, 99));
                break;
            }
        }
        std::string tool = dated_tools[rng.next_below(dated_tools.size())];
        add_record(img, pkg, ver, led.truth, tool, std::string(kCredible[rng.next_below(3)]),
                   lattice(host % 2000), host, /*inventoried=*/false);
        corpus.ledger.fps.push_back({FpEntryKind::Soft, led.cve, img.name, pkg, ver, tool});
    }
    for (std::int64_t i = 0; i < config.unapproved_dupe_count; ++i, ++host) {
        Rng rng(child_seed(config.seed, 0x0A99ULL + static_cast<std::uint64_t>(host)));
        ImageCtx& img = images[static_cast<std::size_t>(host % config.image_count)];
        const auto& led = host_record(host);
        std::string pkg, ver, tool;
        for (const auto& r : corpus.scan) {
            if (r.cve_identifier == led.cve && r.image_name == img.name && r.severity.rated()) {
                pkg = r.package_name;
                ver = r.package_version;
                tool = r.tool_name;
                break;
            }
        }
        add_record(img, pkg, ver, SeverityLabel::unapproved(), tool,
                   std::string(kCredible[rng.next_below(3)]), lattice(host % 2000), host);
        corpus.ledger.fps.push_back({FpEntryKind::UnapprovedDupe, led.cve, img.name, pkg, ver, tool});
    }

    // Inventories from everything the scan legitimately claims.
    for (auto& img : images) {
        PackageInventory inv;
        inv.image_name = img.name;
        inv.os_family = img.os;
        for (const auto& [name, ver] : img.packages) {
            inv.entries.push_back({name, ver, PackageOrigin::PackageManager});
        }
        corpus.inventories.push_back(std::move(inv));
    }

    // Advisories: vectors drawn uniformly from the base-vector grid, rejection
    // sampled until each severity class holds its share.
    if (config.advisory_count > 0) {
        double share_sum = 0.0;
        for (double s : config.class_shares) {
            check_fraction(s, "class_shares");
            share_sum += s;
        }
        if (std::fabs(share_sum - 1.0) > 1e-9) {
            throw InvalidArgument("infeasible config: class_shares must sum to 1");
        }
        auto grid = enumerate_base_vectors();
        std::vector<double> shares(config.class_shares.begin(), config.class_shares.end());
        auto needed = apportion(shares, config.advisory_count);
        Rng rng(child_seed(config.seed, 0xAD7150ULL));
        std::vector<CvssVector> chosen;
        chosen.reserve(static_cast<std::size_t>(config.advisory_count));
        std::int64_t remaining = config.advisory_count;
        while (remaining > 0) {
            const CvssVector& v = grid[rng.next_below(grid.size())];
            auto cls = static_cast<std::size_t>(severity_band(base_score(v).base_score));
            if (needed[cls] > 0) {
                needed[cls] -= 1;
                remaining -= 1;
                chosen.push_back(v);
            }
        }
        for (std::int64_t i = 0; i < config.advisory_count; ++i) {
            const CvssVector& v = chosen[static_cast<std::size_t>(i)];
            AdvisoryRecord a;
            a.cve_identifier = cve_id(total > 0 ? i % total : i);
            a.cve_assigner = static_cast<AssignerId>(i % 3);
            a.cvss = v;
            Severity band = severity_band(base_score(v).base_score);
            if (a.cve_assigner == AssignerId::Redhat && band == Severity::Medium) {
                a.raw_severity_label = "Moderate";
            } else if (a.cve_assigner == AssignerId::Redhat && band == Severity::High) {
                a.raw_severity_label = "Important";
            } else {
                a.raw_severity_label = severity_name(band);
            }
            a.severity = band;
            a.modification_time = lattice(i % 4000);
            corpus.advisories.push_back(std::move(a));
        }
    }

    corpus.fingerprint = build_store(corpus).fingerprint();
    return corpus;
}

Store build_store(const SyntheticCorpus& corpus) {
    Store store;
    store.add_scan_records(corpus.scan);
    store.add_advisories(corpus.advisories);
    store.add_inventories(corpus.inventories);
    store.seal();
    return store;
}

namespace {

std::string_view fp_kind_name(FpEntryKind k) {
    switch (k) {
        case FpEntryKind::Hard: return "hard_fp";
        case FpEntryKind::Soft: return "soft_fp";
        case FpEntryKind::UnapprovedDupe: return "unapproved_dupe";
    }
    return "hard_fp";
}

} // namespace

std::string render_ledger_csv(const Ledger& ledger) {
    std::string out =
        "entry_type,cve,truth_severity,kinds,resolve_level,image,package_name,package_version,tool\n";
    for (const auto& c : ledger.cves) {
        std::string kinds;
        for (auto k : c.kinds) {
            if (!kinds.empty()) kinds += ';';
            kinds += kind_name(k);
        }
        out += csv::render_row({"cve", c.cve, std::string(severity_name(c.truth)), kinds,
                                c.expected_resolution ? std::string(level_name(*c.expected_resolution))
                                                      : std::string(),
                                "", "", "", ""});
    }
    for (const auto& f : ledger.fps) {
        out += csv::render_row({std::string(fp_kind_name(f.kind)), f.cve, "", "", "", f.image,
                                f.package_name, f.package_version, f.tool});
    }
    return out;
}

Ledger parse_ledger_csv(std::string_view text) {
    Ledger ledger;
    auto rows = csv::parse(text);
    if (rows.empty()) throw ParseError("ledger.csv has no header");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 9) throw ParseError("ledger.csv row " + std::to_string(i) + " malformed");
        if (f[0] == "cve") {
            LedgerCve c;
            c.cve = f[1];
            auto s = severity_from_name(f[2]);
            if (!s) throw ParseError("ledger.csv: bad severity " + f[2]);
            c.truth = *s;
            if (!f[3].empty()) {
                for (auto part : split(f[3], ';')) {
                    auto k = kind_from_name(part);
                    if (k) c.kinds.insert(*k);
                }
            }
            if (!f[4].empty()) {
                for (Level lv : {Level::L2, Level::L3, Level::L4, Level::L5, Level::L6}) {
                    if (level_name(lv) == f[4]) c.expected_resolution = lv;
                }
            }
            ledger.cves.push_back(std::move(c));
        } else {
            LedgerFp fp;
            if (f[0] == "hard_fp") fp.kind = FpEntryKind::Hard;
            else if (f[0] == "soft_fp") fp.kind = FpEntryKind::Soft;
            else if (f[0] == "unapproved_dupe") fp.kind = FpEntryKind::UnapprovedDupe;
            else throw ParseError("ledger.csv: unknown entry_type " + f[0]);
            fp.cve = f[1];
            fp.image = f[5];
            fp.package_name = f[6];
            fp.package_version = f[7];
            fp.tool = f[8];
            ledger.fps.push_back(std::move(fp));
        }
    }
    return ledger;
}

void write_corpus(const SyntheticCorpus& corpus, const std::string& dir) {
    namespace fs = std::filesystem;
    Store store = build_store(corpus);
    save_store_csv(store, dir);
    std::ofstream out(fs::path(dir) / "ledger.csv", std::ios::binary);
    if (!out) throw IoError("cannot write ledger.csv under " + dir);
    out << render_ledger_csv(corpus.ledger);
}

HarnessScore evaluate_pipeline(const SyntheticCorpus& corpus, const Store& store,
                               const LevelBreakdown& breakdown, const ResolutionOutcome& outcome) {
    if (breakdown.store_fingerprint != corpus.fingerprint ||
        outcome.store_fingerprint != corpus.fingerprint) {
        throw InvalidArgument("evaluate_pipeline: breakdown/outcome come from a different store");
    }

    HarnessScore score;

    std::map<std::string, const LedgerCve*> by_cve;
    std::int64_t inconsistent_count = 0;
    for (const auto& c : corpus.ledger.cves) {
        by_cve[c.cve] = &c;
        if (!c.kinds.empty()) ++inconsistent_count;
    }

    for (InconsistencyKind k :
         {InconsistencyKind::NameMismatch, InconsistencyKind::VersionMismatch,
          InconsistencyKind::AssignerDivergence, InconsistencyKind::StaleModificationTime,
          InconsistencyKind::IntraToolDuplicate}) {
        std::set<std::string> injected;
        for (const auto& c : corpus.ledger.cves) {
            if (c.kinds.count(k)) injected.insert(c.cve);
        }
        auto it = breakdown.level_cves.find(kind_level(k));
        const std::set<std::string> empty;
        const auto& detected = it == breakdown.level_cves.end() ? empty : it->second;
        std::size_t hit = 0;
        for (const auto& cve : injected) hit += detected.count(cve);
        KindScore ks;
        if (!injected.empty()) ks.recall = static_cast<double>(hit) / static_cast<double>(injected.size());
        if (!detected.empty()) ks.precision = static_cast<double>(hit) / static_cast<double>(detected.size());
        score.detection[k] = ks;
    }

    std::map<Level, std::pair<std::size_t, std::size_t>> level_acc; // correct/total
    std::size_t correct_total = 0;
    for (const auto& [cve, res] : outcome.resolved) {
        auto it = by_cve.find(cve);
        if (it == by_cve.end()) continue;
        bool correct = it->second->truth == res.severity;
        auto& acc = level_acc[res.level];
        acc.second += 1;
        acc.first += correct;
        correct_total += correct;
    }
    for (const auto& [level, acc] : level_acc) {
        score.resolution_accuracy[level] =
            static_cast<double>(acc.first) / static_cast<double>(acc.second);
    }
    if (!outcome.resolved.empty()) {
        score.resolution_accuracy_overall =
            static_cast<double>(correct_total) / static_cast<double>(outcome.resolved.size());
    }
    score.resolved_fraction =
        inconsistent_count == 0
            ? 0.0
            : static_cast<double>(outcome.resolved.size()) / static_cast<double>(inconsistent_count);

    // False-positive scoring keys records by visible content.
    auto fp_key = [](std::string_view cve, std::string_view image, std::string_view pkg,
                     std::string_view ver, std::string_view tool) {
        std::string k;
        for (auto part : {cve, image, pkg, ver, tool}) {
            k += part;
            k += '\x1f';
        }
        return k;
    };
    std::set<std::string> hard_keys, soft_keys, removable_keys;
    for (const auto& f : corpus.ledger.fps) {
        std::string k = fp_key(f.cve, f.image, f.package_name, f.package_version, f.tool);
        if (f.kind == FpEntryKind::Hard) {
            hard_keys.insert(k);
            removable_keys.insert(k);
        } else if (f.kind == FpEntryKind::Soft) {
            soft_keys.insert(k);
        } else {
            removable_keys.insert(k);
        }
    }

    std::size_t removed_hard = 0, removed_expected = 0;
    for (const auto& ref : outcome.removed_false_positives) {
        if (ref.table != TableId::ScanResults) continue;
        const auto& r = store.scan_at(ref.index);
        std::string k = fp_key(r.cve_identifier, r.image_name, r.package_name, r.package_version,
                               r.tool_name);
        removed_hard += hard_keys.count(k);
        removed_expected += removable_keys.count(k);
    }
    if (!hard_keys.empty()) {
        score.fp_hard_recall =
            static_cast<double>(removed_hard) / static_cast<double>(hard_keys.size());
    }
    if (!outcome.removed_false_positives.empty()) {
        score.fp_removal_precision = static_cast<double>(removed_expected) /
                                     static_cast<double>(outcome.removed_false_positives.size());
    }

    auto soft_flagged = soft_false_positives(store);
    std::size_t soft_hit = 0;
    for (const auto& ref : soft_flagged) {
        const auto& r = store.scan_at(ref.index);
        soft_hit += soft_keys.count(
            fp_key(r.cve_identifier, r.image_name, r.package_name, r.package_version, r.tool_name));
    }
    if (!soft_keys.empty()) {
        score.fp_soft_recall = static_cast<double>(soft_hit) / static_cast<double>(soft_keys.size());
    }
    if (!soft_flagged.empty()) {
        score.fp_soft_precision =
            static_cast<double>(soft_hit) / static_cast<double>(soft_flagged.size());
    }
    return score;
}

namespace {

std::map<InconsistencyKind, double> mix_from_json(const ordered_json& obj) {
    std::map<InconsistencyKind, double> mix;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        auto k = kind_from_name(it.key());
        if (!k) throw ParseError("unknown inconsistency kind \"" + it.key() + "\"");
        mix[*k] = it.value().get<double>();
    }
    return mix;
}

ordered_json mix_to_json(const std::map<InconsistencyKind, double>& mix) {
    ordered_json obj;
    for (const auto& [k, f] : mix) obj[std::string(kind_name(k))] = f;
    return obj;
}

CorpusConfig corpus_config_from_json(const ordered_json& doc) {
    CorpusConfig cfg;
    if (doc.contains("image_count")) cfg.image_count = doc["image_count"].get<int>();
    if (doc.contains("cves_per_image")) cfg.cves_per_image = doc["cves_per_image"].get<int>();
    if (doc.contains("total_cves")) {
        if (doc["total_cves"].is_null()) cfg.total_cves.reset();
        else cfg.total_cves = doc["total_cves"].get<std::int64_t>();
    }
    if (doc.contains("inconsistent_fraction")) {
        cfg.inconsistent_fraction = doc["inconsistent_fraction"].get<double>();
    }
    if (doc.contains("inconsistency_mix")) cfg.inconsistency_mix = mix_from_json(doc["inconsistency_mix"]);
    if (doc.contains("solvable_mix")) cfg.solvable_mix = mix_from_json(doc["solvable_mix"]);
    if (doc.contains("hard_fp_count")) cfg.hard_fp_count = doc["hard_fp_count"].get<std::int64_t>();
    if (doc.contains("soft_fp_count")) cfg.soft_fp_count = doc["soft_fp_count"].get<std::int64_t>();
    if (doc.contains("unapproved_dupe_count")) {
        cfg.unapproved_dupe_count = doc["unapproved_dupe_count"].get<std::int64_t>();
    }
    if (doc.contains("advisory_count")) cfg.advisory_count = doc["advisory_count"].get<std::int64_t>();
    if (doc.contains("class_shares")) {
        auto arr = doc["class_shares"];
        if (!arr.is_array() || arr.size() != 5) throw ParseError("class_shares must have 5 entries");
        for (std::size_t i = 0; i < 5; ++i) cfg.class_shares[i] = arr[i].get<double>();
    }
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("tool_names")) {
        cfg.tool_names.clear();
        for (const auto& t : doc["tool_names"]) cfg.tool_names.push_back(t.get<std::string>());
    }
    return cfg;
}

} // namespace

CorpusConfig parse_corpus_config_json(std::string_view text) {
    try {
        ordered_json doc = ordered_json::parse(text);
        if (!doc.is_object()) throw ParseError("corpus config must be a JSON object");
        return corpus_config_from_json(doc);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad corpus config: ") + e.what());
    }
}

std::string render_corpus_config_json(const CorpusConfig& config) {
    ordered_json doc;
    doc["image_count"] = config.image_count;
    doc["cves_per_image"] = config.cves_per_image;
    if (config.total_cves) doc["total_cves"] = *config.total_cves;
    else doc["total_cves"] = nullptr;
    doc["inconsistent_fraction"] = config.inconsistent_fraction;
    doc["inconsistency_mix"] = mix_to_json(config.inconsistency_mix);
    doc["solvable_mix"] = mix_to_json(config.solvable_mix);
    doc["hard_fp_count"] = config.hard_fp_count;
    doc["soft_fp_count"] = config.soft_fp_count;
    doc["unapproved_dupe_count"] = config.unapproved_dupe_count;
    doc["advisory_count"] = config.advisory_count;
    doc["class_shares"] = config.class_shares;
    doc["seed"] = config.seed;
    doc["tool_names"] = config.tool_names;
    return doc.dump(2) + "\n";
}

} // namespace lucid

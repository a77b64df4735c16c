#include "cvss.hpp"

#include "csv.hpp"
#include "errors.hpp"

#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

using namespace lucid;

namespace {

std::string read_data_file(const std::string& name) {
    std::ifstream in(std::string(LUCID_TEST_DATA_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("parse_cvss_vector decodes the canonical example") {
    auto v = parse_cvss_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H");
    CHECK(v.attack_vector == AttackVector::Network);
    CHECK(v.attack_complexity == AttackComplexity::Low);
    CHECK(v.privileges_required == PrivilegesRequired::None);
    CHECK(v.user_interaction == UserInteraction::None);
    CHECK(v.scope == CvssScope::Unchanged);
    CHECK(v.confidentiality_impact == ImpactMetric::High);
    CHECK(v.integrity_impact == ImpactMetric::High);
    CHECK(v.availability_impact == ImpactMetric::High);
}

TEST_CASE("parse_cvss_vector is order-insensitive and accepts 3.0") {
    auto a = parse_cvss_vector("CVSS:3.1/AV:L/AC:H/PR:L/UI:R/S:C/C:L/I:N/A:H");
    auto b = parse_cvss_vector("CVSS:3.0/A:H/I:N/C:L/S:C/UI:R/PR:L/AC:H/AV:L");
    CHECK(a == b);
}

TEST_CASE("parse_cvss_vector rejects incomplete and bad input") {
    CHECK_THROWS_AS(parse_cvss_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N"), ParseError);
    CHECK_THROWS_AS(parse_cvss_vector("CVSS:2.0/AV:N"), ParseError);
    CHECK_THROWS_AS(parse_cvss_vector("CVSS:3.1/AV:X/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N"), ParseError);
    CHECK_THROWS_AS(
        parse_cvss_vector("CVSS:3.1/AV:N/AV:L/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N"), ParseError);
}

TEST_CASE("non-base segments are skipped with a warning") {
    std::vector<std::string> warnings;
    auto v = parse_cvss_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H/E:F/RL:O", &warnings);
    CHECK(base_score(v).base_score == doctest::Approx(9.8));
    CHECK(warnings.size() == 2);
}

TEST_CASE("base_score matches the published examples") {
    CHECK(base_score(parse_cvss_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H")).base_score ==
          doctest::Approx(9.8));
    CHECK(base_score(parse_cvss_vector("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:C/C:H/I:H/A:H")).base_score ==
          doctest::Approx(10.0));
    CHECK(base_score(parse_cvss_vector("CVSS:3.1/AV:P/AC:H/PR:H/UI:R/S:U/C:N/I:N/A:N")).base_score ==
          doctest::Approx(0.0));
}

TEST_CASE("roundup matches the published v3.1 worked examples") {
    CHECK(cvss_roundup(4.00) == doctest::Approx(4.0));
    CHECK(cvss_roundup(4.02) == doctest::Approx(4.1));
    CHECK(cvss_roundup(0.0) == doctest::Approx(0.0));
    CHECK(cvss_roundup(9.80001) == doctest::Approx(9.9));
}

TEST_CASE("severity_band maps the documented boundaries") {
    CHECK(severity_band(0.0) == Severity::None);
    CHECK(severity_band(0.1) == Severity::Low);
    CHECK(severity_band(3.9) == Severity::Low);
    CHECK(severity_band(4.0) == Severity::Medium);
    CHECK(severity_band(6.9) == Severity::Medium);
    CHECK(severity_band(7.0) == Severity::High);
    CHECK(severity_band(8.9) == Severity::High);
    CHECK(severity_band(9.0) == Severity::Critical);
    CHECK(severity_band(9.8) == Severity::Critical);
    CHECK(severity_band(10.0) == Severity::Critical);
    CHECK_THROWS_AS(severity_band(10.1), InvalidArgument);
    CHECK_THROWS_AS(severity_band(-0.1), InvalidArgument);
}

TEST_CASE("all 2592 vectors match the frozen reference table") {
    auto rows = csv::parse(read_data_file("cvss_v31_reference.csv"));
    REQUIRE(rows.size() == 2593); // header + 2592
    std::size_t checked = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& vector_text = rows[i][0];
        double expected = std::stod(rows[i][1]);
        auto scored = base_score(parse_cvss_vector(vector_text));
        CAPTURE(vector_text);
        REQUIRE(scored.base_score == doctest::Approx(expected).epsilon(1e-12));
        ++checked;
    }
    CHECK(checked == 2592);
}

TEST_CASE("render/parse round trip and banding are total over the grid") {
    auto grid = enumerate_base_vectors();
    REQUIRE(grid.size() == 2592);
    std::set<std::string> rendered;
    for (const auto& v : grid) {
        std::string text = render_cvss_vector(v);
        rendered.insert(text);
        CHECK(parse_cvss_vector(text) == v);
        auto scored = base_score(v);
        CHECK_NOTHROW(severity_band(scored.base_score));
        CHECK(scored.exploitability_score >= 0.0);
        CHECK(scored.exploitability_score <= 3.9);
        CHECK(scored.impact_score >= 0.0);
        CHECK(scored.impact_score <= 6.1);
    }
    CHECK(rendered.size() == 2592);
}

TEST_CASE("base_score reproduces widely published real-world scores") {
    // Vectors and scores as published on the NVD entries of well-known CVEs.
    struct Known {
        const char* vector;
        double score;
    };
    const Known known[] = {
        // log4shell CVE-2021-44228
        {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:C/C:H/I:H/A:H", 10.0},
        // heartbleed CVE-2014-0160
        {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:N/A:N", 7.5},
        // eternalblue CVE-2017-0144
        {"CVSS:3.1/AV:N/AC:H/PR:N/UI:N/S:U/C:H/I:H/A:H", 8.1},
        // shellshock CVE-2014-6271 (3.1 rescoring of the base metrics)
        {"CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", 9.8},
        // dirty cow CVE-2016-5195
        {"CVSS:3.1/AV:L/AC:L/PR:L/UI:N/S:U/C:H/I:H/A:H", 7.8},
    };
    for (const auto& k : known) {
        CAPTURE(k.vector);
        CHECK(base_score(parse_cvss_vector(k.vector)).base_score == doctest::Approx(k.score));
    }
}

TEST_CASE("base_score is monotone in every metric's severity ordering") {
    // Raising any single metric along its severity order (weaker attacker
    // requirements or stronger impact) never lowers the base score. Scope is
    // excluded: it swaps equations rather than scaling a weight.
    auto grid = enumerate_base_vectors();
    auto score_of = [](const CvssVector& v) { return base_score(v).base_score; };
    std::size_t comparisons = 0;
    for (const auto& v : grid) {
        CvssVector up = v;
        // AV: Physical < Local < Adjacent < Network (enum order is reversed)
        if (v.attack_vector != AttackVector::Network) {
            up.attack_vector = static_cast<AttackVector>(static_cast<int>(v.attack_vector) - 1);
            CHECK(score_of(up) >= score_of(v));
            ++comparisons;
        }
        up = v;
        if (v.attack_complexity == AttackComplexity::High) {
            up.attack_complexity = AttackComplexity::Low;
            CHECK(score_of(up) >= score_of(v));
            ++comparisons;
        }
        up = v;
        if (v.privileges_required != PrivilegesRequired::None) {
            up.privileges_required =
                static_cast<PrivilegesRequired>(static_cast<int>(v.privileges_required) - 1);
            CHECK(score_of(up) >= score_of(v));
            ++comparisons;
        }
        up = v;
        if (v.user_interaction == UserInteraction::Required) {
            up.user_interaction = UserInteraction::None;
            CHECK(score_of(up) >= score_of(v));
            ++comparisons;
        }
        for (auto member : {&CvssVector::confidentiality_impact, &CvssVector::integrity_impact,
                            &CvssVector::availability_impact}) {
            up = v;
            if (v.*member != ImpactMetric::High) {
                up.*member = static_cast<ImpactMetric>(static_cast<int>(v.*member) + 1);
                CHECK(score_of(up) >= score_of(v));
                ++comparisons;
            }
        }
    }
    CHECK(comparisons > 10000);
}

TEST_CASE("base_score is 0.0 exactly when impact is non-positive") {
    for (const auto& v : enumerate_base_vectors()) {
        auto scored = base_score(v);
        if (impact_subscore(v) <= 0.0) CHECK(scored.base_score == 0.0);
        else CHECK(scored.base_score > 0.0);
    }
}

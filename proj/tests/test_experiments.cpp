#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pplab/candidate.hpp"
#include "pplab/experiments.hpp"
#include "pplab/random_model.hpp"

using namespace pplab;

namespace {

std::string csv_of(const ExperimentResult& r) {
    std::ostringstream os;
    write_csv(r, os);
    return os.str();
}

std::string hex16(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bool looks_like_utc(const std::string& ts) {
    return ts.size() == 20 && ts[10] == 'T' && ts.back() == 'Z';
}

ExperimentConfig smoke_config(const std::string& name) {
    ExperimentConfig cfg;
    cfg.experiment = name;
    cfg.seed = 0;
    if (name == "vdelta") {
        cfg.samples = 20000;
        cfg.trials = 1;
        cfg.delta = 0.1;
    } else if (name == "staircase-2d-mean") {
        cfg.n = 256;
        cfg.trials = 3;
    } else if (name == "staircase-whp") {
        cfg.n = 256;
        cfg.trials = 2;
    } else if (name == "backward-quicksort") {
        cfg.n = 500;
        cfg.trials = 2;
    } else if (name == "backward-tail") {
        cfg.n = 200;
        cfg.trials = 3;
    } else if (name == "candidate-vs-oracle") {
        cfg.n = 4;
        cfg.queries = 10;
        cfg.trials = 1;
    } else if (name == "containment" || name == "proxy-size") {
        cfg.n = 64;
        cfg.queries = 5;
        cfg.trials = 1;
    } else if (name == "online-klevel") {
        cfg.n = 8;
        cfg.k = 1;
        cfg.trials = 2;
    } else if (name == "edges-per-line") {
        cfg.n = 6;
        cfg.k = 2;
        cfg.trials = 2;
    } else if (name == "moments") {
        cfg.n = 10;
        cfg.r = 5;
        cfg.k = 1;
        cfg.trials = 1;
    } else if (name == "overlay-trend") {
        cfg.n = 8;
        cfg.k = 1;
        cfg.trials = 1;
    }
    return cfg;
}

const std::map<std::string, std::vector<std::string>> kExpectedColumns = {
    {"vdelta",
     {"trial_id", "d", "delta", "samples", "closed_form", "estimate", "std_error", "within4"}},
    {"staircase-2d-mean", {"trial_id", "n", "size"}},
    {"staircase-whp", {"trial_id", "n", "d", "size", "bound", "ok"}},
    {"backward-quicksort",
     {"trial_id", "n", "total", "expected_total", "max_per_element", "per_element_bound", "ok"}},
    {"backward-tail", {"trial_id", "n", "k", "gamma", "sum", "threshold", "exceeded"}},
    {"candidate-vs-oracle", {"trial_id", "n", "queries", "located", "mismatches"}},
    {"containment", {"trial_id", "n", "k", "queries", "violations"}},
    {"proxy-size", {"trial_id", "n", "k", "queries", "max_size", "mean_size", "size_bound"}},
    {"online-klevel", {"trial_id", "n", "k", "vertices", "bound", "ok"}},
    {"edges-per-line", {"trial_id", "n", "k_max", "checks", "violations", "max_edges"}},
    {"moments",
     {"trial_id", "n_lo", "vertex_sum_lo", "edge_sum_lo", "n_hi", "vertex_sum_hi", "edge_sum_hi"}},
    {"overlay-trend", {"trial_id", "n_lo", "total_lo", "n_hi", "total_hi"}},
};

}  // namespace

TEST_CASE("registry lists the twelve experiments with their failure classes") {
    const std::vector<ExperimentInfo>& reg = registry_list();
    REQUIRE(reg.size() == 12);
    const std::set<std::string> hard_names = {"candidate-vs-oracle", "containment",
                                              "online-klevel", "edges-per-line"};
    std::set<std::string> names;
    for (const ExperimentInfo& info : reg) {
        names.insert(info.name);
        CHECK(!info.claim.empty());
        CHECK(info.hard == (hard_names.count(info.name) > 0));
    }
    CHECK(names == std::set<std::string>({"vdelta", "staircase-2d-mean", "staircase-whp",
                                          "backward-quicksort", "backward-tail",
                                          "candidate-vs-oracle", "containment", "proxy-size",
                                          "online-klevel", "edges-per-line", "moments",
                                          "overlay-trend"}));
}

TEST_CASE("every registered experiment runs a small smoke config") {
    for (const ExperimentInfo& info : registry_list()) {
        CAPTURE(info.name);
        const ExperimentConfig cfg = smoke_config(info.name);
        const RunOutput out = run_experiment(cfg);
        CHECK(out.result.experiment == info.name);
        CHECK(out.result.hard == info.hard);
        REQUIRE(kExpectedColumns.count(info.name) == 1);
        CHECK(out.result.columns == kExpectedColumns.at(info.name));
        CHECK(out.result.rows.size() == static_cast<size_t>(cfg.trials));
        for (size_t t = 0; t < out.result.rows.size(); ++t) {
            REQUIRE(out.result.rows[t].size() == out.result.columns.size());
            CHECK(out.result.rows[t][0] == static_cast<double>(t));  // trial_id first
        }
        // Hard experiments must clear their deterministic bounds even on
        // small instances.
        if (info.hard) CHECK(out.result.hard_pass);

        CHECK(out.manifest.experiment == info.name);
        CHECK(out.manifest.base_seed == cfg.seed);
        CHECK(out.manifest.version == version_string());
        CHECK(out.manifest.row_count == static_cast<long long>(out.result.rows.size()));
        CHECK(looks_like_utc(out.manifest.started_utc));
        CHECK(looks_like_utc(out.manifest.finished_utc));
        CHECK(out.manifest.config_digest.size() == 16);
        for (const char c : out.manifest.config_digest)
            CHECK(std::isxdigit(static_cast<unsigned char>(c)));
    }
}

TEST_CASE("same config and seed give byte-identical CSV output") {
    ExperimentConfig cfg;
    cfg.experiment = "staircase-2d-mean";
    cfg.n = 64;
    cfg.trials = 5;
    cfg.seed = 7;
    const std::string a = csv_of(run_experiment(cfg).result);
    const std::string b = csv_of(run_experiment(cfg).result);
    CHECK(a == b);
    CHECK(a.substr(0, a.find('\n')) == "trial_id,n,size");
    CHECK(std::count(a.begin(), a.end(), '\n') == 6);  // header + 5 rows
}

TEST_CASE("worker count does not change the rows") {
    ExperimentConfig cfg;
    cfg.experiment = "containment";
    cfg.n = 64;
    cfg.queries = 5;
    cfg.trials = 8;
    cfg.seed = 11;
    cfg.threads = 1;
    const std::string serial = csv_of(run_experiment(cfg).result);
    cfg.threads = 4;
    const std::string parallel = csv_of(run_experiment(cfg).result);
    CHECK(serial == parallel);
}

TEST_CASE("trials = 0 yields an empty result with a consistent manifest") {
    ExperimentConfig cfg;
    cfg.experiment = "staircase-2d-mean";
    cfg.n = 32;
    cfg.trials = 0;
    const RunOutput out = run_experiment(cfg);
    CHECK(out.result.rows.empty());
    CHECK(out.manifest.row_count == 0);
    REQUIRE(!out.result.notes.empty());
    CHECK(out.result.notes.back().find("no trials") != std::string::npos);
    // CSV degenerates to just the header.
    CHECK(csv_of(out.result) == "trial_id,n,size\n");
}

TEST_CASE("vdelta rows carry the closed form and a self-consistent 4-sigma flag") {
    ExperimentConfig cfg;
    cfg.experiment = "vdelta";
    cfg.d = 2;
    cfg.delta = 0.1;
    cfg.samples = 20000;
    cfg.trials = 1;
    cfg.seed = 0;
    const RunOutput out = run_experiment(cfg);
    REQUIRE(out.result.rows.size() == 1);
    const std::vector<double>& row = out.result.rows[0];
    const double closed_form = row[4], estimate = row[5], std_error = row[6], within4 = row[7];
    CHECK(closed_form == doctest::Approx(0.1 + 0.1 * std::log(10.0)).epsilon(1e-12));
    CHECK(row[1] == 2.0);
    CHECK(row[2] == doctest::Approx(0.1));
    CHECK(row[3] == 20000.0);
    CHECK(within4 == ((std::abs(closed_form - estimate) <= 4.0 * std_error) ? 1.0 : 0.0));
    CHECK(within4 == 1.0);
}

TEST_CASE("canonical_json and the manifest digest ignore input key order") {
    const std::string text_a =
        R"({"experiment":"vdelta","samples":2000,"delta":0.25,"seed":9,"trials":1})";
    const std::string text_b =
        R"({"seed":9,"trials":1,"delta":0.25,"experiment":"vdelta","samples":2000})";
    ExperimentConfig a = ExperimentConfig::from_json_text(text_a);
    ExperimentConfig b = ExperimentConfig::from_json_text(text_b);
    CHECK(a.canonical_json() == b.canonical_json());
    const RunOutput ra = run_experiment(a);
    const RunOutput rb = run_experiment(b);
    CHECK(ra.manifest.config_digest == rb.manifest.config_digest);

    // The digest is FNV-1a of the canonical JSON of the effective config.
    a.apply_defaults();
    CHECK(ra.manifest.config_digest == hex16(fnv1a64(a.canonical_json())));
}

TEST_CASE("from_json_text accepts the documented distribution forms") {
    const std::string shared_uniform =
        R"({"experiment":"staircase-whp","n":64,"trials":1,"dist":{"kind":"uniform"}})";
    const RunOutput a = run_experiment(ExperimentConfig::from_json_text(shared_uniform));
    CHECK(a.result.rows.size() == 1);

    const std::string shared_pwl =
        R"({"experiment":"staircase-whp","n":64,"trials":1,
            "dist":{"kind":"pwl","points":[[0.0,0.0],[1.0,1.0]]}})";
    const RunOutput b = run_experiment(ExperimentConfig::from_json_text(shared_pwl));
    CHECK(b.result.rows.size() == 1);

    const std::string per_coord =
        R"({"experiment":"staircase-whp","n":64,"trials":1,
            "dist":{"coords":[{"kind":"uniform"},
                               {"kind":"pwl","points":[[0.0,0.0],[1.0,1.0]]}]}})";
    const RunOutput c = run_experiment(ExperimentConfig::from_json_text(per_coord));
    CHECK(c.result.rows.size() == 1);
}

TEST_CASE("invalid configurations raise ConfigError") {
    // Unknown experiment name.
    ExperimentConfig bad = smoke_config("staircase-whp");
    bad.experiment = "staircase-3d-mean";
    CHECK_THROWS_AS(run_experiment(bad), ConfigError);

    // Unknown JSON key and malformed JSON.
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(
                        R"({"experiment":"vdelta","frobnicate":1})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("not json at all"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("[1,2,3]"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"experiment":"vdelta","n":"big"})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(
                        R"({"experiment":"vdelta","dist":{"kind":"gaussian"}})"),
                    ConfigError);

    // Range violations caught by validate().
    ExperimentConfig c1 = smoke_config("staircase-whp");
    c1.n = -5;
    CHECK_THROWS_AS(run_experiment(c1), ConfigError);

    ExperimentConfig c2 = smoke_config("staircase-whp");
    c2.threads = 0;
    CHECK_THROWS_AS(run_experiment(c2), ConfigError);

    ExperimentConfig c3 = smoke_config("backward-tail");
    c3.gamma = 1.0;  // below the 2e floor the tail claim needs
    CHECK_THROWS_AS(run_experiment(c3), ConfigError);

    ExperimentConfig c4 = smoke_config("candidate-vs-oracle");
    c4.n = 61;  // brute-force diagram guard
    CHECK_THROWS_AS(run_experiment(c4), ConfigError);

    ExperimentConfig c5 = smoke_config("vdelta");
    c5.delta = 1.5;
    CHECK_THROWS_AS(run_experiment(c5), ConfigError);

    ExperimentConfig c6 = smoke_config("moments");
    c6.r = 20;  // sample larger than the ground set
    CHECK_THROWS_AS(run_experiment(c6), ConfigError);

    // trials < 0 is only legal as the "use default" sentinel before
    // apply_defaults; validate() itself rejects it.
    ExperimentConfig c7 = smoke_config("staircase-whp");
    c7.trials = -3;
    CHECK_THROWS_AS(c7.validate(), ConfigError);

    // Distribution dimension mismatch (three coords, d = 2).
    ExperimentConfig c8 = smoke_config("staircase-whp");
    c8.dist = DistributionSpec::uniform(3);
    CHECK_THROWS_AS(run_experiment(c8), ConfigError);
}

TEST_CASE("write_csv uses 9 significant digits") {
    ExperimentResult r;
    r.columns = {"a", "b", "c"};
    r.rows = {{0.123456789123, 2.0, 1234567891.0}};
    CHECK(csv_of(r) == "a,b,c\n0.123456789,2,1.23456789e+09\n");
}

TEST_CASE("fnv1a64 matches the published test vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("version string is embedded in manifests") {
    CHECK(version_string() == "pplab 0.1.0");
}

TEST_CASE("manifest JSON round-trips through a parser") {
    ExperimentConfig cfg = smoke_config("overlay-trend");
    const RunOutput out = run_experiment(cfg);
    const nlohmann::json j = nlohmann::json::parse(out.manifest.to_json_text());
    CHECK(j.at("experiment").get<std::string>() == "overlay-trend");
    CHECK(j.at("config_digest").get<std::string>() == out.manifest.config_digest);
    CHECK(j.at("base_seed").get<uint64_t>() == cfg.seed);
    CHECK(j.at("version").get<std::string>() == "pplab 0.1.0");
    CHECK(j.at("row_count").get<long long>() == 1);
    CHECK(looks_like_utc(j.at("started_utc").get<std::string>()));
    CHECK(looks_like_utc(j.at("finished_utc").get<std::string>()));
}

TEST_CASE("apply_defaults resolves the documented sentinels") {
    ExperimentConfig cfg;
    cfg.experiment = "containment";
    cfg.apply_defaults();
    CHECK(cfg.n == 2048);
    CHECK(cfg.trials == 20);
    CHECK(cfg.queries == 200);
    CHECK(cfg.k == proxy_k(2048, 2, 2.0));  // 117
    CHECK(cfg.gamma == doctest::Approx(2.0 * std::exp(1.0)));
    CHECK(cfg.delta == doctest::Approx(0.1));
    CHECK(cfg.samples == 1'000'000);

    ExperimentConfig tail;
    tail.experiment = "backward-tail";
    tail.apply_defaults();
    CHECK(tail.n == 1000);
    CHECK(tail.trials == 200);
}

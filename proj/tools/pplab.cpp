// pplab: experiment harness and utility CLI for the candidate-diagram library.
//
// Usage overview:
//   pplab <experiment> [--config c.json] [--seed u64] [--out path] [--threads t] [overrides]
//   pplab list
//   pplab candidate query --sites f.json --x X --y Y
//   pplab proxy check [--n N] [--d D] [--k K] [--queries M] [--trials T] [--seed S]
//   pplab diagram build --sites f.json --out diagram.json
//   pplab levels online [--n N] [--k K] [--orders T] [--seed S]
//
// Exit codes: 0 success (soft failures only set a flag), 1 hard experiment
// failure or internal error, 2 configuration error.  PPLAB_SEED provides the
// seed when neither a flag nor the config file sets one.

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pplab/arrangement.hpp"
#include "pplab/candidate.hpp"
#include "pplab/experiments.hpp"
#include "pplab/geometry.hpp"
#include "pplab/random_model.hpp"
#include "pplab/site_io.hpp"

namespace {

using pplab::ConfigError;
using pplab::ExperimentConfig;

/// Seed from the PPLAB_SEED environment variable, if set and non-empty.
std::optional<uint64_t> env_seed() {
    const char* raw = std::getenv("PPLAB_SEED");
    if (!raw || !*raw) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (errno != 0 || end == raw || *end != '\0')
        throw ConfigError(std::string("PPLAB_SEED is not a valid unsigned integer: ") + raw);
    return static_cast<uint64_t>(v);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Per-subcommand option state shared by every experiment subcommand.
struct ExperimentFlags {
    std::string config_path;
    uint64_t seed = 0;
    std::string out_path;
    int threads = 0;
    int n = 0, d = 0, k = 0, trials = 0, queries = 0, r = 0;
    long long samples = 0;
    double gamma = 0.0, delta = 0.0, c1 = 0.0;
};

void add_common_options(CLI::App* sub, ExperimentFlags& f) {
    sub->add_option("--config", f.config_path, "JSON config file");
    sub->add_option("--seed", f.seed, "base seed (overrides config and PPLAB_SEED)");
    sub->add_option("--out", f.out_path, "CSV output path; a .manifest.json side file is written");
    sub->add_option("--threads", f.threads, "worker threads for trial-level parallelism");
    sub->add_option("--n", f.n, "instance size");
    sub->add_option("--d", f.d, "attribute dimension");
    sub->add_option("--k", f.k, "level / proxy parameter");
    sub->add_option("--trials", f.trials, "number of trials");
    sub->add_option("--queries", f.queries, "queries per trial");
    sub->add_option("--r", f.r, "sample size (moments)");
    sub->add_option("--samples", f.samples, "Monte Carlo samples");
    sub->add_option("--gamma", f.gamma, "tail threshold factor");
    sub->add_option("--delta", f.delta, "volume threshold");
    sub->add_option("--c1", f.c1, "proxy constant c1");
}

/// Builds the effective config: config file first, then explicit flags, then
/// the seed fallback chain.
ExperimentConfig build_config(const std::string& experiment, CLI::App* sub,
                              const ExperimentFlags& f) {
    ExperimentConfig cfg;
    if (sub->count("--config")) {
        cfg = ExperimentConfig::from_json_text(read_file(f.config_path));
        if (!cfg.experiment.empty() && cfg.experiment != experiment)
            throw ConfigError("config file is for experiment '" + cfg.experiment +
                              "' but the subcommand is '" + experiment + "'");
    }
    cfg.experiment = experiment;
    const bool config_has_seed = sub->count("--config") && [&] {
        // from_json_text leaves seed at 0 unless the file set it; detect by
        // re-parsing the one key (cheap and keeps the struct simple).
        const auto j = nlohmann::json::parse(read_file(f.config_path));
        return j.contains("seed");
    }();
    if (sub->count("--seed")) cfg.seed = f.seed;
    else if (!config_has_seed) {
        if (const auto es = env_seed()) cfg.seed = *es;
    }
    if (sub->count("--out")) cfg.out_path = f.out_path;
    if (sub->count("--threads")) cfg.threads = f.threads;
    if (sub->count("--n")) cfg.n = f.n;
    if (sub->count("--d")) cfg.d = f.d;
    if (sub->count("--k")) cfg.k = f.k;
    if (sub->count("--trials")) cfg.trials = f.trials;
    if (sub->count("--queries")) cfg.queries = f.queries;
    if (sub->count("--r")) cfg.r = f.r;
    if (sub->count("--samples")) cfg.samples = f.samples;
    if (sub->count("--gamma")) cfg.gamma = f.gamma;
    if (sub->count("--delta")) cfg.delta = f.delta;
    if (sub->count("--c1")) cfg.c1 = f.c1;
    return cfg;
}

/// Runs one registry experiment and emits CSV (+ manifest when --out is set).
/// Returns the process exit code.
int run_and_emit(const ExperimentConfig& cfg) {
    const pplab::RunOutput out = pplab::run_experiment(cfg);

    if (out.manifest.row_count >= 0 && !cfg.out_path.empty()) {
        std::ofstream csv(cfg.out_path);
        if (!csv) throw ConfigError("cannot open output file: " + cfg.out_path);
        pplab::write_csv(out.result, csv);
        std::ofstream manifest(cfg.out_path + ".manifest.json");
        if (!manifest) throw ConfigError("cannot open manifest file: " + cfg.out_path + ".manifest.json");
        manifest << out.manifest.to_json_text();
    } else {
        pplab::write_csv(out.result, std::cout);
    }

    for (const std::string& note : out.result.notes)
        std::cerr << "[pplab] " << out.result.experiment << ": " << note << "\n";
    std::cerr << "[pplab] " << out.result.experiment << ": "
              << (out.result.hard ? "hard check " : "soft check ")
              << ((out.result.hard ? out.result.hard_pass : out.result.soft_pass) ? "PASS"
                                                                                  : "FAIL")
              << "\n";
    if (!out.result.hard_pass) return 1;
    return 0;
}

int cmd_candidate_query(const std::string& sites_path, double x, double y) {
    const pplab::SiteSet sites = pplab::load_site_set(sites_path);
    const pplab::CandidateSet cs = pplab::candidate_set({x, y}, sites);
    nlohmann::json j;
    j["query_x"] = x;
    j["query_y"] = y;
    j["candidate_ids"] = cs.member_ids;
    j["distance_tie"] = cs.distance_tie;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_proxy_check(int n, int d, int k, int queries, int trials, uint64_t seed, double c1,
                    const std::string& out_path) {
    if (n < 2) throw ConfigError("n must be >= 2");
    if (d < 1) throw ConfigError("d must be >= 1");
    if (queries < 1) throw ConfigError("queries must be >= 1");
    if (trials < 0) throw ConfigError("trials must be >= 0");
    if (k <= 0) k = pplab::proxy_k(n, d, c1 > 0 ? c1 : 2.0);

    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ConfigError("cannot open output file: " + out_path);
    }
    std::ostream& os = out_path.empty() ? std::cout : file;

    os << "trial,query_x,query_y,candidate_size,proxy_size,contained\n";
    char buf[64];
    long long violations = 0;
    for (int t = 0; t < trials; ++t) {
        // Same substreams as the containment experiment.
        const pplab::SiteSet sites = pplab::sample_site_set(
            n, pplab::DistributionSpec::uniform(d), pplab::mix_seed(seed, 2 * static_cast<uint64_t>(t)));
        const std::vector<int> order = pplab::volume_ordering(sites);
        const pplab::BBox box = pplab::default_diagram_bbox(sites);
        pplab::SplitMix64 qrng(pplab::mix_seed(seed, 2 * static_cast<uint64_t>(t) + 1));
        for (int q = 0; q < queries; ++q) {
            const pplab::PlanePoint pt{box.xmin + box.width() * qrng.next_double(),
                                       box.ymin + box.height() * qrng.next_double()};
            const std::vector<int> cand = pplab::candidate_set(pt, sites).member_ids;
            const std::vector<int> proxy = pplab::proxy_set(pt, sites, k, order).member_ids;
            const bool contained =
                std::includes(proxy.begin(), proxy.end(), cand.begin(), cand.end());
            if (!contained) ++violations;
            std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%zu,%zu,%d", t, pt.x, pt.y, cand.size(),
                          proxy.size(), contained ? 1 : 0);
            os << buf << "\n";
        }
    }
    std::cerr << "[pplab] proxy check: " << violations << " containment violation(s) at k = " << k
              << "\n";
    return violations == 0 ? 0 : 1;
}

int cmd_diagram_build(const std::string& sites_path, const std::string& out_path) {
    const pplab::SiteSet sites = pplab::load_site_set(sites_path);
    const pplab::CandidateDiagram diag = pplab::candidate_diagram(sites);
    const auto cx = diag.subdivision.complexity();

    nlohmann::json j;
    j["bbox"] = {{"xmin", diag.subdivision.bbox.xmin},
                 {"ymin", diag.subdivision.bbox.ymin},
                 {"xmax", diag.subdivision.bbox.xmax},
                 {"ymax", diag.subdivision.bbox.ymax}};
    j["complexity"] = {{"vertices", cx.vertices}, {"edges", cx.edges}, {"faces", cx.faces}};
    j["space_complexity"] = diag.space_complexity;
    j["perturbed"] = diag.subdivision.perturbed;
    nlohmann::json faces = nlohmann::json::array();
    for (size_t f = 0; f < diag.subdivision.faces.size(); ++f) {
        nlohmann::json jf;
        nlohmann::json loop = nlohmann::json::array();
        for (const int v : diag.subdivision.faces[f].cycle) {
            const auto& p = diag.subdivision.vertices[static_cast<size_t>(v)].pos;
            loop.push_back(nlohmann::json::array({p.x, p.y}));
        }
        jf["loop"] = std::move(loop);
        jf["candidates"] = diag.face_candidates[f];
        faces.push_back(std::move(jf));
    }
    j["faces"] = std::move(faces);

    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot open output file: " + out_path);
    out << j.dump(2) << "\n";
    std::cerr << "[pplab] diagram: " << diag.subdivision.faces.size() << " faces, "
              << "space complexity " << diag.space_complexity
              << (diag.subdivision.perturbed ? " (perturbed)" : "") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"experiment harness for the candidate diagram of Pareto-optimal sites"};
    app.require_subcommand(1);

    // --- registry experiments -------------------------------------------
    struct Registered {
        CLI::App* sub;
        ExperimentFlags flags;
        std::string name;
    };
    std::vector<std::unique_ptr<Registered>> registered;
    for (const pplab::ExperimentInfo& info : pplab::registry_list()) {
        auto reg = std::make_unique<Registered>();
        reg->name = info.name;
        reg->sub = app.add_subcommand(info.name, info.claim);
        add_common_options(reg->sub, reg->flags);
        registered.push_back(std::move(reg));
    }

    // --- list ------------------------------------------------------------
    CLI::App* list_cmd = app.add_subcommand("list", "list experiments and the claims they check");

    // --- candidate query --------------------------------------------------
    CLI::App* candidate_cmd = app.add_subcommand("candidate", "candidate-set utilities");
    candidate_cmd->require_subcommand(1);
    std::string cq_sites;
    double cq_x = 0.0, cq_y = 0.0;
    CLI::App* candidate_query = candidate_cmd->add_subcommand("query", "candidate set at a point");
    candidate_query->add_option("--sites", cq_sites, "site file (JSON)")->required();
    candidate_query->add_option("--x", cq_x, "query x")->required();
    candidate_query->add_option("--y", cq_y, "query y")->required();

    // --- proxy check ------------------------------------------------------
    CLI::App* proxy_cmd = app.add_subcommand("proxy", "proxy-set utilities");
    proxy_cmd->require_subcommand(1);
    int pc_n = 256, pc_d = 2, pc_k = 0, pc_queries = 50, pc_trials = 4;
    uint64_t pc_seed = 0;
    double pc_c1 = 2.0;
    std::string pc_out;
    CLI::App* proxy_check =
        proxy_cmd->add_subcommand("check", "candidate-in-proxy containment per query");
    proxy_check->add_option("--n", pc_n, "sites per trial");
    proxy_check->add_option("--d", pc_d, "attribute dimension");
    proxy_check->add_option("--k", pc_k, "proxy parameter (0: ceil(c1 ln^d n))");
    proxy_check->add_option("--queries", pc_queries, "queries per trial");
    proxy_check->add_option("--trials", pc_trials, "trials");
    proxy_check->add_option("--seed", pc_seed, "base seed");
    proxy_check->add_option("--c1", pc_c1, "proxy constant c1");
    proxy_check->add_option("--out", pc_out, "CSV output path (default stdout)");

    // --- diagram build ----------------------------------------------------
    CLI::App* diagram_cmd = app.add_subcommand("diagram", "candidate-diagram utilities");
    diagram_cmd->require_subcommand(1);
    std::string db_sites, db_out;
    CLI::App* diagram_build =
        diagram_cmd->add_subcommand("build", "build the diagram of a site file");
    diagram_build->add_option("--sites", db_sites, "site file (JSON)")->required();
    diagram_build->add_option("--out", db_out, "output JSON path")->required();

    // --- levels online ----------------------------------------------------
    CLI::App* levels_cmd = app.add_subcommand("levels", "k-level utilities");
    levels_cmd->require_subcommand(1);
    ExperimentFlags lo_flags;
    int lo_orders = 0;
    CLI::App* levels_online =
        levels_cmd->add_subcommand("online", "incremental k-level vertex counting");
    levels_online->add_option("--n", lo_flags.n, "number of lines");
    levels_online->add_option("--k", lo_flags.k, "level index");
    levels_online->add_option("--orders", lo_orders, "number of insertion orders");
    levels_online->add_option("--seed", lo_flags.seed, "base seed");
    levels_online->add_option("--out", lo_flags.out_path, "CSV output path");
    levels_online->add_option("--threads", lo_flags.threads, "worker threads");

    try {
        app.parse(argc, argv);

        if (*list_cmd) {
            for (const pplab::ExperimentInfo& info : pplab::registry_list())
                std::cout << info.name << "\t" << (info.hard ? "hard" : "soft") << "\t"
                          << info.claim << "\n";
            return 0;
        }
        if (*candidate_query) return cmd_candidate_query(cq_sites, cq_x, cq_y);
        if (*proxy_check) {
            if (!proxy_check->count("--seed")) {
                if (const auto es = env_seed()) pc_seed = *es;
            }
            return cmd_proxy_check(pc_n, pc_d, pc_k, pc_queries, pc_trials, pc_seed, pc_c1,
                                   pc_out);
        }
        if (*diagram_build) return cmd_diagram_build(db_sites, db_out);
        if (*levels_online) {
            ExperimentConfig cfg;
            cfg.experiment = "online-klevel";
            if (levels_online->count("--n")) cfg.n = lo_flags.n;
            if (levels_online->count("--k")) cfg.k = lo_flags.k;
            if (levels_online->count("--orders")) cfg.trials = lo_orders;
            if (levels_online->count("--seed")) cfg.seed = lo_flags.seed;
            else if (const auto es = env_seed()) cfg.seed = *es;
            if (levels_online->count("--out")) cfg.out_path = lo_flags.out_path;
            if (levels_online->count("--threads")) cfg.threads = lo_flags.threads;
            return run_and_emit(cfg);
        }
        for (const auto& reg : registered) {
            if (*reg->sub) return run_and_emit(build_config(reg->name, reg->sub, reg->flags));
        }
        std::cerr << "pplab: no subcommand selected\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit 0; parse problems are config errors
    } catch (const ConfigError& e) {
        std::cerr << "pplab: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "pplab: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "pplab: error: " << e.what() << "\n";
        return 1;
    }
}

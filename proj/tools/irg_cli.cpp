#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "irg/bounds.hpp"
#include "irg/config.hpp"
#include "irg/experiments.hpp"

namespace fs = std::filesystem;
using namespace irg;

namespace {

enum Exit { ok = 0, worker_failure = 1, config_error = 2, check_violation = 3 };

struct Options {
    std::string config;
    std::string seed;
    std::optional<std::size_t> replicas;
    unsigned workers = 1;
    std::string out_dir = ".";
    bool check = false;
    std::string app;
    bool structural = false;
};

struct Loaded {
    ExperimentConfig cfg;
    std::string hash;
};

Loaded load(const Options& o) {
    const std::string text = read_text_file(o.config);
    Loaded l{parse_config(text), ""};
    if (!o.seed.empty()) {
        l.cfg.seed = Seed::parse(o.seed);
    } else if (const char* env = std::getenv("IRG_SEED"); env && *env) {
        l.cfg.seed = Seed::parse(env);
    }
    if (o.replicas) l.cfg.replicas = *o.replicas;
    if (!o.app.empty()) l.cfg.application = parse_application(o.app);
    l.cfg.validate();
    // hash the effective configuration, overrides included
    auto j = nlohmann::json::parse(text);
    j["seed"] = l.cfg.seed.hex();
    j["replicas"] = l.cfg.replicas;
    j["application"] = to_string(l.cfg.application);
    l.hash = config_hash(j.dump());
    return l;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Writer {
public:
    Writer(const Options& o, const Loaded& l, std::string command) : o_(o) {
        fs::create_directories(o.out_dir);
        m_.command = std::move(command);
        m_.config_path = o.config;
        m_.config_hash = l.hash;
        m_.seed = l.cfg.seed;
        m_.tool_version = tool_version;
        m_.workers = o.workers;
    }
    void write(const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(o_.out_dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + name);
        out << content;
        m_.outputs.push_back(name);
    }
    void finish() {
        m_.timestamp = utc_now();
        std::ofstream out(fs::path(o_.out_dir) / ("manifest_" + m_.command + ".json"), std::ios::binary);
        out << m_.to_json();
    }

private:
    const Options& o_;
    RunManifest m_;
};

int cmd_generate(const Options& o) {
    const auto l = load(o);
    const std::size_t n = l.cfg.n_grid.front();
    const auto w = experiment_weights(l.cfg, n);
    const auto g = sample_graph(w, experiment_graph_seed(l.cfg, n), 0, l.cfg.marks);
    const auto m = moments(w, l.cfg.weights);
    std::ostringstream os;
    os << "n " << n << "\n";
    os << "edges " << g.edge_count() << "\n";
    os << "theta " << m.theta << "\n";
    os << "lambda_n " << m.lambda_n << "\n";
    for (int p = 0; p < 4; ++p) os << "Gamma_" << p << " " << m.gamma[static_cast<std::size_t>(p)] << "\n";
    for (int p = 1; p < 3; ++p) os << "kappa_" << p << " " << m.kappa[static_cast<std::size_t>(p)] << "\n";
    os << "alpha_n " << m.alpha_n << "\n";
    os << "seed " << l.cfg.seed.hex() << "\n";
    std::cout << os.str();
    if (!o.out_dir.empty() && o.out_dir != ".") {
        Writer wr(o, l, "generate");
        wr.write("generate.txt", os.str());
        wr.finish();
    }
    return ok;
}

int cmd_couple(const Options& o) {
    const auto l = load(o);
    const auto rows = coupling_experiment(l.cfg, o.workers);
    Writer wr(o, l, "couple");
    wr.write("coupling.csv", coupling_csv(rows, {l.cfg.seed, l.hash}));
    wr.finish();
    bool bad = false;
    for (const auto& r : rows) bad = bad || r.violation;
    for (const auto& r : rows)
        std::cout << "n=" << r.n << " ell=" << r.ell << " rate=" << r.rate << " bound=" << r.bound
                  << (r.violation ? " VIOLATION" : "") << "\n";
    return o.check && bad ? check_violation : ok;
}

int cmd_clt(const Options& o) {
    const auto l = load(o);
    const auto res = clt_experiment(l.cfg, o.workers);
    Writer wr(o, l, "clt");
    wr.write(std::string("clt_") + to_string(l.cfg.application) + ".csv", clt_csv(res, {l.cfg.seed, l.hash}));
    wr.finish();
    for (const auto& r : res.rows)
        std::cout << "n=" << r.n << " sigma2=" << r.sigma2 << " ks=" << r.ks << " n/sigma2=" << r.n_over_sigma2
                  << "\n";
    const bool good = res.trend_ok && !res.rows.empty() && !res.rows.back().degenerate && res.rows.back().ks < 0.05 &&
                      res.ratio_spread < 0.25;
    return o.check && !good ? check_violation : ok;
}

int cmd_bounds(const Options& o) {
    const auto l = load(o);
    Writer wr(o, l, "bounds");
    wr.write("bounds_grid.csv", bounds_csv(bounds_grid(l.cfg), {l.cfg.seed, l.hash}));
    bool bad = false;
    if (o.structural) {
        const auto rows = structural_experiment(l.cfg, o.workers);
        for (const auto& r : rows) bad = bad || !r.ok;
        wr.write("structural.csv", structural_csv(rows, {l.cfg.seed, l.hash}));
    }
    wr.finish();
    return o.check && bad ? check_violation : ok;
}

int cmd_rde(const Options& o) {
    const auto l = load(o);
    const auto r = rde_experiment(l.cfg);
    Writer wr(o, l, "rde");
    wr.write("rde.csv", rde_csv(r, {l.cfg.seed, l.hash}));
    wr.finish();
    std::cout << "final_gap=" << r.diagnostics.gaps.back() << " noise=" << r.diagnostics.noise
              << " status=" << to_string(r.diagnostics.status) << "\n";
    return o.check && !rde_envelope_ok(r.diagnostics, 0.02) ? check_violation : ok;
}

int cmd_oracle(const Options& o) {
    const auto l = load(o);
    const auto rows = matching_oracle(l.cfg, o.workers);
    Writer wr(o, l, "matching-oracle");
    wr.write("matching_oracle.csv", oracle_csv(rows, {l.cfg.seed, l.hash}));
    wr.finish();
    bool bad = false;
    for (const auto& r : rows) bad = bad || !r.recursion_ok || !r.sandwich_ok;
    return o.check && bad ? check_violation : ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inhomogeneous random graph couplings and limit checks"};
    app.require_subcommand(1);
    Options o;
    std::size_t replicas = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON experiment configuration")->required();
        sub->add_option("--seed", o.seed, "128-bit hex seed (overrides IRG_SEED and the config)");
        sub->add_option("--replicas", replicas, "replica count override");
        sub->add_option("--workers", o.workers, "worker threads (0 = all cores)");
        sub->add_option("--out-dir", o.out_dir, "output directory");
        sub->add_flag("--check", o.check, "exit 3 when an acceptance threshold is violated");
    };
    auto* gen = app.add_subcommand("generate", "sample one graph and print its summary");
    add_common(gen);
    auto* couple = app.add_subcommand("couple", "coupling break rates against the bound");
    add_common(couple);
    auto* clt = app.add_subcommand("clt", "CLT trend of a graph functional");
    add_common(clt);
    clt->add_option("--app", o.app, "edge-sum or matching");
    auto* bounds = app.add_subcommand("bounds", "bound values over the (n, ell) grid");
    add_common(bounds);
    bounds->add_flag("--structural", o.structural, "also run the Monte Carlo structural battery");
    auto* rde = app.add_subcommand("rde", "population dynamics for the matching recursion");
    add_common(rde);
    auto* oracle = app.add_subcommand("matching-oracle", "exact matching identities on small graphs");
    add_common(oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_error;
    }
    if (replicas > 0) o.replicas = replicas;

    try {
        if (*gen) return cmd_generate(o);
        if (*couple) return cmd_couple(o);
        if (*clt) return cmd_clt(o);
        if (*bounds) return cmd_bounds(o);
        if (*rde) return cmd_rde(o);
        if (*oracle) return cmd_oracle(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const ReplicaFailure& e) {
        std::cerr << "worker failure: " << e.what() << "\n";
        return worker_failure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return worker_failure;
    }
    return ok;
}

// kqr — construct, manipulate, and verify block designs and K_q^(r)-clique
// decompositions of hypergraphs at desk scale.
//
// Exit codes: 0 success, 1 negative certificate (unsat / verification or
// threshold failure), 2 budget exhausted, 3 usage or malformed input.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kqr/absorb.hpp"
#include "kqr/boosting.hpp"
#include "kqr/coverdown.hpp"
#include "kqr/divisibility.hpp"
#include "kqr/io.hpp"
#include "kqr/packing.hpp"
#include "kqr/properties.hpp"
#include "kqr/vortex.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitBudget = 2;
constexpr int kExitUsage = 3;

using kqr::json;

/// "complete:n" or a hypergraph file path ("-" = stdin).
kqr::HostFile load_host(const std::string& spec, int r) {
    kqr::HostFile host;
    if (spec.rfind("complete:", 0) == 0) {
        int n = std::stoi(spec.substr(9));
        host.graph = kqr::RGraph::complete(n, r);
        host.multigraph = kqr::MultiRGraph::complete(n, r, 1);
        return host;
    }
    if (spec == "-") return kqr::read_hypergraph(std::cin);
    std::ifstream in(spec);
    if (!in) throw kqr::ParseError(0, 0, "cannot open '" + spec + "'");
    return kqr::read_hypergraph(in);
}

kqr::Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        // accept small decimals like 0.35 exactly
        auto dot = s.find('.');
        if (dot == std::string::npos) return kqr::Rational(std::stoll(s));
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::int64_t den = 1;
        for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
        return kqr::Rational(std::stoll(digits), den);
    }
    return kqr::Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

struct CommonOpts {
    std::uint64_t seed = 0;
    std::int64_t budget = 2'000'000;
    int threads = 1;
};

kqr::ParamSet make_params(const CommonOpts& c, int q, int r, int lambda = 1) {
    kqr::ParamSet p;
    p.q = q;
    p.r = r;
    p.lambda = lambda;
    p.seed = c.seed;
    p.budget.max_nodes = c.budget;
    p.threads = c.threads;
    return p;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_solve(const std::string& host_spec, int n, int q, int r, int lambda, const std::string& method,
              const CommonOpts& copts, const std::string& out_path) {
    kqr::ParamSet p = make_params(copts, q, r, lambda);
    kqr::Complex G;
    if (!host_spec.empty()) {
        auto host = load_host(host_spec, r);
        G = kqr::Complex::induced(host.graph, std::min(host.graph.n(), q + r));
        n = host.graph.n();
    } else {
        G = kqr::Complex::complete(n, std::min(n, q + r));
    }

    json j;
    j["command"] = "solve";
    j["n"] = n;
    j["q"] = q;
    j["r"] = r;
    j["lambda"] = lambda;
    j["method"] = method;
    j["seed"] = p.seed;

    std::vector<kqr::VertexSet> blocks;
    int exit_code = kExitOk;
    if (method == "exact") {
        auto res = kqr::exact_decompose(G, q, r, lambda, p);
        j["nodes"] = res.nodes;
        if (res.status == kqr::SolveStatus::Solved) {
            j["status"] = "solved";
            blocks = res.blocks;
        } else if (res.status == kqr::SolveStatus::Unsat) {
            j["status"] = "unsat";
            exit_code = kExitNegative;
        } else {
            j["status"] = "timeout";
            exit_code = kExitBudget;
        }
    } else if (method == "pipeline") {
        if (lambda != 1) {
            std::cerr << "pipeline method supports lambda=1 only\n";
            return kExitUsage;
        }
        auto res = kqr::iterate_pipeline(G, q, r, p);
        j["attempts"] = res.attempts;
        if (res.ok) {
            j["status"] = "solved";
            json levels = json::array();
            for (const auto& st : res.level_stats) {
                levels.push_back({{"level", st.level},
                                  {"size", st.level_size},
                                  {"nibble_blocks", st.nibble_blocks},
                                  {"nibble_leftover", st.nibble_leftover},
                                  {"boost_used", st.boost_used},
                                  {"coverdown_blocks_by_type", st.coverdown_blocks_by_type}});
            }
            j["levels"] = levels;
            j["final_leftover_edges"] = res.final_leftover;
            blocks = res.blocks;
        } else if (!res.divisible_input) {
            j["status"] = "not-divisible";
            exit_code = kExitNegative;
        } else {
            j["status"] = "budget";
            j["failure"] = res.failure;
            exit_code = kExitBudget;
        }
    } else {
        std::cerr << "unknown method '" << method << "'\n";
        return kExitUsage;
    }

    if (exit_code == kExitOk) {
        j["blocks"] = blocks.size();
        kqr::DesignFile d;
        d.n = n;
        d.q = q;
        d.r = r;
        d.lambda = lambda;
        d.blocks = blocks;
        if (!out_path.empty()) {
            std::ofstream os(out_path);
            kqr::write_design(os, d);
            j["out"] = out_path;
        } else {
            std::ostringstream os;
            kqr::write_design(os, d);
            j["design"] = os.str();
        }
    }
    emit(j);
    return exit_code;
}

int cmd_verify(const std::string& design_path, const std::string& host_spec, int lambda_override) {
    kqr::DesignFile d;
    if (design_path == "-") {
        d = kqr::read_design(std::cin);
    } else {
        std::ifstream in(design_path);
        if (!in) throw kqr::ParseError(0, 0, "cannot open '" + design_path + "'");
        d = kqr::read_design(in);
    }
    if (lambda_override > 0) d.lambda = lambda_override;
    kqr::RGraph host;
    if (host_spec.empty()) {
        host = kqr::RGraph::complete(d.n, d.r);
    } else {
        host = load_host(host_spec, d.r).graph;
    }
    auto rep = kqr::verify_design(host, d.blocks, d.lambda);
    json j;
    j["command"] = "verify";
    j["blocks"] = d.blocks.size();
    j["lambda"] = d.lambda;
    j["ok"] = rep.ok;
    j["blocks_distinct"] = rep.blocks_distinct;
    j["blocks_outside_host"] = rep.blocks_outside_host.size();
    if (!rep.under_covered.empty())
        j["first_under_covered"] = {{"edge", rep.under_covered[0].first},
                                    {"times", rep.under_covered[0].second}};
    if (!rep.over_covered.empty())
        j["first_over_covered"] = {{"edge", rep.over_covered[0].first},
                                   {"times", rep.over_covered[0].second}};
    j["under_covered"] = rep.under_covered.size();
    j["over_covered"] = rep.over_covered.size();
    emit(j);
    return rep.ok ? kExitOk : kExitNegative;
}

int cmd_check_div(const std::string& host_spec, int q, int r, int lambda) {
    auto host = load_host(host_spec, r);
    json j;
    j["command"] = "check-div";
    j["q"] = q;
    j["r"] = r;
    j["lambda"] = lambda;
    bool ok;
    if (host.is_multi) {
        ok = kqr::check_multi_divisible(host.multigraph, q);
        j["multigraph"] = true;
    } else {
        auto rep = kqr::check_design_divisible(host.graph, q, r, lambda);
        ok = rep.ok;
        j["violations"] = json::array();
        for (const auto& v : rep.violations)
            j["violations"].push_back(
                {{"subset", v.subset}, {"degree", v.degree}, {"divisor", v.divisor}});
    }
    j["ok"] = ok;
    emit(j);
    return ok ? kExitOk : kExitNegative;
}

int cmd_props(const std::string& check, const std::string& host_spec, int n, int q, int r,
              const std::string& eps_s, const std::string& xi_s, const std::string& p_s, int h,
              const std::string& mu_s, int u_size, const CommonOpts& copts) {
    kqr::RGraph host;
    if (!host_spec.empty()) host = load_host(host_spec, r).graph;
    else host = kqr::RGraph::complete(n, r);
    const int max_level = std::min(host.n(), q + r);
    kqr::Complex G = kqr::Complex::induced(host, max_level);

    json j;
    j["command"] = "props";
    j["check"] = check;
    kqr::PropertyReport rep;
    if (check == "regularity") {
        rep = kqr::measure_regularity(G, nullptr, q, r);
        if (!eps_s.empty() && !rep.sampled && rep.measured.count("eps"))
            rep.pass = rep.measured["eps"] <= parse_rational(eps_s);
    } else if (check == "density") {
        rep = kqr::measure_density(G, q + r, r);
        if (!xi_s.empty() && !rep.sampled && rep.measured.count("xi"))
            rep.pass = rep.measured["xi"] >= parse_rational(xi_s);
    } else if (check == "extendability") {
        rep = kqr::measure_extendability(G, q, r);
        if (!xi_s.empty() && rep.measured.count("xi")) rep.pass = rep.measured["xi"] >= parse_rational(xi_s);
    } else if (check == "supercomplex") {
        kqr::Rational eps = eps_s.empty() ? kqr::Rational(1, 100) : parse_rational(eps_s);
        kqr::Rational xi;
        if (xi_s.empty()) {
            kqr::Rational fact(1);  // default threshold 0.9/q!
            for (int i = 2; i <= q; ++i) fact *= kqr::Rational(i);
            xi = kqr::Rational(9, 10) / fact;
        } else {
            xi = parse_rational(xi_s);
        }
        rep = kqr::check_supercomplex(G, q, r, eps, xi);
    } else if (check == "typicality") {
        rep = kqr::check_typicality(host, h, p_s.empty() ? kqr::Rational(1) : parse_rational(p_s));
    } else if (check == "random-in") {
        kqr::ParamSet p = make_params(copts, q, r);
        if (!mu_s.empty()) p.mu = parse_rational(mu_s);
        if (!eps_s.empty()) p.eps = parse_rational(eps_s);
        if (!xi_s.empty()) p.xi = parse_rational(xi_s);
        j["seed"] = p.seed;
        kqr::Rng rng(p.seed);
        kqr::VertexSet U;
        if (u_size >= 0) {
            kqr::VertexSet pool = G.vertices();
            rng.shuffle(pool);
            pool.resize(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(u_size)));
            std::sort(pool.begin(), pool.end());
            U = pool;
        } else {
            U = G.vertices();
        }
        j["u"] = U;
        rep = kqr::check_random_in(G, U, p);
    } else {
        std::cerr << "unknown check '" << check << "'\n";
        return kExitUsage;
    }
    j["report"] = kqr::property_report_json(rep);
    emit(j);
    return rep.pass ? kExitOk : kExitNegative;
}

int cmd_gadget(int q, int r, bool dump) {
    auto gw = kqr::edge_gadget(q, r);
    json j;
    j["command"] = "gadget";
    j["q"] = q;
    j["r"] = r;
    json w = json::array(), bounds = json::array();
    for (int i = 0; i <= r; ++i) {
        w.push_back(gw.w[i].str());
        bounds.push_back(gw.bound(i).str());
    }
    j["w"] = w;
    j["bounds"] = bounds;
    j["verified"] = true;  // edge_gadget throws on any failure
    emit(j);
    if (dump) {
        // one line per q-set of the complete complex on e ∪ J,
        // e = {0..r-1}: "<Q-set>\t<num/den>"
        kqr::for_each_subset_of_range(q + r, q, [&](const kqr::VertexSet& Q) {
            int overlap = 0;
            for (int v : Q)
                if (v < r) ++overlap;
            std::ostringstream line;
            for (std::size_t i = 0; i < Q.size(); ++i) line << (i ? " " : "") << Q[i];
            kqr::Rational val = gw.w[overlap];
            std::cout << line.str() << "\t" << val.num() << "/" << val.den() << "\n";
        });
    }
    return kExitOk;
}

int cmd_boost_demo(int n, int q, int r, const CommonOpts& copts) {
    kqr::ParamSet p = make_params(copts, q, r);
    auto G = kqr::Complex::complete(n, std::min(n, q + r));
    json j;
    j["command"] = "boost-demo";
    j["n"] = n;
    j["q"] = q;
    j["r"] = r;
    j["seed"] = p.seed;
    try {
        auto bw = kqr::boost_weights(G, q, r);
        j["d_target"] = kqr::rational_json(bw.d_target);
        j["psi_min"] = kqr::big_str(bw.psi_min);
        j["psi_max"] = kqr::big_str(bw.psi_max);
        j["psi_in_quarter_range"] = bw.in_quarter_range;
        j["row_sums_exact"] = true;  // boost_weights throws otherwise
        auto sel = kqr::boost_select(G, bw, p);
        j["selected"] = sel.Y.size();
        j["selection_regularity"] = kqr::property_report_json(sel.regularity);
        j["selection_density"] = kqr::property_report_json(sel.density);
        emit(j);
        return kExitOk;
    } catch (const std::invalid_argument& ex) {
        j["status"] = "unsupported-input";
        j["error"] = ex.what();
        emit(j);
        return kExitNegative;
    }
}

int cmd_nibble_bench(const std::string& n_list, int q, int r, int seeds, const CommonOpts& copts) {
    json j;
    j["command"] = "nibble-bench";
    j["q"] = q;
    j["r"] = r;
    j["seeds"] = seeds;
    j["seed"] = copts.seed;
    json rows = json::array();
    std::vector<double> medians;
    std::stringstream ss(n_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        int n = std::stoi(tok);
        auto G = kqr::Complex::complete(n, q);
        const double total = static_cast<double>(G.level(r).size());
        std::vector<double> fractions;
        for (int s = 0; s < seeds; ++s) {
            kqr::ParamSet p = make_params(copts, q, r);
            p.seed = kqr::Rng::derive(copts.seed, static_cast<std::uint64_t>(s));
            auto nib = kqr::nibble_pack(G, q, r, p);
            fractions.push_back(static_cast<double>(nib.stats.leftover_edges) / total);
        }
        std::sort(fractions.begin(), fractions.end());
        double median = fractions[fractions.size() / 2];
        if (fractions.size() % 2 == 0)
            median = (fractions[fractions.size() / 2 - 1] + fractions[fractions.size() / 2]) / 2;
        medians.push_back(median);
        rows.push_back({{"n", n}, {"median_leftover_fraction", median}, {"runs", seeds}});
    }
    j["rows"] = rows;
    bool decreasing = true;
    for (std::size_t i = 1; i < medians.size(); ++i)
        if (!(medians[i] < medians[i - 1])) decreasing = false;
    j["strictly_decreasing"] = decreasing;
    emit(j);
    return kExitOk;
}

int cmd_vortex(int n, const std::string& mu_s, int m, bool reports, const CommonOpts& copts) {
    kqr::ParamSet p = make_params(copts, 3, 2);
    kqr::Rational mu = mu_s.empty() ? kqr::Rational(1, 2) : parse_rational(mu_s);
    const int max_level = reports ? std::min(n, p.q + p.r) : 1;
    auto G = reports ? kqr::Complex::complete(n, max_level) : kqr::Complex(kqr::range_set(n), 1);
    auto v = kqr::build_vortex(G, mu, m, p);
    json j;
    j["command"] = "vortex";
    j["n"] = n;
    j["mu"] = kqr::rational_json(mu);
    j["m_prime"] = m;
    j["seed"] = p.seed;
    json sizes = json::array();
    for (const auto& lvl : v.levels) sizes.push_back(lvl.size());
    j["sizes"] = sizes;
    j["m"] = v.m;
    j["depth"] = v.depth();
    if (reports) {
        auto rr = kqr::measure_vortex_randomness(G, v, p);
        json inner = json::array();
        for (const auto& rep : rr.inner) inner.push_back(kqr::property_report_json(rep));
        j["randomness_inner"] = inner;
        json annulus = json::array();
        for (const auto& rep : rr.annulus) annulus.push_back(kqr::property_report_json(rep));
        j["randomness_annulus"] = annulus;
    }
    emit(j);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"block designs and K_q^(r)-decompositions at desk scale"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    CommonOpts copts;
    app.add_option("--seed", copts.seed, "RNG seed (default 0)");
    app.add_option("--budget", copts.budget, "search node budget");
    app.add_option("--threads", copts.threads, "worker threads (default 1)");

    // solve
    auto* solve = app.add_subcommand("solve", "find a decomposition / design");
    int s_n = 0, s_q = 3, s_r = 2, s_lambda = 1;
    std::string s_method = "exact", s_out, s_host;
    solve->add_option("--n", s_n, "complete host K_n");
    solve->add_option("--host", s_host, "hypergraph file ('-' = stdin) instead of --n");
    solve->add_option("--q", s_q, "block size");
    solve->add_option("--r", s_r, "uniformity");
    solve->add_option("--lambda", s_lambda, "cover multiplicity");
    solve->add_option("--method", s_method, "exact | pipeline");
    solve->add_option("--out", s_out, "write the design to this file");

    // verify
    auto* verify = app.add_subcommand("verify", "verify a design file");
    std::string v_design, v_host;
    int v_lambda = 0;
    verify->add_option("--design", v_design, "design file ('-' = stdin)")->required();
    verify->add_option("--host", v_host, "host: file or complete:n (default complete:n)");
    verify->add_option("--lambda", v_lambda, "override lambda");

    // check-div
    auto* cdiv = app.add_subcommand("check-div", "divisibility conditions");
    std::string d_host;
    int d_q = 3, d_r = 2, d_lambda = 1;
    cdiv->add_option("--host", d_host, "host: file, '-', or complete:n")->required();
    cdiv->add_option("--q", d_q, "block size");
    cdiv->add_option("--r", d_r, "uniformity");
    cdiv->add_option("--lambda", d_lambda, "multiplicity");

    // props
    auto* props = app.add_subcommand("props", "measured property checkers");
    std::string p_check, p_host, p_eps, p_xi, p_p, p_mu;
    int p_n = 10, p_q = 3, p_r = 2, p_h = 1, p_usize = -1;
    props->add_option("--check", p_check,
                      "regularity|density|extendability|supercomplex|typicality|random-in")
        ->required();
    props->add_option("--host", p_host, "host file or complete:n");
    props->add_option("--n", p_n, "complete host K_n");
    props->add_option("--q", p_q, "q");
    props->add_option("--r", p_r, "r");
    props->add_option("--eps", p_eps, "epsilon threshold (rational)");
    props->add_option("--xi", p_xi, "xi threshold (rational)");
    props->add_option("--p", p_p, "typicality density p (rational)");
    props->add_option("--typ-h", p_h, "typicality family bound h");
    props->add_option("--mu", p_mu, "random-in mu (rational)");
    props->add_option("--u-size", p_usize, "random-in |U| (default: U = V)");

    // gadget
    auto* gadget = app.add_subcommand("gadget", "edge gadget weights");
    int g_q = 3, g_r = 2;
    bool g_dump = false;
    gadget->add_option("--q", g_q, "q");
    gadget->add_option("--r", g_r, "r");
    gadget->add_flag("--dump", g_dump, "dump per-q-set weights");

    // boost-demo
    auto* boost = app.add_subcommand("boost-demo", "reweight and select Y on K_n");
    int b_n = 12, b_q = 3, b_r = 2;
    boost->add_option("--n", b_n, "complete host K_n");
    boost->add_option("--q", b_q, "q");
    boost->add_option("--r", b_r, "r");

    // nibble-bench
    auto* bench = app.add_subcommand("nibble-bench", "leftover fractions across n");
    std::string nb_list = "30,60,90";
    int nb_q = 3, nb_r = 2, nb_seeds = 10;
    bench->add_option("--n-list", nb_list, "comma-separated n values");
    bench->add_option("--q", nb_q, "q");
    bench->add_option("--r", nb_r, "r");
    bench->add_option("--seeds", nb_seeds, "number of seeds");

    // vortex
    auto* vortex = app.add_subcommand("vortex", "build a vortex on K_n");
    int vx_n = 50, vx_m = 12;
    std::string vx_mu;
    bool vx_reports = false;
    vortex->add_option("--n", vx_n, "number of vertices");
    vortex->add_option("--mu", vx_mu, "shrink factor mu (rational, default 1/2)");
    vortex->add_option("--m", vx_m, "target final size m'");
    vortex->add_flag("--reports", vx_reports, "attach randomness reports (small n only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed()) {
            if (s_n <= 0 && s_host.empty()) {
                std::cerr << "solve: need --n or --host\n";
                return kExitUsage;
            }
            return cmd_solve(s_host, s_n, s_q, s_r, s_lambda, s_method, copts, s_out);
        }
        if (verify->parsed()) return cmd_verify(v_design, v_host, v_lambda);
        if (cdiv->parsed()) return cmd_check_div(d_host, d_q, d_r, d_lambda);
        if (props->parsed())
            return cmd_props(p_check, p_host, p_n, p_q, p_r, p_eps, p_xi, p_p, p_h, p_mu, p_usize, copts);
        if (gadget->parsed()) return cmd_gadget(g_q, g_r, g_dump);
        if (boost->parsed()) return cmd_boost_demo(b_n, b_q, b_r, copts);
        if (bench->parsed()) return cmd_nibble_bench(nb_list, nb_q, nb_r, nb_seeds, copts);
        if (vortex->parsed()) return cmd_vortex(vx_n, vx_mu, vx_m, vx_reports, copts);
    } catch (const kqr::ParseError& ex) {
        std::cerr << "input error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const kqr::BudgetExceeded& ex) {
        std::cerr << "budget exceeded: " << ex.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

// quadcurl: solve, convergence studies and complex verification.

#include "quadcurl/complexcheck.hpp"
#include "quadcurl/elements.hpp"
#include "quadcurl/quadcurl.hpp"
#include "quadcurl/report.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace quadcurl;

namespace {

struct RunConfig {
    int k = 1, l = 0;
    int levels = 3;
    int n = 2;
    double perturb = 0.2;
    std::uint64_t seed = 42;
    int quad_degree = 10;
    std::string out = ".";
    double tol_rank = 1e-8;
    double tol_solve = 1e-10;
    std::string method = "hybrid";
    std::string rhs = "curl";
    int samples = 20;
};

// Thresholds of the structural checks.
constexpr double kPhiTol = 1e-8;
constexpr double kTraceTol = 1e-12;
constexpr double kJumpTol = 1e-9;

void add_common(CLI::App* c, RunConfig& cfg) {
    c->add_option("--k", cfg.k, "order k >= 1");
    c->add_option("--l", cfg.l, "second order index, l in {k-1, k}");
    c->add_option("--n", cfg.n, "cube subdivisions per axis")->check(CLI::PositiveNumber);
    c->add_option("--perturb", cfg.perturb, "vertex perturbation amplitude")->check(CLI::Range(0.0, 0.4999999));
    c->add_option("--seed", cfg.seed, "perturbation seed");
    c->add_option("--out", cfg.out, "output directory");
}

void validate(const RunConfig& cfg) {
    if (cfg.k < 1) throw InvalidArgument("k must be at least 1");
    if (cfg.l != cfg.k - 1 && cfg.l != cfg.k) throw InvalidArgument("l must be k-1 or k");
    if (cfg.levels < 1) throw InvalidArgument("levels must be at least 1");
}

SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions o;
    o.quad_degree = cfg.quad_degree;
    o.tol_solve = cfg.tol_solve;
    if (cfg.rhs == "l2")
        o.rhs = RhsMode::L2;
    else if (cfg.rhs == "curl")
        o.rhs = RhsMode::CurlPsi;
    else
        throw InvalidArgument("--rhs must be l2 or curl");
    return o;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out);
    const fs::path p = fs::path(cfg.out) / name;
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
}

bool structural_ok(const StructuralReport& r) {
    return r.phi_relative <= kPhiTol && r.trace_max <= kTraceTol && r.tn_jump_max <= kJumpTol;
}

void print_structural(const StructuralReport& r) {
    std::printf("  phi_h relative %.6g, max |tr sigma_h| %.6g, tn jump %.6g, C residual %.6g, solve residual %.6g\n",
                r.phi_relative, r.trace_max, r.tn_jump_max, r.c_residual, r.galerkin_residual);
}

TetMesh base_mesh(const RunConfig& cfg) {
    TetMesh m = build_cube_mesh(cfg.n);
    return cfg.perturb > 0.0 ? perturb(m, cfg.perturb, cfg.seed) : m;
}

int cmd_solve(const RunConfig& cfg) {
    const TetMesh mesh = base_mesh(cfg);
    const SolveOptions opt = solve_options(cfg);
    QuadCurlSolution sol;
    if (cfg.method == "hybrid")
        sol = solve_hybrid(mesh, cfg.k, cfg.l, opt);
    else if (cfg.method == "mixed")
        sol = solve_mixed(mesh, cfg.k, cfg.l, opt);
    else
        throw InvalidArgument("--method must be hybrid or mixed");
    const BrokenField ustar = postprocess(sol);
    ConvergenceRecord rec;
    rec.k = cfg.k;
    rec.l = cfg.l;
    rec.rows.push_back(compute_errors(sol, &ustar, ManufacturedSolution{}, cfg.quad_degree));
    rec.checks.push_back(structural_checks(sol));
    std::printf("%s solve k=%d l=%d on %d tets: %ld unknowns, backend %s\n", cfg.method.c_str(), cfg.k, cfg.l,
                mesh.num_tets(), sol.dofs, sol.info.backend.c_str());
    print_structural(rec.checks[0]);
    auto csv = open_out(cfg, "solve.csv");
    write_csv(csv, rec);
    auto md = open_out(cfg, "solve.md");
    write_markdown(md, rec);
    write_markdown(std::cout, rec);
    return structural_ok(rec.checks[0]) ? 0 : 1;
}

StudyOptions study_options(const RunConfig& cfg) {
    StudyOptions s;
    s.levels = cfg.levels;
    s.k = cfg.k;
    s.l = cfg.l;
    s.n0 = cfg.n;
    s.amplitude = cfg.perturb;
    s.seed = cfg.seed;
    s.hybrid = cfg.method != "mixed";
    s.solve = solve_options(cfg);
    return s;
}

int cmd_converge(const RunConfig& cfg, bool post_only) {
    const ConvergenceRecord rec = convergence_study(study_options(cfg), [](const ErrorRow& r) {
        std::fprintf(stderr, "level %d: h %.4g, %ld + %ld + %ld unknowns\n", r.level, r.h, r.dofs_u, r.dofs_lambda,
                     r.dofs_phi);
    });
    const std::string stem = post_only ? "postprocess" : "convergence";
    auto csv = open_out(cfg, stem + ".csv");
    write_csv(csv, rec);
    auto md = open_out(cfg, stem + ".md");
    write_markdown(md, rec);
    write_markdown(std::cout, rec);
    bool ok = true;
    for (const auto& c : rec.checks) ok = ok && structural_ok(c);
    return ok ? 0 : 1;
}

int cmd_verify_complex(const RunConfig& cfg) {
    const TetMesh mesh = base_mesh(cfg);
    const ComplexReport rep =
        verify_complex(mesh, cfg.k, cfg.l, "n=" + std::to_string(cfg.n), cfg.tol_rank);
    const CommutingReport com = verify_commuting(mesh, cfg.k, cfg.l, cfg.samples, cfg.seed);
    write_complex_report(std::cout, rep);
    std::cout << "commuting identities\n";
    for (const auto& id : com.identities)
        std::cout << "  [" << (id.pass ? "PASS" : "FAIL") << "] " << id.name << "  residual " << id.residual
                  << " threshold " << id.threshold << '\n';
    auto txt = open_out(cfg, "complex_report.txt");
    write_complex_report(txt, rep);
    auto csv = open_out(cfg, "complex_identities.csv");
    csv.precision(17);
    write_identities_csv(csv, rep.identities);
    write_identities_csv(csv, com.identities, false);
    return rep.pass() && com.pass() ? 0 : 1;
}

int cmd_check_elements(const RunConfig& cfg, int tets) {
    const ElementCertificate c = certify_elements(tets, cfg.seed);
    std::printf("%d random tets\n  duality |P - I_8| max %.3e\n  max |tr| of Sigma^tn basis %.3e\n", c.tets,
                c.duality_error, c.max_trace);
    for (const auto& [name, cond] : c.vandermonde) std::printf("  %-14s Vandermonde condition %.4e\n", name.c_str(), cond);
    const bool ok = c.pass();
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}

// Expands "--config FILE" into "--key value" pairs placed right after the
// subcommand, ahead of the explicit flags (which therefore win).
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read config file " + path);
    std::vector<std::string> from_file;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string t) {
            const auto b = t.find_first_not_of(" \t\r");
            const auto e = t.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) throw InvalidArgument("config line without '=': " + line);
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        from_file.push_back("--" + key);
        from_file.push_back(trim(line.substr(eq + 1)));
    }
    auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
    if (sub == args.end()) return args;
    args.insert(sub + 1, from_file.begin(), from_file.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quad-curl mixed finite elements and the discrete curl div complex"};
    app.add_option("--config", "key=value file, keys as the flag names (flags take precedence)");
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    RunConfig cfg;
    int tets = 100;

    auto* solve = app.add_subcommand("solve", "solve once and report errors");
    auto* conv = app.add_subcommand("converge", "convergence study on refined perturbed meshes");
    auto* post = app.add_subcommand("postprocess", "convergence study reporting the post-processed field");
    auto* vc = app.add_subcommand("verify-complex", "ranks, exactness and commuting identities");
    auto* ce = app.add_subcommand("check-elements", "duality and unisolvence on random tets");
    for (auto* c : {solve, conv, post, vc}) {
        add_common(c, cfg);
        c->add_option("--quad-degree", cfg.quad_degree, "quadrature degree for loads and errors")
            ->check(CLI::Range(1, 14));
        c->add_option("--tol-solve", cfg.tol_solve, "relative residual target of the direct solve");
    }
    for (auto* c : {solve, conv, post}) {
        c->add_option("--method", cfg.method, "hybrid or mixed");
        c->add_option("--rhs", cfg.rhs, "l2: (f, v); curl: (psi, curl v) with curl psi = f");
    }
    for (auto* c : {conv, post}) c->add_option("--levels", cfg.levels, "number of meshes")->check(CLI::PositiveNumber);
    vc->add_option("--tol-rank", cfg.tol_rank, "relative SVD rank tolerance");
    vc->add_option("--samples", cfg.samples, "random samples per commuting identity");
    ce->add_option("--tets", tets, "number of random tets")->check(CLI::PositiveNumber);
    ce->add_option("--seed", cfg.seed, "seed");
    cfg.n = 2;

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (*vc && vc->count("--n") == 0) cfg.n = 1;
        if (!*ce) validate(cfg);
        if (*solve) return cmd_solve(cfg);
        if (*conv) return cmd_converge(cfg, false);
        if (*post) return cmd_converge(cfg, true);
        if (*vc) return cmd_verify_complex(cfg);
        return cmd_check_elements(cfg, tets);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n' << app.help();
        return 2;
    } catch (const UnsupportedOrder& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

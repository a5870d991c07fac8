#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinzero/field_io.hpp"
#include "spinzero/green.hpp"
#include "spinzero/perturb.hpp"
#include "spinzero/radial_calculus.hpp"
#include "spinzero/zeroset.hpp"

namespace spinzero::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError(what + ": not a number: '" + s + "'");
    return v;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
    std::vector<double> v;
    for (const auto& p : split_list(s)) v.push_back(parse_double(p, what));
    return v;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct GeometryArgs {
    int n = 2;
    std::string grid;
    std::string lattice;
    std::string delta;
    std::string default_delta = "0";
};

void add_geometry(CLI::App* sub, GeometryArgs& g) {
    sub->add_option("-n,--dim", g.n, "Torus dimension (2 or 3)")->check(CLI::IsMember({2, 3}))->capture_default_str();
    sub->add_option("--grid", g.grid, "Samples per axis: one value or a comma list (default 32 for n=2, 16 for n=3)");
    sub->add_option("--lattice", g.lattice, "Lattice basis, row-major comma list; columns are basis vectors (default unit)");
    sub->add_option("--delta", g.delta, "Spin structure, comma list of 0|h (h = 1/2); default " + g.default_delta);
}

struct Geometry {
    GeometryPtr geom;
    json config;
};

Geometry make_geometry(const GeometryArgs& a) {
    const int n = a.n;
    std::vector<int> grid;
    if (a.grid.empty()) {
        grid.assign(static_cast<std::size_t>(n), n == 2 ? 32 : 16);
    } else {
        for (const auto& p : split_list(a.grid)) {
            const double v = parse_double(p, "--grid");
            if (v != std::floor(v)) throw UsageError("--grid: not an integer: '" + p + "'");
            grid.push_back(static_cast<int>(v));
        }
        if (grid.size() == 1) grid.assign(static_cast<std::size_t>(n), grid.front());
        if (grid.size() != static_cast<std::size_t>(n)) throw UsageError("--grid: expected 1 or n values");
    }
    Eigen::MatrixXd lattice = Eigen::MatrixXd::Identity(n, n);
    if (!a.lattice.empty()) {
        const auto v = parse_doubles(a.lattice, "--lattice");
        if (v.size() != static_cast<std::size_t>(n * n)) throw UsageError("--lattice: expected n*n values");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) lattice(i, j) = v[static_cast<std::size_t>(i * n + j)];
    }
    const std::string dspec = a.delta.empty() ? a.default_delta : a.delta;
    std::vector<double> delta;
    for (const auto& p : split_list(dspec)) {
        if (p == "0")
            delta.push_back(0.0);
        else if (p == "h")
            delta.push_back(0.5);
        else
            throw UsageError("--delta: entries must be 0 or h, got '" + p + "'");
    }
    if (delta.size() == 1) delta.assign(static_cast<std::size_t>(n), delta.front());
    if (delta.size() != static_cast<std::size_t>(n)) throw UsageError("--delta: expected 1 or n values");
    auto geom = TorusSpinGeometry::make(lattice, delta, grid);
    return {geom, geometry_json(*geom)};
}

struct BumpArgs {
    std::string kind;
    int bandwidth = bump_bandwidth;
    std::uint64_t trial = 0;
};

void add_bump(CLI::App* sub, BumpArgs& b, const std::string& default_kind) {
    b.kind = default_kind;
    sub->add_option("--f", b.kind, "Conformal factor: none | one | cos | random")
        ->check(CLI::IsMember({"none", "one", "cos", "random"}))
        ->capture_default_str();
    sub->add_option("--bandwidth", b.bandwidth, "Mode bound |b_i| of the random factor")->capture_default_str();
    sub->add_option("--trial", b.trial, "Trial index of the random factor's generator")->capture_default_str();
}

/// f on the grid; a random factor is scaled so that |t f| <= 0.3 at t = scale_t.
RealGrid make_bump(const GeometryPtr& g, const BumpArgs& b, std::uint64_t seed, double scale_t, json& config) {
    const auto np = static_cast<Eigen::Index>(g->num_points());
    config["f"] = {{"kind", b.kind}};
    if (b.kind == "none") return RealGrid::Zero(np);
    if (b.kind == "one") return RealGrid::Constant(np, 1.0);
    if (b.kind == "cos") {
        RealGrid f(np);
        for (Eigen::Index p = 0; p < np; ++p)
            f(p) = std::cos(2 * std::numbers::pi * g->fractional(static_cast<std::size_t>(p))(0));
        return f;
    }
    if (b.bandwidth < 0) throw UsageError("--bandwidth must be >= 0");
    config["f"]["bandwidth"] = b.bandwidth;
    config["f"]["trial"] = b.trial;
    config["f"]["scale_t"] = scale_t;
    auto rng = trial_rng(seed, b.trial);
    return random_trig_bump(g, b.bandwidth, scale_t, rng);
}

void add_solver(CLI::App* sub, SolverOptions& o) {
    sub->add_option("--tol", o.tolerance, "Eigenpair residual tolerance")->capture_default_str();
    sub->add_option("--block", o.block_size, "Lanczos block size")->capture_default_str();
    sub->add_option("--max-iter", o.max_iterations, "Lanczos iteration limit")->capture_default_str();
}

json solver_json(const SolverOptions& o) {
    return {{"tolerance", o.tolerance}, {"block_size", o.block_size}, {"max_iterations", o.max_iterations},
            {"seed", o.seed}};
}

json base_config(const std::string& command, std::uint64_t seed) { return {{"command", command}, {"seed", seed}}; }

void write_comment_config(std::ostream& out, const json& config) { out << "# config " << config.dump() << '\n'; }

// subcommands

int cmd_spectrum(std::ostream& out, std::uint64_t seed, const GeometryArgs& ga, const BumpArgs& ba, double t, int m,
                 const SolverOptions& so) {
    auto [geom, gj] = make_geometry(ga);
    json config = base_config("spectrum", seed);
    config["geometry"] = gj;
    config["t"] = t;
    config["solver"] = solver_json(so);
    const RealGrid f = make_bump(geom, ba, seed, t > 0 ? t : 1.0, config);
    const auto rep = eigensolve(ConformalFamily(geom, f, t), m, so);
    write_json_lines(out, rep, config);
    return exit_ok;
}

int cmd_perturb(std::ostream& out, std::uint64_t seed, const GeometryArgs& ga, const BumpArgs& ba, int m, double h,
                const SolverOptions& so) {
    if (!(h > 0)) throw UsageError("--step must be positive");
    auto [geom, gj] = make_geometry(ga);
    json config = base_config("perturb", seed);
    config["geometry"] = gj;
    config["m"] = m;
    config["step"] = h;
    config["solver"] = solver_json(so);
    const RealGrid f = make_bump(geom, ba, seed, 1.0, config);
    config["limit"] = "max(1e-6, 5 step^2 |lambda|)";
    write_comment_config(out, config);
    out << "index,branch,dim,lambda,analytic,fd,abs_diff,limit,overlap,pass\n";
    const auto flat = eigensolve(ConformalFamily::flat(geom), m, so);
    std::set<int> seen;
    bool all_pass = true;
    char line[256];
    for (const auto& e : flat.enumeration) {
        if (!seen.insert(e.cluster).second) continue;
        const auto branches = fd_branch_derivatives(geom, f, e.index, h, so);
        for (std::size_t b = 0; b < branches.size(); ++b) {
            const auto& br = branches[b];
            const double diff = std::abs(br.analytic - br.fd);
            const double limit = std::max(1e-6, 5 * h * h * std::abs(e.lambda));
            const bool pass = diff <= limit;
            all_pass = all_pass && pass;
            std::snprintf(line, sizeof line, "%d,%zu,%d,%.10f,%.10e,%.10e,%.3e,%.3e,%.6f,%d\n", e.index, b, br.dim,
                          e.lambda, br.analytic, br.fd, diff, limit, br.overlap, pass ? 1 : 0);
            out << line;
        }
    }
    return all_pass ? exit_ok : exit_check_failed;
}

int cmd_split(std::ostream& out, std::uint64_t seed, const GeometryArgs& ga, const BumpArgs& ba, int index,
              const std::string& tgrid, bool require_split, const SolverOptions& so) {
    const auto ts = parse_doubles(tgrid, "--t-grid");
    if (ts.empty()) throw UsageError("--t-grid: empty");
    auto [geom, gj] = make_geometry(ga);
    json config = base_config("split", seed);
    config["geometry"] = gj;
    config["index"] = index;
    config["t_grid"] = ts;
    config["require_split"] = require_split;
    config["solver"] = solver_json(so);
    const double tmax = *std::max_element(ts.begin(), ts.end());
    const RealGrid f = make_bump(geom, ba, seed, tmax > 0 ? tmax : 1.0, config);
    const auto rep = split_experiment(geom, f, index, ts, so);
    write_comment_config(out, config);
    write_split_csv(out, rep);
    out << "# split_t " << (rep.split_t ? fmt("%.6g", *rep.split_t) : std::string("none")) << ", final_all_simple "
        << (rep.final_all_simple ? 1 : 0) << ", final_min_gap " << fmt("%.6e", rep.final_min_gap) << '\n';
    return (!require_split || rep.final_all_simple) ? exit_ok : exit_check_failed;
}

int cmd_zeros(std::ostream& out, std::uint64_t seed, const GeometryArgs& ga, const BumpArgs& ba, double t, int index,
              std::optional<double> threshold, const std::string& prescribe, const std::string& save_field,
              bool require_nowhere_zero, const SolverOptions& so) {
    if (index == 0) throw UsageError("--index must be nonzero");
    auto [geom, gj] = make_geometry(ga);
    json config = base_config("zeros", seed);
    config["geometry"] = gj;
    config["t"] = t;
    config["index"] = index;
    config["threshold"] = threshold ? json(*threshold) : json("default");
    config["solver"] = solver_json(so);
    const RealGrid f = make_bump(geom, ba, seed, t > 0 ? t : 1.0, config);
    const auto rep = eigensolve(ConformalFamily(geom, f, t), std::abs(index), so);
    const auto space = rep.eigenspace(index);
    const auto& cl = rep.clusters[static_cast<std::size_t>(space.front()->cluster)];

    std::vector<SpinorField> fields;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < space.size(); ++k) {
        fields.push_back(space[k]->psi);
        labels.push_back("member " + std::to_string(k));
    }
    if (!prescribe.empty()) {
        std::vector<int> idx;
        for (const auto& p : split_list(prescribe)) idx.push_back(static_cast<int>(parse_double(p, "--prescribe-zero")));
        if (idx.size() != static_cast<std::size_t>(geom->dim())) throw UsageError("--prescribe-zero: expected n indices");
        config["prescribe_zero"] = idx;
        fields.push_back(eigenspinor_with_zero(space, geom->ravel(idx)));
        labels.push_back("prescribed");
    }
    if (!save_field.empty()) {
        write_field(fields.back(), save_field);
        config["save_field"] = save_field;
    }

    json doc;
    doc["config"] = config;
    doc["lambda"] = rep.enumeration[static_cast<std::size_t>(index < 0 ? index + rep.m : index + rep.m - 1)].lambda;
    doc["dimC"] = cl.dim;
    doc["simple"] = cl.simplicity == Simplicity::indeterminate ? json(nullptr) : json(cl.simplicity == Simplicity::simple);
    std::size_t total = 0;
    for (std::size_t k = 0; k < fields.size(); ++k) {
        const double thr = threshold ? *threshold : default_zero_threshold(fields[k]);
        const auto zeros = zero_report(fields[k], thr);
        if (labels[k] != "prescribed") total += zeros.size();
        json entry = to_json(zeros, thr);
        entry["field"] = labels[k];
        entry["min_modulus"] = min_modulus(fields[k]).value;
        doc["fields"].push_back(entry);
    }
    doc["eigenspace_zero_count"] = total;
    out << doc.dump(2) << '\n';
    return (!require_nowhere_zero || total == 0) ? exit_ok : exit_check_failed;
}

int cmd_generic(std::ostream& out, std::uint64_t seed, const GeometryArgs& ga, int m, int K, double t0, bool require_all,
                const SolverOptions& so) {
    auto [geom, gj] = make_geometry(ga);
    json config = base_config("generic", seed);
    config["geometry"] = gj;
    config["m"] = m;
    config["K"] = K;
    config["t0"] = t0;
    config["bandwidth"] = bump_bandwidth;
    config["require_all"] = require_all;
    config["solver"] = solver_json(so);
    const auto stats = genericity_trial(geom, m, K, seed, t0, so);
    json doc = to_json(stats);
    doc["config"] = config;
    out << doc.dump(2) << '\n';
    const bool all = stats.solver_failures == 0 && stats.both_count == stats.trials;
    return (!require_all || all) ? exit_ok : exit_check_failed;
}

struct GreenArgs {
    int n = 2;
    double lambda = 1.5;
    std::string kind = "gaussian";
    double a = 2.0;
    std::string center;
    double rho = 1.0;
    double width = 0.5;
    double tol = 1e-7;
    double limit = 1e-5;
    double ode_limit = 1e-8;
};

int cmd_green_check(std::ostream& out, const GreenArgs& a) {
    json config = base_config("green-check", 0);
    config.erase("seed");
    config["n"] = a.n;
    config["lambda"] = a.lambda;
    config["quadrature_tol"] = a.tol;
    config["limit"] = a.limit;
    config["ode_limit"] = a.ode_limit;
    const Spinor sigma0(1.0, 0.0);
    const Spinor sigma1(cplx(0.2, 1.0), 0.3);
    const Spinor gamma(cplx(0.6, -0.2), cplx(0.1, 0.9));
    TestSpinor psi;
    if (a.kind == "gaussian") {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(a.n);
        if (!a.center.empty()) {
            const auto v = parse_doubles(a.center, "--center");
            if (v.size() != static_cast<std::size_t>(a.n)) throw UsageError("--center: expected n values");
            for (int i = 0; i < a.n; ++i) c(i) = v[static_cast<std::size_t>(i)];
        }
        if (!(a.a > 0)) throw UsageError("--a must be positive");
        psi = TestSpinor::gaussian(a.a, c, sigma0, sigma1);
        config["test_spinor"] = {{"kind", "gaussian"}, {"a", a.a}, {"center", std::vector<double>(c.data(), c.data() + c.size())}};
    } else {
        if (!(a.width > 0) || !(a.rho > a.width)) throw UsageError("annulus needs rho > width > 0");
        psi = TestSpinor::annulus(a.n, a.rho, a.width, sigma0, sigma1);
        config["test_spinor"] = {{"kind", "annulus"}, {"rho", a.rho}, {"width", a.width}};
    }
    config["test_spinor"]["sigma0"] = "(1, 0)";
    config["test_spinor"]["sigma1"] = "(0.2+1i, 0.3)";
    config["gamma"] = "(0.6-0.2i, 0.1+0.9i)";
    write_comment_config(out, config);
    out << "check,r,value,limit,pass\n";
    bool all_pass = true;
    char line[160];
    for (double r : {0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        const double res = std::abs(ode_residual(a.n, a.lambda, r));
        const bool pass = res <= a.ode_limit;
        all_pass = all_pass && pass;
        std::snprintf(line, sizeof line, "ode_residual,%g,%.3e,%.1e,%d\n", r, res, a.ode_limit, pass ? 1 : 0);
        out << line;
    }
    const GreenKernel K(a.n, a.lambda);
    const auto chk = verify_distributional_identity(K, psi, gamma, a.tol);
    const bool pass = chk.residual <= a.limit;
    all_pass = all_pass && pass;
    std::snprintf(line, sizeof line, "distributional_identity,,%.3e,%.1e,%d\n", chk.residual, a.limit, pass ? 1 : 0);
    out << line;
    return all_pass ? exit_ok : exit_check_failed;
}

int cmd_identities(std::ostream& out, int n, int max_m) {
    if (max_m < 0) throw UsageError("--max-m must be >= 0");
    json config = base_config("identities", 0);
    config.erase("seed");
    config["n"] = n;
    config["max_m"] = max_m;
    out << config.dump() << '\n';
    std::size_t total = 0, good = 0;
    for (const auto& c : verify_preimage_identities(n, max_m)) {
        ++total;
        good += c.ok() ? 1 : 0;
        json r{{"n", c.n},
               {"grade", to_string(c.grade)},
               {"generator", c.generator},
               {"round_trip", c.round_trip},
               {"zero_remainder", c.zero_remainder},
               {"in_stated_spaces", c.in_stated_spaces},
               {"ok", c.ok()}};
        out << r.dump() << '\n';
    }
    out << json{{"cases", total}, {"passed", good}}.dump() << '\n';
    return good == total ? exit_ok : exit_check_failed;
}

int cmd_ahat(std::ostream& out, int k, int d) {
    json config = base_config("ahat", 0);
    config.erase("seed");
    config["k"] = k;
    config["d"] = d;
    write_comment_config(out, config);
    out << a_hat_complete_intersection(k, d) << '\n';
    return exit_ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dirac spectra, Green kernels and eigenspinor zero sets on flat tori"};
    app.name("spinzero");
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value defaults file ([subcommand] sections); flags override");
    app.allow_config_extras(CLI::config_extras_mode::error);
    std::string output;
    app.add_option("-o,--output", output, "Write results to this file instead of standard output");

    std::uint64_t seed = default_master_seed;
    SolverOptions so;
    GeometryArgs g_spec, g_pert, g_split, g_zero, g_gen;
    g_split.default_delta = g_zero.default_delta = g_gen.default_delta = "h";
    BumpArgs b_spec, b_pert, b_split, b_zero;
    double t = 0.0;
    int m = 2;
    int index = 1;
    double step = 1e-3;
    std::string tgrid = "0,0.05,0.1,0.15,0.2";
    bool require = false;
    std::optional<double> threshold;
    std::string prescribe, save_field;
    int K = 20;
    double t0 = 0.1;
    GreenArgs gr;
    int k = 1, d = 4;
    int ident_n = 2, max_m = 3;

    auto seed_opt = [&](CLI::App* s) { s->add_option("--seed", seed, "64-bit master seed")->capture_default_str(); };

    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues nearest zero as JSON lines");
    add_geometry(spectrum, g_spec);
    add_bump(spectrum, b_spec, "none");
    add_solver(spectrum, so);
    seed_opt(spectrum);
    spectrum->add_option("-t", t, "Conformal parameter of g_t = (1 + t f) g")->capture_default_str();
    spectrum->add_option("-m", m, "Number of eigenvalues on each side of zero")->check(CLI::PositiveNumber)->capture_default_str();

    auto* perturb = app.add_subcommand("perturb", "Analytic eigenvalue derivatives against central differences (CSV)");
    add_geometry(perturb, g_pert);
    add_bump(perturb, b_pert, "random");
    add_solver(perturb, so);
    seed_opt(perturb);
    perturb->add_option("-m", m, "Eigenvalues on each side of zero")->check(CLI::PositiveNumber)->capture_default_str();
    perturb->add_option("--step", step, "Finite-difference step h")->capture_default_str();

    auto* split = app.add_subcommand("split", "Track a multiple eigenvalue along a t grid (CSV)");
    add_geometry(split, g_split);
    add_bump(split, b_split, "random");
    add_solver(split, so);
    seed_opt(split);
    split->add_option("--index", index, "Enumeration position of the multiple eigenvalue")->capture_default_str();
    split->add_option("--t-grid", tgrid, "Increasing comma list of t values")->capture_default_str();
    split->add_flag("--require-split", require, "Exit 1 unless every tracked eigenvalue is simple at the last t");

    auto* zeros = app.add_subcommand("zeros", "Zero reports for the eigenspinors of one eigenvalue (JSON)");
    add_geometry(zeros, g_zero);
    add_bump(zeros, b_zero, "none");
    add_solver(zeros, so);
    seed_opt(zeros);
    zeros->add_option("-t", t, "Conformal parameter")->capture_default_str();
    zeros->add_option("--index", index, "Enumeration position (nonzero)")->capture_default_str();
    zeros->add_option("--threshold", threshold, "Zero threshold on the refined |psi| (default: scaled Lipschitz bound)");
    zeros->add_option("--prescribe-zero", prescribe, "Grid multi-index where an eigenspace member is forced to vanish");
    zeros->add_option("--save-field", save_field, "Write the last reported field as a binary field file");
    zeros->add_flag("--require-nowhere-zero", require, "Exit 1 if an eigenspace member has a zero candidate");

    auto* generic = app.add_subcommand("generic", "Genericity statistics over seeded conformal factors (JSON)");
    add_geometry(generic, g_gen);
    add_solver(generic, so);
    seed_opt(generic);
    generic->add_option("-m", m, "Eigenvalues on each side of zero")->check(CLI::PositiveNumber)->capture_default_str();
    generic->add_option("-K,--trials", K, "Number of trials")->check(CLI::NonNegativeNumber)->capture_default_str();
    generic->add_option("--t0", t0, "Conformal parameter of every trial")->capture_default_str();
    generic->add_flag("--require-all", require, "Exit 1 unless every trial is simple and nowhere zero");

    auto* green = app.add_subcommand("green-check", "Green kernel ODE residuals and the distributional identity");
    green->add_option("-n,--dim", gr.n, "Dimension")->check(CLI::IsMember({2, 3}))->capture_default_str();
    green->add_option("--lambda", gr.lambda, "Spectral parameter")->capture_default_str();
    green->add_option("--kind", gr.kind, "Test spinor: gaussian | annulus")
        ->check(CLI::IsMember({"gaussian", "annulus"}))
        ->capture_default_str();
    green->add_option("--a", gr.a, "Gaussian decay rate")->capture_default_str();
    green->add_option("--center", gr.center, "Gaussian centre, comma list (default origin)");
    green->add_option("--rho", gr.rho, "Annulus radius")->capture_default_str();
    green->add_option("--width", gr.width, "Annulus half width")->capture_default_str();
    green->add_option("--tol", gr.tol, "Quadrature refinement tolerance")->capture_default_str();
    green->add_option("--limit", gr.limit, "Pass limit for the identity residual")->capture_default_str();
    green->add_option("--ode-limit", gr.ode_limit, "Pass limit for ODE residuals")->capture_default_str();

    auto* ident = app.add_subcommand("identities", "Exact Dirac preimage round trips (JSON lines)");
    ident->add_option("-n,--dim", ident_n, "Dimension")->check(CLI::IsMember({2, 3}))->capture_default_str();
    ident->add_option("--max-m", max_m, "Largest polynomial degree m")->capture_default_str();

    auto* ahat = app.add_subcommand("ahat", "A-hat genus of the complete intersection V^{2k}(d)");
    ahat->add_option("-k", k, "Half dimension")->required();
    ahat->add_option("-d", d, "Degree")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_usage;
    }

    std::ostringstream buf;
    int code = exit_ok;
    try {
        if (*spectrum)
            code = cmd_spectrum(buf, seed, g_spec, b_spec, t, m, so);
        else if (*perturb)
            code = cmd_perturb(buf, seed, g_pert, b_pert, m, step, so);
        else if (*split)
            code = cmd_split(buf, seed, g_split, b_split, index, tgrid, require, so);
        else if (*zeros)
            code = cmd_zeros(buf, seed, g_zero, b_zero, t, index, threshold, prescribe, save_field, require, so);
        else if (*generic)
            code = cmd_generic(buf, seed, g_gen, m, K, t0, require, so);
        else if (*green)
            code = cmd_green_check(buf, gr);
        else if (*ident)
            code = cmd_identities(buf, ident_n, max_m);
        else if (*ahat)
            code = cmd_ahat(buf, k, d);
    } catch (const UsageError& e) {
        err << "spinzero: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "spinzero: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::domain_error& e) {
        err << "spinzero: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::out_of_range& e) {
        err << "spinzero: " << e.what() << '\n';
        return exit_usage;
    } catch (const SolverFailure& e) {
        out << buf.str();
        out << json{{"error", "solver_failure"}, {"message", e.what()}, {"residuals", e.residuals()}}.dump() << '\n';
        return exit_check_failed;
    } catch (const std::exception& e) {
        out << buf.str();
        out << json{{"error", "check_failed"}, {"message", e.what()}}.dump() << '\n';
        return exit_check_failed;
    }

    if (output.empty()) {
        out << buf.str();
    } else {
        std::ofstream f(output, std::ios::binary);
        f << buf.str();
        if (!f) {
            err << "spinzero: cannot write " << output << '\n';
            return exit_usage;
        }
    }
    return code;
}

}  // namespace spinzero::cli

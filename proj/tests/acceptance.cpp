// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "spinzero/green.hpp"
#include "spinzero/perturb.hpp"
#include "spinzero/radial_calculus.hpp"
#include "spinzero/zeroset.hpp"

using namespace spinzero;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double time_limit;  // seconds, 0 = none
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

GeometryPtr square(std::vector<double> delta, int N = 64) { return TorusSpinGeometry::unit(2, std::move(delta), {N, N}); }

Outcome clifford_suite() {
    bool ok = true;
    for (int n : {2, 3}) {
        const auto F = SpinorFiber::make(n);
        const SpinorMatrix I = SpinorMatrix::Identity();
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                ok = ok && SpinorMatrix(F.gamma(i) * F.gamma(j) + F.gamma(j) * F.gamma(i)) == SpinorMatrix((i == j ? -2.0 : 0.0) * I);
            ok = ok && SpinorMatrix(F.gamma(i).adjoint()) == SpinorMatrix(-F.gamma(i));
            ok = ok && SpinorMatrix(F.j_matrix() * F.gamma(i).conjugate()) == SpinorMatrix(F.gamma(i) * F.j_matrix());
        }
        ok = ok && SpinorMatrix(F.j_matrix() * F.j_matrix().conjugate()) == SpinorMatrix(-I);
        if (n == 3) {
            const SpinorMatrix v = F.volume_element();
            ok = ok && v(0, 1) == 0.0 && v(1, 0) == 0.0 && v(0, 0) == v(1, 1);
        }
    }
    return {ok, "anticommutation, skew-adjointness, J^2 = -Id, J gamma = gamma J, scalar volume element"};
}

Outcome preimage_identities() {
    std::size_t total = 0, good = 0;
    std::string first_bad;
    for (int n : {2, 3})
        for (const auto& c : verify_preimage_identities(n, 3)) {
            ++total;
            if (c.ok())
                ++good;
            else if (first_bad.empty())
                first_bad = "n=" + std::to_string(n) + " " + to_string(c.grade) + " " + c.generator;
        }
    return {total > 0 && good == total,
            std::to_string(good) + "/" + std::to_string(total) + " generators exact" +
                (first_bad.empty() ? "" : ", first failure " + first_bad)};
}

Outcome green_ode() {
    double worst = 0;
    for (int n : {2, 3})
        for (double lambda : {0.0, 0.5, 1.0, 3.0})
            for (double r : {0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) worst = std::max(worst, std::abs(ode_residual(n, lambda, r)));
    return {worst <= 1e-8, "max |residual| = " + fmt("%.3e", worst) + " (limit 1e-8)"};
}

Outcome distributional_identity() {
    double worst_gauss = 0, worst_annulus = 0;
    const Spinor gamma(cplx(0.6, -0.2), cplx(0.1, 0.9));
    for (int n : {2, 3})
        for (double lambda : {0.0, 1.5}) {
            const GreenKernel K(n, lambda);
            const Eigen::VectorXd c0 = Eigen::VectorXd::Zero(n);
            Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n);
            c1(0) = 0.3;
            c1(1) = -0.2;
            const std::vector<TestSpinor> bumps{
                TestSpinor::gaussian(2.0, c0, Spinor(1.0, 0.0), Spinor::Zero()),
                TestSpinor::gaussian(3.0, c0, Spinor::Zero(), Spinor(cplx(0.2, 1.0), 0.3)),
                TestSpinor::gaussian(1.5, c1, Spinor(cplx(0.5, 0.5), -1.0), Spinor(0.0, cplx(0.0, 0.7))),
            };
            for (const auto& psi : bumps) {
                const auto chk = verify_distributional_identity(K, psi, gamma, 1e-7);
                worst_gauss = std::max(worst_gauss, chk.residual);
            }
            const auto ann = TestSpinor::annulus(n, 1.0, 0.5, Spinor(1.0, 0.0), Spinor(0.0, 1.0));
            worst_annulus = std::max(worst_annulus, verify_distributional_identity(K, ann, gamma, 1e-9).residual);
        }
    return {worst_gauss <= 1e-5 && worst_annulus <= 1e-8,
            "Gaussian max residual " + fmt("%.3e", worst_gauss) + " (limit 1e-5), annulus max residual " +
                fmt("%.3e", worst_annulus) + " (limit 1e-8)"};
}

Outcome expansion_ratios() {
    bool ok = true;
    std::string detail;
    const Spinor gamma(1.0, 0.0);
    for (int n : {2, 3}) {
        const GreenKernel K(n, 1.0);
        std::vector<double> q;
        for (int j = 3; j <= 10; ++j) {
            const double r = std::ldexp(1.0, -j);
            std::vector<double> x = n == 2 ? std::vector<double>{0.6 * r, 0.8 * r} : std::vector<double>{0.48 * r, 0.6 * r, 0.64 * r};
            const double rem = K.expansion_remainder(x, gamma).norm();
            q.push_back(n == 3 ? rem : rem / (r * std::abs(std::log(r))));
        }
        bool finite = true;
        for (double v : q) finite = finite && std::isfinite(v);
        const double last = q.back(), prev = q[q.size() - 2];
        const double change = std::abs(last - prev) / std::abs(last);
        ok = ok && finite && change <= 0.2;
        detail += (detail.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + " constant " + fmt("%.6g", last) +
                  " (last-step change " + fmt("%.2f%%", 100 * change) + ")";
    }
    return {ok, detail};
}

Outcome flat_spectrum() {
    const int m = 4;
    const std::vector<std::vector<double>> deltas{{0, 0}, {0.5, 0}, {0, 0.5}, {0.5, 0.5}};
    const std::vector<int> kernels{2, 0, 0, 0};
    double worst = 0;
    bool kernel_ok = true;
    double lambda1 = 0;
    for (std::size_t s = 0; s < deltas.size(); ++s) {
        const auto g = square(deltas[s]);
        const auto rep = eigensolve(ConformalFamily::flat(g), m);
        kernel_ok = kernel_ok && rep.kernel_dim == kernels[s];
        // closed form: sorted mode norms, each eigenvalue repeated dimC / 2 times
        std::vector<double> norms;
        for (int b0 = -5; b0 <= 5; ++b0)
            for (int b1 = -5; b1 <= 5; ++b1) {
                const double r = std::hypot(b0 + deltas[s][0], b1 + deltas[s][1]);
                if (r > 0) norms.push_back(2 * pi * r);
            }
        std::sort(norms.begin(), norms.end());
        for (const auto& e : rep.enumeration) {
            const double ref = norms[static_cast<std::size_t>(2 * (std::abs(e.index) - 1) + 1)];
            worst = std::max(worst, std::abs(e.lambda - (e.index > 0 ? ref : -ref)));
        }
        if (s == 3) lambda1 = rep.enumeration[static_cast<std::size_t>(m)].lambda;
    }
    const double l1err = std::abs(lambda1 - pi * std::sqrt(2.0));
    return {worst <= 1e-8 && kernel_ok && l1err <= 1e-8,
            "64^2 grid, m=4: max |lambda - 2 pi |b+delta|| = " + fmt("%.3e", worst) + ", kernel dims " +
                (kernel_ok ? "(2,0,0,0)" : "WRONG") + ", |lambda_1 - pi sqrt 2| = " + fmt("%.3e", l1err)};
}

Outcome lichnerowicz() {
    double worst = 0;
    const auto g = square({0.5, 0.5});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto psi = band_limited_field(g, 3, seed);
        psi *= 1.0 / l2_norm(psi);
        worst = std::max(worst, l2_norm(dirac_flat(dirac_flat(psi)) - neg_laplacian(psi)));
    }
    return {worst <= 1e-10, "10 unit-norm fields: max ||D^2 psi - 4 pi^2 |k|^2 psi|| = " + fmt("%.3e", worst) + " (limit 1e-10)"};
}

Outcome perturbation_formula() {
    const double h = 1e-3;
    const auto g = square({0.5, 0.0});
    const auto flat = eigensolve(ConformalFamily::flat(g), 1);
    const auto& pair = *flat.eigenspace(1).front();
    const double bound = std::max(1e-6, 5 * h * h * std::abs(pair.lambda));
    double worst = 0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto rng = trial_rng(default_master_seed, 100 + s);
        const RealGrid f = random_trig_bump(g, bump_bandwidth, 1.0, rng);
        worst = std::max(worst, std::abs(eigenvalue_derivative(f, pair) - fd_derivative(g, f, 1, h)));
    }
    const RealGrid one = RealGrid::Constant(static_cast<Eigen::Index>(g->num_points()), 1.0);
    const double hom = std::abs(fd_derivative(g, one, 1, h) + pair.lambda / 2);
    const auto g2 = square({0.5, 0.5});
    const auto br = fd_branch_derivatives(g2, RealGrid::Constant(static_cast<Eigen::Index>(g2->num_points()), 1.0), 1, h);
    const double hom2 = br.size() == 1 ? std::abs(br[0].fd + pi * std::sqrt(2.0) / 2) : 1.0;
    // sign property on nonnegative f
    bool sign_ok = true;
    const auto rep = eigensolve(ConformalFamily::flat(g), 3);
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto rng = trial_rng(default_master_seed, 200 + s);
        RealGrid f = random_trig_bump(g, bump_bandwidth, 1.0, rng);
        f.array() -= f.minCoeff();
        for (const auto& p : rep.pairs)
            if (p.lambda > 0) sign_ok = sign_ok && eigenvalue_derivative(f, p) < 0;
    }
    return {worst <= bound && hom <= 1e-4 && hom2 <= 1e-4 && sign_ok,
            "5 seeded f: max |analytic - FD| = " + fmt("%.3e", worst) + " (limit " + fmt("%.3e", bound) +
                "), homothety errors " + fmt("%.3e", hom) + " / " + fmt("%.3e", hom2) + " (limit 1e-4), sign " +
                (sign_ok ? "ok" : "VIOLATED")};
}

Outcome splitting() {
    const auto g = square({0.5, 0.5});
    auto rng = trial_rng(default_master_seed, 0);
    const RealGrid f = random_trig_bump(g, bump_bandwidth, 0.2, rng);
    const auto rep = split_experiment(g, f, 1, {0.0, 0.05, 0.1, 0.15, 0.2});
    return {rep.final_all_simple && rep.final_min_gap > 1e-4,
            "seed " + std::to_string(default_master_seed) + ": at t=0.2 all simple = " +
                (rep.final_all_simple ? "yes" : "no") + ", min gap " + fmt("%.4e", rep.final_min_gap) + " (limit 1e-4)"};
}

Outcome zero_pipeline() {
    // two-wave field: zero set is the diagonal u1 = u2
    const auto g0 = square({0.0, 0.0});
    auto two = two_wave_spinor(g0, std::vector<int>{1, 0}, std::vector<int>{0, 1}, Spinor(1.0, 0.0));
    two *= 1.0 / l2_norm(two);
    const auto zeros = zero_report(two);
    bool localized = !zeros.empty();
    for (const auto& z : zeros) {
        const double d = z.minimum.fractional(0) - z.minimum.fractional(1);
        localized = localized && std::abs(d - std::round(d)) <= 1.0 / 64;
    }
    // eigenspinor with a prescribed zero at a grid point
    const auto g = square({0.5, 0.5});
    const auto flat = eigensolve(ConformalFamily::flat(g), 1);
    const std::size_t p = g->ravel(std::vector<int>{21, 40});
    const auto psi = eigenspinor_with_zero(flat.eigenspace(1), p);
    bool found = false;
    for (const auto& z : zero_report(psi)) {
        const Eigen::VectorXd d = z.minimum.fractional - g->fractional(p);
        found = found || (d.array() - d.array().round()).abs().maxCoeff() <= 1.0 / 64;
    }
    const auto stats = genericity_trial(g, 2, 20, default_master_seed, 0.1);
    const bool gen_ok = stats.trials == 20 && stats.solver_failures == 0 && stats.all_simple_count == 20 &&
                        stats.all_nowhere_zero_count == 20;
    double min_mod = 1e300;
    for (const auto& t : stats.per_trial)
        if (!t.solver_failure) min_mod = std::min(min_mod, t.min_modulus);
    std::ostringstream os;
    os << "two-wave zeros within one cell: " << (localized ? "yes" : "no") << " (" << zeros.size()
       << " candidates), prescribed eigenspinor zero found: " << (found ? "yes" : "no") << "; genericity seed "
       << default_master_seed << ": failures " << stats.solver_failures << ", all_simple " << stats.all_simple_count
       << "/20, nowhere_zero " << stats.all_nowhere_zero_count << "/20, smallest |psi| " << fmt("%.3e", min_mod);
    return {localized && found && gen_ok, os.str()};
}

Outcome formula_ops() {
    const bool ph = poincare_hopf_budget(1) == 0 && poincare_hopf_budget(2) == 1 && poincare_hopf_budget(0) == -1;
    const bool ah = a_hat_complete_intersection(1, 2) == 0 && a_hat_complete_intersection(1, 4) == 2 &&
                    a_hat_complete_intersection(1, 6) == 8;
    return {ph && ah, std::string("budget(1,2,0) = (0,1,-1) ") + (ph ? "ok" : "WRONG") + ", A-hat(1,{2,4,6}) = (0,2,8) " +
                          (ah ? "ok" : "WRONG")};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "Clifford/J suite", 1.0, clifford_suite},
        {2, "exact Dirac preimage identities, m <= 3", 30.0, preimage_identities},
        {3, "Green ODE residual", 0.0, green_ode},
        {4, "distributional identity", 120.0, distributional_identity},
        {5, "singular expansion dyadic ratios", 0.0, expansion_ratios},
        {6, "flat-torus spectrum", 0.0, flat_spectrum},
        {7, "Schroedinger-Lichnerowicz flat check", 0.0, lichnerowicz},
        {8, "conformal perturbation formula", 0.0, perturbation_formula},
        {9, "multiplicity splitting", 0.0, splitting},
        {10, "zero-set pipeline", 600.0, zero_pipeline},
        {11, "formula operations", 0.0, formula_ops},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.time_limit == 0.0 || secs < c.time_limit;
        const bool pass = out.pass && in_time;
        failures += !pass;
        std::printf("[%s] %2d %s: %s; %.2f s%s\n", pass ? "PASS" : "FAIL", c.id, c.title, out.detail.c_str(), secs,
                    c.time_limit > 0 ? (in_time ? fmt(" (limit %.0f s)", c.time_limit).c_str() : " (OVER TIME LIMIT)") : "");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}

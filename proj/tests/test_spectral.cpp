#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spinzero/spectral.hpp"
#include "spinzero/zeroset.hpp"

using namespace spinzero;

namespace {

constexpr double pi = std::numbers::pi;

// Oracle: lambda_1..lambda_m of the flat torus from the mode norms. Each mode
// contributes one complex dimension to +2 pi |kappa| and one to -2 pi |kappa|.
std::vector<double> flat_positive(const TorusSpinGeometry& g, int m) {
    std::vector<double> norms;
    const int box = 6;
    const int n = g.dim();
    std::vector<int> b(static_cast<std::size_t>(n), -box);
    while (true) {
        Eigen::VectorXd k(n);
        for (int i = 0; i < n; ++i) k(i) = b[static_cast<std::size_t>(i)] + g.delta()[static_cast<std::size_t>(i)];
        const double r = (g.dual() * k).norm();
        if (r > 0) norms.push_back(2 * pi * r);
        int i = 0;
        while (i < n && ++b[static_cast<std::size_t>(i)] > box) b[static_cast<std::size_t>(i++)] = -box;
        if (i == n) break;
    }
    std::sort(norms.begin(), norms.end());
    std::vector<double> out;
    for (int j = 0; j < m; ++j) out.push_back(norms[static_cast<std::size_t>(2 * j + 1)]);
    return out;
}

// Oracle: dense Hermitian matrix of the discrete operator, built column by column.
Eigen::VectorXd dense_spectrum(const ConformalFamily& fam) {
    const auto npts = static_cast<Eigen::Index>(fam.geometry()->num_points());
    Eigen::MatrixXcd A(2 * npts, 2 * npts);
    for (Eigen::Index c = 0; c < 2 * npts; ++c) {
        SpinorField e(fam.geometry());
        e.values()(c) = 1.0;
        A.col(c) = dirac_conformal(fam, e).values();
    }
    CHECK((A - A.adjoint()).norm() < 1e-10 * A.norm());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(A, Eigen::EigenvaluesOnly).eigenvalues();
}

void check_pair_invariants(const ConformalFamily& fam, const SpectrumReport& rep) {
    for (const auto& p : rep.pairs) {
        CHECK(std::abs(l2_norm(p.psi) - 1.0) <= 1e-10);
        CHECK(p.residual <= 1e-8);
        const double r = l2_norm(dirac_conformal(fam, p.psi) - cplx(p.lambda) * p.psi);
        CHECK(r <= 1e-7);
        const auto Jpsi = apply_j(p.psi);
        CHECK(l2_norm(dirac_conformal(fam, Jpsi) - cplx(p.lambda) * Jpsi) <= 1e-7);
        CHECK(std::abs(l2_inner(p.psi, Jpsi)) <= 1e-8);
    }
}

}  // namespace

TEST_CASE("flat square torus, all four spin structures") {
    const int m = 4;
    const std::vector<std::vector<double>> deltas{{0, 0}, {0.5, 0}, {0, 0.5}, {0.5, 0.5}};
    const std::vector<int> kernel{2, 0, 0, 0};
    for (std::size_t s = 0; s < deltas.size(); ++s) {
        const auto g = TorusSpinGeometry::unit(2, deltas[s], {32, 32});
        const auto fam = ConformalFamily::flat(g);
        const auto rep = eigensolve(fam, m);
        CHECK(rep.kernel_dim == kernel[s]);
        const auto expect = flat_positive(*g, m);
        REQUIRE(rep.enumeration.size() == static_cast<std::size_t>(2 * m));
        for (int j = 0; j < m; ++j) {
            CHECK(std::abs(rep.enumeration[static_cast<std::size_t>(m + j)].lambda - expect[static_cast<std::size_t>(j)]) <= 1e-8);
            CHECK(std::abs(rep.enumeration[static_cast<std::size_t>(m - 1 - j)].lambda + expect[static_cast<std::size_t>(j)]) <= 1e-8);
            CHECK(rep.enumeration[static_cast<std::size_t>(m + j)].index == j + 1);
            CHECK(rep.enumeration[static_cast<std::size_t>(m - 1 - j)].index == -(j + 1));
        }
        for (const auto& c : rep.clusters) CHECK(c.dim % 2 == 0);
        check_pair_invariants(fam, rep);
        // squares of the eigenvalues are values of the Laplace multiplier
        for (const auto& p : rep.pairs) {
            const auto lap = neg_laplacian(p.psi);
            CHECK(l2_norm(lap - cplx(p.lambda * p.lambda) * p.psi) <= 1e-6 * p.lambda * p.lambda);
        }
    }
    const auto rep = eigensolve(ConformalFamily::flat(TorusSpinGeometry::unit(2, {0.5, 0.5}, {32, 32})), 1);
    CHECK(std::abs(rep.enumeration[1].lambda - pi * std::sqrt(2.0)) <= 1e-8);
}

TEST_CASE("simplicity by mode counting") {
    {
        const auto rep = eigensolve(ConformalFamily::flat(TorusSpinGeometry::unit(2, {0.5, 0.0}, {16, 16})), 1);
        const auto flags = check_simple(rep);
        CHECK(flags[1] == Simplicity::simple);
        CHECK(rep.cluster_of(rep.enumeration[1]).dim == 2);
        CHECK(rep.eigenspace(1).size() == 2);
    }
    {
        const auto rep = eigensolve(ConformalFamily::flat(TorusSpinGeometry::unit(2, {0.5, 0.5}, {16, 16})), 2);
        const auto flags = check_simple(rep);
        for (auto f : flags) CHECK(f == Simplicity::multiple);
        CHECK(rep.cluster_of(rep.enumeration[2]).dim == 4);
        // both enumeration slots of the dim-4 cluster point at the same cluster
        CHECK(rep.enumeration[2].cluster == rep.enumeration[3].cluster);
        CHECK_THROWS_AS(rep.eigenspace(0), std::out_of_range);
    }
    CHECK(std::string(to_string(Simplicity::indeterminate)) == "indeterminate");
}

TEST_CASE("homothety halves the spectrum") {
    const auto g = TorusSpinGeometry::unit(2, {0.5, 0.0}, {16, 16});
    const auto flat = eigensolve(ConformalFamily::flat(g), 3);
    const ConformalFamily fam(g, RealGrid::Constant(static_cast<Eigen::Index>(g->num_points()), 3.0), 1.0);
    const auto rep = eigensolve(fam, 3);
    for (std::size_t i = 0; i < rep.enumeration.size(); ++i)
        CHECK(std::abs(rep.enumeration[i].lambda - 0.5 * flat.enumeration[i].lambda) <= 1e-8);
}

TEST_CASE("perturbed spectrum against dense diagonalization") {
    for (const auto& delta : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.0, 0.0}}) {
        const auto g = TorusSpinGeometry::unit(2, delta, {8, 8});
        auto rng = trial_rng(99, 0);
        const ConformalFamily fam(g, random_trig_bump(g, 2, 0.3, rng), 0.3);
        const Eigen::VectorXd all = dense_spectrum(fam);
        const auto rep = eigensolve(fam, 3);
        std::vector<double> pos, neg;
        int zeros = 0;
        for (Eigen::Index i = 0; i < all.size(); ++i) {
            if (std::abs(all(i)) < 1e-9)
                ++zeros;
            else if (all(i) > 0)
                pos.push_back(all(i));
            else
                neg.push_back(all(i));
        }
        CHECK(zeros == rep.kernel_dim);
        std::sort(pos.begin(), pos.end());
        std::sort(neg.begin(), neg.end(), std::greater<>());
        for (const auto& e : rep.enumeration) {
            // dense eigenvalues repeat with the full complex multiplicity
            const std::size_t slot = 2 * static_cast<std::size_t>(std::abs(e.index) - 1);
            const double ref = e.index > 0 ? pos[slot] : neg[slot];
            CHECK(std::abs(e.lambda - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
        }
        check_pair_invariants(fam, rep);
    }
}

TEST_CASE("kernel dimension is conformally invariant") {
    auto rng = trial_rng(5, 1);
    {
        const auto g = TorusSpinGeometry::unit(2, {0.0, 0.0}, {16, 16});
        double res = 1.0;
        CHECK(kernel_dim(ConformalFamily(g, random_trig_bump(g, 3, 0.5, rng), 0.5), &res) == 2);
        CHECK(res <= 1e-9);
    }
    CHECK(kernel_dim(ConformalFamily::flat(TorusSpinGeometry::unit(2, {0.0, 0.5}, {16, 16}))) == 0);
    CHECK(kernel_dim(ConformalFamily::flat(TorusSpinGeometry::unit(3, {0.5, 0.5, 0.5}, {8, 8, 8}))) == 0);
    CHECK(kernel_dim(ConformalFamily::flat(TorusSpinGeometry::unit(3, {0.0, 0.0, 0.0}, {8, 8, 8}))) == 2);
}

TEST_CASE("three-dimensional flat torus") {
    const auto g = TorusSpinGeometry::unit(3, {0.5, 0.5, 0.5}, {8, 8, 8});
    const auto rep = eigensolve(ConformalFamily::flat(g), 2);
    const auto expect = flat_positive(*g, 2);
    CHECK(std::abs(rep.enumeration[2].lambda - expect[0]) <= 1e-8);
    CHECK(std::abs(rep.enumeration[3].lambda - expect[1]) <= 1e-8);
    CHECK(rep.enumeration[2].lambda == doctest::Approx(pi * std::sqrt(3.0)).epsilon(1e-10));
    CHECK(rep.cluster_of(rep.enumeration[2]).dim == 8);
}

TEST_CASE("argument checks and determinism") {
    const auto g = TorusSpinGeometry::unit(2, {0.5, 0.5}, {16, 16});
    CHECK_THROWS_AS(eigensolve(ConformalFamily::flat(g), 0), std::invalid_argument);
    auto rng = trial_rng(3, 3);
    const ConformalFamily fam(g, random_trig_bump(g, 3, 0.2, rng), 0.2);
    const auto a = eigensolve(fam, 2);
    const auto b = eigensolve(fam, 2);
    std::ostringstream sa, sb;
    write_json_lines(sa, a, {{"case", "determinism"}});
    write_json_lines(sb, b, {{"case", "determinism"}});
    CHECK(sa.str() == sb.str());
}

TEST_CASE("JSON lines records") {
    const auto g = TorusSpinGeometry::unit(2, {0.0, 0.0}, {16, 16});
    const auto rep = eigensolve(ConformalFamily::flat(g), 1);
    std::ostringstream os;
    write_json_lines(os, rep, {{"command", "spectrum"}});
    std::istringstream is(os.str());
    std::string line;
    std::vector<nlohmann::json> recs;
    while (std::getline(is, line)) recs.push_back(nlohmann::json::parse(line));
    REQUIRE(recs.size() == 4);
    CHECK(recs[0]["command"] == "spectrum");
    CHECK(recs[0]["kernel_dim"] == 2);
    CHECK(recs[1]["index"] == 0);
    CHECK(recs[1]["dimC"] == 2);
    CHECK(recs[2]["index"] == -1);
    CHECK(recs[3]["index"] == 1);
    CHECK(recs[3]["lambda"].get<double>() == doctest::Approx(2 * pi).epsilon(1e-11));
    CHECK(recs[3]["dimC"] == 4);
    CHECK(recs[3]["simple"] == false);
}

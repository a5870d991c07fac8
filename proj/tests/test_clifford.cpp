#include <doctest.h>

#include <random>

#include "spinzero/clifford.hpp"

using namespace spinzero;

namespace {

Spinor random_spinor(std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    return Spinor(cplx(N(rng), N(rng)), cplx(N(rng), N(rng)));
}

std::vector<double> random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = N(rng);
    return x;
}

}  // namespace

TEST_CASE("make rejects unsupported dimensions") {
    CHECK_THROWS_AS(SpinorFiber::make(1), std::invalid_argument);
    CHECK_THROWS_AS(SpinorFiber::make(4), std::invalid_argument);
}

TEST_CASE("Clifford relations hold exactly") {
    for (int n : {2, 3}) {
        const auto F = SpinorFiber::make(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const SpinorMatrix ac = F.gamma(i) * F.gamma(j) + F.gamma(j) * F.gamma(i);
                const SpinorMatrix expect = (i == j ? -2.0 : 0.0) * SpinorMatrix::Identity();
                CHECK(ac == expect);
            }
        for (int i = 0; i < n; ++i) CHECK(SpinorMatrix(F.gamma(i).adjoint()) == SpinorMatrix(-F.gamma(i)));
    }
}

TEST_CASE("J squares to -Id and commutes with Clifford multiplication") {
    for (int n : {2, 3}) {
        const auto F = SpinorFiber::make(n);
        const SpinorMatrix& C = F.j_matrix();
        // J^2 phi = C conj(C conj(phi)) = C conj(C) phi
        CHECK(SpinorMatrix(C * C.conjugate()) == SpinorMatrix(-SpinorMatrix::Identity()));
        for (int i = 0; i < n; ++i) CHECK(SpinorMatrix(C * F.gamma(i).conjugate()) == SpinorMatrix(F.gamma(i) * C));
    }
    const auto F = SpinorFiber::make(2);
    const Spinor e1(1.0, 0.0);
    CHECK(F.quaternionic(F.quaternionic(e1)) == Spinor(-e1));
}

TEST_CASE("J matrix agrees with the solution of its defining constraints") {
    // Oracle: C conj(gamma_i) = gamma_i C is linear in the 4 entries of C; its
    // solution space is one-dimensional, and C conj(C) = -Id fixes the scale up to a phase.
    const auto F = SpinorFiber::make(3);
    Eigen::Matrix<cplx, 12, 4> A = Eigen::Matrix<cplx, 12, 4>::Zero();
    for (int i = 0; i < 3; ++i) {
        const SpinorMatrix gc = F.gamma(i).conjugate();
        const SpinorMatrix& g = F.gamma(i);
        for (int e = 0; e < 4; ++e) {
            SpinorMatrix E = SpinorMatrix::Zero();
            E(e / 2, e % 2) = 1.0;
            const SpinorMatrix r = E * gc - g * E;
            for (int q = 0; q < 4; ++q) A(4 * i + q, e) = r(q / 2, q % 2);
        }
    }
    Eigen::JacobiSVD<Eigen::Matrix<cplx, 12, 4>> svd(A, Eigen::ComputeFullV);
    CHECK(svd.singularValues()(2) > 0.5);
    CHECK(svd.singularValues()(3) < 1e-14);
    const Eigen::Vector4cd v = svd.matrixV().col(3);
    SpinorMatrix C;
    C << v(0), v(1), v(2), v(3);
    const SpinorMatrix sq = C * C.conjugate();
    CHECK(sq(0, 0).real() < 0.0);
    C /= std::sqrt(-sq(0, 0).real());
    // align the phase with the frozen matrix and compare
    const cplx phase = (F.j_matrix().cwiseProduct(C.conjugate())).sum();
    C *= phase / std::abs(phase);
    CHECK((C - F.j_matrix()).norm() < 1e-14);
}

TEST_CASE("documented examples for the fiber") {
    const auto F2 = SpinorFiber::make(2);
    CHECK(SpinorMatrix(F2.gamma(0) * F2.gamma(0)) == SpinorMatrix(-SpinorMatrix::Identity()));
    const auto F3 = SpinorFiber::make(3);
    CHECK(SpinorMatrix(F3.gamma(0) * F3.gamma(1) + F3.gamma(1) * F3.gamma(0)) == SpinorMatrix(SpinorMatrix::Zero()));
}

TEST_CASE("volume element is the identity for n = 3") {
    CHECK(SpinorFiber::make(3).volume_element() == SpinorMatrix(SpinorMatrix::Identity()));
}

TEST_CASE("clifford_mul identities on random inputs") {
    std::mt19937_64 rng(11);
    for (int n : {2, 3}) {
        const auto F = SpinorFiber::make(n);
        const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
        for (int trial = 0; trial < 50; ++trial) {
            const auto X = random_vector(n, rng);
            const auto Y = random_vector(n, rng);
            const Spinor phi = random_spinor(rng);
            CHECK(clifford_mul(F, zero, phi).norm() == 0.0);
            double xx = 0, xy = 0;
            for (int i = 0; i < n; ++i) {
                xx += X[static_cast<std::size_t>(i)] * X[static_cast<std::size_t>(i)];
                xy += X[static_cast<std::size_t>(i)] * Y[static_cast<std::size_t>(i)];
            }
            CHECK((clifford_mul(F, X, clifford_mul(F, X, phi)) + xx * phi).norm() <= 1e-12 * (1 + xx) * phi.norm());
            CHECK(real_inner(clifford_mul(F, X, phi), clifford_mul(F, Y, phi)) ==
                  doctest::Approx(xy * phi.squaredNorm()).epsilon(1e-12));
            CHECK(std::abs(real_inner(clifford_mul(F, X, phi), phi)) <= 1e-12 * xx * phi.squaredNorm() + 1e-13);
            // unit vectors act isometrically
            std::vector<double> U(X);
            for (auto& u : U) u /= std::sqrt(xx);
            CHECK(clifford_mul(F, U, phi).norm() == doctest::Approx(phi.norm()).epsilon(1e-13));
            // real linearity in X, complex linearity in phi
            std::vector<double> Z(X);
            for (std::size_t i = 0; i < Z.size(); ++i) Z[i] = 2.5 * X[i] - Y[i];
            const cplx a(0.3, -1.2);
            CHECK((clifford_mul(F, Z, a * phi) - a * (2.5 * clifford_mul(F, X, phi) - clifford_mul(F, Y, phi))).norm() <
                  1e-12 * (1 + phi.norm() * (xx + 1)));
        }
    }
}

TEST_CASE("J is a real isometry anticommuting with i") {
    std::mt19937_64 rng(12);
    const auto F = SpinorFiber::make(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Spinor a = random_spinor(rng), b = random_spinor(rng);
        CHECK(real_inner(F.quaternionic(a), F.quaternionic(b)) == doctest::Approx(real_inner(a, b)).epsilon(1e-13));
        const cplx I(0, 1);
        CHECK((F.quaternionic(I * a) + I * F.quaternionic(a)).norm() < 1e-14);
    }
}

TEST_CASE("real orthogonal basis") {
    for (int n : {2, 3}) {
        const auto F = SpinorFiber::make(n);
        for (const Spinor& phi : {Spinor(1.0, 0.0), Spinor(0.0, 1.0), Spinor(cplx(0.3, 0.4), cplx(-1.0, 2.0))}) {
            const auto B = real_orthogonal_basis(F, phi);
            REQUIRE(B.size() == 4);
            Eigen::Matrix4d gram;
            Eigen::Matrix4d real_coords;
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) gram(a, b) = real_inner(B[static_cast<std::size_t>(a)], B[static_cast<std::size_t>(b)]);
                const Spinor& s = B[static_cast<std::size_t>(a)];
                real_coords.col(a) << s(0).real(), s(0).imag(), s(1).real(), s(1).imag();
            }
            CHECK((gram - phi.squaredNorm() * Eigen::Matrix4d::Identity()).norm() < 1e-14);
            CHECK(Eigen::FullPivLU<Eigen::Matrix4d>(real_coords).rank() == 4);
            const auto B2 = real_orthogonal_basis(F, 2.0 * phi);
            for (int a = 0; a < 4; ++a)
                CHECK(B2[static_cast<std::size_t>(a)] == Spinor(2.0 * B[static_cast<std::size_t>(a)]));
        }
        CHECK_THROWS_AS(real_orthogonal_basis(F, Spinor::Zero()), std::invalid_argument);
    }
}

#include <doctest.h>

#include <random>

#include "spinzero/radial_calculus.hpp"

using namespace spinzero;

namespace {

RadialSpinor term(int n, Rational c, std::vector<int> alpha, Rational k, int p, int i, CliffordWord w = 0) {
    return RadialSpinor::monomial_term(n, c, std::move(alpha), k, p, i, w);
}

std::vector<int> zeros(int n) { return std::vector<int>(static_cast<std::size_t>(n), 0); }

// Oracle: sum_j gamma_j d/dx_j by fourth-order central differences of the numerical evaluation.
Spinor fd_dirac(const RadialSpinor& s, const SpinorFiber& F, const std::vector<double>& x, const Spinor& g) {
    const double h = 1e-3;
    Spinor out = Spinor::Zero();
    for (int j = 0; j < F.dim(); ++j) {
        auto at = [&](double d) {
            std::vector<double> y(x);
            y[static_cast<std::size_t>(j)] += d;
            return s.evaluate(F, y, g);
        };
        const Spinor d = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
        out += F.gamma(j) * d;
    }
    return out;
}

}  // namespace

TEST_CASE("Clifford word products") {
    CHECK(clifford_word_product(0b01, 0b01) == std::pair<int, CliffordWord>{-1, 0});
    CHECK(clifford_word_product(0b01, 0b10) == std::pair<int, CliffordWord>{1, 0b11});
    CHECK(clifford_word_product(0b10, 0b01) == std::pair<int, CliffordWord>{-1, 0b11});
    CHECK(clifford_word_product(0b11, 0b11) == std::pair<int, CliffordWord>{-1, 0});
}

TEST_CASE("canonical form merges and drops terms") {
    RadialSpinor s = term(3, 2, {1, 0, 0}, -2, 0, 0) + term(3, -2, {1, 0, 0}, -2, 0, 0);
    CHECK(s.size() == 0);
    CHECK(s.is_zero());
    RadialSpinor t = term(2, 1, {0, 2}, 0, 0, 0);
    CHECK(t.expanded().expanded() == t.expanded());
    // x_2^2 = |x|^2 - x_1^2
    CHECK(t == term(2, 1, {0, 0}, 2, 0, 0) - term(2, 1, {2, 0}, 0, 0, 0));
}

TEST_CASE("dirac_symbolic displayed identities") {
    for (int n : {2, 3}) {
        for (int k : {-1, 0, 1, 3}) {
            if (n + k == 0) continue;
            const auto s = term(n, Rational(-1, n + k), zeros(n), k, 0, 1);
            CHECK(dirac_symbolic(s) == term(n, 1, zeros(n), k, 0, 0));
        }
        CHECK(dirac_symbolic(term(n, 1, zeros(n), 0, 1, 0)) == term(n, 1, zeros(n), -2, 0, 1));
        CHECK(dirac_symbolic(term(n, 1, zeros(n), 0, 0, 0)).is_zero());
        for (CliffordWord w = 0; w < (1u << n); ++w) CHECK(dirac_symbolic(term(n, 5, zeros(n), 0, 0, 0, w)).is_zero());
    }
}

TEST_CASE("dirac_preimage examples") {
    {
        const auto s = term(3, 1, zeros(3), -2, 0, 1);
        const auto r = dirac_preimage(s, Grade{-2, 0, 1});
        CHECK(r.remainder.is_zero());
        CHECK(r.pre == term(3, 1, zeros(3), 0, 1, 0));
    }
    for (int n : {2, 3}) {
        const auto s = term(n, 1, zeros(n), 0, 1, 0);
        const auto r = dirac_preimage(s, Grade{0, 0, 0});
        CHECK(r.remainder.is_zero());
        const auto expect = term(n, Rational(1, n * n), zeros(n), 0, 0, 1) - term(n, Rational(1, n), zeros(n), 0, 1, 1);
        CHECK(r.pre == expect);
    }
    {
        const auto s = term(3, 1, {1, 0, 0}, -2, 0, 0);
        const auto r = dirac_preimage(s, Grade{-2, 1, 0});
        CHECK(dirac_symbolic(r.pre) + r.remainder == s);
        CHECK(r.remainder.is_zero());
    }
    CHECK_THROWS_AS(dirac_preimage(term(3, 1, zeros(3), 1, 0, 0), Grade{1, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(dirac_preimage(term(3, 1, {1, 0, 0}, -2, 0, 0), Grade{-2, 0, 0}), std::invalid_argument);
}

TEST_CASE("second order identity") {
    CHECK(second_order_check(term(3, 1, zeros(3), 0, 0, 0), 0).is_zero());
    CHECK(second_order_check(term(3, 1, {1, 1, 0}, -1, 0, 0), 2).is_zero());
    CHECK(second_order_check(term(2, 1, {1, 1}, -1, 0, 0), 2).is_zero());
    for (int n : {2, 3}) CHECK(second_order_check(term(n, 1, zeros(n), 0, 1, 1), Rational(1, 2)).is_zero());
    CHECK(second_order_check(term(3, 3, {2, 0, 1}, Rational(-5, 2), 0, 1, 0b101), Rational(7, 3)).is_zero());
}

TEST_CASE("linearity and grading") {
    const int n = 3;
    const auto s = term(n, 2, {1, 0, 1}, -3, 0, 1, 0b010) + term(n, -1, {0, 2, 0}, -4, 0, 0, 0b001);
    const auto t = term(n, 7, {0, 0, 1}, -1, 1, 0);
    const Rational a(3, 5);
    CHECK(dirac_symbolic(a * s + t) == a * dirac_symbolic(s) + dirac_symbolic(t));
    // homogeneity drops by one, term by term
    for (const auto& in : (s + t).terms()) {
        RadialSpinor single(n);
        single.add(in);
        for (const auto& out : dirac_symbolic(single).expanded().terms()) CHECK(out.homogeneity() == in.homogeneity() - 1);
    }
}

TEST_CASE("dirac_symbolic agrees with finite differences of the evaluation") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int n : {2, 3}) {
        const auto F = SpinorFiber::make(n);
        std::vector<RadialSpinor> cases{
            term(n, 1, zeros(n), -1, 0, 1),
            term(n, 2, std::vector<int>(static_cast<std::size_t>(n), 1), Rational(-3, 2), 1, 0, 0b01),
            term(n, -3, zeros(n), 0, 1, 1, 0b10),
        };
        for (const auto& s : cases)
            for (int trial = 0; trial < 5; ++trial) {
                std::vector<double> x(static_cast<std::size_t>(n));
                for (auto& v : x) v = 0.5 + 0.5 * std::abs(U(rng));
                const Spinor g(cplx(U(rng), U(rng)), cplx(U(rng), U(rng)));
                const Spinor exact = dirac_symbolic(s).evaluate(F, x, g);
                CHECK((exact - fd_dirac(s, F, x, g)).norm() < 1e-8 * (1 + exact.norm()));
            }
    }
}

TEST_CASE("preimage identities over every admissible generator") {
    for (int n : {2, 3}) {
        const auto cases = verify_preimage_identities(n, 3);
        CHECK(!cases.empty());
        for (const auto& c : cases) {
            INFO(to_string(c.grade), " ", c.generator);
            CHECK(c.ok());
        }
    }
}

TEST_CASE("admissible grade ranges") {
    CHECK(admissible(3, Grade{-3, 1, 0}));
    CHECK(admissible(3, Grade{-2, 2, 0}));
    CHECK_FALSE(admissible(3, Grade{-3, 0, 0}));  // k + m = -3 is not > -3
    CHECK_FALSE(admissible(3, Grade{-4, 2, 0}));
    CHECK_FALSE(admissible(2, Grade{0, 1, 0}));
    CHECK(admissible(2, Grade{-2, 0, 1}));
    CHECK_FALSE(admissible(2, Grade{-1, 1, 1}));
}

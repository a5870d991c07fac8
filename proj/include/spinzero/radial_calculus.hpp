#pragma once

// Exact Dirac calculus on spinors of the form
//
//   c * x^alpha * |x|^k * (ln|x|)^p * (x.)^i * w . gamma
//
// on R^n \ {0}, n in {2, 3}. The constant spinor is kept symbolic: w is a
// basis word E_{s1} E_{s2} ... (s1 < s2 < ...) of the Clifford algebra Cl_n
// acting on a generic constant spinor gamma, so every identity checked here
// holds for any representation of Cl_n.

#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spinzero/clifford.hpp"

namespace spinzero {

using Rational = boost::multiprecision::cpp_rational;

/// Bit s set <=> factor E_{s+1}; factors ordered by increasing index.
using CliffordWord = unsigned;

/// Product of two basis words in Cl_n (E_i E_i = -1): returns (sign, word).
std::pair<int, CliffordWord> clifford_word_product(CliffordWord a, CliffordWord b);

struct RadialTerm {
    Rational coeff;
    std::vector<int> monomial;
    Rational radial_power;
    int log_power = 0;
    int vector_part = 0;
    CliffordWord word = 0;

    int degree() const;
    /// k + |alpha| + i (the log power does not count).
    Rational homogeneity() const;
};

/// Grade (k, m, i) of the spaces P_{k,m,i}; for k = 0 the generators carry ln|x|.
struct Grade {
    Rational k;
    int m = 0;
    int i = 0;
    bool operator==(const Grade&) const = default;
};

std::string to_string(const Grade& g);

class RadialSpinor {
public:
    explicit RadialSpinor(int n);

    /// Single term c x^alpha |x|^k (ln|x|)^p (x.)^i w gamma.
    static RadialSpinor monomial_term(int n, const Rational& coeff, std::vector<int> alpha,
                                      const Rational& k, int log_power, int vector_part,
                                      CliffordWord word = 0);

    int dim() const { return n_; }
    std::vector<RadialTerm> terms() const;
    std::size_t size() const { return terms_.size(); }

    /// True when the expanded normal form has no terms.
    bool is_zero() const;

    /// Unique normal form: x. expanded as sum_i x_i E_i, then x_n^2 rewritten
    /// as |x|^2 - sum_{i<n} x_i^2 until every monomial has x_n-degree <= 1.
    RadialSpinor expanded() const;

    void add(const RadialTerm& t);

    RadialSpinor& operator+=(const RadialSpinor& o);
    RadialSpinor& operator-=(const RadialSpinor& o);
    RadialSpinor& operator*=(const Rational& a);

    friend RadialSpinor operator+(RadialSpinor a, const RadialSpinor& b) { return a += b; }
    friend RadialSpinor operator-(RadialSpinor a, const RadialSpinor& b) { return a -= b; }
    friend RadialSpinor operator*(const Rational& a, RadialSpinor s) { return s *= a; }

    /// Equality of the functions represented (normal forms compared).
    bool operator==(const RadialSpinor& o) const;

    /// Numerical value at x != 0 for a concrete fiber and constant spinor gamma.
    Spinor evaluate(const SpinorFiber& fiber, std::span<const double> x, const Spinor& gamma) const;

    std::string to_string() const;

private:
    using Key = std::tuple<std::vector<int>, Rational, int, int, CliffordWord>;

    int n_;
    std::map<Key, Rational> terms_;
};

/// Partial derivative d/dx_j (j is 0-based).
RadialSpinor partial(const RadialSpinor& s, int j);

/// Left Clifford multiplication by E_j (j is 0-based), normalising
/// E_j . x. = -2 x_j - x. E_j so the result is again in term form.
RadialSpinor clifford_left(const RadialSpinor& s, int j);

/// Euclidean Dirac operator sum_j E_j . d/dx_j.
RadialSpinor dirac_symbolic(const RadialSpinor& s);

RadialSpinor laplacian(const RadialSpinor& s);

/// (D - lambda)(D + lambda) s + sum_i d_i d_i s + lambda^2 s; identically zero.
RadialSpinor second_order_check(const RadialSpinor& s, const Rational& lambda);

/// Grades admitted by the inversion result for R^n:
///   i = 0: -n <= k and -n < k + m <= 0;  i = 1: -n <= k and -n < k + m + 1 <= 0.
bool admissible(int n, const Grade& g);

/// Grades of the spaces whose sum contains a preimage of P_{k,m,i}.
std::vector<Grade> preimage_grades(const Grade& g);

/// Grade of a single term: (k, |alpha|, i). Terms of P_{0,m,0} carry ln|x|;
/// for P_{0,m,1} both x^alpha x. and x^alpha ln|x| x. are accepted.
Grade term_grade(const RadialTerm& t);

/// Every term of s has one of the given grades with a log power compatible with it.
bool lies_in(const RadialSpinor& s, const std::vector<Grade>& grades);

struct Preimage {
    RadialSpinor pre;
    RadialSpinor remainder;
};

/// Preimage of s in P_{k,m,i} under the Euclidean Dirac operator, built by the
/// induction on m: peel one coordinate factor with E_j . x. = -2 x_j - x. E_j,
/// recurse, divide by 2m + n + k. dirac_symbolic(pre) == s - remainder.
/// Throws std::invalid_argument if a term is not a generator of grade g or g
/// is not admissible.
Preimage dirac_preimage(const RadialSpinor& s, const Grade& g);

/// All generators x^alpha |x|^k (ln|x|)^[k=0,i=0] (x.)^i w gamma of P_{k,m,i}
/// (alpha nondecreasing index tuples, w over all 2^n basis words).
std::vector<RadialSpinor> generators(int n, const Grade& g);

struct IdentityCase {
    int n = 0;
    Grade grade;
    std::string generator;
    bool round_trip = false;    ///< D(pre) + remainder == generator, exactly
    bool zero_remainder = false;
    bool in_stated_spaces = false;
    bool ok() const { return round_trip && zero_remainder && in_stated_spaces; }
};

/// Runs dirac_preimage over every generator of every admissible integer grade
/// with m <= max_m.
std::vector<IdentityCase> verify_preimage_identities(int n, int max_m);

}  // namespace spinzero

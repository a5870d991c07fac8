#include "spinzero/radial_calculus.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace spinzero {

namespace {

double to_double(const Rational& q) { return q.convert_to<double>(); }

int monomial_degree(const std::vector<int>& alpha) {
    return std::accumulate(alpha.begin(), alpha.end(), 0);
}

std::vector<int> shifted(std::vector<int> alpha, int j, int by) {
    alpha[static_cast<std::size_t>(j)] += by;
    return alpha;
}

CliffordWord basis_word(int j) { return CliffordWord{1} << j; }

}  // namespace

std::pair<int, CliffordWord> clifford_word_product(CliffordWord a, CliffordWord b) {
    int swaps = 0;
    for (CliffordWord rest = b; rest != 0; rest &= rest - 1) {
        const int j = std::countr_zero(rest);
        swaps += std::popcount(a >> (j + 1));
    }
    swaps += std::popcount(a & b);
    return {(swaps % 2 == 0) ? 1 : -1, a ^ b};
}

int RadialTerm::degree() const { return monomial_degree(monomial); }

Rational RadialTerm::homogeneity() const { return radial_power + degree() + vector_part; }

std::string to_string(const Grade& g) {
    std::ostringstream os;
    os << "(k=" << g.k << ", m=" << g.m << ", i=" << g.i << ")";
    return os.str();
}

RadialSpinor::RadialSpinor(int n) : n_(n) {
    if (n != 2 && n != 3) throw std::invalid_argument("radial spinor: dimension must be 2 or 3");
}

RadialSpinor RadialSpinor::monomial_term(int n, const Rational& coeff, std::vector<int> alpha,
                                         const Rational& k, int log_power, int vector_part,
                                         CliffordWord word) {
    RadialSpinor s(n);
    s.add(RadialTerm{coeff, std::move(alpha), k, log_power, vector_part, word});
    return s;
}

void RadialSpinor::add(const RadialTerm& t) {
    if (static_cast<int>(t.monomial.size()) != n_)
        throw std::invalid_argument("radial term: monomial has wrong dimension");
    if (t.log_power < 0 || t.log_power > 1)
        throw std::logic_error("radial term: log power outside {0, 1}");
    if (t.vector_part < 0 || t.vector_part > 1)
        throw std::invalid_argument("radial term: vector part must be 0 or 1");
    if (t.word >= (CliffordWord{1} << n_))
        throw std::invalid_argument("radial term: Clifford word out of range");
    for (int a : t.monomial)
        if (a < 0) throw std::invalid_argument("radial term: negative exponent");
    if (t.coeff == 0) return;
    Key key{t.monomial, t.radial_power, t.log_power, t.vector_part, t.word};
    auto [it, inserted] = terms_.try_emplace(std::move(key), t.coeff);
    if (!inserted) {
        it->second += t.coeff;
        if (it->second == 0) terms_.erase(it);
    }
}

std::vector<RadialTerm> RadialSpinor::terms() const {
    std::vector<RadialTerm> out;
    out.reserve(terms_.size());
    for (const auto& [key, c] : terms_) {
        const auto& [alpha, k, p, i, w] = key;
        out.push_back(RadialTerm{c, alpha, k, p, i, w});
    }
    return out;
}

RadialSpinor& RadialSpinor::operator+=(const RadialSpinor& o) {
    if (o.n_ != n_) throw std::invalid_argument("radial spinor: dimension mismatch");
    for (const auto& t : o.terms()) add(t);
    return *this;
}

RadialSpinor& RadialSpinor::operator-=(const RadialSpinor& o) {
    if (o.n_ != n_) throw std::invalid_argument("radial spinor: dimension mismatch");
    for (auto t : o.terms()) {
        t.coeff = -t.coeff;
        add(t);
    }
    return *this;
}

RadialSpinor& RadialSpinor::operator*=(const Rational& a) {
    if (a == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [key, c] : terms_) c *= a;
    return *this;
}

RadialSpinor RadialSpinor::expanded() const {
    RadialSpinor out(n_);
    const int last = n_ - 1;
    // x_last^2 -> |x|^2 - sum_{i<last} x_i^2, applied until x_last-degree <= 1
    auto reduce = [&](auto&& self, const Rational& c, std::vector<int> alpha, const Rational& k,
                      int p, CliffordWord w) -> void {
        if (alpha[static_cast<std::size_t>(last)] < 2) {
            out.add(RadialTerm{c, std::move(alpha), k, p, 0, w});
            return;
        }
        alpha[static_cast<std::size_t>(last)] -= 2;
        self(self, c, alpha, k + 2, p, w);
        for (int i = 0; i < last; ++i) self(self, -c, shifted(alpha, i, 2), k, p, w);
    };
    for (const auto& t : terms()) {
        if (t.vector_part == 0) {
            reduce(reduce, t.coeff, t.monomial, t.radial_power, t.log_power, t.word);
            continue;
        }
        for (int i = 0; i < n_; ++i) {
            auto [sign, w] = clifford_word_product(basis_word(i), t.word);
            reduce(reduce, sign * t.coeff, shifted(t.monomial, i, 1), t.radial_power, t.log_power, w);
        }
    }
    return out;
}

bool RadialSpinor::is_zero() const { return expanded().terms_.empty(); }

bool RadialSpinor::operator==(const RadialSpinor& o) const {
    if (o.n_ != n_) return false;
    return (*this - o).is_zero();
}

Spinor RadialSpinor::evaluate(const SpinorFiber& fiber, std::span<const double> x,
                              const Spinor& gamma) const {
    if (fiber.dim() != n_ || static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("radial spinor: evaluation dimension mismatch");
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    if (r2 == 0.0) throw std::domain_error("radial spinor: evaluation at the origin");
    const double r = std::sqrt(r2);
    const SpinorMatrix X = fiber.clifford_matrix(x);
    Spinor value = Spinor::Zero();
    for (const auto& t : terms()) {
        double scalar = to_double(t.coeff) * std::pow(r, to_double(t.radial_power));
        for (int i = 0; i < n_; ++i)
            scalar *= std::pow(x[static_cast<std::size_t>(i)], t.monomial[static_cast<std::size_t>(i)]);
        if (t.log_power == 1) scalar *= std::log(r);
        Spinor v = gamma;
        for (int s = n_ - 1; s >= 0; --s)
            if (t.word & basis_word(s)) v = fiber.gamma(s) * v;
        if (t.vector_part == 1) v = X * v;
        value += scalar * v;
    }
    return value;
}

std::string RadialSpinor::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms()) {
        if (!first) os << " + ";
        first = false;
        os << "(" << t.coeff << ")";
        for (int i = 0; i < n_; ++i) {
            const int a = t.monomial[static_cast<std::size_t>(i)];
            if (a > 0) os << "*x" << (i + 1) << (a > 1 ? "^" + std::to_string(a) : "");
        }
        if (t.radial_power != 0) os << "*|x|^" << t.radial_power;
        if (t.log_power == 1) os << "*ln|x|";
        if (t.vector_part == 1) os << "*x.";
        for (int s = 0; s < n_; ++s)
            if (t.word & basis_word(s)) os << "E" << (s + 1);
        os << "g";
    }
    return os.str();
}

RadialSpinor partial(const RadialSpinor& s, int j) {
    RadialSpinor out(s.dim());
    for (const auto& t : s.terms()) {
        const int aj = t.monomial[static_cast<std::size_t>(j)];
        if (aj > 0)
            out.add({t.coeff * aj, shifted(t.monomial, j, -1), t.radial_power, t.log_power,
                     t.vector_part, t.word});
        if (t.radial_power != 0)
            out.add({t.coeff * t.radial_power, shifted(t.monomial, j, 1), t.radial_power - 2,
                     t.log_power, t.vector_part, t.word});
        if (t.log_power > 0)
            out.add({t.coeff * t.log_power, shifted(t.monomial, j, 1), t.radial_power - 2,
                     t.log_power - 1, t.vector_part, t.word});
        if (t.vector_part == 1) {
            // d_j (x.) = E_j.
            auto [sign, w] = clifford_word_product(basis_word(j), t.word);
            out.add({sign * t.coeff, t.monomial, t.radial_power, t.log_power, 0, w});
        }
    }
    return out;
}

RadialSpinor clifford_left(const RadialSpinor& s, int j) {
    RadialSpinor out(s.dim());
    for (const auto& t : s.terms()) {
        auto [sign, w] = clifford_word_product(basis_word(j), t.word);
        if (t.vector_part == 0) {
            out.add({sign * t.coeff, t.monomial, t.radial_power, t.log_power, 0, w});
        } else {
            out.add({-2 * t.coeff, shifted(t.monomial, j, 1), t.radial_power, t.log_power, 0, t.word});
            out.add({-sign * t.coeff, t.monomial, t.radial_power, t.log_power, 1, w});
        }
    }
    return out;
}

RadialSpinor dirac_symbolic(const RadialSpinor& s) {
    RadialSpinor out(s.dim());
    for (int j = 0; j < s.dim(); ++j) out += clifford_left(partial(s, j), j);
    return out;
}

RadialSpinor laplacian(const RadialSpinor& s) {
    RadialSpinor out(s.dim());
    for (int j = 0; j < s.dim(); ++j) out += partial(partial(s, j), j);
    return out;
}

RadialSpinor second_order_check(const RadialSpinor& s, const Rational& lambda) {
    const RadialSpinor plus = dirac_symbolic(s) + lambda * s;
    RadialSpinor out = dirac_symbolic(plus) - lambda * plus;
    out += laplacian(s);
    out += (lambda * lambda) * s;
    return out.expanded();
}

bool admissible(int n, const Grade& g) {
    if (g.m < 0 || g.i < 0 || g.i > 1) return false;
    const Rational top = g.k + g.m + g.i;
    return g.k >= -n && top > -n && top <= 0;
}

std::vector<Grade> preimage_grades(const Grade& g) {
    std::vector<Grade> out;
    if (g.i == 0) {
        for (int j = 1; j <= (g.m + 1) / 2; ++j) out.push_back({g.k + 2 * j, g.m + 1 - 2 * j, 0});
        for (int j = 0; j <= g.m / 2; ++j) out.push_back({g.k + 2 * j, g.m - 2 * j, 1});
    } else {
        for (int j = 0; j <= g.m / 2; ++j) out.push_back({g.k + 2 + 2 * j, g.m - 2 * j, 0});
        for (int j = 1; j <= (g.m + 1) / 2; ++j) out.push_back({g.k + 2 * j, g.m + 1 - 2 * j, 1});
    }
    return out;
}

Grade term_grade(const RadialTerm& t) { return Grade{t.radial_power, t.degree(), t.vector_part}; }

namespace {

bool log_power_fits(const RadialTerm& t) {
    if (t.radial_power != 0) return t.log_power == 0;
    if (t.vector_part == 0) return t.log_power == 1;
    return true;
}

struct Generator {
    Rational coeff;
    std::vector<int> alpha;
    Rational k;
    int vec;
    CliffordWord word;
};

void preimage_of(int n, const Generator& g, RadialSpinor& out) {
    const int m = monomial_degree(g.alpha);
    auto add = [&](const Rational& c, const std::vector<int>& alpha, const Rational& k, int p, int vec,
                   CliffordWord w) { out.add(RadialTerm{c, alpha, k, p, vec, w}); };
    if (g.vec == 0) {
        if (m == 0) {
            if (g.k == 0) {
                // D((1 - n ln|x|)/n^2 x.g) = ln|x| g
                add(g.coeff / (n * n), g.alpha, 0, 0, 1, g.word);
                add(-g.coeff / n, g.alpha, 0, 1, 1, g.word);
            } else {
                const Rational denom = n + g.k;
                if (denom == 0) throw std::logic_error("dirac_preimage: n + k vanishes");
                add(-g.coeff / denom, g.alpha, g.k, 0, 1, g.word);
            }
            return;
        }
        const Rational c = 2 * m + n + g.k;
        if (c == 0) throw std::logic_error("dirac_preimage: 2m + n + k vanishes");
        add(-g.coeff / c, g.alpha, g.k, 0, 1, g.word);
        for (int j = 0; j < n; ++j) {
            const int aj = g.alpha[static_cast<std::size_t>(j)];
            if (aj == 0) continue;
            auto [sign, w] = clifford_word_product(basis_word(j), g.word);
            preimage_of(n, {-g.coeff * aj * sign / c, shifted(g.alpha, j, -1), g.k, 1, w}, out);
        }
        return;
    }
    // D(x^a f_{k+2} w g) = x^a |x|^k x.w g + sum_j a_j x^{a-e_j} f_{k+2} E_j w g,
    // f_q = |x|^q / q (q != 0), f_0 = ln|x|.
    const Rational k2 = g.k + 2;
    const Rational scale = (k2 == 0) ? Rational(1) : Rational(1) / k2;
    add(g.coeff * scale, g.alpha, k2, k2 == 0 ? 1 : 0, 0, g.word);
    for (int j = 0; j < n; ++j) {
        const int aj = g.alpha[static_cast<std::size_t>(j)];
        if (aj == 0) continue;
        auto [sign, w] = clifford_word_product(basis_word(j), g.word);
        preimage_of(n, {-g.coeff * aj * sign * scale, shifted(g.alpha, j, -1), k2, 0, w}, out);
    }
}

void index_tuples(int n, int m, int start, std::vector<int>& alpha,
                  std::vector<std::vector<int>>& out) {
    if (m == 0) {
        out.push_back(alpha);
        return;
    }
    for (int i = start; i < n; ++i) {
        ++alpha[static_cast<std::size_t>(i)];
        index_tuples(n, m - 1, i, alpha, out);
        --alpha[static_cast<std::size_t>(i)];
    }
}

}  // namespace

bool lies_in(const RadialSpinor& s, const std::vector<Grade>& grades) {
    for (const auto& t : s.terms()) {
        if (!log_power_fits(t)) return false;
        const Grade g = term_grade(t);
        bool found = false;
        for (const auto& allowed : grades) found = found || (allowed == g);
        if (!found) return false;
    }
    return true;
}

Preimage dirac_preimage(const RadialSpinor& s, const Grade& g) {
    const int n = s.dim();
    if (!admissible(n, g))
        throw std::invalid_argument("dirac_preimage: grade " + to_string(g) + " outside the admissible range");
    Preimage result{RadialSpinor(n), RadialSpinor(n)};
    for (const auto& t : s.terms()) {
        const bool log_ok = (g.k == 0 && g.i == 0) ? t.log_power == 1 : t.log_power == 0;
        if (!(term_grade(t) == g) || !log_ok)
            throw std::invalid_argument("dirac_preimage: term is not a generator of grade " + to_string(g));
        preimage_of(n, {t.coeff, t.monomial, t.radial_power, t.vector_part, t.word}, result.pre);
    }
    return result;
}

std::vector<RadialSpinor> generators(int n, const Grade& g) {
    std::vector<std::vector<int>> alphas;
    std::vector<int> alpha(static_cast<std::size_t>(n), 0);
    index_tuples(n, g.m, 0, alpha, alphas);
    const int p = (g.k == 0 && g.i == 0) ? 1 : 0;
    std::vector<RadialSpinor> out;
    for (const auto& a : alphas)
        for (CliffordWord w = 0; w < (CliffordWord{1} << n); ++w)
            out.push_back(RadialSpinor::monomial_term(n, 1, a, g.k, p, g.i, w));
    return out;
}

std::vector<IdentityCase> verify_preimage_identities(int n, int max_m) {
    std::vector<IdentityCase> cases;
    for (int i = 0; i <= 1; ++i) {
        for (int m = 0; m <= max_m; ++m) {
            for (int k = -n; k <= 0; ++k) {
                const Grade g{k, m, i};
                if (!admissible(n, g)) continue;
                const auto targets = preimage_grades(g);
                for (const auto& gen : generators(n, g)) {
                    const Preimage p = dirac_preimage(gen, g);
                    IdentityCase c;
                    c.n = n;
                    c.grade = g;
                    c.generator = gen.to_string();
                    c.round_trip = (dirac_symbolic(p.pre) + p.remainder) == gen;
                    c.zero_remainder = p.remainder.is_zero();
                    c.in_stated_spaces = lies_in(p.pre, targets);
                    cases.push_back(std::move(c));
                }
            }
        }
    }
    return cases;
}

}  // namespace spinzero

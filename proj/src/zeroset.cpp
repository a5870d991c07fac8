#include "spinzero/zeroset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinzero {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// all offsets in {-1, 0, 1}^n, lexicographic
std::vector<std::vector<int>> stencil(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> s(static_cast<std::size_t>(n), -1);
    while (true) {
        out.push_back(s);
        int i = n - 1;
        while (i >= 0 && ++s[static_cast<std::size_t>(i)] > 1) s[static_cast<std::size_t>(i--)] = -1;
        if (i < 0) break;
    }
    return out;
}

MinModulus refine(const SpinorField& psi, const Eigen::VectorXd& sq, std::size_t p) {
    const auto& geom = *psi.geometry();
    const int n = geom.dim();
    MinModulus out{std::sqrt(sq(static_cast<Eigen::Index>(p))), std::sqrt(sq(static_cast<Eigen::Index>(p))), p,
                   geom.fractional(p)};

    // q(s) = c + g.s + sum_{i<=j} h_ij s_i s_j, least squares on the stencil
    const auto offs = stencil(n);
    const int params = 1 + n + n * (n + 1) / 2;
    Eigen::MatrixXd design(static_cast<Eigen::Index>(offs.size()), params);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(offs.size()));
    const auto base = geom.unravel(p);
    for (std::size_t r = 0; r < offs.size(); ++r) {
        std::vector<int> idx(base);
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] += offs[r][static_cast<std::size_t>(i)];
        rhs(static_cast<Eigen::Index>(r)) = sq(static_cast<Eigen::Index>(geom.ravel(idx)));
        int c = 0;
        design(static_cast<Eigen::Index>(r), c++) = 1.0;
        for (int i = 0; i < n; ++i) design(static_cast<Eigen::Index>(r), c++) = offs[r][static_cast<std::size_t>(i)];
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                design(static_cast<Eigen::Index>(r), c++) =
                    offs[r][static_cast<std::size_t>(i)] * offs[r][static_cast<std::size_t>(j)];
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
    Eigen::VectorXd g = coef.segment(1, n);
    Eigen::MatrixXd H(n, n);
    int c = 1 + n;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double h = coef(c++);
            if (i == j)
                H(i, i) = 2.0 * h;
            else
                H(i, j) = H(j, i) = h;
        }
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) return out;
    const Eigen::VectorXd s = llt.solve(-g);
    if (s.cwiseAbs().maxCoeff() > 1.0) return out;
    const double val = std::max(0.0, coef(0) + 0.5 * g.dot(s));
    if (std::sqrt(val) > out.grid_value) return out;
    out.value = std::sqrt(val);
    for (int i = 0; i < n; ++i) out.fractional(i) += s(i) / geom.grid()[static_cast<std::size_t>(i)];
    return out;
}

Eigen::VectorXd squared_modulus(const SpinorField& psi) { return psi.modulus().array().square().matrix(); }

}  // namespace

MinModulus min_modulus(const SpinorField& psi) {
    const Eigen::VectorXd sq = squared_modulus(psi);
    Eigen::Index arg = 0;
    for (Eigen::Index p = 1; p < sq.size(); ++p)
        if (sq(p) < sq(arg)) arg = p;
    return refine(psi, sq, static_cast<std::size_t>(arg));
}

double spectral_lipschitz_bound(const SpinorField& psi) {
    const auto& geom = *psi.geometry();
    const Eigen::VectorXcd c = fourier_coefficients(psi);
    double lip = 0.0;
    for (std::size_t q = 0; q < geom.num_points(); ++q)
        lip += two_pi * geom.wave_vector(q).norm() * c.segment<2>(static_cast<Eigen::Index>(2 * q)).norm();
    return lip;
}

double default_zero_threshold(const SpinorField& psi) {
    const auto& geom = *psi.geometry();
    double h = 0.0;
    for (int i = 0; i < geom.dim(); ++i) h = std::max(h, geom.lattice().col(i).norm() / geom.grid()[static_cast<std::size_t>(i)]);
    return 1e-4 * spectral_lipschitz_bound(psi) * h;
}

std::vector<ZeroCandidate> zero_report(const SpinorField& psi, std::optional<double> threshold) {
    const double thr = threshold ? *threshold : default_zero_threshold(psi);
    const auto& geom = *psi.geometry();
    const Eigen::VectorXd sq = squared_modulus(psi);
    const auto offs = stencil(geom.dim());
    std::vector<ZeroCandidate> out;
    for (std::size_t p = 0; p < geom.num_points(); ++p) {
        const double v = sq(static_cast<Eigen::Index>(p));
        // the quadratic refinement cannot pull a sample far above thr below it
        if (std::sqrt(v) > 4.0 * thr) continue;
        const auto base = geom.unravel(p);
        bool local_min = true;
        for (const auto& o : offs) {
            std::vector<int> idx(base);
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] += o[i];
            if (sq(static_cast<Eigen::Index>(geom.ravel(idx))) < v) {
                local_min = false;
                break;
            }
        }
        if (!local_min) continue;
        const auto m = refine(psi, sq, p);
        if (m.value < thr) out.push_back({m, true});
    }
    return out;
}

nlohmann::json to_json(const std::vector<ZeroCandidate>& zeros, double threshold) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& z : zeros) {
        std::vector<double> loc(z.minimum.fractional.data(), z.minimum.fractional.data() + z.minimum.fractional.size());
        list.push_back({{"value", z.minimum.value},
                        {"grid_value", z.minimum.grid_value},
                        {"grid_index", z.minimum.grid_index},
                        {"location", loc},
                        {"resolution_limited", z.resolution_limited}});
    }
    return {{"threshold", threshold}, {"count", zeros.size()}, {"zeros", list}};
}

SpinorField two_wave_spinor(const GeometryPtr& geom, std::span<const int> b, std::span<const int> b2,
                            const Spinor& sigma) {
    SpinorField psi = plane_wave(geom, b, sigma);
    psi -= plane_wave(geom, b2, sigma);
    return psi;
}

SpinorField eigenspinor_with_zero(const std::vector<const EigenPair*>& eigenspace, std::size_t p) {
    if (eigenspace.size() < 4) throw std::invalid_argument("eigenspinor_with_zero: eigenspace dimension must be >= 4");
    const auto d = static_cast<Eigen::Index>(eigenspace.size());
    Eigen::MatrixXcd values(2, d);
    for (Eigen::Index a = 0; a < d; ++a) values.col(a) = eigenspace[static_cast<std::size_t>(a)]->psi.at(p);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(values, Eigen::ComputeFullV);
    const Eigen::VectorXcd c = svd.matrixV().col(d - 1);
    SpinorField psi(eigenspace.front()->psi.geometry());
    for (Eigen::Index a = 0; a < d; ++a) {
        SpinorField term = eigenspace[static_cast<std::size_t>(a)]->psi;
        term *= c(a);
        psi += term;
    }
    psi *= 1.0 / l2_norm(psi);
    return psi;
}

RealGrid random_trig_bump(const GeometryPtr& geom, int bandwidth, double t, std::mt19937_64& rng) {
    if (bandwidth < 0) throw std::invalid_argument("random_trig_bump: negative bandwidth");
    const int n = geom->dim();
    const auto npts = static_cast<Eigen::Index>(geom->num_points());
    Eigen::MatrixXd u(n, npts);
    for (Eigen::Index p = 0; p < npts; ++p) u.col(p) = geom->fractional(static_cast<std::size_t>(p));

    RealGrid f = RealGrid::Zero(npts);
    std::vector<int> b(static_cast<std::size_t>(n), -bandwidth);
    while (true) {
        int lead = 0;
        for (int x : b)
            if (x != 0) {
                lead = x;
                break;
            }
        if (lead >= 0) {
            const double c = 2.0 * unit_uniform(rng) - 1.0;
            const double s = lead > 0 ? 2.0 * unit_uniform(rng) - 1.0 : 0.0;
            Eigen::VectorXd bv(n);
            for (int i = 0; i < n; ++i) bv(i) = b[static_cast<std::size_t>(i)];
            const Eigen::ArrayXd phase = (two_pi * (bv.transpose() * u)).transpose().array();
            f.array() += c * phase.cos() + s * phase.sin();
        }
        int i = n - 1;
        while (i >= 0 && ++b[static_cast<std::size_t>(i)] > bandwidth) b[static_cast<std::size_t>(i--)] = -bandwidth;
        if (i < 0) break;
    }
    const double sup = f.cwiseAbs().maxCoeff();
    if (t != 0.0 && sup > 0.0) f *= std::min(1.0, 0.3 / (std::abs(t) * sup));
    return f;
}

std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    return std::mt19937_64(seq);
}

GenericityStats genericity_trial(const GeometryPtr& geom, int m, int K, std::uint64_t seed, double t0,
                                 const SolverOptions& opts) {
    if (K < 0) throw std::invalid_argument("genericity_trial: K must be >= 0");
    GenericityStats stats;
    for (int trial = 0; trial < K; ++trial) {
        TrialResult r;
        r.trial = static_cast<std::uint64_t>(trial);
        auto rng = trial_rng(seed, r.trial);
        const RealGrid f = random_trig_bump(geom, bump_bandwidth, t0, rng);
        ++stats.trials;
        try {
            const auto rep = eigensolve(ConformalFamily(geom, f, t0), m, opts);
            const auto flags = check_simple(rep);
            r.all_simple = std::all_of(flags.begin(), flags.end(), [](Simplicity s) { return s == Simplicity::simple; });
            r.nowhere_zero = true;
            r.min_modulus = std::numeric_limits<double>::infinity();
            std::vector<int> seen;
            for (const auto& e : rep.enumeration) {
                r.eigenvalues.push_back(e.lambda);
                if (std::find(seen.begin(), seen.end(), e.cluster) != seen.end()) continue;
                seen.push_back(e.cluster);
                for (int p : rep.cluster_of(e).members) {
                    const auto& psi = rep.pairs[static_cast<std::size_t>(p)].psi;
                    r.min_modulus = std::min(r.min_modulus, min_modulus(psi).value);
                    const auto zeros = zero_report(psi);
                    r.zero_candidates += static_cast<int>(zeros.size());
                    r.nowhere_zero = r.nowhere_zero && zeros.empty();
                }
            }
        } catch (const SolverFailure&) {
            r.solver_failure = true;
            ++stats.solver_failures;
        }
        if (!r.solver_failure) {
            stats.all_simple_count += r.all_simple;
            stats.all_nowhere_zero_count += r.nowhere_zero;
            stats.both_count += r.all_simple && r.nowhere_zero;
        }
        stats.per_trial.push_back(std::move(r));
    }
    return stats;
}

nlohmann::json to_json(const GenericityStats& stats) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& r : stats.per_trial) {
        nlohmann::json t{{"trial", r.trial}, {"solver_failure", r.solver_failure}};
        if (!r.solver_failure) {
            t["all_simple"] = r.all_simple;
            t["nowhere_zero"] = r.nowhere_zero;
            t["min_modulus"] = r.min_modulus;
            t["zero_candidates"] = r.zero_candidates;
            t["eigenvalues"] = r.eigenvalues;
        }
        per.push_back(std::move(t));
    }
    return {{"trials", stats.trials},
            {"solver_failures", stats.solver_failures},
            {"all_simple_count", stats.all_simple_count},
            {"all_nowhere_zero_count", stats.all_nowhere_zero_count},
            {"all_simple_and_nowhere_zero_count", stats.both_count},
            {"per_trial", per}};
}

int poincare_hopf_budget(int genus) {
    if (genus < 0) throw std::invalid_argument("poincare_hopf_budget: genus must be nonnegative");
    return genus - 1;
}

Rational a_hat_complete_intersection(int k, int d) {
    if (k < 1) throw std::invalid_argument("a_hat: k must be >= 1");
    if (d < 2 || d % 2 != 0) throw std::invalid_argument("a_hat: d must be even and >= 2");
    Rational value(d);
    for (int j = 1; j <= k; ++j) value *= Rational(static_cast<long long>(d) * d - 4LL * j * j);
    Rational denom(1);
    for (int j = 2; j <= 2 * k + 1; ++j) denom *= j;
    for (int j = 0; j < 2 * k; ++j) denom *= 2;
    return value / denom;
}

}  // namespace spinzero

#pragma once

// Zero localization for spinor fields and the genericity experiment.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <json.hpp>

#include "spinzero/radial_calculus.hpp"
#include "spinzero/spectral.hpp"

namespace spinzero {

struct MinModulus {
    double value;                  ///< refined minimum of |psi|
    double grid_value;             ///< |psi| at the grid argmin
    std::size_t grid_index;        ///< grid argmin, first in row-major order on ties
    Eigen::VectorXd fractional;    ///< refined location in lattice coordinates
};

/// Grid minimum of |psi| refined by a least-squares quadratic fit of |psi|^2 on
/// the 3^n stencil around it (kept only if the fitted minimum lies in the stencil).
MinModulus min_modulus(const SpinorField& psi);

/// sum over modes of 2 pi |kappa| |psi_hat|, a bound for the Lipschitz constant of psi.
double spectral_lipschitz_bound(const SpinorField& psi);

/// 1e-4 * spectral Lipschitz bound * largest grid step.
double default_zero_threshold(const SpinorField& psi);

struct ZeroCandidate {
    MinModulus minimum;
    bool resolution_limited = true;  ///< always set: grid samples cannot certify exact zeros
};

/// Refined grid-local minima (periodic 3^n neighbourhood, non-strict) of |psi|
/// with refined value below the threshold (default_zero_threshold if absent).
std::vector<ZeroCandidate> zero_report(const SpinorField& psi, std::optional<double> threshold = std::nullopt);

nlohmann::json to_json(const std::vector<ZeroCandidate>& zeros, double threshold);

/// plane_wave(b, sigma) + plane_wave(b2, -sigma). For |b + delta| = |b2 + delta| it vanishes
/// on the lines <b - b2, u> in Z (u in lattice coordinates).
SpinorField two_wave_spinor(const GeometryPtr& geom, std::span<const int> b, std::span<const int> b2,
                            const Spinor& sigma);

/// L2-normalized combination of the eigenspace members that vanishes at grid
/// point p. Needs an eigenspace of complex dimension >= 4 (else std::invalid_argument).
SpinorField eigenspinor_with_zero(const std::vector<const EigenPair*>& eigenspace, std::size_t p);

/// sum over b in a half space, |b_i| <= bandwidth, of c_b cos(2 pi b.u) + s_b sin(2 pi b.u)
/// with c_b, s_b uniform in [-1, 1], rescaled so that |t f| <= 0.3 on the grid.
RealGrid random_trig_bump(const GeometryPtr& geom, int bandwidth, double t, std::mt19937_64& rng);

/// Per-trial generator: std::seed_seq{low 32 bits, high 32 bits, trial}.
std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t trial);

struct TrialResult {
    std::uint64_t trial;
    bool solver_failure = false;
    bool all_simple = false;
    bool nowhere_zero = false;
    double min_modulus = 0.0;  ///< smallest refined |psi| over the checked eigenspinors
    int zero_candidates = 0;
    std::vector<double> eigenvalues;  ///< lambda_{-m}..lambda_m
};

struct GenericityStats {
    std::uint64_t trials = 0;
    std::uint64_t solver_failures = 0;
    std::uint64_t all_simple_count = 0;
    std::uint64_t all_nowhere_zero_count = 0;
    std::uint64_t both_count = 0;
    std::vector<TrialResult> per_trial;
};

inline constexpr int bump_bandwidth = 3;

/// Master seed of the shipped genericity and splitting runs.
inline constexpr std::uint64_t default_master_seed = 7;

/// K seeded bumps f at t = t0: counts trials whose enumerated eigenvalues are
/// all simple and whose eigenspinors (the J-adapted bases) have empty zero reports.
GenericityStats genericity_trial(const GeometryPtr& geom, int m, int K, std::uint64_t seed, double t0,
                                 const SolverOptions& opts = {});

nlohmann::json to_json(const GenericityStats& stats);

/// gamma - 1: total zero order of a positive harmonic spinor on a closed spin
/// surface of genus gamma. For the genus-2 Hitchin structure the budget 1 means
/// a single simple zero. Throws std::invalid_argument for negative genus.
int poincare_hopf_budget(int genus);

/// A-hat genus of the complete intersection V^{2k}(d):
/// 2^{-2k} d / (2k + 1)! prod_{j=1..k} (d^2 - 4 j^2). Since dim ker D >= |A-hat|,
/// large d forces many harmonic spinors. Requires k >= 1 and d even, d >= 2.
Rational a_hat_complete_intersection(int k, int d);

}  // namespace spinzero

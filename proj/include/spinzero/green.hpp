#pragma once

// Green's kernels of D - lambda on R^2 and R^3 and their flat-torus analogue.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spinzero/clifford.hpp"
#include "spinzero/torus.hpp"

namespace spinzero {

/// Radial profile f_lambda(r). n = 2: -ln(r)/(2 pi) at lambda = 0, otherwise
/// -Y_0(|lambda| r)/4 + (ln|lambda| - ln 2 + c) J_0(|lambda| r)/(2 pi).
/// n = 3: 1/(4 pi r) at lambda = 0, otherwise the Y_{1/2} form, which equals
/// cos(lambda r)/(4 pi r). Throws std::domain_error for r <= 0.
double f_lambda(int n, double lambda, double r);

struct RadialProfile {
    double g, dg, d2g;
};

/// f_lambda with its first two radial derivatives, coded analytically.
RadialProfile green_profile(int n, double lambda, double r);

/// g'' + (n - 1) g' / r + lambda^2 g at r > 0.
double ode_residual(int n, double lambda, double r);

class GreenKernel {
public:
    GreenKernel(int n, double lambda);

    int dim() const { return n_; }
    double lambda() const { return lambda_; }
    const SpinorFiber& fiber() const { return fiber_; }

    /// (g'(|x|)/|x|) x.gamma + lambda g(|x|) gamma. Throws for x = 0.
    Spinor eval(std::span<const double> x, const Spinor& gamma) const;

    /// eval minus the two leading singular terms:
    /// n = 2: -x.gamma/(2 pi |x|^2) - (lambda/2 pi) ln|x| gamma,
    /// n = 3: -x.gamma/(4 pi |x|^3) + lambda gamma/(4 pi |x|).
    Spinor expansion_remainder(std::span<const double> x, const Spinor& gamma) const;

private:
    int n_;
    double lambda_;
    SpinorFiber fiber_;
};

/// Compactly supported or rapidly decaying test spinor with an analytic Dirac image.
///   gaussian: exp(-a |x - c|^2) (sigma0 + x.sigma1)
///   annulus:  beta((|x| - rho)/w) (sigma0 + x.sigma1), beta(s) = exp(-1/(1 - s^2)) on |s| < 1
struct TestSpinor {
    enum class Kind { gaussian, annulus };

    Kind kind = Kind::gaussian;
    double a = 1.0;
    Eigen::VectorXd center;
    double rho = 1.0;
    double width = 0.5;
    Spinor sigma0 = Spinor::Zero();
    Spinor sigma1 = Spinor::Zero();

    static TestSpinor gaussian(double a, Eigen::VectorXd center, Spinor sigma0, Spinor sigma1);
    static TestSpinor annulus(int n, double rho, double width, Spinor sigma0, Spinor sigma1);

    Spinor value(const SpinorFiber& fiber, std::span<const double> x) const;
    Spinor dirac(const SpinorFiber& fiber, std::span<const double> x) const;
    /// Radii bounding the support (numerically, for the Gaussian) around the origin.
    double inner_radius() const;
    double outer_radius() const;
};

struct IdentityCheck {
    cplx integral;
    cplx expected;
    double residual;
    int levels;
};

/// Integral of <(D - lambda) psi, G gamma> over R^n minus {0}, compared with
/// <psi(0), gamma>. Polar/spherical product Gauss rule centred on the pole,
/// doubled until two successive values agree to tol/2.
/// Throws std::runtime_error (with both values) if that does not happen.
IdentityCheck verify_distributional_identity(const GreenKernel& kern, const TestSpinor& psi,
                                             const Spinor& gamma, double tol);

/// Smooth spectral filter applied to torus mode sums: exp(-9 (|k|/cutoff)^2), 0 beyond cutoff.
double mode_filter(double k_norm, double cutoff);

/// (1/V) sum_k filter(|k|) exp(2 pi i kappa.x) (M_k + lambda)/(4 pi^2 |kappa|^2 - lambda^2) gamma
/// over modes k = b + delta, M_k = 2 pi i kappa.gamma. Throws std::domain_error when
/// lambda is within 1e-6 of the flat spectrum and std::invalid_argument when x is 0 or
/// outside the centred fundamental domain.
Spinor torus_green_mode_sum(const TorusSpinGeometry& geom, double lambda, std::span<const double> x,
                            const Spinor& gamma, double cutoff);

}  // namespace spinzero

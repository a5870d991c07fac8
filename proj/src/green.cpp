#include "spinzero/green.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "spinzero/special_fn.hpp"

namespace spinzero {

namespace {

constexpr double pi = std::numbers::pi;
using Gauss20 = boost::math::quadrature::gauss<double, 20>;

void require_dim(int n) {
    if (n != 2 && n != 3) throw std::invalid_argument("green: dimension must be 2 or 3");
}

double norm_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// Gauss-Legendre rule of order 20 mapped to [lo, hi], appended to (nodes, weights).
void push_panel(double lo, double hi, std::vector<double>& nodes, std::vector<double>& weights) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    const auto& xs = Gauss20::abscissa();
    const auto& ws = Gauss20::weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        nodes.push_back(mid - half * xs[i]);
        weights.push_back(half * ws[i]);
        nodes.push_back(mid + half * xs[i]);
        weights.push_back(half * ws[i]);
    }
}

}  // namespace

RadialProfile green_profile(int n, double lambda, double r) {
    require_dim(n);
    if (!(r > 0.0)) throw std::domain_error("green: radius must be positive");
    const double a = std::abs(lambda);
    if (n == 2) {
        if (a == 0.0) return {-std::log(r) / (2.0 * pi), -1.0 / (2.0 * pi * r), 1.0 / (2.0 * pi * r * r)};
        const double c = (std::log(a) - std::numbers::ln2 + euler_gamma) / (2.0 * pi);
        const auto m = BesselOrder::zero();
        const double z = a * r;
        return {-0.25 * bessel_y(m, z) + c * bessel_j(m, z),
                a * (-0.25 * bessel_y_prime(m, z) + c * bessel_j_prime(m, z)),
                a * a * (-0.25 * bessel_y_second(m, z) + c * bessel_j_second(m, z))};
    }
    if (a == 0.0) return {1.0 / (4.0 * pi * r), -1.0 / (4.0 * pi * r * r), 2.0 / (4.0 * pi * r * r * r)};
    // -(pi |lambda|^{1/2} / (2^{1/2} Gamma(1/2) 4 pi)) r^{-1/2} Y_{1/2}(|lambda| r)
    const double k = -pi * std::sqrt(a) / (std::sqrt(2.0) * gamma_half_integer(1) * 4.0 * pi);
    const auto m = BesselOrder::half();
    const double z = a * r;
    const double u = bessel_y(m, z), du = a * bessel_y_prime(m, z), d2u = a * a * bessel_y_second(m, z);
    const double h = 1.0 / std::sqrt(r), dh = -0.5 * h / r, d2h = 0.75 * h / (r * r);
    return {k * h * u, k * (dh * u + h * du), k * (d2h * u + 2.0 * dh * du + h * d2u)};
}

double f_lambda(int n, double lambda, double r) { return green_profile(n, lambda, r).g; }

double ode_residual(int n, double lambda, double r) {
    const auto p = green_profile(n, lambda, r);
    return p.d2g + (n - 1) * p.dg / r + lambda * lambda * p.g;
}

GreenKernel::GreenKernel(int n, double lambda) : n_(n), lambda_(lambda), fiber_(SpinorFiber::make(n)) {}

Spinor GreenKernel::eval(std::span<const double> x, const Spinor& gamma) const {
    if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("green: point has wrong dimension");
    const double r = norm_of(x);
    if (r == 0.0) throw std::domain_error("green: kernel is singular at the pole");
    const auto p = green_profile(n_, lambda_, r);
    return (p.dg / r) * fiber_.mul(x, gamma) + lambda_ * p.g * gamma;
}

Spinor GreenKernel::expansion_remainder(std::span<const double> x, const Spinor& gamma) const {
    const Spinor full = eval(x, gamma);
    const double r = norm_of(x);
    const Spinor xg = fiber_.mul(x, gamma);
    if (n_ == 2) return full + xg / (2.0 * pi * r * r) + (lambda_ / (2.0 * pi)) * std::log(r) * gamma;
    return full + xg / (4.0 * pi * r * r * r) - lambda_ / (4.0 * pi * r) * gamma;
}

TestSpinor TestSpinor::gaussian(double a, Eigen::VectorXd center, Spinor sigma0, Spinor sigma1) {
    if (!(a > 0.0)) throw std::invalid_argument("test spinor: Gaussian width must be positive");
    TestSpinor t;
    t.kind = Kind::gaussian;
    t.a = a;
    t.center = std::move(center);
    t.sigma0 = sigma0;
    t.sigma1 = sigma1;
    return t;
}

TestSpinor TestSpinor::annulus(int n, double rho, double width, Spinor sigma0, Spinor sigma1) {
    if (!(width > 0.0) || !(rho > width)) throw std::invalid_argument("test spinor: annulus must exclude the origin");
    TestSpinor t;
    t.kind = Kind::annulus;
    t.center = Eigen::VectorXd::Zero(n);
    t.rho = rho;
    t.width = width;
    t.sigma0 = sigma0;
    t.sigma1 = sigma1;
    return t;
}

namespace {

// Envelope e and its gradient at x.
double envelope(const TestSpinor& t, std::span<const double> x, Eigen::VectorXd& grad) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    if (t.kind == TestSpinor::Kind::gaussian) {
        const Eigen::VectorXd d = xv - t.center;
        const double e = std::exp(-t.a * d.squaredNorm());
        grad = -2.0 * t.a * e * d;
        return e;
    }
    const double r = xv.norm();
    const double s = (r - t.rho) / t.width;
    grad = Eigen::VectorXd::Zero(n);
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    const double e = std::exp(-1.0 / q);
    grad = (e * (-2.0 * s / (q * q)) / (t.width * r)) * xv;
    return e;
}

}  // namespace

Spinor TestSpinor::value(const SpinorFiber& fiber, std::span<const double> x) const {
    Eigen::VectorXd grad;
    const double e = envelope(*this, x, grad);
    return e * (sigma0 + fiber.mul(x, sigma1));
}

Spinor TestSpinor::dirac(const SpinorFiber& fiber, std::span<const double> x) const {
    // D(e chi) = grad e . chi + e D chi, D(x.sigma1) = -n sigma1
    Eigen::VectorXd grad;
    const double e = envelope(*this, x, grad);
    const Spinor chi = sigma0 + fiber.mul(x, sigma1);
    return fiber.mul(std::span<const double>(grad.data(), static_cast<std::size_t>(grad.size())), chi) -
           e * static_cast<double>(fiber.dim()) * sigma1;
}

double TestSpinor::inner_radius() const { return kind == Kind::annulus ? rho - width : 0.0; }

double TestSpinor::outer_radius() const {
    if (kind == Kind::annulus) return rho + width;
    return center.norm() + std::sqrt(40.0 / a);
}

namespace {

struct RadialRule {
    std::vector<double> r, w;
};

RadialRule radial_rule(double r_in, double r_out, int level) {
    RadialRule rule;
    const int scale = 1 << level;
    if (r_in > 0.0) {
        const int panels = 4 * scale;
        for (int i = 0; i < panels; ++i)
            push_panel(r_in + (r_out - r_in) * i / panels, r_in + (r_out - r_in) * (i + 1) / panels, rule.r, rule.w);
        return rule;
    }
    const double r0 = std::min(0.25, 0.5 * r_out);
    const int graded = 20 + 2 * level;
    double lo = r0 * std::ldexp(1.0, -graded);
    push_panel(0.0, lo, rule.r, rule.w);
    for (int j = graded - 1; j >= 0; --j) {
        const double hi = r0 * std::ldexp(1.0, -j);
        push_panel(lo, hi, rule.r, rule.w);
        lo = hi;
    }
    const int panels = static_cast<int>(std::ceil((r_out - r0) / 0.5)) * scale;
    for (int i = 0; i < panels; ++i)
        push_panel(r0 + (r_out - r0) * i / panels, r0 + (r_out - r0) * (i + 1) / panels, rule.r, rule.w);
    return rule;
}

cplx integrate_level(const GreenKernel& kern, const TestSpinor& psi, const Spinor& gamma, int level) {
    const auto& fiber = kern.fiber();
    const int n = kern.dim();
    const double lambda = kern.lambda();
    const auto radial = radial_rule(psi.inner_radius(), psi.outer_radius(), level);
    const int nphi = 16 << level;

    // unit directions with their solid-angle weights
    std::vector<Eigen::Vector3d> dirs;
    std::vector<double> dw;
    if (n == 2) {
        for (int j = 0; j < nphi; ++j) {
            const double phi = 2.0 * pi * j / nphi;
            dirs.emplace_back(std::cos(phi), std::sin(phi), 0.0);
            dw.push_back(2.0 * pi / nphi);
        }
    } else {
        std::vector<double> mu, muw;
        const int panels = 1 << level;
        for (int i = 0; i < panels; ++i)
            push_panel(-1.0 + 2.0 * i / panels, -1.0 + 2.0 * (i + 1) / panels, mu, muw);
        for (std::size_t a = 0; a < mu.size(); ++a) {
            const double s = std::sqrt(std::max(0.0, 1.0 - mu[a] * mu[a]));
            for (int j = 0; j < nphi; ++j) {
                const double phi = 2.0 * pi * j / nphi;
                dirs.emplace_back(s * std::cos(phi), s * std::sin(phi), mu[a]);
                dw.push_back(muw[a] * 2.0 * pi / nphi);
            }
        }
    }

    cplx total{};
    double x[3];
    const std::span<const double> xs(x, static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < radial.r.size(); ++i) {
        const double r = radial.r[i];
        const auto p = green_profile(n, lambda, r);
        const double jac = radial.w[i] * std::pow(r, n - 1);
        cplx shell{};
        for (std::size_t d = 0; d < dirs.size(); ++d) {
            for (int k = 0; k < n; ++k) x[k] = r * dirs[d](k);
            const Spinor g = (p.dg / r) * fiber.mul(xs, gamma) + lambda * p.g * gamma;
            const Spinor lhs = psi.dirac(fiber, xs) - lambda * psi.value(fiber, xs);
            shell += dw[d] * herm_inner(lhs, g);
        }
        total += jac * shell;
    }
    return total;
}

}  // namespace

IdentityCheck verify_distributional_identity(const GreenKernel& kern, const TestSpinor& psi,
                                             const Spinor& gamma, double tol) {
    if (psi.center.size() != kern.dim()) throw std::invalid_argument("identity: test spinor has wrong dimension");
    const std::vector<double> origin(static_cast<std::size_t>(kern.dim()), 0.0);
    const cplx expected = herm_inner(psi.value(kern.fiber(), origin), gamma);
    constexpr int max_level = 6;
    cplx prev = integrate_level(kern, psi, gamma, 0);
    for (int level = 1; level <= max_level; ++level) {
        const cplx cur = integrate_level(kern, psi, gamma, level);
        if (std::abs(cur - prev) <= 0.5 * tol) return {cur, expected, std::abs(cur - expected), level};
        prev = cur;
        if (level == max_level) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "identity: quadrature did not converge, last values " << prev << " and " << cur;
            throw std::runtime_error(msg.str());
        }
    }
    return {};
}

double mode_filter(double k_norm, double cutoff) {
    if (k_norm > cutoff) return 0.0;
    const double t = k_norm / cutoff;
    return std::exp(-9.0 * t * t);
}

Spinor torus_green_mode_sum(const TorusSpinGeometry& geom, double lambda, std::span<const double> x,
                            const Spinor& gamma, double cutoff) {
    const int n = geom.dim();
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("mode sum: point has wrong dimension");
    if (norm_of(x) == 0.0) throw std::invalid_argument("mode sum: x must be nonzero");
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    const Eigen::VectorXd u = geom.lattice().inverse() * xv;
    for (int i = 0; i < n; ++i)
        if (std::abs(u(i)) > 0.5) throw std::invalid_argument("mode sum: x outside the fundamental domain");
    if (!(geom.flat_spectrum_distance(lambda) > 1e-6))
        throw std::domain_error("mode sum: lambda is (numerically) a flat eigenvalue");

    const auto& fiber = geom.fiber();
    const int box = static_cast<int>(std::ceil(cutoff)) + 1;
    std::vector<int> b(static_cast<std::size_t>(n), -box);
    Spinor sum = Spinor::Zero();
    while (true) {
        Eigen::VectorXd k(n);
        for (int i = 0; i < n; ++i) k(i) = b[static_cast<std::size_t>(i)] + geom.delta()[static_cast<std::size_t>(i)];
        const double w = mode_filter(k.norm(), cutoff);
        if (w > 0.0) {
            const Eigen::VectorXd kappa = geom.dual() * k;
            const double denom = 4.0 * pi * pi * kappa.squaredNorm() - lambda * lambda;
            const Spinor mg = cplx{0.0, 2.0 * pi} *
                              fiber.mul(std::span<const double>(kappa.data(), static_cast<std::size_t>(n)), gamma);
            sum += (w / denom) * std::polar(1.0, 2.0 * pi * kappa.dot(xv)) * (mg + lambda * gamma);
        }
        int i = 0;
        while (i < n && ++b[static_cast<std::size_t>(i)] > box) b[static_cast<std::size_t>(i++)] = -box;
        if (i == n) break;
    }
    return sum / geom.volume();
}

}  // namespace spinzero

#include "spinzero/special_fn.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace spinzero {

namespace {

constexpr double pi = std::numbers::pi;

void require_positive(double z) {
    if (!(z > 0.0)) throw std::domain_error("bessel: argument must be positive");
}

BesselInteger01 series01(double z) {
    const double q = -0.25 * z * z;
    const double lg = std::log(0.5 * z) + euler_gamma;
    double j0 = 0, j1 = 0, s0 = 0, s1 = 0;
    double t0 = 1.0;        // q^k / (k!)^2
    double t1 = 1.0;        // q^k / (k! (k+1)!)
    double harmonic = 0.0;  // H_k
    for (int k = 0; k < 60; ++k) {
        if (k > 0) {
            t0 *= q / (double(k) * k);
            t1 *= q / (double(k) * (k + 1));
            harmonic += 1.0 / k;
        }
        j0 += t0;
        j1 += t1;
        s0 += harmonic * t0;
        // psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 c
        s1 += (2.0 * harmonic + 1.0 / (k + 1)) * t1;
        if (std::abs(t0) < 1e-18 * std::abs(j0) && std::abs(t1) < 1e-18 * std::abs(j1)) break;
    }
    j1 *= 0.5 * z;
    BesselInteger01 r{};
    r.j0 = j0;
    r.j1 = j1;
    r.y0 = (2.0 / pi) * (lg * j0 - s0);
    const double lz = std::log(0.5 * z);
    r.y1 = -2.0 / (pi * z) + (2.0 / pi) * lz * j1 - (0.5 * z / pi) * (s1 - 2.0 * euler_gamma * (j1 / (0.5 * z)));
    return r;
}

BesselInteger01 miller01(double z) {
    int top = static_cast<int>(1.2 * z) + 40;
    if (top % 2) ++top;
    std::vector<double> J(static_cast<std::size_t>(top) + 2, 0.0);
    J[static_cast<std::size_t>(top)] = 1e-300;
    for (int n = top; n >= 1; --n) {
        const auto un = static_cast<std::size_t>(n);
        J[un - 1] = (2.0 * n / z) * J[un] - J[un + 1];
        if (std::abs(J[un - 1]) > 1e250)
            for (std::size_t i = un - 1; i <= static_cast<std::size_t>(top); ++i) J[i] *= 1e-250;
    }
    double norm = J[0], ysum = 0.0, y1sum = 0.0;
    for (int k = 1; 2 * k + 1 <= top + 1; ++k) {
        const auto e = static_cast<std::size_t>(2 * k);
        const double sgn = (k % 2) ? -1.0 : 1.0;
        norm += 2.0 * J[e];
        ysum += sgn * J[e] / k;
        y1sum += sgn * (J[e - 1] - J[e + 1]) / k;
    }
    const double lg = std::log(0.5 * z) + euler_gamma;
    BesselInteger01 r{};
    r.j0 = J[0] / norm;
    r.j1 = J[1] / norm;
    r.y0 = (2.0 / pi) * lg * r.j0 - (4.0 / pi) * ysum / norm;
    r.y1 = -2.0 / (pi * z) * r.j0 + (2.0 / pi) * lg * r.j1 + (2.0 / pi) * y1sum / norm;
    return r;
}

}  // namespace

BesselOrder BesselOrder::from_rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("bessel order: zero denominator");
    if (num == 0) return zero();
    if (2 * num == den) return half();
    throw std::invalid_argument("bessel order: only orders 0 and 1/2 are supported");
}

double gamma_half_integer(int twice_x) {
    if (twice_x <= 0) throw std::domain_error("gamma: argument must be positive");
    if (twice_x > 60) throw std::domain_error("gamma: argument outside the tabulated range");
    // Gamma(1) = 1, Gamma(1/2) = sqrt(pi), Gamma(x + 1) = x Gamma(x)
    double value = (twice_x % 2 == 0) ? 1.0 : std::sqrt(pi);
    for (int t = (twice_x % 2 == 0) ? 2 : 1; t < twice_x; t += 2) value *= 0.5 * t;
    return value;
}

BesselInteger01 bessel_integer01(double z) {
    require_positive(z);
    return z < 2.0 ? series01(z) : miller01(z);
}

double bessel_j(BesselOrder m, double z) {
    require_positive(z);
    if (m.is_zero()) return bessel_integer01(z).j0;
    return std::sqrt(2.0 / (pi * z)) * std::sin(z);
}

double bessel_y(BesselOrder m, double z) {
    require_positive(z);
    if (m.is_zero()) return bessel_integer01(z).y0;
    return -std::sqrt(2.0 / (pi * z)) * std::cos(z);
}

double bessel_j_prime(BesselOrder m, double z) {
    require_positive(z);
    if (m.is_zero()) return -bessel_integer01(z).j1;
    const double a = std::sqrt(2.0 / (pi * z));
    return a * (std::cos(z) - std::sin(z) / (2.0 * z));
}

double bessel_y_prime(BesselOrder m, double z) {
    require_positive(z);
    if (m.is_zero()) return -bessel_integer01(z).y1;
    const double a = std::sqrt(2.0 / (pi * z));
    return a * (std::sin(z) + std::cos(z) / (2.0 * z));
}

double bessel_j_second(BesselOrder m, double z) {
    const double mu = m.value();
    return -bessel_j_prime(m, z) / z - (1.0 - mu * mu / (z * z)) * bessel_j(m, z);
}

double bessel_y_second(BesselOrder m, double z) {
    const double mu = m.value();
    return -bessel_y_prime(m, z) / z - (1.0 - mu * mu / (z * z)) * bessel_y(m, z);
}

}  // namespace spinzero

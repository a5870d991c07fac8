#pragma once

namespace spinzero {

/// Bessel order restricted to the two orders the Green's kernels need:
/// 0 (plane) and 1/2 (space).
class BesselOrder {
public:
    static BesselOrder zero() { return BesselOrder(0); }
    static BesselOrder half() { return BesselOrder(1); }
    /// Order num/den; throws std::invalid_argument unless it equals 0 or 1/2.
    static BesselOrder from_rational(long num, long den);

    double value() const { return twice_ * 0.5; }
    bool is_zero() const { return twice_ == 0; }
    bool operator==(const BesselOrder&) const = default;

private:
    explicit BesselOrder(int twice) : twice_(twice) {}
    int twice_;
};

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

/// Gamma(x) for x = twice_x / 2 a positive integer or half-integer, from exact values.
double gamma_half_integer(int twice_x);

double bessel_j(BesselOrder m, double z);
double bessel_y(BesselOrder m, double z);

/// d/dz J_m(z) and d/dz Y_m(z).
double bessel_j_prime(BesselOrder m, double z);
double bessel_y_prime(BesselOrder m, double z);

/// d^2/dz^2 via the Bessel equation z^2 y'' + z y' + (z^2 - m^2) y = 0.
double bessel_j_second(BesselOrder m, double z);
double bessel_y_second(BesselOrder m, double z);

struct BesselInteger01 {
    double j0, j1, y0, y1;
};

/// J_0, J_1, Y_0, Y_1 at z > 0. Power series below z = 2, Miller's backward
/// recurrence normalised by J_0 + 2 sum J_2k = 1 above, with the Neumann
/// series Y_0 = (2/pi)(ln(z/2) + c) J_0 - (4/pi) sum (-1)^k J_2k / k and its
/// derivative for Y_1 (c = Euler's constant).
BesselInteger01 bessel_integer01(double z);

}  // namespace spinzero

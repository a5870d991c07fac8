#pragma once

// Flat spin tori T^n = R^n / Lambda, n in {2, 3}, sampled on a uniform grid.
//
// A spin structure is an offset delta in {0, 1/2}^n of the dual lattice: the
// Fourier modes of a spinor field are k = b + delta, b integer, with physical
// wave vector kappa = Lambda^{-T} k and x -> exp(2 pi i <kappa, x>).
// Fields store the periodic part exp(-2 pi i <delta, u>) psi(x), u = Lambda^{-1} x,
// so the twist never appears on the grid.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spinzero/clifford.hpp"

namespace spinzero {

using RealGrid = Eigen::VectorXd;

class FftPlans;

class TorusSpinGeometry {
public:
    /// lattice: n x n, columns are the lattice basis. delta entries 0 or 0.5.
    /// grid: per-axis sample counts, even and >= 8. Throws std::invalid_argument.
    static std::shared_ptr<const TorusSpinGeometry> make(const Eigen::MatrixXd& lattice,
                                                         std::vector<double> delta,
                                                         std::vector<int> grid);
    /// Unit square / cube lattice.
    static std::shared_ptr<const TorusSpinGeometry> unit(int n, std::vector<double> delta,
                                                         std::vector<int> grid);

    ~TorusSpinGeometry();
    TorusSpinGeometry(const TorusSpinGeometry&) = delete;
    TorusSpinGeometry& operator=(const TorusSpinGeometry&) = delete;

    int dim() const { return n_; }
    const Eigen::MatrixXd& lattice() const { return lattice_; }
    /// Lambda^{-T}: maps dual coordinates to physical wave vectors.
    const Eigen::MatrixXd& dual() const { return dual_; }
    const std::vector<double>& delta() const { return delta_; }
    const std::vector<int>& grid() const { return grid_; }
    std::size_t num_points() const { return npts_; }
    double volume() const { return volume_; }
    double cell_volume() const { return volume_ / static_cast<double>(npts_); }
    const SpinorFiber& fiber() const { return fiber_; }

    /// Row-major multi-index (last axis fastest).
    std::vector<int> unravel(std::size_t p) const;
    std::size_t ravel(std::span<const int> idx) const;  ///< indices taken modulo the grid

    Eigen::VectorXd fractional(std::size_t p) const;
    Eigen::VectorXd point(std::size_t p) const { return lattice_ * fractional(p); }

    /// Integer mode b of FFT slot q, b_i in [-N_i/2, N_i/2 - 1].
    std::vector<int> mode(std::size_t q) const;
    /// Physical wave vector Lambda^{-T}(b + delta) of FFT slot q.
    Eigen::VectorXd wave_vector(std::size_t q) const;
    /// Slot has b_i = -N_i/2 on some untwisted axis (no J-partner inside the band).
    bool is_nyquist(std::size_t q) const;

    /// Flat Dirac multiplier of slot q: 2 pi i kappa.gamma (Nyquist slots: see README).
    const SpinorMatrix& dirac_multiplier(std::size_t q) const { return multiplier_[q]; }
    /// Inverse multiplier, zero on the kappa = 0 slot.
    const SpinorMatrix& dirac_pseudo_inverse(std::size_t q) const { return pinv_[q]; }

    /// Complex dimension of the flat kernel: 2 if delta = 0, else 0.
    int flat_kernel_dim() const;

    /// Distance from lambda to the flat spectrum {+-2 pi |Lambda^{-T}(b + delta)|}.
    double flat_spectrum_distance(double lambda) const;

    /// 2-component interleaved FFT: out_b = (1/N) sum_u in_u exp(-2 pi i b.u).
    void forward_spinor(const cplx* in, cplx* out) const;
    void backward_spinor(const cplx* in, cplx* out) const;
    void forward_scalar(const cplx* in, cplx* out) const;
    void backward_scalar(const cplx* in, cplx* out) const;

private:
    TorusSpinGeometry(const Eigen::MatrixXd& lattice, std::vector<double> delta, std::vector<int> grid);

    int n_;
    Eigen::MatrixXd lattice_;
    Eigen::MatrixXd dual_;
    std::vector<double> delta_;
    std::vector<int> grid_;
    std::size_t npts_;
    double volume_;
    SpinorFiber fiber_;
    std::vector<SpinorMatrix> multiplier_;
    std::vector<SpinorMatrix> pinv_;
    std::unique_ptr<FftPlans> plans_;
};

using GeometryPtr = std::shared_ptr<const TorusSpinGeometry>;

/// Grid of C^2 values; layout [point][component].
class SpinorField {
public:
    explicit SpinorField(GeometryPtr geom);
    SpinorField(GeometryPtr geom, Eigen::VectorXcd values);

    const GeometryPtr& geometry() const { return geom_; }
    const Eigen::VectorXcd& values() const { return values_; }
    Eigen::VectorXcd& values() { return values_; }

    Spinor at(std::size_t p) const { return values_.segment<2>(static_cast<Eigen::Index>(2 * p)); }
    void set(std::size_t p, const Spinor& s) { values_.segment<2>(static_cast<Eigen::Index>(2 * p)) = s; }

    SpinorField& operator+=(const SpinorField& o);
    SpinorField& operator-=(const SpinorField& o);
    SpinorField& operator*=(cplx a);
    friend SpinorField operator+(SpinorField a, const SpinorField& b) { return a += b; }
    friend SpinorField operator-(SpinorField a, const SpinorField& b) { return a -= b; }
    friend SpinorField operator*(cplx a, SpinorField s) { return s *= a; }

    /// Pointwise |psi|.
    RealGrid modulus() const;

private:
    GeometryPtr geom_;
    Eigen::VectorXcd values_;
};

/// Conformal family g_t = (1 + t f) g; valid iff 1 + t f > 0 on every sample.
class ConformalFamily {
public:
    ConformalFamily(GeometryPtr geom, RealGrid f, double t);
    static ConformalFamily flat(GeometryPtr geom);

    const GeometryPtr& geometry() const { return geom_; }
    const RealGrid& f() const { return f_; }
    double t() const { return t_; }
    ConformalFamily at(double t) const { return ConformalFamily(geom_, f_, t); }
    /// (1 + t f)^{-1/4} on the grid.
    const RealGrid& weight() const { return weight_; }

private:
    GeometryPtr geom_;
    RealGrid f_;
    double t_;
    RealGrid weight_;
};

/// exp(2 pi i <b + delta, u>) sigma (stored as exp(2 pi i <b, u>) sigma).
SpinorField plane_wave(const GeometryPtr& geom, std::span<const int> b, const Spinor& sigma);

/// Spectral coefficients c_b of the stored periodic part.
Eigen::VectorXcd fourier_coefficients(const SpinorField& psi);
SpinorField from_fourier(const GeometryPtr& geom, const Eigen::VectorXcd& coeffs);

SpinorField dirac_flat(const SpinorField& psi);
/// Moore-Penrose inverse of the flat operator (zero on constants when delta = 0).
SpinorField dirac_flat_pinv(const SpinorField& psi);
/// (1 + t f)^{-1/4} D ((1 + t f)^{-1/4} psi), products taken pointwise on the grid.
SpinorField dirac_conformal(const ConformalFamily& fam, const SpinorField& psi);
/// -Laplacian as the multiplier 4 pi^2 |kappa|^2.
SpinorField neg_laplacian(const SpinorField& psi);

/// Sum over the grid of <psi, phi> times the cell volume; linear in psi.
cplx l2_inner(const SpinorField& psi, const SpinorField& phi);
double l2_norm(const SpinorField& psi);

/// Spectral gradient of a real grid function (physical coordinates).
std::vector<RealGrid> gradient(const GeometryPtr& geom, const RealGrid& f);
/// grad(f) . psi pointwise.
SpinorField grad_mul(const RealGrid& f, const SpinorField& psi);
SpinorField multiply(const RealGrid& f, const SpinorField& psi);

/// Quaternionic structure applied fiberwise.
SpinorField apply_j(const SpinorField& psi);

/// Random field with coefficients on |b_i| <= bandwidth, uniform in the unit
/// square of C per component; deterministic in seed.
SpinorField band_limited_field(const GeometryPtr& geom, int bandwidth, std::uint64_t seed);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
template <class Rng>
double unit_uniform(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace spinzero

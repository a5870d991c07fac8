#include "spinzero/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fftw3.h>

namespace spinzero {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
const cplx I{0.0, 1.0};

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(const cplx* p) {
    return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

void require_same_geometry(const SpinorField& a, const SpinorField& b) {
    if (a.geometry() != b.geometry()) throw std::invalid_argument("spinor fields live on different geometries");
}

}  // namespace

class FftPlans {
public:
    explicit FftPlans(const std::vector<int>& grid, std::size_t npts) {
        std::lock_guard lock(planner_mutex());
        const int rank = static_cast<int>(grid.size());
        std::vector<cplx> a(2 * npts), b(2 * npts);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        spinor_fwd_ = fftw_plan_many_dft(rank, grid.data(), 2, as_fftw(a.data()), nullptr, 2, 1,
                                         as_fftw(b.data()), nullptr, 2, 1, FFTW_FORWARD, flags);
        spinor_bwd_ = fftw_plan_many_dft(rank, grid.data(), 2, as_fftw(a.data()), nullptr, 2, 1,
                                         as_fftw(b.data()), nullptr, 2, 1, FFTW_BACKWARD, flags);
        scalar_fwd_ = fftw_plan_dft(rank, grid.data(), as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
        scalar_bwd_ = fftw_plan_dft(rank, grid.data(), as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
        if (!spinor_fwd_ || !spinor_bwd_ || !scalar_fwd_ || !scalar_bwd_)
            throw std::runtime_error("fftw: plan creation failed");
    }
    ~FftPlans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(spinor_fwd_);
        fftw_destroy_plan(spinor_bwd_);
        fftw_destroy_plan(scalar_fwd_);
        fftw_destroy_plan(scalar_bwd_);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;

    fftw_plan spinor_fwd_, spinor_bwd_, scalar_fwd_, scalar_bwd_;
};

TorusSpinGeometry::TorusSpinGeometry(const Eigen::MatrixXd& lattice, std::vector<double> delta,
                                     std::vector<int> grid)
    : n_(static_cast<int>(lattice.rows())),
      lattice_(lattice),
      delta_(std::move(delta)),
      grid_(std::move(grid)),
      npts_(1),
      volume_(0.0),
      fiber_(SpinorFiber::make(static_cast<int>(lattice.rows()))) {
    if (lattice.rows() != lattice.cols()) throw std::invalid_argument("torus: lattice must be square");
    if (static_cast<int>(delta_.size()) != n_ || static_cast<int>(grid_.size()) != n_)
        throw std::invalid_argument("torus: delta and grid must have one entry per axis");
    for (double d : delta_)
        if (d != 0.0 && d != 0.5) throw std::invalid_argument("torus: spin-structure offsets must be 0 or 1/2");
    for (int g : grid_) {
        if (g < 8 || g % 2 != 0) throw std::invalid_argument("torus: grid counts must be even and >= 8");
        npts_ *= static_cast<std::size_t>(g);
    }
    const double det = lattice_.determinant();
    if (!(std::abs(det) > 1e-12)) throw std::invalid_argument("torus: lattice is singular");
    volume_ = std::abs(det);
    dual_ = lattice_.inverse().transpose();

    multiplier_.resize(npts_);
    pinv_.resize(npts_);
    for (std::size_t q = 0; q < npts_; ++q) {
        const auto b = mode(q);
        Eigen::VectorXd rest(n_), nyq(n_);
        for (int i = 0; i < n_; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const bool nyquist_axis = delta_[ui] == 0.0 && b[ui] == -grid_[ui] / 2;
            rest(i) = nyquist_axis ? 0.0 : b[ui] + delta_[ui];
            nyq(i) = nyquist_axis ? b[ui] : 0.0;
        }
        const Eigen::VectorXd k_rest = dual_ * rest;
        SpinorMatrix m = two_pi * I * fiber_.clifford_matrix(std::span<const double>(k_rest.data(), k_rest.size()));
        if (nyq.squaredNorm() > 0.0) {
            // no J-partner in the band: Hermitian, J-equivariant, far from zero
            const double shift = two_pi * (k_rest.norm() + (dual_ * nyq).norm());
            m += shift * SpinorMatrix::Identity();
            multiplier_[q] = m;
            pinv_[q] = m.inverse();
            continue;
        }
        multiplier_[q] = m;
        const double k2 = k_rest.squaredNorm();
        pinv_[q] = (k2 == 0.0) ? SpinorMatrix::Zero() : SpinorMatrix(m / (two_pi * two_pi * k2));
    }
    plans_ = std::make_unique<FftPlans>(grid_, npts_);
}

TorusSpinGeometry::~TorusSpinGeometry() = default;

std::shared_ptr<const TorusSpinGeometry> TorusSpinGeometry::make(const Eigen::MatrixXd& lattice,
                                                                 std::vector<double> delta,
                                                                 std::vector<int> grid) {
    if (lattice.rows() != 2 && lattice.rows() != 3)
        throw std::invalid_argument("torus: dimension must be 2 or 3");
    return std::shared_ptr<const TorusSpinGeometry>(
        new TorusSpinGeometry(lattice, std::move(delta), std::move(grid)));
}

std::shared_ptr<const TorusSpinGeometry> TorusSpinGeometry::unit(int n, std::vector<double> delta,
                                                                 std::vector<int> grid) {
    if (n != 2 && n != 3) throw std::invalid_argument("torus: dimension must be 2 or 3");
    return make(Eigen::MatrixXd::Identity(n, n), std::move(delta), std::move(grid));
}

std::vector<int> TorusSpinGeometry::unravel(std::size_t p) const {
    std::vector<int> idx(static_cast<std::size_t>(n_));
    for (int i = n_ - 1; i >= 0; --i) {
        const auto ui = static_cast<std::size_t>(i);
        const auto g = static_cast<std::size_t>(grid_[ui]);
        idx[ui] = static_cast<int>(p % g);
        p /= g;
    }
    return idx;
}

std::size_t TorusSpinGeometry::ravel(std::span<const int> idx) const {
    std::size_t p = 0;
    for (int i = 0; i < n_; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const int g = grid_[ui];
        const int wrapped = ((idx[ui] % g) + g) % g;
        p = p * static_cast<std::size_t>(g) + static_cast<std::size_t>(wrapped);
    }
    return p;
}

Eigen::VectorXd TorusSpinGeometry::fractional(std::size_t p) const {
    const auto idx = unravel(p);
    Eigen::VectorXd u(n_);
    for (int i = 0; i < n_; ++i)
        u(i) = static_cast<double>(idx[static_cast<std::size_t>(i)]) / grid_[static_cast<std::size_t>(i)];
    return u;
}

std::vector<int> TorusSpinGeometry::mode(std::size_t q) const {
    auto idx = unravel(q);
    for (int i = 0; i < n_; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (idx[ui] >= grid_[ui] / 2) idx[ui] -= grid_[ui];
    }
    return idx;
}

Eigen::VectorXd TorusSpinGeometry::wave_vector(std::size_t q) const {
    const auto b = mode(q);
    Eigen::VectorXd k(n_);
    for (int i = 0; i < n_; ++i) k(i) = b[static_cast<std::size_t>(i)] + delta_[static_cast<std::size_t>(i)];
    return dual_ * k;
}

bool TorusSpinGeometry::is_nyquist(std::size_t q) const {
    const auto b = mode(q);
    for (int i = 0; i < n_; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (delta_[ui] == 0.0 && b[ui] == -grid_[ui] / 2) return true;
    }
    return false;
}

int TorusSpinGeometry::flat_kernel_dim() const {
    for (double d : delta_)
        if (d != 0.0) return 0;
    return SpinorFiber::rank();
}

double TorusSpinGeometry::flat_spectrum_distance(double lambda) const {
    // |kappa| >= |b + delta| / ||Lambda^T||, so a box of that radius covers every
    // mode with 2 pi |kappa| <= |lambda| + 1.
    const double radius = (std::abs(lambda) + 1.0) / two_pi * lattice_.norm() + 1.0;
    const int box = static_cast<int>(std::ceil(radius));
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> b(static_cast<std::size_t>(n_), -box);
    while (true) {
        Eigen::VectorXd k(n_);
        for (int i = 0; i < n_; ++i) k(i) = b[static_cast<std::size_t>(i)] + delta_[static_cast<std::size_t>(i)];
        const double ev = two_pi * (dual_ * k).norm();
        best = std::min({best, std::abs(ev - lambda), std::abs(-ev - lambda)});
        int i = 0;
        while (i < n_ && ++b[static_cast<std::size_t>(i)] > box) b[static_cast<std::size_t>(i++)] = -box;
        if (i == n_) break;
    }
    return best;
}

void TorusSpinGeometry::forward_spinor(const cplx* in, cplx* out) const {
    fftw_execute_dft(plans_->spinor_fwd_, as_fftw(in), as_fftw(out));
    const double s = 1.0 / static_cast<double>(npts_);
    for (std::size_t i = 0; i < 2 * npts_; ++i) out[i] *= s;
}

void TorusSpinGeometry::backward_spinor(const cplx* in, cplx* out) const {
    fftw_execute_dft(plans_->spinor_bwd_, as_fftw(in), as_fftw(out));
}

void TorusSpinGeometry::forward_scalar(const cplx* in, cplx* out) const {
    fftw_execute_dft(plans_->scalar_fwd_, as_fftw(in), as_fftw(out));
    const double s = 1.0 / static_cast<double>(npts_);
    for (std::size_t i = 0; i < npts_; ++i) out[i] *= s;
}

void TorusSpinGeometry::backward_scalar(const cplx* in, cplx* out) const {
    fftw_execute_dft(plans_->scalar_bwd_, as_fftw(in), as_fftw(out));
}

SpinorField::SpinorField(GeometryPtr geom)
    : geom_(std::move(geom)), values_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(2 * geom_->num_points()))) {}

SpinorField::SpinorField(GeometryPtr geom, Eigen::VectorXcd values) : geom_(std::move(geom)), values_(std::move(values)) {
    if (values_.size() != static_cast<Eigen::Index>(2 * geom_->num_points()))
        throw std::invalid_argument("spinor field: value array does not match the grid");
}

SpinorField& SpinorField::operator+=(const SpinorField& o) {
    require_same_geometry(*this, o);
    values_ += o.values_;
    return *this;
}

SpinorField& SpinorField::operator-=(const SpinorField& o) {
    require_same_geometry(*this, o);
    values_ -= o.values_;
    return *this;
}

SpinorField& SpinorField::operator*=(cplx a) {
    values_ *= a;
    return *this;
}

RealGrid SpinorField::modulus() const {
    RealGrid m(static_cast<Eigen::Index>(geom_->num_points()));
    for (std::size_t p = 0; p < geom_->num_points(); ++p) m(static_cast<Eigen::Index>(p)) = at(p).norm();
    return m;
}

ConformalFamily::ConformalFamily(GeometryPtr geom, RealGrid f, double t) : geom_(std::move(geom)), f_(std::move(f)), t_(t) {
    if (f_.size() != static_cast<Eigen::Index>(geom_->num_points()))
        throw std::invalid_argument("conformal family: f does not match the grid");
    const RealGrid factor = (1.0 + t_ * f_.array()).matrix();
    if (!(factor.minCoeff() > 0.0))
        throw std::domain_error("conformal family: 1 + t f must be positive on every sample");
    weight_ = factor.array().pow(-0.25).matrix();
}

ConformalFamily ConformalFamily::flat(GeometryPtr geom) {
    const auto n = static_cast<Eigen::Index>(geom->num_points());
    return ConformalFamily(std::move(geom), RealGrid::Zero(n), 0.0);
}

SpinorField plane_wave(const GeometryPtr& geom, std::span<const int> b, const Spinor& sigma) {
    if (static_cast<int>(b.size()) != geom->dim()) throw std::invalid_argument("plane_wave: mode has wrong dimension");
    if (sigma.squaredNorm() == 0.0) throw std::invalid_argument("plane_wave: zero spinor");
    SpinorField psi(geom);
    for (std::size_t p = 0; p < geom->num_points(); ++p) {
        const Eigen::VectorXd u = geom->fractional(p);
        double phase = 0.0;
        for (int i = 0; i < geom->dim(); ++i) phase += b[static_cast<std::size_t>(i)] * u(i);
        psi.set(p, std::polar(1.0, two_pi * phase) * sigma);
    }
    return psi;
}

Eigen::VectorXcd fourier_coefficients(const SpinorField& psi) {
    Eigen::VectorXcd c(psi.values().size());
    psi.geometry()->forward_spinor(psi.values().data(), c.data());
    return c;
}

SpinorField from_fourier(const GeometryPtr& geom, const Eigen::VectorXcd& coeffs) {
    SpinorField psi(geom);
    geom->backward_spinor(coeffs.data(), psi.values().data());
    return psi;
}

namespace {

template <class MultiplierFn>
SpinorField apply_multiplier(const SpinorField& psi, MultiplierFn&& m) {
    const auto& geom = psi.geometry();
    Eigen::VectorXcd c = fourier_coefficients(psi);
    for (std::size_t q = 0; q < geom->num_points(); ++q) {
        auto seg = c.segment<2>(static_cast<Eigen::Index>(2 * q));
        const Spinor v = seg;
        seg = m(q, v);
    }
    return from_fourier(geom, c);
}

}  // namespace

SpinorField dirac_flat(const SpinorField& psi) {
    const auto& g = *psi.geometry();
    return apply_multiplier(psi, [&](std::size_t q, const Spinor& v) -> Spinor { return g.dirac_multiplier(q) * v; });
}

SpinorField dirac_flat_pinv(const SpinorField& psi) {
    const auto& g = *psi.geometry();
    return apply_multiplier(psi, [&](std::size_t q, const Spinor& v) -> Spinor { return g.dirac_pseudo_inverse(q) * v; });
}

SpinorField neg_laplacian(const SpinorField& psi) {
    const auto& g = *psi.geometry();
    return apply_multiplier(psi, [&](std::size_t q, const Spinor& v) -> Spinor {
        return two_pi * two_pi * g.wave_vector(q).squaredNorm() * v;
    });
}

SpinorField multiply(const RealGrid& f, const SpinorField& psi) {
    if (f.size() != static_cast<Eigen::Index>(psi.geometry()->num_points()))
        throw std::invalid_argument("multiply: grid function does not match the field");
    SpinorField out = psi;
    for (Eigen::Index p = 0; p < f.size(); ++p) out.values().segment<2>(2 * p) *= f(p);
    return out;
}

SpinorField dirac_conformal(const ConformalFamily& fam, const SpinorField& psi) {
    if (fam.geometry() != psi.geometry()) throw std::invalid_argument("dirac_conformal: geometry mismatch");
    return multiply(fam.weight(), dirac_flat(multiply(fam.weight(), psi)));
}

cplx l2_inner(const SpinorField& psi, const SpinorField& phi) {
    require_same_geometry(psi, phi);
    return phi.values().dot(psi.values()) * psi.geometry()->cell_volume();
}

double l2_norm(const SpinorField& psi) {
    return std::sqrt(psi.values().squaredNorm() * psi.geometry()->cell_volume());
}

std::vector<RealGrid> gradient(const GeometryPtr& geom, const RealGrid& f) {
    const auto npts = geom->num_points();
    if (f.size() != static_cast<Eigen::Index>(npts)) throw std::invalid_argument("gradient: grid mismatch");
    Eigen::VectorXcd fc = f.cast<cplx>();
    Eigen::VectorXcd fh(fc.size());
    geom->forward_scalar(fc.data(), fh.data());
    std::vector<RealGrid> grad;
    const int n = geom->dim();
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXcd dh(fh.size());
        for (std::size_t q = 0; q < npts; ++q) {
            const auto b = geom->mode(q);
            bool nyquist = false;
            Eigen::VectorXd bv(n);
            for (int i = 0; i < n; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                nyquist = nyquist || b[ui] == -geom->grid()[ui] / 2;
                bv(i) = b[ui];
            }
            const double kj = (geom->dual() * bv)(j);
            dh(static_cast<Eigen::Index>(q)) = nyquist ? cplx{} : two_pi * I * kj * fh(static_cast<Eigen::Index>(q));
        }
        Eigen::VectorXcd d(fh.size());
        geom->backward_scalar(dh.data(), d.data());
        grad.push_back(d.real());
    }
    return grad;
}

SpinorField grad_mul(const RealGrid& f, const SpinorField& psi) {
    const auto& geom = psi.geometry();
    const auto grad = gradient(geom, f);
    SpinorField out(geom);
    std::vector<double> g(static_cast<std::size_t>(geom->dim()));
    for (std::size_t p = 0; p < geom->num_points(); ++p) {
        for (int j = 0; j < geom->dim(); ++j) g[static_cast<std::size_t>(j)] = grad[static_cast<std::size_t>(j)](static_cast<Eigen::Index>(p));
        out.set(p, geom->fiber().mul(g, psi.at(p)));
    }
    return out;
}

SpinorField apply_j(const SpinorField& psi) {
    // stored part phi -> exp(-2 pi i <2 delta, u>) C conj(phi)
    const auto& geom = psi.geometry();
    SpinorField out(geom);
    for (std::size_t p = 0; p < geom->num_points(); ++p) {
        const Eigen::VectorXd u = geom->fractional(p);
        double phase = 0.0;
        for (int i = 0; i < geom->dim(); ++i) phase -= 2.0 * geom->delta()[static_cast<std::size_t>(i)] * u(i);
        out.set(p, std::polar(1.0, two_pi * phase) * geom->fiber().quaternionic(psi.at(p)));
    }
    return out;
}

SpinorField band_limited_field(const GeometryPtr& geom, int bandwidth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(2 * geom->num_points()));
    for (std::size_t q = 0; q < geom->num_points(); ++q) {
        const auto b = geom->mode(q);
        bool inside = true;
        for (int x : b) inside = inside && std::abs(x) <= bandwidth;
        if (!inside) continue;
        for (int comp = 0; comp < 2; ++comp) {
            const double re = 2.0 * unit_uniform(rng) - 1.0;
            const double im = 2.0 * unit_uniform(rng) - 1.0;
            c(static_cast<Eigen::Index>(2 * q + static_cast<std::size_t>(comp))) = cplx{re, im};
        }
    }
    return from_fourier(geom, c);
}

}  // namespace spinzero

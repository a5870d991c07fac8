#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace spinzero {

using cplx = std::complex<double>;
using Spinor = Eigen::Vector2cd;
using SpinorMatrix = Eigen::Matrix2cd;

/// Hermitian inner product on C^N, complex linear in the first slot.
inline cplx herm_inner(const Spinor& a, const Spinor& b) { return b.dot(a); }

/// Real part of the Hermitian inner product.
inline double real_inner(const Spinor& a, const Spinor& b) { return herm_inner(a, b).real(); }

/// Spinor fiber Sigma_n for n in {2, 3}; rank N = 2 in both cases.
///
/// Convention: gamma_j = i * sigma_j with the Pauli matrices sigma_j, so the
/// n = 2 fiber is the n = 3 fiber restricted to the first two generators.
/// The n = 3 volume element gamma_1 gamma_2 gamma_3 equals +Id.
/// The quaternionic structure is J(phi) = C * conj(phi), C = [[0, 1], [-1, 0]].
class SpinorFiber {
public:
    static SpinorFiber make(int n);

    int dim() const { return n_; }
    static constexpr int rank() { return 2; }

    const SpinorMatrix& gamma(int i) const { return gammas_[static_cast<std::size_t>(i)]; }
    const SpinorMatrix& j_matrix() const { return j_; }

    /// Matrix of Clifford multiplication by the vector X: sum_i X_i gamma_i.
    SpinorMatrix clifford_matrix(std::span<const double> X) const;

    Spinor mul(std::span<const double> X, const Spinor& phi) const { return clifford_matrix(X) * phi; }

    /// Clifford multiplication by the basis vector e_i.
    Spinor mul_basis(int i, const Spinor& phi) const { return gamma(i) * phi; }

    Spinor quaternionic(const Spinor& phi) const { return j_ * phi.conjugate(); }

    /// gamma_1 ... gamma_n.
    SpinorMatrix volume_element() const;

private:
    explicit SpinorFiber(int n);

    int n_;
    std::vector<SpinorMatrix> gammas_;
    SpinorMatrix j_;
};

Spinor clifford_mul(const SpinorFiber& fiber, std::span<const double> X, const Spinor& phi);

/// (phi, e1.phi, e2.phi, e1.e2.phi) for n = 2 and (phi, e1.phi, e2.phi, e3.phi)
/// for n = 3; orthogonal for Re<.,.>, each of norm |phi|. Throws on phi = 0.
std::vector<Spinor> real_orthogonal_basis(const SpinorFiber& fiber, const Spinor& phi);

}  // namespace spinzero

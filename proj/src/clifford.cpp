#include "spinzero/clifford.hpp"

#include <stdexcept>
#include <string>

namespace spinzero {

namespace {
const cplx I{0.0, 1.0};
}

SpinorFiber::SpinorFiber(int n) : n_(n) {
    SpinorMatrix s1, s2, s3;
    s1 << 0, 1, 1, 0;
    s2 << 0, -I, I, 0;
    s3 << 1, 0, 0, -1;
    gammas_ = {I * s1, I * s2};
    if (n == 3) gammas_.push_back(I * s3);
    j_ << 0, 1, -1, 0;
}

SpinorFiber SpinorFiber::make(int n) {
    if (n != 2 && n != 3)
        throw std::invalid_argument("spinor fiber: unsupported dimension " + std::to_string(n));
    return SpinorFiber(n);
}

SpinorMatrix SpinorFiber::clifford_matrix(std::span<const double> X) const {
    if (static_cast<int>(X.size()) != n_)
        throw std::invalid_argument("clifford_matrix: vector has wrong dimension");
    SpinorMatrix m = SpinorMatrix::Zero();
    for (int i = 0; i < n_; ++i) m += X[static_cast<std::size_t>(i)] * gamma(i);
    return m;
}

SpinorMatrix SpinorFiber::volume_element() const {
    SpinorMatrix v = SpinorMatrix::Identity();
    for (const auto& g : gammas_) v = v * g;
    return v;
}

Spinor clifford_mul(const SpinorFiber& fiber, std::span<const double> X, const Spinor& phi) {
    return fiber.mul(X, phi);
}

std::vector<Spinor> real_orthogonal_basis(const SpinorFiber& fiber, const Spinor& phi) {
    if (phi.squaredNorm() == 0.0)
        throw std::invalid_argument("real_orthogonal_basis: zero spinor");
    std::vector<Spinor> basis{phi, fiber.mul_basis(0, phi), fiber.mul_basis(1, phi)};
    if (fiber.dim() == 2)
        basis.push_back(fiber.mul_basis(0, fiber.mul_basis(1, phi)));
    else
        basis.push_back(fiber.mul_basis(2, phi));
    return basis;
}

}  // namespace spinzero

#pragma once

// First-order perturbation of Dirac eigenvalues along g_t = (1 + t f) g.

#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "spinzero/spectral.hpp"

namespace spinzero {

/// d/dt of D^{g_t} at t = 0: -(1/2) f D psi - (1/4) grad(f).psi.
SpinorField dirac_t_derivative(const RealGrid& f, const SpinorField& psi);

/// -(lambda/2) sum f |psi|^2 dv for an L2-normalized eigenpair of the flat operator.
double eigenvalue_derivative(const RealGrid& f, const EigenPair& pair);

/// <psi_a, dD psi_b> over an orthonormal basis of an eigenspace (row a, column b).
Eigen::MatrixXcd cluster_derivative_matrix(const RealGrid& f, const std::vector<const EigenPair*>& basis);

class TrackingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Central difference (lambda(h) - lambda(-h)) / (2h) for the simple eigenvalue
/// at enumeration position `index` of the flat operator; the branch at +-h is
/// the eigenspace of largest overlap with the flat eigenspace. Throws
/// TrackingError when that overlap is below 0.9 or the eigenvalue is not simple.
double fd_derivative(const GeometryPtr& geom, const RealGrid& f, int index, double h, const SolverOptions& opts = {});

struct BranchDerivative {
    double analytic;  ///< eigenvalue of the cluster derivative matrix
    double fd;        ///< central difference along the matched branch
    int dim;          ///< complex dimension of the branch
    double overlap;   ///< smaller of the two subspace overlaps at +-h
};

/// Branches through the (possibly degenerate) eigenspace at `index`: analytic
/// derivatives from the cluster derivative matrix, each matched at +-h to the
/// perturbed eigenspaces by optimal overlap assignment. Sorted by `analytic`.
std::vector<BranchDerivative> fd_branch_derivatives(const GeometryPtr& geom, const RealGrid& f, int index, double h,
                                                    const SolverOptions& opts = {});

struct SplitRow {
    double t;
    int branch;
    int position;  ///< enumeration index at this t
    double lambda;
    Simplicity simplicity;
    double min_gap;
};

struct SplitReport {
    std::vector<int> positions;  ///< enumeration positions of the initial cluster
    std::vector<SplitRow> rows;
    /// Smallest t from which every tracked eigenvalue stays simple, if any.
    std::optional<double> split_t;
    double final_min_gap = 0.0;
    bool final_all_simple = false;
};

/// Follows the eigenvalues of the non-simple eigenspace at enumeration
/// position `index` (at t_grid[0]) along t_grid. The per-t gap is the smallest
/// cluster gap among the tracked eigenvalues, 0 while any of them is multiple.
/// Branch ids follow eigenspace overlap between consecutive t.
/// Throws std::invalid_argument if the initial eigenvalue is simple or the grid
/// is not increasing, std::domain_error on positivity violation.
SplitReport split_experiment(const GeometryPtr& geom, const RealGrid& f, int index, const std::vector<double>& t_grid,
                             const SolverOptions& opts = {});

void write_split_csv(std::ostream& out, const SplitReport& report);

}  // namespace spinzero

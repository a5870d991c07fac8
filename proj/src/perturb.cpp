#include "spinzero/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace spinzero {

namespace {

// Sum of |<psi_a, phi_c>|^2 over the two (L2-orthonormal) families.
double captured(const std::vector<const EigenPair*>& a, const std::vector<const EigenPair*>& c) {
    double s = 0.0;
    for (const auto* x : a)
        for (const auto* y : c) s += std::norm(l2_inner(x->psi, y->psi));
    return s;
}

std::vector<const EigenPair*> members(const SpectrumReport& rep, const Cluster& c) {
    std::vector<const EigenPair*> out;
    for (int p : c.members) out.push_back(&rep.pairs[static_cast<std::size_t>(p)]);
    return out;
}

// Injective assignment rows -> columns maximizing the summed score; rows <= cols <= 8.
std::vector<int> best_assignment(const Eigen::MatrixXd& score) {
    const auto rows = static_cast<int>(score.rows()), cols = static_cast<int>(score.cols());
    std::vector<int> perm(static_cast<std::size_t>(cols));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best;
    double best_total = -1.0;
    do {
        double total = 0.0;
        for (int r = 0; r < rows; ++r) total += score(r, perm[static_cast<std::size_t>(r)]);
        if (total > best_total + 1e-12) {
            best_total = total;
            best.assign(perm.begin(), perm.begin() + rows);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

int solve_depth(int index) { return std::abs(index) + 1; }

}  // namespace

SpinorField dirac_t_derivative(const RealGrid& f, const SpinorField& psi) {
    SpinorField out = multiply(f, dirac_flat(psi));
    out *= -0.5;
    SpinorField g = grad_mul(f, psi);
    g *= -0.25;
    return out += g;
}

double eigenvalue_derivative(const RealGrid& f, const EigenPair& pair) {
    const RealGrid density = pair.psi.modulus().array().square().matrix();
    return -0.5 * pair.lambda * f.dot(density) * pair.psi.geometry()->cell_volume();
}

Eigen::MatrixXcd cluster_derivative_matrix(const RealGrid& f, const std::vector<const EigenPair*>& basis) {
    const auto d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index b = 0; b < d; ++b) {
        const SpinorField dpsi = dirac_t_derivative(f, basis[static_cast<std::size_t>(b)]->psi);
        for (Eigen::Index a = 0; a < d; ++a) m(a, b) = l2_inner(dpsi, basis[static_cast<std::size_t>(a)]->psi);
    }
    return 0.5 * (m + m.adjoint());
}

double fd_derivative(const GeometryPtr& geom, const RealGrid& f, int index, double h, const SolverOptions& opts) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_derivative: step must be positive");
    const auto flat = eigensolve(ConformalFamily::flat(geom), solve_depth(index), opts);
    const auto ref = flat.eigenspace(index);
    if (ref.size() != 2) throw TrackingError("fd_derivative: eigenvalue is not simple at t = 0");
    double lam[2];
    for (int side = 0; side < 2; ++side) {
        const double t = side == 0 ? h : -h;
        const auto rep = eigensolve(ConformalFamily(geom, f, t), solve_depth(index), opts);
        double best = -1.0;
        for (const auto& c : rep.clusters) {
            const double o = captured(ref, members(rep, c)) / static_cast<double>(std::max<std::size_t>(2, c.members.size()));
            if (o > best) {
                best = o;
                lam[side] = c.lambda;
            }
        }
        if (best < 0.9) throw TrackingError("fd_derivative: branch overlap below 0.9");
    }
    return (lam[0] - lam[1]) / (2.0 * h);
}

std::vector<BranchDerivative> fd_branch_derivatives(const GeometryPtr& geom, const RealGrid& f, int index, double h,
                                                    const SolverOptions& opts) {
    if (!(h > 0.0)) throw std::invalid_argument("fd_branch_derivatives: step must be positive");
    const auto flat = eigensolve(ConformalFamily::flat(geom), solve_depth(index), opts);
    const auto basis = flat.eigenspace(index);
    const Eigen::MatrixXcd m = cluster_derivative_matrix(f, basis);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);

    // branches: groups of equal derivative, each with a reference basis
    struct Branch {
        double nu;
        std::vector<EigenPair> refs;
    };
    std::vector<Branch> branches;
    const auto d = static_cast<Eigen::Index>(basis.size());
    for (Eigen::Index j = 0; j < d; ++j) {
        const double nu = es.eigenvalues()(j);
        if (branches.empty() || std::abs(nu - branches.back().nu) > 1e-7 * std::max(1.0, std::abs(nu)))
            branches.push_back({nu, {}});
        SpinorField v(geom);
        for (Eigen::Index a = 0; a < d; ++a) {
            SpinorField term = basis[static_cast<std::size_t>(a)]->psi;
            term *= es.eigenvectors()(a, j);
            v += term;
        }
        branches.back().refs.push_back({basis.front()->lambda, v, 0.0, -1});
    }
    if (branches.size() > 8) throw TrackingError("fd_branch_derivatives: too many branches to assign");

    std::vector<BranchDerivative> out(branches.size());
    for (std::size_t i = 0; i < branches.size(); ++i) {
        out[i].analytic = branches[i].nu;
        out[i].dim = static_cast<int>(branches[i].refs.size());
        out[i].overlap = 1.0;
    }
    for (int side = 0; side < 2; ++side) {
        const double t = side == 0 ? h : -h;
        const auto rep = eigensolve(ConformalFamily(geom, f, t), solve_depth(index), opts);
        std::vector<std::size_t> cand;
        for (std::size_t c = 0; c < rep.clusters.size(); ++c)
            if (captured(basis, members(rep, rep.clusters[c])) > 0.05) cand.push_back(c);
        if (cand.size() < branches.size() || cand.size() > 8)
            throw TrackingError("fd_branch_derivatives: perturbed eigenspaces do not match the branches");
        Eigen::MatrixXd score(static_cast<Eigen::Index>(branches.size()), static_cast<Eigen::Index>(cand.size()));
        for (std::size_t i = 0; i < branches.size(); ++i) {
            std::vector<const EigenPair*> refs;
            for (const auto& r : branches[i].refs) refs.push_back(&r);
            for (std::size_t c = 0; c < cand.size(); ++c) {
                const auto& cl = rep.clusters[cand[c]];
                score(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                    captured(refs, members(rep, cl)) /
                    static_cast<double>(std::max(refs.size(), cl.members.size()));
            }
        }
        const auto assign = best_assignment(score);
        for (std::size_t i = 0; i < branches.size(); ++i) {
            const auto c = static_cast<std::size_t>(assign[i]);
            const double o = score(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
            out[i].overlap = std::min(out[i].overlap, o);
            if (o < 0.9) throw TrackingError("fd_branch_derivatives: branch overlap below 0.9");
            out[i].fd += (side == 0 ? 1.0 : -1.0) * rep.clusters[cand[c]].lambda / (2.0 * h);
        }
    }
    return out;
}

SplitReport split_experiment(const GeometryPtr& geom, const RealGrid& f, int index, const std::vector<double>& t_grid,
                             const SolverOptions& opts) {
    if (t_grid.empty()) throw std::invalid_argument("split_experiment: empty t-grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("split_experiment: t-grid must increase");
    // fail early on positivity anywhere along the grid
    for (double t : t_grid) ConformalFamily(geom, f, t);

    SplitReport report;
    auto rep = eigensolve(ConformalFamily(geom, f, t_grid[0]), solve_depth(index), opts);
    int start_cluster = -1;
    for (const auto& e : rep.enumeration)
        if (e.index == index) start_cluster = e.cluster;
    if (start_cluster < 0) throw std::invalid_argument("split_experiment: index not enumerated");
    if (rep.clusters[static_cast<std::size_t>(start_cluster)].simplicity == Simplicity::simple)
        throw std::invalid_argument("split_experiment: initial eigenvalue is already simple");
    for (const auto& e : rep.enumeration)
        if (e.cluster == start_cluster) report.positions.push_back(e.index);
    int depth = 0;
    for (int p : report.positions) depth = std::max(depth, std::abs(p));

    const std::size_t nb = report.positions.size();
    std::vector<std::vector<EigenPair>> prev(nb);  // per-branch eigenspace at the previous t
    std::vector<int> branch_of_position(nb);        // position slot -> branch id
    std::iota(branch_of_position.begin(), branch_of_position.end(), 0);
    std::vector<bool> all_simple;

    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (k > 0) rep = eigensolve(ConformalFamily(geom, f, t_grid[k]), depth, opts);
        std::vector<const Cluster*> cl(nb);
        for (std::size_t s = 0; s < nb; ++s)
            for (const auto& e : rep.enumeration)
                if (e.index == report.positions[s]) cl[s] = &rep.cluster_of(e);

        if (k > 0) {
            Eigen::MatrixXd score(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
            for (std::size_t b = 0; b < nb; ++b) {
                std::vector<const EigenPair*> refs;
                for (const auto& r : prev[b]) refs.push_back(&r);
                for (std::size_t s = 0; s < nb; ++s)
                    score(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(s)) =
                        captured(refs, members(rep, *cl[s])) /
                        static_cast<double>(std::max(refs.size(), cl[s]->members.size()));
            }
            const auto assign = best_assignment(score);
            for (std::size_t b = 0; b < nb; ++b) branch_of_position[static_cast<std::size_t>(assign[b])] = static_cast<int>(b);
        }

        double gap = std::numeric_limits<double>::infinity();
        bool simple = true;
        for (std::size_t s = 0; s < nb; ++s) {
            simple = simple && cl[s]->simplicity == Simplicity::simple;
            gap = std::min(gap, cl[s]->simplicity == Simplicity::multiple ? 0.0 : cl[s]->gap);
        }
        for (std::size_t s = 0; s < nb; ++s) {
            report.rows.push_back({t_grid[k], branch_of_position[s], report.positions[s], cl[s]->lambda,
                                   cl[s]->simplicity, gap});
            auto& slot = prev[static_cast<std::size_t>(branch_of_position[s])];
            slot.clear();
            for (int p : cl[s]->members) slot.push_back(rep.pairs[static_cast<std::size_t>(p)]);
        }
        all_simple.push_back(simple);
        report.final_min_gap = gap;
    }
    report.final_all_simple = all_simple.back();
    for (std::size_t k = all_simple.size(); k > 0 && all_simple[k - 1]; --k) report.split_t = t_grid[k - 1];
    return report;
}

void write_split_csv(std::ostream& out, const SplitReport& report) {
    out << "t,branch,lambda,simple,min_gap\n";
    char line[160];
    for (const auto& r : report.rows) {
        const int flag = r.simplicity == Simplicity::simple ? 1 : r.simplicity == Simplicity::multiple ? 0 : -1;
        std::snprintf(line, sizeof line, "%.6g,%d,%.10f,%d,%.6e\n", r.t, r.branch, r.lambda, flag, r.min_gap);
        out << line;
    }
}

}  // namespace spinzero

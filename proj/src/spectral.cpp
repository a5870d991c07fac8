#include "spinzero/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace spinzero {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// B = Q A^{-1} D^+ A^{-1} Q on raw coefficient vectors. Its nonzero
// eigenvalues are exactly 1/lambda for the nonzero eigenvalues lambda of
// A D A, with the same eigenvectors.
class InverseOperator {
public:
    explicit InverseOperator(const ConformalFamily& fam) : fam_(fam), inv_weight_(fam.weight().cwiseInverse()) {
        const auto& geom = fam.geometry();
        if (geom->flat_kernel_dim() > 0) {
            const auto n = static_cast<Eigen::Index>(geom->num_points());
            kernel_ = Mat::Zero(2 * n, 2);
            for (Eigen::Index p = 0; p < n; ++p) {
                kernel_(2 * p, 0) = inv_weight_(p);
                kernel_(2 * p + 1, 1) = inv_weight_(p);
            }
            kernel_.col(0).normalize();
            kernel_.col(1).normalize();
        }
    }

    Vec project(const Vec& v) const {
        if (kernel_.cols() == 0) return v;
        return v - kernel_ * (kernel_.adjoint() * v);
    }

    Vec apply(const Vec& v) const {
        const auto& geom = fam_.geometry();
        SpinorField s(geom, project(v));
        s = multiply(inv_weight_, dirac_flat_pinv(multiply(inv_weight_, s)));
        return project(s.values());
    }

    const Mat& kernel_basis() const { return kernel_; }

private:
    const ConformalFamily& fam_;
    RealGrid inv_weight_;
    Mat kernel_;
};

// Orthonormalizes the columns of W against V(:, 0:k) and each other (classical
// Gram-Schmidt applied twice); drops numerically dependent columns.
Mat orthonormalize(const Mat& V, Eigen::Index k, Mat W) {
    Mat out(W.rows(), 0);
    for (Eigen::Index c = 0; c < W.cols(); ++c) {
        Vec w = W.col(c);
        const double w0 = w.norm();
        if (w0 == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            if (k > 0) w -= V.leftCols(k) * (V.leftCols(k).adjoint() * w);
            if (out.cols() > 0) w -= out * (out.adjoint() * w);
        }
        const double wn = w.norm();
        if (wn <= 1e-10 * w0) continue;
        out.conservativeResize(Eigen::NoChange, out.cols() + 1);
        out.col(out.cols() - 1) = w / wn;
    }
    return out;
}

struct RitzResult {
    std::vector<double> mu;
    Mat vectors;
    std::vector<double> residuals;
};

Mat random_block(const InverseOperator& op, Eigen::Index dim, Eigen::Index cols, std::mt19937_64& rng) {
    Mat out(dim, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) out(i, j) = cplx{2.0 * unit_uniform(rng) - 1.0, 2.0 * unit_uniform(rng) - 1.0};
        out.col(j) = op.project(out.col(j));
    }
    return out;
}

// Block Lanczos in Krylov-Schur form for the `want` eigenpairs of largest |mu|.
// With B V = V H + Q R E^T (E selects the last block), the residual of a Ritz
// pair (theta, V y) is ||R y_last||; Ritz vectors are only formed on restart
// and on exit, where the true residuals are confirmed.
RitzResult largest_magnitude(const InverseOperator& op, Eigen::Index dim, int want, const SolverOptions& opts,
                             double ritz_tol, const Mat& warm) {
    const Eigen::Index b = std::max(opts.block_size, 1);
    const Eigen::Index max_basis = std::min<Eigen::Index>(dim, std::max<Eigen::Index>(3 * want, want + 6 * b));
    Mat V(dim, max_basis), Z(dim, max_basis);
    Mat H = Mat::Zero(max_basis, max_basis);
    Eigen::Index k = 0, last = 0;
    std::mt19937_64 rng(opts.seed);

    auto append = [&](const Mat& block) {
        const Eigen::Index add = block.cols();
        for (Eigen::Index j = 0; j < add; ++j) {
            V.col(k + j) = block.col(j);
            Z.col(k + j) = op.apply(block.col(j));
        }
        H.block(0, k, k + add, add) = V.leftCols(k + add).adjoint() * Z.middleCols(k, add);
        H.block(k, 0, add, k) = H.block(0, k, k, add).adjoint();
        last = k;
        k += add;
    };
    // orthonormal continuation of `w` against the basis, topped up with random directions
    auto continuation = [&](Mat w) {
        Mat q = orthonormalize(V, k, std::move(w));
        while (q.cols() < b) {
            Mat extra = orthonormalize(V, k, random_block(op, dim, b - q.cols(), rng));
            Mat both(dim, q.cols() + extra.cols());
            both << q, extra;
            q = orthonormalize(V, k, both);
        }
        return q;
    };

    if (warm.cols() > 0) {
        Mat start = orthonormalize(V, 0, warm);
        if (start.cols() > want) start = Mat(start.leftCols(want));
        append(start);
    } else {
        append(continuation(random_block(op, dim, b, rng)));
    }

    std::vector<double> est;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        // next block and its coupling R
        Mat W = Z.middleCols(last, k - last);
        for (int pass = 0; pass < 2; ++pass) W -= V.leftCols(k) * (V.leftCols(k).adjoint() * W);
        Eigen::HouseholderQR<Mat> qr(W);
        const Mat R = qr.matrixQR().topRows(W.cols()).triangularView<Eigen::Upper>();

        const Mat Hk = 0.5 * (H.topLeftCorner(k, k) + H.topLeftCorner(k, k).adjoint());
        Eigen::SelfAdjointEigenSolver<Mat> es(Hk);
        std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index c) {
            return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(c));
        });
        Mat Y(k, k);
        Eigen::VectorXd theta(k);
        for (Eigen::Index j = 0; j < k; ++j) {
            Y.col(j) = es.eigenvectors().col(order[static_cast<std::size_t>(j)]);
            theta(j) = es.eigenvalues()(order[static_cast<std::size_t>(j)]);
        }
        const Eigen::Index nw = std::min<Eigen::Index>(want, k);
        est.assign(static_cast<std::size_t>(nw), 0.0);
        bool done = nw == want;
        for (Eigen::Index j = 0; j < nw; ++j) {
            est[static_cast<std::size_t>(j)] = (R * Y.col(j).segment(last, k - last)).norm();
            done = done && est[static_cast<std::size_t>(j)] <= ritz_tol * std::abs(theta(0));
        }
        if (done) {
            RitzResult out;
            out.vectors = V.leftCols(k) * Y.leftCols(nw);
            const Mat res = Z.leftCols(k) * Y.leftCols(nw) - out.vectors * theta.head(nw).asDiagonal();
            bool ok = true;
            for (Eigen::Index j = 0; j < nw; ++j) {
                out.residuals.push_back(res.col(j).norm());
                ok = ok && out.residuals.back() <= 10.0 * ritz_tol * std::abs(theta(0));
            }
            if (ok) {
                out.mu.assign(theta.data(), theta.data() + nw);
                return out;
            }
        }
        if (k == dim) throw SolverFailure("eigensolve: Krylov space exhausted", est);

        if (k + W.cols() > max_basis) {
            // thick restart: keep the leading Ritz vectors, continue from W
            const Eigen::Index keep = std::min<Eigen::Index>(k - W.cols(), std::max<Eigen::Index>(want + b, max_basis / 2));
            const Mat Vn = V.leftCols(k) * Y.leftCols(keep);
            const Mat Zn = Z.leftCols(k) * Y.leftCols(keep);
            V.leftCols(keep) = Vn;
            Z.leftCols(keep) = Zn;
            H.topLeftCorner(keep, keep) = Vn.adjoint() * Zn;
            k = keep;
        }
        append(continuation(W));
    }
    throw SolverFailure("eigensolve: no convergence within the iteration budget", est);
}

double cluster_tol(double lambda) { return cluster_relative_width * std::max(1.0, std::abs(lambda)); }

struct RawPair {
    double lambda;
    Vec v;  // unit l2 (coefficient) norm
};

// Rayleigh quotient and L2 residual for the operator A D A.
std::pair<double, double> rayleigh(const ConformalFamily& fam, const Vec& v) {
    const SpinorField s(fam.geometry(), v);
    const SpinorField d = dirac_conformal(fam, s);
    const double lambda = v.dot(d.values()).real() / v.squaredNorm();
    const double res = (d.values() - lambda * v).norm() / v.norm();
    return {lambda, res};
}

// Replaces each group of numerically equal eigenvalues by a J-adapted
// orthonormal basis (psi, J psi, psi', J psi', ...) of the same span.
void j_adapt(const ConformalFamily& fam, std::vector<RawPair>& pairs) {
    const auto& geom = fam.geometry();
    std::size_t start = 0;
    while (start < pairs.size()) {
        std::size_t end = start + 1;
        while (end < pairs.size() &&
               std::abs(pairs[end].lambda - pairs[start].lambda) <= 1e-10 * std::max(1.0, std::abs(pairs[start].lambda)))
            ++end;
        const auto d = static_cast<Eigen::Index>(end - start);
        if (d >= 2) {
            Mat U(pairs[start].v.size(), d);
            for (Eigen::Index j = 0; j < d; ++j) U.col(j) = pairs[start + static_cast<std::size_t>(j)].v;
            Mat basis(U.rows(), 0);
            for (Eigen::Index j = 0; j < d && basis.cols() < d; ++j) {
                Mat cand = orthonormalize(basis, basis.cols(), U.col(j));
                if (cand.cols() == 0) continue;
                const Vec psi = cand.col(0);
                const Vec jpsi = apply_j(SpinorField(geom, psi)).values();
                basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
                basis.col(basis.cols() - 1) = psi;
                if (basis.cols() < d) {
                    Mat jc = orthonormalize(basis, basis.cols(), jpsi);
                    if (jc.cols() == 0) continue;
                    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
                    basis.col(basis.cols() - 1) = jc.col(0);
                }
            }
            if (basis.cols() == d)
                for (Eigen::Index j = 0; j < d; ++j) pairs[start + static_cast<std::size_t>(j)].v = basis.col(j);
        }
        start = end;
    }
}

std::vector<std::pair<std::size_t, std::size_t>> group(const std::vector<double>& sorted) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t s = 0;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i == sorted.size() || sorted[i] - sorted[i - 1] > cluster_tol(sorted[i])) {
            out.emplace_back(s, i);
            s = i;
        }
    }
    return out;
}

}  // namespace

const char* to_string(Simplicity s) {
    switch (s) {
        case Simplicity::simple: return "simple";
        case Simplicity::multiple: return "multiple";
        case Simplicity::indeterminate: return "indeterminate";
    }
    return "?";
}

std::vector<const EigenPair*> SpectrumReport::eigenspace(int index) const {
    for (const auto& e : enumeration) {
        if (e.index != index) continue;
        std::vector<const EigenPair*> out;
        for (int p : cluster_of(e).members) out.push_back(&pairs[static_cast<std::size_t>(p)]);
        return out;
    }
    throw std::out_of_range("spectrum: index not enumerated");
}

double SpectrumReport::max_residual() const {
    double r = kernel_residual;
    for (const auto& p : pairs) r = std::max(r, p.residual);
    return r;
}

int kernel_dim(const ConformalFamily& fam, double* residual) {
    const auto& geom = fam.geometry();
    const int dim = geom->flat_kernel_dim();
    double worst = 0.0;
    if (dim > 0) {
        const RealGrid inv = fam.weight().cwiseInverse();
        for (int c = 0; c < SpinorFiber::rank(); ++c) {
            SpinorField s(geom);
            for (std::size_t p = 0; p < geom->num_points(); ++p) {
                Spinor v = Spinor::Zero();
                v(c) = inv(static_cast<Eigen::Index>(p));
                s.set(p, v);
            }
            const double nrm = l2_norm(s);
            worst = std::max(worst, l2_norm(dirac_conformal(fam, s)) / nrm);
        }
        if (worst > 1e-9) throw std::logic_error("kernel_dim: conformal kernel candidate is not annihilated");
    }
    if (residual) *residual = worst;
    return dim;
}

SpectrumReport eigensolve(const ConformalFamily& fam, int m, const SolverOptions& opts) {
    if (m < 1) throw std::invalid_argument("eigensolve: m must be >= 1");
    const auto& geom = fam.geometry();
    const Eigen::Index dim = static_cast<Eigen::Index>(2 * geom->num_points());
    const double sqrt_cell = std::sqrt(geom->cell_volume());
    const InverseOperator op(fam);

    SpectrumReport report;
    report.m = m;
    report.kernel_dim = kernel_dim(fam, &report.kernel_residual);

    int want = 4 * m + 8;
    Mat warm;
    for (int attempt = 0;; ++attempt) {
        if (want > dim - 4) throw SolverFailure("eigensolve: requested more eigenpairs than the grid supports", {});
        const RitzResult rr = largest_magnitude(op, dim, want, opts, 1e-12, warm);
        warm = rr.vectors;

        std::vector<RawPair> raw;
        for (int j = 0; j < want; ++j) raw.push_back({1.0 / rr.mu[static_cast<std::size_t>(j)], rr.vectors.col(j)});
        std::sort(raw.begin(), raw.end(), [](const RawPair& a, const RawPair& b) { return a.lambda < b.lambda; });

        // everything with |lambda| below the largest computed |lambda| is present;
        // clusters touching that threshold may be incomplete
        double threshold = 0.0;
        for (const auto& p : raw) threshold = std::max(threshold, std::abs(p.lambda));
        std::vector<double> lams;
        for (const auto& p : raw) lams.push_back(p.lambda);
        const auto groups = group(lams);
        auto complete = [&](const std::pair<std::size_t, std::size_t>& g) {
            for (std::size_t i = g.first; i < g.second; ++i)
                if (std::abs(raw[i].lambda) >= threshold - cluster_tol(threshold)) return false;
            return true;
        };
        // per side: complete clusters covering 2m dimensions, then one more computed eigenvalue
        auto side_ok = [&](bool positive) {
            int dims = 0;
            std::vector<std::pair<std::size_t, std::size_t>> side;
            for (const auto& g : groups)
                if ((raw[g.first].lambda > 0) == positive) side.push_back(g);
            if (!positive) std::reverse(side.begin(), side.end());
            for (std::size_t c = 0; c < side.size(); ++c) {
                if (!complete(side[c])) return false;
                dims += static_cast<int>(side[c].second - side[c].first);
                if (dims >= 2 * m) return c + 1 < side.size();
            }
            return false;
        };
        if (!side_ok(true) || !side_ok(false)) {
            if (attempt >= 6) throw SolverFailure("eigensolve: could not resolve the wanted clusters", rr.residuals);
            want = want * 3 / 2;
            continue;
        }

        j_adapt(fam, raw);
        report.pairs.clear();
        std::vector<double> residuals;
        for (auto& p : raw) {
            const auto [lambda, res] = rayleigh(fam, p.v);
            residuals.push_back(res);
            report.pairs.push_back({lambda, SpinorField(geom, p.v / sqrt_cell), res, -1});
        }
        std::stable_sort(report.pairs.begin(), report.pairs.end(),
                         [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
        const double worst = *std::max_element(residuals.begin(), residuals.end());
        if (worst > opts.tolerance)
            throw SolverFailure("eigensolve: residual above tolerance after convergence", residuals);

        lams.clear();
        for (const auto& p : report.pairs) lams.push_back(p.lambda);
        report.clusters.clear();
        for (const auto& g : group(lams)) {
            Cluster c;
            c.dim = static_cast<int>(g.second - g.first);
            c.spread = lams[g.second - 1] - lams[g.first];
            c.lambda = std::accumulate(lams.begin() + static_cast<long>(g.first), lams.begin() + static_cast<long>(g.second), 0.0) / c.dim;
            c.gap = std::numeric_limits<double>::infinity();
            if (g.first > 0) c.gap = std::min(c.gap, lams[g.first] - lams[g.first - 1]);
            if (g.second < lams.size()) c.gap = std::min(c.gap, lams[g.second] - lams[g.second - 1]);
            for (std::size_t i = g.first; i < g.second; ++i) {
                c.members.push_back(static_cast<int>(i));
                report.pairs[i].cluster = static_cast<int>(report.clusters.size());
            }
            const double floor = 10.0 * opts.tolerance * std::max(1.0, std::abs(c.lambda));
            if (c.spread > floor || c.gap < floor || c.dim % 2 != 0)
                c.simplicity = Simplicity::indeterminate;
            else
                c.simplicity = c.dim == 2 ? Simplicity::simple : Simplicity::multiple;
            report.clusters.push_back(std::move(c));
        }

        report.enumeration.clear();
        std::vector<EnumeratedEigenvalue> neg, pos;
        for (std::size_t ci = 0; ci < report.clusters.size(); ++ci) {
            const auto& c = report.clusters[ci];
            auto& side = c.lambda > 0 ? pos : neg;
            const int reps = std::max(1, c.dim / 2);
            for (int r = 0; r < reps; ++r) side.push_back({0, c.lambda, static_cast<int>(ci)});
        }
        std::reverse(neg.begin(), neg.end());
        if (static_cast<int>(neg.size()) < m || static_cast<int>(pos.size()) < m)
            throw SolverFailure("eigensolve: enumeration shorter than m", residuals);
        for (int j = m; j >= 1; --j) {
            auto e = neg[static_cast<std::size_t>(j - 1)];
            e.index = -j;
            report.enumeration.push_back(e);
        }
        for (int j = 1; j <= m; ++j) {
            auto e = pos[static_cast<std::size_t>(j - 1)];
            e.index = j;
            report.enumeration.push_back(e);
        }
        return report;
    }
}

std::vector<Simplicity> check_simple(const SpectrumReport& report) {
    std::vector<Simplicity> out;
    for (const auto& e : report.enumeration) out.push_back(report.cluster_of(e).simplicity);
    return out;
}

void write_json_lines(std::ostream& out, const SpectrumReport& report, const nlohmann::json& config) {
    nlohmann::json head = config;
    head["kernel_dim"] = report.kernel_dim;
    head["m"] = report.m;
    out << head.dump() << '\n';
    auto record = [&](int index, double lambda, int dim, Simplicity s, double residual) {
        nlohmann::json r;
        r["index"] = index;
        std::ostringstream lam;
        lam << std::setprecision(12) << lambda;
        r["lambda"] = std::stod(lam.str());
        r["dimC"] = dim;
        if (s == Simplicity::indeterminate)
            r["simple"] = nullptr;
        else
            r["simple"] = s == Simplicity::simple;
        r["residual"] = residual;
        out << r.dump() << '\n';
    };
    record(0, 0.0, report.kernel_dim, report.kernel_dim == 2 ? Simplicity::simple : Simplicity::multiple,
           report.kernel_residual);
    for (const auto& e : report.enumeration) {
        const auto& c = report.cluster_of(e);
        double res = 0.0;
        for (int p : c.members) res = std::max(res, report.pairs[static_cast<std::size_t>(p)].residual);
        record(e.index, e.lambda, c.dim, c.simplicity, res);
    }
}

}  // namespace spinzero

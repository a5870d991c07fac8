#pragma once

// Eigenpairs of the conformal Dirac operator nearest to zero, grouped into
// eigenspaces, with the enumeration lambda_{-m} <= ... <= lambda_{-1} < 0 <
// lambda_1 <= ... <= lambda_m that repeats each eigenvalue dim_C / 2 times.

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "spinzero/torus.hpp"

namespace spinzero {

struct SolverOptions {
    int block_size = 16;
    /// Contract on ||(D - lambda) psi||_{L2} for every returned pair.
    double tolerance = 1e-8;
    int max_iterations = 400;
    std::uint64_t seed = 0x5eed5eedULL;
};

class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, std::vector<double> residuals)
        : std::runtime_error(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residuals() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

struct EigenPair {
    double lambda;
    SpinorField psi;  ///< L2-normalized
    double residual;  ///< ||(D - lambda) psi||_{L2}
    int cluster;      ///< position in SpectrumReport::clusters
};

enum class Simplicity { simple, multiple, indeterminate };

const char* to_string(Simplicity s);

struct Cluster {
    double lambda;  ///< mean of the member eigenvalues
    int dim;        ///< complex dimension
    double spread;  ///< max - min of the member eigenvalues
    double gap;     ///< distance to the nearest computed eigenvalue outside the cluster
    std::vector<int> members;  ///< indices into SpectrumReport::pairs, J-adapted order
    Simplicity simplicity;
};

struct EnumeratedEigenvalue {
    int index;  ///< -m..-1, 1..m
    double lambda;
    int cluster;
};

struct SpectrumReport {
    int m = 0;
    int kernel_dim = 0;
    double kernel_residual = 0.0;
    std::vector<EigenPair> pairs;    ///< sorted by lambda
    std::vector<Cluster> clusters;   ///< sorted by lambda
    std::vector<EnumeratedEigenvalue> enumeration;  ///< -m..-1 then 1..m

    const Cluster& cluster_of(const EnumeratedEigenvalue& e) const {
        return clusters[static_cast<std::size_t>(e.cluster)];
    }
    /// Eigenpairs of the enumerated eigenvalue's cluster.
    std::vector<const EigenPair*> eigenspace(int index) const;
    double max_residual() const;
};

/// Clusters group eigenvalues within 1e-6 max(1, |lambda|). A cluster is
/// indeterminate when its spread or its gap is below 10x the solver tolerance
/// (scaled by max(1, |lambda|)) or its dimension is odd.
inline constexpr double cluster_relative_width = 1e-6;

/// Solves for lambda_{-m}..lambda_m of dirac_conformal(fam). Throws
/// std::invalid_argument for m < 1 and SolverFailure on non-convergence.
SpectrumReport eigensolve(const ConformalFamily& fam, int m, const SolverOptions& opts = {});

/// Simplicity of each enumerated eigenvalue, in enumeration order.
std::vector<Simplicity> check_simple(const SpectrumReport& report);

/// Complex kernel dimension: constants conjugated by (1 + t f)^{1/4} when
/// delta = 0, nothing otherwise. The candidate kernel is verified numerically;
/// throws std::logic_error if it fails to be annihilated.
int kernel_dim(const ConformalFamily& fam, double* residual = nullptr);

/// One JSON object per line: first the configuration with kernel_dim, then
/// {index, lambda, dimC, simple, residual} for index 0 (kernel) and -m..m.
void write_json_lines(std::ostream& out, const SpectrumReport& report, const nlohmann::json& config);

}  // namespace spinzero

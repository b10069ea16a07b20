#pragma once

// Meshes and product-integration weights for the weakly singular kernels
//   single: (t - tau)^{alpha-1}
//   double: (t - tau)^{alpha-1} tau^{alpha-1}
// Weights integrate the kernel exactly (to rounding) against the piecewise
// linear interpolant of the sampled factor.

#include <cstddef>
#include <utility>
#include <vector>

namespace rlattract {

/// Sorted node set starting at 0. `grading` is informational for meshes that
/// were not built by build_mesh (0 for custom node sets).
struct GradedMesh {
    double horizon = 0.0;
    int node_count = 0;  ///< N; there are N + 1 nodes
    double grading = 1.0;
    std::vector<double> nodes;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
    [[nodiscard]] double operator[](std::size_t j) const { return nodes[j]; }
};

/// t_j = T (j/N)^p, j = 0..N. Requires T > 0, N >= 2, p >= 1.
GradedMesh build_mesh(double horizon, int n, double grading);

/// Wraps an explicit node list. Nodes must start at 0 and increase strictly.
GradedMesh mesh_from_nodes(std::vector<double> nodes);

/// Mesh on [0, t] that is geometric towards both endpoints: `per_side`
/// log-uniform steps from `t * rel_min` up to t/2 on each side. Doubling
/// per_side yields a refinement that contains the coarser nodes. `extra`
/// nodes inside (0, t) are inserted verbatim.
GradedMesh two_sided_geometric_mesh(double t, int per_side, double rel_min,
                                    const std::vector<double>& extra = {});

/// Default grading max(2, 2/alpha).
double default_grading(double alpha);

enum class KernelKind { Single, Double };

/// Lower-triangular weight table: row j holds w[j][0..j].
class ConvolutionWeights {
public:
    ConvolutionWeights() = default;
    ConvolutionWeights(double alpha, KernelKind kind, std::vector<std::vector<double>> rows)
        : alpha_(alpha), kind_(kind), rows_(std::move(rows)) {}

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] KernelKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }
    [[nodiscard]] const std::vector<double>& row(std::size_t j) const { return rows_[j]; }
    [[nodiscard]] double operator()(std::size_t j, std::size_t k) const { return rows_[j][k]; }

    /// sum_k w[j][k] * samples[k]
    [[nodiscard]] double apply(std::size_t j, const std::vector<double>& samples) const;

private:
    double alpha_ = 0.0;
    KernelKind kind_ = KernelKind::Single;
    std::vector<std::vector<double>> rows_;
};

/// Row j of the weights for the generic kernel (t_j - tau)^{a-1} tau^{b-1}
/// with a, b in (0, 1]. Entry k is the integral of the kernel against the hat
/// function of node k over [0, t_j].
std::vector<double> kernel_weight_row(double a, double b, const std::vector<double>& nodes, std::size_t j);

/// Integrals of (t - tau)^{a-1} tau^{b-1} over [lo, hi] (hi <= t) against the
/// two hat functions of that panel: {against (hi - tau)/h, against (tau - lo)/h}.
std::pair<double, double> kernel_panel_moments(double a, double b, double t, double lo, double hi);

/// Same integral over [0, t] for an arbitrary node list ending at t.
std::vector<double> kernel_weights_to_end(double a, double b, const std::vector<double>& nodes);

ConvolutionWeights weights_single(double alpha, const GradedMesh& mesh);
ConvolutionWeights weights_double(double alpha, const GradedMesh& mesh);

/// I^beta f at the mesh nodes, 0 < beta <= 1. samples[k] = f(t_k), finite.
std::vector<double> rl_integral(double beta, const GradedMesh& mesh, const std::vector<double>& samples);

/// Integrated-form check of D^alpha x = rhs on a mesh, for weighted samples
/// y = t^{1-alpha} x and r = t^{1-alpha} rhs (finite at t = 0). Entry j >= 2 holds
///   I^{1-alpha}x(t_j) - I^{1-alpha}x(t_1) - int_{t_1}^{t_j} rhs
/// (entries 0 and 1 are zero). Throws DomainError when the mesh has fewer
/// than 8 intervals.
std::vector<double> rl_derivative_defects(double alpha, const GradedMesh& mesh, const std::vector<double>& y,
                                          const std::vector<double>& r);

/// max_j |rl_derivative_defects(...)[j]|.
double rl_derivative_residual_weighted(double alpha, const GradedMesh& mesh, const std::vector<double>& y,
                                       const std::vector<double>& r);

/// Same check for plain samples x(t_j), rhs(t_j). Entry 0 of both vectors is
/// ignored (x may be singular at 0); the weighted value at 0 is extrapolated
/// linearly from nodes 1 and 2.
double rl_derivative_residual(double alpha, const GradedMesh& mesh, const std::vector<double>& x_samples,
                              const std::vector<double>& rhs_samples);

}  // namespace rlattract

#pragma once

// Initial value problems D^alpha x = f(t, x), lim_{t->0+} t^{1-alpha} x(t) = x0,
// solved as a Volterra equation for the weighted unknown y(t) = t^{1-alpha} x(t).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rlattract/coeff_expr.hpp"
#include "rlattract/quadrature.hpp"
#include "rlattract/special_functions.hpp"

namespace rlattract {

using RhsFunction = std::function<Vector(double t, const Vector& x)>;

struct IVProblem {
    double alpha = 0.5;
    int dim = 1;
    RhsFunction f;
    std::optional<double> lipschitz;  ///< constant L with |f(t,x)-f(t,z)| <= L|x-z|
    Vector x0;

    void validate() const;
};

/// D^alpha x = A x + Q(t) x + g(t).
struct LinearSystem {
    double alpha = 0.5;
    Matrix A;
    ExprMatrix Q;  ///< s x s
    ExprMatrix g;  ///< s x 1
    MatrixNorm norm = MatrixNorm::Two;

    [[nodiscard]] int dim() const { return static_cast<int>(A.rows()); }
    void validate() const;
    [[nodiscard]] IVProblem as_ivp(const Vector& x0) const;
};

struct WeightedTrajectory {
    GradedMesh mesh;
    double alpha = 0.5;
    std::vector<Vector> y;          ///< y(t_j) = t_j^{1-alpha} x(t_j); y[0] = x0
    std::vector<double> residual;   ///< defect of the discrete equation at each node

    [[nodiscard]] std::size_t size() const noexcept { return y.size(); }
    /// x(t_j) for j >= 1.
    [[nodiscard]] Vector x(std::size_t j) const;
};

struct BieleckiNorm {
    double gamma = 1.0;
    double horizon = 0.0;  ///< 0 means the full trajectory
};

/// Product-integration solver. Each node is solved by fixed-point iteration
/// warm-started from the previous node, with damping 0.5 once the observed
/// ratio exceeds 0.9. The per-node defect |y - G(y)|_inf is at most
/// tol * max(1, |y|_inf). On failure a ConvergenceError names the node; if
/// `partial` is given it receives the nodes solved so far.
WeightedTrajectory solve_ivp(const IVProblem& p, const GradedMesh& mesh, double tol = 1e-10, int max_inner = 200,
                             WeightedTrajectory* partial = nullptr);

/// Variation-of-constants discretization for linear systems:
///   y(t) = Gamma(alpha) E(t^alpha A) x0
///        + t^{1-alpha} int (t-tau)^{alpha-1} E((t-tau)^alpha A) [tau^{alpha-1} Q y + g] dtau
/// with E = E_{alpha,alpha}. `tol` is the Mittag-Leffler tolerance.
WeightedTrajectory solve_linear_voc(const LinearSystem& sys, const Vector& x0, const GradedMesh& mesh,
                                    double tol = kDefaultMLTol);

/// max_j |y_j| exp(-gamma t_j) over nodes with t_j <= horizon.
double bielecki_norm(const WeightedTrajectory& traj, const BieleckiNorm& nrm);

/// max_j |y_j|.
double weighted_sup_norm(const WeightedTrajectory& traj);

/// Residual check of a solver trajectory against f (per component, max). Each
/// defect is divided by max(1, largest |y| up to that node).
double trajectory_residual(const IVProblem& p, const WeightedTrajectory& traj);

struct PicardReport {
    double gamma = 0.0;
    double bound = 0.0;                ///< L 2^{2-alpha} / gamma^alpha
    std::vector<double> distances;     ///< d_k = |xi_{k+1} - xi_k| in the Bielecki norm
    std::vector<double> ratios;        ///< d_{k+1} / d_k
    bool reached_roundoff = false;
};

/// Iterates the discrete Picard operator from xi_0 = x0 t^{alpha-1}.
/// Requires p.lipschitz. Throws InvariantViolation when three consecutive
/// ratios exceed 1 although the bound is below 1.
PicardReport picard_diagnostics(const IVProblem& p, const GradedMesh& mesh, double gamma, int n_iters);

/// Named right-hand sides: "tanh" is f(t, x) = A tanh(x) + g(t) with L = |||A|||.
IVProblem make_preset(const std::string& name, const LinearSystem& sys, const Vector& x0);

}  // namespace rlattract

#include "rlattract/fde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rlattract/errors.hpp"

namespace rlattract {

namespace {

// F(tau, y) = tau^{1-alpha} f(tau, tau^{alpha-1} y); at tau = 0 the limit is
// taken at the smallest convenient positive time.
constexpr double kTauZero = 1e-300;

Vector weighted_rhs(const IVProblem& p, double tau, const Vector& y) {
    const double s = tau > 0.0 ? tau : kTauZero;
    Vector v = std::pow(s, 1.0 - p.alpha) * p.f(s, std::pow(s, p.alpha - 1.0) * y);
    if (v.size() != p.dim) throw InputError("right-hand side returned a vector of the wrong size");
    if (!v.allFinite()) {
        std::ostringstream os;
        os << "weighted right-hand side is not finite at t=" << tau
           << (tau > 0.0 ? "" : " (f is not integrable against the t^(alpha-1) singularity)");
        throw DomainError(os.str());
    }
    return v;
}

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

void IVProblem::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    if (dim < 1) throw InputError("problem dimension must be positive");
    if (!f) throw InputError("right-hand side is not set");
    if (x0.size() != dim) throw InputError("x0 has the wrong dimension");
    if (!x0.allFinite()) throw InputError("x0 must be finite");
    if (lipschitz && !(*lipschitz >= 0.0)) throw InputError("Lipschitz constant must be nonnegative");
}

void LinearSystem::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    if (A.rows() == 0 || A.rows() != A.cols()) throw InputError("A must be a nonempty square matrix");
    if (!A.allFinite()) throw InputError("A must have finite entries");
    if (Q.rows != A.rows() || Q.cols != A.cols()) throw InputError("Q must have the same shape as A");
    if (g.rows != A.rows() || g.cols != 1) throw InputError("g must be a vector of the dimension of A");
}

IVProblem LinearSystem::as_ivp(const Vector& x0) const {
    validate();
    IVProblem p;
    p.alpha = alpha;
    p.dim = dim();
    p.x0 = x0;
    p.f = [A = A, Q = Q, g = g](double t, const Vector& x) -> Vector {
        return A * x + eval_matrix(Q, t) * x + eval_vector(g, t);
    };
    if (Q.is_constant()) p.lipschitz = matrix_norm(A + eval_matrix(Q, 0.0), MatrixNorm::Two);
    return p;
}

Vector WeightedTrajectory::x(std::size_t j) const {
    if (j == 0 || j >= y.size()) throw DomainError("x(t_j) is defined for 1 <= j < size");
    return std::pow(mesh.nodes[j], alpha - 1.0) * y[j];
}

WeightedTrajectory solve_ivp(const IVProblem& p, const GradedMesh& mesh, double tol, int max_inner,
                             WeightedTrajectory* partial) {
    p.validate();
    if (!(tol > 0.0)) throw InputError("solver tolerance must be positive");
    if (max_inner < 1) throw InputError("max_inner must be positive");

    const double alpha = p.alpha;
    const auto w = weights_double(alpha, mesh);
    const double rg = 1.0 / gamma_fn(alpha);
    const std::size_t n = mesh.size();

    WeightedTrajectory out;
    out.mesh = mesh;
    out.alpha = alpha;
    out.y.reserve(n);
    out.residual.reserve(n);
    out.y.push_back(p.x0);
    out.residual.push_back(0.0);

    std::vector<Vector> F;
    F.reserve(n);
    F.push_back(weighted_rhs(p, 0.0, p.x0));

    for (std::size_t j = 1; j < n; ++j) {
        const double tj = mesh.nodes[j];
        const double c = std::pow(tj, 1.0 - alpha) * rg;
        const auto& row = w.row(j);
        Vector hist = Vector::Zero(p.dim);
        for (std::size_t k = 0; k < j; ++k) hist += row[k] * F[k];
        const Vector base = p.x0 + c * hist;
        const double cd = c * row[j];

        auto G = [&](const Vector& z) -> Vector { return base + cd * weighted_rhs(p, tj, z); };

        Vector z = out.y.back();
        Vector gz = G(z);
        double defect = inf_norm(gz - z);
        double prev = std::numeric_limits<double>::infinity();
        bool damped = false;
        int it = 0;
        while (defect > tol * std::max(1.0, inf_norm(z))) {
            if (++it > max_inner) {
                if (partial) *partial = out;
                std::ostringstream os;
                os << "inner iteration did not converge at node " << j << " (t=" << tj << "), defect " << defect;
                throw ConvergenceError(os.str(), j, defect);
            }
            if (!damped && defect > 0.9 * prev) damped = true;
            prev = defect;
            z = damped ? Vector(0.5 * (z + gz)) : gz;
            gz = G(z);
            defect = inf_norm(gz - z);
        }
        out.y.push_back(z);
        out.residual.push_back(defect);
        F.push_back(weighted_rhs(p, tj, z));
    }
    return out;
}

WeightedTrajectory solve_linear_voc(const LinearSystem& sys, const Vector& x0, const GradedMesh& mesh, double tol) {
    sys.validate();
    if (x0.size() != sys.dim() || !x0.allFinite()) throw InputError("x0 has the wrong dimension or is not finite");
    const double alpha = sys.alpha;
    const int s = sys.dim();
    const std::size_t n = mesh.size();
    const auto& tau = mesh.nodes;
    const MatrixMittagLeffler E({alpha, alpha}, sys.A, tol);
    // u^alpha E_{alpha,alpha+1}(u^alpha A) and u^{alpha+1} E_{alpha,alpha+2}(u^alpha A) are the first
    // and second antiderivatives of u^{alpha-1} E_{alpha,alpha}(u^alpha A).
    const MatrixMittagLeffler E1({alpha, alpha + 1.0}, sys.A, tol);
    const MatrixMittagLeffler E2({alpha, alpha + 2.0}, sys.A, tol);
    const double ga = gamma_fn(alpha);
    const Matrix I = Matrix::Identity(s, s);
    const Matrix Z = Matrix::Zero(s, s);

    std::vector<Matrix> Qk(n);
    std::vector<Vector> gk(n);
    for (std::size_t k = 0; k < n; ++k) {
        Qk[k] = eval_matrix(sys.Q, tau[k]);
        gk[k] = eval_vector(sys.g, tau[k]);
    }

    WeightedTrajectory out;
    out.mesh = mesh;
    out.alpha = alpha;
    out.y.assign(n, Vector::Zero(s));
    out.residual.assign(n, 0.0);
    out.y[0] = x0;

    // Q(tau) x(tau) = tau^{alpha-1} Q(tau) y(tau), needed for tau > 0 only.
    std::vector<Vector> chi(n, Vector::Zero(s));

    std::vector<Matrix> Eu(n), F1(n), G2(n);
    std::vector<char> haveE(n), haveF(n);
    for (std::size_t j = 1; j < n; ++j) {
        const double t = tau[j];
        const double c = std::pow(t, 1.0 - alpha);
        std::fill(haveE.begin(), haveE.begin() + static_cast<long>(j) + 1, 0);
        std::fill(haveF.begin(), haveF.begin() + static_cast<long>(j) + 1, 0);
        auto kernelE = [&](std::size_t k) -> const Matrix& {
            if (!haveE[k]) {
                Eu[k] = k == j ? Matrix(I / ga) : E.at(std::pow(t - tau[k], alpha));
                haveE[k] = 1;
            }
            return Eu[k];
        };
        // F1[k] = F1(u_k), G2[k] = u_k F1(u_k) - F2(u_k).
        auto anti = [&](std::size_t k) {
            if (!haveF[k]) {
                const double u = t - tau[k];
                if (k == j || u <= 0.0) {
                    F1[k] = Z;
                    G2[k] = Z;
                } else {
                    const double ua = std::pow(u, alpha);
                    F1[k] = ua * E1.at(ua);
                    G2[k] = u * F1[k] - u * ua * E2.at(ua);
                }
                haveF[k] = 1;
            }
        };

        Vector acc = Vector::Zero(s);
        Matrix implicit = Matrix::Zero(s, s);  // coefficient of y_j inside acc
        for (std::size_t k = 0; k < j; ++k) {
            const double lo = tau[k], hi = tau[k + 1], h = hi - lo;
            const bool last = k + 1 == j;
            if (lo >= 0.5 * t) {
                anti(k);
                anti(k + 1);
                const double uk = t - lo, uk1 = t - hi;
                const Matrix M0 = F1[k] - F1[k + 1];
                const Matrix M1 = G2[k] - G2[k + 1];
                const Matrix Pk = (M1 - uk1 * M0) / h;
                const Matrix Pk1 = (uk * M0 - M1) / h;
                acc += Pk * (chi[k] + gk[k]);
                if (last) {
                    acc += Pk1 * gk[j];
                    implicit += Pk1 * (std::pow(t, alpha - 1.0) * Qk[j]);
                } else {
                    acc += Pk1 * (chi[k + 1] + gk[k + 1]);
                }
            } else {
                const auto [dl, dr] = kernel_panel_moments(alpha, alpha, t, lo, hi);
                const auto [sl, sr] = kernel_panel_moments(alpha, 1.0, t, lo, hi);
                acc += kernelE(k) * (dl * (Qk[k] * out.y[k]) + sl * gk[k]);
                if (last) {
                    acc += (sr / ga) * gk[j];
                    implicit += (dr / ga) * Qk[j];
                } else {
                    acc += kernelE(k + 1) * (dr * (Qk[k + 1] * out.y[k + 1]) + sr * gk[k + 1]);
                }
            }
        }
        const Vector rhs = ga * (E.at(std::pow(t, alpha)) * x0) + c * acc;
        const Matrix lhs = I - c * implicit;
        out.y[j] = Eigen::PartialPivLU<Matrix>(lhs).solve(rhs);
        out.residual[j] = inf_norm(lhs * out.y[j] - rhs);
        if (!out.y[j].allFinite()) {
            std::ostringstream os;
            os << "variation-of-constants step produced a non-finite value at node " << j << " (t=" << t << ")";
            throw ConvergenceError(os.str(), j, std::numeric_limits<double>::infinity());
        }
        chi[j] = std::pow(t, alpha - 1.0) * (Qk[j] * out.y[j]);
    }
    return out;
}

double bielecki_norm(const WeightedTrajectory& traj, const BieleckiNorm& nrm) {
    if (traj.y.empty()) throw DomainError("bielecki_norm: empty trajectory");
    if (!(nrm.gamma > 0.0)) throw DomainError("bielecki_norm: gamma must be positive");
    double best = 0.0;
    for (std::size_t j = 0; j < traj.y.size(); ++j) {
        const double t = traj.mesh.nodes[j];
        if (nrm.horizon > 0.0 && t > nrm.horizon) break;
        best = std::max(best, traj.y[j].norm() * std::exp(-nrm.gamma * t));
    }
    return best;
}

double weighted_sup_norm(const WeightedTrajectory& traj) {
    if (traj.y.empty()) throw DomainError("weighted_sup_norm: empty trajectory");
    double best = 0.0;
    for (const auto& v : traj.y) best = std::max(best, v.norm());
    return best;
}

double trajectory_residual(const IVProblem& p, const WeightedTrajectory& traj) {
    p.validate();
    const std::size_t n = traj.size();
    std::vector<Vector> F(n);
    for (std::size_t k = 0; k < n; ++k) F[k] = weighted_rhs(p, traj.mesh.nodes[k], traj.y[k]);
    // Each defect is measured against the solution size reached so far, so a
    // growing trajectory cannot hide an early error.
    std::vector<double> scale(n);
    double running = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        running = std::max(running, traj.y[k].cwiseAbs().maxCoeff());
        scale[k] = running;
    }
    double worst = 0.0;
    std::vector<double> y(n), r(n);
    for (int i = 0; i < p.dim; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            y[k] = traj.y[k](i);
            r[k] = F[k](i);
        }
        const auto d = rl_derivative_defects(p.alpha, traj.mesh, y, r);
        for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(d[k]) / scale[k]);
    }
    return worst;
}

PicardReport picard_diagnostics(const IVProblem& p, const GradedMesh& mesh, double gamma, int n_iters) {
    p.validate();
    if (!p.lipschitz) throw InputError("picard_diagnostics needs a Lipschitz constant");
    if (!(gamma > 0.0)) throw InputError("gamma must be positive");
    if (n_iters < 1) throw InputError("n_iters must be positive");

    const double alpha = p.alpha;
    PicardReport rep;
    rep.gamma = gamma;
    rep.bound = *p.lipschitz * std::pow(2.0, 2.0 - alpha) / std::pow(gamma, alpha);

    const auto w = weights_double(alpha, mesh);
    const double rg = 1.0 / gamma_fn(alpha);
    const std::size_t n = mesh.size();
    std::vector<double> scale(n);
    for (std::size_t j = 0; j < n; ++j) scale[j] = std::pow(mesh.nodes[j], 1.0 - alpha) * rg;

    std::vector<Vector> cur(n, p.x0), next(n), F(n);
    int above = 0;
    for (int it = 0; it < n_iters; ++it) {
        for (std::size_t k = 0; k < n; ++k) F[k] = weighted_rhs(p, mesh.nodes[k], cur[k]);
        double d = 0.0, size = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            Vector acc = Vector::Zero(p.dim);
            const auto& row = w.row(j);
            for (std::size_t k = 0; k <= j; ++k) acc += row[k] * F[k];
            next[j] = p.x0 + scale[j] * acc;
            const double e = std::exp(-gamma * mesh.nodes[j]);
            d = std::max(d, (next[j] - cur[j]).norm() * e);
            size = std::max(size, next[j].norm() * e);
        }
        rep.distances.push_back(d);
        std::swap(cur, next);
        if (rep.distances.size() >= 2) {
            const double prev = rep.distances[rep.distances.size() - 2];
            if (prev > 0.0) {
                const double r = d / prev;
                rep.ratios.push_back(r);
                above = r > 1.0 ? above + 1 : 0;
                if (above >= 3 && rep.bound < 1.0)
                    throw InvariantViolation("Picard iteration diverges although the contraction bound " +
                                             std::to_string(rep.bound) + " is below 1");
            }
        }
        // Further ratios would only measure rounding noise.
        if (d <= 1e-13 * std::max(1.0, size)) {
            rep.reached_roundoff = true;
            break;
        }
    }
    return rep;
}

IVProblem make_preset(const std::string& name, const LinearSystem& sys, const Vector& x0) {
    if (name == "linear") return sys.as_ivp(x0);
    if (name == "tanh") {
        sys.validate();
        IVProblem p;
        p.alpha = sys.alpha;
        p.dim = sys.dim();
        p.x0 = x0;
        p.f = [A = sys.A, g = sys.g](double t, const Vector& x) -> Vector {
            return A * x.array().tanh().matrix() + eval_vector(g, t);
        };
        p.lipschitz = matrix_norm(sys.A, MatrixNorm::Two);
        return p;
    }
    throw InputError("unknown preset '" + name + "' (expected linear or tanh)");
}

}  // namespace rlattract

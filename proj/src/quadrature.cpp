#include "rlattract/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "rlattract/errors.hpp"
#include "rlattract/special_functions.hpp"

namespace rlattract {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGLx = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                        0.9602898564975363};
constexpr std::array<double, 4> kGLw = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                        0.1012285362903763};

// A piece is integrated by Gauss when every kernel singularity lies at least
// this many piece widths away.
constexpr double kSeparation = 1.5;

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Kernel (t - tau)^{a-1} tau^{b-1} integrated against the two hat functions
// of panel [lo, hi].
struct Panel {
    double a, b, t, lo, hi;
    double left = 0.0;   // against (hi - tau)/h
    double right = 0.0;  // against (tau - lo)/h

    [[nodiscard]] bool sing0() const { return b != 1.0; }
    [[nodiscard]] bool singT() const { return a != 1.0; }

    void gauss(double c, double d) {
        const double mid = 0.5 * (c + d);
        const double half = 0.5 * (d - c);
        const double h = hi - lo;
        for (std::size_t i = 0; i < kGLx.size(); ++i) {
            for (const double s : {-1.0, 1.0}) {
                const double tau = mid + s * half * kGLx[i];
                double k = half * kGLw[i];
                if (singT()) k *= std::pow(t - tau, a - 1.0);
                if (sing0()) k *= std::pow(tau, b - 1.0);
                left += k * (hi - tau) / h;
                right += k * (tau - lo) / h;
            }
        }
    }

    // [0, d] with d <= t/2: expand (t - tau)^{a-1} in tau/t.
    void left_series(double d) {
        const double x = d / t;
        double p0 = 0.0, p1 = 0.0;
        double coef = 1.0, xn = 1.0;
        for (int n = 0; n < 200; ++n) {
            const double t0 = coef * xn / (b + n);
            const double t1 = coef * xn / (b + 1.0 + n);
            p0 += t0;
            p1 += t1;
            if (t0 <= 1e-18 * p0) break;
            coef *= (1.0 - a + n) / (n + 1.0);
            xn *= x;
            if (coef == 0.0) break;
        }
        const double base = std::pow(t, a - 1.0) * std::pow(d, b);
        const double m0 = base * p0;      // int K
        const double m1 = base * d * p1;  // int K tau
        const double h = hi - lo;         // lo == 0 here
        right += m1 / h;
        left += m0 - m1 / h;
    }

    // [t - e, t] with e <= t/2: expand tau^{b-1} = (t - u)^{b-1} in u/t.
    void right_series(double e) {
        const double x = e / t;
        double r0 = 0.0, r1 = 0.0;
        double coef = 1.0, xn = 1.0;
        for (int n = 0; n < 200; ++n) {
            const double t0 = coef * xn / (a + n);
            const double t1 = coef * xn / (a + 1.0 + n);
            r0 += t0;
            r1 += t1;
            if (t0 <= 1e-18 * r0) break;
            coef *= (1.0 - b + n) / (n + 1.0);
            xn *= x;
            if (coef == 0.0) break;
        }
        const double base = std::pow(t, b - 1.0) * std::pow(e, a);
        const double m0 = base * r0;      // int K
        const double m1 = base * e * r1;  // int K (t - tau)
        const double h = hi - lo;         // hi == t here
        left += m1 / h;
        right += m0 - m1 / h;
    }

    void whole() {
        // lo == 0, hi == t
        const double s = std::pow(t, a + b - 1.0);
        left += s * beta_fn(a + 1.0, b);
        right += s * beta_fn(a, b + 1.0);
    }

    void piece(double c, double d) {
        if (d <= c) return;
        const bool at0 = c == 0.0 && sing0();
        const bool atT = d == t && singT();
        if (at0 && atT) {
            if (c == lo && d == hi) {
                whole();
                return;
            }
            const double m = 0.5 * t;
            piece(c, m);
            piece(m, d);
            return;
        }
        if (at0) {
            if (d <= 0.5 * t) {
                left_series(d);
            } else {
                const double m = 0.5 * t;
                piece(c, m);
                piece(m, d);
            }
            return;
        }
        if (atT) {
            if (t - c <= 0.5 * t) {
                right_series(t - c);
            } else {
                const double m = 0.5 * t;
                piece(c, m);
                piece(m, d);
            }
            return;
        }
        const double w = d - c;
        const double d0 = sing0() ? c : std::numeric_limits<double>::infinity();
        const double dT = singT() ? t - d : std::numeric_limits<double>::infinity();
        const bool near0 = d0 < kSeparation * w;
        const bool nearT = dT < kSeparation * w;
        if (!near0 && !nearT) {
            gauss(c, d);
        } else if (near0 && nearT) {
            const double m = 0.5 * (c + d);
            piece(c, m);
            piece(m, d);
        } else if (nearT) {
            // Largest left part that is far enough from t.
            const double m = c + (t - c) / (1.0 + kSeparation);
            if (m >= d) {
                gauss(c, d);
                return;
            }
            piece(c, m);
            piece(m, d);
        } else {
            const double m = c + c / kSeparation;
            if (m >= d) {
                gauss(c, d);
                return;
            }
            piece(c, m);
            piece(m, d);
        }
    }
};

void check_kernel(double a, double b) {
    if (!(a > 0.0 && a <= 1.0) || !(b > 0.0 && b <= 1.0))
        throw DomainError("kernel exponents must lie in (0, 1], got a=" + num(a) + ", b=" + num(b));
}

void check_order(double alpha, const char* who) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError(std::string(who) + ": alpha must lie in (0, 1), got " + num(alpha));
}

std::vector<double> row_impl(double a, double b, const std::vector<double>& nodes, std::size_t j) {
    std::vector<double> w(j + 1, 0.0);
    if (j == 0) return w;
    const double t = nodes[j];
    for (std::size_t k = 0; k < j; ++k) {
        Panel p{a, b, t, nodes[k], nodes[k + 1]};
        p.piece(nodes[k], nodes[k + 1]);
        w[k] += p.left;
        w[k + 1] += p.right;
    }
    return w;
}

ConvolutionWeights table(double a, double b, double alpha, KernelKind kind, const GradedMesh& mesh) {
    std::vector<std::vector<double>> rows(mesh.size());
    for (std::size_t j = 0; j < mesh.size(); ++j) rows[j] = row_impl(a, b, mesh.nodes, j);
    return {alpha, kind, std::move(rows)};
}

}  // namespace

double default_grading(double alpha) { return std::max(2.0, 2.0 / alpha); }

GradedMesh build_mesh(double horizon, int n, double grading) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("build_mesh: T must be positive, got " + num(horizon));
    if (n < 2) throw DomainError("build_mesh: N must be at least 2, got " + std::to_string(n));
    if (!(grading >= 1.0) || !std::isfinite(grading))
        throw DomainError("build_mesh: grading must be >= 1, got " + num(grading));
    GradedMesh m;
    m.horizon = horizon;
    m.node_count = n;
    m.grading = grading;
    m.nodes.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double s = static_cast<double>(j) / n;
        m.nodes[j] = grading == 1.0 ? horizon * j / n : horizon * std::pow(s, grading);
    }
    m.nodes[n] = horizon;
    for (int j = 1; j <= n; ++j)
        if (!(m.nodes[j] > m.nodes[j - 1]))
            throw DomainError("build_mesh: nodes collapse in floating point (grading too strong for N)");
    return m;
}

GradedMesh mesh_from_nodes(std::vector<double> nodes) {
    if (nodes.size() < 3) throw DomainError("mesh_from_nodes: need at least 3 nodes");
    if (nodes.front() != 0.0) throw DomainError("mesh_from_nodes: first node must be 0");
    for (std::size_t j = 1; j < nodes.size(); ++j)
        if (!(nodes[j] > nodes[j - 1]) || !std::isfinite(nodes[j]))
            throw DomainError("mesh_from_nodes: nodes must increase strictly");
    GradedMesh m;
    m.horizon = nodes.back();
    m.node_count = static_cast<int>(nodes.size()) - 1;
    m.grading = 0.0;
    m.nodes = std::move(nodes);
    return m;
}

GradedMesh two_sided_geometric_mesh(double t, int per_side, double rel_min, const std::vector<double>& extra) {
    if (!(t > 0.0) || per_side < 1 || !(rel_min > 0.0 && rel_min < 0.5))
        throw DomainError("two_sided_geometric_mesh: invalid parameters");
    std::vector<double> nodes;
    nodes.reserve(2 * per_side + 3 + extra.size());
    nodes.push_back(0.0);
    const double half = 0.5 * t;
    const double lr = std::log(rel_min * t / half);
    std::vector<double> side(per_side + 1);
    for (int i = 0; i <= per_side; ++i) side[i] = half * std::exp(lr * (1.0 - static_cast<double>(i) / per_side));
    side[per_side] = half;
    for (double s : side) nodes.push_back(s);
    for (int i = per_side - 1; i >= 0; --i) nodes.push_back(t - side[i]);
    nodes.push_back(t);
    for (double e : extra)
        if (e > 0.0 && e < t) nodes.push_back(e);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return mesh_from_nodes(std::move(nodes));
}

double ConvolutionWeights::apply(std::size_t j, const std::vector<double>& samples) const {
    const auto& w = rows_[j];
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * samples[k];
    return s;
}

std::vector<double> kernel_weight_row(double a, double b, const std::vector<double>& nodes, std::size_t j) {
    check_kernel(a, b);
    if (j >= nodes.size()) throw DomainError("kernel_weight_row: row index out of range");
    return row_impl(a, b, nodes, j);
}

std::pair<double, double> kernel_panel_moments(double a, double b, double t, double lo, double hi) {
    check_kernel(a, b);
    if (!(lo >= 0.0 && hi > lo && hi <= t)) throw DomainError("kernel_panel_moments: need 0 <= lo < hi <= t");
    Panel p{a, b, t, lo, hi};
    p.piece(lo, hi);
    return {p.left, p.right};
}

std::vector<double> kernel_weights_to_end(double a, double b, const std::vector<double>& nodes) {
    check_kernel(a, b);
    if (nodes.empty()) throw DomainError("kernel_weights_to_end: empty node list");
    return row_impl(a, b, nodes, nodes.size() - 1);
}

ConvolutionWeights weights_single(double alpha, const GradedMesh& mesh) {
    check_order(alpha, "weights_single");
    return table(alpha, 1.0, alpha, KernelKind::Single, mesh);
}

ConvolutionWeights weights_double(double alpha, const GradedMesh& mesh) {
    check_order(alpha, "weights_double");
    return table(alpha, alpha, alpha, KernelKind::Double, mesh);
}

std::vector<double> rl_integral(double beta, const GradedMesh& mesh, const std::vector<double>& samples) {
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("rl_integral: beta must lie in (0, 1], got " + num(beta));
    if (samples.size() != mesh.size()) throw DomainError("rl_integral: sample count does not match the mesh");
    for (double s : samples)
        if (!std::isfinite(s)) throw DomainError("rl_integral: samples must be finite");
    const double g = gamma_fn(beta);
    std::vector<double> out(mesh.size(), 0.0);
    for (std::size_t j = 1; j < mesh.size(); ++j) {
        const auto w = row_impl(beta, 1.0, mesh.nodes, j);
        double s = 0.0;
        for (std::size_t k = 0; k <= j; ++k) s += w[k] * samples[k];
        out[j] = s / g;
    }
    return out;
}

namespace {

// J = I^{1-alpha}x and C = int rhs, both by product rules exact for piecewise-linear y and r.
std::vector<double> raw_defects(double alpha, const std::vector<double>& nodes, const std::vector<double>& y,
                                const std::vector<double>& r) {
    const double g = gamma_fn(1.0 - alpha);
    const std::size_t n = nodes.size();
    std::vector<double> J(n, 0.0), C(n, 0.0), d(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
        const auto w = row_impl(1.0 - alpha, alpha, nodes, j);
        double s = 0.0;
        for (std::size_t k = 0; k <= j; ++k) s += w[k] * y[k];
        J[j] = s / g;

        const double lo = nodes[j - 1], hi = nodes[j];
        Panel p{1.0, alpha, hi, lo, hi};
        p.piece(lo, hi);
        C[j] = C[j - 1] + p.left * r[j - 1] + p.right * r[j];
    }
    for (std::size_t j = 2; j < n; ++j) d[j] = (J[j] - J[1]) - (C[j] - C[1]);
    return d;
}

}  // namespace

std::vector<double> rl_derivative_defects(double alpha, const GradedMesh& mesh, const std::vector<double>& y,
                                          const std::vector<double>& r) {
    check_order(alpha, "rl_derivative_residual");
    if (mesh.size() < 9) throw DomainError("rl_derivative_residual: mesh needs at least 8 intervals");
    if (y.size() != mesh.size() || r.size() != mesh.size())
        throw DomainError("rl_derivative_residual: sample count does not match the mesh");
    return raw_defects(alpha, mesh.nodes, y, r);
}

double rl_derivative_residual_weighted(double alpha, const GradedMesh& mesh, const std::vector<double>& y,
                                       const std::vector<double>& r) {
    double worst = 0.0;
    for (double d : rl_derivative_defects(alpha, mesh, y, r)) worst = std::max(worst, std::abs(d));
    return worst;
}

double rl_derivative_residual(double alpha, const GradedMesh& mesh, const std::vector<double>& x_samples,
                              const std::vector<double>& rhs_samples) {
    check_order(alpha, "rl_derivative_residual");
    if (mesh.size() < 9) throw DomainError("rl_derivative_residual: mesh needs at least 8 intervals");
    if (x_samples.size() != mesh.size() || rhs_samples.size() != mesh.size())
        throw DomainError("rl_derivative_residual: sample count does not match the mesh");
    std::vector<double> y(mesh.size()), r(mesh.size());
    for (std::size_t k = 1; k < mesh.size(); ++k) {
        const double s = std::pow(mesh.nodes[k], 1.0 - alpha);
        y[k] = s * x_samples[k];
        r[k] = s * rhs_samples[k];
    }
    const double t1 = mesh.nodes[1], t2 = mesh.nodes[2];
    y[0] = y[1] - (y[2] - y[1]) * t1 / (t2 - t1);
    r[0] = r[1] - (r[2] - r[1]) * t1 / (t2 - t1);
    return rl_derivative_residual_weighted(alpha, mesh, y, r);
}

}  // namespace rlattract

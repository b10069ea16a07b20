#include "rlattract/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ml_coefficients.hpp"
#include "rlattract/errors.hpp"

extern "C" {
#include <quadmath.h>
}

namespace rlattract {

namespace {

using detail::quad;

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Lanczos approximation, g = 7, nine coefficients.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double xm1) {
    double a = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (xm1 + static_cast<double>(i));
    return a;
}

// sin(pi x) with exact argument reduction.
double sin_pi(double x) {
    const double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
    if (r == 0.0 || std::abs(r) == 1.0) return 0.0;
    return std::sin(kPi * r);
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// ---------------------------------------------------------------------------
// binary128 complex helpers for the extended-precision series.

struct QComplex {
    quad re = 0;
    quad im = 0;
};

inline QComplex mul(QComplex a, QComplex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

inline double qabs(QComplex a) {
    return std::hypot(static_cast<double>(a.re), static_cast<double>(a.im));
}

// Regime boundaries in r = |z|^{1/alpha}.
constexpr double kSeriesMaxR = 36.0;
constexpr double kAsymMinR = 30.0;

struct Partial {
    Complex value;
    double error = 0.0;
    bool ok = false;
    bool extended = false;
};

Partial series_double(const detail::MLTable& tab, Complex z) {
    Partial out;
    const auto& c = tab.series_d;
    Complex sum = c[0];
    Complex comp = 0.0;  // Neumaier compensation
    Complex p = 1.0;
    double abs_sum = std::abs(c[0]);
    double weighted = abs_sum;
    double prev = std::abs(c[0]);
    const int n = static_cast<int>(c.size());
    int k = 1;
    for (; k < n; ++k) {
        p *= z;
        const Complex term = p * c[k];
        const double at = std::abs(term);
        const Complex next = sum + term;
        // Neumaier step, componentwise.
        auto fix = [](double s, double t, double nx) {
            return std::abs(s) >= std::abs(t) ? (s - nx) + t : (t - nx) + s;
        };
        comp += Complex(fix(sum.real(), term.real(), next.real()), fix(sum.imag(), term.imag(), next.imag()));
        sum = next;
        abs_sum += at;
        weighted += (1.0 + k) * at;
        if (!std::isfinite(abs_sum)) return out;
        const bool decreasing = at <= prev;
        prev = at;
        if (decreasing && at <= 1e-3 * kEps * std::max(std::abs(sum + comp), 1e-300) &&
            tab.alpha * k + tab.beta > 1.0)
            break;
    }
    if (k >= n) return out;
    out.value = sum + comp;
    out.error = 2.0 * kEps * weighted;
    out.ok = true;
    return out;
}

Partial series_quad(const detail::MLTable& tab, Complex zd) {
    Partial out;
    out.extended = true;
    const auto& c = tab.series_q;
    const QComplex z{static_cast<quad>(zd.real()), static_cast<quad>(zd.imag())};
    QComplex sum{c[0], 0};
    QComplex p{1, 0};
    double weighted = std::abs(static_cast<double>(c[0]));
    double prev = weighted;
    const int n = static_cast<int>(c.size());
    int k = 1;
    for (; k < n; ++k) {
        p = mul(p, z);
        const QComplex term{p.re * c[k], p.im * c[k]};
        sum.re += term.re;
        sum.im += term.im;
        const double at = qabs(term);
        weighted += (1.0 + k) * at;
        const bool decreasing = at <= prev;
        prev = at;
        if (decreasing && at <= 1e-22 * std::max(qabs(sum), 1e-300) && tab.alpha * k + tab.beta > 1.0)
            break;
    }
    if (k >= n) return out;
    out.value = Complex(static_cast<double>(sum.re), static_cast<double>(sum.im));
    out.error = 4e-34 * weighted + kEps * std::abs(out.value);
    out.ok = true;
    return out;
}

Partial asymptotic(const detail::MLTable& tab, Complex z) {
    Partial out;
    const double alpha = tab.alpha;
    const double beta = tab.beta;
    const double theta = std::arg(z);
    const Complex log_z = std::log(z);

    Complex expo = 0.0;
    double expo_err = 0.0;
    if (std::abs(theta) <= alpha * kPi) {
        const Complex zeta = std::exp(log_z / alpha);
        expo = std::exp(log_z * ((1.0 - beta) / alpha) + zeta) / alpha;
        expo_err = kEps * std::abs(expo) * (4.0 + std::abs(zeta) + std::abs(log_z * ((1.0 - beta) / alpha)));
    }

    // Algebraic tail -sum_k z^{-k}/Gamma(beta - alpha k), truncated where the
    // smooth envelope of the terms stops decreasing.
    const Complex w = 1.0 / z;
    const double aw = std::abs(w);
    Complex p = 1.0;
    Complex alg = 0.0;
    double abs_alg = 0.0;
    double pw = 1.0;
    double prev_env = std::numeric_limits<double>::infinity();
    double omitted = 0.0;
    bool truncated = false;
    const int n = static_cast<int>(tab.asym.size());
    for (int k = 1; k < n; ++k) {
        p *= w;
        pw *= aw;
        const double env = pw * tab.asym_env[k];
        if (env > prev_env) {
            omitted = env;
            truncated = true;
            break;
        }
        prev_env = env;
        if (env <= 1e-3 * kEps * std::max(std::abs(alg + expo), 1e-300)) {
            omitted = env;
            truncated = true;
            break;
        }
        const double a = tab.asym[k];
        if (a == 0.0) continue;
        const Complex term = p * a;
        alg -= term;
        abs_alg += std::abs(term);
    }
    // Table exhausted: bound what is left by the last envelope value.
    if (!truncated) omitted = std::isfinite(prev_env) ? prev_env : 0.0;
    out.value = expo + alg;
    out.error = omitted + expo_err + 4.0 * kEps * abs_alg;
    out.ok = std::isfinite(out.value.real()) && std::isfinite(out.value.imag());
    return out;
}

Partial series(const detail::MLTable& tab, Complex z, double tol) {
    Partial d = series_double(tab, z);
    if (d.ok && d.error <= tol * std::abs(d.value)) return d;
    Partial q = series_quad(tab, z);
    if (q.ok) return q;
    return d;
}

}  // namespace

double gamma_fn(double x) {
    if (!std::isfinite(x)) throw DomainError("gamma_fn: non-finite argument");
    if (is_nonpositive_integer(x)) throw DomainError("gamma_fn: pole at " + fmt(x));
    if (x < 0.5) {
        return kPi / (sin_pi(x) * gamma_fn(1.0 - x));
    }
    if (x > 171.7) return std::numeric_limits<double>::infinity();
    const double xm1 = x - 1.0;
    const double a = lanczos_sum(xm1);
    const double t = xm1 + kLanczosG + 0.5;
    // Split the power to delay overflow.
    const double half = std::pow(t, 0.5 * (xm1 + 0.5));
    return std::sqrt(2.0 * kPi) * half * (half * std::exp(-t)) * a;
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive, got " + fmt(x));
    if (x < 0.5) return std::log(kPi / std::abs(sin_pi(x))) - log_gamma(1.0 - x);
    const double xm1 = x - 1.0;
    const double t = xm1 + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (xm1 + 0.5) * std::log(t) - t + std::log(lanczos_sum(xm1));
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    if (x > 171.0) return std::exp(-log_gamma(x));
    return 1.0 / gamma_fn(x);
}

double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("beta_fn: arguments must be positive, got (" + fmt(a) + ", " + fmt(b) + ")");
    return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

void MLIndex::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("MLIndex: alpha must be positive, got " + fmt(alpha));
    if (!std::isfinite(beta)) throw DomainError("MLIndex: beta must be finite");
}

MLValue ml_scalar(MLIndex idx, Complex z, double tol) {
    idx.validate();
    if (!(tol > 0.0) || tol > 1e-6) throw DomainError("ml_scalar: tol must lie in (0, 1e-6], got " + fmt(tol));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("ml_scalar: non-finite argument");

    if (z == Complex(0.0, 0.0)) return {Complex(rgamma(idx.beta), 0.0), 0.0, MLRegime::Series};

    const auto tab = detail::ml_table(idx.alpha, idx.beta);
    const double r = std::pow(std::abs(z), 1.0 / idx.alpha);
    const bool asym_valid = idx.alpha < 2.0;

    MLValue out;
    if (r <= kAsymMinR || !asym_valid) {
        Partial s = series(*tab, z, tol);
        out = {s.value, s.error, s.extended ? MLRegime::ExtendedSeries : MLRegime::Series};
        if (!s.ok) out.error = std::numeric_limits<double>::infinity();
    } else if (r >= kSeriesMaxR) {
        Partial a = asymptotic(*tab, z);
        out = {a.value, a.ok ? a.error : std::numeric_limits<double>::infinity(), MLRegime::Asymptotic};
    } else {
        Partial s = series(*tab, z, tol);
        Partial a = asymptotic(*tab, z);
        if (s.ok && a.ok) {
            const Partial& best = s.error <= a.error ? s : a;
            out = {best.value, std::max(best.error, std::abs(s.value - a.value)), MLRegime::Overlap};
        } else if (s.ok) {
            out = {s.value, s.error, s.extended ? MLRegime::ExtendedSeries : MLRegime::Series};
        } else {
            out = {a.value, a.ok ? a.error : std::numeric_limits<double>::infinity(), MLRegime::Asymptotic};
        }
    }

    if (!(out.error <= tol * std::max(1.0, std::abs(out.value)))) {
        std::ostringstream os;
        os.precision(3);
        os << "ml_scalar: E_{" << idx.alpha << "," << idx.beta << "}(" << z.real() << (z.imag() < 0 ? "" : "+")
           << z.imag() << "i) reached error estimate " << out.error << " above tol " << tol;
        throw AccuracyError(os.str(), out.error);
    }
    return out;
}

double ml_real(MLIndex idx, double x, double tol) { return ml_scalar(idx, Complex(x, 0.0), tol).value.real(); }

double matrix_norm(const Matrix& m, MatrixNorm kind) {
    if (m.size() == 0) return 0.0;
    switch (kind) {
        case MatrixNorm::One: return m.cwiseAbs().colwise().sum().maxCoeff();
        case MatrixNorm::Inf: return m.cwiseAbs().rowwise().sum().maxCoeff();
        case MatrixNorm::Two:
        default:
            if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
            return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
    }
}

MatrixMittagLeffler::MatrixMittagLeffler(MLIndex idx, const Matrix& a, double tol, double cond_threshold)
    : idx_(idx), a_(a), tol_(tol) {
    idx_.validate();
    if (a.rows() != a.cols() || a.rows() == 0) throw DomainError("MatrixMittagLeffler: matrix must be square and nonempty");
    if (!a.allFinite()) throw DomainError("MatrixMittagLeffler: matrix entries must be finite");

    Eigen::EigenSolver<Matrix> es(a, true);
    if (es.info() == Eigen::Success) {
        eigenvalues_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
        const auto sv = Eigen::JacobiSVD<CMatrix>(vectors_).singularValues();
        const double smin = sv(sv.size() - 1);
        condition_ = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
        if (condition_ < cond_threshold) {
            diagonal_path_ = true;
            inverse_ = vectors_.partialPivLu().inverse();
        }
    } else {
        condition_ = std::numeric_limits<double>::infinity();
    }
}

Matrix MatrixMittagLeffler::at(double scale) const {
    if (!diagonal_path_) return series_at(scale);
    const Eigen::Index n = a_.rows();
    if (n == 1) {
        Matrix out(1, 1);
        out(0, 0) = ml_scalar(idx_, scale * eigenvalues_(0), tol_).value.real();
        return out;
    }
    CVector d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // Complex-conjugate eigenvalue pairs share the conjugate value.
        if (i > 0 && eigenvalues_(i) == std::conj(eigenvalues_(i - 1)) && eigenvalues_(i).imag() != 0.0) {
            d(i) = std::conj(d(i - 1));
            continue;
        }
        d(i) = ml_scalar(idx_, scale * eigenvalues_(i), tol_).value;
    }
    return (vectors_ * d.asDiagonal() * inverse_).real();
}

Matrix MatrixMittagLeffler::series_at(double scale) const {
    const Eigen::Index n = a_.rows();
    const auto tab = detail::ml_table(idx_.alpha, idx_.beta);
    const auto& c = tab->series_q;
    const auto m = static_cast<std::size_t>(n * n);

    std::vector<quad> a(m), p(m), sum(m, 0), tmp(m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            a[i * n + j] = static_cast<quad>(scale) * static_cast<quad>(a_(i, j));
            p[i * n + j] = (i == j) ? 1 : 0;
        }
    for (Eigen::Index i = 0; i < n; ++i) sum[i * n + i] = c[0];

    auto qnorm = [&](const std::vector<quad>& v) {
        double s = 0.0;
        for (quad x : v) s = std::max(s, std::abs(static_cast<double>(x)));
        return s;
    };

    double weighted = std::abs(static_cast<double>(c[0]));
    double prev = weighted;
    bool converged = false;
    const auto len = static_cast<int>(c.size());
    for (int k = 1; k < len; ++k) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                quad s = 0;
                for (Eigen::Index l = 0; l < n; ++l) s += p[i * n + l] * a[l * n + j];
                tmp[i * n + j] = s;
            }
        std::swap(p, tmp);
        double term_norm = 0.0;
        for (std::size_t e = 0; e < m; ++e) {
            const quad t = p[e] * c[k];
            sum[e] += t;
            term_norm = std::max(term_norm, std::abs(static_cast<double>(t)));
        }
        weighted += (1.0 + k) * term_norm;
        if (!std::isfinite(weighted)) break;
        const bool decreasing = term_norm <= prev;
        prev = term_norm;
        if (decreasing && term_norm <= 1e-22 * std::max(qnorm(sum), 1e-300) && idx_.alpha * k + idx_.beta > 1.0) {
            converged = true;
            break;
        }
    }

    Matrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = static_cast<double>(sum[i * n + j]);

    const double err = 4e-34 * weighted * static_cast<double>(n) + kEps * out.cwiseAbs().maxCoeff();
    if (!converged || !(err <= tol_ * (1.0 + matrix_norm(out, MatrixNorm::Inf)))) {
        throw AccuracyError("MatrixMittagLeffler: truncated series did not reach the requested accuracy",
                            converged ? err : std::numeric_limits<double>::infinity());
    }
    return out;
}

Matrix ml_matrix(MLIndex idx, const Matrix& m, double tol) { return MatrixMittagLeffler(idx, m, tol).at(1.0); }

Matrix ml_kernel(double alpha, const Matrix& a, double t, double tol) {
    if (!(t > 0.0)) throw DomainError("ml_kernel: t must be positive (kernel is singular at 0), got " + fmt(t));
    const MatrixMittagLeffler e({alpha, alpha}, a, tol);
    return std::pow(t, alpha - 1.0) * e.at(std::pow(t, alpha));
}

}  // namespace rlattract

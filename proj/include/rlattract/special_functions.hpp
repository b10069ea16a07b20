#pragma once

// Gamma/Beta functions and Mittag-Leffler functions E_{alpha,beta} of scalar
// and matrix arguments.

#include <complex>
#include <memory>

#include <Eigen/Dense>

namespace rlattract {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Gamma function, at least 13 significant digits. Throws DomainError at poles.
double gamma_fn(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// 1/Gamma(x); zero at the poles of Gamma.
double rgamma(double x);

/// Beta function B(a, b) for a, b > 0, evaluated through log Gamma.
double beta_fn(double a, double b);

/// Parameters (alpha, beta) of E_{alpha,beta}.
struct MLIndex {
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const;
};

enum class MLRegime { Series, ExtendedSeries, Asymptotic, Overlap };

struct MLValue {
    Complex value;
    double error = 0.0;  ///< achieved absolute error estimate
    MLRegime regime = MLRegime::Series;
};

inline constexpr double kDefaultMLTol = 1e-12;

/// Scalar Mittag-Leffler function E_{alpha,beta}(z).
///
/// Small |z|^{1/alpha}: power series, summed in double when the rounding
/// estimate allows and in binary128 otherwise. Large |z|^{1/alpha}: asymptotic
/// expansion (exponential branch for |arg z| <= alpha*pi plus the algebraic
/// tail). In the overlap band both are evaluated and their discrepancy is the
/// reported error. `tol` must lie in (0, 1e-6]; the result satisfies
/// error <= tol * max(1, |E|) or AccuracyError is thrown.
MLValue ml_scalar(MLIndex idx, Complex z, double tol = kDefaultMLTol);

/// Convenience for real arguments with real result.
double ml_real(MLIndex idx, double x, double tol = kDefaultMLTol);

enum class MatrixNorm { Two, One, Inf };

double matrix_norm(const Matrix& m, MatrixNorm kind = MatrixNorm::Two);

/// Evaluates E_{alpha,beta}(s * A) for a fixed matrix A and varying scalar s.
///
/// The eigendecomposition of A is computed once. When the eigenvector matrix
/// has condition number below `cond_threshold` the function is evaluated
/// eigenvalue-wise and conjugated back; otherwise a truncated power series in
/// binary128 is used.
class MatrixMittagLeffler {
public:
    MatrixMittagLeffler(MLIndex idx, const Matrix& a, double tol = kDefaultMLTol,
                        double cond_threshold = 1e6);

    [[nodiscard]] Matrix at(double scale) const;

    [[nodiscard]] bool uses_eigendecomposition() const noexcept { return diagonal_path_; }
    [[nodiscard]] const CVector& eigenvalues() const noexcept { return eigenvalues_; }
    [[nodiscard]] double eigenvector_condition() const noexcept { return condition_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return a_.rows(); }

private:
    [[nodiscard]] Matrix series_at(double scale) const;

    MLIndex idx_;
    Matrix a_;
    double tol_;
    bool diagonal_path_ = false;
    double condition_ = 0.0;
    CVector eigenvalues_;
    CMatrix vectors_;
    CMatrix inverse_;
};

/// Matrix function E_{alpha,beta}(M).
Matrix ml_matrix(MLIndex idx, const Matrix& m, double tol = kDefaultMLTol);

/// Resolvent kernel t^{alpha-1} E_{alpha,alpha}(t^alpha A); t > 0.
Matrix ml_kernel(double alpha, const Matrix& a, double t, double tol = kDefaultMLTol);

}  // namespace rlattract

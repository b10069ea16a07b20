#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rlattract/errors.hpp"
#include "rlattract/special_functions.hpp"

using namespace rlattract;

TEST(Gamma, MatchesStdTgamma) {
    for (double x = -4.75; x < 30.0; x += 0.37) {
        const double ref = std::tgamma(x);
        EXPECT_NEAR(gamma_fn(x), ref, 1e-13 * std::fabs(ref)) << x;
    }
}

TEST(Gamma, PolesThrowAndReciprocalVanishes) {
    for (int n = 0; n < 5; ++n) {
        EXPECT_THROW(gamma_fn(-n), DomainError);
        EXPECT_EQ(rgamma(-n), 0.0);
    }
    EXPECT_NEAR(rgamma(0.5), 1.0 / std::sqrt(M_PI), 1e-15);
}

TEST(Gamma, LogGammaAndBeta) {
    EXPECT_NEAR(log_gamma(100.0), std::lgamma(100.0), 1e-12 * std::lgamma(100.0));
    EXPECT_NEAR(beta_fn(0.5, 0.5), M_PI, 1e-13);
    EXPECT_NEAR(beta_fn(2.5, 1.5), beta_fn(1.5, 2.5), 1e-15);
    EXPECT_NEAR(beta_fn(3.0, 4.0), 2.0 * 6.0 / 720.0, 1e-15);
}

TEST(MittagLeffler, ExponentialCase) {
    for (int i = 0; i <= 40; ++i) {
        const double x = -20.0 + i;
        EXPECT_LE(std::fabs(ml_real({1, 1}, x) - std::exp(x)) / std::exp(x), 1e-10) << x;
    }
}

TEST(MittagLeffler, HalfOrderAgainstErfcOracle) {
    for (int i = 0; i <= 100; ++i) {
        const double x = 0.1 * i;
        EXPECT_NEAR(ml_real({0.5, 1}, -x), oracle::erfcx(x), 1e-8) << x;
    }
}

TEST(MittagLeffler, HalfHalfIdentity) {
    EXPECT_NEAR(ml_real({0.5, 0.5}, -1.0), 0.136606007391949, 1e-12);
    for (double x : {0.2, 2.0, 7.5}) EXPECT_NEAR(ml_real({0.5, 0.5}, -x), 1.0 / std::sqrt(M_PI) - x * oracle::erfcx(x), 1e-10);
}

TEST(MittagLeffler, NegativeBetaDropsPoleTerms) {
    for (double z : {-3.0, 0.5, 2.0}) EXPECT_NEAR(ml_real({1.0, -1.0}, z), z * z * std::exp(z), 1e-12 * std::max(1.0, z * z * std::exp(z)));
}

TEST(MittagLeffler, TrigonometricCases) {
    for (double x = 0.1; x < 8.0; x += 0.3) {
        EXPECT_NEAR(ml_real({2, 1}, -x * x), std::cos(x), 1e-9) << x;
        EXPECT_NEAR(ml_real({2, 2}, -x * x), std::sin(x) / x, 1e-9) << x;
    }
}

TEST(MittagLeffler, ZeroArgumentIsReciprocalGamma) {
    for (double b : {0.3, 1.0, 1.7, 3.2}) EXPECT_NEAR(ml_real({0.7, b}, 0.0), 1.0 / std::tgamma(b), 1e-14);
}

// The long double oracle loses digits once the largest term nears exp(|z|^(1/a)),
// so the sample stays where that is below about 1e4.
TEST(MittagLeffler, ComplexArgumentsAgainstSeries) {
    oracle::Rng rng(7);
    for (int i = 0; i < 60; ++i) {
        const double a = rng.uniform(0.5, 1.9), b = rng.uniform(0.2, 2.5);
        const Complex z(rng.uniform(-2, 2), rng.uniform(-2, 2));
        const auto v = ml_scalar({a, b}, z);
        const auto ref = oracle::ml_series(a, b, z);
        EXPECT_LE(std::abs(v.value - ref), 1e-10 * std::max(1.0, std::abs(ref))) << a << " " << b << " " << z;
    }
}

TEST(MittagLeffler, ReportsErrorWithinTolerance) {
    for (double x : {-0.5, -5.0, -40.0, -900.0, 3.0}) {
        const auto v = ml_scalar({0.5, 1.0}, x, 1e-10);
        EXPECT_LE(v.error, 1e-10 * std::max(1.0, std::abs(v.value)));
    }
}

TEST(MittagLeffler, RejectsBadParameters) {
    EXPECT_THROW(ml_scalar({0.0, 1.0}, 1.0), DomainError);
    EXPECT_THROW(ml_scalar({0.5, NAN}, 1.0), DomainError);
    EXPECT_THROW(ml_scalar({0.5, 1.0}, Complex(INFINITY, 0.0)), DomainError);
    EXPECT_THROW(ml_scalar({0.5, 1.0}, 1.0, 1e-3), Error);
    EXPECT_THROW(ml_scalar({0.5, 1.0}, 1.0, 0.0), Error);
}

TEST(MatrixNorm, KnownValues) {
    Matrix m(2, 2);
    m << 1, -2, 3, 4;
    EXPECT_DOUBLE_EQ(matrix_norm(m, MatrixNorm::One), 6.0);
    EXPECT_DOUBLE_EQ(matrix_norm(m, MatrixNorm::Inf), 7.0);
    Eigen::JacobiSVD<Matrix> svd(m);
    EXPECT_NEAR(matrix_norm(m, MatrixNorm::Two), svd.singularValues()(0), 1e-14);
}

TEST(MatrixMittagLeffler, DiagonalMatchesScalar) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -1.0;
    a(1, 1) = -3.0;
    const auto e = ml_matrix({0.5, 0.5}, a);
    EXPECT_NEAR(e(0, 0), ml_real({0.5, 0.5}, -1.0), 1e-13);
    EXPECT_NEAR(e(1, 1), ml_real({0.5, 0.5}, -3.0), 1e-13);
    EXPECT_NEAR(e(0, 1), 0.0, 1e-14);
}

TEST(MatrixMittagLeffler, ZeroMatrix) {
    const Matrix e = ml_matrix({0.5, 2.5}, Matrix::Zero(3, 3));
    EXPECT_LE((e - Matrix::Identity(3, 3) / std::tgamma(2.5)).norm(), 1e-14);
}

TEST(MatrixMittagLeffler, TriangularAgainstBruteForceSeries) {
    Matrix m(2, 2);
    m << -1, 1, 0, -2;
    Matrix ref = Matrix::Zero(2, 2), p = Matrix::Identity(2, 2);
    for (int k = 0; k < 200; ++k) {
        ref += p / std::tgamma(0.5 * k + 0.5);
        p = p * m;
    }
    EXPECT_LE((ml_matrix({0.5, 0.5}, m) - ref).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(MatrixMittagLeffler, SimilarityInvariance) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = -0.7;
    d(1, 1) = -2.2;
    Matrix p(2, 2);
    p << 1, 2, -1, 1;
    const Matrix a = p * d * p.inverse();
    const Matrix e = ml_matrix({0.6, 1.0}, a);
    Matrix ed = Matrix::Zero(2, 2);
    ed(0, 0) = ml_real({0.6, 1.0}, -0.7);
    ed(1, 1) = ml_real({0.6, 1.0}, -2.2);
    EXPECT_LE((e - p * ed * p.inverse()).norm(), 1e-12);
}

TEST(MatrixMittagLeffler, DefectiveMatrixUsesSeries) {
    Matrix j(2, 2);
    j << -0.5, 1.0, 0.0, -0.5;
    MatrixMittagLeffler E({1.0, 1.0}, j);
    EXPECT_FALSE(E.uses_eigendecomposition());
    const Matrix v = E.at(1.0);
    const double ex = std::exp(-0.5);
    EXPECT_NEAR(v(0, 0), ex, 1e-13);
    EXPECT_NEAR(v(0, 1), ex, 1e-13);
    EXPECT_NEAR(v(1, 0), 0.0, 1e-14);
}

TEST(MatrixMittagLeffler, ComplexEigenvaluesGiveRealResult) {
    Matrix rot(2, 2);
    rot << 0, 1, -1, 0;
    const Matrix c = ml_matrix({2.0, 1.0}, -rot * rot);  // -rot^2 = I, E_{2,1}(I) = cosh(1) I
    EXPECT_NEAR(c(0, 0), std::cosh(1.0), 1e-12);
    const Matrix e = ml_matrix({1.0, 1.0}, rot);  // rotation by 1 radian
    EXPECT_NEAR(e(0, 0), std::cos(1.0), 1e-13);
    EXPECT_NEAR(e(0, 1), std::sin(1.0), 1e-13);
}

TEST(MlKernel, ScalarCase) {
    const Matrix a = Matrix::Constant(1, 1, -1.0);
    for (double t : {1e-4, 0.1, 1.0, 10.0, 300.0}) {
        const double ref = std::pow(t, -0.5) * oracle::ml_half_half_neg(t);
        EXPECT_NEAR(ml_kernel(0.5, a, t)(0, 0), ref, 1e-10 * std::max(1.0, std::fabs(ref))) << t;
    }
    EXPECT_THROW(ml_kernel(0.5, a, 0.0), DomainError);
}

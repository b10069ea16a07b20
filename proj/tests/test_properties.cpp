// Randomized properties with seeded generators.

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "rlattract/attractivity.hpp"
#include "rlattract/config.hpp"
#include "rlattract/errors.hpp"
#include "rlattract/fde_solver.hpp"

using namespace rlattract;

namespace {

// Random well-defined expression over t > 0.
std::string random_expr(oracle::Rng& rng, int depth) {
    if (depth == 0 || rng.integer(0, 3) == 0) {
        if (rng.integer(0, 1)) return "t";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", rng.uniform(0.1, 5.0));
        return buf;
    }
    const std::string a = random_expr(rng, depth - 1), b = random_expr(rng, depth - 1);
    switch (rng.integer(0, 8)) {
        case 0: return "(" + a + " + " + b + ")";
        case 1: return "(" + a + " - " + b + ")";
        case 2: return a + " * " + b;
        case 3: return "(" + a + ") / (1 + abs(" + b + "))";
        case 4: return "sqrt(abs(" + a + "))";
        case 5: return "exp(-abs(" + a + "))";
        case 6: return "log(1 + abs(" + a + "))";
        case 7: return "-" + a;
        default: return "sin(" + a + ")^2";
    }
}

Matrix random_matrix(oracle::Rng& rng, int n, double lo, double hi) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(lo, hi);
    return m;
}

}  // namespace

TEST(Property, ExpressionsAgreeWithOracleAndRoundTrip) {
    oracle::Rng rng(2024);
    for (int i = 0; i < 300; ++i) {
        const std::string src = random_expr(rng, 4);
        const Expr e = parse(src);
        const Expr back = parse(e.to_string());
        oracle::ShuntingYard ref(src);
        for (double t : {0.25, 1.0, 3.5}) {
            const double v = e.eval(t), r = ref.eval(t);
            EXPECT_NEAR(v, r, 1e-12 * std::max(1.0, std::fabs(r))) << src;
            EXPECT_EQ(back.eval(t), v) << src;
        }
    }
}

TEST(Property, MittagLefflerShiftIdentity) {
    oracle::Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        const double a = rng.uniform(0.1, 1.0), b = rng.uniform(0.1, 2.0);
        const Complex z(rng.uniform(-10, 3), i % 2 ? rng.uniform(-2, 2) : 0.0);
        const Complex lhs = ml_scalar({a, b}, z).value;
        const Complex rhs = 1.0 / std::tgamma(b) + z * ml_scalar({a, a + b}, z).value;
        EXPECT_LE(std::abs(lhs - rhs), 1e-9 * std::max(1.0, std::abs(lhs))) << a << " " << b << " " << z;
    }
}

TEST(Property, WeightsExactOnRandomNodeSets) {
    oracle::Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = rng.uniform(0.05, 1.0);
        std::vector<double> nodes{0.0};
        const int n = rng.integer(8, 40);
        for (int i = 0; i < n; ++i) nodes.push_back(nodes.back() + rng.uniform(1e-4, 1.0));
        const auto mesh = mesh_from_nodes(nodes);
        const auto w = weights_single(a, mesh);
        for (std::size_t j = 1; j < mesh.size(); ++j) {
            double s0 = 0.0, s1 = 0.0;
            for (std::size_t k = 0; k <= j; ++k) {
                s0 += w(j, k);
                s1 += w(j, k) * mesh[k];
            }
            const double t = mesh[j];
            EXPECT_NEAR(s0, std::pow(t, a) / a, 1e-12 * std::pow(t, a) / a);
            EXPECT_NEAR(s1, std::pow(t, a + 1) / (a * (a + 1)), 1e-12 * std::pow(t, a + 1) / (a * (a + 1)));
        }
    }
}

TEST(Property, MatrixMittagLefflerCommutesWithArgument) {
    oracle::Rng rng(17);
    for (int i = 0; i < 20; ++i) {
        const int n = rng.integer(2, 4);
        const Matrix a = random_matrix(rng, n, -2.0, 1.0);
        const Matrix e = ml_matrix({rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.5)}, a);
        EXPECT_LE((a * e - e * a).norm(), 1e-10 * (1.0 + e.norm()));
    }
}

TEST(Property, SectorDecisionScaleInvariant) {
    oracle::Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        const Matrix a = random_matrix(rng, rng.integer(1, 4), -3.0, 3.0);
        const double alpha = rng.uniform(0.1, 1.0), c = std::exp(rng.uniform(-5, 5));
        EXPECT_EQ(sector_check(a, alpha).in_sector, sector_check(c * a, alpha).in_sector);
    }
}

TEST(Property, LinearSolverIsLinearInInitialValue) {
    oracle::Rng rng(31);
    for (int i = 0; i < 4; ++i) {
        LinearSystem sys;
        sys.alpha = rng.uniform(0.3, 0.9);
        sys.A = random_matrix(rng, 2, -1.0, 0.3);
        sys.Q = ExprMatrix::zeros(2, 2);
        sys.g = ExprMatrix::zeros(2, 1);
        const Vector u = Vector::Random(2), v = Vector::Random(2);
        const auto mesh = build_mesh(3.0, 64, default_grading(sys.alpha));
        const auto yu = solve_ivp(sys.as_ivp(u), mesh, 1e-13);
        const auto yv = solve_ivp(sys.as_ivp(v), mesh, 1e-13);
        const auto yw = solve_ivp(sys.as_ivp(u + 2.0 * v), mesh, 1e-13);
        for (std::size_t j = 0; j < mesh.size(); ++j)
            EXPECT_LE((yw.y[j] - yu.y[j] - 2.0 * yv.y[j]).norm(), 1e-9 * (1.0 + yw.y[j].norm()));
    }
}

TEST(Property, SolverResidualSmallOnRandomSystems) {
    oracle::Rng rng(37);
    for (int i = 0; i < 4; ++i) {
        LinearSystem sys;
        sys.alpha = rng.uniform(0.3, 0.9);
        sys.A = random_matrix(rng, 2, -1.5, 0.2);
        sys.Q = ExprMatrix::zeros(2, 2);
        sys.Q.entries[1] = parse("0.3/(1+t)");
        sys.g = ExprMatrix::zeros(2, 1);
        sys.g.entries[0] = parse("exp(-t)");
        const auto p = sys.as_ivp(Vector::Ones(2));
        const auto tr = solve_ivp(p, build_mesh(4.0, 256, default_grading(sys.alpha)), 1e-10);
        EXPECT_LT(trajectory_residual(p, tr), 1e-4) << sys.alpha;
    }
}

TEST(Property, RandomUnknownKeysRejected) {
    oracle::Rng rng(41);
    for (int i = 0; i < 50; ++i) {
        std::string key;
        for (int k = rng.integer(1, 8); k > 0; --k) key += static_cast<char>('a' + rng.integer(0, 25));
        if (key == "alpha" || key == "g" || key == "x" || key == "preset" || key == "method" || key == "mesh" ||
            key == "scan" || key == "norm")
            continue;
        EXPECT_THROW(RunConfig::parse(R"({"A": -1, ")" + key + R"(": 1})"), InputError) << key;
    }
}

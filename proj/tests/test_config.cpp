#include <gtest/gtest.h>

#include "rlattract/config.hpp"
#include "rlattract/errors.hpp"

using namespace rlattract;

TEST(Config, DefaultsAreFilledAndEchoed) {
    const auto c = RunConfig::parse(R"({"A": -1})");
    EXPECT_EQ(c.system.alpha, 0.5);
    EXPECT_EQ(c.system.dim(), 1);
    EXPECT_EQ(c.x0(0), 1.0);
    EXPECT_EQ(c.mesh.N, 1024);
    EXPECT_EQ(c.mesh.grading, 4.0);
    EXPECT_EQ(c.scan.per_decade, 20);
    const std::string canon = c.canonical();
    for (const char* key : {"\"alpha\"", "\"mesh\"", "\"scan\"", "\"tolerances\"", "\"norm\"", "\"x0\""})
        EXPECT_NE(canon.find(key), std::string::npos) << key;
}

TEST(Config, CanonicalFormIsAFixedPoint) {
    const auto c = RunConfig::parse(
        R"j({"alpha": 0.7, "A": [[-1, 0.5], [0, -2]], "Q": [["1/(1+t)", 0], [0, "piecewise(t <= 1: 1, else: 1/t)"]],
            "g": ["sin(t)", 1], "x0": [1, -1], "norm": "inf", "mesh": {"T": 5, "N": 64}})j");
    const auto again = RunConfig::parse(c.canonical());
    EXPECT_EQ(again.canonical(), c.canonical());
    EXPECT_EQ(again.hash(), c.hash());
    EXPECT_EQ(c.hash().size(), 16u);
    EXPECT_EQ(c.system.norm, MatrixNorm::Inf);
}

TEST(Config, HashTracksContent) {
    const auto a = RunConfig::parse(R"({"A": -1, "mesh": {"N": 64}})");
    const auto b = RunConfig::parse(R"({ "mesh": {"N": 64}, "A": -1.0 })");
    const auto c = RunConfig::parse(R"({"A": -1, "mesh": {"N": 65}})");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a.hash(), c.hash());
    EXPECT_EQ(fnv1a64(""), 1469598103934665603ULL);
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "alhpa": 0.5})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "mesh": {"n": 10}})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "scan": {"tmax": 10}})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "tolerances": {"abs": 1}})"), InputError);
}

TEST(Config, MalformedJsonReportsOffset) {
    try {
        (void)RunConfig::parse(R"({"A": -1,, })");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 9u);
        EXPECT_NE(std::string(e.what()).find("offset 9:"), std::string::npos);
    }
}

TEST(Config, SchemaViolations) {
    EXPECT_THROW(RunConfig::parse(R"({})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"([1, 2])"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": [[1, 2]]})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": [[1, 0], [0, 1]], "Q": 2})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "g": "1 +"})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "alpha": "0.5"})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "alpha": 1.5})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "mesh": {"N": 10.5}})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "mesh": {"N": 4}})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "norm": "fro"})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "preset": "cubic"})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "tolerances": {"ml": 1e-3}})"), InputError);
    EXPECT_THROW(RunConfig::parse(R"({"A": -1, "scan": {"t_min": 10, "t_max": 1}})"), Error);
}

TEST(Config, BuildsMeshAndProblem) {
    const auto c = RunConfig::parse(R"({"A": -2, "preset": "tanh", "mesh": {"T": 3, "N": 32, "grading": 2}})");
    const auto m = c.build();
    EXPECT_EQ(m.size(), 33u);
    EXPECT_DOUBLE_EQ(m.nodes.back(), 3.0);
    EXPECT_DOUBLE_EQ(*c.problem().lipschitz, 2.0);
}

TEST(Config, MissingFileIsInputError) { EXPECT_THROW(RunConfig::load("/nonexistent/cfg.json"), InputError); }

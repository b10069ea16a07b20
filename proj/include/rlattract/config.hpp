#pragma once

// JSON run configuration. Every key is optional except A; unknown keys are
// rejected. The canonical form (all defaults filled in, keys sorted) is what
// gets hashed and echoed into output metadata.

#include <cstdint>
#include <string>

#include "rlattract/attractivity.hpp"
#include "rlattract/fde_solver.hpp"

namespace rlattract {

enum class SolveMethod { Integral, Voc };

struct MeshConfig {
    double T = 10.0;
    int N = 1024;
    double grading = 0.0;  ///< 0 selects default_grading(alpha)
};

struct Tolerances {
    double solver = 1e-10;
    double ml = kDefaultMLTol;
    int max_inner = 200;
};

struct RunConfig {
    LinearSystem system;
    Vector x0;
    std::string preset = "linear";
    SolveMethod method = SolveMethod::Integral;
    MeshConfig mesh;
    ScanGrid scan;
    Tolerances tol;

    /// Throws ParseError (with byte offset) for malformed JSON and InputError
    /// for schema violations.
    static RunConfig parse(const std::string& json_text);
    static RunConfig load(const std::string& path);

    [[nodiscard]] GradedMesh build() const;
    [[nodiscard]] IVProblem problem() const;

    /// Sorted-key JSON of the fully defaulted configuration.
    [[nodiscard]] std::string canonical() const;
    /// FNV-1a 64 of canonical(), 16 lowercase hex digits.
    [[nodiscard]] std::string hash() const;
};

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace rlattract

#pragma once

// Command implementations shared by the C API. Everything here returns
// artifacts as strings; the caller decides where they go.

#include <string>
#include <vector>

#include "rlattract/attractivity.hpp"
#include "rlattract/config.hpp"

namespace rlattract {

struct SolveResult {
    WeightedTrajectory traj;
    Status status = Status::Ok;
    std::string failure;     ///< message of the convergence error, if any
    double rl_residual = 0;  ///< trajectory_residual, NaN when not computable
};

SolveResult run_solve(const RunConfig& cfg);

/// '#' metadata, header t,y_1..,x_1..,residual, one row per node. Failed runs
/// end with a '# FAILED: ...' line.
std::string trajectory_csv(const RunConfig& cfg, const SolveResult& r);

AttractivityCertificate run_certify(const RunConfig& cfg);

/// 0 certified, 1 not certified, else the status of the failing stage.
int certificate_exit_code(const AttractivityCertificate& c);

struct KernelScan {
    SectorReport sector;
    std::string csv;  ///< empty when A fails the sector condition
};

KernelScan run_scan_kernel(const RunConfig& cfg);

/// Writes the artifacts of a named scenario into out_dir/repro_<name>/ and
/// returns the file paths. Unknown names raise InputError.
std::vector<std::string> run_repro(const std::string& name, const std::string& out_dir);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace rlattract

#include "rlattract/rlattract.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>

#include "frontend.hpp"
#include "rlattract/errors.hpp"
#include "rlattract/special_functions.hpp"

struct rla_config {
    rlattract::RunConfig cfg;
};

struct rla_trajectory {
    rlattract::RunConfig cfg;
    rlattract::SolveResult result;
};

struct rla_certificate {
    rlattract::AttractivityCertificate cert;
};

namespace {

thread_local std::string g_last_error;

rla_status fail(rla_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

// Runs f, translating exceptions into status codes and the error message.
template <class F>
rla_status guarded(F&& f, size_t* offset = nullptr) {
    try {
        g_last_error.clear();
        return f();
    } catch (const rlattract::ParseError& e) {
        if (offset) *offset = e.offset();
        return fail(RLA_INPUT_ERROR, e.what());
    } catch (const rlattract::Error& e) {
        return fail(static_cast<rla_status>(e.status()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(RLA_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(RLA_INTERNAL_ERROR, e.what());
    }
}

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

rla_status null_arg(const char* fn) { return fail(RLA_INPUT_ERROR, std::string(fn) + ": null argument"); }

}  // namespace

extern "C" {

const char* rla_last_error(void) { return g_last_error.c_str(); }

void rla_string_free(char* s) { std::free(s); }

rla_status rla_gamma(double x, double* out) {
    if (!out) return null_arg("rla_gamma");
    return guarded([&] {
        *out = rlattract::gamma_fn(x);
        return RLA_OK;
    });
}

rla_status rla_ml_eval(double alpha, double beta, double z_re, double z_im, double tol, double* out_re,
                       double* out_im, double* out_err) {
    if (!out_re || !out_im) return null_arg("rla_ml_eval");
    return guarded([&] {
        const auto v = rlattract::ml_scalar({alpha, beta}, {z_re, z_im}, tol);
        *out_re = v.value.real();
        *out_im = v.value.imag();
        if (out_err) *out_err = v.error;
        return RLA_OK;
    });
}

rla_status rla_config_parse(const char* json, rla_config** out, size_t* error_offset) {
    if (!json || !out) return null_arg("rla_config_parse");
    *out = nullptr;
    return guarded(
        [&] {
            *out = new rla_config{rlattract::RunConfig::parse(json)};
            return RLA_OK;
        },
        error_offset);
}

rla_status rla_config_load(const char* path, rla_config** out, size_t* error_offset) {
    if (!path || !out) return null_arg("rla_config_load");
    *out = nullptr;
    return guarded(
        [&] {
            *out = new rla_config{rlattract::RunConfig::load(path)};
            return RLA_OK;
        },
        error_offset);
}

void rla_config_free(rla_config* cfg) { delete cfg; }

rla_status rla_config_hash(const rla_config* cfg, char** out) {
    if (!cfg || !out) return null_arg("rla_config_hash");
    return guarded([&] {
        *out = dup(cfg->cfg.hash());
        return RLA_OK;
    });
}

rla_status rla_config_canonical(const rla_config* cfg, char** out) {
    if (!cfg || !out) return null_arg("rla_config_canonical");
    return guarded([&] {
        *out = dup(cfg->cfg.canonical());
        return RLA_OK;
    });
}

rla_status rla_solve(const rla_config* cfg, rla_trajectory** out) {
    if (!cfg || !out) return null_arg("rla_solve");
    *out = nullptr;
    return guarded([&] {
        auto* tr = new rla_trajectory{cfg->cfg, rlattract::run_solve(cfg->cfg)};
        *out = tr;
        if (tr->result.status != rlattract::Status::Ok)
            return fail(static_cast<rla_status>(tr->result.status), tr->result.failure);
        return RLA_OK;
    });
}

void rla_trajectory_free(rla_trajectory* tr) { delete tr; }

size_t rla_trajectory_size(const rla_trajectory* tr) { return tr ? tr->result.traj.size() : 0; }

size_t rla_trajectory_dim(const rla_trajectory* tr) { return tr ? static_cast<size_t>(tr->cfg.system.dim()) : 0; }

rla_status rla_trajectory_t(const rla_trajectory* tr, size_t j, double* out) {
    if (!tr || !out) return null_arg("rla_trajectory_t");
    if (j >= tr->result.traj.size()) return fail(RLA_INPUT_ERROR, "rla_trajectory_t: index out of range");
    *out = tr->result.traj.mesh[j];
    return RLA_OK;
}

rla_status rla_trajectory_y(const rla_trajectory* tr, size_t j, double* out) {
    if (!tr || !out) return null_arg("rla_trajectory_y");
    if (j >= tr->result.traj.size()) return fail(RLA_INPUT_ERROR, "rla_trajectory_y: index out of range");
    const auto& y = tr->result.traj.y[j];
    for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = y(i);
    return RLA_OK;
}

rla_status rla_trajectory_x(const rla_trajectory* tr, size_t j, double* out) {
    if (!tr || !out) return null_arg("rla_trajectory_x");
    if (j == 0 || j >= tr->result.traj.size()) return fail(RLA_INPUT_ERROR, "rla_trajectory_x: index out of range");
    const auto x = tr->result.traj.x(j);
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = x(i);
    return RLA_OK;
}

rla_status rla_trajectory_residual(const rla_trajectory* tr, double* out) {
    if (!tr || !out) return null_arg("rla_trajectory_residual");
    if (!std::isfinite(tr->result.rl_residual))
        return fail(RLA_INPUT_ERROR, "residual unavailable (failed run or fewer than 8 intervals)");
    *out = tr->result.rl_residual;
    return RLA_OK;
}

rla_status rla_trajectory_csv(const rla_trajectory* tr, char** out) {
    if (!tr || !out) return null_arg("rla_trajectory_csv");
    return guarded([&] {
        *out = dup(rlattract::trajectory_csv(tr->cfg, tr->result));
        return RLA_OK;
    });
}

rla_status rla_trajectory_write_csv(const rla_trajectory* tr, const char* path) {
    if (!tr || !path) return null_arg("rla_trajectory_write_csv");
    return guarded([&] {
        rlattract::write_text_file(path, rlattract::trajectory_csv(tr->cfg, tr->result));
        return RLA_OK;
    });
}

rla_status rla_certify(const rla_config* cfg, rla_certificate** out) {
    if (!cfg || !out) return null_arg("rla_certify");
    *out = nullptr;
    return guarded([&] {
        *out = new rla_certificate{rlattract::run_certify(cfg->cfg)};
        return RLA_OK;
    });
}

void rla_certificate_free(rla_certificate* c) { delete c; }

rla_verdict rla_certificate_verdict(const rla_certificate* c) {
    if (!c) return RLA_VERDICT_NOT_CERTIFIED;
    switch (c->cert.verdict) {
        case rlattract::Verdict::CertifiedThm2: return RLA_CERTIFIED_THM2;
        case rlattract::Verdict::CertifiedThm3: return RLA_CERTIFIED_THM3;
        case rlattract::Verdict::NotCertified: break;
    }
    return RLA_VERDICT_NOT_CERTIFIED;
}

int rla_certificate_exit_code(const rla_certificate* c) {
    return c ? rlattract::certificate_exit_code(c->cert) : static_cast<int>(RLA_INPUT_ERROR);
}

rla_status rla_certificate_json(const rla_certificate* c, char** out) {
    if (!c || !out) return null_arg("rla_certificate_json");
    return guarded([&] {
        *out = dup(c->cert.to_json());
        return RLA_OK;
    });
}

rla_status rla_certificate_write(const rla_certificate* c, const char* path) {
    if (!c || !path) return null_arg("rla_certificate_write");
    return guarded([&] {
        rlattract::write_text_file(path, c->cert.to_json());
        return RLA_OK;
    });
}

rla_status rla_scan_kernel(const rla_config* cfg, char** csv, char** sector_report) {
    if (!cfg || !csv) return null_arg("rla_scan_kernel");
    *csv = nullptr;
    if (sector_report) *sector_report = nullptr;
    return guarded([&] {
        const auto ks = rlattract::run_scan_kernel(cfg->cfg);
        std::ostringstream rep;
        rep.precision(17);
        rep << "in_sector=" << (ks.sector.in_sector ? "true" : "false") << " margin=" << ks.sector.margin
            << " eigenvalues=";
        for (Eigen::Index i = 0; i < ks.sector.eigenvalues.size(); ++i)
            rep << (i ? ";" : "") << ks.sector.eigenvalues(i).real() << "," << ks.sector.eigenvalues(i).imag();
        if (sector_report) *sector_report = dup(rep.str());
        if (!ks.sector.in_sector) return fail(RLA_NOT_CERTIFIED, "A fails the sector condition: " + rep.str());
        *csv = dup(ks.csv);
        return RLA_OK;
    });
}

rla_status rla_repro(const char* name, const char* out_dir, char** files) {
    if (!name || !out_dir) return null_arg("rla_repro");
    if (files) *files = nullptr;
    return guarded([&] {
        std::string list;
        for (const auto& f : rlattract::run_repro(name, out_dir)) list += f + "\n";
        if (files) *files = dup(list);
        return RLA_OK;
    });
}

}  // extern "C"

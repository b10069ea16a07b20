#ifndef RLATTRACT_H
#define RLATTRACT_H

/* C interface of the rlattract shared library.
 *
 * Every function returning rla_status stores a message retrievable with
 * rla_last_error() (per thread) when the status is not RLA_OK. Strings
 * returned through char** are owned by the caller and released with
 * rla_string_free(). */

#include <stddef.h>

#if defined(RLA_BUILDING_LIBRARY)
#define RLA_API __attribute__((visibility("default")))
#else
#define RLA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rla_status {
    RLA_OK = 0,
    RLA_NOT_CERTIFIED = 1,
    RLA_INPUT_ERROR = 2,
    RLA_ACCURACY_ERROR = 3,
    RLA_CONVERGENCE_ERROR = 4,
    RLA_INVARIANT_VIOLATION = 5,
    RLA_IO_ERROR = 6,
    RLA_INTERNAL_ERROR = 7
} rla_status;

typedef enum rla_verdict {
    RLA_CERTIFIED_THM2 = 0,
    RLA_CERTIFIED_THM3 = 1,
    RLA_VERDICT_NOT_CERTIFIED = 2
} rla_verdict;

typedef struct rla_config rla_config;
typedef struct rla_trajectory rla_trajectory;
typedef struct rla_certificate rla_certificate;

RLA_API const char* rla_last_error(void);
RLA_API void rla_string_free(char* s);

/* Special functions. */
RLA_API rla_status rla_gamma(double x, double* out);
RLA_API rla_status rla_ml_eval(double alpha, double beta, double z_re, double z_im, double tol,
                               double* out_re, double* out_im, double* out_err);

/* Configuration. For malformed JSON, *error_offset (if non-null) receives
 * the byte offset of the fault. */
RLA_API rla_status rla_config_parse(const char* json, rla_config** out, size_t* error_offset);
RLA_API rla_status rla_config_load(const char* path, rla_config** out, size_t* error_offset);
RLA_API void rla_config_free(rla_config* cfg);
RLA_API rla_status rla_config_hash(const rla_config* cfg, char** out);
RLA_API rla_status rla_config_canonical(const rla_config* cfg, char** out);

/* Solving. On RLA_CONVERGENCE_ERROR *out still receives the nodes solved
 * before the failure. */
RLA_API rla_status rla_solve(const rla_config* cfg, rla_trajectory** out);
RLA_API void rla_trajectory_free(rla_trajectory* tr);
RLA_API size_t rla_trajectory_size(const rla_trajectory* tr);
RLA_API size_t rla_trajectory_dim(const rla_trajectory* tr);
RLA_API rla_status rla_trajectory_t(const rla_trajectory* tr, size_t j, double* out);
/* y(t_j) = t_j^(1-alpha) x(t_j); out holds dim entries. */
RLA_API rla_status rla_trajectory_y(const rla_trajectory* tr, size_t j, double* out);
/* x(t_j) for j >= 1. */
RLA_API rla_status rla_trajectory_x(const rla_trajectory* tr, size_t j, double* out);
/* Integrated-form residual relative to max(1, weighted sup norm). */
RLA_API rla_status rla_trajectory_residual(const rla_trajectory* tr, double* out);
RLA_API rla_status rla_trajectory_csv(const rla_trajectory* tr, char** out);
RLA_API rla_status rla_trajectory_write_csv(const rla_trajectory* tr, const char* path);

/* Certification. RLA_OK means a certificate was produced, whatever its
 * verdict; rla_certificate_exit_code maps it onto the CLI contract. */
RLA_API rla_status rla_certify(const rla_config* cfg, rla_certificate** out);
RLA_API void rla_certificate_free(rla_certificate* c);
RLA_API rla_verdict rla_certificate_verdict(const rla_certificate* c);
RLA_API int rla_certificate_exit_code(const rla_certificate* c);
RLA_API rla_status rla_certificate_json(const rla_certificate* c, char** out);
RLA_API rla_status rla_certificate_write(const rla_certificate* c, const char* path);

/* Kernel scan CSV (t, tail, G). Returns RLA_NOT_CERTIFIED when A fails the
 * sector condition; *sector_report then describes the eigenvalues. */
RLA_API rla_status rla_scan_kernel(const rla_config* cfg, char** csv, char** sector_report);

/* Named scenario artifacts under out_dir/repro_<name>/. *files receives a
 * newline-separated list of written paths. */
RLA_API rla_status rla_repro(const char* name, const char* out_dir, char** files);

#ifdef __cplusplus
}
#endif

#endif

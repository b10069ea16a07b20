#pragma once

// Scan-based evidence for global attractivity of D^alpha x = A x + Q(t) x + g(t).
// Every supremum over t >= 0 is replaced by a maximum over a geometric grid
// together with a stabilization check on an extended horizon.

#include <optional>
#include <string>
#include <vector>

#include "rlattract/errors.hpp"
#include "rlattract/fde_solver.hpp"
#include "rlattract/special_functions.hpp"

namespace rlattract {

struct ScanGrid {
    double t_min = 1e-2;
    double t_max = 1e4;
    int per_decade = 20;
    int inner_N = 800;  ///< geometric steps per side of each inner mesh

    void validate() const;
    /// t_min * 10^(i/per_decade) up to t_max (inclusive, last point clamped).
    [[nodiscard]] std::vector<double> points() const;
    /// Points in (t_max, 2 t_max] with the same spacing, ending at 2 t_max.
    [[nodiscard]] std::vector<double> extension() const;
};

struct Sample {
    double t;
    double value;
};

struct SectorReport {
    bool in_sector = false;
    double margin = 0.0;  ///< min |arg lambda| - alpha pi / 2, radians
    CVector eigenvalues;
};

SectorReport sector_check(const Matrix& A, double alpha);

struct TailBound {
    double M = 0.0;
    double t0 = 1.0;
    double argmax = 0.0;
    /// Maximum sits at t_max and was still growing by more than 1% over the last decade.
    bool max_at_right_end = false;
    std::vector<Sample> samples;  ///< t^{alpha+1} |||t^{alpha-1} E_{alpha,alpha}(t^alpha A)|||
};

/// Requires the sector condition; throws DomainError otherwise.
TailBound kernel_tail_bound(const Matrix& A, double alpha, double t0, const ScanGrid& grid,
                            MatrixNorm norm = MatrixNorm::Two);

struct ScanSup {
    double sup = 0.0;
    bool stabilized = false;
    /// Values grew by more than 1% across the final decade.
    bool growing = false;
    std::vector<Sample> samples;
};

/// G(t) = t^{1-alpha} int_0^t (t-tau)^{alpha-1} |||E_{alpha,alpha}((t-tau)^alpha A)||| tau^{alpha-1} dtau.
ScanSup kernel_double_conv_sup(const Matrix& A, double alpha, const ScanGrid& grid,
                               MatrixNorm norm = MatrixNorm::Two);

/// q = sup_t t^{1-alpha} int (t-tau)^{alpha-1} |||E(...) Q(tau)||| tau^{alpha-1} dtau.
ScanSup contraction_q(const LinearSystem& sys, const ScanGrid& grid);

/// The same supremum without the tau^{alpha-1} weight.
ScanSup contraction_q_unweighted(const LinearSystem& sys, const ScanGrid& grid);

/// 1 / G_sup.
double corollary_threshold(const Matrix& A, double alpha, const ScanGrid& grid, MatrixNorm norm = MatrixNorm::Two);

/// sup_t t^{1-alpha} int (t-tau)^{alpha-1} |E(...) g(tau)| dtau.
ScanSup g_forcing_bound(const LinearSystem& sys, const ScanGrid& grid);

struct DecayReport {
    bool decay_verified = false;
    double K = 0.0;
    double T = 0.0;            ///< NaN when |||Q||| <= 1/K was not reached
    double horizon = 0.0;      ///< largest t inspected
    double q_sup = 0.0;
    double tail_sup = 0.0;
};

/// Scans |||Q(t)||| by decades from t_min, extending the horizon up to 1e15
/// until the tail condition holds or is refuted. `G_sup` enters K.
DecayReport decay_check(const LinearSystem& sys, const ScanGrid& grid, double G_sup);

enum class Verdict { CertifiedThm2, CertifiedThm3, NotCertified };

std::string to_string(Verdict v);

struct AttractivityCertificate {
    Verdict verdict = Verdict::NotCertified;
    SectorReport sector;
    std::optional<double> q;
    std::optional<double> q_unweighted;
    std::optional<double> Q_threshold;
    std::optional<double> G_sup;
    std::optional<TailBound> lemma_M;
    std::optional<double> g_bound;
    std::optional<DecayReport> theorem3;
    ScanGrid grid;
    bool stabilized = false;
    std::string failing_stage;  ///< empty when certified
    std::optional<Status> error_status;  ///< set when a stage raised an error
    std::vector<std::string> notes;

    // Scan samples for export.
    std::vector<Sample> G_samples;
    std::vector<Sample> q_samples;
    std::vector<Sample> g_samples;

    /// JSON document with sorted keys; non-finite numbers become null.
    [[nodiscard]] std::string to_json() const;
};

AttractivityCertificate certify(const LinearSystem& sys, const ScanGrid& grid);

struct QinSample {
    double t;
    double value;      ///< |||ml_kernel(alpha, A, t)|||
    double predicted;  ///< t^{alpha-1} / Gamma(alpha) |||I|||
};

/// Kernel norm near t = 0. With an empty grid, t = 1e-6 * 4^k for k = 0..10.
std::vector<QinSample> qin_probe(const Matrix& A, double alpha, std::vector<double> t_grid = {},
                                 MatrixNorm norm = MatrixNorm::Two);

/// CSV with '#' metadata lines and columns t,value.
std::string samples_csv(const std::vector<Sample>& s, const std::string& title);

}  // namespace rlattract

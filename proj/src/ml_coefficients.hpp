#pragma once

// Coefficient tables for Mittag-Leffler evaluation, cached per (alpha, beta).
// Internal to the library.

#include <memory>
#include <vector>

namespace rlattract::detail {

using quad = __float128;

struct MLTable {
    double alpha = 0.0;
    double beta = 0.0;
    /// 1/Gamma(alpha*k + beta), k = 0..series_len-1.
    std::vector<quad> series_q;
    std::vector<double> series_d;
    /// 1/Gamma(beta - alpha*k), k = 0..asym_len-1 (entry 0 unused). Truncated
    /// where the magnitude leaves the double range.
    std::vector<double> asym;
    /// Bound on |asym[k]| that grows smoothly with k; picks the truncation point.
    std::vector<double> asym_env;
};

/// Largest series length ever tabulated.
inline constexpr int kMaxSeriesTerms = 2000;

/// Thread-safe; the returned table is immutable.
std::shared_ptr<const MLTable> ml_table(double alpha, double beta);

/// 1/Gamma(x) in binary128, zero at the poles.
quad rgamma_q(quad x);

}  // namespace rlattract::detail

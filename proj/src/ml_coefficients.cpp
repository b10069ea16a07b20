#include "ml_coefficients.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <utility>

extern "C" {
#include <quadmath.h>
}

namespace rlattract::detail {

namespace {

std::uint64_t bits(double x) {
    std::uint64_t b;
    std::memcpy(&b, &x, sizeof b);
    return b;
}

int series_length(double alpha, double beta) {
    // Terms beyond alpha*k ~ 200 are below 1e-40 of the peak for every
    // argument the series regime accepts (|z|^{1/alpha} <= 36).
    const double k = (200.0 + std::abs(beta)) / alpha + 8.0;
    if (k >= kMaxSeriesTerms) return kMaxSeriesTerms;
    return static_cast<int>(k);
}

std::shared_ptr<const MLTable> build(double alpha, double beta) {
    auto t = std::make_shared<MLTable>();
    t->alpha = alpha;
    t->beta = beta;

    const int n = series_length(alpha, beta);
    t->series_q.resize(n);
    t->series_d.resize(n);
    for (int k = 0; k < n; ++k) {
        const quad x = static_cast<quad>(alpha) * k + static_cast<quad>(beta);
        const quad c = rgamma_q(x);
        t->series_q[k] = c;
        t->series_d[k] = static_cast<double>(c);
    }

    constexpr int kMaxAsym = 400;
    t->asym.reserve(kMaxAsym);
    t->asym_env.reserve(kMaxAsym);
    t->asym.push_back(0.0);
    t->asym_env.push_back(0.0);
    for (int k = 1; k < kMaxAsym; ++k) {
        const quad x = static_cast<quad>(beta) - static_cast<quad>(alpha) * k;
        const double c = static_cast<double>(rgamma_q(x));
        // |1/Gamma(x)| <= Gamma(1 - x)/pi; clamping the argument at 2 keeps the
        // bound nondecreasing in k (1/Gamma is below 1 on (-1, 1)).
        const quad y = 1 - x;
        const double env = static_cast<double>(expq(lgammaq(y > 2 ? y : quad(2))) / M_PIq);
        if (!std::isfinite(c) || !std::isfinite(env) || env > 1e290) break;
        t->asym.push_back(c);
        t->asym_env.push_back(std::max({env, std::abs(c), 1.0 / M_PI}));
    }
    return t;
}

}  // namespace

quad rgamma_q(quad x) {
    if (x <= 0 && floorq(x) == x) return 0;
    if (x > 0) return expq(-lgammaq(x));
    // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi.
    const quad s = sinq(M_PIq * x);
    return s * expq(lgammaq(1 - x)) / M_PIq;
}

std::shared_ptr<const MLTable> ml_table(double alpha, double beta) {
    static std::mutex mu;
    static std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<const MLTable>> cache;

    const auto key = std::make_pair(bits(alpha), bits(beta));
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto table = build(alpha, beta);
    std::lock_guard<std::mutex> lock(mu);
    if (cache.size() >= 512) cache.clear();
    cache.emplace(key, table);
    return table;
}

}  // namespace rlattract::detail

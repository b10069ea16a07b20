#include "rlattract/attractivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "rlattract/errors.hpp"
#include "rlattract/parallel.hpp"

namespace rlattract {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Innermost geometric node of each inner mesh, relative to its length.
constexpr double kRelMin = 1e-14;
constexpr double kDecayHorizonCap = 1e15;

std::string g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double vec_norm(const Vector& v, MatrixNorm kind) {
    switch (kind) {
        case MatrixNorm::One: return v.lpNorm<1>();
        case MatrixNorm::Inf: return v.lpNorm<Eigen::Infinity>();
        default: return v.norm();
    }
}

void require_sector(const Matrix& A, double alpha, const char* who) {
    if (!sector_check(A, alpha).in_sector)
        throw DomainError(std::string(who) + ": the spectrum of A is not in the stability sector");
}

// t^{1-alpha} int_0^t (t-tau)^{alpha-1} tau^{b-1} phi(tau) dtau by product
// integration on two nested two-sided geometric meshes, Richardson-combined.
double scaled_convolution(double t, double alpha, double b, int per_side, const std::vector<double>& breaks,
                          const std::function<double(double)>& phi) {
    std::vector<double> inner;
    for (double c : breaks)
        if (c > 0.0 && c < t) inner.push_back(c);
    const auto coarse = two_sided_geometric_mesh(t, per_side, kRelMin, inner);
    const auto fine = two_sided_geometric_mesh(t, 2 * per_side, kRelMin, inner);
    std::map<double, double> memo;
    auto value = [&](double tau) {
        auto it = memo.find(tau);
        if (it != memo.end()) return it->second;
        const double v = phi(tau);
        memo.emplace(tau, v);
        return v;
    };
    auto integrate = [&](const GradedMesh& m) {
        const auto w = kernel_weights_to_end(alpha, b, m.nodes);
        double s = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * value(m.nodes[k]);
        return s;
    };
    const double ic = integrate(coarse);
    const double ifine = integrate(fine);
    return std::pow(t, 1.0 - alpha) * (4.0 * ifine - ic) / 3.0;
}

using PointFn = std::function<double(double)>;

ScanSup run_scan(const ScanGrid& grid, const PointFn& at) {
    grid.validate();
    const auto pts = grid.points();
    const auto ext = grid.extension();
    std::vector<double> all = pts;
    all.insert(all.end(), ext.begin(), ext.end());
    std::vector<double> vals(all.size());
    parallel_for(all.size(), [&](std::size_t i) { vals[i] = at(all[i]); });

    ScanSup out;
    out.samples.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out.samples.push_back({pts[i], vals[i]});
        out.sup = std::max(out.sup, vals[i]);
    }
    double ext_sup = out.sup;
    for (std::size_t i = pts.size(); i < all.size(); ++i) ext_sup = std::max(ext_sup, vals[i]);
    out.stabilized = std::isfinite(out.sup) && std::abs(ext_sup - out.sup) <= 0.01 * out.sup;

    // Growth across the final decade.
    const double decade_start = grid.t_max / 10.0;
    double first = kNaN;
    for (const auto& s : out.samples)
        if (s.t >= decade_start * (1.0 - 1e-12)) {
            first = s.value;
            break;
        }
    const double last = out.samples.back().value;
    out.growing = std::isfinite(first) && last > first * 1.01 + 1e-300;
    return out;
}

ScanSup q_scan(const LinearSystem& sys, const ScanGrid& grid, double b) {
    sys.validate();
    require_sector(sys.A, sys.alpha, "contraction_q");
    if (sys.Q.is_constant() && eval_matrix(sys.Q, 0.0).isZero(0.0)) {
        ScanSup z;
        z.stabilized = true;
        for (double t : grid.points()) z.samples.push_back({t, 0.0});
        return z;
    }
    const MatrixMittagLeffler E({sys.alpha, sys.alpha}, sys.A);
    const auto breaks = sys.Q.breakpoints();
    return run_scan(grid, [&](double t) {
        return scaled_convolution(t, sys.alpha, b, grid.inner_N, breaks, [&](double tau) {
            return matrix_norm(E.at(std::pow(t - tau, sys.alpha)) * eval_matrix(sys.Q, tau), sys.norm);
        });
    });
}

}  // namespace

void ScanGrid::validate() const {
    if (!(t_min > 0.0) || !std::isfinite(t_max)) throw InputError("scan: t_min must be positive");
    if (!(t_max / t_min >= 100.0)) throw InputError("scan: t_max / t_min must be at least 100");
    if (per_decade < 1 || per_decade > 1000) throw InputError("scan: per_decade must lie in [1, 1000]");
    if (inner_N < 16 || inner_N > 20000) throw InputError("scan: inner_N must lie in [16, 20000]");
}

std::vector<double> ScanGrid::points() const {
    const double decades = std::log10(t_max / t_min);
    const int n = static_cast<int>(std::ceil(decades * per_decade - 1e-9));
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(t_min * std::pow(10.0, static_cast<double>(i) / per_decade));
    out.push_back(t_max);
    return out;
}

std::vector<double> ScanGrid::extension() const {
    const double step = std::pow(10.0, 1.0 / per_decade);
    std::vector<double> out;
    for (double t = t_max * step; t < 2.0 * t_max * (1.0 - 1e-12); t *= step) out.push_back(t);
    out.push_back(2.0 * t_max);
    return out;
}

SectorReport sector_check(const Matrix& A, double alpha) {
    if (A.rows() == 0 || A.rows() != A.cols()) throw InputError("sector_check: A must be square");
    Eigen::EigenSolver<Matrix> es(A, false);
    if (es.info() != Eigen::Success) throw AccuracyError("sector_check: eigenvalue iteration failed", kNaN);
    SectorReport r;
    r.eigenvalues = es.eigenvalues();
    r.margin = std::numeric_limits<double>::infinity();
    r.in_sector = true;
    const double half = alpha * kPi / 2.0;
    for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
        const Complex l = r.eigenvalues(i);
        double m;
        if (l == Complex(0.0, 0.0)) {
            m = -half;
            r.in_sector = false;
        } else {
            m = std::abs(std::arg(l)) - half;
            if (!(m > 0.0)) r.in_sector = false;
        }
        r.margin = std::min(r.margin, m);
    }
    return r;
}

TailBound kernel_tail_bound(const Matrix& A, double alpha, double t0, const ScanGrid& grid, MatrixNorm norm) {
    if (!(t0 > 0.0)) throw DomainError("kernel_tail_bound: t0 must be positive");
    require_sector(A, alpha, "kernel_tail_bound");
    grid.validate();
    const MatrixMittagLeffler E({alpha, alpha}, A);
    auto pts = grid.points();
    std::vector<double> vals(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        const double t = pts[i];
        vals[i] = std::pow(t, 2.0 * alpha) * matrix_norm(E.at(std::pow(t, alpha)), norm);
    });
    TailBound tb;
    tb.t0 = t0;
    tb.M = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        tb.samples.push_back({pts[i], vals[i]});
        if (pts[i] >= t0 && vals[i] > tb.M) {
            tb.M = vals[i];
            tb.argmax = pts[i];
        }
    }
    if (tb.argmax == pts.back()) {
        const double decade = grid.t_max / 10.0;
        double first = vals.back();
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (pts[i] >= decade * (1.0 - 1e-12)) {
                first = vals[i];
                break;
            }
        tb.max_at_right_end = vals.back() > 1.01 * first;
    }
    return tb;
}

ScanSup kernel_double_conv_sup(const Matrix& A, double alpha, const ScanGrid& grid, MatrixNorm norm) {
    require_sector(A, alpha, "kernel_double_conv_sup");
    const MatrixMittagLeffler E({alpha, alpha}, A);
    return run_scan(grid, [&](double t) {
        return scaled_convolution(t, alpha, alpha, grid.inner_N, {}, [&](double tau) {
            return matrix_norm(E.at(std::pow(t - tau, alpha)), norm);
        });
    });
}

ScanSup contraction_q(const LinearSystem& sys, const ScanGrid& grid) { return q_scan(sys, grid, sys.alpha); }

ScanSup contraction_q_unweighted(const LinearSystem& sys, const ScanGrid& grid) { return q_scan(sys, grid, 1.0); }

double corollary_threshold(const Matrix& A, double alpha, const ScanGrid& grid, MatrixNorm norm) {
    return 1.0 / kernel_double_conv_sup(A, alpha, grid, norm).sup;
}

ScanSup g_forcing_bound(const LinearSystem& sys, const ScanGrid& grid) {
    sys.validate();
    require_sector(sys.A, sys.alpha, "g_forcing_bound");
    if (sys.g.is_constant() && eval_vector(sys.g, 0.0).isZero(0.0)) {
        ScanSup z;
        z.stabilized = true;
        for (double t : grid.points()) z.samples.push_back({t, 0.0});
        return z;
    }
    const MatrixMittagLeffler E({sys.alpha, sys.alpha}, sys.A);
    const auto breaks = sys.g.breakpoints();
    return run_scan(grid, [&](double t) {
        return scaled_convolution(t, sys.alpha, 1.0, grid.inner_N, breaks, [&](double tau) {
            return vec_norm(E.at(std::pow(t - tau, sys.alpha)) * eval_vector(sys.g, tau), sys.norm);
        });
    });
}

DecayReport decay_check(const LinearSystem& sys, const ScanGrid& grid, double G_sup) {
    sys.validate();
    require_sector(sys.A, sys.alpha, "decay_check");
    grid.validate();
    auto qn = [&](double t) { return matrix_norm(eval_matrix(sys.Q, t), sys.norm); };

    // Values on [0, t_min], at each side of every breakpoint, then by decades.
    double sup = qn(0.0);
    for (double c : sys.Q.breakpoints()) {
        if (c >= 0.0) sup = std::max(sup, qn(c));
        if (c > 0.0) sup = std::max(sup, qn(std::nextafter(c, kDecayHorizonCap)));
    }
    const double step = std::pow(10.0, 1.0 / grid.per_decade);
    auto decade_max = [&](double lo) {
        double m = 0.0;
        double t = lo;
        for (int i = 0; i <= grid.per_decade; ++i, t *= step) m = std::max(m, qn(std::min(t, 10.0 * lo)));
        return m;
    };

    const double first = decade_max(grid.t_min);
    sup = std::max(sup, first);
    DecayReport rep;
    double lo = grid.t_min;
    double tail = first;
    bool verified = false;
    // Advance decade by decade; stop once the tail criterion holds at or beyond t_max.
    while (true) {
        const double hi = 10.0 * lo;
        const double m = decade_max(lo);
        sup = std::max(sup, m);
        tail = m;
        verified = tail <= 0.1 * first && tail < 1e-3 * (1.0 + sup);
        if (hi >= grid.t_max && verified) break;
        if (hi >= kDecayHorizonCap) break;
        lo = hi;
    }
    rep.horizon = 10.0 * lo;
    rep.decay_verified = verified;
    rep.q_sup = sup;
    rep.tail_sup = tail;

    const MatrixMittagLeffler E({sys.alpha, sys.alpha}, sys.A);
    double e_sup = matrix_norm(E.at(0.0), sys.norm);
    for (double t : grid.points()) e_sup = std::max(e_sup, matrix_norm(E.at(std::pow(t, sys.alpha)), sys.norm));
    rep.K = std::max(e_sup * sup, 4.0 * G_sup);

    // T: first scanned point after which |||Q||| stays below 1/K, found on a
    // geometric sweep that extends until a whole decade satisfies the bound.
    rep.T = kNaN;
    if (rep.decay_verified) {
        const double bound = 1.0 / rep.K;
        double candidate = kNaN;
        double t = grid.t_min;
        double decade_end = 10.0 * t;
        bool decade_ok = true;
        while (t <= kDecayHorizonCap) {
            if (qn(t) <= bound) {
                if (std::isnan(candidate)) candidate = t;
            } else {
                candidate = kNaN;
                decade_ok = false;
            }
            t *= step;
            if (t >= decade_end * (1.0 - 1e-12)) {
                if (decade_ok && !std::isnan(candidate) && decade_end >= grid.t_max) break;
                decade_end *= 10.0;
                decade_ok = true;
            }
        }
        rep.T = candidate;
        rep.horizon = std::max(rep.horizon, std::min(t, kDecayHorizonCap));
    }
    return rep;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::CertifiedThm2: return "certified_thm2";
        case Verdict::CertifiedThm3: return "certified_thm3";
        default: return "not_certified";
    }
}

AttractivityCertificate certify(const LinearSystem& sys, const ScanGrid& grid) {
    sys.validate();
    grid.validate();
    AttractivityCertificate c;
    c.grid = grid;
    c.notes.push_back("initial condition: lim t^(1-alpha) x(t) = x0; the homogeneous solution is "
                      "Gamma(alpha) t^(alpha-1) E_{alpha,alpha}(t^alpha A) x0");
    c.notes.push_back(std::string("matrix norm: ") +
                      (sys.norm == MatrixNorm::One ? "1" : sys.norm == MatrixNorm::Inf ? "inf" : "2"));
    c.notes.push_back("suprema are maxima over a geometric scan of [t_min, t_max] with a stabilization check on "
                      "(t_max, 2 t_max]");
    for (const auto& w : sys.Q.warnings()) c.notes.push_back("Q continuity: " + w);
    for (const auto& w : sys.g.warnings()) c.notes.push_back("g continuity: " + w);

    std::string stage = "sector";
    try {
        c.sector = sector_check(sys.A, sys.alpha);
        if (!c.sector.in_sector) {
            c.failing_stage = "sector";
            c.notes.push_back("failing stage: sector (an eigenvalue of A lies outside |arg| > alpha pi/2)");
            return c;
        }

        stage = "lemma_M";
        c.lemma_M = kernel_tail_bound(sys.A, sys.alpha, 1.0, grid, sys.norm);
        if (c.lemma_M->max_at_right_end)
            c.notes.push_back("warning: kernel tail maximum at t_max and still growing over the last decade");

        stage = "G_sup";
        const auto G = kernel_double_conv_sup(sys.A, sys.alpha, grid, sys.norm);
        c.G_sup = G.sup;
        c.G_samples = G.samples;
        c.Q_threshold = 1.0 / G.sup;
        if (G.growing) c.notes.push_back("warning: G grows across the final decade");

        stage = "q";
        const auto q = contraction_q(sys, grid);
        c.q = q.sup;
        c.q_samples = q.samples;
        c.q_unweighted = contraction_q_unweighted(sys, grid).sup;
        c.notes.push_back("q uses the tau^(alpha-1)-weighted integrand; unweighted variant q = " +
                          g6(*c.q_unweighted));

        stage = "g_bound";
        const auto gb = g_forcing_bound(sys, grid);
        c.g_bound = gb.sup;
        c.g_samples = gb.samples;

        c.stabilized = G.stabilized && q.stabilized && gb.stabilized;
        if (!gb.stabilized) c.notes.push_back("g_bound did not stabilize under horizon doubling");
        if (!q.stabilized) c.notes.push_back("q did not stabilize under horizon doubling");

        if (q.sup < 1.0 && q.stabilized && gb.stabilized) {
            c.verdict = Verdict::CertifiedThm2;
            return c;
        }

        stage = "theorem3";
        c.theorem3 = decay_check(sys, grid, G.sup);
        c.notes.push_back("theorem3 decay scan horizon " + g6(c.theorem3->horizon));
        if (c.theorem3->decay_verified && gb.stabilized) {
            c.verdict = Verdict::CertifiedThm3;
            return c;
        }
        std::string why = "failing stage: ";
        if (!gb.stabilized) {
            why += "g_bound (forcing integral not stabilized)";
            c.failing_stage = "g_bound";
        } else {
            why += "theorem3 (q >= 1 and Q not verified to decay)";
            c.failing_stage = "theorem3";
        }
        c.notes.push_back(why);
    } catch (const Error& e) {
        c.verdict = Verdict::NotCertified;
        c.failing_stage = stage;
        c.notes.push_back("failing stage: " + stage + " (" + e.what() + ")");
        c.error_status = e.status();
    }
    return c;
}

std::string AttractivityCertificate::to_json() const {
    using nlohmann::json;
    auto num = [](const std::optional<double>& v) -> json {
        if (!v || !std::isfinite(*v)) return nullptr;
        return *v;
    };
    json j;
    j["verdict"] = rlattract::to_string(verdict);
    json eig = json::array();
    for (Eigen::Index i = 0; i < sector.eigenvalues.size(); ++i)
        eig.push_back({sector.eigenvalues(i).real(), sector.eigenvalues(i).imag()});
    j["sector"] = {{"in_sector", sector.in_sector},
                   {"margin", num(sector.eigenvalues.size() ? std::optional<double>(sector.margin) : std::nullopt)},
                   {"eigenvalues", eig}};
    j["q"] = num(q);
    j["Q_threshold"] = num(Q_threshold);
    j["G_sup"] = num(G_sup);
    j["lemma_M"] = {{"M", lemma_M ? num(lemma_M->M) : json(nullptr)},
                    {"t0", lemma_M ? num(lemma_M->t0) : json(nullptr)}};
    j["g_bound"] = num(g_bound);
    j["theorem3"] = {{"K", theorem3 ? num(theorem3->K) : json(nullptr)},
                     {"T", theorem3 ? num(theorem3->T) : json(nullptr)},
                     {"decay_verified", theorem3 ? json(theorem3->decay_verified) : json(nullptr)}};
    j["scan"] = {{"t_min", grid.t_min}, {"t_max", grid.t_max}, {"per_decade", grid.per_decade}, {"stabilized", stabilized}};
    j["convention_notes"] = notes;
    return j.dump(2) + "\n";
}

std::vector<QinSample> qin_probe(const Matrix& A, double alpha, std::vector<double> t_grid, MatrixNorm norm) {
    if (A.rows() == 0 || A.rows() != A.cols()) throw InputError("qin_probe: A must be square");
    if (t_grid.empty())
        for (int k = 0; k <= 10; ++k) t_grid.push_back(1e-6 * std::pow(4.0, k));
    const MatrixMittagLeffler E({alpha, alpha}, A);
    const double lead = matrix_norm(Matrix::Identity(A.rows(), A.cols()), norm) / gamma_fn(alpha);
    std::vector<QinSample> out;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw DomainError("qin_probe: grid points must be positive");
        const double v = std::pow(t, alpha - 1.0) * matrix_norm(E.at(std::pow(t, alpha)), norm);
        out.push_back({t, v, std::pow(t, alpha - 1.0) * lead});
    }
    return out;
}

std::string samples_csv(const std::vector<Sample>& s, const std::string& title) {
    std::string out = "# " + title + "\nt,value\n";
    char buf[64];
    for (const auto& x : s) {
        std::snprintf(buf, sizeof buf, "%.16e,%.16e\n", x.t, x.value);
        out += buf;
    }
    return out;
}

}  // namespace rlattract

#include "frontend.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rlattract/errors.hpp"

namespace rlattract {

namespace {

std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

void linear_only(const RunConfig& cfg, const char* what) {
    if (cfg.preset != "linear") throw InputError(std::string(what) + " needs the linear preset");
}

std::string header_lines(const RunConfig& cfg, const std::string& title) {
    return "# " + title + "\n# config_hash=" + cfg.hash() + "\n# config=" + cfg.canonical() + "\n";
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Status::IoError, "cannot write '" + path + "'");
    out << content;
    if (!out) throw Error(Status::IoError, "write failed for '" + path + "'");
}

SolveResult run_solve(const RunConfig& cfg) {
    const GradedMesh mesh = cfg.build();
    const IVProblem p = cfg.problem();
    SolveResult r;
    if (cfg.method == SolveMethod::Voc) {
        linear_only(cfg, "method voc");
        r.traj = solve_linear_voc(cfg.system, cfg.x0, mesh, cfg.tol.ml);
    } else {
        WeightedTrajectory partial;
        try {
            r.traj = solve_ivp(p, mesh, cfg.tol.solver, cfg.tol.max_inner, &partial);
        } catch (const ConvergenceError& e) {
            r.traj = std::move(partial);
            r.status = Status::ConvergenceError;
            r.failure = e.what();
            r.rl_residual = std::nan("");
            return r;
        }
    }
    r.rl_residual = r.traj.size() > 8 ? trajectory_residual(p, r.traj) : std::nan("");
    return r;
}

std::string trajectory_csv(const RunConfig& cfg, const SolveResult& r) {
    const int s = cfg.system.dim();
    std::string out = header_lines(cfg, "rlattract trajectory");
    out += "# method=" + std::string(cfg.method == SolveMethod::Voc ? "voc" : "integral") + "\n";
    out += "# rl_residual=" + sci(r.rl_residual) + "\n";
    out += "t";
    for (int i = 1; i <= s; ++i) out += ",y_" + std::to_string(i);
    for (int i = 1; i <= s; ++i) out += ",x_" + std::to_string(i);
    out += ",residual\n";
    const double am1 = cfg.system.alpha - 1.0;
    for (std::size_t j = 0; j < r.traj.size(); ++j) {
        const double t = r.traj.mesh[j];
        out += sci(t);
        for (int i = 0; i < s; ++i) out += "," + sci(r.traj.y[j](i));
        for (int i = 0; i < s; ++i) {
            const double y = r.traj.y[j](i);
            out += "," + sci(y == 0.0 ? 0.0 : std::pow(t, am1) * y);
        }
        out += "," + sci(j < r.traj.residual.size() ? r.traj.residual[j] : 0.0) + "\n";
    }
    if (r.status != Status::Ok) out += "# FAILED: " + r.failure + "\n";
    return out;
}

AttractivityCertificate run_certify(const RunConfig& cfg) {
    linear_only(cfg, "certify");
    AttractivityCertificate c = certify(cfg.system, cfg.scan);
    c.notes.push_back("config_hash=" + cfg.hash());
    return c;
}

int certificate_exit_code(const AttractivityCertificate& c) {
    if (c.error_status) return static_cast<int>(*c.error_status);
    return c.verdict == Verdict::NotCertified ? 1 : 0;
}

KernelScan run_scan_kernel(const RunConfig& cfg) {
    const LinearSystem& sys = cfg.system;
    KernelScan ks;
    ks.sector = sector_check(sys.A, sys.alpha);
    if (!ks.sector.in_sector) return ks;
    const ScanSup G = kernel_double_conv_sup(sys.A, sys.alpha, cfg.scan, sys.norm);
    const TailBound tail = kernel_tail_bound(sys.A, sys.alpha, cfg.scan.t_min, cfg.scan, sys.norm);
    std::string out = header_lines(cfg, "kernel scan: tail = t^(alpha+1) |||t^(alpha-1) E(t^alpha A)|||, G = weighted double convolution");
    out += "# G_sup=" + sci(G.sup) + " stabilized=" + (G.stabilized ? "true" : "false") + "\n";
    out += "# M=" + sci(tail.M) + " argmax=" + sci(tail.argmax) + "\n";
    out += "t,tail,G\n";
    for (std::size_t i = 0; i < G.samples.size() && i < tail.samples.size(); ++i) {
        if (G.samples[i].t != tail.samples[i].t) throw InvariantViolation("scan-kernel: sample grids differ");
        out += sci(G.samples[i].t) + "," + sci(tail.samples[i].value) + "," + sci(G.samples[i].value) + "\n";
    }
    ks.csv = std::move(out);
    return ks;
}

namespace {

struct ReproWriter {
    std::filesystem::path dir;
    std::vector<std::string> written;

    void put(const std::string& name, const std::string& content) {
        const auto p = (dir / name).string();
        write_text_file(p, content);
        written.push_back(p);
    }

    void certificate(const std::string& stem, const AttractivityCertificate& c) {
        put(stem + ".json", c.to_json());
        if (!c.G_samples.empty()) put(stem + "_scan_G.csv", samples_csv(c.G_samples, "G(t)"));
        if (!c.q_samples.empty()) put(stem + "_scan_q.csv", samples_csv(c.q_samples, "q integrand supremum scan"));
        if (!c.g_samples.empty()) put(stem + "_scan_g.csv", samples_csv(c.g_samples, "forcing bound scan"));
    }

    void trajectory(const std::string& name, const RunConfig& cfg) {
        put(name, trajectory_csv(cfg, run_solve(cfg)));
    }
};

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<std::string> run_repro(const std::string& name, const std::string& out_dir) {
    if (name != "example1" && name != "example2" && name != "cong" && name != "qin")
        throw InputError("unknown repro scenario '" + name + "' (expected example1, example2, cong or qin)");
    ReproWriter w{std::filesystem::path(out_dir) / ("repro_" + name), {}};
    std::error_code ec;
    std::filesystem::create_directories(w.dir, ec);
    if (ec) throw Error(Status::IoError, "cannot create '" + w.dir.string() + "': " + ec.message());

    const std::string forcing = R"j("g": "1/(1+sqrt(t))")j";
    const std::string sim = R"j("method": "voc", "mesh": {"T": 100, "N": 1024})j";

    if (name == "example1") {
        const double thr = corollary_threshold(Matrix::Constant(1, 1, -1.0), 0.5, ScanGrid{});
        const auto cfg = RunConfig::parse(R"j({"alpha": 0.5, "A": -1, "Q": )j" + g17(0.9 * thr) + ", " + forcing +
                                          ", " + sim + "}");
        w.put("config.json", cfg.canonical() + "\n");
        w.certificate("cert", run_certify(cfg));
        w.trajectory("trajectory.csv", cfg);
    } else if (name == "example2") {
        const auto literal = RunConfig::parse(R"j({"alpha": 0.5, "A": -1, "Q": "piecewise(t <= 1000: 1000, else: 1000000/t)", )j" +
                                              forcing + "}");
        const auto scaled = RunConfig::parse(R"j({"alpha": 0.5, "A": -1, "Q": "piecewise(t <= 10: 5, else: 50/t)", )j" +
                                             forcing + ", " + sim + "}");
        w.put("config.json", literal.canonical() + "\n");
        w.put("config_scaled.json", scaled.canonical() + "\n");
        w.certificate("cert", run_certify(literal));
        w.certificate("cert_scaled", run_certify(scaled));
        w.trajectory("trajectory_scaled.csv", scaled);
    } else if (name == "cong") {
        const auto cfg = RunConfig::parse(R"j({"alpha": 0.5, "A": -1, "Q": 2, "method": "voc", "mesh": {"T": 20, "N": 512}})j");
        w.put("config.json", cfg.canonical() + "\n");
        w.certificate("cert", run_certify(cfg));
        w.trajectory("trajectory.csv", cfg);
    } else {
        std::string out = "# kernel norm |||t^(alpha-1) E_{alpha,alpha}(t^alpha A)||| near t = 0, A = -1, alpha = 0.5\n";
        out += "# predicted = t^(alpha-1)/Gamma(alpha)\nt,value,predicted\n";
        for (const auto& s : qin_probe(Matrix::Constant(1, 1, -1.0), 0.5))
            out += sci(s.t) + "," + sci(s.value) + "," + sci(s.predicted) + "\n";
        w.put("qin.csv", out);
    }
    return w.written;
}

}  // namespace rlattract

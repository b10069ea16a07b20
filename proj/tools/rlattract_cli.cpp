// Command-line front end. Talks to the library through the C API only.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "rlattract/rlattract.h"

namespace {

constexpr int kInputError = RLA_INPUT_ERROR;

int report(rla_status s) {
    std::fprintf(stderr, "error: %s\n", rla_last_error());
    return static_cast<int>(s);
}

// "re,im" or "re".
bool parse_complex(const std::string& text, double& re, double& im) {
    const char* s = text.c_str();
    char* end = nullptr;
    re = std::strtod(s, &end);
    if (end == s) return false;
    im = 0.0;
    if (*end == '\0') return true;
    if (*end != ',') return false;
    const char* t = end + 1;
    im = std::strtod(t, &end);
    return end != t && *end == '\0';
}

// Owns a loaded configuration; prints the failure itself.
struct Config {
    rla_config* ptr = nullptr;
    int status = 0;

    explicit Config(const std::string& path) {
        size_t offset = 0;
        const rla_status s = rla_config_load(path.c_str(), &ptr, &offset);
        if (s != RLA_OK) status = report(s);
    }
    ~Config() { rla_config_free(ptr); }
    Config(const Config&) = delete;
    Config& operator=(const Config&) = delete;
};

int cmd_ml_eval(double alpha, double beta, const std::string& z, double tol) {
    double re = 0.0, im = 0.0;
    if (!parse_complex(z, re, im)) {
        std::fprintf(stderr, "error: --z expects \"re,im\", got '%s'\n", z.c_str());
        return kInputError;
    }
    double vr = 0.0, vi = 0.0, err = 0.0;
    const rla_status s = rla_ml_eval(alpha, beta, re, im, tol, &vr, &vi, &err);
    if (s != RLA_OK) return report(s);
    std::printf("value=%.17g,%.17g error=%.3e\n", vr, vi, err);
    return 0;
}

int cmd_solve(const std::string& path, const std::string& out) {
    Config cfg(path);
    if (cfg.status) return cfg.status;
    rla_trajectory* tr = nullptr;
    const rla_status s = rla_solve(cfg.ptr, &tr);
    int code = 0;
    if (s != RLA_OK) code = report(s);
    if (tr) {
        const rla_status w = rla_trajectory_write_csv(tr, out.c_str());
        if (w != RLA_OK && code == 0) code = report(w);
        rla_trajectory_free(tr);
    }
    return code;
}

int cmd_certify(const std::string& path, const std::string& out) {
    Config cfg(path);
    if (cfg.status) return cfg.status;
    rla_certificate* c = nullptr;
    const rla_status s = rla_certify(cfg.ptr, &c);
    if (s != RLA_OK) return report(s);
    int code = rla_certificate_exit_code(c);
    const rla_status w = rla_certificate_write(c, out.c_str());
    if (w != RLA_OK) code = report(w);
    static const char* const names[] = {"certified_thm2", "certified_thm3", "not_certified"};
    std::printf("verdict: %s\n", names[rla_certificate_verdict(c)]);
    rla_certificate_free(c);
    return code;
}

int cmd_scan_kernel(const std::string& path, const std::string& out) {
    Config cfg(path);
    if (cfg.status) return cfg.status;
    char* csv = nullptr;
    char* sector = nullptr;
    const rla_status s = rla_scan_kernel(cfg.ptr, &csv, &sector);
    if (sector) {
        std::printf("sector: %s\n", sector);
        rla_string_free(sector);
    }
    if (s != RLA_OK) return report(s);
    FILE* f = std::fopen(out.c_str(), "wb");
    if (!f) {
        rla_string_free(csv);
        std::fprintf(stderr, "error: cannot write '%s'\n", out.c_str());
        return RLA_IO_ERROR;
    }
    std::fputs(csv, f);
    std::fclose(f);
    rla_string_free(csv);
    return 0;
}

int cmd_repro(const std::string& name, const std::string& dir) {
    char* files = nullptr;
    const rla_status s = rla_repro(name.c_str(), dir.c_str(), &files);
    if (s != RLA_OK) return report(s);
    std::fputs(files, stdout);
    rla_string_free(files);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Riemann-Liouville fractional systems: solver and attractivity certificates"};
    app.require_subcommand(1);

    double alpha = 0.5, beta = 1.0, tol = 1e-12;
    std::string z, config, out, name, dir = ".";

    auto* ml = app.add_subcommand("ml-eval", "Evaluate E_{alpha,beta}(z)");
    ml->add_option("--alpha", alpha, "alpha in (0, 2]")->required();
    ml->add_option("--beta", beta, "second parameter (any real)")->required();
    ml->add_option("--z", z, "argument as re,im")->required();
    ml->add_option("--tol", tol, "relative tolerance in (0, 1e-6]");

    auto* solve = app.add_subcommand("solve", "Solve the initial value problem of a config");
    solve->add_option("config", config, "JSON config")->required();
    solve->add_option("--out", out, "trajectory CSV")->default_val("traj.csv");

    auto* cert = app.add_subcommand("certify", "Certify global attractivity of a linear system");
    cert->add_option("config", config, "JSON config")->required();
    cert->add_option("--out", out, "certificate JSON")->default_val("cert.json");

    auto* scan = app.add_subcommand("scan-kernel", "Scan the kernel bounds of A");
    scan->add_option("config", config, "JSON config")->required();
    scan->add_option("--out", out, "scan CSV")->default_val("g_scan.csv");

    auto* repro = app.add_subcommand("repro", "Write artifacts of a named scenario");
    repro->add_option("name", name, "example1 | example2 | cong | qin")->required();
    repro->add_option("--dir", dir, "parent directory for repro_<name>/");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    if (*ml) return cmd_ml_eval(alpha, beta, z, tol);
    if (*solve) return cmd_solve(config, out);
    if (*cert) return cmd_certify(config, out);
    if (*scan) return cmd_scan_kernel(config, out);
    return cmd_repro(name, dir);
}

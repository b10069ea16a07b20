#include "rlattract/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rlattract/errors.hpp"

namespace rlattract {

namespace {

using json = nlohmann::json;

[[noreturn]] void schema_error(const std::string& key, const std::string& msg) {
    throw InputError("config: '" + key + "' " + msg);
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [k, v] : obj.items()) {
        (void)v;
        if (!allowed.count(k)) {
            std::string full = where.empty() ? k : where + "." + k;
            throw InputError("config: unknown key '" + full + "'");
        }
    }
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) schema_error(key, "must be a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) schema_error(key, "must be finite");
    return x;
}

int integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) schema_error(key, "must be an integer");
    auto x = v.get<long long>();
    if (x < 0 || x > 100000000) schema_error(key, "is out of range");
    return static_cast<int>(x);
}

Expr expression(const json& v, const std::string& key) {
    if (v.is_number()) return Expr::constant(number(v, key));
    if (!v.is_string()) schema_error(key, "must be a number or an expression string");
    try {
        return Expr::parse(v.get<std::string>());
    } catch (const ParseError& e) {
        throw InputError("config: '" + key + "': " + e.what());
    }
}

Matrix parse_A(const json& v) {
    if (v.is_number()) return Matrix::Constant(1, 1, number(v, "A"));
    if (!v.is_array() || v.empty()) schema_error("A", "must be a number or a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(v.size());
    Matrix A(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) schema_error("A", "must be square");
        for (Eigen::Index j = 0; j < n; ++j)
            A(i, j) = number(row[static_cast<std::size_t>(j)], "A");
    }
    return A;
}

ExprMatrix parse_Q(const json& v, int s) {
    ExprMatrix m = ExprMatrix::zeros(s, s);
    if (!v.is_array()) {
        if (s != 1) schema_error("Q", "must be an s x s array for s > 1");
        m.entries[0] = expression(v, "Q");
        return m;
    }
    if (static_cast<int>(v.size()) != s) schema_error("Q", "must have as many rows as A");
    for (int i = 0; i < s; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != s) schema_error("Q", "must be s x s");
        for (int j = 0; j < s; ++j)
            m.entries[static_cast<std::size_t>(i * s + j)] = expression(row[static_cast<std::size_t>(j)], "Q");
    }
    return m;
}

ExprMatrix parse_g(const json& v, int s) {
    ExprMatrix m = ExprMatrix::zeros(s, 1);
    if (!v.is_array()) {
        if (s != 1) schema_error("g", "must be an array of length s for s > 1");
        m.entries[0] = expression(v, "g");
        return m;
    }
    if (static_cast<int>(v.size()) != s) schema_error("g", "must have length s");
    for (int i = 0; i < s; ++i) m.entries[static_cast<std::size_t>(i)] = expression(v[static_cast<std::size_t>(i)], "g");
    return m;
}

Vector parse_x0(const json& v, int s) {
    if (!v.is_array()) {
        if (s != 1) schema_error("x0", "must be an array of length s for s > 1");
        return Vector::Constant(1, number(v, "x0"));
    }
    if (static_cast<int>(v.size()) != s) schema_error("x0", "must have length s");
    Vector x(s);
    for (int i = 0; i < s; ++i) x(i) = number(v[static_cast<std::size_t>(i)], "x0");
    return x;
}

const json& object(const json& v, const std::string& key) {
    if (!v.is_object()) schema_error(key, "must be an object");
    return v;
}

std::string norm_name(MatrixNorm n) {
    switch (n) {
        case MatrixNorm::One: return "1";
        case MatrixNorm::Inf: return "inf";
        case MatrixNorm::Two: break;
    }
    return "2";
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

RunConfig RunConfig::parse(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // The library counts bytes from 1; report the 0-based index of the offending byte.
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw ParseError("JSON parse error at offset " + std::to_string(at) + ": " + e.what(), at);
    }
    if (!doc.is_object()) throw InputError("config: top level must be an object");
    reject_unknown(doc, "", {"alpha", "A", "Q", "g", "x0", "preset", "method", "mesh", "scan", "tolerances", "norm"});

    RunConfig c;
    LinearSystem& sys = c.system;
    if (doc.contains("alpha")) sys.alpha = number(doc["alpha"], "alpha");
    if (!doc.contains("A")) throw InputError("config: missing required key 'A'");
    sys.A = parse_A(doc["A"]);
    const int s = static_cast<int>(sys.A.rows());
    sys.Q = doc.contains("Q") ? parse_Q(doc["Q"], s) : ExprMatrix::zeros(s, s);
    sys.g = doc.contains("g") ? parse_g(doc["g"], s) : ExprMatrix::zeros(s, 1);
    c.x0 = doc.contains("x0") ? parse_x0(doc["x0"], s) : Vector::Ones(s);

    if (doc.contains("norm")) {
        const json& n = doc["norm"];
        std::string v = n.is_string() ? n.get<std::string>() : (n.is_number_integer() ? std::to_string(n.get<int>()) : "");
        if (v == "2") sys.norm = MatrixNorm::Two;
        else if (v == "1") sys.norm = MatrixNorm::One;
        else if (v == "inf") sys.norm = MatrixNorm::Inf;
        else schema_error("norm", "must be \"2\", \"1\" or \"inf\"");
    }
    if (doc.contains("preset")) {
        if (!doc["preset"].is_string()) schema_error("preset", "must be a string");
        c.preset = doc["preset"].get<std::string>();
        if (c.preset != "linear" && c.preset != "tanh") schema_error("preset", "must be \"linear\" or \"tanh\"");
    }
    if (doc.contains("method")) {
        const json& m = doc["method"];
        std::string v = m.is_string() ? m.get<std::string>() : "";
        if (v == "integral") c.method = SolveMethod::Integral;
        else if (v == "voc") c.method = SolveMethod::Voc;
        else schema_error("method", "must be \"integral\" or \"voc\"");
    }
    if (doc.contains("mesh")) {
        const json& m = object(doc["mesh"], "mesh");
        reject_unknown(m, "mesh", {"T", "N", "grading"});
        if (m.contains("T")) c.mesh.T = number(m["T"], "mesh.T");
        if (m.contains("N")) c.mesh.N = integer(m["N"], "mesh.N");
        if (m.contains("grading")) c.mesh.grading = number(m["grading"], "mesh.grading");
    }
    if (doc.contains("scan")) {
        const json& m = object(doc["scan"], "scan");
        reject_unknown(m, "scan", {"t_min", "t_max", "per_decade", "inner_N"});
        if (m.contains("t_min")) c.scan.t_min = number(m["t_min"], "scan.t_min");
        if (m.contains("t_max")) c.scan.t_max = number(m["t_max"], "scan.t_max");
        if (m.contains("per_decade")) c.scan.per_decade = integer(m["per_decade"], "scan.per_decade");
        if (m.contains("inner_N")) c.scan.inner_N = integer(m["inner_N"], "scan.inner_N");
    }
    if (doc.contains("tolerances")) {
        const json& m = object(doc["tolerances"], "tolerances");
        reject_unknown(m, "tolerances", {"solver", "ml", "max_inner"});
        if (m.contains("solver")) c.tol.solver = number(m["solver"], "tolerances.solver");
        if (m.contains("ml")) c.tol.ml = number(m["ml"], "tolerances.ml");
        if (m.contains("max_inner")) c.tol.max_inner = integer(m["max_inner"], "tolerances.max_inner");
    }

    if (c.mesh.grading == 0.0) c.mesh.grading = default_grading(sys.alpha);
    sys.validate();
    c.scan.validate();
    if (!(c.mesh.T > 0.0)) schema_error("mesh.T", "must be positive");
    if (c.mesh.N < 8) schema_error("mesh.N", "must be at least 8");
    if (c.mesh.grading < 1.0) schema_error("mesh.grading", "must be at least 1");
    if (!(c.tol.solver > 0.0)) schema_error("tolerances.solver", "must be positive");
    if (!(c.tol.ml > 0.0 && c.tol.ml <= 1e-6)) schema_error("tolerances.ml", "must lie in (0, 1e-6]");
    if (c.tol.max_inner < 1) schema_error("tolerances.max_inner", "must be at least 1");
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

GradedMesh RunConfig::build() const { return build_mesh(mesh.T, mesh.N, mesh.grading); }

IVProblem RunConfig::problem() const {
    if (preset == "tanh") return make_preset("tanh", system, x0);
    return system.as_ivp(x0);
}

std::string RunConfig::canonical() const {
    const int s = system.dim();
    json A = json::array(), Q = json::array(), g = json::array(), x = json::array();
    for (int i = 0; i < s; ++i) {
        json arow = json::array(), qrow = json::array();
        for (int j = 0; j < s; ++j) {
            arow.push_back(system.A(i, j));
            qrow.push_back(system.Q.at(i, j).to_string());
        }
        A.push_back(arow);
        Q.push_back(qrow);
        g.push_back(system.g.at(i, 0).to_string());
        x.push_back(x0(i));
    }
    json doc = {
        {"alpha", system.alpha},
        {"A", A},
        {"Q", Q},
        {"g", g},
        {"x0", x},
        {"preset", preset},
        {"method", method == SolveMethod::Voc ? "voc" : "integral"},
        {"norm", norm_name(system.norm)},
        {"mesh", {{"T", mesh.T}, {"N", mesh.N}, {"grading", mesh.grading}}},
        {"scan", {{"t_min", scan.t_min}, {"t_max", scan.t_max}, {"per_decade", scan.per_decade}, {"inner_N", scan.inner_N}}},
        {"tolerances", {{"solver", tol.solver}, {"ml", tol.ml}, {"max_inner", tol.max_inner}}},
    };
    return doc.dump();
}

std::string RunConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
}

}  // namespace rlattract

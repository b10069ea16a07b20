#include "rlattract/coeff_expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "rlattract/errors.hpp"

namespace rlattract {

namespace expr_detail {

enum class Kind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Sqrt, Exp, Log, Sin, Cos, Abs, Piecewise };

struct Node {
    Kind kind = Kind::Num;
    double value = 0.0;
    std::vector<std::shared_ptr<const Node>> kids;  // Piecewise: branches then else
    std::vector<double> thresholds;
};

using NodePtr = std::shared_ptr<const Node>;

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void fault(const std::string& what, double t) { throw EvalError(what + " at t=" + g17(t)); }

double check(double v, const char* op, double t) {
    if (!std::isfinite(v)) fault(std::string("non-finite result from ") + op, t);
    return v;
}

double evaluate(const Node& n, double t) {
    switch (n.kind) {
        case Kind::Num: return n.value;
        case Kind::Var: return t;
        case Kind::Neg: return -evaluate(*n.kids[0], t);
        case Kind::Add: return check(evaluate(*n.kids[0], t) + evaluate(*n.kids[1], t), "+", t);
        case Kind::Sub: return check(evaluate(*n.kids[0], t) - evaluate(*n.kids[1], t), "-", t);
        case Kind::Mul: return check(evaluate(*n.kids[0], t) * evaluate(*n.kids[1], t), "*", t);
        case Kind::Div: {
            const double num = evaluate(*n.kids[0], t);
            const double den = evaluate(*n.kids[1], t);
            if (den == 0.0) fault("division by zero", t);
            return check(num / den, "/", t);
        }
        case Kind::Pow: {
            const double b = evaluate(*n.kids[0], t);
            const double e = evaluate(*n.kids[1], t);
            if (b == 0.0 && e < 0.0) fault("zero raised to a negative power", t);
            if (b < 0.0 && std::floor(e) != e) fault("negative base with non-integer exponent", t);
            return check(std::pow(b, e), "^", t);
        }
        case Kind::Sqrt: {
            const double x = evaluate(*n.kids[0], t);
            if (x < 0.0) fault("sqrt of negative value " + g17(x), t);
            return std::sqrt(x);
        }
        case Kind::Exp: return check(std::exp(evaluate(*n.kids[0], t)), "exp", t);
        case Kind::Log: {
            const double x = evaluate(*n.kids[0], t);
            if (!(x > 0.0)) fault("log of nonpositive value " + g17(x), t);
            return std::log(x);
        }
        case Kind::Sin: return std::sin(evaluate(*n.kids[0], t));
        case Kind::Cos: return std::cos(evaluate(*n.kids[0], t));
        case Kind::Abs: return std::abs(evaluate(*n.kids[0], t));
        case Kind::Piecewise: {
            for (std::size_t i = 0; i < n.thresholds.size(); ++i)
                if (t <= n.thresholds[i]) return evaluate(*n.kids[i], t);
            return evaluate(*n.kids.back(), t);
        }
    }
    return 0.0;
}

const char* fn_name(Kind k) {
    switch (k) {
        case Kind::Sqrt: return "sqrt";
        case Kind::Exp: return "exp";
        case Kind::Log: return "log";
        case Kind::Sin: return "sin";
        case Kind::Cos: return "cos";
        case Kind::Abs: return "abs";
        default: return "";
    }
}

void print(const Node& n, std::string& out) {
    auto bin = [&](const char* op) {
        out += '(';
        print(*n.kids[0], out);
        out += op;
        print(*n.kids[1], out);
        out += ')';
    };
    switch (n.kind) {
        case Kind::Num:
            if (n.value < 0.0 || std::signbit(n.value)) {
                out += "(-" + g17(-n.value) + ")";
            } else {
                out += g17(n.value);
            }
            break;
        case Kind::Var: out += 't'; break;
        case Kind::Neg:
            out += "(-";
            print(*n.kids[0], out);
            out += ')';
            break;
        case Kind::Add: bin(" + "); break;
        case Kind::Sub: bin(" - "); break;
        case Kind::Mul: bin(" * "); break;
        case Kind::Div: bin(" / "); break;
        case Kind::Pow: bin("^"); break;
        case Kind::Piecewise:
            out += "piecewise(";
            for (std::size_t i = 0; i < n.thresholds.size(); ++i) {
                out += "t<=" + g17(n.thresholds[i]) + ": ";
                print(*n.kids[i], out);
                out += ", ";
            }
            out += "else: ";
            print(*n.kids.back(), out);
            out += ')';
            break;
        default:
            out += fn_name(n.kind);
            out += '(';
            print(*n.kids[0], out);
            out += ')';
    }
}

bool uses_t(const Node& n) {
    if (n.kind == Kind::Var) return true;
    if (n.kind == Kind::Piecewise) return true;
    return std::any_of(n.kids.begin(), n.kids.end(), [](const NodePtr& k) { return uses_t(*k); });
}

void collect_breaks(const Node& n, std::set<double>& out) {
    for (double c : n.thresholds) out.insert(c);
    for (const auto& k : n.kids) collect_breaks(*k, out);
}

void collect_jumps(const Node& n, std::vector<std::string>& out) {
    if (n.kind == Kind::Piecewise) {
        for (std::size_t i = 0; i < n.thresholds.size(); ++i) {
            const double c = n.thresholds[i];
            try {
                const double lhs = evaluate(*n.kids[i], c);
                const double rhs = evaluate(*n.kids[i + 1], c);
                if (std::abs(lhs - rhs) > 1e-9)
                    out.push_back("piecewise jump of " + g17(rhs - lhs) + " at t=" + g17(c));
            } catch (const EvalError&) {
                out.push_back("piecewise branch not evaluable at threshold t=" + g17(c));
            }
        }
    }
    for (const auto& k : n.kids) collect_jumps(*k, out);
}

// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view src) : s_(src) {}

    NodePtr run() {
        skip();
        if (pos_ >= s_.size()) fail("empty expression", {"expression"});
        auto e = expr();
        skip();
        if (pos_ < s_.size()) fail("unexpected trailing input", {"end of input", "operator"});
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) {
        std::string what = "parse error at offset " + std::to_string(pos_) + ": " + msg;
        if (!expected.empty()) {
            what += " (expected ";
            for (std::size_t i = 0; i < expected.size(); ++i) {
                if (i) what += ", ";
                what += expected[i];
            }
            what += ")";
        }
        throw ParseError(what, pos_, std::move(expected));
    }

    void skip() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, std::vector<std::string> expected) {
        if (!accept(c)) fail(std::string("missing '") + c + "'", std::move(expected));
    }

    static NodePtr make(Kind k, std::vector<NodePtr> kids = {}, double v = 0.0) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->kids = std::move(kids);
        n->value = v;
        return n;
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Kind::Add, {lhs, term()});
            } else if (accept('-')) {
                lhs = make(Kind::Sub, {lhs, term()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Kind::Mul, {lhs, unary()});
            } else if (accept('/')) {
                lhs = make(Kind::Div, {lhs, unary()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Kind::Neg, {unary()});
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (accept('^')) return make(Kind::Pow, {base, unary()});
        return base;
    }

    std::string ident() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    double number() {
        skip();
        const std::size_t start = pos_;
        // Accept digits, one dot, and an exponent part; from_chars validates.
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
                pos_ = p;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        const auto* first = s_.data() + start;
        const auto* last = s_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || start == pos_) {
            pos_ = start;
            fail("malformed number", {"number"});
        }
        if (!std::isfinite(v)) {
            pos_ = start;
            fail("number out of range", {"number"});
        }
        return v;
    }

    double signed_number() {
        skip();
        const bool neg = accept('-');
        const double v = number();
        return neg ? -v : v;
    }

    NodePtr piecewise() {
        auto node = std::make_shared<Node>();
        node->kind = Kind::Piecewise;
        expect('(', {"'('"});
        for (;;) {
            skip();
            const std::size_t at = pos_;
            const std::string word = ident();
            if (word == "else") {
                if (node->thresholds.empty()) fail("piecewise needs at least one 't<=' clause", {"t"});
                expect(':', {"':'"});
                node->kids.push_back(expr());
                expect(')', {"')'"});
                return node;
            }
            if (word != "t") {
                pos_ = at;
                fail("expected a piecewise clause", {"t", "else"});
            }
            skip();
            if (!(pos_ + 1 < s_.size() && s_[pos_] == '<' && s_[pos_ + 1] == '=')) fail("missing '<='", {"'<='"});
            pos_ += 2;
            const std::size_t cat = pos_;
            const double c = signed_number();
            if (!node->thresholds.empty() && !(c > node->thresholds.back())) {
                pos_ = cat;
                fail("piecewise thresholds must increase", {"threshold > " + g17(node->thresholds.back())});
            }
            node->thresholds.push_back(c);
            expect(':', {"':'"});
            node->kids.push_back(expr());
            expect(',', {"','"});
        }
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input", {"number", "t", "'('", "'-'", "function"});
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = expr();
            expect(')', {"')'"});
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return make(Kind::Num, {}, number());
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t at = pos_;
            const std::string name = ident();
            if (name == "t") return make(Kind::Var);
            if (name == "piecewise") return piecewise();
            static const std::pair<const char*, Kind> fns[] = {{"sqrt", Kind::Sqrt}, {"exp", Kind::Exp},
                                                               {"log", Kind::Log},   {"sin", Kind::Sin},
                                                               {"cos", Kind::Cos},   {"abs", Kind::Abs}};
            for (const auto& [fname, kind] : fns) {
                if (name == fname) {
                    expect('(', {"'('"});
                    auto arg = expr();
                    expect(')', {"')'"});
                    return make(kind, {arg});
                }
            }
            pos_ = at;
            fail("unknown identifier '" + name + "'", {"t", "sqrt", "exp", "log", "sin", "cos", "abs", "piecewise"});
        }
        fail(std::string("unexpected character '") + c + "'", {"number", "t", "'('", "'-'", "function"});
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace
}  // namespace expr_detail

using expr_detail::Kind;
using expr_detail::Node;

Expr::Expr() : Expr(std::make_shared<Node>()) {}

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {
    expr_detail::collect_jumps(*root_, warnings_);
}

Expr Expr::parse(std::string_view src) { return Expr(expr_detail::Parser(src).run()); }

Expr Expr::constant(double v) {
    if (!std::isfinite(v)) throw InputError("constant coefficient must be finite");
    auto n = std::make_shared<Node>();
    n->value = v;
    return Expr(n);
}

double Expr::eval(double t) const {
    if (!(t >= 0.0)) throw EvalError("expression evaluated at negative or NaN time");
    return expr_detail::evaluate(*root_, t);
}

std::string Expr::to_string() const {
    std::string out;
    expr_detail::print(*root_, out);
    return out;
}

bool Expr::is_constant() const { return !expr_detail::uses_t(*root_); }

std::vector<double> Expr::breakpoints() const {
    std::set<double> s;
    expr_detail::collect_breaks(*root_, s);
    return {s.begin(), s.end()};
}

ExprMatrix ExprMatrix::constant(const Matrix& m) {
    ExprMatrix e;
    e.rows = static_cast<int>(m.rows());
    e.cols = static_cast<int>(m.cols());
    for (int i = 0; i < e.rows; ++i)
        for (int j = 0; j < e.cols; ++j) e.entries.push_back(Expr::constant(m(i, j)));
    return e;
}

ExprMatrix ExprMatrix::zeros(int rows, int cols) { return constant(Matrix::Zero(rows, cols)); }

bool ExprMatrix::is_constant() const {
    return std::all_of(entries.begin(), entries.end(), [](const Expr& e) { return e.is_constant(); });
}

std::vector<double> ExprMatrix::breakpoints() const {
    std::set<double> s;
    for (const auto& e : entries)
        for (double c : e.breakpoints()) s.insert(c);
    return {s.begin(), s.end()};
}

std::vector<std::string> ExprMatrix::warnings() const {
    std::vector<std::string> out;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            for (const auto& w : at(i, j).warnings())
                out.push_back("entry (" + std::to_string(i) + "," + std::to_string(j) + "): " + w);
    return out;
}

Matrix eval_matrix(const ExprMatrix& m, double t) {
    Matrix out(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) {
            try {
                out(i, j) = m.at(i, j).eval(t);
            } catch (const EvalError& e) {
                throw EvalError("entry (" + std::to_string(i) + "," + std::to_string(j) + "): " + e.what());
            }
        }
    return out;
}

Vector eval_vector(const ExprMatrix& m, double t) {
    if (m.cols != 1) throw InputError("eval_vector: expression matrix must have one column");
    return eval_matrix(m, t).col(0);
}

}  // namespace rlattract

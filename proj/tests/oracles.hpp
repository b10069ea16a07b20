#pragma once

// Reference implementations that share no code with the library.

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

/// exp(x^2) erfc(x) for x >= 0. Maclaurin series of erf below 2, Lentz
/// continued fraction above.
inline double erfcx(double xd) {
    const long double x = xd;
    if (x < 2.0L) {
        long double term = x, sum = x;
        for (int n = 1; n < 200; ++n) {
            term *= -x * x / n;
            const long double add = term / (2 * n + 1);
            sum += add;
            if (std::fabs(add) < 1e-22L * std::fabs(sum)) break;
        }
        const long double erf = 2.0L / std::sqrt(kPi) * sum;
        return static_cast<double>(std::exp(x * x) * (1.0L - erf));
    }
    // erfc(x) exp(x^2) sqrt(pi) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    const long double tiny = 1e-300L;
    long double f = x, C = x, D = 0.0L;
    for (int n = 1; n < 5000; ++n) {
        const long double a = n / 2.0L;
        D = x + a * D;
        if (std::fabs(D) < tiny) D = tiny;
        C = x + a / C;
        if (std::fabs(C) < tiny) C = tiny;
        D = 1.0L / D;
        const long double delta = C * D;
        f *= delta;
        if (std::fabs(delta - 1.0L) < 1e-20L) break;
    }
    return static_cast<double>(1.0L / (f * std::sqrt(kPi)));
}

/// Plain power series of E_{alpha,beta}(z) in long double, for moderate |z|.
inline std::complex<double> ml_series(double alpha, double beta, std::complex<double> z) {
    using C = std::complex<long double>;
    const C zz(z.real(), z.imag());
    C sum = 0.0L, p = 1.0L;
    for (int k = 0; k < 4000; ++k) {
        const long double g = std::tgamma(static_cast<long double>(alpha) * k + beta);
        if (!std::isfinite(g)) break;
        const C term = p / g;
        sum += term;
        if (k > 5 && std::abs(term) < 1e-22L * (1.0L + std::abs(sum))) break;
        p *= zz;
    }
    return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

/// E_{1/2,1/2}(-sqrt(t)) = 1/sqrt(pi) - sqrt(t) erfcx(sqrt(t)).
inline double ml_half_half_neg(double t) {
    const double s = std::sqrt(t);
    return 1.0 / std::sqrt(static_cast<double>(kPi)) - s * erfcx(s);
}

/// Exact solution of D^{1/2} x = -x with t^{1/2} x -> 1, weighted: y = t^{1/2} x.
inline double exact_weighted_linear(double t) {
    return std::sqrt(static_cast<double>(kPi)) * ml_half_half_neg(t);
}

/// G(t) for A = -1, alpha = 1/2: sqrt(pi t) e^t erfc(sqrt t).
inline double G_closed_form(double t) { return std::sqrt(static_cast<double>(kPi) * t) * erfcx(std::sqrt(t)); }

/// Shunting-yard evaluator for + - * / ^, unary minus, t, numbers and the
/// functions sqrt exp log sin cos abs. No piecewise.
class ShuntingYard {
public:
    explicit ShuntingYard(std::string src) : src_(std::move(src)) { tokenize(); }

    double eval(double t) const {
        std::vector<double> stack;
        for (const Tok& k : rpn_) {
            if (k.kind == Tok::Num) {
                stack.push_back(k.value);
            } else if (k.kind == Tok::Var) {
                stack.push_back(t);
            } else if (k.kind == Tok::Func || k.text == "neg") {
                double a = pop(stack);
                stack.push_back(apply1(k.text, a));
            } else {
                double b = pop(stack), a = pop(stack);
                stack.push_back(apply2(k.text[0], a, b));
            }
        }
        if (stack.size() != 1) throw std::runtime_error("oracle: malformed expression");
        return stack.back();
    }

private:
    struct Tok {
        enum Kind { Num, Var, Op, Func, LParen, RParen } kind;
        std::string text;
        double value = 0.0;
    };

    static double pop(std::vector<double>& s) {
        if (s.empty()) throw std::runtime_error("oracle: stack underflow");
        double v = s.back();
        s.pop_back();
        return v;
    }
    static double apply1(const std::string& f, double a) {
        if (f == "neg") return -a;
        if (f == "sqrt") return std::sqrt(a);
        if (f == "exp") return std::exp(a);
        if (f == "log") return std::log(a);
        if (f == "sin") return std::sin(a);
        if (f == "cos") return std::cos(a);
        if (f == "abs") return std::fabs(a);
        throw std::runtime_error("oracle: unknown function " + f);
    }
    static double apply2(char op, double a, double b) {
        switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            case '^': return std::pow(a, b);
        }
        throw std::runtime_error("oracle: unknown operator");
    }
    // Unary minus binds tighter than * and / but looser than ^ (so -2^2 = -4).
    static int prec(const std::string& op) {
        if (op == "+" || op == "-") return 1;
        if (op == "*" || op == "/") return 2;
        if (op == "neg") return 3;
        return 4;  // ^
    }
    static bool right_assoc(const std::string& op) { return op == "^" || op == "neg"; }

    void tokenize() {
        std::vector<Tok> ops;
        bool expect_operand = true;
        std::size_t i = 0;
        auto flush_until_paren = [&]() {
            while (!ops.empty() && ops.back().kind != Tok::LParen) {
                rpn_.push_back(ops.back());
                ops.pop_back();
            }
        };
        while (i < src_.size()) {
            const char c = src_[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t used = 0;
                double v = std::stod(src_.substr(i), &used);
                rpn_.push_back({Tok::Num, "", v});
                i += used;
                expect_operand = false;
            } else if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < src_.size() && std::isalpha(static_cast<unsigned char>(src_[j]))) ++j;
                std::string name = src_.substr(i, j - i);
                i = j;
                if (name == "t") {
                    rpn_.push_back({Tok::Var, "t"});
                    expect_operand = false;
                } else {
                    ops.push_back({Tok::Func, name});
                }
            } else if (c == '(') {
                ops.push_back({Tok::LParen, "("});
                ++i;
                expect_operand = true;
            } else if (c == ')') {
                flush_until_paren();
                if (ops.empty()) throw std::runtime_error("oracle: unbalanced )");
                ops.pop_back();
                if (!ops.empty() && ops.back().kind == Tok::Func) {
                    rpn_.push_back(ops.back());
                    ops.pop_back();
                }
                ++i;
                expect_operand = false;
            } else {
                std::string op(1, c);
                if (expect_operand && c == '-') op = "neg";
                if (op != "neg") {
                    while (!ops.empty() && ops.back().kind == Tok::Op &&
                           (prec(ops.back().text) > prec(op) ||
                            (prec(ops.back().text) == prec(op) && !right_assoc(op)))) {
                        rpn_.push_back(ops.back());
                        ops.pop_back();
                    }
                }
                ops.push_back({Tok::Op, op});
                ++i;
                expect_operand = true;
            }
        }
        while (!ops.empty()) {
            if (ops.back().kind == Tok::LParen) throw std::runtime_error("oracle: unbalanced (");
            rpn_.push_back(ops.back());
            ops.pop_back();
        }
    }

    std::string src_;
    std::vector<Tok> rpn_;
};

/// SplitMix64-based generator for property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53; }
    int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    std::uint64_t s_;
};

}  // namespace oracle

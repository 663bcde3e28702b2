#pragma once

// Scalar expression trees over the chart variables x1..xn, y1..ym.
//
// Every tensor component in the library is one of these trees. Nodes are
// immutable and shared, construction folds constants and elides +0, *0, *1,
// ^1, and evaluation is deterministic (same tree + same point gives the same
// bits). Powers are restricted to integer exponents >= 0 so differentiation
// stays total; general powers are written through exp/log by the caller.

#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pacfin {

enum class VarKind : std::uint8_t { Base, Fibre };  // x^i vs y^a

struct Var {
    VarKind kind{VarKind::Base};
    int index{0};  // 0-based
    friend bool operator==(const Var&, const Var&) = default;
};

// Coordinate sample: x holds the base coordinates, y the fibre coordinates.
struct Point {
    std::vector<double> x, y;
};

struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what, std::string subtree_ = {})
        : std::runtime_error(subtree_.empty() ? what : what + " in `" + subtree_ + "`"),
          subtree(std::move(subtree_)) {}
    std::string subtree;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t position_)
        : std::runtime_error(what + " at position " + std::to_string(position_ + 1)),
          position(position_) {}
    std::size_t position;
};

namespace detail {

enum class Tag : std::uint8_t { Constant, Variable, Unary, Binary, IntPow };
enum class UnOp : std::uint8_t { Neg, Sin, Cos, Sinh, Cosh, Exp, Log, Sqrt };
enum class BinOp : std::uint8_t { Add, Sub, Mul, Div };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    Tag tag{};
    UnOp un{};
    BinOp bin{};
    double value{};
    Var var{};
    int exponent{};
    NodePtr a, b;
};

inline double ipow(double base, int k) {
    double r = 1.0, p = base;
    for (int e = k; e > 0; e >>= 1) {
        if (e & 1) r *= p;
        if (e > 1) p *= p;
    }
    return r;
}

}  // namespace detail

class Expr {
public:
    Expr() : node_(zero_node()) {}

    static Expr constant(double c) {
        if (c == 0.0) return Expr(zero_node());
        if (c == 1.0) return Expr(one_node());
        return Expr(make_const(c));
    }
    static Expr variable(Var v) {
        auto n = std::make_shared<detail::ExprNode>();
        n->tag = detail::Tag::Variable;
        n->var = v;
        return Expr(std::move(n));
    }
    static Expr x(int i) { return variable({VarKind::Base, i}); }
    static Expr y(int a) { return variable({VarKind::Fibre, a}); }

    bool is_constant() const { return node_->tag == detail::Tag::Constant; }
    bool is_zero() const { return is_constant() && node_->value == 0.0; }
    bool is_one() const { return is_constant() && node_->value == 1.0; }
    double constant_value() const { return node_->value; }

    // Exact symbolic partial derivative; closed under repeated application.
    Expr diff(Var v) const;

    double eval(const Point& p) const;

    // Rebuilds the tree through the folding constructors.  Construction
    // already folds, so this matters only for trees built elsewhere.
    Expr simplified() const;

    // Canonical printer; parse(str()) reproduces the tree exactly.
    std::string str() const { return print(node_.get(), 0); }

    friend bool structurally_equal(const Expr& a, const Expr& b) {
        return node_equal(a.node_.get(), b.node_.get());
    }

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow_int(const Expr& base, int k);
    friend Expr make_unary(detail::UnOp op, const Expr& a);
    friend class Evaluator;

private:
    explicit Expr(detail::NodePtr n) : node_(std::move(n)) {}

    static detail::NodePtr make_const(double c) {
        auto n = std::make_shared<detail::ExprNode>();
        n->tag = detail::Tag::Constant;
        n->value = c;
        return n;
    }
    static const detail::NodePtr& zero_node() {
        static detail::NodePtr z = make_const(0.0);
        return z;
    }
    static const detail::NodePtr& one_node() {
        static detail::NodePtr o = make_const(1.0);
        return o;
    }

    static bool node_equal(const detail::ExprNode* a, const detail::ExprNode* b);
    static std::string print(const detail::ExprNode* n, int parent_prec);
    static int precedence(const detail::ExprNode* n);

    Expr diff_node(const detail::ExprNode* n, Var v,
                   std::unordered_map<const detail::ExprNode*, Expr>& memo) const;
    Expr simplify_node(const detail::ExprNode* n,
                       std::unordered_map<const detail::ExprNode*, Expr>& memo) const;

    detail::NodePtr node_;
};

inline Expr make_unary(detail::UnOp op, const Expr& a);

inline Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) {
        double v = a.constant_value() + b.constant_value();
        if (std::isfinite(v)) return Expr::constant(v);
    }
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    auto n = std::make_shared<detail::ExprNode>();
    n->tag = detail::Tag::Binary;
    n->bin = detail::BinOp::Add;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(std::move(n));
}

inline Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.constant_value());
    if (a.node_->tag == detail::Tag::Unary && a.node_->un == detail::UnOp::Neg)
        return Expr(a.node_->a);
    auto n = std::make_shared<detail::ExprNode>();
    n->tag = detail::Tag::Unary;
    n->un = detail::UnOp::Neg;
    n->a = a.node_;
    return Expr(std::move(n));
}

inline Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) {
        double v = a.constant_value() - b.constant_value();
        if (std::isfinite(v)) return Expr::constant(v);
    }
    if (b.is_zero()) return a;
    if (a.is_zero()) return -b;
    if (a.node_ == b.node_) return Expr::constant(0.0);
    auto n = std::make_shared<detail::ExprNode>();
    n->tag = detail::Tag::Binary;
    n->bin = detail::BinOp::Sub;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(std::move(n));
}

inline Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) {
        double v = a.constant_value() * b.constant_value();
        if (std::isfinite(v)) return Expr::constant(v);
    }
    if (a.is_zero() || b.is_zero()) return Expr::constant(0.0);
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    auto n = std::make_shared<detail::ExprNode>();
    n->tag = detail::Tag::Binary;
    n->bin = detail::BinOp::Mul;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(std::move(n));
}

inline Expr operator/(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0) {
        double v = a.constant_value() / b.constant_value();
        if (std::isfinite(v)) return Expr::constant(v);
    }
    if (a.is_zero() && !b.is_zero()) return Expr::constant(0.0);
    if (b.is_one()) return a;
    auto n = std::make_shared<detail::ExprNode>();
    n->tag = detail::Tag::Binary;
    n->bin = detail::BinOp::Div;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(std::move(n));
}

inline Expr pow_int(const Expr& base, int k) {
    if (k < 0) throw std::invalid_argument("pow_int: exponent must be >= 0");
    if (k == 0) return Expr::constant(1.0);
    if (k == 1) return base;
    if (base.is_constant()) {
        double v = detail::ipow(base.constant_value(), k);
        if (std::isfinite(v)) return Expr::constant(v);
    }
    auto n = std::make_shared<detail::ExprNode>();
    n->tag = detail::Tag::IntPow;
    n->exponent = k;
    n->a = base.node_;
    return Expr(std::move(n));
}

inline Expr make_unary(detail::UnOp op, const Expr& a) {
    using detail::UnOp;
    if (op == UnOp::Neg) return -a;
    if (a.is_constant()) {
        double c = a.constant_value(), v = 0.0;
        bool ok = true;
        switch (op) {
            case UnOp::Sin: v = std::sin(c); break;
            case UnOp::Cos: v = std::cos(c); break;
            case UnOp::Sinh: v = std::sinh(c); break;
            case UnOp::Cosh: v = std::cosh(c); break;
            case UnOp::Exp: v = std::exp(c); break;
            case UnOp::Log: ok = c > 0.0; if (ok) v = std::log(c); break;
            case UnOp::Sqrt: ok = c >= 0.0; if (ok) v = std::sqrt(c); break;
            default: ok = false; break;
        }
        if (ok && std::isfinite(v)) return Expr::constant(v);
    }
    auto n = std::make_shared<detail::ExprNode>();
    n->tag = detail::Tag::Unary;
    n->un = op;
    n->a = a.node_;
    return Expr(std::move(n));
}

inline Expr sin(const Expr& a) { return make_unary(detail::UnOp::Sin, a); }
inline Expr cos(const Expr& a) { return make_unary(detail::UnOp::Cos, a); }
inline Expr sinh(const Expr& a) { return make_unary(detail::UnOp::Sinh, a); }
inline Expr cosh(const Expr& a) { return make_unary(detail::UnOp::Cosh, a); }
inline Expr exp(const Expr& a) { return make_unary(detail::UnOp::Exp, a); }
inline Expr log(const Expr& a) { return make_unary(detail::UnOp::Log, a); }
inline Expr sqrt(const Expr& a) { return make_unary(detail::UnOp::Sqrt, a); }

inline Expr Expr::diff(Var v) const {
    std::unordered_map<const detail::ExprNode*, Expr> memo;
    return diff_node(node_.get(), v, memo);
}

inline Expr Expr::diff_node(const detail::ExprNode* n, Var v,
                            std::unordered_map<const detail::ExprNode*, Expr>& memo) const {
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    using detail::Tag;
    using detail::UnOp;
    using detail::BinOp;
    Expr r;
    switch (n->tag) {
        case Tag::Constant:
            r = Expr::constant(0.0);
            break;
        case Tag::Variable:
            r = Expr::constant(n->var == v ? 1.0 : 0.0);
            break;
        case Tag::Unary: {
            Expr a(n->a);
            Expr da = diff_node(n->a.get(), v, memo);
            switch (n->un) {
                case UnOp::Neg: r = -da; break;
                case UnOp::Sin: r = cos(a) * da; break;
                case UnOp::Cos: r = -(sin(a) * da); break;
                case UnOp::Sinh: r = cosh(a) * da; break;
                case UnOp::Cosh: r = sinh(a) * da; break;
                case UnOp::Exp: r = exp(a) * da; break;
                case UnOp::Log: r = da / a; break;
                case UnOp::Sqrt: r = da / (Expr::constant(2.0) * sqrt(a)); break;
            }
            break;
        }
        case Tag::Binary: {
            Expr a(n->a), b(n->b);
            Expr da = diff_node(n->a.get(), v, memo);
            Expr db = diff_node(n->b.get(), v, memo);
            switch (n->bin) {
                case BinOp::Add: r = da + db; break;
                case BinOp::Sub: r = da - db; break;
                case BinOp::Mul: r = da * b + a * db; break;
                case BinOp::Div: r = (da * b - a * db) / pow_int(b, 2); break;
            }
            break;
        }
        case Tag::IntPow: {
            Expr a(n->a);
            Expr da = diff_node(n->a.get(), v, memo);
            r = Expr::constant(double(n->exponent)) * pow_int(a, n->exponent - 1) * da;
            break;
        }
    }
    memo.emplace(n, r);
    return r;
}

inline Expr Expr::simplified() const {
    std::unordered_map<const detail::ExprNode*, Expr> memo;
    return simplify_node(node_.get(), memo);
}

inline Expr Expr::simplify_node(const detail::ExprNode* n,
                                std::unordered_map<const detail::ExprNode*, Expr>& memo) const {
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    using detail::Tag;
    Expr r;
    switch (n->tag) {
        case Tag::Constant: r = Expr::constant(n->value); break;
        case Tag::Variable: r = Expr::variable(n->var); break;
        case Tag::Unary: r = make_unary(n->un, simplify_node(n->a.get(), memo)); break;
        case Tag::IntPow: r = pow_int(simplify_node(n->a.get(), memo), n->exponent); break;
        case Tag::Binary: {
            Expr a = simplify_node(n->a.get(), memo);
            Expr b = simplify_node(n->b.get(), memo);
            switch (n->bin) {
                case detail::BinOp::Add: r = a + b; break;
                case detail::BinOp::Sub: r = a - b; break;
                case detail::BinOp::Mul: r = a * b; break;
                case detail::BinOp::Div: r = a / b; break;
            }
            break;
        }
    }
    memo.emplace(n, r);
    return r;
}

// Shared-cache evaluator.  Expression trees are DAGs (derivatives share
// subtrees aggressively), so evaluation must be memoized per point.  The
// cache is keyed by node address; the evaluator retains shared ownership of
// every root it has seen so freed addresses can never alias cache entries.
class Evaluator {
public:
    explicit Evaluator(const Point& p) : p_(&p) {}

    double operator()(const Expr& e) {
        roots_.push_back(e.node_);
        return eval_node(e.node_.get());
    }

private:
    double eval_node(const detail::ExprNode* n) {
        if (auto it = cache_.find(n); it != cache_.end()) return it->second;
        using detail::Tag;
        using detail::UnOp;
        using detail::BinOp;
        double r = 0.0;
        switch (n->tag) {
            case Tag::Constant:
                r = n->value;
                break;
            case Tag::Variable: {
                const auto& vals = n->var.kind == VarKind::Base ? p_->x : p_->y;
                if (n->var.index < 0 || std::size_t(n->var.index) >= vals.size())
                    throw EvalError("variable index out of range", Expr::print(n, 0));
                r = vals[std::size_t(n->var.index)];
                break;
            }
            case Tag::Unary: {
                double a = eval_node(n->a.get());
                switch (n->un) {
                    case UnOp::Neg: r = -a; break;
                    case UnOp::Sin: r = std::sin(a); break;
                    case UnOp::Cos: r = std::cos(a); break;
                    case UnOp::Sinh: r = std::sinh(a); break;
                    case UnOp::Cosh: r = std::cosh(a); break;
                    case UnOp::Exp: r = std::exp(a); break;
                    case UnOp::Log:
                        if (a <= 0.0) throw EvalError("log of non-positive value", Expr::print(n, 0));
                        r = std::log(a);
                        break;
                    case UnOp::Sqrt:
                        if (a < 0.0) throw EvalError("sqrt of negative value", Expr::print(n, 0));
                        r = std::sqrt(a);
                        break;
                }
                break;
            }
            case Tag::Binary: {
                double a = eval_node(n->a.get());
                double b = eval_node(n->b.get());
                switch (n->bin) {
                    case BinOp::Add: r = a + b; break;
                    case BinOp::Sub: r = a - b; break;
                    case BinOp::Mul: r = a * b; break;
                    case BinOp::Div:
                        if (b == 0.0) throw EvalError("division by zero", Expr::print(n, 0));
                        r = a / b;
                        break;
                }
                break;
            }
            case Tag::IntPow:
                r = detail::ipow(eval_node(n->a.get()), n->exponent);
                break;
        }
        cache_.emplace(n, r);
        return r;
    }

    const Point* p_;
    std::vector<detail::NodePtr> roots_;
    std::unordered_map<const detail::ExprNode*, double> cache_;
};

inline double Expr::eval(const Point& p) const {
    Evaluator ev(p);
    return ev(*this);
}

inline bool Expr::node_equal(const detail::ExprNode* a, const detail::ExprNode* b) {
    if (a == b) return true;
    if (a->tag != b->tag) return false;
    using detail::Tag;
    switch (a->tag) {
        case Tag::Constant: return a->value == b->value;
        case Tag::Variable: return a->var == b->var;
        case Tag::Unary: return a->un == b->un && node_equal(a->a.get(), b->a.get());
        case Tag::Binary:
            return a->bin == b->bin && node_equal(a->a.get(), b->a.get()) &&
                   node_equal(a->b.get(), b->b.get());
        case Tag::IntPow: return a->exponent == b->exponent && node_equal(a->a.get(), b->a.get());
    }
    return false;
}

// Precedence: add/sub 1, mul/div 2, unary minus 3, pow 4, atoms 5.
inline int Expr::precedence(const detail::ExprNode* n) {
    using detail::Tag;
    switch (n->tag) {
        case Tag::Binary:
            return (n->bin == detail::BinOp::Add || n->bin == detail::BinOp::Sub) ? 1 : 2;
        case Tag::Unary: return n->un == detail::UnOp::Neg ? 3 : 5;
        case Tag::IntPow: return 4;
        default: return 5;
    }
}

inline std::string Expr::print(const detail::ExprNode* n, int parent_prec) {
    using detail::Tag;
    using detail::UnOp;
    std::string out;
    int prec = precedence(n);
    switch (n->tag) {
        case Tag::Constant: {
            char buf[64];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, n->value);
            out.assign(buf, end);
            if (n->value < 0.0) prec = 3;  // prints with a leading '-'
            break;
        }
        case Tag::Variable:
            out = (n->var.kind == VarKind::Base ? "x" : "y") + std::to_string(n->var.index + 1);
            break;
        case Tag::Unary: {
            static constexpr const char* names[] = {"", "sin", "cos", "sinh", "cosh",
                                                    "exp", "log", "sqrt"};
            if (n->un == UnOp::Neg) {
                out = "-" + print(n->a.get(), 3);
            } else {
                out = std::string(names[std::size_t(n->un)]) + "(" + print(n->a.get(), 0) + ")";
            }
            break;
        }
        case Tag::Binary: {
            static constexpr const char* ops[] = {" + ", " - ", "*", "/"};
            // Left child may tie on precedence (left associative), right may not.
            out = print(n->a.get(), prec - 1) + ops[std::size_t(n->bin)] +
                  print(n->b.get(), prec);
            break;
        }
        case Tag::IntPow:
            out = print(n->a.get(), 4) + "^" + std::to_string(n->exponent);
            break;
    }
    if (prec <= parent_prec) return "(" + out + ")";
    return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser for the grammar
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := "-" factor | base ("^" integer)?
//   base   := number | ident | "(" expr ")" | func "(" expr ")"
// with func in {sin, cos, sinh, cosh, exp, log, sqrt} and identifiers
// x1..x<nx>, y1..y<ny>.

namespace detail {

class Parser {
public:
    Parser(std::string_view text, int nx, int ny) : text_(text), nx_(nx), ny_(ny) {}

    Expr run() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }
    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }
    bool accept(char c) {
        if (peek(c)) { ++pos_; return true; }
        return false;
    }

    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (accept('+')) e = e + parse_term();
            else if (accept('-')) e = e - parse_term();
            else return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            if (accept('*')) e = e * parse_factor();
            else if (accept('/')) e = e / parse_factor();
            else return e;
        }
    }

    Expr parse_factor() {
        if (accept('-')) return -parse_factor();
        Expr b = parse_base();
        if (accept('^')) {
            skip_ws();
            std::size_t start = pos_;
            if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+'))
                throw ParseError("exponent must be a nonnegative integer", pos_);
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == start) throw ParseError("expected integer exponent", start);
            int k = 0;
            auto res = std::from_chars(text_.data() + start, text_.data() + pos_, k);
            if (res.ec != std::errc{}) throw ParseError("invalid exponent", start);
            return pow_int(b, k);
        }
        return b;
    }

    Expr parse_base() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expr parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                pos_ = mark;  // not an exponent suffix after all
            } else {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc{}) throw ParseError("invalid number", start);
        return Expr::constant(v);
    }

    Expr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string_view id = text_.substr(start, pos_ - start);
        static const std::unordered_map<std::string_view, UnOp> funcs = {
            {"sin", UnOp::Sin},   {"cos", UnOp::Cos}, {"sinh", UnOp::Sinh},
            {"cosh", UnOp::Cosh}, {"exp", UnOp::Exp}, {"log", UnOp::Log},
            {"sqrt", UnOp::Sqrt}};
        if (auto it = funcs.find(id); it != funcs.end()) {
            if (!accept('(')) throw ParseError("expected '(' after function name", pos_);
            Expr arg = parse_expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return make_unary(it->second, arg);
        }
        if ((id[0] == 'x' || id[0] == 'y') && id.size() > 1) {
            int idx = 0;
            auto res = std::from_chars(id.data() + 1, id.data() + id.size(), idx);
            if (res.ec == std::errc{} && res.ptr == id.data() + id.size()) {
                int limit = id[0] == 'x' ? nx_ : ny_;
                if (idx >= 1 && idx <= limit)
                    return Expr::variable({id[0] == 'x' ? VarKind::Base : VarKind::Fibre, idx - 1});
            }
        }
        throw ParseError("unknown identifier '" + std::string(id) + "'", start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int nx_, ny_;
};

}  // namespace detail

inline Expr parse(std::string_view text, int nx, int ny) {
    return detail::Parser(text, nx, ny).run();
}

}  // namespace pacfin

#include "rigor/expr.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "rigor/error.hpp"

namespace rigor {

// ---- literals ---------------------------------------------------------------

Literal Literal::from_text(std::string_view text) {
    auto value = parse_rational(text);
    if (!value || text.find('/') != std::string_view::npos) {
        throw SyntaxError("malformed number '" + std::string(text) + "'", 1, 1);
    }
    Literal lit{*value, std::string(text), std::nullopt};
    try {
        lit.f64 = enclose<F64>(lit.value);
    } catch (const Overflow&) {
    }
    return lit;
}

Literal Literal::from_value(const Rational& value) {
    auto text = to_decimal_string(value);
    if (!text) throw ValidationError("constant " + to_string(value) + " has no finite decimal expansion");
    return from_text(*text);
}

// ---- construction -------------------------------------------------------------

namespace {

std::shared_ptr<Expr::Node> node(ExprKind kind) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    return n;
}

bool is_unary(ExprKind k) {
    switch (k) {
        case ExprKind::neg:
        case ExprKind::exp:
        case ExprKind::sin:
        case ExprKind::cos:
        case ExprKind::log:
        case ExprKind::sqrt:
            return true;
        default:
            return false;
    }
}

bool is_binary(ExprKind k) {
    return k == ExprKind::add || k == ExprKind::sub || k == ExprKind::mul || k == ExprKind::div;
}

}  // namespace

Expr Expr::constant(const Literal& literal) {
    if (literal.value < 0) throw ValidationError("constant nodes hold nonnegative literals; wrap in neg");
    auto n = node(ExprKind::constant);
    n->literals.push_back(literal);
    return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
    auto n = node(ExprKind::variable);
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::unary(ExprKind kind, Expr arg) {
    if (!is_unary(kind)) throw ValidationError("not a unary expression kind");
    auto n = node(kind);
    n->args.push_back(std::move(arg));
    return Expr(std::move(n));
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
    if (!is_binary(kind)) throw ValidationError("not a binary expression kind");
    auto n = node(kind);
    n->args.push_back(std::move(lhs));
    n->args.push_back(std::move(rhs));
    return Expr(std::move(n));
}

Expr Expr::power(Expr base, unsigned exponent) {
    auto n = node(ExprKind::pow);
    n->args.push_back(std::move(base));
    n->exponent = exponent;
    return Expr(std::move(n));
}

Expr Expr::step(Literal c, Literal a1, Literal a2, std::optional<Literal> delta, Expr arg) {
    auto n = node(ExprKind::step);
    n->literals = {std::move(c), std::move(a1), std::move(a2)};
    if (delta) n->literals.push_back(std::move(*delta));
    n->args.push_back(std::move(arg));
    return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
std::size_t Expr::arity() const { return node_->args.size(); }
const Expr& Expr::arg(std::size_t i) const { return node_->args.at(i); }
const Literal& Expr::literal() const { return node_->literals.at(0); }
const std::string& Expr::name() const { return node_->name; }
unsigned Expr::exponent() const { return node_->exponent; }
const std::vector<Literal>& Expr::step_literals() const { return node_->literals; }

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    const Expr::Node& x = *a.node_;
    const Expr::Node& y = *b.node_;
    if (x.kind != y.kind || x.name != y.name || x.exponent != y.exponent) return false;
    if (x.literals.size() != y.literals.size() || x.args.size() != y.args.size()) return false;
    for (std::size_t i = 0; i < x.literals.size(); ++i) {
        if (x.literals[i].value != y.literals[i].value) return false;
    }
    for (std::size_t i = 0; i < x.args.size(); ++i) {
        if (!(x.args[i] == y.args[i])) return false;
    }
    return true;
}

// ---- lexer ----------------------------------------------------------------------

namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, semicolon, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::end, "", line_, col_});
                return out;
            }
            const std::size_t line = line_;
            const std::size_t col = col_;
            const char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                out.push_back({Tok::number, number(), line, col});
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    id.push_back(advance());
                }
                out.push_back({Tok::ident, id, line, col});
            } else {
                Tok kind;
                switch (c) {
                    case '+': kind = Tok::plus; break;
                    case '-': kind = Tok::minus; break;
                    case '*': kind = Tok::star; break;
                    case '/': kind = Tok::slash; break;
                    case '^': kind = Tok::caret; break;
                    case '(': kind = Tok::lparen; break;
                    case ')': kind = Tok::rparen; break;
                    case ',': kind = Tok::comma; break;
                    case ';': kind = Tok::semicolon; break;
                    default:
                        throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
                }
                advance();
                out.push_back({kind, std::string(1, c), line, col});
            }
        }
    }

private:
    char advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    bool digit_at(std::size_t i) const {
        return i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]));
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
    }

    std::string number() {
        std::string text;
        while (digit_at(pos_)) text.push_back(advance());
        if (pos_ < src_.size() && src_[pos_] == '.') {
            text.push_back(advance());
            while (digit_at(pos_)) text.push_back(advance());
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const bool signed_exp = pos_ + 1 < src_.size() && (src_[pos_ + 1] == '+' || src_[pos_ + 1] == '-');
            if (digit_at(pos_ + (signed_exp ? 2 : 1))) {
                text.push_back(advance());
                if (signed_exp) text.push_back(advance());
                while (digit_at(pos_)) text.push_back(advance());
            }
        }
        return text;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

// ---- parser ---------------------------------------------------------------------

const std::map<std::string, ExprKind, std::less<>>& builtins() {
    static const std::map<std::string, ExprKind, std::less<>> table = {
        {"exp", ExprKind::exp}, {"sin", ExprKind::sin},   {"cos", ExprKind::cos},
        {"log", ExprKind::log}, {"sqrt", ExprKind::sqrt}, {"step", ExprKind::step},
    };
    return table;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, const std::vector<std::string>* params)
        : tokens_(std::move(tokens)), params_(params) {}

    Expr run() {
        Expr e = expr();
        if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "' after expression");
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& take() { return tokens_[pos_++]; }

    bool accept(Tok kind) {
        if (peek().kind != kind) return false;
        ++pos_;
        return true;
    }

    const Token& expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(std::string("expected ") + what);
        return take();
    }

    [[noreturn]] void fail(const std::string& message) const {
        const Token& t = peek();
        if (t.kind == Tok::end) throw SyntaxError(message + " at end of input", t.line, t.column);
        throw SyntaxError(message, t.line, t.column);
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept(Tok::plus)) {
                lhs = Expr::binary(ExprKind::add, lhs, term());
            } else if (accept(Tok::minus)) {
                lhs = Expr::binary(ExprKind::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    Expr term() {
        Expr lhs = factor();
        for (;;) {
            if (accept(Tok::star)) {
                lhs = Expr::binary(ExprKind::mul, lhs, factor());
            } else if (accept(Tok::slash)) {
                lhs = Expr::binary(ExprKind::div, lhs, factor());
            } else {
                return lhs;
            }
        }
    }

    Expr factor() {
        if (accept(Tok::minus)) return Expr::unary(ExprKind::neg, factor());
        Expr base = atom();
        if (accept(Tok::caret)) {
            const Token& t = peek();
            if (t.kind != Tok::number || t.text.find_first_not_of("0123456789") != std::string::npos) {
                fail("exponent must be a nonnegative integer literal");
            }
            take();
            if (t.text.size() > 9) throw SyntaxError("exponent too large", t.line, t.column);
            return Expr::power(base, static_cast<unsigned>(std::stoul(t.text)));
        }
        return base;
    }

    Literal literal(bool allow_sign) {
        bool negative = false;
        if (allow_sign && accept(Tok::minus)) negative = true;
        const Token& t = expect(Tok::number, "a number");
        Literal lit = number(t);
        if (negative) {
            lit = Literal::from_text("-" + lit.text);
        }
        return lit;
    }

    Literal number(const Token& t) {
        try {
            return Literal::from_text(t.text);
        } catch (const SyntaxError&) {
            throw SyntaxError("malformed number '" + t.text + "'", t.line, t.column);
        }
    }

    Expr atom() {
        const Token& t = peek();
        if (t.kind == Tok::number) {
            take();
            return Expr::constant(number(t));
        }
        if (t.kind == Tok::lparen) {
            take();
            Expr inner = expr();
            expect(Tok::rparen, "')'");
            return inner;
        }
        if (t.kind == Tok::ident) {
            take();
            auto builtin = builtins().find(t.text);
            if (peek().kind == Tok::lparen) {
                if (builtin == builtins().end()) {
                    throw UnknownIdentifier("unknown function '" + t.text + "'", t.line, t.column);
                }
                take();
                if (builtin->second == ExprKind::step) return step_call();
                Expr arg = expr();
                if (peek().kind == Tok::comma) fail("'" + t.text + "' takes one argument");
                expect(Tok::rparen, "')'");
                return Expr::unary(builtin->second, arg);
            }
            if (builtin != builtins().end()) {
                throw SyntaxError("builtin '" + t.text + "' used without arguments", t.line, t.column);
            }
            if (params_ && std::find(params_->begin(), params_->end(), t.text) == params_->end()) {
                throw UnknownIdentifier("undeclared variable '" + t.text + "'", t.line, t.column);
            }
            return Expr::variable(t.text);
        }
        fail(t.kind == Tok::end ? "expected an operand" : "unexpected '" + t.text + "'");
    }

    Expr step_call() {
        Literal c = literal(true);
        expect(Tok::comma, "','");
        Literal a1 = literal(true);
        expect(Tok::comma, "','");
        Literal a2 = literal(true);
        std::optional<Literal> delta;
        if (accept(Tok::comma)) delta = literal(false);
        expect(Tok::semicolon, "';'");
        Expr arg = expr();
        expect(Tok::rparen, "')'");
        return Expr::step(std::move(c), std::move(a1), std::move(a2), std::move(delta), arg);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    const std::vector<std::string>* params_;
};

}  // namespace

Expr parse(std::string_view source) { return Parser(Lexer(source).run(), nullptr).run(); }

Expr parse(std::string_view source, const std::vector<std::string>& params) {
    return Parser(Lexer(source).run(), &params).run();
}

// ---- printer --------------------------------------------------------------------

namespace {

int precedence(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::add:
        case ExprKind::sub:
            return 1;
        case ExprKind::mul:
        case ExprKind::div:
            return 2;
        case ExprKind::neg:
            return 3;
        case ExprKind::pow:
            return 4;
        default:
            return 5;
    }
}

const char* function_name(ExprKind k) {
    switch (k) {
        case ExprKind::exp: return "exp";
        case ExprKind::sin: return "sin";
        case ExprKind::cos: return "cos";
        case ExprKind::log: return "log";
        case ExprKind::sqrt: return "sqrt";
        default: return "?";
    }
}

void print_to(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
    if (wrap) out.push_back('(');
    print_to(e, out);
    if (wrap) out.push_back(')');
}

void print_to(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case ExprKind::constant:
            out += e.literal().text;
            return;
        case ExprKind::variable:
            out += e.name();
            return;
        case ExprKind::neg:
            out.push_back('-');
            print_wrapped(e.arg(0), precedence(e.arg(0)) < 3, out);
            return;
        case ExprKind::add:
        case ExprKind::sub:
        case ExprKind::mul:
        case ExprKind::div: {
            const int p = precedence(e);
            print_wrapped(e.arg(0), precedence(e.arg(0)) < p, out);
            switch (e.kind()) {
                case ExprKind::add: out += " + "; break;
                case ExprKind::sub: out += " - "; break;
                case ExprKind::mul: out += " * "; break;
                default: out += " / "; break;
            }
            // Same-precedence right operands need parentheses to keep the
            // left-associative parse.
            print_wrapped(e.arg(1), precedence(e.arg(1)) <= p, out);
            return;
        }
        case ExprKind::pow:
            print_wrapped(e.arg(0), precedence(e.arg(0)) < 5, out);
            out += "^" + std::to_string(e.exponent());
            return;
        case ExprKind::step: {
            const auto& lits = e.step_literals();
            out += "step(";
            for (std::size_t i = 0; i < lits.size(); ++i) {
                if (i) out += ", ";
                out += lits[i].text;
            }
            out += "; ";
            print_to(e.arg(0), out);
            out.push_back(')');
            return;
        }
        default:
            out += function_name(e.kind());
            out.push_back('(');
            print_to(e.arg(0), out);
            out.push_back(')');
            return;
    }
}

}  // namespace

std::string print(const Expr& e) {
    std::string out;
    print_to(e, out);
    return out;
}

// ---- differentiation --------------------------------------------------------------

namespace {

// Value of a constant or negated constant.
std::optional<Rational> constant_value(const Expr& e) {
    if (e.kind() == ExprKind::constant) return e.literal().value;
    if (e.kind() == ExprKind::neg && e.arg(0).kind() == ExprKind::constant) return -e.arg(0).literal().value;
    return std::nullopt;
}

bool is_value(const Expr& e, long v) {
    auto c = constant_value(e);
    return c && *c == v;
}

Expr make_constant(const Rational& v) {
    if (v < 0) return Expr::unary(ExprKind::neg, Expr::constant(Literal::from_value(-v)));
    return Expr::constant(Literal::from_value(v));
}

Expr negate(const Expr& a) {
    if (a.kind() == ExprKind::neg) return a.arg(0);
    if (is_value(a, 0)) return a;
    return Expr::unary(ExprKind::neg, a);
}

Expr sum(const Expr& a, const Expr& b) {
    if (is_value(a, 0)) return b;
    if (is_value(b, 0)) return a;
    auto ca = constant_value(a);
    auto cb = constant_value(b);
    if (ca && cb) return make_constant(*ca + *cb);
    return Expr::binary(ExprKind::add, a, b);
}

Expr difference(const Expr& a, const Expr& b) {
    if (is_value(b, 0)) return a;
    if (is_value(a, 0)) return negate(b);
    auto ca = constant_value(a);
    auto cb = constant_value(b);
    if (ca && cb) return make_constant(*ca - *cb);
    return Expr::binary(ExprKind::sub, a, b);
}

Expr product(const Expr& a, const Expr& b) {
    if (is_value(a, 0) || is_value(b, 0)) return make_constant(0);
    if (is_value(a, 1)) return b;
    if (is_value(b, 1)) return a;
    if (is_value(a, -1)) return negate(b);
    if (is_value(b, -1)) return negate(a);
    auto ca = constant_value(a);
    auto cb = constant_value(b);
    if (ca && cb) return make_constant(*ca * *cb);
    return Expr::binary(ExprKind::mul, a, b);
}

Expr quotient(const Expr& a, const Expr& b) {
    if (is_value(a, 0)) return a;
    if (is_value(b, 1)) return a;
    return Expr::binary(ExprKind::div, a, b);
}

Expr power(const Expr& base, unsigned n) {
    if (n == 0) return make_constant(1);
    if (n == 1) return base;
    return Expr::power(base, n);
}

}  // namespace

Expr differentiate(const Expr& e, std::string_view var) {
    switch (e.kind()) {
        case ExprKind::constant:
            return make_constant(0);
        case ExprKind::variable:
            return make_constant(e.name() == var ? 1 : 0);
        case ExprKind::neg:
            return negate(differentiate(e.arg(0), var));
        case ExprKind::add:
            return sum(differentiate(e.arg(0), var), differentiate(e.arg(1), var));
        case ExprKind::sub:
            return difference(differentiate(e.arg(0), var), differentiate(e.arg(1), var));
        case ExprKind::mul: {
            const Expr& u = e.arg(0);
            const Expr& v = e.arg(1);
            return sum(product(differentiate(u, var), v), product(u, differentiate(v, var)));
        }
        case ExprKind::div: {
            const Expr& u = e.arg(0);
            const Expr& v = e.arg(1);
            return quotient(difference(product(differentiate(u, var), v), product(u, differentiate(v, var))),
                            power(v, 2));
        }
        case ExprKind::pow: {
            const unsigned n = e.exponent();
            if (n == 0) return make_constant(0);
            return product(product(make_constant(n), power(e.arg(0), n - 1)), differentiate(e.arg(0), var));
        }
        case ExprKind::exp:
            return product(e, differentiate(e.arg(0), var));
        case ExprKind::sin:
            return product(Expr::unary(ExprKind::cos, e.arg(0)), differentiate(e.arg(0), var));
        case ExprKind::cos:
            return product(negate(Expr::unary(ExprKind::sin, e.arg(0))), differentiate(e.arg(0), var));
        case ExprKind::log:
            return quotient(differentiate(e.arg(0), var), e.arg(0));
        case ExprKind::sqrt:
            return quotient(differentiate(e.arg(0), var), product(make_constant(2), e));
        case ExprKind::step:
            throw NonDifferentiable("step functions are not differentiable");
    }
    throw ValidationError("unknown expression node");
}

namespace {

void collect(const Expr& e, std::set<std::string>& out) {
    if (e.kind() == ExprKind::variable) out.insert(e.name());
    for (std::size_t i = 0; i < e.arity(); ++i) collect(e.arg(i), out);
}

}  // namespace

std::set<std::string> free_variables(const Expr& e) {
    std::set<std::string> out;
    collect(e, out);
    return out;
}

}  // namespace rigor

#include "pdham/sysdef/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "pdham/error.hpp"
#include "pdham/sym/zero_test.hpp"

namespace pdham::sysdef {

using sym::Rational;

std::string Diagnostic::str() const {
    return std::to_string(line) + ":" + std::to_string(col) + ": " + code + ": " + message;
}

namespace {

// ------------------------------------------------------------------ lexer

enum class Tok { Name, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 0;
    int col = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct Abort {
    Diagnostic d;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < s.size()) {
        const char ch = s[i];
        if (ch == '#') {
            while (i < s.size() && s[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch)) != 0) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        t.begin = i;
        if (std::isalpha(static_cast<unsigned char>(ch)) != 0 || ch == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) != 0 || s[j] == '_')) ++j;
            t.kind = Tok::Name;
            t.text = s.substr(i, j - i);
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(ch)) != 0) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])) != 0) ++j;
            if (j + 1 < s.size() && s[j] == '.' && std::isdigit(static_cast<unsigned char>(s[j + 1])) != 0) {
                ++j;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])) != 0) ++j;
            }
            t.kind = Tok::Number;
            t.text = s.substr(i, j - i);
            advance(j - i);
        } else if (ch == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            t.kind = Tok::Punct;
            t.text = "->";
            advance(2);
        } else if (std::string("{}()[];,:=+-*/^").find(ch) != std::string::npos) {
            t.kind = Tok::Punct;
            t.text = std::string(1, ch);
            advance(1);
        } else {
            throw Abort{{line, col, "lexical", std::string("unexpected character '") + ch + "'"}};
        }
        t.end = i;
        out.push_back(t);
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.col = col;
    end.begin = end.end = s.size();
    out.push_back(end);
    return out;
}

// -------------------------------------------------------------------- AST

struct Node;
using NodeP = std::shared_ptr<Node>;

struct Node {
    enum class K { Num, Name, Indexed, Call, Neg, Bin };
    K k = K::Num;
    char op = 0;
    std::string text;
    std::vector<std::vector<Token>> idx;
    std::vector<NodeP> kids;
    int line = 0;
    int col = 0;
};

struct Assign {
    Token key;
    std::vector<Token> idx;
    NodeP value;
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct Item {
    enum class K { Bundle, Declare, Const, Form, Field, Current, Map, Constraints, Relations, Simulate };
    K k = K::Bundle;
    Token head;
    Token name;
    Token target;
    std::vector<Token> list1;
    std::vector<Token> list2;
    int degree = 0;
    std::string symmetry;
    std::vector<Assign> assigns;
    std::vector<NodeP> exprs;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    std::vector<Item> document() {
        std::vector<Item> items;
        while (peek().kind != Tok::End) items.push_back(item());
        return items;
    }

    NodeP lone_expression() {
        NodeP e = expr();
        if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after expression");
        return e;
    }

private:
    const Token& peek(std::size_t k = 0) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
    Token next() { return t_[p_ < t_.size() - 1 ? p_++ : p_]; }
    bool is(const char* punct, std::size_t k = 0) const {
        return peek(k).kind == Tok::Punct && peek(k).text == punct;
    }
    bool accept(const char* punct) {
        if (!is(punct)) return false;
        ++p_;
        return true;
    }
    [[noreturn]] static void fail(const Token& at, const std::string& msg) {
        throw Abort{{at.line, at.col, "syntax", msg}};
    }
    static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : "'" + t.text + "'"; }
    Token expect(const char* punct) {
        if (!is(punct)) fail(peek(), std::string("expected '") + punct + "' but found " + describe(peek()));
        return next();
    }
    Token expect_name(const char* what) {
        if (peek().kind != Tok::Name) fail(peek(), std::string("expected ") + what + " but found " + describe(peek()));
        return next();
    }
    Token expect_keyword(const char* kw) {
        if (peek().kind != Tok::Name || peek().text != kw)
            fail(peek(), std::string("expected '") + kw + "' but found " + describe(peek()));
        return next();
    }
    bool starts_assignment() const { return peek().kind == Tok::Name && is("=", 1); }

    std::vector<Token> namelist() {
        std::vector<Token> out;
        while (peek().kind == Tok::Name && !is(":", 1)) {
            out.push_back(next());
            accept(",");
        }
        return out;
    }

    Item item() {
        const Token& h = peek();
        Item it;
        it.head = h;
        if (is("[")) {
            next();
            Token sec = expect_name("section name");
            if (sec.text != "simulate") fail(sec, "unknown section [" + sec.text + "]");
            expect("]");
            it.k = Item::K::Simulate;
            while (starts_assignment()) it.assigns.push_back(assignment());
            return it;
        }
        if (h.kind != Tok::Name) fail(h, "expected a declaration but found " + describe(h));
        const std::string kw = h.text;
        next();
        if (kw == "bundle") {
            it.k = Item::K::Bundle;
            expect("{");
            expect_keyword("base");
            expect(":");
            it.list1 = namelist();
            accept(";");
            expect_keyword("fiber");
            expect(":");
            it.list2 = namelist();
            accept(";");
            expect("}");
        } else if (kw == "declare") {
            it.k = Item::K::Declare;
            it.name = expect_name("function name");
            expect("(");
            it.list1 = namelist();
            expect(")");
        } else if (kw == "const") {
            it.k = Item::K::Const;
            it.name = expect_name("constant name");
            if (peek().kind == Tok::Name && (peek().text == "symmetric" || peek().text == "skew") && !is("=", 1) &&
                !is("(", 1))
                it.symmetry = next().text;
        } else if (kw == "form") {
            it.k = Item::K::Form;
            it.name = expect_name("form name");
            expect_keyword("deg");
            Token d = next();
            if (d.kind != Tok::Number || (d.text != "0" && d.text != "1" && d.text != "2"))
                fail(d, "form degree must be 0, 1 or 2");
            it.degree = d.text[0] - '0';
            expect("{");
            while (!is("}")) {
                it.assigns.push_back(component());
                accept(";");
            }
            expect("}");
        } else if (kw == "field" || kw == "current") {
            it.k = kw == "field" ? Item::K::Field : Item::K::Current;
            it.name = expect_name("name");
            body(it);
        } else if (kw == "map") {
            it.k = Item::K::Map;
            it.name = expect_name("map name");
            expect("->");
            it.target = expect_name("target name");
            body(it);
        } else if (kw == "constraints" || kw == "relations") {
            it.k = kw == "constraints" ? Item::K::Constraints : Item::K::Relations;
            expect("{");
            while (!is("}")) {
                if (it.k == Item::K::Relations) {
                    it.exprs.push_back(expr());
                    expect("=");
                    it.exprs.push_back(expr());
                } else {
                    it.exprs.push_back(expr());
                }
                if (!accept(";") && !is("}")) fail(peek(), "expected ';' or '}' but found " + describe(peek()));
            }
            expect("}");
        } else {
            fail(h, "unknown declaration '" + kw + "'");
        }
        return it;
    }

    void body(Item& it) {
        expect("{");
        while (!is("}")) {
            if (!starts_assignment()) fail(peek(), "expected 'name = expression' but found " + describe(peek()));
            it.assigns.push_back(assignment());
            if (!accept(";")) accept(",");
        }
        expect("}");
    }

    Assign assignment() {
        Assign a;
        a.key = next();
        expect("=");
        a.begin = peek().begin;
        a.value = expr();
        a.end = t_[p_ - 1].end;
        return a;
    }

    Assign component() {
        Assign a;
        a.key = expect_name("component");
        const std::string& k = a.key.text;
        if (k == "f" || k == "v") {
            expect("[");
            a.idx.push_back(expect_name("index"));
            expect("]");
        } else if (k == "th") {
            expect("[");
            a.idx.push_back(expect_name("base index"));
            expect(";");
            a.idx.push_back(expect_name("fiber index"));
            expect("]");
        } else if (k == "w") {
            expect("[");
            a.idx.push_back(expect_name("base index"));
            expect(";");
            a.idx.push_back(expect_name("fiber index"));
            expect(",");
            a.idx.push_back(expect_name("fiber index"));
            expect("]");
        } else if (k != "h" && k != "wedge") {
            fail(a.key, "unknown form component '" + k + "'");
        }
        expect("=");
        a.begin = peek().begin;
        a.value = expr();
        a.end = t_[p_ - 1].end;
        return a;
    }

    static NodeP make(Node::K k, const Token& at) {
        auto n = std::make_shared<Node>();
        n->k = k;
        n->line = at.line;
        n->col = at.col;
        return n;
    }

    NodeP expr() {
        NodeP lhs = term();
        while (is("+") || is("-")) {
            Token op = next();
            NodeP n = make(Node::K::Bin, op);
            n->op = op.text[0];
            n->kids = {lhs, term()};
            lhs = n;
        }
        return lhs;
    }

    NodeP term() {
        NodeP lhs = unary();
        while (is("*") || is("/")) {
            Token op = next();
            NodeP n = make(Node::K::Bin, op);
            n->op = op.text[0];
            n->kids = {lhs, unary()};
            lhs = n;
        }
        return lhs;
    }

    NodeP unary() {
        if (is("-")) {
            Token op = next();
            NodeP n = make(Node::K::Neg, op);
            n->kids = {unary()};
            return n;
        }
        if (accept("+")) return unary();
        return power();
    }

    NodeP power() {
        NodeP base = primary();
        if (is("^")) {
            Token op = next();
            NodeP n = make(Node::K::Bin, op);
            n->op = '^';
            n->kids = {base, exponent()};
            return n;
        }
        return base;
    }

    NodeP exponent() {
        if (is("-")) {
            Token op = next();
            NodeP n = make(Node::K::Neg, op);
            n->kids = {exponent()};
            return n;
        }
        return power();
    }

    NodeP primary() {
        const Token t = peek();
        if (t.kind == Tok::Number) {
            next();
            NodeP n = make(Node::K::Num, t);
            n->text = t.text;
            return n;
        }
        if (accept("(")) {
            NodeP e = expr();
            expect(")");
            return e;
        }
        if (t.kind == Tok::Name) {
            next();
            if (accept("(")) {
                NodeP n = make(Node::K::Call, t);
                n->text = t.text;
                if (!is(")")) {
                    n->kids.push_back(expr());
                    while (accept(",")) n->kids.push_back(expr());
                }
                expect(")");
                return n;
            }
            if (is("[")) {
                NodeP n = make(Node::K::Indexed, t);
                n->text = t.text;
                while (accept("[")) {
                    std::vector<Token> group;
                    do {
                        Token ix = next();
                        if (ix.kind != Tok::Name && ix.kind != Tok::Number) fail(ix, "expected an index");
                        group.push_back(ix);
                    } while (accept(","));
                    expect("]");
                    n->idx.push_back(group);
                }
                return n;
            }
            NodeP n = make(Node::K::Name, t);
            n->text = t.text;
            return n;
        }
        fail(t, "expected an expression but found " + describe(t));
    }

    std::vector<Token> t_;
    std::size_t p_ = 0;
};

// --------------------------------------------------------------- evaluation

// Element of the exterior algebra generated by dy^0..dy^{m-1}, dx^0..dx^{n-1}
// (generator indices m+i for dx^i), keyed by sorted generator lists.
struct FormVal {
    std::map<std::vector<int>, Expr> t;

    static FormVal scalar(const Expr& e) {
        FormVal v;
        if (!e.is_zero()) v.t[{}] = e;
        return v;
    }
    bool is_scalar() const { return t.empty() || (t.size() == 1 && t.begin()->first.empty()); }
    Expr as_scalar() const { return t.empty() ? Expr() : t.begin()->second; }
    void add(const std::vector<int>& k, const Expr& e) {
        if (e.is_zero()) return;
        auto it = t.find(k);
        if (it == t.end()) {
            t.emplace(k, e);
            return;
        }
        it->second += e;
        if (it->second.is_zero()) t.erase(it);
    }
};

FormVal operator+(const FormVal& a, const FormVal& b) {
    FormVal r = a;
    for (const auto& [k, e] : b.t) r.add(k, e);
    return r;
}

FormVal negate(const FormVal& a) {
    FormVal r;
    for (const auto& [k, e] : a.t) r.t.emplace(k, -e);
    return r;
}

FormVal wedge(const FormVal& a, const FormVal& b) {
    FormVal r;
    for (const auto& [ka, ea] : a.t) {
        for (const auto& [kb, eb] : b.t) {
            std::vector<int> k = ka;
            bool repeated = false;
            int inversions = 0;
            for (int g : kb) {
                if (std::find(ka.begin(), ka.end(), g) != ka.end()) repeated = true;
                for (int h : ka)
                    if (h > g) ++inversions;
                k.push_back(g);
            }
            if (repeated) continue;
            std::sort(k.begin(), k.end());
            const Expr c = ea * eb;
            r.add(k, inversions % 2 == 0 ? c : -c);
        }
    }
    return r;
}

class Evaluator {
public:
    Evaluator(const Chart& chart, std::vector<Diagnostic>& diags, bool allow_free = false)
        : c_(chart), diags_(diags), allow_free_(allow_free) {}

    Expr scalar(const Node& n) {
        FormVal v = eval(n, false);
        return v.as_scalar();
    }

    FormVal form(const Node& n) { return eval(n, true); }

    void error(const Node& n, const std::string& code, const std::string& msg) {
        diags_.push_back({n.line, n.col, code, msg});
    }

private:
    FormVal eval(const Node& n, bool wedge_mode) {
        try {
            return eval_inner(n, wedge_mode);
        } catch (const Error& e) {
            error(n, e.kind() == ErrorKind::Input ? "semantic" : "unsupported", e.what());
        } catch (const std::domain_error& e) {
            error(n, "semantic", e.what());
        }
        return {};
    }

    std::optional<Expr> resolve_name(const std::string& s) const {
        if (c_.is_coordinate(s)) return Expr::symbol(s);
        if (c_.constants.count(s) != 0U) return Expr::symbol(s);
        auto it = c_.functions.find(s);
        if (it != c_.functions.end()) return Expr::function(s, it->second);
        return std::nullopt;
    }

    FormVal differential(const Expr& e) const {
        FormVal r;
        for (int a = 0; a < c_.m(); ++a) r.add({a}, sym::diff(e, c_.fiber[static_cast<std::size_t>(a)]));
        for (int i = 0; i < c_.n(); ++i) r.add({c_.m() + i}, sym::diff(e, c_.base[static_cast<std::size_t>(i)]));
        return r;
    }

    FormVal volume(int skip) const {
        FormVal r;
        std::vector<int> k;
        for (int i = 0; i < c_.n(); ++i)
            if (i != skip) k.push_back(c_.m() + i);
        r.t[k] = (skip >= 0 && skip % 2 == 1) ? Expr(-1) : Expr(1);
        return r;
    }

    FormVal eval_inner(const Node& n, bool wm) {
        switch (n.k) {
            case Node::K::Num: {
                const auto dot = n.text.find('.');
                if (dot == std::string::npos) return FormVal::scalar(Rational(mpz_class(n.text, 10)));
                const std::string digits = n.text.substr(0, dot) + n.text.substr(dot + 1);
                mpz_class den = 1;
                for (std::size_t i = dot + 1; i < n.text.size(); ++i) den *= 10;
                Rational q(mpz_class(digits, 10), den);
                q.canonicalize();
                return FormVal::scalar(q);
            }
            case Node::K::Name: {
                if (auto e = resolve_name(n.text)) return FormVal::scalar(*e);
                if (wm && n.text == "vol") return volume(-1);
                if (wm && n.text.size() > 1 && n.text[0] == 'd') {
                    if (auto e = resolve_name(n.text.substr(1))) return differential(*e);
                }
                if (allow_free_) return FormVal::scalar(Expr::symbol(n.text));
                error(n, "unknown-symbol", "unknown symbol '" + n.text + "'");
                return {};
            }
            case Node::K::Indexed: return indexed(n, wm);
            case Node::K::Call: return call(n, wm);
            case Node::K::Neg: return negate(eval(*n.kids[0], wm));
            case Node::K::Bin: {
                const FormVal a = eval(*n.kids[0], wm);
                if (n.op == '^') {
                    const FormVal b = eval(*n.kids[1], false);
                    if (!a.is_scalar()) {
                        error(n, "semantic", "cannot raise a form to a power");
                        return {};
                    }
                    auto ex = b.as_scalar().constant_value();
                    if (!ex) {
                        error(*n.kids[1], "unsupported", "exponents must be rational constants");
                        return {};
                    }
                    return FormVal::scalar(a.as_scalar().pow(*ex));
                }
                const FormVal b = eval(*n.kids[1], wm);
                switch (n.op) {
                    case '+': return a + b;
                    case '-': return a + negate(b);
                    case '*': return wedge(a, b);
                    case '/': {
                        if (!b.is_scalar()) {
                            error(n, "semantic", "cannot divide by a form");
                            return {};
                        }
                        const Expr d = b.as_scalar();
                        if (d.is_zero()) {
                            error(n, "semantic", "division by zero");
                            return {};
                        }
                        return wedge(a, FormVal::scalar(Expr(1) / d));
                    }
                    default: break;
                }
                return {};
            }
        }
        return {};
    }

    int sort_key(const Token& t) const {
        const int p = c_.coordinate_position(t.text);
        return p >= 0 ? p : 1 << 20;
    }

    FormVal indexed(const Node& n, bool wm) {
        const std::string& name = n.text;
        if (name == "D") {
            if (n.idx.size() != 2 || n.idx[0].size() != 1 || n.idx[1].size() != 1) {
                error(n, "arity", "jet placeholder takes the form D[base][fiber]");
                return {};
            }
            const std::string& i = n.idx[0][0].text;
            const std::string& a = n.idx[1][0].text;
            if (c_.base_index(i) < 0 || c_.fiber_index(a) < 0) {
                error(n, "unknown-symbol", "D[" + i + "][" + a + "] does not name a jet coordinate");
                return {};
            }
            return FormVal::scalar(Expr::symbol(jet_name(i, a)));
        }
        if (wm && name == "vol") {
            if (n.idx.size() != 1 || n.idx[0].size() != 1 || c_.base_index(n.idx[0][0].text) < 0) {
                error(n, "unknown-symbol", "vol[...] needs one base coordinate");
                return {};
            }
            return volume(c_.base_index(n.idx[0][0].text));
        }
        auto it = c_.constants.find(name);
        if (it == c_.constants.end()) {
            error(n, "unknown-symbol", "unknown indexed symbol '" + name + "'");
            return {};
        }
        if (n.idx.size() != 1) {
            error(n, "arity", "constant " + name + " takes one index group");
            return {};
        }
        std::vector<Token> ix = n.idx[0];
        int sign = 1;
        if (it->second != Symmetry::None) {
            auto less = [&](const Token& a, const Token& b) {
                const int ka = sort_key(a);
                const int kb = sort_key(b);
                if (ka != kb) return ka < kb;
                return a.text < b.text;
            };
            // insertion sort to track the permutation parity
            for (std::size_t i = 1; i < ix.size(); ++i)
                for (std::size_t j = i; j > 0 && less(ix[j], ix[j - 1]); --j) {
                    std::swap(ix[j], ix[j - 1]);
                    sign = -sign;
                }
            if (it->second == Symmetry::Skew) {
                for (std::size_t i = 1; i < ix.size(); ++i)
                    if (ix[i].text == ix[i - 1].text) return {};
            } else {
                sign = 1;
            }
        }
        std::string s = name + "[";
        for (std::size_t i = 0; i < ix.size(); ++i) s += (i != 0U ? "," : "") + ix[i].text;
        s += "]";
        return FormVal::scalar(sign * Expr::symbol(s));
    }

    FormVal call(const Node& n, bool wm) {
        const std::string& f = n.text;
        auto one_scalar = [&]() -> std::optional<Expr> {
            if (n.kids.size() != 1) {
                error(n, "arity", f + " takes one argument");
                return std::nullopt;
            }
            const FormVal v = eval(*n.kids[0], false);
            return v.as_scalar();
        };
        if (f == "sqrt") {
            if (auto a = one_scalar()) return FormVal::scalar(a->pow(Rational(1, 2)));
            return {};
        }
        static const std::map<std::string, sym::ElementaryFn> elementary{{"exp", sym::ElementaryFn::Exp},
                                                                         {"ln", sym::ElementaryFn::Ln},
                                                                         {"sin", sym::ElementaryFn::Sin},
                                                                         {"cos", sym::ElementaryFn::Cos}};
        if (auto it = elementary.find(f); it != elementary.end() && c_.functions.count(f) == 0U) {
            if (auto a = one_scalar()) {
                if (it->second == sym::ElementaryFn::Ln && a->is_constant() && *a->constant_value() <= 0) {
                    error(n, "semantic", "logarithm of a non-positive constant");
                    return {};
                }
                return FormVal::scalar(Expr::elementary(it->second, *a));
            }
            return {};
        }
        if (f == "diff") {
            if (n.kids.size() < 2) {
                error(n, "arity", "diff needs an expression and at least one variable");
                return {};
            }
            Expr e = eval(*n.kids[0], false).as_scalar();
            for (std::size_t k = 1; k < n.kids.size(); ++k) {
                const Node& v = *n.kids[k];
                if (v.k != Node::K::Name || !(c_.is_coordinate(v.text) || allow_free_)) {
                    error(v, "unknown-symbol", "diff variable must be a coordinate");
                    return {};
                }
                e = sym::diff(e, v.text);
            }
            return FormVal::scalar(e);
        }
        if (f == "d" && wm) {
            if (auto a = one_scalar()) return differential(*a);
            return {};
        }
        auto it = c_.functions.find(f);
        if (it == c_.functions.end()) {
            error(n, "unknown-symbol", "unknown function '" + f + "'");
            return {};
        }
        if (n.kids.size() != it->second.size()) {
            error(n, "arity",
                  f + " is declared with " + std::to_string(it->second.size()) + " arguments, called with " +
                      std::to_string(n.kids.size()));
            return {};
        }
        for (std::size_t k = 0; k < n.kids.size(); ++k) {
            const Node& a = *n.kids[k];
            if (a.k != Node::K::Name || a.text != it->second[k]) {
                error(a, "unsupported", "arguments of opaque function " + f + " must repeat its declaration");
                return {};
            }
        }
        return FormVal::scalar(Expr::function(f, it->second));
    }

    const Chart& c_;
    std::vector<Diagnostic>& diags_;
    bool allow_free_;
};

// ------------------------------------------------------------- model build

class Builder {
public:
    explicit Builder(const std::string& text) : text_(text) {}

    ParseResult run(const std::vector<Item>& items) {
        ParseResult res;
        build_chart(items);
        if (!diags_.empty() || !chart_) {
            res.diagnostics = diags_;
            return res;
        }
        model_.chart = chart_;
        Evaluator ev(*chart_, diags_);
        for (const auto& it : items) {
            switch (it.k) {
                case Item::K::Bundle:
                case Item::K::Declare:
                case Item::K::Const: break;
                case Item::K::Relations: relations(it, ev); break;
                case Item::K::Form: form(it, ev); break;
                case Item::K::Field: field(it, ev); break;
                case Item::K::Current: current(it, ev); break;
                case Item::K::Map: map(it, ev); break;
                case Item::K::Constraints: constraints(it, ev); break;
                case Item::K::Simulate: simulate(it); break;
            }
        }
        res.diagnostics = diags_;
        if (diags_.empty()) res.model = std::move(model_);
        return res;
    }

private:
    void diag(const Token& t, const std::string& code, const std::string& msg) {
        diags_.push_back({t.line, t.col, code, msg});
    }

    void build_chart(const std::vector<Item>& items) {
        auto chart = std::make_shared<Chart>();
        const Item* bundle = nullptr;
        for (const auto& it : items) {
            if (it.k != Item::K::Bundle) continue;
            if (bundle != nullptr) {
                diag(it.head, "duplicate-name", "only one bundle declaration is allowed");
                continue;
            }
            bundle = &it;
        }
        if (bundle == nullptr) {
            diags_.push_back({1, 1, "semantic", "bundle declaration required"});
            return;
        }
        std::set<std::string> names;
        auto claim = [&](const Token& t) {
            static const std::set<std::string> reserved{"D", "d", "vol", "diff", "sqrt", "exp", "ln", "sin", "cos"};
            if (reserved.count(t.text) != 0U) {
                diag(t, "semantic", "'" + t.text + "' is reserved");
                return false;
            }
            if (!names.insert(t.text).second) {
                diag(t, "duplicate-name", "'" + t.text + "' is declared twice");
                return false;
            }
            return true;
        };
        for (const auto& t : bundle->list1)
            if (claim(t)) chart->base.push_back(t.text);
        for (const auto& t : bundle->list2)
            if (claim(t)) chart->fiber.push_back(t.text);
        if (bundle->list1.empty()) diag(bundle->head, "semantic", "n ≥ 1 required");
        if (bundle->list2.empty()) diag(bundle->head, "semantic", "m ≥ 1 required");
        for (const auto& it : items) {
            if (it.k == Item::K::Declare) {
                if (!claim(it.name)) continue;
                std::vector<std::string> args;
                for (const auto& a : it.list1) {
                    if (!chart->is_coordinate(a.text)) diag(a, "unknown-symbol", "'" + a.text + "' is not a coordinate");
                    args.push_back(a.text);
                }
                chart->functions[it.name.text] = args;
                chart->function_order.push_back(it.name.text);
            } else if (it.k == Item::K::Const) {
                if (!claim(it.name)) continue;
                Symmetry s = Symmetry::None;
                if (it.symmetry == "symmetric") s = Symmetry::Symmetric;
                if (it.symmetry == "skew") s = Symmetry::Skew;
                chart->constants[it.name.text] = s;
                chart->constant_order.push_back(it.name.text);
            }
        }
        chart_names_ = names;
        chart_ = chart;
    }

    bool claim_object(const Token& t) {
        if (chart_names_.count(t.text) != 0U || !objects_.insert(t.text).second) {
            diag(t, "duplicate-name", "'" + t.text + "' is declared twice");
            return false;
        }
        model_.order.push_back(t.text);
        return true;
    }

    void relations(const Item& it, Evaluator& ev) {
        for (std::size_t k = 0; k + 1 < it.exprs.size(); k += 2) {
            const Node& ln = *it.exprs[k];
            const Expr lhs = ev.scalar(ln);
            const Expr rhs = ev.scalar(*it.exprs[k + 1]);
            const auto& terms = lhs.num().terms();
            if (!lhs.is_polynomial() || terms.size() != 1 || terms.begin()->second != 1 ||
                terms.begin()->first.size() != 1 || terms.begin()->first[0].second != 1) {
                ev.error(ln, "semantic", "left side of a relation must be a single symbol or partial derivative");
                continue;
            }
            const sym::Atom a = terms.begin()->first[0].first;
            if (a->kind != sym::AtomKind::Symbol && a->kind != sym::AtomKind::Function) {
                ev.error(ln, "semantic", "left side of a relation must be a single symbol or partial derivative");
                continue;
            }
            model_.relations.push_back({a, rhs});
        }
    }

    std::optional<int> base_of(const Token& t) {
        const int i = chart_->base_index(t.text);
        if (i < 0) {
            diag(t, "unknown-symbol", "'" + t.text + "' is not a base coordinate");
            return std::nullopt;
        }
        return i;
    }

    std::optional<int> fiber_of(const Token& t) {
        const int a = chart_->fiber_index(t.text);
        if (a < 0) {
            diag(t, "unknown-symbol", "'" + t.text + "' is not a fiber coordinate");
            return std::nullopt;
        }
        return a;
    }

    void form(const Item& it, Evaluator& ev) {
        const bool fresh = claim_object(it.name);
        const int n = chart_->n();
        const int m = chart_->m();
        FormEntry entry;
        entry.degree = it.degree;
        Form0 f0 = Form0::zero(chart_);
        Form1 f1 = Form1::zero(chart_);
        Form2 f2(chart_);
        std::map<std::tuple<int, int, int>, std::pair<Expr, Token>> wgiven;
        std::set<std::string> seen;
        static const std::map<std::string, int> comp_degree{{"f", 0}, {"th", 1}, {"h", 1}, {"w", 2}, {"v", 2}};

        for (const auto& as : it.assigns) {
            const std::string& k = as.key.text;
            if (k != "wedge") {
                if (comp_degree.at(k) != it.degree) {
                    diag(as.key, "semantic",
                         "component '" + k + "' does not belong to a degree-" + std::to_string(it.degree) + " form");
                    continue;
                }
                std::string label = k;
                for (const auto& t : as.idx) label += "," + t.text;
                if (!seen.insert(label).second) {
                    diag(as.key, "duplicate-name", "component given twice");
                    continue;
                }
            }
            if (k == "wedge") {
                add_wedge(it.degree, ev.form(*as.value), as, f0, f1, f2);
                continue;
            }
            const Expr e = ev.scalar(*as.value);
            if (k == "f") {
                if (auto i = base_of(as.idx[0])) f0.f[static_cast<std::size_t>(*i)] += e;
            } else if (k == "th") {
                auto i = base_of(as.idx[0]);
                auto a = fiber_of(as.idx[1]);
                if (i && a) f1.th[static_cast<std::size_t>(*i)][static_cast<std::size_t>(*a)] += e;
            } else if (k == "h") {
                f1.h += e;
            } else if (k == "v") {
                if (auto a = fiber_of(as.idx[0])) f2.set_v(*a, f2.v(*a) + e);
            } else if (k == "w") {
                auto i = base_of(as.idx[0]);
                auto a = fiber_of(as.idx[1]);
                auto b = fiber_of(as.idx[2]);
                if (!(i && a && b)) continue;
                if (*a == *b) {
                    diag(as.idx[2], "semantic", "repeated fiber index in skew slot");
                    continue;
                }
                wgiven[{*i, *a, *b}] = {e, as.key};
            }
        }
        for (const auto& [key, val] : wgiven) {
            const auto [i, a, b] = key;
            auto other = wgiven.find({i, b, a});
            if (other != wgiven.end()) {
                if (a > b) continue;
                if (!sym::is_zero(val.first + other->second.first).zero()) {
                    diag(other->second.second, "semantic",
                         "w[" + chart_->base[static_cast<std::size_t>(i)] + "; " +
                             chart_->fiber[static_cast<std::size_t>(a)] + ", " +
                             chart_->fiber[static_cast<std::size_t>(b)] + "] and its transpose are not opposite");
                }
            }
            f2.set_w(i, a, b, f2.w(i, a, b) + val.first);
        }
        (void)n;
        (void)m;
        if (!fresh) return;
        if (it.degree == 0) entry.f0 = f0;
        if (it.degree == 1) entry.f1 = f1;
        if (it.degree == 2) entry.f2 = f2;
        model_.forms[it.name.text] = entry;
    }

    void add_wedge(int degree, const FormVal& v, const Assign& as, Form0& f0, Form1& f1, Form2& f2) {
        const int n = chart_->n();
        const int m = chart_->m();
        for (const auto& [key, c] : v.t) {
            std::vector<int> ys;
            std::vector<int> xs;
            for (int g : key) (g < m ? ys : xs).push_back(g < m ? g : g - m);
            int missing = -1;
            if (static_cast<int>(xs.size()) == n - 1) {
                for (int i = 0; i < n; ++i)
                    if (std::find(xs.begin(), xs.end(), i) == xs.end()) missing = i;
            }
            const Expr sgn = missing % 2 == 1 ? Expr(-1) : Expr(1);
            const int ky = static_cast<int>(ys.size());
            const bool full = static_cast<int>(xs.size()) == n;
            const bool hyper = missing >= 0;
            bool ok = false;
            if (degree == 0 && ky == 0 && hyper) {
                f0.f[static_cast<std::size_t>(missing)] += sgn * c;
                ok = true;
            } else if (degree == 1 && ky == 1 && hyper) {
                f1.th[static_cast<std::size_t>(missing)][static_cast<std::size_t>(ys[0])] += sgn * c;
                ok = true;
            } else if (degree == 1 && ky == 0 && full) {
                f1.h -= c;
                ok = true;
            } else if (degree == 2 && ky == 2 && hyper) {
                f2.set_w(missing, ys[0], ys[1], f2.w(missing, ys[0], ys[1]) + sgn * c / Expr(2));
                ok = true;
            } else if (degree == 2 && ky == 1 && full) {
                f2.set_v(ys[0], f2.v(ys[0]) + c);
                ok = true;
            }
            if (!ok) {
                std::string mono;
                for (int g : key) mono += (g < m ? " d" + chart_->fiber[static_cast<std::size_t>(g)]
                                                 : " d" + chart_->base[static_cast<std::size_t>(g - m)]);
                if (mono.empty()) mono = " 1";
                diag(as.key, "semantic",
                     "wedge term (" + c.str() + ")" + mono + " does not fit a degree-" + std::to_string(degree) +
                         " form");
            }
        }
    }

    template <typename F>
    void components(const Item& it, Evaluator& ev, const std::vector<std::string>& keys, const char* what,
                    F&& store) {
        std::vector<bool> seen(keys.size(), false);
        for (const auto& as : it.assigns) {
            auto k = std::find(keys.begin(), keys.end(), as.key.text);
            if (k == keys.end()) {
                diag(as.key, "unknown-symbol", "'" + as.key.text + "' is not a " + what + " coordinate");
                continue;
            }
            const auto idx = static_cast<std::size_t>(k - keys.begin());
            if (seen[idx]) {
                diag(as.key, "duplicate-name", "component '" + as.key.text + "' given twice");
                continue;
            }
            seen[idx] = true;
            store(idx, ev.scalar(*as.value));
        }
        std::string missing;
        for (std::size_t k = 0; k < keys.size(); ++k)
            if (!seen[k]) missing += (missing.empty() ? "" : ", ") + keys[k];
        if (!missing.empty())
            diag(it.name, "arity",
                 "'" + it.name.text + "' needs " + std::to_string(keys.size()) + " components; missing " + missing);
    }

    void field(const Item& it, Evaluator& ev) {
        const bool fresh = claim_object(it.name);
        VerticalField y = VerticalField::zero(chart_);
        components(it, ev, chart_->fiber, "fiber", [&](std::size_t k, const Expr& e) { y.y[k] = e; });
        if (fresh) model_.fields[it.name.text] = y;
    }

    void current(const Item& it, Evaluator& ev) {
        const bool fresh = claim_object(it.name);
        Form0 f = Form0::zero(chart_);
        components(it, ev, chart_->base, "base", [&](std::size_t k, const Expr& e) { f.f[k] = e; });
        if (fresh) model_.currents[it.name.text] = f;
    }

    void map(const Item& it, Evaluator& ev) {
        const bool fresh = claim_object(it.name);
        MapDecl d;
        d.name = it.name.text;
        d.target = it.target.text;
        std::set<std::string> seen;
        for (const auto& as : it.assigns) {
            if (!seen.insert(as.key.text).second) {
                diag(as.key, "duplicate-name", "component '" + as.key.text + "' given twice");
                continue;
            }
            d.assignments.emplace_back(as.key.text, ev.scalar(*as.value));
        }
        if (fresh) model_.maps[d.name] = d;
    }

    void constraints(const Item& it, Evaluator& ev) {
        if (model_.constraints) {
            diag(it.head, "duplicate-name", "constraints declared twice");
            return;
        }
        ConstraintSet c;
        c.chart = chart_;
        for (const auto& e : it.exprs) c.eqs.push_back(ev.scalar(*e));
        model_.constraints = c;
    }

    void simulate(const Item& it) {
        for (const auto& as : it.assigns)
            model_.simulate.emplace_back(as.key.text, text_.substr(as.begin, as.end - as.begin));
    }

    const std::string& text_;
    std::vector<Diagnostic> diags_;
    std::shared_ptr<Chart> chart_;
    std::set<std::string> chart_names_;
    std::set<std::string> objects_;
    SystemModel model_;
};

}  // namespace

ParseResult parse_system(const std::string& text) {
    try {
        Parser p(lex(text));
        const std::vector<Item> items = p.document();
        Builder b(text);
        return b.run(items);
    } catch (const Abort& a) {
        ParseResult r;
        r.diagnostics.push_back(a.d);
        return r;
    }
}

ParseResult parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back({0, 0, "io", "cannot read " + path});
        return r;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_system(ss.str());
}

Expr parse_expression(const std::string& text, const Chart& chart, bool allow_free) {
    std::vector<Diagnostic> diags;
    Expr e;
    try {
        Parser p(lex(text));
        NodeP n = p.lone_expression();
        Evaluator ev(chart, diags, allow_free);
        e = ev.scalar(*n);
    } catch (const Abort& a) {
        diags.push_back(a.d);
    }
    if (!diags.empty()) throw input_error("in '" + text + "': " + diags.front().str());
    return e;
}

std::vector<Diagnostic> validate(const SystemModel& model) {
    std::vector<Diagnostic> out;
    if (!model.chart) {
        out.push_back({0, 0, "semantic", "model has no chart"});
        return out;
    }
    const Chart& c = *model.chart;
    if (c.n() < 1) out.push_back({0, 0, "semantic", "n ≥ 1 required"});
    if (c.m() < 1) out.push_back({0, 0, "semantic", "m ≥ 1 required"});
    std::set<std::string> names;
    auto unique = [&](const std::string& s) {
        if (!names.insert(s).second) out.push_back({0, 0, "duplicate-name", "'" + s + "' is declared twice"});
    };
    for (const auto& s : c.base) unique(s);
    for (const auto& s : c.fiber) unique(s);
    for (const auto& [s, args] : c.functions) {
        unique(s);
        for (const auto& a : args)
            if (!c.is_coordinate(a))
                out.push_back({0, 0, "unknown-symbol", "function " + s + " depends on unknown coordinate " + a});
    }
    for (const auto& [s, sy] : c.constants) unique(s);

    auto check = [&](const std::string& where, const ChartPtr& ch, const Expr& e) {
        if (ch && ch != model.chart && !same_chart(*ch, c)) {
            out.push_back({0, 0, "semantic", where + ": chart differs from the model chart"});
            return;
        }
        std::string bad;
        if (!c.admits(e, &bad)) out.push_back({0, 0, "unknown-symbol", where + ": unknown symbol " + bad});
    };
    auto sized = [&](const std::string& where, std::size_t got, int want) {
        if (got != static_cast<std::size_t>(want))
            out.push_back({0, 0, "arity",
                           where + " has " + std::to_string(got) + " components, expected " + std::to_string(want)});
        return got == static_cast<std::size_t>(want);
    };
    auto check0 = [&](const std::string& where, const Form0& f) {
        if (!sized(where, f.f.size(), c.n())) return;
        for (const auto& e : f.f) check(where, f.chart, e);
    };
    for (const auto& [name, entry] : model.forms) {
        if (entry.f0) check0("form " + name, *entry.f0);
        if (entry.f1) {
            const Form1& t = *entry.f1;
            if (sized("form " + name, t.th.size(), c.n())) {
                for (const auto& row : t.th) {
                    if (!sized("form " + name, row.size(), c.m())) continue;
                    for (const auto& e : row) check("form " + name, t.chart, e);
                }
            }
            check("form " + name, t.chart, t.h);
        }
        if (entry.f2) {
            const Form2& w = *entry.f2;
            for (int i = 0; i < c.n(); ++i)
                for (int a = 0; a < c.m(); ++a)
                    for (int b = a + 1; b < c.m(); ++b) check("form " + name, w.chart(), w.w(i, a, b));
            for (int a = 0; a < c.m(); ++a) check("form " + name, w.chart(), w.v(a));
        }
    }
    for (const auto& [name, y] : model.fields) {
        if (!sized("field " + name, y.y.size(), c.m())) continue;
        for (const auto& e : y.y) check("field " + name, y.chart, e);
    }
    for (const auto& [name, f] : model.currents) check0("current " + name, f);
    for (const auto& [name, d] : model.maps)
        for (const auto& [k, e] : d.assignments) check("map " + name, model.chart, e);
    if (model.constraints)
        for (const auto& e : model.constraints->eqs) check("constraints", model.constraints->chart, e);
    for (const auto& r : model.relations) check("relations", model.chart, r.rhs);
    return out;
}

}  // namespace pdham::sysdef

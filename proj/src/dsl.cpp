#include "lkt/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace lkt::dsl {

const char* codeName(ErrorCode c) {
    switch (c) {
        case ErrorCode::Lexical: return "lexical";
        case ErrorCode::Syntax: return "syntax";
        case ErrorCode::Reference: return "reference";
        default: return "type";
    }
}

namespace {

std::string posText(Pos p) { return std::to_string(p.line) + ":" + std::to_string(p.col); }

std::string joinList(const std::vector<std::string>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
    return s;
}

}  // namespace

DslError::DslError(ErrorCode c, Pos p, const std::string& msg, std::vector<std::string> exp)
    : std::runtime_error(posText(p) + ": " + codeName(c) + " error: " + msg +
                         (exp.empty() ? "" : " (expected " + joinList(exp) + ")")),
      code(c),
      pos(p),
      expected(std::move(exp)) {}

namespace {

struct Token {
    enum class T { Ident, Int, Punct, End } t = T::End;
    std::string text;
    Pos pos;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    Pos p;
    std::size_t i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j, ++i) {
            if (s[i] == '\n') {
                ++p.line;
                p.col = 1;
            } else {
                ++p.col;
            }
        }
    };
    const std::string punct = "{}()[],;=+^/|";
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.pos = p;
        std::size_t j = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\'')) ++j;
            t.t = Token::T::Ident;
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '-' && j + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[j + 1])))) {
            ++j;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            t.t = Token::T::Int;
        } else if (punct.find(c) != std::string::npos) {
            j = i + 1;
            t.t = Token::T::Punct;
        } else {
            throw DslError(ErrorCode::Lexical, p, std::string("unexpected character '") + c + "'");
        }
        t.text = s.substr(i, j - i);
        advance(j - i);
        out.push_back(t);
    }
    Token end;
    end.pos = p;
    out.push_back(end);
    return out;
}

const std::vector<std::string> kStmtStarts{"block", "let", "check", "compare", "report"};
const std::vector<std::string> kKeys{"kind", "k0", "k1", "unit", "cone", "chain", "layer", "iota0", "pi0", "iota1", "pi1"};
const std::vector<std::string> kConstructors{"sum", "unitize", "stabilize", "extension"};

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(lex(text)) {}

    Program program() {
        Program p;
        while (peek().t != Token::T::End) p.stmts.push_back(stmt());
        return p;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    [[noreturn]] void fail(const std::vector<std::string>& expected) {
        const Token& t = peek();
        std::string got = t.t == Token::T::End ? "end of input" : "'" + t.text + "'";
        throw DslError(ErrorCode::Syntax, t.pos, "unexpected " + got, expected);
    }

    bool isPunct(const std::string& p) const { return peek().t == Token::T::Punct && peek().text == p; }
    bool isWord(const std::string& w) const { return peek().t == Token::T::Ident && peek().text == w; }

    void punct(const std::string& p) {
        if (!isPunct(p)) fail({"'" + p + "'"});
        next();
    }
    void word(const std::string& w) {
        if (!isWord(w)) fail({"'" + w + "'"});
        next();
    }
    std::string ident() {
        if (peek().t != Token::T::Ident) fail({"identifier"});
        return next().text;
    }
    long integer() {
        if (peek().t != Token::T::Int) fail({"integer"});
        Token t = next();
        try {
            return std::stol(t.text);
        } catch (const std::out_of_range&) {
            throw DslError(ErrorCode::Lexical, t.pos, "integer out of range");
        }
    }

    Stmt stmt() {
        Stmt s;
        s.pos = peek().pos;
        if (isWord("block")) {
            next();
            s.kind = Stmt::Kind::Block;
            s.name = ident();
            punct("{");
            while (!isPunct("}")) {
                Entry e;
                e.pos = peek().pos;
                if (peek().t != Token::T::Ident ||
                    std::find(kKeys.begin(), kKeys.end(), peek().text) == kKeys.end()) {
                    std::vector<std::string> exp(kKeys.begin(), kKeys.end());
                    exp.push_back("'}'");
                    fail(exp);
                }
                e.key = next().text;
                for (auto& o : s.entries)
                    if (o.key == e.key) throw DslError(ErrorCode::Syntax, e.pos, "duplicate key " + e.key);
                punct("=");
                e.value = value(e.key);
                punct(";");
                s.entries.push_back(std::move(e));
            }
            punct("}");
        } else if (isWord("let")) {
            next();
            s.kind = Stmt::Kind::Let;
            s.name = ident();
            punct("=");
            s.expr = expr();
            punct(";");
        } else if (isWord("check") || isWord("report")) {
            s.kind = next().text == "check" ? Stmt::Kind::Check : Stmt::Kind::Report;
            s.name = ident();
            punct(";");
        } else if (isWord("compare")) {
            next();
            s.kind = Stmt::Kind::Compare;
            s.name = ident();
            s.other = ident();
            word("mode");
            if (!isWord("graded") && !isWord("lambda") && !isWord("latticed")) fail({"graded", "lambda", "latticed"});
            s.mode = parseMode(next().text);
            punct(";");
        } else {
            fail(kStmtStarts);
        }
        return s;
    }

    Expr expr() {
        Expr e;
        e.pos = peek().pos;
        std::string head = ident();
        if (!isPunct("(")) {
            e.kind = Expr::Kind::Ref;
            e.name = head;
            return e;
        }
        if (std::find(kConstructors.begin(), kConstructors.end(), head) == kConstructors.end())
            throw DslError(ErrorCode::Syntax, e.pos, "unknown constructor " + head, kConstructors);
        next();
        if (head == "sum") {
            e.kind = Expr::Kind::Sum;
            e.args.push_back(expr());
            punct(",");
            e.args.push_back(expr());
            while (isPunct(",")) {
                next();
                e.args.push_back(expr());
            }
        } else if (head == "unitize" || head == "stabilize") {
            e.kind = head == "unitize" ? Expr::Kind::Unitize : Expr::Kind::Stabilize;
            e.args.push_back(expr());
        } else {
            e.kind = Expr::Kind::Extension;
            e.args.push_back(expr());
            punct(",");
            e.args.push_back(expr());
            punct(",");
            word("class");
            punct("=");
            e.name = ident();
        }
        punct(")");
        return e;
    }

    Tuple tuple() {
        Tuple t;
        punct("(");
        if (!isPunct(")")) {
            t.push_back(integer());
            while (isPunct(",")) {
                next();
                t.push_back(integer());
            }
        }
        punct(")");
        return t;
    }

    Value value(const std::string& key) {
        Value v;
        if (key == "kind") {
            v.kind = Value::Kind::Ident;
            v.text = ident();
        } else if (key == "chain") {
            v.kind = Value::Kind::Int;
            v.integer = integer();
        } else if (key == "k0" || key == "k1") {
            v.kind = Value::Kind::Group;
            v.text = group();
        } else if (key == "unit") {
            v.kind = Value::Kind::Tuples;
            if (peek().t == Token::T::Int)
                v.tuples.push_back({integer()});
            else if (isPunct("("))
                v.tuples.push_back(tuple());
            else
                fail({"integer", "'('"});
        } else if (key == "cone") {
            v.kind = Value::Kind::Tuples;
            v.tuples.push_back(tuple());
            while (isPunct(",")) {
                next();
                v.tuples.push_back(tuple());
            }
        } else if (key == "layer") {
            v.kind = Value::Kind::Layer;
            for (;;) {
                LayerComponent c;
                c.offset = tuple();
                if (isWord("periods")) {
                    next();
                    c.periods.push_back(tuple());
                    while (isPunct(",")) {
                        next();
                        c.periods.push_back(tuple());
                    }
                }
                v.layer.push_back(std::move(c));
                if (!isPunct("|")) break;
                next();
            }
        } else {
            v.kind = Value::Kind::Matrix;
            punct("[");
            auto row = [&] {
                Tuple r;
                punct("[");
                if (!isPunct("]")) {
                    r.push_back(integer());
                    while (isPunct(",")) {
                        next();
                        r.push_back(integer());
                    }
                }
                punct("]");
                return r;
            };
            if (!isPunct("]")) {
                v.tuples.push_back(row());
                while (isPunct(",")) {
                    next();
                    v.tuples.push_back(row());
                }
            }
            punct("]");
        }
        return v;
    }

    std::string group() {
        if (peek().t == Token::T::Int) {
            if (peek().text != "0") fail({"'0'", "'Z'"});
            next();
            return "0";
        }
        std::string out;
        for (;;) {
            if (!isWord("Z")) fail({"'Z'"});
            next();
            std::string term = "Z";
            if (isPunct("^") || isPunct("/")) {
                std::string op = next().text;
                long k = integer();
                if (k < 0 || (op == "/" && k < 1)) throw DslError(ErrorCode::Syntax, peek().pos, "bad group exponent or order");
                term += op + std::to_string(k);
            }
            out += (out.empty() ? "" : " + ") + term;
            if (!isPunct("+")) break;
            next();
        }
        return out;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::string tupleText(const Tuple& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ", " : "") + std::to_string(t[i]);
    return s + ")";
}

std::string valueText(const std::string& key, const Value& v) {
    switch (v.kind) {
        case Value::Kind::Ident:
        case Value::Kind::Group: return v.text;
        case Value::Kind::Int: return std::to_string(v.integer);
        case Value::Kind::Tuples: {
            if (key == "unit" && v.tuples.size() == 1 && v.tuples[0].size() == 1) return std::to_string(v.tuples[0][0]);
            std::string s;
            for (std::size_t i = 0; i < v.tuples.size(); ++i) s += (i ? ", " : "") + tupleText(v.tuples[i]);
            return s;
        }
        case Value::Kind::Layer: {
            std::string s;
            for (std::size_t i = 0; i < v.layer.size(); ++i) {
                s += (i ? " | " : "") + tupleText(v.layer[i].offset);
                for (std::size_t j = 0; j < v.layer[i].periods.size(); ++j)
                    s += (j ? ", " : " periods ") + tupleText(v.layer[i].periods[j]);
            }
            return s;
        }
        case Value::Kind::Matrix: {
            std::string s = "[";
            for (std::size_t i = 0; i < v.tuples.size(); ++i) {
                s += i ? ", [" : "[";
                for (std::size_t j = 0; j < v.tuples[i].size(); ++j) s += (j ? ", " : "") + std::to_string(v.tuples[i][j]);
                s += "]";
            }
            return s + "]";
        }
    }
    return "";
}

}  // namespace

Program parse(const std::string& text) { return Parser(text).program(); }

std::string serialize(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Ref: return e.name;
        case Expr::Kind::Unitize: return "unitize(" + serialize(e.args[0]) + ")";
        case Expr::Kind::Stabilize: return "stabilize(" + serialize(e.args[0]) + ")";
        case Expr::Kind::Extension:
            return "extension(" + serialize(e.args[0]) + ", " + serialize(e.args[1]) + ", class = " + e.name + ")";
        case Expr::Kind::Sum: {
            std::string s = "sum(";
            for (std::size_t i = 0; i < e.args.size(); ++i) s += (i ? ", " : "") + serialize(e.args[i]);
            return s + ")";
        }
    }
    return "";
}

std::string serialize(const Program& p) {
    std::ostringstream os;
    for (auto& s : p.stmts) {
        switch (s.kind) {
            case Stmt::Kind::Block:
                os << "block " << s.name << " {";
                for (auto& e : s.entries) os << " " << e.key << " = " << valueText(e.key, e.value) << ";";
                os << " }\n";
                break;
            case Stmt::Kind::Let: os << "let " << s.name << " = " << serialize(s.expr) << ";\n"; break;
            case Stmt::Kind::Check: os << "check " << s.name << ";\n"; break;
            case Stmt::Kind::Report: os << "report " << s.name << ";\n"; break;
            case Stmt::Kind::Compare:
                os << "compare " << s.name << " " << s.other << " mode " << modeName(s.mode) << ";\n";
                break;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------- evaluation

namespace {

const Entry* entry(const Stmt& s, const std::string& key) {
    for (auto& e : s.entries)
        if (e.key == key) return &e;
    return nullptr;
}

std::string blockKind(const Stmt& s) {
    auto e = entry(s, "kind");
    return e ? e->value.text : "";
}

// tuple in the written coordinates of g, moved to canonical coordinates
Vec canonicalTuple(const FgAbGroup& g, const Tuple& t, Pos pos) {
    if (t.size() != g.fromCanon.rows)
        throw DslError(ErrorCode::Type, pos,
                       "tuple " + tupleText(t) + " has " + std::to_string(t.size()) + " entries, the group has " +
                           std::to_string(g.fromCanon.rows) + " summands");
    Vec v(t.begin(), t.end());
    return g.normalize(g.toCanon * v);
}

FgAbGroup groupOf(const Stmt& s, const std::string& key) {
    auto e = entry(s, key);
    return parseGroup(e ? e->value.text : "0");
}

}  // namespace

Evaluator::Evaluator(Program p, CoefficientSet N) : prog_(std::move(p)), N_(std::move(N)) {
    std::set<std::string> seen;
    for (auto& s : prog_.stmts) {
        if (s.kind != Stmt::Kind::Block && s.kind != Stmt::Kind::Let) continue;
        if (!seen.insert(s.name).second) throw DslError(ErrorCode::Reference, s.pos, "duplicate definition of " + s.name);
    }
}

const Stmt* Evaluator::find(const std::string& name) const {
    for (auto& s : prog_.stmts)
        if ((s.kind == Stmt::Kind::Block || s.kind == Stmt::Kind::Let) && s.name == name) return &s;
    return nullptr;
}

bool Evaluator::defines(const std::string& name) const {
    auto s = find(name);
    return s && !(s->kind == Stmt::Kind::Block && blockKind(*s) == "extclass");
}

std::vector<std::string> Evaluator::names() const {
    std::vector<std::string> out;
    for (auto& s : prog_.stmts)
        if ((s.kind == Stmt::Kind::Block || s.kind == Stmt::Kind::Let) && defines(s.name)) out.push_back(s.name);
    return out;
}

const Evaluated& Evaluator::get(const std::string& name) {
    auto it = done_.find(name);
    if (it != done_.end()) return it->second;
    const Stmt* s = find(name);
    if (!s) throw DslError(ErrorCode::Reference, Pos{}, "undefined name " + name);
    if (std::find(active_.begin(), active_.end(), name) != active_.end())
        throw DslError(ErrorCode::Reference, s->pos, "cyclic reference through " + name);
    if (s->kind == Stmt::Kind::Block && blockKind(*s) == "extclass")
        throw DslError(ErrorCode::Type, s->pos, name + " is an extension class, not an algebra");
    active_.push_back(name);
    Evaluated v = s->kind == Stmt::Kind::Block ? buildBlockStmt(*s) : evalExpr(s->expr, name);
    active_.pop_back();
    return done_.emplace(name, std::move(v)).first->second;
}

Evaluated Evaluator::buildBlockStmt(const Stmt& s) {
    auto k = entry(s, "kind");
    if (!k) throw DslError(ErrorCode::Type, s.pos, "block " + s.name + " has no kind");
    try {
        BlockSpec spec;
        spec.kind = parseKind(k->value.text);
        spec.name = s.name;
        spec.N = N_;
        spec.k0 = groupOf(s, "k0");
        spec.k1 = groupOf(s, "k1");
        for (auto& key : {"iota0", "pi0", "iota1", "pi1"})
            if (entry(s, key)) throw DslError(ErrorCode::Type, entry(s, key)->pos, std::string(key) + " belongs to extension classes");
        if (auto u = entry(s, "unit")) spec.unit = canonicalTuple(spec.k0, u->value.tuples[0], u->pos);
        if (auto c = entry(s, "cone"))
            for (auto& t : c->value.tuples) spec.coneGens.push_back(canonicalTuple(spec.k0, t, c->pos));
        if (auto c = entry(s, "chain")) {
            if (c->value.integer < 1) throw DslError(ErrorCode::Type, c->pos, "chain needs a positive length");
            spec.chain = std::size_t(c->value.integer);
        }
        Evaluated out;
        out.module = buildBlock(spec);
        if (auto l = entry(s, "layer")) {
            auto& X = out.module;
            std::size_t T = X.lattice.top;
            SemilinearSet layer(X.K0(T));
            for (auto& c : l->value.layer) {
                std::vector<Vec> ps;
                for (auto& p : c.periods) ps.push_back(canonicalTuple(spec.k0, p, l->pos));
                layer.add(canonicalTuple(spec.k0, c.offset, l->pos), ps);
            }
            X.layers[T] = layer;
            X.presets.push_back("explicit layer for " + s.name);
            auto r = validateLatticedKModule(X);
            if (auto f = r.firstFailure()) throw DslError(ErrorCode::Type, l->pos, "layer of " + s.name + ": " + f->name);
        }
        return out;
    } catch (const DslError&) {
        throw;
    } catch (const std::exception& e) {
        throw DslError(ErrorCode::Type, s.pos, e.what());
    }
}

Evaluated Evaluator::evalExpr(const Expr& e, const std::string& topName) {
    if (e.kind == Expr::Kind::Ref) {
        if (!find(e.name)) throw DslError(ErrorCode::Reference, e.pos, "undefined name " + e.name);
        return get(e.name);
    }
    std::vector<Evaluated> args;
    for (auto& a : e.args) args.push_back(evalExpr(a, ""));
    try {
        Evaluated out;
        switch (e.kind) {
            case Expr::Kind::Sum:
                out.module = args[0].module;
                for (std::size_t i = 1; i < args.size(); ++i) out.module = directSum(out.module, args[i].module);
                break;
            case Expr::Kind::Unitize: out.module = unitize(args[0].module, topName.empty() ? "U" : topName); break;
            case Expr::Kind::Stabilize: out.module = stabilize(args[0].module); break;
            case Expr::Kind::Extension: {
                std::optional<ExtensionClass> cls;
                std::optional<SemilinearSet> layer;
                const Stmt* c = nullptr;
                if (e.name != "split") {
                    c = find(e.name);
                    if (!c) throw DslError(ErrorCode::Reference, e.pos, "undefined extension class " + e.name);
                    if (c->kind != Stmt::Kind::Block || blockKind(*c) != "extclass")
                        throw DslError(ErrorCode::Type, e.pos, e.name + " is not an extension class");
                }
                const auto& B = args[0].module;
                const auto& A = args[1].module;
                FgAbGroup written;
                if (c && entry(*c, "k0")) {
                    ExtensionClass x;
                    written = groupOf(*c, "k0");
                    FgAbGroup w1 = groupOf(*c, "k1");
                    x.k0 = canonicalGroup(written.rank, written.torsion);
                    x.k1 = canonicalGroup(w1.rank, w1.torsion);
                    const auto& FB = B.fibers[B.lattice.top];
                    const auto& FA = A.fibers[A.lattice.top];
                    // iota: written rows, pi: written columns
                    auto mat = [&](const char* key, const FgAbGroup& src, const FgAbGroup& dst, const FgAbGroup* wsrc,
                                   const FgAbGroup* wdst) {
                        auto en = entry(*c, key);
                        std::size_t rows = wdst ? wdst->fromCanon.rows : dst.ngens();
                        std::size_t cols = wsrc ? wsrc->fromCanon.rows : src.ngens();
                        IntegerMatrix m(rows, cols);
                        if (en) {
                            const auto& rs = en->value.tuples;
                            if (rs.size() != rows) throw DslError(ErrorCode::Type, en->pos, std::string(key) + " needs " + std::to_string(rows) + " rows");
                            for (std::size_t i = 0; i < rows; ++i) {
                                if (rs[i].size() != cols)
                                    throw DslError(ErrorCode::Type, en->pos, std::string(key) + " needs " + std::to_string(cols) + " columns");
                                for (std::size_t j = 0; j < cols; ++j) m(i, j) = rs[i][j];
                            }
                        }
                        if (wdst) m = wdst->toCanon * m;
                        if (wsrc) m = m * wsrc->fromCanon;
                        return AbHom(src, dst, m);
                    };
                    x.iota0 = mat("iota0", FB.G(0), x.k0, nullptr, &written);
                    x.pi0 = mat("pi0", x.k0, FA.G(0), &written, nullptr);
                    x.iota1 = mat("iota1", FB.G(1), x.k1, nullptr, &w1);
                    x.pi1 = mat("pi1", x.k1, FA.G(1), &w1, nullptr);
                    cls = x;
                }
                if (c) {
                    if (auto l = entry(*c, "layer")) {
                        FgAbGroup top = cls ? cls->k0 : lambdaDirectSum(B.fibers[B.lattice.top], A.fibers[A.lattice.top]).sum.G(0);
                        FgAbGroup coords = cls ? written : top;
                        SemilinearSet s(top);
                        for (auto& comp : l->value.layer) {
                            std::vector<Vec> ps;
                            for (auto& p : comp.periods) ps.push_back(canonicalTuple(coords, p, l->pos));
                            s.add(canonicalTuple(coords, comp.offset, l->pos), ps);
                        }
                        layer = s;
                    }
                }
                auto ext = buildExtension(B, A, cls, topName.empty() ? "E" : topName, layer);
                if (layer) ext.E.presets.push_back("explicit layer for class " + e.name);
                out.module = ext.E;
                out.extension = std::move(ext);
                break;
            }
            default: break;
        }
        return out;
    } catch (const DslError&) {
        throw;
    } catch (const std::exception& ex) {
        throw DslError(ErrorCode::Type, e.pos, ex.what());
    }
}

}  // namespace lkt::dsl

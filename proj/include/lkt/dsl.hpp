// The .lkt input language: block definitions, let-bound constructions and directives.
//
//   file      := stmt*
//   stmt      := block | let | directive
//   block     := "block" IDENT "{" (key "=" value ";")* "}"
//   let       := "let" IDENT "=" expr ";"
//   expr      := IDENT | "sum" "(" expr ("," expr)+ ")" | "unitize" "(" expr ")"
//              | "stabilize" "(" expr ")" | "extension" "(" expr "," expr "," "class" "=" IDENT ")"
//   directive := "check" IDENT ";" | "compare" IDENT IDENT "mode" MODE ";" | "report" IDENT ";"
//
// Block keys: kind, k0, k1 (groups such as Z^2 + Z/3, or 0), unit (integer or tuple), cone
// (tuples), chain (integer), layer (tuple [periods tuples] separated by |), and for kind
// extclass the matrices iota0, pi0, iota1, pi1 written as [[..],[..]]. Comments start with #.
// Tuples and matrices use the coordinates of the groups as written in the block; a layer on an
// extension class without k0 (split class) uses canonical coordinates of the top group.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lkt/catalog.hpp"

namespace lkt::dsl {

enum class ErrorCode { Lexical, Syntax, Reference, Type };
const char* codeName(ErrorCode c);

struct Pos {
    int line = 1, col = 1;
    bool operator==(const Pos&) const = default;
};

struct DslError : std::runtime_error {
    ErrorCode code;
    Pos pos;
    std::vector<std::string> expected;
    DslError(ErrorCode c, Pos p, const std::string& msg, std::vector<std::string> exp = {});
};

using Tuple = std::vector<long>;

struct LayerComponent {
    Tuple offset;
    std::vector<Tuple> periods;
    bool operator==(const LayerComponent&) const = default;
};

struct Value {
    enum class Kind { Ident, Int, Group, Tuples, Layer, Matrix } kind = Kind::Ident;
    std::string text;  // Ident: the name; Group: normalized group syntax
    long integer = 0;
    std::vector<Tuple> tuples;  // Tuples, and Matrix rows
    std::vector<LayerComponent> layer;
    bool operator==(const Value& o) const {
        return kind == o.kind && text == o.text && integer == o.integer && tuples == o.tuples && layer == o.layer;
    }
};

struct Entry {
    std::string key;
    Value value;
    Pos pos;
    bool operator==(const Entry& o) const { return key == o.key && value == o.value; }
};

struct Expr {
    enum class Kind { Ref, Sum, Unitize, Stabilize, Extension } kind = Kind::Ref;
    std::string name;  // Ref: referenced name; Extension: class name or "split"
    std::vector<Expr> args;
    Pos pos;
    bool operator==(const Expr& o) const { return kind == o.kind && name == o.name && args == o.args; }
};

struct Stmt {
    enum class Kind { Block, Let, Check, Compare, Report } kind = Kind::Block;
    std::string name, other;  // Compare: name vs other
    std::vector<Entry> entries;
    Expr expr;
    CompareMode mode = CompareMode::Latticed;
    Pos pos;
    bool operator==(const Stmt& o) const {
        return kind == o.kind && name == o.name && other == o.other && entries == o.entries && expr == o.expr &&
               mode == o.mode;
    }
};

struct Program {
    std::vector<Stmt> stmts;
    bool operator==(const Program& o) const { return stmts == o.stmts; }
};

Program parse(const std::string& text);
std::string serialize(const Program& p);
std::string serialize(const Expr& e);

struct Evaluated {
    LatticedKModule module;
    std::optional<BuiltExtension> extension;  // kept for the canonical morphisms
};

// Builds named values on demand. References may point forward; cycles are reference errors.
class Evaluator {
public:
    Evaluator(Program p, CoefficientSet N);
    bool defines(const std::string& name) const;
    // algebra-valued names (blocks other than extension classes, and lets) in file order
    std::vector<std::string> names() const;
    const Evaluated& get(const std::string& name);
    const Program& program() const { return prog_; }

private:
    const Stmt* find(const std::string& name) const;
    Evaluated evalExpr(const Expr& e, const std::string& topName);
    Evaluated buildBlockStmt(const Stmt& s);
    Program prog_;
    CoefficientSet N_;
    std::map<std::string, Evaluated> done_;
    std::vector<std::string> active_;
};

}  // namespace lkt::dsl

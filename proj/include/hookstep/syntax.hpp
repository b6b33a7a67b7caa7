#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace hookstep {

struct SourcePos {
    int line = 1;
    int column = 1;
};

/// Identifies one `useState` occurrence. Unique across a whole program.
struct Label {
    std::uint32_t id = 0;
    auto operator<=>(const Label&) const = default;
};

enum class BinOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

std::string_view to_string(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

namespace ast {

struct Unit {};
struct Bool {
    bool value;
};
struct Int {
    std::int64_t value;
};
/// Strings only feed the console; they are not part of the view grammar.
struct Str {
    std::string value;
};
struct Var {
    std::string name;
};
struct Component {
    std::string name;
};
struct Binary {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct If {
    ExprPtr cond;
    ExprPtr then_branch;
    ExprPtr else_branch;
};
struct Fun {
    std::string param;
    ExprPtr body;
};
struct App {
    ExprPtr fn;
    ExprPtr arg;
};
struct Seq {
    ExprPtr first;
    ExprPtr second;
};
struct Let {
    std::string name;
    ExprPtr bound;
    ExprPtr body;
};
struct Array {
    std::vector<ExprPtr> items;
};
/// `let (value, setter) = useState init in body`
struct UseState {
    std::string value_name;
    std::string setter_name;
    Label label;
    ExprPtr init;
    ExprPtr body;
};
struct UseEffect {
    ExprPtr body;
};
struct Print {
    ExprPtr arg;
};

}  // namespace ast

struct Expr {
    using Node = std::variant<ast::Unit, ast::Bool, ast::Int, ast::Str, ast::Var, ast::Component,
                              ast::Binary, ast::If, ast::Fun, ast::App, ast::Seq, ast::Let,
                              ast::Array, ast::UseState, ast::UseEffect, ast::Print>;
    Node node;
    SourcePos pos;
};

template <typename T>
ExprPtr make_expr(T node, SourcePos pos = {}) {
    return std::make_shared<const Expr>(Expr{Expr::Node{std::move(node)}, pos});
}

struct ComponentDef {
    std::string name;
    std::string param;
    ExprPtr body;
    SourcePos pos;
};

struct Program {
    std::vector<ComponentDef> defs;
    ExprPtr main;
};

using DefinitionTable = std::map<std::string, ComponentDef, std::less<>>;

enum class SyntaxErrorKind { Syntax, HookPlacement, DuplicateComponent };

std::string_view to_string(SyntaxErrorKind kind);

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(SyntaxErrorKind kind, SourcePos pos, const std::string& message);

    SyntaxErrorKind kind() const { return kind_; }
    SourcePos pos() const { return pos_; }

private:
    SyntaxErrorKind kind_;
    SourcePos pos_;
};

/// Parses a whole `.rtr` source: `let C x = e;;` definitions followed by the
/// main expression. `button e` desugars to `e`, `if c then e` gets a unit else
/// branch, and every `useState` gets the next label in pre-order.
Program parse_program(std::string_view source);

std::pair<DefinitionTable, ExprPtr> build_def_table(const Program& program);

/// Source text that re-parses to the same tree (labels included).
std::string print_expr(const Expr& expr);
std::string print_program(const Program& program);

/// Labels of every `useState` in `expr`, pre-order, duplicates kept.
std::vector<Label> labels_of(const Expr& expr);
std::vector<Label> labels_of(const Program& program);

/// Structural equality ignoring source positions.
bool same_tree(const Expr& a, const Expr& b);
bool same_program(const Program& a, const Program& b);

}  // namespace hookstep

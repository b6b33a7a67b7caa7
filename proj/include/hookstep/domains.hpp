#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hookstep/syntax.hpp"

namespace hookstep {

struct Path {
    std::uint64_t id = 0;
    auto operator<=>(const Path&) const = default;
};

struct UnitValue {
    bool operator==(const UnitValue&) const = default;
};

using Constant = std::variant<UnitValue, bool, std::int64_t, std::string>;

struct Value;
struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;

/// `id` is the allocation identity; two evaluations of the same `fun`
/// produce closures with different ids.
struct Closure {
    std::string param;
    ExprPtr body;
    Env env;
    std::uint64_t id = 0;
};

struct Setter {
    Label label;
    Path path;
};

struct ComponentRef {
    std::string name;
};

struct ComSpec {
    std::string name;
    std::shared_ptr<const Value> arg;
};

struct SpecArray {
    std::vector<Value> items;
};

struct Value {
    using Node = std::variant<Constant, Closure, Setter, ComponentRef, ComSpec, SpecArray>;
    Node node;

    static Value unit() { return Value{Constant{UnitValue{}}}; }
    static Value boolean(bool b) { return Value{Constant{b}}; }
    static Value integer(std::int64_t n) { return Value{Constant{n}}; }
    static Value string(std::string s) { return Value{Constant{std::move(s)}}; }
};

struct EnvNode {
    std::string name;
    Value value;
    Env next;
};

Env env_bind(Env env, std::string name, Value value);
const Value* env_lookup(const Env& env, std::string_view name);

/// Constants compare structurally, closures by allocation id, setters by
/// (label, path); compound specs componentwise.
bool value_equiv(const Value& a, const Value& b);

/// Constants, closures, component specs and arrays of view specs.
bool is_view_spec(const Value& v);

/// Console rendering used by `print`.
std::string display(const Value& v);

enum class Phase { Init, Succ, Normal };
enum class Mode { Rendered, Check, EventLoop };
enum class Decision { Check, Effect };

std::string_view to_string(Phase p);
std::string_view to_string(Mode m);
std::string_view to_string(Decision d);
std::optional<Mode> mode_from_string(std::string_view s);

struct DecisionSet {
    bool check = false;
    bool effect = false;

    bool operator==(const DecisionSet&) const = default;
};

/// "{}", "{Check}", "{Effect}" or "{Check, Effect}".
std::string to_string(DecisionSet d);

struct Tree {
    using Node = std::variant<Constant, Closure, Path, std::vector<Tree>>;
    Node node;

    static Tree unit() { return Tree{Constant{UnitValue{}}}; }
};

struct StateEntry {
    Value value;
    std::vector<Closure> queue;
};

struct View {
    ComSpec spec;
    DecisionSet dec;
    std::map<Label, StateEntry> store;
    std::vector<Closure> effects;
    Tree child = Tree::unit();
};

using TreeMemory = std::map<Path, View>;

std::pair<Path, std::uint64_t> fresh_path(std::uint64_t counter);

struct Budgets {
    // Body passes per retrying evaluation.
    std::uint64_t retry_limit = 25;
    // Consecutive re-renders before the run is declared divergent.
    std::uint64_t rerender_limit = 100;

    bool operator==(const Budgets&) const = default;
};

bool constant_equal(const Constant& a, const Constant& b);

}  // namespace hookstep

#include "hookstep/domains.hpp"

namespace hookstep {

Env env_bind(Env env, std::string name, Value value) {
    return std::make_shared<const EnvNode>(EnvNode{std::move(name), std::move(value), std::move(env)});
}

const Value* env_lookup(const Env& env, std::string_view name) {
    for (const EnvNode* n = env.get(); n != nullptr; n = n->next.get()) {
        if (n->name == name) return &n->value;
    }
    return nullptr;
}

bool constant_equal(const Constant& a, const Constant& b) { return a == b; }

bool value_equiv(const Value& a, const Value& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Constant>) {
                return x == y;
            } else if constexpr (std::is_same_v<T, Closure>) {
                return x.id == y.id;
            } else if constexpr (std::is_same_v<T, Setter>) {
                return x.label == y.label && x.path == y.path;
            } else if constexpr (std::is_same_v<T, ComponentRef>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, ComSpec>) {
                return x.name == y.name && value_equiv(*x.arg, *y.arg);
            } else {
                if (x.items.size() != y.items.size()) return false;
                for (std::size_t i = 0; i < x.items.size(); ++i) {
                    if (!value_equiv(x.items[i], y.items[i])) return false;
                }
                return true;
            }
        },
        a.node);
}

bool is_view_spec(const Value& v) {
    return std::visit(
        [](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Constant> || std::is_same_v<T, Closure> ||
                          std::is_same_v<T, ComSpec>) {
                return true;
            } else if constexpr (std::is_same_v<T, SpecArray>) {
                for (const auto& item : x.items) {
                    if (!is_view_spec(item)) return false;
                }
                return true;
            } else {
                return false;
            }
        },
        v.node);
}

namespace {

std::string display_constant(const Constant& c) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UnitValue>) {
                return "()";
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(x);
            } else {
                return x;
            }
        },
        c);
}

}  // namespace

std::string display(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return display_constant(x);
            } else if constexpr (std::is_same_v<T, Closure> || std::is_same_v<T, Setter>) {
                return "<fun>";
            } else if constexpr (std::is_same_v<T, ComponentRef>) {
                return x.name;
            } else if constexpr (std::is_same_v<T, ComSpec>) {
                return "<" + x.name + " " + display(*x.arg) + ">";
            } else {
                std::string out = "[";
                for (std::size_t i = 0; i < x.items.size(); ++i) {
                    if (i) out += ", ";
                    out += display(x.items[i]);
                }
                return out + "]";
            }
        },
        v.node);
}

std::string_view to_string(Phase p) {
    switch (p) {
    case Phase::Init: return "Init";
    case Phase::Succ: return "Succ";
    case Phase::Normal: return "Normal";
    }
    return "?";
}

std::string_view to_string(Mode m) {
    switch (m) {
    case Mode::Rendered: return "Rendered";
    case Mode::Check: return "Check";
    case Mode::EventLoop: return "EventLoop";
    }
    return "?";
}

std::string_view to_string(Decision d) { return d == Decision::Check ? "Check" : "Effect"; }

std::optional<Mode> mode_from_string(std::string_view s) {
    if (s == "Rendered") return Mode::Rendered;
    if (s == "Check") return Mode::Check;
    if (s == "EventLoop") return Mode::EventLoop;
    return std::nullopt;
}

std::string to_string(DecisionSet d) {
    if (d.check && d.effect) return "{Check, Effect}";
    if (d.check) return "{Check}";
    if (d.effect) return "{Effect}";
    return "{}";
}

std::pair<Path, std::uint64_t> fresh_path(std::uint64_t counter) { return {Path{counter}, counter + 1}; }

}  // namespace hookstep

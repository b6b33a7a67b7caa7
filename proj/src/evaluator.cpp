#include "hookstep/evaluator.hpp"

namespace hookstep {

namespace {

std::string kind_name(const Value& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Constant>) {
                switch (x.index()) {
                case 0: return "unit";
                case 1: return "bool";
                case 2: return "int";
                default: return "string";
                }
            } else if constexpr (std::is_same_v<T, Closure>) {
                return "closure";
            } else if constexpr (std::is_same_v<T, Setter>) {
                return "setter";
            } else if constexpr (std::is_same_v<T, ComponentRef>) {
                return "component";
            } else if constexpr (std::is_same_v<T, ComSpec>) {
                return "component spec";
            } else {
                return "array";
            }
        },
        v.node);
}

[[noreturn]] void mismatch(const std::string& what) { throw EngineError(ErrorKind::TypeMismatch, what); }

const Constant* as_constant(const Value& v) { return std::get_if<Constant>(&v.node); }

std::int64_t as_int(const Value& v, BinOp op) {
    if (const Constant* c = as_constant(v)) {
        if (const auto* n = std::get_if<std::int64_t>(c)) return *n;
    }
    mismatch(std::string("operator ") + std::string(to_string(op)) + " expects int, got " + kind_name(v));
}

bool as_bool(const Value& v, std::string_view where) {
    if (const Constant* c = as_constant(v)) {
        if (const auto* b = std::get_if<bool>(c)) return *b;
    }
    mismatch(std::string(where) + " expects bool, got " + kind_name(v));
}

Value arith(BinOp op, std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
    case BinOp::Add: overflow = __builtin_add_overflow(a, b, &r); break;
    case BinOp::Sub: overflow = __builtin_sub_overflow(a, b, &r); break;
    case BinOp::Mul: overflow = __builtin_mul_overflow(a, b, &r); break;
    case BinOp::Div:
    case BinOp::Mod:
        if (b == 0) mismatch("division by zero");
        if (a == INT64_MIN && b == -1) {
            overflow = true;
            break;
        }
        r = op == BinOp::Div ? a / b : a % b;
        break;
    default: break;
    }
    if (overflow) mismatch("integer overflow in " + std::string(to_string(op)));
    return Value::integer(r);
}

Value binary(BinOp op, const Value& lhs, const Value& rhs) {
    switch (op) {
    case BinOp::Add:
    case BinOp::Sub:
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod: return arith(op, as_int(lhs, op), as_int(rhs, op));
    case BinOp::Lt: return Value::boolean(as_int(lhs, op) < as_int(rhs, op));
    case BinOp::Le: return Value::boolean(as_int(lhs, op) <= as_int(rhs, op));
    case BinOp::Gt: return Value::boolean(as_int(lhs, op) > as_int(rhs, op));
    case BinOp::Ge: return Value::boolean(as_int(lhs, op) >= as_int(rhs, op));
    case BinOp::And: return Value::boolean(as_bool(lhs, "&&") && as_bool(rhs, "&&"));
    case BinOp::Or: return Value::boolean(as_bool(lhs, "||") || as_bool(rhs, "||"));
    case BinOp::Eq:
    case BinOp::Ne: {
        const Constant* a = as_constant(lhs);
        const Constant* b = as_constant(rhs);
        if (!a || !b || a->index() != b->index()) {
            mismatch(std::string("operator ") + std::string(to_string(op)) + " cannot compare " +
                     kind_name(lhs) + " with " + kind_name(rhs));
        }
        bool eq = *a == *b;
        return Value::boolean(op == BinOp::Eq ? eq : !eq);
    }
    }
    mismatch("unknown operator");
}

class Evaluator {
public:
    Evaluator(Machine& m, EvalContext& ctx) : m_(m), ctx_(ctx) {}

    Value eval(const Env& env, const Expr& e) {
        return std::visit([&](const auto& n) { return node(env, e, n); }, e.node);
    }

private:
    Closure make_closure(std::string param, ExprPtr body, Env env) {
        return Closure{std::move(param), std::move(body), std::move(env), m_.counters.next_closure++};
    }

    void emit(RuleTag tag, std::optional<Label> label = std::nullopt, std::string detail = {},
              std::optional<Path> path = std::nullopt) {
        m_.sink.rule(RuleFired{tag, path ? path : ctx_.path, label, std::move(detail)});
    }

    View& local_view(std::string_view hook) {
        if (ctx_.phase == Phase::Normal || ctx_.view == nullptr) {
            throw EngineError(ErrorKind::HookInNormalPhase,
                              std::string(hook) + " evaluated outside a component body");
        }
        return *ctx_.view;
    }

    Value node(const Env&, const Expr&, const ast::Unit&) { return Value::unit(); }
    Value node(const Env&, const Expr&, const ast::Bool& n) { return Value::boolean(n.value); }
    Value node(const Env&, const Expr&, const ast::Int& n) { return Value::integer(n.value); }
    Value node(const Env&, const Expr&, const ast::Str& n) { return Value::string(n.value); }

    Value node(const Env& env, const Expr&, const ast::Var& n) {
        if (const Value* v = env_lookup(env, n.name)) return *v;
        throw EngineError(ErrorKind::UnboundVariable, n.name);
    }

    Value node(const Env&, const Expr&, const ast::Component& n) { return Value{ComponentRef{n.name}}; }

    Value node(const Env& env, const Expr&, const ast::Binary& n) {
        Value lhs = eval(env, *n.lhs);
        Value rhs = eval(env, *n.rhs);
        return binary(n.op, lhs, rhs);
    }

    Value node(const Env& env, const Expr&, const ast::If& n) {
        bool c = as_bool(eval(env, *n.cond), "if");
        return eval(env, c ? *n.then_branch : *n.else_branch);
    }

    Value node(const Env& env, const Expr&, const ast::Fun& n) {
        return Value{make_closure(n.param, n.body, env)};
    }

    Value node(const Env& env, const Expr&, const ast::App& n) {
        Value fn = eval(env, *n.fn);
        Value arg = eval(env, *n.arg);
        if (const auto* c = std::get_if<ComponentRef>(&fn.node)) {
            emit(RuleTag::AppCom, std::nullopt, c->name);
            return Value{ComSpec{c->name, std::make_shared<const Value>(std::move(arg))}};
        }
        if (const auto* s = std::get_if<Setter>(&fn.node)) {
            const auto* update = std::get_if<Closure>(&arg.node);
            if (!update) mismatch("setter expects an updater function, got " + kind_name(arg));
            set_state(*s, *update);
            return Value::unit();
        }
        if (const auto* c = std::get_if<Closure>(&fn.node)) {
            return eval(env_bind(c->env, c->param, std::move(arg)), *c->body);
        }
        mismatch("cannot apply " + kind_name(fn));
    }

    void set_state(const Setter& s, const Closure& update) {
        if (ctx_.phase == Phase::Normal) {
            if (!ctx_.memory) mismatch("setter call without a tree memory");
            auto it = ctx_.memory->find(s.path);
            if (it == ctx_.memory->end()) mismatch("setter targets unknown path " + std::to_string(s.path.id));
            auto entry = it->second.store.find(s.label);
            if (entry == it->second.store.end()) mismatch("setter targets unknown state");
            entry->second.queue.push_back(update);
            it->second.dec.check = true;
            emit(RuleTag::AppSetNormal, s.label, "", s.path);
            return;
        }
        if (!ctx_.path || s.path != *ctx_.path) {
            throw EngineError(ErrorKind::CrossComponentSetDuringRender,
                              "setter of path " + std::to_string(s.path.id) + " called while rendering",
                              ctx_.path);
        }
        View& view = *ctx_.view;
        auto entry = view.store.find(s.label);
        if (entry == view.store.end()) mismatch("setter targets unknown state");
        entry->second.queue.push_back(update);
        view.dec.check = true;
        emit(RuleTag::AppSetComp, s.label);
    }

    Value node(const Env& env, const Expr&, const ast::Seq& n) {
        eval(env, *n.first);
        return eval(env, *n.second);
    }

    Value node(const Env& env, const Expr&, const ast::Let& n) {
        Value bound = eval(env, *n.bound);
        return eval(env_bind(env, n.name, std::move(bound)), *n.body);
    }

    Value node(const Env& env, const Expr&, const ast::Array& n) {
        SpecArray out;
        out.items.reserve(n.items.size());
        for (const auto& item : n.items) {
            Value v = eval(env, *item);
            if (!is_view_spec(v)) mismatch("array element is not a view spec: " + kind_name(v));
            out.items.push_back(std::move(v));
        }
        return Value{std::move(out)};
    }

    Value node(const Env& env, const Expr&, const ast::UseState& n) {
        View& view = local_view("useState");
        Path path = *ctx_.path;
        Value current;
        if (ctx_.phase == Phase::Init) {
            current = eval(env, *n.init);
            ctx_.view->store[n.label] = StateEntry{current, {}};
            emit(RuleTag::SttBind, n.label, display(current));
        } else {
            auto it = view.store.find(n.label);
            if (it == view.store.end()) mismatch("state store has no entry for this useState");
            Value initial = it->second.value;
            std::vector<Closure> queue = it->second.queue;
            current = initial;
            for (const auto& update : queue) {
                current = eval(env_bind(update.env, update.param, current), *update.body);
            }
            bool changed = !value_equiv(current, initial);
            if (changed) ctx_.view->dec.effect = true;
            ctx_.view->store[n.label] = StateEntry{current, {}};
            emit(RuleTag::SttReBind, n.label,
                 display(initial) + " -> " + display(current) + (changed ? " (changed)" : ""));
        }
        Env inner = env_bind(env, n.value_name, current);
        inner = env_bind(std::move(inner), n.setter_name, Value{Setter{n.label, path}});
        return eval(inner, *n.body);
    }

    Value node(const Env& env, const Expr&, const ast::UseEffect& n) {
        View& view = local_view("useEffect");
        view.effects.push_back(make_closure("_", n.body, env));
        emit(RuleTag::Eff);
        return Value::unit();
    }

    Value node(const Env& env, const Expr&, const ast::Print& n) {
        Value v = eval(env, *n.arg);
        m_.sink.console(display(v));
        return Value::unit();
    }

    Machine& m_;
    EvalContext& ctx_;
};

}  // namespace

Value eval_expr(Machine& m, EvalContext& ctx, const Env& env, const Expr& e) {
    return Evaluator(m, ctx).eval(env, e);
}

BodyResult eval_body_retry(Machine& m, Phase phase, Path path, View view, const Env& env, const Expr& body) {
    std::uint64_t passes = 0;
    for (;;) {
        view.dec.check = false;
        view.effects.clear();
        EvalContext ctx = EvalContext::local(phase, path, view);
        Value v = eval_expr(m, ctx, env, body);
        ++passes;
        if (!view.dec.check) {
            m.sink.rule(RuleFired{RuleTag::EvalOnce, path, std::nullopt, to_string(view.dec)});
            return BodyResult{std::move(v), std::move(view), passes};
        }
        m.sink.rule(RuleFired{RuleTag::EvalMult, path, std::nullopt, to_string(view.dec)});
        if (passes >= m.retry_limit) {
            throw EngineError(ErrorKind::RetryLimitExceeded,
                              "component " + view.spec.name + " kept setting its own state during render (limit " +
                                  std::to_string(m.retry_limit) + ")",
                              path, passes);
        }
        phase = Phase::Succ;
    }
}

Env component_env(const ComponentDef& def, const Value& arg) { return env_bind(nullptr, def.param, arg); }

const ComponentDef& lookup_component(const DefinitionTable& defs, const std::string& name) {
    auto it = defs.find(name);
    if (it == defs.end()) throw EngineError(ErrorKind::UnknownComponent, name);
    return it->second;
}

}  // namespace hookstep

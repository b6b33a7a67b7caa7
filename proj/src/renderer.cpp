#include "hookstep/renderer.hpp"

namespace hookstep {

namespace {

void emit(Machine& m, RuleTag tag, std::optional<Path> path = std::nullopt, std::string detail = {}) {
    m.sink.rule(RuleFired{tag, path, std::nullopt, std::move(detail)});
}

View& view_at(TreeMemory& mem, Path p) {
    auto it = mem.find(p);
    if (it == mem.end()) throw EngineError(ErrorKind::IllegalStep, "dangling path " + std::to_string(p.id));
    return it->second;
}

BodyResult rerun(Machine& m, Path p, const View& view) {
    const ComponentDef& def = lookup_component(m.defs, view.spec.name);
    return eval_body_retry(m, Phase::Succ, p, view, component_env(def, *view.spec.arg), *def.body);
}

}  // namespace

Mode join(Mode a, Mode b) {
    return a == Mode::Rendered || b == Mode::Rendered ? Mode::Rendered : Mode::EventLoop;
}

Tree init(Machine& m, TreeMemory& mem, const Value& spec) {
    return std::visit(
        [&](const auto& s) -> Tree {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Constant>) {
                emit(m, RuleTag::InitConst);
                return Tree{s};
            } else if constexpr (std::is_same_v<T, Closure>) {
                emit(m, RuleTag::InitClos);
                return Tree{s};
            } else if constexpr (std::is_same_v<T, SpecArray>) {
                emit(m, RuleTag::InitArray);
                std::vector<Tree> items;
                items.reserve(s.items.size());
                for (const auto& item : s.items) items.push_back(init(m, mem, item));
                return Tree{std::move(items)};
            } else if constexpr (std::is_same_v<T, ComSpec>) {
                const ComponentDef& def = lookup_component(m.defs, s.name);
                auto [p, next] = fresh_path(m.counters.next_path);
                m.counters.next_path = next;
                emit(m, RuleTag::InitCom, p, s.name);
                View fresh{s, {}, {}, {}, Tree::unit()};
                BodyResult r = eval_body_retry(m, Phase::Init, p, std::move(fresh), component_env(def, *s.arg),
                                               *def.body);
                mem[p] = std::move(r.view);
                Tree child = init(m, mem, r.value);
                View& mounted = view_at(mem, p);
                mounted.dec = DecisionSet{false, true};
                mounted.child = std::move(child);
                return Tree{p};
            } else {
                throw EngineError(ErrorKind::NotAViewSpec, "cannot render " + display(Value{s}));
            }
        },
        spec.node);
}

void commit_effs(Machine& m, TreeMemory& mem, const Tree& tree) {
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, Constant>) {
                emit(m, RuleTag::CommitEffsConst);
            } else if constexpr (std::is_same_v<T, Closure>) {
                emit(m, RuleTag::CommitEffsClos);
            } else if constexpr (std::is_same_v<T, std::vector<Tree>>) {
                emit(m, RuleTag::CommitEffsArray);
                for (const auto& item : t) commit_effs(m, mem, item);
            } else {
                const View& view = view_at(mem, t);
                Tree child = view.child;
                if (!view.dec.effect) {
                    emit(m, RuleTag::CommitEffsPathIdle, t);
                    commit_effs(m, mem, child);
                    return;
                }
                std::vector<Closure> thunks = view.effects;
                emit(m, RuleTag::CommitEffsPath, t, std::to_string(thunks.size()) + " effect(s)");
                commit_effs(m, mem, child);
                for (const auto& thunk : thunks) {
                    EvalContext ctx = EvalContext::normal(mem);
                    eval_expr(m, ctx, thunk.env, *thunk.body);
                }
                View& after = view_at(mem, t);
                after.dec.effect = false;
                // The queue is dead until the next body evaluation rebuilds it;
                // dropping it here keeps snapshots free of stale thunks.
                after.effects.clear();
            }
        },
        tree.node);
}

Mode check(Machine& m, TreeMemory& mem, const Tree& tree) {
    return std::visit(
        [&](const auto& t) -> Mode {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, Constant>) {
                emit(m, RuleTag::CheckConst);
                return Mode::EventLoop;
            } else if constexpr (std::is_same_v<T, Closure>) {
                emit(m, RuleTag::CheckClos);
                return Mode::EventLoop;
            } else if constexpr (std::is_same_v<T, std::vector<Tree>>) {
                emit(m, RuleTag::CheckArray);
                Mode mode = Mode::EventLoop;
                for (const auto& item : t) mode = join(mode, check(m, mem, item));
                return mode;
            } else {
                View view = view_at(mem, t);
                if (!view.dec.check) {
                    emit(m, RuleTag::CheckIdle, t);
                    return check(m, mem, view.child);
                }
                BodyResult r = rerun(m, t, view);
                if (!r.view.dec.effect) {
                    emit(m, RuleTag::CheckNoEffect, t);
                    Mode mode = check(m, mem, view.child);
                    mem[t] = std::move(r.view);
                    return mode;
                }
                emit(m, RuleTag::CheckEffect, t);
                Tree child = reconcile(m, mem, view.child, r.value);
                r.view.child = std::move(child);
                mem[t] = std::move(r.view);
                return Mode::Rendered;
            }
        },
        tree.node);
}

Tree reconcile(Machine& m, TreeMemory& mem, const Tree& tree, const Value& spec) {
    if (const auto* items = std::get_if<std::vector<Tree>>(&tree.node)) {
        const auto* specs = std::get_if<SpecArray>(&spec.node);
        if (specs && specs->items.size() == items->size()) {
            emit(m, RuleTag::ReconcileArray);
            std::vector<Tree> out;
            out.reserve(items->size());
            for (std::size_t i = 0; i < items->size(); ++i) {
                out.push_back(reconcile(m, mem, (*items)[i], specs->items[i]));
            }
            return Tree{std::move(out)};
        }
    }
    if (const auto* p = std::get_if<Path>(&tree.node)) {
        if (const auto* cs = std::get_if<ComSpec>(&spec.node)) {
            View view = view_at(mem, *p);
            if (view.spec.name != cs->name) {
                emit(m, RuleTag::ReconcileComNew, *p, view.spec.name + " -> " + cs->name);
                return init(m, mem, spec);
            }
            emit(m, RuleTag::ReconcileComEffect, *p, cs->name);
            view.spec = *cs;
            BodyResult r = rerun(m, *p, view);
            Tree child = reconcile(m, mem, view.child, r.value);
            r.view.dec = DecisionSet{false, true};
            r.view.child = std::move(child);
            mem[*p] = std::move(r.view);
            return Tree{*p};
        }
    }
    emit(m, RuleTag::ReconcileOther);
    return init(m, mem, spec);
}

namespace {

void collect_handlers(const TreeMemory& mem, const Tree& tree, std::vector<Handler>& out) {
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, Closure>) {
                out.push_back(Handler{out.size(), t});
            } else if constexpr (std::is_same_v<T, std::vector<Tree>>) {
                for (const auto& item : t) collect_handlers(mem, item, out);
            } else if constexpr (std::is_same_v<T, Path>) {
                auto it = mem.find(t);
                if (it != mem.end()) collect_handlers(mem, it->second.child, out);
            }
        },
        tree.node);
}

}  // namespace

std::vector<Handler> handlers(const TreeMemory& mem, const Tree& tree) {
    std::vector<Handler> out;
    collect_handlers(mem, tree, out);
    return out;
}

}  // namespace hookstep

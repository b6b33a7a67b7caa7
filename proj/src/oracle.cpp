#include "hookstep/oracle.hpp"

#include <algorithm>
#include <functional>

namespace hookstep {

// ------------------------------
// purity and normalization
// ------------------------------

bool is_pure_expr(const Expr& e) {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ast::Binary>) {
                return is_pure_expr(*n.lhs) && is_pure_expr(*n.rhs);
            } else if constexpr (std::is_same_v<T, ast::If>) {
                return is_pure_expr(*n.cond) && is_pure_expr(*n.then_branch) && is_pure_expr(*n.else_branch);
            } else if constexpr (std::is_same_v<T, ast::Fun>) {
                return is_pure_expr(*n.body);
            } else if constexpr (std::is_same_v<T, ast::App>) {
                // Only a literal lambda may be applied; anything else could be a setter.
                return std::holds_alternative<ast::Fun>(n.fn->node) && is_pure_expr(*n.fn) && is_pure_expr(*n.arg);
            } else if constexpr (std::is_same_v<T, ast::Seq>) {
                return is_pure_expr(*n.first) && is_pure_expr(*n.second);
            } else if constexpr (std::is_same_v<T, ast::Let>) {
                return is_pure_expr(*n.bound) && is_pure_expr(*n.body);
            } else if constexpr (std::is_same_v<T, ast::Array>) {
                return std::all_of(n.items.begin(), n.items.end(), [](const ExprPtr& i) { return is_pure_expr(*i); });
            } else if constexpr (std::is_same_v<T, ast::UseState> || std::is_same_v<T, ast::UseEffect> ||
                                 std::is_same_v<T, ast::Print>) {
                return false;
            } else {
                return true;
            }
        },
        e.node);
}

bool is_pure(const Closure& c) { return c.body && is_pure_expr(*c.body); }

namespace {

const DefinitionTable& no_defs() {
    static const DefinitionTable empty;
    return empty;
}

std::optional<Value> apply_pure(const Closure& c, const Value& arg) {
    Counters counters;
    NullSink sink;
    Machine m{no_defs(), counters, sink, 1};
    TreeMemory scratch;
    EvalContext ctx = EvalContext::normal(scratch);
    try {
        return eval_expr(m, ctx, env_bind(c.env, c.param, arg), *c.body);
    } catch (const EngineError&) {
        return std::nullopt;
    }
}

}  // namespace

NormalizedEntry normalize_entry(const StateEntry& entry) {
    NormalizedEntry out{entry.value, {}, {}, 0};
    std::size_t l = 0;
    for (; l < entry.queue.size(); ++l) {
        const Closure& c = entry.queue[l];
        if (!is_pure(c)) break;
        std::optional<Value> next = apply_pure(c, out.val);
        if (!next) break;
        out.val = std::move(*next);
    }
    out.prefix = l;
    out.sttq.assign(entry.queue.begin() + static_cast<std::ptrdiff_t>(l), entry.queue.end());
    if (!out.sttq.empty()) {
        out.decisions = DecisionSet{true, false};
    } else if (!value_equiv(entry.value, out.val)) {
        out.decisions = DecisionSet{true, true};
    }
    return out;
}

View normalize_view(const View& view) {
    View out = view;
    DecisionSet d;
    for (auto& [label, entry] : out.store) {
        NormalizedEntry n = normalize_entry(entry);
        entry = StateEntry{std::move(n.val), std::move(n.sttq)};
        d.check = d.check || n.decisions.check;
        d.effect = d.effect || n.decisions.effect;
    }
    out.dec = DecisionSet{d.check, view.dec.effect || d.effect};
    return out;
}

// ------------------------------
// equality and similarity
// ------------------------------

namespace {

bool same_closure_shape(const Closure& a, const Closure& b) {
    if (a.param != b.param) return false;
    if (a.body == b.body) return true;
    return a.body && b.body && same_tree(*a.body, *b.body);
}

template <typename Eq>
bool all_pairs(const std::vector<Closure>& a, const std::vector<Closure>& b, Eq eq) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), eq);
}

bool same_ids(const Closure& a, const Closure& b) { return a.id == b.id; }

}  // namespace

bool trees_equal(const Tree& a, const Tree& b) {
    if (a.node.index() != b.node.index()) return false;
    if (const auto* c = std::get_if<Constant>(&a.node)) return constant_equal(*c, std::get<Constant>(b.node));
    if (const auto* c = std::get_if<Closure>(&a.node)) return c->id == std::get<Closure>(b.node).id;
    if (const auto* p = std::get_if<Path>(&a.node)) return *p == std::get<Path>(b.node);
    const auto& xs = std::get<std::vector<Tree>>(a.node);
    const auto& ys = std::get<std::vector<Tree>>(b.node);
    return xs.size() == ys.size() && std::equal(xs.begin(), xs.end(), ys.begin(), trees_equal);
}

bool views_equal(const View& a, const View& b) {
    if (a.spec.name != b.spec.name || !value_equiv(*a.spec.arg, *b.spec.arg)) return false;
    if (a.dec != b.dec || a.store.size() != b.store.size()) return false;
    for (const auto& [label, entry] : a.store) {
        auto it = b.store.find(label);
        if (it == b.store.end()) return false;
        if (!value_equiv(entry.value, it->second.value)) return false;
        if (!all_pairs(entry.queue, it->second.queue, same_ids)) return false;
    }
    return all_pairs(a.effects, b.effects, same_ids) && trees_equal(a.child, b.child);
}

bool same_shape(const Value& a, const Value& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Constant>) {
                return constant_equal(x, y);
            } else if constexpr (std::is_same_v<T, Closure>) {
                return same_closure_shape(x, y);
            } else if constexpr (std::is_same_v<T, Setter>) {
                return x.label == y.label && x.path == y.path;
            } else if constexpr (std::is_same_v<T, ComponentRef>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, ComSpec>) {
                return x.name == y.name && same_shape(*x.arg, *y.arg);
            } else {
                return x.items.size() == y.items.size() &&
                       std::equal(x.items.begin(), x.items.end(), y.items.begin(),
                                  [](const Value& p, const Value& q) { return same_shape(p, q); });
            }
        },
        a.node);
}

bool same_shape(const Tree& a, const Tree& b) {
    if (a.node.index() != b.node.index()) return false;
    if (const auto* c = std::get_if<Constant>(&a.node)) return constant_equal(*c, std::get<Constant>(b.node));
    if (const auto* c = std::get_if<Closure>(&a.node)) return same_closure_shape(*c, std::get<Closure>(b.node));
    if (const auto* p = std::get_if<Path>(&a.node)) return *p == std::get<Path>(b.node);
    const auto& xs = std::get<std::vector<Tree>>(a.node);
    const auto& ys = std::get<std::vector<Tree>>(b.node);
    return xs.size() == ys.size() && std::equal(xs.begin(), xs.end(), ys.begin(),
                                                [](const Tree& p, const Tree& q) { return same_shape(p, q); });
}

bool same_shape(const View& a, const View& b, ShapeOptions opts) {
    if (a.spec.name != b.spec.name || !same_shape(*a.spec.arg, *b.spec.arg)) return false;
    if (a.dec.effect != b.dec.effect) return false;
    if (opts.check && a.dec.check != b.dec.check) return false;
    if (a.store.size() != b.store.size()) return false;
    for (const auto& [label, entry] : a.store) {
        auto it = b.store.find(label);
        if (it == b.store.end()) return false;
        if (!same_shape(entry.value, it->second.value)) return false;
        if (!all_pairs(entry.queue, it->second.queue, same_closure_shape)) return false;
    }
    if (opts.effects && !all_pairs(a.effects, b.effects, same_closure_shape)) return false;
    return same_shape(a.child, b.child);
}

bool same_shape(const TreeMemory& a, const TreeMemory& b, ShapeOptions opts) {
    if (a.size() != b.size()) return false;
    for (const auto& [p, view] : a) {
        auto it = b.find(p);
        if (it == b.end() || !same_shape(view, it->second, opts)) return false;
    }
    return true;
}

bool views_similar(const View& a, const View& b) { return views_equal(normalize_view(a), normalize_view(b)); }

std::set<Path> reachable(const TreeMemory& mem, const Tree& tree) {
    std::set<Path> out;
    std::function<void(const Tree&)> walk = [&](const Tree& t) {
        if (const auto* p = std::get_if<Path>(&t.node)) {
            auto it = mem.find(*p);
            if (it == mem.end() || !out.insert(*p).second) return;
            walk(it->second.child);
        } else if (const auto* items = std::get_if<std::vector<Tree>>(&t.node)) {
            for (const auto& item : *items) walk(item);
        }
    };
    walk(tree);
    return out;
}

bool mems_similar(const TreeMemory& a, const TreeMemory& b, const Tree& tree) {
    std::set<Path> live = reachable(a, tree);
    std::set<Path> paths;
    for (const auto& [p, v] : a) paths.insert(p);
    for (const auto& [p, v] : b) paths.insert(p);
    for (Path p : paths) {
        auto ia = a.find(p);
        auto ib = b.find(p);
        if (ia == a.end() || ib == b.end()) return false;
        bool ok = live.count(p) ? views_similar(ia->second, ib->second) : views_equal(ia->second, ib->second);
        if (!ok) return false;
    }
    return true;
}

TreeMemory normalize_memory(const TreeMemory& mem, const Tree& tree) {
    TreeMemory out = mem;
    for (Path p : reachable(mem, tree)) out[p] = normalize_view(mem.at(p));
    return out;
}

// ------------------------------
// invariants
// ------------------------------

bool view_valid(const View& view, const DefinitionTable& defs) {
    auto it = defs.find(view.spec.name);
    if (it == defs.end()) return false;
    std::vector<Label> labels = labels_of(*it->second.body);
    std::set<Label> want(labels.begin(), labels.end());
    std::set<Label> have;
    for (const auto& [label, entry] : view.store) have.insert(label);
    return want == have;
}

bool check_validity(const TreeMemory& mem, const DefinitionTable& defs) {
    return std::all_of(mem.begin(), mem.end(), [&](const auto& kv) { return view_valid(kv.second, defs); });
}

bool view_coherent(const View& view) {
    bool queued = std::any_of(view.store.begin(), view.store.end(),
                              [](const auto& kv) { return !kv.second.queue.empty(); });
    return view.dec.check == queued;
}

bool check_coherence(const TreeMemory& mem, const Tree& tree) {
    for (Path p : reachable(mem, tree)) {
        if (!view_coherent(mem.at(p))) return false;
    }
    return true;
}

namespace {

// One Succ pass of the view's body, as the retrying evaluation starts it.
View single_pass(View view, Path path, const DefinitionTable& defs) {
    const ComponentDef& def = lookup_component(defs, view.spec.name);
    view.dec.check = false;
    view.effects.clear();
    Counters counters;
    NullSink sink;
    Machine m{defs, counters, sink, 1};
    EvalContext ctx = EvalContext::local(Phase::Succ, path, view);
    eval_expr(m, ctx, component_env(def, *view.spec.arg), *def.body);
    return view;
}

View without_effects(View v) {
    v.effects.clear();
    return v;
}

}  // namespace

bool check_stability(const View& view, Path path, const DefinitionTable& defs) {
    View after = single_pass(view, path, defs);
    if (!all_pairs(after.effects, view.effects, same_closure_shape)) return false;
    return views_equal(without_effects(after), without_effects(view));
}

bool check_semi_stability(const View& view, Path path, const DefinitionTable& defs) {
    View drained = view;
    for (auto& [label, entry] : drained.store) entry.queue.clear();
    drained.dec.check = false;
    View after = single_pass(drained, path, defs);
    return views_equal(without_effects(after), without_effects(drained));
}

bool check_e_equivalence(const View& view, Path path, const DefinitionTable& defs) {
    const ComponentDef& def = lookup_component(defs, view.spec.name);
    auto attempt = [&](const View& from) -> std::pair<std::optional<View>, std::optional<ErrorKind>> {
        try {
            return {single_pass(from, path, defs), std::nullopt};
        } catch (const EngineError& e) {
            return {std::nullopt, e.kind()};
        }
    };
    auto [a, ea] = attempt(view);
    auto [b, eb] = attempt(normalize_view(view));
    if (ea || eb) return ea == eb;
    for (Label l : labels_of(*def.body)) {
        auto ia = a->store.find(l);
        auto ib = b->store.find(l);
        if (ia == a->store.end() || ib == b->store.end()) return false;
        if (!same_shape(ia->second.value, ib->second.value)) return false;
        if (!all_pairs(ia->second.queue, ib->second.queue, same_closure_shape)) return false;
    }
    return true;
}

// ------------------------------
// theorem checkers
// ------------------------------

namespace {

template <typename F>
void for_each_rule(const TraceFile& trace, F&& f) {
    for (const auto& step : trace.steps) {
        for (const auto& r : step.rules) f(r);
    }
    for (const auto& r : trace.outcome.rules) f(r);
}

bool has_decision(const ViewSnapshot& v, std::string_view d) {
    return std::find(v.dec.begin(), v.dec.end(), d) != v.dec.end();
}

bool state_changed(const Snapshot& before, const Snapshot& after, std::uint64_t p) {
    auto ib = before.views.find(p);
    if (ib == before.views.end()) return true;
    const auto& old_st = ib->second.sttst;
    const auto& new_st = after.views.at(p).sttst;
    if (old_st.size() != new_st.size()) return true;
    for (const auto& [label, st] : new_st) {
        auto it = old_st.find(label);
        if (it == old_st.end() || it->second.val != st.val) return true;
    }
    return false;
}

}  // namespace

bool check_theorem_reeval(const TraceFile& trace) {
    std::set<std::uint64_t> set_during_pass;
    bool ok = true;
    for_each_rule(trace, [&](const RuleFired& r) {
        if (!r.path) return;
        if (r.rule == RuleTag::AppSetComp) {
            set_during_pass.insert(r.path->id);
        } else if (r.rule == RuleTag::EvalOnce || r.rule == RuleTag::EvalMult) {
            if (set_during_pass.erase(r.path->id) && r.detail.find("Check") == std::string::npos) ok = false;
        }
    });
    return ok;
}

bool check_theorem_effect_condition(const TraceFile& trace) {
    for (std::size_t i = 1; i < trace.steps.size(); ++i) {
        const StepRecord& step = trace.steps[i];
        if (step.transition != RuleTag::StepCheck) continue;
        const Snapshot& before = trace.steps[i - 1].snapshot;
        const Snapshot& after = step.snapshot;
        std::set<std::uint64_t> set_comp;
        for (const auto& r : step.rules) {
            if (r.rule == RuleTag::AppSetComp && r.path) set_comp.insert(r.path->id);
        }
        auto parents = snapshot_parents(after);
        for (const auto& [p, parent] : parents) {
            auto vit = after.views.find(p);
            if (vit == after.views.end()) continue;
            bool expected = false;
            for (std::optional<std::uint64_t> q = p; q && !expected; q = parents.at(*q)) {
                expected = state_changed(before, after, *q) || set_comp.count(*q) > 0;
            }
            if (expected != has_decision(vit->second, "Effect")) return false;
        }
    }
    return true;
}

namespace {

// Every config a run passes through. When recorded, the configs line up
// with the trace steps.
struct Walk {
    Program program;
    TraceFile trace;
    std::vector<EngineConfig> configs;
    bool failed = false;  // the engine itself failed after the last config
    std::optional<ErrorKind> error;
};

Walk walk(const std::string& source, const std::vector<std::size_t>& events, Budgets budgets, bool record) {
    Walk w;
    if (!record) {
        // Same schedule as record_run, without snapshots.
        w.program = parse_program(source);
        NullSink sink;
        try {
            EngineConfig cfg = boot(w.program, budgets, sink);
            auto settle = [&] {
                w.configs.push_back(cfg);
                while (cfg.mode != Mode::EventLoop) {
                    cfg = step(std::move(cfg), std::nullopt, sink);
                    w.configs.push_back(cfg);
                }
            };
            settle();
            for (std::size_t e : events) {
                if (e >= handlers(cfg.mem, cfg.root).size()) break;
                cfg = step(std::move(cfg), e, sink);
                settle();
            }
        } catch (const EngineError& e) {
            w.failed = true;
            w.error = e.kind();
        }
        return w;
    }
    Run run(source, budgets);
    w.program = run.program();
    auto settle = [&] {
        while (!run.booted() || run.config().mode != Mode::EventLoop) {
            run.step();
            w.configs.push_back(run.config());
        }
    };
    try {
        settle();
        for (std::size_t e : events) {
            run.dispatch(e);
            w.configs.push_back(run.config());
            settle();
        }
    } catch (const EngineError& e) {
        w.failed = run.failed();
        if (w.failed) w.error = e.kind();
    }
    w.trace = std::move(run).take_trace();
    return w;
}

template <typename F>
void for_each_child(const Expr& e, F&& f) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ast::Binary>) {
                f(*n.lhs), f(*n.rhs);
            } else if constexpr (std::is_same_v<T, ast::If>) {
                f(*n.cond), f(*n.then_branch), f(*n.else_branch);
            } else if constexpr (std::is_same_v<T, ast::Fun> || std::is_same_v<T, ast::UseEffect>) {
                f(*n.body);
            } else if constexpr (std::is_same_v<T, ast::App>) {
                f(*n.fn), f(*n.arg);
            } else if constexpr (std::is_same_v<T, ast::Seq>) {
                f(*n.first), f(*n.second);
            } else if constexpr (std::is_same_v<T, ast::Let>) {
                f(*n.bound), f(*n.body);
            } else if constexpr (std::is_same_v<T, ast::Array>) {
                for (const auto& item : n.items) f(*item);
            } else if constexpr (std::is_same_v<T, ast::UseState>) {
                f(*n.init), f(*n.body);
            } else if constexpr (std::is_same_v<T, ast::Print>) {
                f(*n.arg);
            }
        },
        e.node);
}

void collect_setter_names(const Expr& e, std::set<std::string>& out) {
    if (const auto* u = std::get_if<ast::UseState>(&e.node)) out.insert(u->setter_name);
    for_each_child(e, [&](const Expr& c) { collect_setter_names(c, out); });
}

// Every literal lambda handed to something named like a setter must be
// pure. Shadowing only makes this stricter.
bool setter_calls_pure(const Expr& e, const std::set<std::string>& setters) {
    if (const auto* app = std::get_if<ast::App>(&e.node)) {
        if (const auto* v = std::get_if<ast::Var>(&app->fn->node); v && setters.count(v->name)) {
            // Non-literal arguments are left to the queue scan below.
            const auto* fun = std::get_if<ast::Fun>(&app->arg->node);
            if (fun && !is_pure_expr(*fun->body)) return false;
        }
    }
    bool ok = true;
    for_each_child(e, [&](const Expr& c) { ok = ok && setter_calls_pure(c, setters); });
    return ok;
}

void require_pure_updates(const Program& program, const std::vector<EngineConfig>& configs) {
    std::set<std::string> setters;
    for (const auto& def : program.defs) collect_setter_names(*def.body, setters);
    collect_setter_names(*program.main, setters);
    bool ok = setter_calls_pure(*program.main, setters);
    for (const auto& def : program.defs) ok = ok && setter_calls_pure(*def.body, setters);
    if (!ok) throw InapplicableImpureUpdates("a setter is called with an updater that is not syntactically pure");
    // Setters can travel through arguments; catch whatever reached a queue.
    for (const auto& cfg : configs) {
        for (const auto& [p, view] : cfg.mem) {
            for (const auto& [label, entry] : view.store) {
                for (const auto& c : entry.queue) {
                    if (!is_pure(c)) {
                        throw InapplicableImpureUpdates("an impure updater was queued at path " +
                                                        std::to_string(p.id));
                    }
                }
            }
        }
    }
}

bool same_config(const EngineConfig& a, const EngineConfig& b) {
    return a.mode == b.mode && a.rerenders == b.rerenders && same_shape(a.root, b.root) &&
           same_shape(a.mem, b.mem, ShapeOptions{false, true});
}

}  // namespace

namespace {

bool similar_transitions(const Walk& w) {
    require_pure_updates(w.program, w.configs);
    NullSink sink;
    for (std::size_t i = 0; i < w.configs.size(); ++i) {
        const EngineConfig& cfg = w.configs[i];
        if (cfg.mode != Mode::Check) continue;
        bool last = i + 1 == w.configs.size();
        if (last && !w.failed) continue;  // the script stopped here
        EngineConfig similar = cfg;
        similar.mem = normalize_memory(cfg.mem, cfg.root);
        try {
            EngineConfig next = step(std::move(similar), std::nullopt, sink);
            if (last || !same_config(next, w.configs[i + 1])) return false;
        } catch (const EngineError& e) {
            if (!last || w.error != e.kind()) return false;
        }
    }
    return true;
}

}  // namespace

bool check_similar_transition(const std::string& source, const std::vector<std::size_t>& events, Budgets budgets) {
    return similar_transitions(walk(source, events, budgets, false));
}

// ------------------------------
// suites over one run
// ------------------------------

bool InvariantReport::ok() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.ok(); });
}

const SuiteResult* InvariantReport::find(const std::string& name) const {
    for (const auto& s : suites) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

InvariantReport run_invariant_suites(const std::string& source, const std::vector<std::size_t>& events,
                                     Budgets budgets) {
    Walk w = walk(source, events, budgets, true);
    InvariantReport report;
    auto named = [](std::string name, std::size_t checked = 0) {
        SuiteResult s;
        s.name = std::move(name);
        s.checked = checked;
        return s;
    };

    SuiteResult validity = named("validity");
    SuiteResult coherence = named("coherence");
    SuiteResult stability = named("stability");
    SuiteResult semi = named("semi-stability");
    SuiteResult eequiv = named("e-equivalence");
    auto guarded = [](SuiteResult& suite, auto&& check) {
        ++suite.checked;
        try {
            if (!check()) ++suite.failed;
        } catch (const EngineError& e) {
            ++suite.failed;
            if (suite.note.empty()) suite.note = e.what();
        }
    };

    for (std::size_t i = 0; i < w.configs.size(); ++i) {
        const EngineConfig& cfg = w.configs[i];
        const DefinitionTable& defs = *cfg.defs;
        guarded(validity, [&] { return check_validity(cfg.mem, defs); });
        std::set<Path> live = reachable(cfg.mem, cfg.root);
        for (Path p : live) {
            guarded(semi, [&] { return check_semi_stability(cfg.mem.at(p), p, defs); });
        }
        if (cfg.mode == Mode::Check) {
            guarded(coherence, [&] { return check_coherence(cfg.mem, cfg.root); });
            for (Path p : live) {
                const View& v = cfg.mem.at(p);
                if (!v.dec.check) continue;
                guarded(eequiv, [&] { return check_e_equivalence(v, p, defs); });
            }
        }
        // Views whose body just finished evaluating.
        std::set<Path> evaluated;
        for (const auto& r : w.trace.steps[i].rules) {
            if (r.rule == RuleTag::EvalOnce && r.path) evaluated.insert(*r.path);
        }
        for (Path p : evaluated) {
            guarded(stability, [&] { return check_stability(cfg.mem.at(p), p, defs); });
        }
    }

    SuiteResult reeval = named("re-evaluation theorem", 1);
    if (!check_theorem_reeval(w.trace)) reeval.failed = 1;
    SuiteResult effect = named("effect condition theorem", 1);
    if (!check_theorem_effect_condition(w.trace)) effect.failed = 1;
    SuiteResult similar = named("similar transitions", 1);
    try {
        if (!similar_transitions(w)) similar.failed = 1;
    } catch (const InapplicableImpureUpdates& e) {
        similar.checked = 0;
        similar.skipped = true;
        similar.note = e.what();
    }

    report.suites = {validity, coherence, stability, semi, eequiv, reeval, effect, similar};
    report.trace = std::move(w.trace);
    return report;
}

}  // namespace hookstep

#include <doctest.h>

#include "hookstep/generator.hpp"
#include "hookstep/oracle.hpp"
#include "test_helpers.hpp"

using namespace hookstep;

namespace {

std::uint64_t next_closure_id = 1000;

Closure closure(const std::string& text) {
    Program p = parse_program(text);
    const auto& fun = std::get<ast::Fun>(p.main->node);
    return Closure{fun.param, fun.body, nullptr, next_closure_id++};
}

std::int64_t as_int(const Value& v) { return std::get<std::int64_t>(std::get<Constant>(v.node)); }

// Applies `c` to `arg` in Normal phase against an empty memory. A pure
// updater must neither print nor touch the memory.
bool behaves_purely(const Closure& c, const Value& arg) {
    DefinitionTable defs;
    Counters counters;
    CollectingSink sink;
    Machine m{defs, counters, sink, 25};
    TreeMemory mem;
    EvalContext ctx = EvalContext::normal(mem);
    try {
        eval_expr(m, ctx, env_bind(c.env, c.param, arg), *c.body);
    } catch (const EngineError&) {
        return true;  // a failing updater has no effect either
    }
    return sink.lines.empty() && mem.empty();
}

View counter_view(std::int64_t val, std::vector<Closure> queue, DecisionSet dec) {
    View v;
    v.spec = ComSpec{"Counter", std::make_shared<const Value>(Value::integer(0))};
    v.dec = dec;
    v.store.emplace(Label{0}, StateEntry{Value::integer(val), std::move(queue)});
    return v;
}

DefinitionTable counter_defs() { return build_def_table(parse_program(program_text("counter.rtr"))).first; }

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("purity") {
    CHECK(is_pure(closure("fun s -> s + 1")));
    CHECK(is_pure(closure("fun s -> if s < 3 then s + 1 else s")));
    CHECK(is_pure(closure("fun s -> (fun y -> y * 2) s")));
    CHECK(is_pure(closure("fun s -> let g = fun y -> y in s")));
    CHECK_FALSE(is_pure(closure("fun s -> (print \"x\"; s)")));
    CHECK_FALSE(is_pure(closure("fun s -> (fun y -> print y) s")));
    CHECK_FALSE(is_pure(closure("fun s -> let g = fun y -> y in g s")));
    CHECK_FALSE(is_pure(closure("fun s -> s 1")));
    CHECK_FALSE(is_pure(closure("fun s -> let g = fun y -> print y in s")));
}

TEST_CASE("syntactically pure updaters behave purely") {
    // The purity test is an approximation; check it against evaluation.
    const char* texts[] = {
        "fun s -> s + 1", "fun s -> s", "fun s -> (fun y -> y + 1) s", "fun s -> if s < 3 then s + 1 else s",
        "fun s -> s / 0", "fun s -> let k = fun a -> a in s", "fun _ -> 3",
    };
    for (const char* t : texts) {
        CAPTURE(t);
        Closure c = closure(t);
        REQUIRE(is_pure(c));
        for (std::int64_t n = -2; n <= 4; ++n) CHECK(behaves_purely(c, Value::integer(n)));
    }
    CHECK_FALSE(behaves_purely(closure("fun s -> (print s; s)"), Value::integer(0)));
}

TEST_CASE("normalizing an entry") {
    Closure inc = closure("fun s -> s + 1");
    Closure dec = closure("fun s -> s - 1");
    Closure loud = closure("fun s -> (print \"a\"; s)");

    NormalizedEntry a = normalize_entry(StateEntry{Value::integer(0), {inc, inc}});
    CHECK(as_int(a.val) == 2);
    CHECK(a.sttq.empty());
    CHECK(a.prefix == 2);
    CHECK(a.decisions == DecisionSet{true, true});

    NormalizedEntry b = normalize_entry(StateEntry{Value::integer(5), {inc, dec}});
    CHECK(as_int(b.val) == 5);
    CHECK(b.decisions == DecisionSet{});

    NormalizedEntry c = normalize_entry(StateEntry{Value::integer(1), {inc, loud, inc}});
    CHECK(as_int(c.val) == 2);
    REQUIRE(c.sttq.size() == 2);
    CHECK(c.sttq[0].id == loud.id);
    CHECK(c.decisions == DecisionSet{true, false});

    NormalizedEntry d = normalize_entry(StateEntry{Value::integer(1), {closure("fun s -> s + true"), inc}});
    CHECK(d.prefix == 0);
    CHECK(d.sttq.size() == 2);

    NormalizedEntry e = normalize_entry(StateEntry{Value::integer(1), {}});
    CHECK(e.decisions == DecisionSet{});
}

TEST_CASE("normalizing a view keeps Effect and replaces Check") {
    Closure inc = closure("fun s -> s + 1");
    Closure id = closure("fun s -> s");
    View v = normalize_view(counter_view(0, {id}, DecisionSet{true, false}));
    CHECK(v.dec == DecisionSet{});
    View w = normalize_view(counter_view(0, {id}, DecisionSet{true, true}));
    CHECK(w.dec == DecisionSet{false, true});
    View x = normalize_view(counter_view(0, {inc}, DecisionSet{false, false}));
    CHECK(x.dec == DecisionSet{true, true});
    CHECK(as_int(x.store.at(Label{0}).value) == 1);
}

TEST_CASE("similarity") {
    Closure inc = closure("fun s -> s + 1");
    Closure inc2 = closure("fun s -> s + 1");
    Closure loud = closure("fun s -> (print \"a\"; s)");
    View a = counter_view(0, {inc, inc}, DecisionSet{true, false});
    View b = counter_view(1, {inc2}, DecisionSet{true, false});
    View c = counter_view(2, {}, DecisionSet{true, true});
    CHECK(views_similar(a, b));
    // Normalizing c drops its Check, while a keeps the one its updates produce.
    CHECK_FALSE(views_similar(a, c));
    CHECK(views_similar(a, counter_view(0, {inc2, inc}, DecisionSet{false, true})));
    CHECK_FALSE(views_similar(a, counter_view(1, {}, DecisionSet{true, true})));
    CHECK_FALSE(views_similar(counter_view(0, {loud}, {true, false}), counter_view(0, {closure("fun s -> (print \"a\"; s)")}, {true, false})));
    CHECK(views_similar(counter_view(0, {loud}, {true, false}), counter_view(0, {loud}, {true, false})));
    CHECK_FALSE(views_equal(a, b));
    CHECK(views_equal(a, a));
    CHECK(same_shape(normalize_view(a), normalize_view(b)));
}

TEST_CASE("reachability and memory similarity") {
    TraceFile t = record_run(program_text("parent_child.rtr"), {});
    Run r(program_text("parent_child.rtr"));
    r.run_until_idle();
    const EngineConfig& cfg = r.config();
    CHECK(reachable(cfg.mem, cfg.root) == std::set<Path>{Path{0}});
    CHECK(cfg.mem.size() == 2);
    CHECK(mems_similar(cfg.mem, cfg.mem, cfg.root));

    TreeMemory changed = cfg.mem;
    changed.at(Path{1}).dec.effect = !changed.at(Path{1}).dec.effect;
    // Unreachable paths have to be equal, not just similar.
    CHECK_FALSE(mems_similar(cfg.mem, changed, cfg.root));
    CHECK(same_shape(normalize_memory(cfg.mem, cfg.root), cfg.mem));
}

TEST_CASE("invariants hold along the Demo run") {
    Run r(program_text("demo.rtr"));
    DefinitionTable defs = build_def_table(r.program()).first;
    for (int i = 0; i < 5; ++i) {
        r.step();
        const EngineConfig& cfg = r.config();
        CAPTURE(i);
        CHECK(check_validity(cfg.mem, defs));
        CHECK(check_coherence(cfg.mem, cfg.root));
        // A freshly evaluated body is stable. Once its effects are committed
        // the effect queue no longer matches a new pass.
        for (const auto& rule : r.trace().steps.back().rules) {
            if (rule.rule == RuleTag::EvalOnce) CHECK(check_stability(cfg.mem.at(*rule.path), *rule.path, defs));
        }
        if (cfg.mode != Mode::Check) continue;
        for (Path p : reachable(cfg.mem, cfg.root)) {
            const View& v = cfg.mem.at(p);
            CHECK(check_semi_stability(v, p, defs));
            CHECK(check_e_equivalence(v, p, defs));
        }
    }
}

TEST_CASE("invalid and incoherent views are caught") {
    DefinitionTable defs = counter_defs();
    View ok = counter_view(0, {}, {});
    CHECK(view_valid(ok, defs));
    View missing = ok;
    missing.store.clear();
    CHECK_FALSE(view_valid(missing, defs));
    View extra = ok;
    extra.store.emplace(Label{7}, StateEntry{Value::integer(0), {}});
    CHECK_FALSE(view_valid(extra, defs));
    View stranger = ok;
    stranger.spec.name = "Nobody";
    CHECK_FALSE(view_valid(stranger, defs));

    CHECK(view_coherent(ok));
    CHECK_FALSE(view_coherent(counter_view(0, {closure("fun s -> s")}, {})));
    CHECK(view_coherent(counter_view(0, {closure("fun s -> s")}, {true, false})));
}

TEST_CASE("stability of a settled Counter") {
    Run r(program_text("counter.rtr"));
    r.run_until_idle();
    DefinitionTable defs = build_def_table(r.program()).first;
    const View& v = r.config().mem.at(Path{0});
    CHECK(check_stability(v, Path{0}, defs));
    View bumped = v;
    bumped.store.at(Label{0}).value = Value::integer(5);
    CHECK(check_stability(bumped, Path{0}, defs));
    View pending = v;
    pending.store.at(Label{0}).queue.push_back(closure("fun s -> s + 1"));
    pending.dec.check = true;
    CHECK_FALSE(check_stability(pending, Path{0}, defs));
    CHECK(check_semi_stability(pending, Path{0}, defs));
    CHECK(check_e_equivalence(pending, Path{0}, defs));
}

TEST_CASE("theorem checkers") {
    for (std::string name : {"demo.rtr", "counter.rtr", "counter_print.rtr", "selfcounter.rtr", "flicker.rtr",
                             "inf2.rtr", "parent_child.rtr", "parity.rtr"}) {
        CAPTURE(name);
        TraceFile t = record_run(program_text(name), {0, 0}, Budgets{25, 10});
        CHECK(check_theorem_reeval(t));
        CHECK(check_theorem_effect_condition(t));
    }
}

TEST_CASE("theorem checkers notice tampering") {
    TraceFile t = record_run(program_text("flicker.rtr"), {});
    REQUIRE(check_theorem_effect_condition(t));
    TraceFile bad = t;
    bool tampered = false;
    for (auto& s : bad.steps) {
        if (s.transition == RuleTag::StepCheck && s.snapshot.mode == Mode::Rendered) {
            s.snapshot.views.at(0).dec.clear();
            tampered = true;
        }
    }
    REQUIRE(tampered);
    CHECK_FALSE(check_theorem_effect_condition(bad));

    TraceFile demo = record_run(program_text("demo.rtr"), {});
    REQUIRE(check_theorem_reeval(demo));
    for (auto& s : demo.steps) {
        for (auto& r : s.rules) {
            if (r.rule == RuleTag::EvalMult) {
                r.rule = RuleTag::EvalOnce;
                r.detail = "{}";
            }
        }
    }
    CHECK_FALSE(check_theorem_reeval(demo));
}

TEST_CASE("similar transitions") {
    CHECK(check_similar_transition(program_text("counter.rtr"), {0, 0}));
    CHECK(check_similar_transition(program_text("demo.rtr"), {0}));
    CHECK(check_similar_transition(program_text("selfcounter.rtr"), {}));
    CHECK(check_similar_transition(program_text("parity.rtr"), {0, 0}));
    CHECK_THROWS_AS(check_similar_transition(program_text("impure_updates.rtr"), {0}), InapplicableImpureUpdates);
    CHECK_THROWS_AS(check_similar_transition(program_text("counter_print.rtr"), {0}), InapplicableImpureUpdates);
}

TEST_CASE("invariant suites") {
    InvariantReport r = run_invariant_suites(program_text("demo.rtr"), {0});
    CHECK(r.ok());
    for (const char* name : {"validity", "coherence", "stability", "semi-stability", "e-equivalence",
                             "re-evaluation theorem", "effect condition theorem", "similar transitions"}) {
        CAPTURE(name);
        const SuiteResult* s = r.find(name);
        REQUIRE(s);
        CHECK(s->ok());
        CHECK_FALSE(s->skipped);
        CHECK(s->checked > 0);
    }
    InvariantReport impure = run_invariant_suites(program_text("impure_updates.rtr"), {0});
    CHECK(impure.ok());
    CHECK(impure.find("similar transitions")->skipped);
    CHECK(r.find("no such suite") == nullptr);
}

}

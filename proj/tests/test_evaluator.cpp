#include <doctest.h>

#include "hookstep/evaluator.hpp"
#include "test_helpers.hpp"

using namespace hookstep;

namespace {

struct Fixture {
    DefinitionTable defs;
    Counters counters;
    CollectingSink sink;
    Machine m{defs, counters, sink, 25};
    TreeMemory mem;

    explicit Fixture(const std::string& defs_src = "0") { defs = build_def_table(parse_program(defs_src)).first; }

    Value eval(const std::string& src) {
        EvalContext ctx = EvalContext::normal(mem);
        return eval_expr(m, ctx, nullptr, *parse_program(src).main);
    }
};

ErrorKind eval_error(const std::string& src) {
    Fixture f;
    try {
        f.eval(src);
    } catch (const EngineError& e) {
        return e.kind();
    }
    FAIL("expected an engine error for " << src);
    return ErrorKind::IllegalStep;
}

std::int64_t as_int(const Value& v) { return std::get<std::int64_t>(std::get<Constant>(v.node)); }

}  // namespace

TEST_SUITE("evaluator") {

TEST_CASE("base language") {
    Fixture f;
    CHECK(as_int(f.eval("1 + 2 * 3")) == 7);
    CHECK(as_int(f.eval("let x = 4 in x * x")) == 16);
    CHECK(as_int(f.eval("(fun x -> x + 1) 41")) == 42);
    CHECK(as_int(f.eval("if 3 < 2 then 1 else 2")) == 2);
    CHECK(as_int(f.eval("7 mod 3")) == 1);
    CHECK(as_int(f.eval("-7 / 2")) == -3);
    CHECK(value_equiv(f.eval("1 <> 2 && (true || false)"), Value::boolean(true)));
    CHECK(value_equiv(f.eval("() = ()"), Value::boolean(true)));
    CHECK(value_equiv(f.eval("let k = fun x -> fun y -> x in k 1 2"), Value::integer(1)));
}

TEST_CASE("print writes to the console in order") {
    Fixture f;
    f.eval("print \"a\"; print 1; print (1 = 1); print ()");
    CHECK(f.sink.lines == std::vector<std::string>{"a", "1", "true", "()"});
}

TEST_CASE("component application builds a spec") {
    Fixture f("let A x = x;; 0");
    Value v = f.eval("A (1 + 1)");
    const auto& cs = std::get<ComSpec>(v.node);
    CHECK(cs.name == "A");
    CHECK(value_equiv(*cs.arg, Value::integer(2)));
    REQUIRE(f.sink.rules.size() == 1);
    CHECK(f.sink.rules[0].rule == RuleTag::AppCom);
}

TEST_CASE("closures get fresh ids") {
    Fixture f;
    Value v = f.eval("[fun x -> x, fun x -> x]");
    const auto& items = std::get<SpecArray>(v.node).items;
    CHECK(std::get<Closure>(items[0].node).id != std::get<Closure>(items[1].node).id);
}

TEST_CASE("runtime errors") {
    CHECK(eval_error("1 + true") == ErrorKind::TypeMismatch);
    CHECK(eval_error("if 1 then 2 else 3") == ErrorKind::TypeMismatch);
    CHECK(eval_error("1 / 0") == ErrorKind::TypeMismatch);
    CHECK(eval_error("9223372036854775807 + 1") == ErrorKind::TypeMismatch);
    CHECK(eval_error("y") == ErrorKind::UnboundVariable);
    CHECK(eval_error("1 2") == ErrorKind::TypeMismatch);
    CHECK(eval_error("[fun x -> x, A]") == ErrorKind::TypeMismatch);
}

TEST_CASE("init pass binds state and queues effects") {
    Fixture f(program_text("demo.rtr"));
    const ComponentDef& def = f.defs.at("Demo");
    View fresh{ComSpec{"Demo", std::make_shared<const Value>(Value::integer(0))}, {}, {}, {}, Tree::unit()};
    BodyResult r = eval_body_retry(f.m, Phase::Init, Path{0}, fresh, component_env(def, Value::integer(0)), *def.body);
    // Demo calls its setter once while s = 0, so the body runs twice.
    CHECK(r.passes == 2);
    CHECK_FALSE(r.view.dec.check);
    CHECK(r.view.dec.effect);
    CHECK(value_equiv(r.view.store.at(Label{0}).value, Value::integer(1)));
    CHECK(r.view.store.at(Label{0}).queue.empty());
    CHECK(r.view.effects.size() == 1);

    std::vector<RuleTag> tags;
    for (const auto& rule : f.sink.rules) tags.push_back(rule.rule);
    CHECK(tags == std::vector<RuleTag>{RuleTag::SttBind, RuleTag::AppSetComp, RuleTag::Eff, RuleTag::EvalMult,
                                       RuleTag::SttReBind, RuleTag::Eff, RuleTag::EvalOnce});
    CHECK(f.sink.rules[3].detail == "{Check}");
    CHECK(f.sink.rules[6].detail == "{Effect}");
}

TEST_CASE("retry budget") {
    Fixture f(program_text("inf2.rtr"));
    const ComponentDef& def = f.defs.at("Inf2");
    View fresh{ComSpec{"Inf2", std::make_shared<const Value>(Value::integer(0))}, {}, {}, {}, Tree::unit()};
    try {
        eval_body_retry(f.m, Phase::Init, Path{0}, fresh, component_env(def, Value::integer(0)), *def.body);
        FAIL("expected RetryLimitExceeded");
    } catch (const EngineError& e) {
        CHECK(e.kind() == ErrorKind::RetryLimitExceeded);
        CHECK(e.count() == 25u);
        CHECK(e.path() == Path{0});
    }
    // Exactly the budget's worth of passes were attempted.
    std::size_t passes = 0;
    for (const auto& r : f.sink.rules) passes += r.rule == RuleTag::EvalMult;
    CHECK(passes == 25);

    Fixture small(program_text("inf2.rtr"));
    small.m.retry_limit = 3;
    CHECK_THROWS_AS(eval_body_retry(small.m, Phase::Init, Path{0}, fresh, component_env(def, Value::integer(0)),
                                    *def.body),
                    EngineError);
}

TEST_CASE("setters in normal phase queue on the target view") {
    Fixture f;
    View v{ComSpec{"C", std::make_shared<const Value>(Value::unit())}, {}, {}, {}, Tree::unit()};
    v.store[Label{3}] = StateEntry{Value::integer(0), {}};
    f.mem[Path{7}] = v;
    EvalContext ctx = EvalContext::normal(f.mem);
    Env env = env_bind(nullptr, "set", Value{Setter{Label{3}, Path{7}}});
    eval_expr(f.m, ctx, env, *parse_program("set (fun s -> s + 1)").main);
    CHECK(f.mem.at(Path{7}).dec.check);
    CHECK(f.mem.at(Path{7}).store.at(Label{3}).queue.size() == 1);
    REQUIRE(f.sink.rules.size() == 1);
    CHECK(f.sink.rules[0].rule == RuleTag::AppSetNormal);
    CHECK(f.sink.rules[0].path == Path{7});
    CHECK(f.sink.rules[0].label == Label{3});

    CHECK_THROWS_AS(eval_expr(f.m, ctx, env, *parse_program("set 5").main), EngineError);
}

TEST_CASE("setting another component's state while rendering fails") {
    Fixture f;
    View v{ComSpec{"C", std::make_shared<const Value>(Value::unit())}, {}, {}, {}, Tree::unit()};
    v.store[Label{0}] = StateEntry{Value::integer(0), {}};
    EvalContext ctx = EvalContext::local(Phase::Succ, Path{2}, v);
    Env env = env_bind(nullptr, "set", Value{Setter{Label{0}, Path{1}}});
    try {
        eval_expr(f.m, ctx, env, *parse_program("set (fun s -> s)").main);
        FAIL("expected CrossComponentSetDuringRender");
    } catch (const EngineError& e) {
        CHECK(e.kind() == ErrorKind::CrossComponentSetDuringRender);
    }
}

TEST_CASE("hooks need a view") {
    // A component body evaluated in Normal phase has no view to hold state.
    Fixture g("let C x = useEffect (print 1); x;; 0");
    EvalContext gctx = EvalContext::normal(g.mem);
    try {
        eval_expr(g.m, gctx, env_bind(nullptr, "x", Value::unit()), *g.defs.at("C").body);
        FAIL("expected HookInNormalPhase");
    } catch (const EngineError& e) {
        CHECK(e.kind() == ErrorKind::HookInNormalPhase);
    }
}

TEST_CASE("unknown components") {
    DefinitionTable empty;
    CHECK_THROWS_AS(lookup_component(empty, "Nope"), EngineError);
}

}

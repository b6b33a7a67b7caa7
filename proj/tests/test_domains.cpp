#include <doctest.h>

#include "hookstep/domains.hpp"
#include "hookstep/runner.hpp"
#include "test_helpers.hpp"

using namespace hookstep;

namespace {

Closure clos(std::uint64_t id) { return Closure{"x", parse_program("x").main, nullptr, id}; }

Value spec(const std::string& name, Value arg) {
    return Value{ComSpec{name, std::make_shared<const Value>(std::move(arg))}};
}

}  // namespace

TEST_SUITE("domains") {

TEST_CASE("fresh paths count up") {
    CHECK(fresh_path(0) == std::pair<Path, std::uint64_t>{Path{0}, 1});
    CHECK(fresh_path(5) == std::pair<Path, std::uint64_t>{Path{5}, 6});
}

TEST_CASE("value equivalence") {
    CHECK(value_equiv(Value::integer(5), Value::integer(5)));
    CHECK(value_equiv(Value::unit(), Value::unit()));
    CHECK_FALSE(value_equiv(Value::integer(5), Value::integer(6)));
    CHECK_FALSE(value_equiv(Value::integer(1), Value::boolean(true)));
    CHECK(value_equiv(Value::string("a"), Value::string("a")));
    CHECK(value_equiv(Value{clos(3)}, Value{clos(3)}));
    CHECK_FALSE(value_equiv(Value{clos(3)}, Value{clos(4)}));
    CHECK(value_equiv(Value{Setter{Label{1}, Path{2}}}, Value{Setter{Label{1}, Path{2}}}));
    CHECK_FALSE(value_equiv(Value{Setter{Label{1}, Path{2}}}, Value{Setter{Label{1}, Path{3}}}));
    CHECK(value_equiv(spec("A", Value::integer(1)), spec("A", Value::integer(1))));
    CHECK_FALSE(value_equiv(spec("A", Value::integer(1)), spec("B", Value::integer(1))));
    CHECK(value_equiv(Value{SpecArray{{Value::integer(1), Value{clos(2)}}}},
                      Value{SpecArray{{Value::integer(1), Value{clos(2)}}}}));
    CHECK_FALSE(value_equiv(Value{SpecArray{{Value::integer(1)}}}, Value{SpecArray{}}));
}

TEST_CASE("two evaluations of the same fun are different closures") {
    // The handler closure is rebuilt on every render of Counter.
    Run run(program_text("counter.rtr"));
    run.run_until_idle();
    Closure before = run.current_handlers().at(0).closure;
    run.dispatch(0);
    run.run_until_idle();
    Closure after = run.current_handlers().at(0).closure;
    CHECK(before.body == after.body);
    CHECK_FALSE(value_equiv(Value{before}, Value{after}));
}

TEST_CASE("value equivalence is an equivalence on run values") {
    std::vector<Value> vals = {Value::unit(),        Value::integer(0),         Value::integer(0),
                               Value::boolean(true), Value::string("s"),        Value{clos(1)},
                               Value{clos(1)},       Value{clos(2)},            Value{Setter{Label{0}, Path{0}}},
                               spec("A", Value::integer(0)), spec("A", Value{clos(1)}),
                               Value{SpecArray{{Value::integer(0)}}}, Value{ComponentRef{"A"}}};
    for (const auto& a : vals) {
        CHECK(value_equiv(a, a));
        for (const auto& b : vals) {
            CHECK(value_equiv(a, b) == value_equiv(b, a));
            for (const auto& c : vals) {
                if (value_equiv(a, b) && value_equiv(b, c)) CHECK(value_equiv(a, c));
            }
        }
    }
}

TEST_CASE("view specs") {
    CHECK(is_view_spec(Value::integer(1)));
    CHECK(is_view_spec(Value{clos(0)}));
    CHECK(is_view_spec(spec("A", Value::unit())));
    CHECK(is_view_spec(Value{SpecArray{{Value::integer(1)}}}));
    CHECK_FALSE(is_view_spec(Value{Setter{Label{0}, Path{0}}}));
    CHECK_FALSE(is_view_spec(Value{ComponentRef{"A"}}));
}

TEST_CASE("display") {
    CHECK(display(Value::integer(-4)) == "-4");
    CHECK(display(Value::boolean(false)) == "false");
    CHECK(display(Value::unit()) == "()");
    CHECK(display(Value::string("Even")) == "Even");
    CHECK(display(Value{clos(0)}) == "<fun>");
}

TEST_CASE("decision sets and modes print") {
    CHECK(to_string(DecisionSet{}) == "{}");
    CHECK(to_string(DecisionSet{true, false}) == "{Check}");
    CHECK(to_string(DecisionSet{false, true}) == "{Effect}");
    CHECK(to_string(DecisionSet{true, true}) == "{Check, Effect}");
    for (Mode m : {Mode::Rendered, Mode::Check, Mode::EventLoop}) CHECK(mode_from_string(to_string(m)) == m);
    CHECK_FALSE(mode_from_string("Idle").has_value());
}

TEST_CASE("environments shadow") {
    Env e = env_bind(env_bind(nullptr, "x", Value::integer(1)), "x", Value::integer(2));
    REQUIRE(env_lookup(e, "x"));
    CHECK(value_equiv(*env_lookup(e, "x"), Value::integer(2)));
    CHECK(env_lookup(e, "y") == nullptr);
}

}

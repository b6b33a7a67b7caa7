#include <doctest.h>

#include <algorithm>

#include "hookstep/runner.hpp"
#include "test_helpers.hpp"

using namespace hookstep;

namespace {

std::vector<std::string> changed_fields(const std::vector<SnapshotChange>& diff) {
    std::vector<std::string> out;
    for (const auto& c : diff) out.push_back(std::string(to_string(c.kind)) + ":" + c.field);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_SUITE("trace") {

TEST_CASE("serialize round trips") {
    for (std::string name : {"demo.rtr", "counter_print.rtr", "parent_child.rtr", "inf2.rtr", "parity.rtr"}) {
        CAPTURE(name);
        TraceFile t = record_run(program_text(name), {0, 0});
        std::string bytes = serialize(t);
        TraceFile back = deserialize(bytes);
        CHECK(back == t);
        CHECK(serialize(back) == bytes);
    }
}

TEST_CASE("trace file layout") {
    TraceFile t = record_run(program_text("demo.rtr"), {});
    json j = json::parse(serialize(t));
    CHECK(j["format"] == kTraceFormat);
    CHECK(j["program"] == program_text("demo.rtr"));
    CHECK(j["budgets"] == json{{"retry_limit", 25}, {"rerender_limit", 100}});
    CHECK(j["outcome"]["status"] == "idle");
    REQUIRE(j["steps"].size() == 5);
    const json& s0 = j["steps"][0];
    CHECK(s0["transition"] == "StepInit");
    CHECK(s0["snapshot"]["mode"] == "Rendered");
    CHECK(s0["snapshot"]["root"] == json{{"kind", "path"}, {"path", 0}});
    const json& v = s0["snapshot"]["views"]["0"];
    CHECK(v["spec"]["name"] == "Demo");
    CHECK(v["dec"] == json::array({"Effect"}));
    CHECK(v["effq_len"] == 1);
    CHECK(v["sttst"]["0"]["val"] == json{{"kind", "int"}, {"value", 1}});

    // Rules start with the transition itself.
    for (const auto& step : j["steps"]) CHECK(step["rules"][0]["rule"] == step["transition"]);
}

TEST_CASE("Demo diffs") {
    TraceFile t = record_run(program_text("demo.rtr"), {});
    REQUIRE(t.steps.size() == 5);
    auto d12 = snapshot_diff(t.steps[1].snapshot, t.steps[2].snapshot);
    CHECK(changed_fields(d12) == std::vector<std::string>{"field:child", "field:dec", "field:effq_len",
                                                           "field:sttst.0.sttq_len", "field:sttst.0.val",
                                                           "mode:mode"});
    auto d23 = snapshot_diff(t.steps[2].snapshot, t.steps[3].snapshot);
    CHECK(changed_fields(d23) == std::vector<std::string>{"field:dec", "field:effq_len", "mode:mode"});
    for (const auto& c : d12) {
        if (c.field == "sttst.0.val") {
            CHECK(c.before == json{{"kind", "int"}, {"value", 1}});
            CHECK(c.after == json{{"kind", "int"}, {"value", 2}});
            CHECK(c.path == 0u);
        }
    }
    CHECK(snapshot_diff(t.steps[4].snapshot, t.steps[4].snapshot).empty());
    json dj = diff_to_json(d23);
    CHECK(dj.size() == 3);
}

TEST_CASE("unmounting shows up as unreachable") {
    TraceFile t = record_run(program_text("parent_child.rtr"), {});
    bool seen = false;
    for (std::size_t i = 1; i < t.steps.size(); ++i) {
        for (const auto& c : snapshot_diff(t.steps[i - 1].snapshot, t.steps[i].snapshot)) {
            if (c.kind == SnapshotChange::Kind::Unreachable) {
                CHECK(c.path == 1u);
                seen = true;
            }
        }
    }
    CHECK(seen);
    auto parents = snapshot_parents(t.steps[0].snapshot);
    CHECK(parents.at(0) == std::nullopt);
    CHECK(parents.at(1) == 0u);
}

TEST_CASE("failed runs keep the partial output") {
    TraceFile t = record_run("let Bad x = print \"before\"; 1 + true;;\nBad 0", {});
    CHECK(t.outcome.status == Outcome::Status::Error);
    REQUIRE(t.outcome.error);
    CHECK(t.outcome.error->kind == "TypeMismatch");
    CHECK(t.steps.empty());
    CHECK(trace_console(t) == std::vector<std::string>{"before"});
    CHECK(deserialize(serialize(t)) == t);
}

TEST_CASE("malformed traces are rejected") {
    CHECK_THROWS_AS(deserialize("not json"), TraceFormatError);
    CHECK_THROWS_AS(deserialize("{}"), TraceFormatError);
    json j = json::parse(serialize(record_run(program_text("demo.rtr"), {})));
    json bad_format = j;
    bad_format["format"] = 99;
    CHECK_THROWS_AS(deserialize(bad_format.dump()), TraceFormatError);
    json bad_mode = j;
    bad_mode["steps"][1]["snapshot"]["mode"] = "Sleeping";
    CHECK_THROWS_AS(deserialize(bad_mode.dump()), TraceFormatError);
    json bad_index = j;
    bad_index["steps"][2]["index"] = 7;
    CHECK_THROWS_AS(deserialize(bad_index.dump()), TraceFormatError);
    json bad_rule = j;
    bad_rule["steps"][0]["rules"][0]["rule"] = "Teleport";
    CHECK_THROWS_AS(deserialize(bad_rule.dump()), TraceFormatError);
}

TEST_CASE("rule tags round trip") {
    for (int i = 0; i <= static_cast<int>(RuleTag::ReconcileOther); ++i) {
        auto tag = static_cast<RuleTag>(i);
        CHECK(rule_from_string(to_string(tag)) == tag);
    }
    CHECK(is_transition(RuleTag::StepCheck));
    CHECK_FALSE(is_transition(RuleTag::EvalOnce));
    CHECK_FALSE(rule_from_string("Nope"));
}

}

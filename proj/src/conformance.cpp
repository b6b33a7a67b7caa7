#include "hookstep/conformance.hpp"

#include <algorithm>

namespace hookstep {

namespace {

using Complaint = std::optional<std::string>;

json int_json(std::int64_t n) { return json{{"kind", "int"}, {"value", n}}; }

Complaint state_is(const TraceFile& t, std::uint64_t path, std::uint32_t label, std::int64_t want) {
    if (t.steps.empty()) return "no steps recorded";
    const Snapshot& s = t.steps.back().snapshot;
    auto v = s.views.find(path);
    if (v == s.views.end()) return "no view at path " + std::to_string(path);
    auto st = v->second.sttst.find(label);
    if (st == v->second.sttst.end()) return "no state " + std::to_string(label);
    if (st->second.val != int_json(want)) {
        return "state " + std::to_string(label) + " at path " + std::to_string(path) + " is " + st->second.val.dump();
    }
    return std::nullopt;
}

std::size_t count_rules(const TraceFile& t, RuleTag tag) {
    std::size_t n = 0;
    for (const auto& s : t.steps) {
        n += static_cast<std::size_t>(std::count_if(s.rules.begin(), s.rules.end(),
                                                    [&](const RuleFired& r) { return r.rule == tag; }));
    }
    return n;
}

std::vector<Scenario> build() {
    std::vector<Scenario> out;

    Scenario s;
    s.row = 1;
    s.title = "No re-render w/o a setter call";
    s.source = R"(let C x =
  print "R";
  [x, button (fun _ -> print "click")];;
C 0
)";
    s.events = {0};
    s.renders = 1;
    s.console = {{"R", "click"}};
    out.push_back(s);

    s = {};
    s.row = 2;
    s.title = "Retries (0<n<25) w/ setter call during body eval";
    s.source = R"(let C x =
  let (s, setS) = useState 0 in
  print s;
  if s < 3 then setS (fun s -> s + 1);
  s;;
C 0
)";
    s.renders = 1;
    s.console = {{"0", "1", "2", "3"}};
    s.extra = [](const TraceFile& t) -> Complaint {
        std::size_t retries = count_rules(t, RuleTag::EvalMult);
        if (retries != 3) return "expected 3 retried passes, saw " + std::to_string(retries);
        return std::nullopt;
    };
    out.push_back(s);

    s = {};
    s.row = 3;
    s.title = "Infinite retries (n>=25) w/ setter call during body eval";
    s.source = R"(let Inf2 x =
  let (s, setS) = useState x in
  setS (fun s -> s);
  s;;
Inf2 0
)";
    s.error = "RetryLimitExceeded";
    s.error_count = 25;
    out.push_back(s);

    s = {};
    s.row = 4;
    s.title = "No re-render w/o Effects w/ setter call during body eval";
    s.source = R"(let C x =
  let (s, setS) = useState 0 in
  print "R";
  if s = 0 then setS (fun _ -> 1);
  s;;
C 0
)";
    s.renders = 1;
    s.console = {{"R", "R"}};
    s.extra = [](const TraceFile& t) { return state_is(t, 0, 0, 1); };
    out.push_back(s);

    s = {};
    s.row = 5;
    s.title = "No re-render w/ Effect w/o setter call";
    s.source = R"(let C x =
  print "R";
  useEffect (print "E");
  x;;
C 0
)";
    s.renders = 1;
    s.console = {{"R", "E"}};
    out.push_back(s);

    s = {};
    s.row = 6;
    s.title = "No re-render w/ Effect w/ id setter call";
    s.source = R"(let C x =
  let (s, setS) = useState x in
  print "R";
  useEffect (print "E"; setS (fun s -> s));
  s;;
C 0
)";
    s.renders = 1;
    s.console = {{"R", "E", "R"}};
    out.push_back(s);

    s = {};
    s.row = 7;
    s.title = "No re-render w/ Effect w/ setter calls composing to id";
    s.source = R"(let C x =
  let (s, setS) = useState x in
  print "R";
  useEffect (setS (fun s -> s + 1); setS (fun s -> s - 1));
  s;;
C 0
)";
    s.renders = 1;
    s.console = {{"R", "R"}};
    out.push_back(s);

    s = {};
    s.row = 8;
    s.title = "Re-renders (0<n<100) w/ Effect w/ setter call";
    s.source = R"(let SelfCounter x =
  let (s, setS) = useState x in
  print s;
  useEffect (
    print "Effect";
    if s < 3 then
      setS (fun s -> s + 1));
  print "Return";
  [s];;
SelfCounter 0
)";
    s.renders = 4;
    s.console = {{"0", "Return", "Effect", "1", "Return", "Effect", "2", "Return", "Effect", "3", "Return", "Effect"}};
    out.push_back(s);

    s = {};
    s.row = 9;
    s.title = "Infinite re-renders (n>=100) w/ Effect w/ diverging setter call";
    s.source = R"(let Inf x =
  let (s, setS) = useState 0 in
  useEffect (setS (fun s -> s+1));
  s;;
Inf 0
)";
    s.error = "RerenderLimitExceeded";
    s.error_count = 100;
    out.push_back(s);

    s = {};
    s.row = 10;
    s.title = "Re-render w/ child updating parent during Effect";
    s.source = R"(let Child setP =
  print "Child";
  useEffect (setP (fun _ -> 1));
  ();;
let Parent x =
  let (s, setS) = useState 0 in
  print s;
  [s, Child setS];;
Parent 0
)";
    s.renders = 2;
    s.console = {{"0", "Child", "1", "Child", "1"}};
    s.extra = [](const TraceFile& t) { return state_is(t, 0, 0, 1); };
    out.push_back(s);

    s = {};
    s.row = 11;
    s.title = "Re-render w/ sibling updating another during Effect";
    s.source = R"(let A setP =
  useEffect (setP (fun _ -> 5));
  ();;
let B v =
  print v;
  v;;
let P x =
  let (s, setS) = useState 0 in
  [A setS, B s];;
P 0
)";
    s.renders = 2;
    s.console = {{"0", "5"}};
    out.push_back(s);

    s = {};
    s.row = 12;
    s.title = "Error w/ child updating parent during body eval";
    s.source = R"(let Child setP =
  setP (fun _ -> 1);
  ();;
let Parent x =
  let (s, setS) = useState 0 in
  Child setS;;
Parent 0
)";
    s.error = "CrossComponentSetDuringRender";
    out.push_back(s);

    s = {};
    s.row = 13;
    s.title = "Non-trivial reconciliation";
    s.source = R"(let A x =
  let (s, setS) = useState 10 in
  print "A";
  [s, button (fun _ -> setS (fun s -> s + 1))];;
let B x =
  print "B";
  x;;
let P x =
  let (t, setT) = useState 0 in
  [button (fun _ -> setT (fun t -> t + 1)),
   (if t mod 2 = 0 then A 0 else B t),
   A t];;
P 0
)";
    // Bump the first A, then swap it for a B: the swapped slot gets a fresh
    // path while the trailing A keeps its path and its state.
    s.events = {1, 0};
    s.renders = 3;
    s.console = {{"A", "A", "A", "B", "A"}};
    s.extra = [](const TraceFile& t) -> Complaint {
        const Snapshot& snap = t.steps.back().snapshot;
        if (snapshot_reachable(snap) != std::set<std::uint64_t>{0, 2, 3}) return "expected paths 0, 2, 3 mounted";
        if (!snap.views.count(1)) return "the replaced A should stay in memory";
        if (snap.views.at(3).name != "B") return "path 3 should hold B";
        if (auto c = state_is(t, 1, 0, 11)) return c;
        return state_is(t, 2, 0, 10);
    };
    out.push_back(s);

    s = {};
    s.row = 14;
    s.title = "No re-render w/ direct object update";
    s.source = R"(let C x =
  let (obj, setObj) = useState (fun y -> y) in
  print "R";
  [button (fun _ -> setObj (fun o -> o)),
   button (fun _ -> setObj (fun o -> fun y -> y))];;
C 0
)";
    // Handing back the same closure is no change; a fresh one is.
    s.events = {0, 1};
    s.renders = 2;
    s.console = {{"R", "R", "R"}};
    out.push_back(s);

    s = {};
    s.row = 15;
    s.title = "Re-render w/ idle but parent updates";
    s.source = R"(let Child v =
  print "Child";
  v;;
let P x =
  let (s, setS) = useState 0 in
  print "P";
  [button (fun _ -> setS (fun s -> s + 1)), Child 7];;
P 0
)";
    s.events = {0};
    s.renders = 2;
    s.console = {{"P", "Child", "P", "Child"}};
    out.push_back(s);

    s = {};
    s.row = 16;
    s.title = "User event sequence";
    s.source = R"(let Counter x =
  print "Counter";
  let (s, setS) = useState x in
  print "Return";
  [s, button (fun _ ->
    setS (fun s -> s+1);
    setS (fun s -> print "Update"; s+1))];;
Counter 0
)";
    s.events = {0, 0, 0};
    s.renders = 4;
    s.console = {{"Counter", "Return", "Counter", "Update", "Return", "Counter", "Update", "Return", "Counter",
                  "Update", "Return"}};
    s.extra = [](const TraceFile& t) { return state_is(t, 0, 0, 6); };
    out.push_back(s);

    s = {};
    s.row = 18;
    s.title = "Recursive view hierarchy";
    s.source = R"(let Tree n =
  print n;
  if n = 0 then () else [Tree (n - 1), Tree (n - 1)];;
Tree 2
)";
    s.renders = 1;
    s.console = {{"2", "1", "0", "0", "1", "0", "0"}};
    s.extra = [](const TraceFile& t) -> Complaint {
        std::size_t n = snapshot_reachable(t.steps.back().snapshot).size();
        if (n != 7) return "expected 7 mounted views, saw " + std::to_string(n);
        return std::nullopt;
    };
    out.push_back(s);

    return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) out += (out.empty() ? "" : ",") + l;
    return "[" + out + "]";
}

}  // namespace

std::size_t render_count(const TraceFile& trace) {
    return static_cast<std::size_t>(std::count_if(trace.steps.begin(), trace.steps.end(), [](const StepRecord& s) {
        return s.snapshot.mode == Mode::Rendered;
    }));
}

const std::vector<Scenario>& conformance_scenarios() {
    static const std::vector<Scenario> all = build();
    return all;
}

ScenarioResult run_scenario(const Scenario& s, Budgets budgets) {
    ScenarioResult r;
    r.row = s.row;
    r.title = s.title;
    TraceFile t;
    try {
        t = record_run(s.source, s.events, budgets);
    } catch (const SyntaxError& e) {
        r.outcome = "SyntaxError";
        r.failures.push_back(e.what());
        return r;
    }
    r.renders = render_count(t);
    r.outcome = t.outcome.error ? t.outcome.error->kind : "idle";

    if (s.error) {
        if (r.outcome != *s.error) r.failures.push_back("expected " + *s.error + ", got " + r.outcome);
        if (s.error_count && (!t.outcome.error || t.outcome.error->count != s.error_count)) {
            r.failures.push_back("expected count " + std::to_string(*s.error_count));
        }
    } else if (t.outcome.status != Outcome::Status::Idle) {
        r.failures.push_back("expected to reach EventLoop, got " + r.outcome);
    }
    if (s.renders && r.renders != *s.renders) {
        r.failures.push_back("expected " + std::to_string(*s.renders) + " renders, saw " + std::to_string(r.renders));
    }
    if (s.console) {
        auto lines = trace_console(t);
        if (lines != *s.console) r.failures.push_back("console " + join_lines(lines) + " != " + join_lines(*s.console));
    }
    if (s.extra && r.failures.empty()) {
        if (auto c = s.extra(t)) r.failures.push_back(*c);
    }
    r.passed = r.failures.empty();
    return r;
}

}  // namespace hookstep

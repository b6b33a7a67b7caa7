#include "hookstep/generator.hpp"

#include <sstream>

#include "hookstep/engine.hpp"
#include "hookstep/syntax.hpp"

namespace hookstep {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

ProgramGenerator::ProgramGenerator(std::uint64_t seed, GeneratorOptions opts) : rng_(seed), opts_(opts) {}

std::size_t ProgramGenerator::pick(std::size_t n) {
    return n == 0 ? 0 : std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

bool ProgramGenerator::chance(double p) { return std::bernoulli_distribution(p)(rng_); }

int ProgramGenerator::small(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

std::string ProgramGenerator::updater() {
    if (!opts_.pure_only && chance(0.2)) {
        switch (pick(3)) {
        case 0: return "fun s -> (print \"u\"; s + 1)";
        case 1: return "fun s -> (print s; s)";
        default: return "fun s -> (print \"v\"; " + std::to_string(small(0, 3)) + ")";
        }
    }
    switch (pick(6)) {
    case 0: return "fun s -> s + " + std::to_string(small(1, 2));
    case 1: return "fun s -> " + std::to_string(small(0, 3));
    case 2: return "fun s -> if s < 3 then s + 1 else s";
    case 3: return "fun s -> s";
    case 4: return "fun s -> (fun y -> y + 1) s";
    default: return "fun _ -> " + std::to_string(small(0, 3));
    }
}

std::string ProgramGenerator::int_expr(const std::vector<std::string>& states) {
    std::size_t k = pick(states.empty() ? 2 : 4);
    switch (k) {
    case 0: return "x";
    case 1: return std::to_string(small(0, 3));
    case 2: return states[pick(states.size())];
    default: return "(" + states[pick(states.size())] + " + x)";
    }
}

std::string ProgramGenerator::guarded_set(const std::vector<std::string>& setters,
                                          const std::vector<std::string>& states) {
    std::size_t i = pick(setters.size());
    return "(if " + states[i] + " < " + std::to_string(small(1, 3)) + " then " + setters[i] + " (" + updater() +
           ") else ())";
}

std::string ProgramGenerator::handler(const std::vector<std::string>& setters, const std::vector<std::string>& states) {
    if (setters.empty()) return "(fun _ -> print \"h\")";
    std::size_t i = pick(setters.size());
    std::string body = setters[i] + " (" + updater() + ")";
    if (chance(0.4)) body += "; " + setters[pick(setters.size())] + " (" + updater() + ")";
    if (chance(0.2)) body = guarded_set(setters, states);
    return "(fun _ -> " + body + ")";
}

std::string ProgramGenerator::view_expr(std::size_t self, std::size_t count, const std::vector<std::string>& setters,
                                        const std::vector<std::string>& states) {
    std::size_t children = 0;
    auto child = [&]() -> std::string {
        if (self + 1 >= count || children >= opts_.max_children) return int_expr(states);
        ++children;
        std::size_t j = self + 1 + pick(count - self - 1);
        return "C" + std::to_string(j) + " " + int_expr(states);
    };
    auto leaf = [&]() -> std::string {
        switch (pick(4)) {
        case 0: return int_expr(states);
        case 1: return (chance(0.5) ? "button " : "") + handler(setters, states);
        default: return child();
        }
    };
    switch (pick(4)) {
    case 0: return leaf();
    case 1: {
        std::vector<std::string> items;
        std::size_t n = 1 + pick(3);
        for (std::size_t i = 0; i < n; ++i) items.push_back(leaf());
        return "[" + join(items, ", ") + "]";
    }
    case 2:
        if (!states.empty()) {
            std::string a = leaf();
            std::string b = chance(0.3) ? "()" : leaf();
            return "(if " + states[pick(states.size())] + " < 2 then " + a + " else " + b + ")";
        }
        return leaf();
    default: return "[" + handler(setters, states) + ", " + leaf() + "]";
    }
}

std::string ProgramGenerator::component(std::size_t index, std::size_t count) {
    std::vector<std::string> states;
    std::vector<std::string> setters;
    std::vector<std::string> lines;
    if (chance(0.3)) lines.push_back("print \"C" + std::to_string(index) + "\"");

    std::size_t n_states = pick(opts_.max_states + 1);
    std::string lets;
    for (std::size_t i = 0; i < n_states; ++i) {
        std::string s = "s" + std::to_string(i);
        std::string set = "setS" + std::to_string(i);
        std::string init = chance(0.5) ? "x" : std::to_string(small(0, 2));
        lets += "let (" + s + ", " + set + ") = useState " + init + " in\n  ";
        states.push_back(s);
        setters.push_back(set);
    }

    std::vector<std::string> after;
    if (!setters.empty()) {
        if (chance(0.15)) after.push_back(guarded_set(setters, states));
        if (chance(0.02)) after.push_back(setters[0] + " (fun s -> s)");
    }
    std::size_t n_effects = pick(opts_.max_effects + 1);
    for (std::size_t i = 0; i < n_effects; ++i) {
        std::vector<std::string> body;
        if (chance(0.5)) body.push_back("print \"E" + std::to_string(index) + "\"");
        if (!states.empty() && chance(0.3)) body.push_back("print " + states[pick(states.size())]);
        if (!setters.empty()) {
            if (chance(0.5)) body.push_back(guarded_set(setters, states));
            if (chance(0.03)) body.push_back(setters[pick(setters.size())] + " (fun s -> s + 1)");
        }
        if (body.empty()) body.push_back("()");
        after.push_back("useEffect (" + join(body, "; ") + ")");
    }
    if (!states.empty() && chance(0.3)) after.push_back("print " + states[pick(states.size())]);
    after.push_back(view_expr(index, count, setters, states));

    std::string body = join(lines, ";\n  ");
    if (!body.empty()) body += ";\n  ";
    body += lets + join(after, ";\n  ");
    return "let C" + std::to_string(index) + " x =\n  " + body + ";;\n";
}

GeneratedProgram ProgramGenerator::next() {
    std::size_t count = 1 + pick(opts_.max_components);
    std::string src;
    for (std::size_t i = 0; i < count; ++i) src += component(i, count);
    src += chance(0.15) ? "[C0 0, 1]\n" : "C0 " + std::to_string(small(0, 2)) + "\n";
    GeneratedProgram g{std::move(src), {}};
    std::size_t n_events = pick(opts_.max_events + 1);
    std::vector<std::size_t> raw;
    for (std::size_t i = 0; i < n_events; ++i) raw.push_back(pick(3));
    g.events = fit_events(g.source, raw);
    return g;
}

std::vector<std::size_t> fit_events(const std::string& source, const std::vector<std::size_t>& raw, Budgets budgets) {
    // Drives the engine directly: nothing is recorded.
    std::vector<std::size_t> out;
    NullSink sink;
    try {
        EngineConfig cfg = run_until_idle(boot(parse_program(source), budgets, sink), sink);
        for (std::size_t e : raw) {
            std::size_t available = handlers(cfg.mem, cfg.root).size();
            if (available == 0) break;
            out.push_back(e % available);
            cfg = run_until_idle(step(std::move(cfg), out.back(), sink), sink);
        }
    } catch (const EngineError&) {
        // Whatever was dispatched before the failure still makes a script.
    }
    return out;
}

std::vector<GeneratedProgram> generate_corpus(std::uint64_t seed, std::size_t count, GeneratorOptions opts) {
    ProgramGenerator gen(seed, opts);
    std::vector<GeneratedProgram> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(gen.next());
    return out;
}

// ------------------------------
// views
// ------------------------------

namespace {

constexpr const char* kViewDefs = R"(let V1 x =
  let (a, setA) = useState x in a;;
let V2 x =
  let (a, setA) = useState x in
  let (b, setB) = useState 0 in [a, b];;
let V3 x =
  let (a, setA) = useState x in
  let (b, setB) = useState 1 in
  let (c, setC) = useState 2 in [a, b, c];;
0
)";

constexpr const char* kUpdaters[] = {
    "fun s -> s + 1",          "fun s -> s",           "fun s -> 0",
    "fun s -> s - 1",          "fun s -> if s < 2 then s + 1 else s",
    "fun s -> (fun y -> y) s", "fun s -> (print \"a\"; s)",
    "fun s -> (print \"b\"; s + 1)",
};

}  // namespace

ViewCorpus generate_views(std::uint64_t seed, std::size_t count) {
    Program program = parse_program(kViewDefs);
    ViewCorpus corpus;
    corpus.defs = build_def_table(program).first;

    std::vector<Closure> pool;
    std::uint64_t next_id = 0;
    for (const char* text : kUpdaters) {
        ExprPtr e = parse_program(text).main;
        const auto& fun = std::get<ast::Fun>(e->node);
        pool.push_back(Closure{fun.param, fun.body, nullptr, next_id++});
    }

    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    auto coin = [&] { return std::bernoulli_distribution(0.5)(rng); };
    for (std::size_t i = 0; i < count; ++i) {
        const ComponentDef& def = std::next(corpus.defs.begin(), static_cast<std::ptrdiff_t>(pick(3)))->second;
        View v;
        v.spec = ComSpec{def.name, std::make_shared<const Value>(Value::integer(static_cast<std::int64_t>(pick(3))))};
        for (Label l : labels_of(*def.body)) {
            StateEntry entry{Value::integer(static_cast<std::int64_t>(pick(4))), {}};
            std::size_t q = pick(4);
            for (std::size_t k = 0; k < q; ++k) {
                Closure c = pool[pick(pool.size())];
                c.id = next_id++;
                entry.queue.push_back(std::move(c));
            }
            v.store.emplace(l, std::move(entry));
        }
        bool queued = false;
        for (const auto& [l, e] : v.store) queued = queued || !e.queue.empty();
        // Mostly coherent, occasionally not: similarity must not care.
        v.dec = DecisionSet{pick(8) == 0 ? coin() : queued, coin()};
        corpus.views.emplace_back(Path{i}, std::move(v));
    }
    return corpus;
}

}  // namespace hookstep

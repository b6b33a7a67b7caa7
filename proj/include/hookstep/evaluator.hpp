#pragma once

#include <cstdint>
#include <optional>

#include "hookstep/domains.hpp"
#include "hookstep/errors.hpp"
#include "hookstep/syntax.hpp"
#include "hookstep/trace.hpp"

namespace hookstep {

/// Fresh-name supply shared by one engine run.
struct Counters {
    std::uint64_t next_path = 0;
    std::uint64_t next_closure = 0;

    bool operator==(const Counters&) const = default;
};

struct Machine {
    const DefinitionTable& defs;
    Counters& counters;
    Sink& sink;
    std::uint64_t retry_limit = 25;
};

/// Exactly one of `memory` / `view` is set: the whole memory in Normal
/// phase, the view being rendered in Init and Succ.
struct EvalContext {
    Phase phase = Phase::Normal;
    std::optional<Path> path;
    TreeMemory* memory = nullptr;
    View* view = nullptr;

    static EvalContext normal(TreeMemory& mem) { return {Phase::Normal, std::nullopt, &mem, nullptr}; }
    static EvalContext local(Phase phase, Path path, View& view) { return {phase, path, nullptr, &view}; }
};

/// Big-step evaluation. The context is updated in place.
Value eval_expr(Machine& m, EvalContext& ctx, const Env& env, const Expr& e);

struct BodyResult {
    Value value;
    View view;
    std::uint64_t passes = 0;
};

/// Retrying evaluation of a component body: re-run in Succ while the pass
/// leaves Check set. Throws RetryLimitExceeded once `m.retry_limit` passes
/// all ended with Check.
BodyResult eval_body_retry(Machine& m, Phase phase, Path path, View view, const Env& env, const Expr& body);

/// `[param ↦ arg]` for a component body.
Env component_env(const ComponentDef& def, const Value& arg);

const ComponentDef& lookup_component(const DefinitionTable& defs, const std::string& name);

}  // namespace hookstep

#include "hookstep/engine.hpp"

namespace hookstep {

EngineConfig boot(const Program& program, Budgets budgets, Sink& sink) {
    auto [table, main] = build_def_table(program);
    EngineConfig cfg;
    cfg.defs = std::make_shared<const DefinitionTable>(std::move(table));
    cfg.budgets = budgets;
    sink.rule(RuleFired{RuleTag::StepInit, std::nullopt, std::nullopt, ""});

    Machine m{*cfg.defs, cfg.counters, sink, budgets.retry_limit};
    TreeMemory scratch;
    EvalContext ctx = EvalContext::normal(scratch);
    Value spec = eval_expr(m, ctx, nullptr, *main);
    if (!is_view_spec(spec)) {
        throw EngineError(ErrorKind::NotAViewSpec, "main expression evaluated to " + display(spec));
    }
    cfg.root = init(m, cfg.mem, spec);
    cfg.mode = Mode::Rendered;
    cfg.step_index = 1;
    return cfg;
}

EngineConfig step(EngineConfig cfg, std::optional<std::size_t> event, Sink& sink) {
    if (event && cfg.mode != Mode::EventLoop) {
        throw EngineError(ErrorKind::IllegalStep,
                          "events are accepted only in EventLoop mode, not " + std::string(to_string(cfg.mode)));
    }
    Machine m{*cfg.defs, cfg.counters, sink, cfg.budgets.retry_limit};
    switch (cfg.mode) {
    case Mode::Rendered:
        sink.rule(RuleFired{RuleTag::StepEffect, std::nullopt, std::nullopt, ""});
        commit_effs(m, cfg.mem, cfg.root);
        cfg.mode = Mode::Check;
        break;
    case Mode::Check: {
        sink.rule(RuleFired{RuleTag::StepCheck, std::nullopt, std::nullopt, ""});
        Mode next = check(m, cfg.mem, cfg.root);
        if (next == Mode::Rendered) {
            ++cfg.rerenders;
            if (cfg.rerenders >= cfg.budgets.rerender_limit) {
                throw EngineError(ErrorKind::RerenderLimitExceeded,
                                  "re-rendered " + std::to_string(cfg.rerenders) + " times in a row (limit " +
                                      std::to_string(cfg.budgets.rerender_limit) + ")",
                                  std::nullopt, cfg.rerenders);
            }
        } else {
            cfg.rerenders = 0;
        }
        cfg.mode = next;
        break;
    }
    case Mode::EventLoop: {
        if (!event) throw EngineError(ErrorKind::IllegalStep, "EventLoop mode needs an event to proceed");
        auto hs = handlers(cfg.mem, cfg.root);
        if (*event >= hs.size()) {
            throw EngineError(ErrorKind::NoSuchHandler, "handler " + std::to_string(*event) + " of " +
                                                            std::to_string(hs.size()) + " available");
        }
        sink.rule(RuleFired{RuleTag::StepEvent, std::nullopt, std::nullopt, "handler " + std::to_string(*event)});
        const Closure& handler = hs[*event].closure;
        EvalContext ctx = EvalContext::normal(cfg.mem);
        eval_expr(m, ctx, env_bind(handler.env, handler.param, Value::unit()), *handler.body);
        cfg.mode = Mode::Check;
        break;
    }
    }
    ++cfg.step_index;
    return cfg;
}

EngineConfig run_until_idle(EngineConfig cfg, Sink& sink, const StepObserver& observe) {
    while (cfg.mode != Mode::EventLoop) {
        cfg = step(std::move(cfg), std::nullopt, sink);
        if (observe) observe(cfg);
    }
    return cfg;
}

}  // namespace hookstep

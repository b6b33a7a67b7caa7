#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>

#include "hookstep/renderer.hpp"

namespace hookstep {

/// One machine state of the render loop.
struct EngineConfig {
    Tree root = Tree::unit();
    TreeMemory mem;
    std::shared_ptr<const DefinitionTable> defs;
    Mode mode = Mode::Rendered;
    Counters counters;
    Budgets budgets;
    // Transitions taken so far, StepInit included.
    std::uint64_t step_index = 0;
    // Consecutive Check -> Rendered transitions since the last EventLoop.
    std::uint64_t rerenders = 0;
};

/// StepInit: evaluate main in Normal phase and initialize its view spec.
EngineConfig boot(const Program& program, Budgets budgets, Sink& sink);

/// One StepEffect / StepCheck / StepEvent transition. `event` must be given
/// exactly when the config is in EventLoop.
EngineConfig step(EngineConfig cfg, std::optional<std::size_t> event, Sink& sink);

using StepObserver = std::function<void(const EngineConfig&)>;

/// Steps without events until EventLoop. The observer sees every new config.
EngineConfig run_until_idle(EngineConfig cfg, Sink& sink, const StepObserver& observe = {});

}  // namespace hookstep

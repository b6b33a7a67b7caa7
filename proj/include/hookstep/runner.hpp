#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hookstep/engine.hpp"

namespace hookstep {

/// An engine run that records every transition into a TraceFile. The first
/// step performs StepInit. An EngineError is recorded in the outcome and
/// rethrown; after that the run refuses further steps.
class Run {
public:
    /// Throws SyntaxError if `source` does not parse.
    explicit Run(std::string source, Budgets budgets = {}, std::ostream* echo = nullptr);

    const Program& program() const { return program_; }
    const TraceFile& trace() const { return trace_; }
    TraceFile take_trace() && { return std::move(trace_); }
    bool booted() const { return cfg_.has_value(); }
    bool failed() const { return failed_; }
    /// Requires booted().
    const EngineConfig& config() const { return *cfg_; }
    std::optional<Mode> mode() const;

    const StepRecord& step();
    const StepRecord& dispatch(std::size_t handler);
    /// Steps until EventLoop; returns how many records were added.
    std::size_t run_until_idle();

    std::vector<Handler> current_handlers() const;

private:
    template <typename F>
    const StepRecord& record(F&& transition);

    Program program_;
    std::ostream* echo_;
    std::optional<EngineConfig> cfg_;
    TraceFile trace_;
    bool failed_ = false;
};

/// Runs `source` to idle, then dispatches each event (one per EventLoop
/// visit) and runs to idle again. EngineErrors end up in the outcome
/// instead of propagating.
TraceFile record_run(const std::string& source, const std::vector<std::size_t>& events, Budgets budgets = {},
                     std::ostream* echo = nullptr);

ErrorRecord error_record(const EngineError& e);

}  // namespace hookstep

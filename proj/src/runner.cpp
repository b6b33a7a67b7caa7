#include "hookstep/runner.hpp"

namespace hookstep {

ErrorRecord error_record(const EngineError& e) {
    ErrorRecord r;
    r.kind = std::string(to_string(e.kind()));
    r.message = e.what();
    if (e.path()) r.path = e.path()->id;
    r.count = e.count();
    return r;
}

Run::Run(std::string source, Budgets budgets, std::ostream* echo)
    : program_(parse_program(source)), echo_(echo) {
    trace_.program = std::move(source);
    trace_.budgets = budgets;
}

std::optional<Mode> Run::mode() const {
    if (!cfg_) return std::nullopt;
    return cfg_->mode;
}

template <typename F>
const StepRecord& Run::record(F&& transition) {
    if (failed_) throw EngineError(ErrorKind::IllegalStep, "the run already ended with an error");
    CollectingSink sink(echo_);
    try {
        cfg_ = transition(sink);
    } catch (const EngineError& e) {
        failed_ = true;
        trace_.outcome.status = Outcome::Status::Error;
        trace_.outcome.error = error_record(e);
        trace_.outcome.console = std::move(sink.lines);
        trace_.outcome.rules = std::move(sink.rules);
        throw;
    }
    StepRecord rec;
    rec.index = trace_.steps.size();
    rec.transition = sink.rules.front().rule;
    rec.console = std::move(sink.lines);
    rec.rules = std::move(sink.rules);
    rec.snapshot = take_snapshot(cfg_->root, cfg_->mem, cfg_->mode);
    trace_.steps.push_back(std::move(rec));
    trace_.outcome.status = cfg_->mode == Mode::EventLoop ? Outcome::Status::Idle : Outcome::Status::Incomplete;
    return trace_.steps.back();
}

const StepRecord& Run::step() {
    if (!cfg_) {
        return record([&](Sink& sink) { return boot(program_, trace_.budgets, sink); });
    }
    if (cfg_->mode == Mode::EventLoop && !failed_) {
        throw EngineError(ErrorKind::IllegalStep, "EventLoop mode needs an event to proceed");
    }
    return record([&](Sink& sink) { return hookstep::step(*cfg_, std::nullopt, sink); });
}

const StepRecord& Run::dispatch(std::size_t handler) {
    if (!cfg_ || cfg_->mode != Mode::EventLoop) {
        throw EngineError(ErrorKind::IllegalStep, "events are accepted only in EventLoop mode");
    }
    if (failed_) throw EngineError(ErrorKind::IllegalStep, "the run already ended with an error");
    // A bad index is a caller error; the run itself stays usable.
    std::size_t available = current_handlers().size();
    if (handler >= available) {
        throw EngineError(ErrorKind::NoSuchHandler,
                          "handler " + std::to_string(handler) + " of " + std::to_string(available) + " available");
    }
    trace_.events.push_back(handler);
    return record([&](Sink& sink) { return hookstep::step(*cfg_, handler, sink); });
}

std::size_t Run::run_until_idle() {
    std::size_t added = 0;
    while (!cfg_ || cfg_->mode != Mode::EventLoop) {
        step();
        ++added;
    }
    return added;
}

std::vector<Handler> Run::current_handlers() const {
    if (!cfg_) return {};
    return handlers(cfg_->mem, cfg_->root);
}

TraceFile record_run(const std::string& source, const std::vector<std::size_t>& events, Budgets budgets,
                     std::ostream* echo) {
    Run run(source, budgets, echo);
    try {
        run.run_until_idle();
        for (std::size_t e : events) {
            run.dispatch(e);
            run.run_until_idle();
        }
    } catch (const EngineError& e) {
        TraceFile t = run.trace();
        if (!run.failed()) {
            // The script stopped at a rejected event; keep it so a replay
            // stops at the same place.
            t.outcome.status = Outcome::Status::Error;
            t.outcome.error = error_record(e);
            t.events.assign(events.begin(), events.begin() + static_cast<std::ptrdiff_t>(t.events.size() + 1));
        }
        return t;
    }
    return run.trace();
}

}  // namespace hookstep

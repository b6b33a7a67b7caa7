#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "hookstep/runner.hpp"

namespace hookstep {

/// Newline-delimited JSON request/reply loop driving one engine run.
///
/// Requests: load{program}, step, run_until_idle, event{handler}, snapshot,
/// reset. Every reply has ok, mode, console, rules, snapshot and steps;
/// error is present only when ok is false. A failed command never ends the
/// session, but an engine error ends the run until the next load or reset.
class Session {
public:
    explicit Session(Budgets defaults = {}) : defaults_(defaults) {}

    json handle(const json& request);
    /// One request line in, one reply line out (no trailing newline).
    std::string handle_line(std::string_view line);
    void serve(std::istream& in, std::ostream& out);

private:
    // Reply covering the trace steps recorded from index `first` on.
    json reply(std::size_t first, const std::string& error = {}, bool with_failure = false) const;
    json dispatch(const json& request);

    Budgets defaults_;
    std::optional<std::string> source_;
    Budgets budgets_;
    std::optional<Run> run_;
};

}  // namespace hookstep

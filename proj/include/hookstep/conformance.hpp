#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hookstep/runner.hpp"

namespace hookstep {

/// One row of the React behaviour matrix, as a program with an event script
/// and the outcome React shows for it.
struct Scenario {
    int row = 0;
    std::string title;
    std::string source;
    std::vector<std::size_t> events;

    // Unset fields are not checked.
    std::optional<std::size_t> renders;
    std::optional<std::vector<std::string>> console;
    std::optional<std::string> error;
    std::optional<std::uint64_t> error_count;
    // Returns a complaint, or nothing when the trace is as expected.
    std::function<std::optional<std::string>(const TraceFile&)> extra;
};

struct ScenarioResult {
    int row = 0;
    std::string title;
    bool passed = false;
    std::size_t renders = 0;
    std::string outcome;  // "idle" or the error kind
    std::vector<std::string> failures;
};

/// Transitions into Rendered mode: the initial render plus every re-render.
std::size_t render_count(const TraceFile& trace);

const std::vector<Scenario>& conformance_scenarios();
ScenarioResult run_scenario(const Scenario& s, Budgets budgets = {});

}  // namespace hookstep

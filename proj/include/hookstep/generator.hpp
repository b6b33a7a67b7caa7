#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hookstep/domains.hpp"

namespace hookstep {

struct GeneratorOptions {
    std::size_t max_components = 3;
    std::size_t max_states = 3;
    std::size_t max_effects = 2;
    std::size_t max_children = 2;
    std::size_t max_events = 5;
    // Leave out printing updaters, so every queued update is pure.
    bool pure_only = false;
};

struct GeneratedProgram {
    std::string source;
    std::vector<std::size_t> events;
};

/// Random programs over integer state. Components only mount components
/// defined after them, so there is no recursion; most loops are guarded but
/// a few unguarded setters are produced on purpose to exercise the budgets.
class ProgramGenerator {
public:
    explicit ProgramGenerator(std::uint64_t seed, GeneratorOptions opts = {});

    GeneratedProgram next();

private:
    std::size_t pick(std::size_t n);
    bool chance(double p);
    int small(int lo, int hi);

    std::string updater();
    std::string guarded_set(const std::vector<std::string>& setters, const std::vector<std::string>& states);
    std::string int_expr(const std::vector<std::string>& states);
    std::string handler(const std::vector<std::string>& setters, const std::vector<std::string>& states);
    std::string view_expr(std::size_t self, std::size_t count, const std::vector<std::string>& setters,
                          const std::vector<std::string>& states);
    std::string component(std::size_t index, std::size_t count);

    std::mt19937_64 rng_;
    GeneratorOptions opts_;
};

/// Maps each index onto the handlers present when it is dispatched and
/// drops the rest of the script once there are none, so a script only ends
/// early when the engine fails.
std::vector<std::size_t> fit_events(const std::string& source, const std::vector<std::size_t>& raw,
                                    Budgets budgets = {});

std::vector<GeneratedProgram> generate_corpus(std::uint64_t seed, std::size_t count, GeneratorOptions opts = {});

/// Valid views (under `defs`) with random values, queues and decisions, for
/// exercising normalization and similarity directly.
struct ViewCorpus {
    DefinitionTable defs;
    std::vector<std::pair<Path, View>> views;
};

ViewCorpus generate_views(std::uint64_t seed, std::size_t count);

}  // namespace hookstep

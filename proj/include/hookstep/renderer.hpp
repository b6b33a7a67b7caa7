#pragma once

#include <cstddef>
#include <vector>

#include "hookstep/evaluator.hpp"

namespace hookstep {

// The tree judgments. Each threads `mem` in place; fresh paths come from
// `m.counters`.

Tree init(Machine& m, TreeMemory& mem, const Value& spec);
void commit_effs(Machine& m, TreeMemory& mem, const Tree& tree);
/// Never returns Mode::Check.
Mode check(Machine& m, TreeMemory& mem, const Tree& tree);
Tree reconcile(Machine& m, TreeMemory& mem, const Tree& tree, const Value& spec);

struct Handler {
    std::size_t index;
    Closure closure;
};

/// Closure leaves in depth-first, left-to-right order, descending through
/// view children.
std::vector<Handler> handlers(const TreeMemory& mem, const Tree& tree);

Mode join(Mode a, Mode b);

}  // namespace hookstep

#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hookstep/runner.hpp"

namespace hookstep {

// ------------------------------
// purity and normalization
// ------------------------------

/// Syntactic approximation: no print, no hooks, and no application other
/// than of a literal `fun` whose body is itself pure. Sound, not complete.
bool is_pure(const Closure& c);
bool is_pure_expr(const Expr& e);

struct NormalizedEntry {
    Value val;
    std::vector<Closure> sttq;  // the impure suffix
    DecisionSet decisions;
    std::size_t prefix = 0;     // updaters folded
};

/// Folds the pure prefix of the queue into the value. An updater that
/// fails to evaluate ends the prefix.
NormalizedEntry normalize_entry(const StateEntry& entry);
View normalize_view(const View& view);

// ------------------------------
// equality and similarity
// ------------------------------

/// Exact equality: values by value_equiv, queued closures by identity.
bool views_equal(const View& a, const View& b);
bool trees_equal(const Tree& a, const Tree& b);

/// Equality that forgets closure identity (closures compare by parameter and
/// body) and, optionally, the effect queues. Used where two runs allocate
/// closures independently.
struct ShapeOptions {
    bool effects = true;
    bool check = true;
};
bool same_shape(const Value& a, const Value& b);
bool same_shape(const Tree& a, const Tree& b);
bool same_shape(const View& a, const View& b, ShapeOptions opts = {});
bool same_shape(const TreeMemory& a, const TreeMemory& b, ShapeOptions opts = {});

bool views_similar(const View& a, const View& b);
std::set<Path> reachable(const TreeMemory& mem, const Tree& tree);
/// Reachable views similar, every other path equal.
bool mems_similar(const TreeMemory& a, const TreeMemory& b, const Tree& tree);
/// Every reachable view replaced by its normal form.
TreeMemory normalize_memory(const TreeMemory& mem, const Tree& tree);

// ------------------------------
// invariants
// ------------------------------

bool view_valid(const View& view, const DefinitionTable& defs);
bool check_validity(const TreeMemory& mem, const DefinitionTable& defs);
bool view_coherent(const View& view);
bool check_coherence(const TreeMemory& mem, const Tree& tree);

/// One body pass from the view (Check removed, effects cleared) reproduces
/// it. Effects compare up to closure identity. Evaluation errors propagate.
bool check_stability(const View& view, Path path, const DefinitionTable& defs);
/// Stability of the view with its queues emptied, ignoring Check and the
/// effect queue.
bool check_semi_stability(const View& view, Path path, const DefinitionTable& defs);
/// One body pass from the view and from its normal form agree on every
/// state entry the body mentions.
bool check_e_equivalence(const View& view, Path path, const DefinitionTable& defs);

// ------------------------------
// theorem checkers
// ------------------------------

/// Every body pass whose derivation fired AppSetComp ends with Check.
bool check_theorem_reeval(const TraceFile& trace);
/// After every StepCheck, a reachable view has Effect exactly when its or an
/// ancestor's state changed, or its or an ancestor's body fired AppSetComp.
bool check_theorem_effect_condition(const TraceFile& trace);

class InapplicableImpureUpdates : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// At every Check-mode state of the run, stepping from the normalized
/// memory lands on the same configuration as the real step (up to closure
/// identity and effect queues). Throws InapplicableImpureUpdates unless
/// every setter updater in the program is pure.
bool check_similar_transition(const std::string& source, const std::vector<std::size_t>& events,
                              Budgets budgets = {});

// ------------------------------
// suites over one run
// ------------------------------

struct SuiteResult {
    std::string name;
    std::size_t checked = 0;
    std::size_t failed = 0;
    bool skipped = false;
    std::string note;

    bool ok() const { return failed == 0; }
};

struct InvariantReport {
    std::vector<SuiteResult> suites;
    TraceFile trace;

    bool ok() const;
    const SuiteResult* find(const std::string& name) const;
};

/// Runs the program with the event script and checks every oracle along
/// the way.
InvariantReport run_invariant_suites(const std::string& source, const std::vector<std::size_t>& events,
                                     Budgets budgets = {});

}  // namespace hookstep

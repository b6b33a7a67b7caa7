#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hookstep/domains.hpp"

namespace hookstep {

using json = nlohmann::json;

enum class RuleTag {
    StepInit, StepEffect, StepCheck, StepEvent,
    AppCom, AppSetComp, AppSetNormal, SttBind, SttReBind, Eff,
    EvalOnce, EvalMult,
    InitConst, InitClos, InitArray, InitCom,
    CommitEffsConst, CommitEffsClos, CommitEffsArray, CommitEffsPathIdle, CommitEffsPath,
    CheckConst, CheckClos, CheckArray, CheckIdle, CheckNoEffect, CheckEffect,
    ReconcileArray, ReconcileComEffect, ReconcileComNew, ReconcileOther,
};

std::string_view to_string(RuleTag tag);
std::optional<RuleTag> rule_from_string(std::string_view s);
bool is_transition(RuleTag tag);

/// One render-layer rule application. Base-layer rules (Var, Cond, ...) are
/// not recorded.
struct RuleFired {
    RuleTag rule;
    std::optional<Path> path;
    std::optional<Label> label;
    std::string detail;

    bool operator==(const RuleFired&) const = default;
};

class Sink {
public:
    virtual ~Sink() = default;
    virtual void rule(RuleFired r) = 0;
    virtual void console(std::string line) = 0;
};

class NullSink final : public Sink {
public:
    void rule(RuleFired) override {}
    void console(std::string) override {}
};

/// Keeps everything; optionally echoes console lines as they are printed.
class CollectingSink final : public Sink {
public:
    explicit CollectingSink(std::ostream* echo = nullptr) : echo_(echo) {}

    void rule(RuleFired r) override { rules.push_back(std::move(r)); }
    void console(std::string line) override;

    std::vector<RuleFired> take_rules();
    std::vector<std::string> take_console();

    std::vector<RuleFired> rules;
    std::vector<std::string> lines;

private:
    std::ostream* echo_;
};

// ------------------------------
// snapshots
// ------------------------------

json value_to_json(const Value& v);
json tree_to_json(const Tree& t);

struct StateSnapshot {
    json val;
    std::vector<json> sttq;  // closure summaries, queue order

    bool operator==(const StateSnapshot&) const = default;
};

struct ViewSnapshot {
    std::string name;
    json arg;
    std::vector<std::string> dec;
    std::map<std::uint32_t, StateSnapshot> sttst;
    std::size_t effq_len = 0;
    json child;

    bool operator==(const ViewSnapshot&) const = default;
};

struct Snapshot {
    json root;
    std::map<std::uint64_t, ViewSnapshot> views;  // orphans included
    Mode mode = Mode::Rendered;

    bool operator==(const Snapshot&) const = default;
};

Snapshot take_snapshot(const Tree& root, const TreeMemory& mem, Mode mode);

/// Paths reachable from the snapshot root through view children.
std::set<std::uint64_t> snapshot_reachable(const Snapshot& s);

/// Parent path of every reachable view (root views map to nothing).
std::map<std::uint64_t, std::optional<std::uint64_t>> snapshot_parents(const Snapshot& s);

json snapshot_to_json(const Snapshot& s);
Snapshot snapshot_from_json(const json& j);

struct SnapshotChange {
    enum class Kind { Added, Removed, Field, Unreachable, Root, Mode };
    Kind kind;
    std::optional<std::uint64_t> path;
    std::string field;
    json before;
    json after;
};

std::string_view to_string(SnapshotChange::Kind k);

std::vector<SnapshotChange> snapshot_diff(const Snapshot& a, const Snapshot& b);
json diff_to_json(const std::vector<SnapshotChange>& changes);

// ------------------------------
// trace files
// ------------------------------

struct StepRecord {
    std::size_t index = 0;
    RuleTag transition = RuleTag::StepInit;
    std::vector<std::string> console;
    std::vector<RuleFired> rules;
    Snapshot snapshot;

    bool operator==(const StepRecord&) const = default;
};

struct ErrorRecord {
    std::string kind;
    std::string message;
    std::optional<std::uint64_t> path;
    std::optional<std::uint64_t> count;

    bool operator==(const ErrorRecord&) const = default;
};

struct Outcome {
    enum class Status { Idle, Error, Incomplete };
    Status status = Status::Incomplete;
    std::optional<ErrorRecord> error;
    // Output of the failed transition up to the failure point.
    std::vector<std::string> console;
    std::vector<RuleFired> rules;

    bool operator==(const Outcome&) const = default;
};

struct TraceFile {
    std::string program;
    Budgets budgets;
    std::vector<std::size_t> events;
    std::vector<StepRecord> steps;
    Outcome outcome;

    bool operator==(const TraceFile&) const = default;
};

inline constexpr int kTraceFormat = 1;

class TraceFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json rule_to_json(const RuleFired& r);
RuleFired rule_from_json(const json& j);
json step_to_json(const StepRecord& s);
json trace_to_json(const TraceFile& t);
TraceFile trace_from_json(const json& j);

std::string serialize(const TraceFile& t);
/// Throws TraceFormatError on malformed input.
TraceFile deserialize(std::string_view bytes);

/// All console lines of a trace, in order, including a failed tail.
std::vector<std::string> trace_console(const TraceFile& t);

}  // namespace hookstep

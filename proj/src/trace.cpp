#include "hookstep/trace.hpp"

#include <array>
#include <functional>

namespace hookstep {

namespace {

constexpr std::array<std::pair<RuleTag, std::string_view>, 31> kRuleNames{{
    {RuleTag::StepInit, "StepInit"},
    {RuleTag::StepEffect, "StepEffect"},
    {RuleTag::StepCheck, "StepCheck"},
    {RuleTag::StepEvent, "StepEvent"},
    {RuleTag::AppCom, "AppCom"},
    {RuleTag::AppSetComp, "AppSetComp"},
    {RuleTag::AppSetNormal, "AppSetNormal"},
    {RuleTag::SttBind, "SttBind"},
    {RuleTag::SttReBind, "SttReBind"},
    {RuleTag::Eff, "Eff"},
    {RuleTag::EvalOnce, "EvalOnce"},
    {RuleTag::EvalMult, "EvalMult"},
    {RuleTag::InitConst, "InitConst"},
    {RuleTag::InitClos, "InitClos"},
    {RuleTag::InitArray, "InitArray"},
    {RuleTag::InitCom, "InitCom"},
    {RuleTag::CommitEffsConst, "CommitEffsConst"},
    {RuleTag::CommitEffsClos, "CommitEffsClos"},
    {RuleTag::CommitEffsArray, "CommitEffsArray"},
    {RuleTag::CommitEffsPathIdle, "CommitEffsPathIdle"},
    {RuleTag::CommitEffsPath, "CommitEffsPath"},
    {RuleTag::CheckConst, "CheckConst"},
    {RuleTag::CheckClos, "CheckClos"},
    {RuleTag::CheckArray, "CheckArray"},
    {RuleTag::CheckIdle, "CheckIdle"},
    {RuleTag::CheckNoEffect, "CheckNoEffect"},
    {RuleTag::CheckEffect, "CheckEffect"},
    {RuleTag::ReconcileArray, "ReconcileArray"},
    {RuleTag::ReconcileComEffect, "ReconcileComEffect"},
    {RuleTag::ReconcileComNew, "ReconcileComNew"},
    {RuleTag::ReconcileOther, "ReconcileOther"},
}};

}  // namespace

std::string_view to_string(RuleTag tag) {
    for (const auto& [t, name] : kRuleNames) {
        if (t == tag) return name;
    }
    return "?";
}

std::optional<RuleTag> rule_from_string(std::string_view s) {
    for (const auto& [t, name] : kRuleNames) {
        if (name == s) return t;
    }
    return std::nullopt;
}

bool is_transition(RuleTag tag) {
    return tag == RuleTag::StepInit || tag == RuleTag::StepEffect || tag == RuleTag::StepCheck ||
           tag == RuleTag::StepEvent;
}

void CollectingSink::console(std::string line) {
    if (echo_) *echo_ << line << '\n' << std::flush;
    lines.push_back(std::move(line));
}

std::vector<RuleFired> CollectingSink::take_rules() { return std::exchange(rules, {}); }
std::vector<std::string> CollectingSink::take_console() { return std::exchange(lines, {}); }

// ------------------------------
// values and trees
// ------------------------------

namespace {

json constant_to_json(const Constant& c) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UnitValue>) {
                return {{"kind", "unit"}};
            } else if constexpr (std::is_same_v<T, bool>) {
                return {{"kind", "bool"}, {"value", x}};
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return {{"kind", "int"}, {"value", x}};
            } else {
                return {{"kind", "string"}, {"value", x}};
            }
        },
        c);
}

json closure_summary(const Closure& c) {
    return {{"kind", "closure"}, {"id", c.id}, {"param", c.param}, {"body_src", print_expr(*c.body)}};
}

}  // namespace

json value_to_json(const Value& v) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return constant_to_json(x);
            } else if constexpr (std::is_same_v<T, Closure>) {
                return closure_summary(x);
            } else if constexpr (std::is_same_v<T, Setter>) {
                return {{"kind", "setter"}, {"label", x.label.id}, {"path", x.path.id}};
            } else if constexpr (std::is_same_v<T, ComponentRef>) {
                return {{"kind", "component"}, {"name", x.name}};
            } else if constexpr (std::is_same_v<T, ComSpec>) {
                return {{"kind", "comspec"}, {"name", x.name}, {"arg", value_to_json(*x.arg)}};
            } else {
                json items = json::array();
                for (const auto& item : x.items) items.push_back(value_to_json(item));
                return {{"kind", "array"}, {"items", items}};
            }
        },
        v.node);
}

json tree_to_json(const Tree& t) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return constant_to_json(x);
            } else if constexpr (std::is_same_v<T, Closure>) {
                return closure_summary(x);
            } else if constexpr (std::is_same_v<T, Path>) {
                return {{"kind", "path"}, {"path", x.id}};
            } else {
                json items = json::array();
                for (const auto& item : x) items.push_back(tree_to_json(item));
                return {{"kind", "array"}, {"items", items}};
            }
        },
        t.node);
}

// ------------------------------
// snapshots
// ------------------------------

Snapshot take_snapshot(const Tree& root, const TreeMemory& mem, Mode mode) {
    Snapshot s;
    s.root = tree_to_json(root);
    s.mode = mode;
    for (const auto& [path, view] : mem) {
        ViewSnapshot v;
        v.name = view.spec.name;
        v.arg = view.spec.arg ? value_to_json(*view.spec.arg) : json{{"kind", "unit"}};
        if (view.dec.check) v.dec.emplace_back("Check");
        if (view.dec.effect) v.dec.emplace_back("Effect");
        for (const auto& [label, entry] : view.store) {
            StateSnapshot st;
            st.val = value_to_json(entry.value);
            for (const auto& c : entry.queue) st.sttq.push_back(closure_summary(c));
            v.sttst.emplace(label.id, std::move(st));
        }
        v.effq_len = view.effects.size();
        v.child = tree_to_json(view.child);
        s.views.emplace(path.id, std::move(v));
    }
    return s;
}

namespace {

void walk_paths(const json& tree, const std::function<void(std::uint64_t)>& visit) {
    const std::string kind = tree.at("kind").get<std::string>();
    if (kind == "path") {
        visit(tree.at("path").get<std::uint64_t>());
    } else if (kind == "array") {
        for (const auto& item : tree.at("items")) walk_paths(item, visit);
    }
}

}  // namespace

std::map<std::uint64_t, std::optional<std::uint64_t>> snapshot_parents(const Snapshot& s) {
    std::map<std::uint64_t, std::optional<std::uint64_t>> parents;
    std::vector<std::uint64_t> work;
    walk_paths(s.root, [&](std::uint64_t p) {
        if (parents.emplace(p, std::nullopt).second) work.push_back(p);
    });
    while (!work.empty()) {
        std::uint64_t p = work.back();
        work.pop_back();
        auto it = s.views.find(p);
        if (it == s.views.end()) continue;
        walk_paths(it->second.child, [&](std::uint64_t c) {
            if (parents.emplace(c, p).second) work.push_back(c);
        });
    }
    return parents;
}

std::set<std::uint64_t> snapshot_reachable(const Snapshot& s) {
    std::set<std::uint64_t> out;
    for (const auto& [p, parent] : snapshot_parents(s)) out.insert(p);
    return out;
}

json snapshot_to_json(const Snapshot& s) {
    json views = json::object();
    for (const auto& [path, v] : s.views) {
        json sttst = json::object();
        for (const auto& [label, st] : v.sttst) {
            sttst[std::to_string(label)] = {
                {"val", st.val}, {"sttq_len", st.sttq.size()}, {"sttq", st.sttq}};
        }
        views[std::to_string(path)] = {
            {"spec", {{"name", v.name}, {"arg", v.arg}}},
            {"dec", v.dec},
            {"sttst", sttst},
            {"effq_len", v.effq_len},
            {"child", v.child},
        };
    }
    return {{"root", s.root}, {"views", views}, {"mode", to_string(s.mode)}};
}

namespace {

std::uint64_t parse_key(const std::string& key) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(key, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != key.size()) throw TraceFormatError("bad numeric key '" + key + "'");
    return v;
}

}  // namespace

Snapshot snapshot_from_json(const json& j) {
    Snapshot s;
    s.root = j.at("root");
    auto mode = mode_from_string(j.at("mode").get<std::string>());
    if (!mode) throw TraceFormatError("unknown mode");
    s.mode = *mode;
    for (const auto& [key, vj] : j.at("views").items()) {
        ViewSnapshot v;
        v.name = vj.at("spec").at("name").get<std::string>();
        v.arg = vj.at("spec").at("arg");
        v.dec = vj.at("dec").get<std::vector<std::string>>();
        for (const auto& [label, sj] : vj.at("sttst").items()) {
            StateSnapshot st;
            st.val = sj.at("val");
            st.sttq = sj.at("sttq").get<std::vector<json>>();
            if (sj.at("sttq_len").get<std::size_t>() != st.sttq.size()) {
                throw TraceFormatError("sttq_len disagrees with sttq");
            }
            v.sttst.emplace(static_cast<std::uint32_t>(parse_key(label)), std::move(st));
        }
        v.effq_len = vj.at("effq_len").get<std::size_t>();
        v.child = vj.at("child");
        s.views.emplace(parse_key(key), std::move(v));
    }
    return s;
}

std::string_view to_string(SnapshotChange::Kind k) {
    switch (k) {
    case SnapshotChange::Kind::Added: return "added";
    case SnapshotChange::Kind::Removed: return "removed";
    case SnapshotChange::Kind::Field: return "field";
    case SnapshotChange::Kind::Unreachable: return "unreachable";
    case SnapshotChange::Kind::Root: return "root";
    case SnapshotChange::Kind::Mode: return "mode";
    }
    return "?";
}

std::vector<SnapshotChange> snapshot_diff(const Snapshot& a, const Snapshot& b) {
    using Kind = SnapshotChange::Kind;
    std::vector<SnapshotChange> out;
    if (a.mode != b.mode) {
        out.push_back({Kind::Mode, std::nullopt, "mode", to_string(a.mode), to_string(b.mode)});
    }
    if (a.root != b.root) out.push_back({Kind::Root, std::nullopt, "root", a.root, b.root});

    auto field = [&](std::uint64_t p, std::string name, const json& x, const json& y) {
        if (x != y) out.push_back({Kind::Field, p, std::move(name), x, y});
    };
    for (const auto& [p, va] : a.views) {
        auto it = b.views.find(p);
        if (it == b.views.end()) {
            out.push_back({Kind::Removed, p, "", json(va.name), nullptr});
            continue;
        }
        const ViewSnapshot& vb = it->second;
        field(p, "spec", json{{"name", va.name}, {"arg", va.arg}}, json{{"name", vb.name}, {"arg", vb.arg}});
        field(p, "dec", va.dec, vb.dec);
        std::set<std::uint32_t> labels;
        for (const auto& [l, st] : va.sttst) labels.insert(l);
        for (const auto& [l, st] : vb.sttst) labels.insert(l);
        for (auto l : labels) {
            auto sa = va.sttst.find(l);
            auto sb = vb.sttst.find(l);
            std::string prefix = "sttst." + std::to_string(l) + ".";
            json val_a = sa == va.sttst.end() ? json(nullptr) : sa->second.val;
            json val_b = sb == vb.sttst.end() ? json(nullptr) : sb->second.val;
            json len_a = sa == va.sttst.end() ? json(nullptr) : json(sa->second.sttq.size());
            json len_b = sb == vb.sttst.end() ? json(nullptr) : json(sb->second.sttq.size());
            field(p, prefix + "val", val_a, val_b);
            field(p, prefix + "sttq_len", len_a, len_b);
        }
        field(p, "effq_len", va.effq_len, vb.effq_len);
        field(p, "child", va.child, vb.child);
    }
    for (const auto& [p, vb] : b.views) {
        if (!a.views.contains(p)) out.push_back({Kind::Added, p, "", nullptr, json(vb.name)});
    }
    auto reach_a = snapshot_reachable(a);
    auto reach_b = snapshot_reachable(b);
    for (auto p : reach_a) {
        if (!reach_b.contains(p) && b.views.contains(p)) {
            out.push_back({Kind::Unreachable, p, "", true, false});
        }
    }
    return out;
}

json diff_to_json(const std::vector<SnapshotChange>& changes) {
    json out = json::array();
    for (const auto& c : changes) {
        json j = {{"kind", to_string(c.kind)}, {"field", c.field}, {"before", c.before}, {"after", c.after}};
        j["path"] = c.path ? json(*c.path) : json(nullptr);
        out.push_back(std::move(j));
    }
    return out;
}

// ------------------------------
// trace files
// ------------------------------

json rule_to_json(const RuleFired& r) {
    return {
        {"rule", to_string(r.rule)},
        {"path", r.path ? json(r.path->id) : json(nullptr)},
        {"label", r.label ? json(r.label->id) : json(nullptr)},
        {"detail", r.detail},
    };
}

RuleFired rule_from_json(const json& j) {
    RuleFired r;
    auto tag = rule_from_string(j.at("rule").get<std::string>());
    if (!tag) throw TraceFormatError("unknown rule tag");
    r.rule = *tag;
    if (!j.at("path").is_null()) r.path = Path{j.at("path").get<std::uint64_t>()};
    if (!j.at("label").is_null()) r.label = Label{j.at("label").get<std::uint32_t>()};
    r.detail = j.at("detail").get<std::string>();
    return r;
}

namespace {

json rules_to_json(const std::vector<RuleFired>& rules) {
    json out = json::array();
    for (const auto& r : rules) out.push_back(rule_to_json(r));
    return out;
}

std::vector<RuleFired> rules_from_json(const json& j) {
    std::vector<RuleFired> out;
    for (const auto& r : j) out.push_back(rule_from_json(r));
    return out;
}

std::string_view status_name(Outcome::Status s) {
    switch (s) {
    case Outcome::Status::Idle: return "idle";
    case Outcome::Status::Error: return "error";
    case Outcome::Status::Incomplete: return "incomplete";
    }
    return "incomplete";
}

json optional_number(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::uint64_t> number_or_null(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<std::uint64_t>();
}

}  // namespace

json step_to_json(const StepRecord& s) {
    return {
        {"index", s.index},
        {"transition", to_string(s.transition)},
        {"console", s.console},
        {"rules", rules_to_json(s.rules)},
        {"snapshot", snapshot_to_json(s.snapshot)},
    };
}

json trace_to_json(const TraceFile& t) {
    json steps = json::array();
    for (const auto& s : t.steps) steps.push_back(step_to_json(s));
    json outcome = {{"status", status_name(t.outcome.status)}};
    if (t.outcome.error) {
        const auto& e = *t.outcome.error;
        outcome["error"] = {
            {"kind", e.kind}, {"message", e.message}, {"path", optional_number(e.path)},
            {"count", optional_number(e.count)}};
        outcome["console"] = t.outcome.console;
        outcome["rules"] = rules_to_json(t.outcome.rules);
    }
    return {
        {"format", kTraceFormat},
        {"program", t.program},
        {"budgets", {{"retry_limit", t.budgets.retry_limit}, {"rerender_limit", t.budgets.rerender_limit}}},
        {"events", t.events},
        {"steps", steps},
        {"outcome", outcome},
    };
}

TraceFile trace_from_json(const json& j) {
    try {
        if (j.at("format").get<int>() != kTraceFormat) throw TraceFormatError("unsupported trace format");
        TraceFile t;
        t.program = j.at("program").get<std::string>();
        t.budgets.retry_limit = j.at("budgets").at("retry_limit").get<std::uint64_t>();
        t.budgets.rerender_limit = j.at("budgets").at("rerender_limit").get<std::uint64_t>();
        t.events = j.at("events").get<std::vector<std::size_t>>();
        for (const auto& sj : j.at("steps")) {
            StepRecord s;
            s.index = sj.at("index").get<std::size_t>();
            if (s.index != t.steps.size()) throw TraceFormatError("step indices are not contiguous");
            auto tag = rule_from_string(sj.at("transition").get<std::string>());
            if (!tag || !is_transition(*tag)) throw TraceFormatError("bad transition tag");
            s.transition = *tag;
            s.console = sj.at("console").get<std::vector<std::string>>();
            s.rules = rules_from_json(sj.at("rules"));
            s.snapshot = snapshot_from_json(sj.at("snapshot"));
            t.steps.push_back(std::move(s));
        }
        const json& oj = j.at("outcome");
        std::string status = oj.at("status").get<std::string>();
        if (status == "idle") {
            t.outcome.status = Outcome::Status::Idle;
        } else if (status == "incomplete") {
            t.outcome.status = Outcome::Status::Incomplete;
        } else if (status == "error") {
            t.outcome.status = Outcome::Status::Error;
            const json& ej = oj.at("error");
            t.outcome.error = ErrorRecord{ej.at("kind").get<std::string>(), ej.at("message").get<std::string>(),
                                          number_or_null(ej.at("path")), number_or_null(ej.at("count"))};
            t.outcome.console = oj.at("console").get<std::vector<std::string>>();
            t.outcome.rules = rules_from_json(oj.at("rules"));
        } else {
            throw TraceFormatError("unknown outcome status '" + status + "'");
        }
        return t;
    } catch (const json::exception& e) {
        throw TraceFormatError(std::string("malformed trace: ") + e.what());
    }
}

std::string serialize(const TraceFile& t) { return trace_to_json(t).dump(1) + "\n"; }

TraceFile deserialize(std::string_view bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        throw TraceFormatError(std::string("malformed trace: ") + e.what());
    }
    return trace_from_json(j);
}

std::vector<std::string> trace_console(const TraceFile& t) {
    std::vector<std::string> out;
    for (const auto& s : t.steps) out.insert(out.end(), s.console.begin(), s.console.end());
    out.insert(out.end(), t.outcome.console.begin(), t.outcome.console.end());
    return out;
}

}  // namespace hookstep

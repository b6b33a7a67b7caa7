#include "hookstep/session.hpp"

#include <cstdint>
#include <string>

namespace hookstep {

namespace {

json error_reply(const std::string& message) {
    return json{{"ok", false},     {"mode", nullptr},  {"console", json::array()}, {"rules", json::array()},
                {"snapshot", nullptr}, {"steps", json::array()}, {"error", message}};
}

std::uint64_t budget_field(const json& request, const char* key, std::uint64_t fallback) {
    if (!request.contains(key)) return fallback;
    const json& v = request.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
        throw std::invalid_argument(std::string("\"") + key + "\" must be a positive integer");
    }
    return v.get<std::uint64_t>();
}

}  // namespace

json Session::reply(std::size_t first, const std::string& error, bool with_failure) const {
    const TraceFile& t = run_->trace();
    json console = json::array();
    json rules = json::array();
    json steps = json::array();
    for (std::size_t i = first; i < t.steps.size(); ++i) {
        const StepRecord& s = t.steps[i];
        for (const auto& line : s.console) console.push_back(line);
        for (const auto& r : s.rules) rules.push_back(rule_to_json(r));
        steps.push_back(step_to_json(s));
    }
    if (with_failure) {
        for (const auto& line : t.outcome.console) console.push_back(line);
        for (const auto& r : t.outcome.rules) rules.push_back(rule_to_json(r));
    }
    json out{{"ok", error.empty()}, {"mode", nullptr}, {"console", std::move(console)}, {"rules", std::move(rules)},
             {"snapshot", nullptr}, {"steps", std::move(steps)}};
    if (run_->booted()) {
        const EngineConfig& cfg = run_->config();
        out["mode"] = std::string(to_string(cfg.mode));
        out["snapshot"] = snapshot_to_json(take_snapshot(cfg.root, cfg.mem, cfg.mode));
    }
    if (!error.empty()) out["error"] = error;
    return out;
}

json Session::dispatch(const json& request) {
    if (!request.is_object() || !request.contains("cmd") || !request.at("cmd").is_string()) {
        return error_reply("malformed request: expected an object with a string \"cmd\"");
    }
    const std::string cmd = request.at("cmd").get<std::string>();

    if (cmd == "load") {
        if (!request.contains("program") || !request.at("program").is_string()) {
            return error_reply("load needs a string \"program\"");
        }
        Budgets b = defaults_;
        try {
            b.retry_limit = budget_field(request, "retry_limit", b.retry_limit);
            b.rerender_limit = budget_field(request, "rerender_limit", b.rerender_limit);
        } catch (const std::invalid_argument& e) {
            return error_reply(e.what());
        }
        std::string source = request.at("program").get<std::string>();
        try {
            run_.emplace(source, b);
        } catch (const SyntaxError& e) {
            run_.reset();
            source_.reset();
            return error_reply(e.what());
        }
        source_ = std::move(source);
        budgets_ = b;
        return reply(0);
    }

    if (cmd != "step" && cmd != "run_until_idle" && cmd != "event" && cmd != "snapshot" && cmd != "reset") {
        return error_reply("unknown command \"" + cmd + "\"");
    }
    if (!run_) return error_reply("no program loaded");

    if (cmd == "reset") {
        run_.emplace(*source_, budgets_);
        return reply(0);
    }
    const std::size_t first = run_->trace().steps.size();
    if (cmd == "snapshot") return reply(first);
    if (run_->failed()) {
        return reply(first, "the run ended with an error; send reset or load");
    }

    std::optional<std::size_t> handler;
    if (cmd == "event") {
        if (!request.contains("handler") || !request.at("handler").is_number_integer() ||
            request.at("handler").get<std::int64_t>() < 0) {
            return reply(first, "event needs a non-negative integer \"handler\"");
        }
        handler = request.at("handler").get<std::size_t>();
    }
    try {
        if (cmd == "step") {
            run_->step();
        } else if (cmd == "run_until_idle") {
            run_->run_until_idle();
        } else {
            run_->dispatch(*handler);
        }
    } catch (const EngineError& e) {
        // The run is only dead if the engine itself failed; protocol misuse
        // like a bad handler index leaves it where it was.
        return reply(first, e.what(), run_->failed());
    }
    return reply(first);
}

json Session::handle(const json& request) {
    try {
        return dispatch(request);
    } catch (const std::exception& e) {
        return error_reply(std::string("internal error: ") + e.what());
    }
}

std::string Session::handle_line(std::string_view line) {
    json request;
    try {
        request = json::parse(line);
    } catch (const json::parse_error& e) {
        return error_reply(std::string("malformed request: ") + e.what()).dump();
    }
    return handle(request).dump();
}

void Session::serve(std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out << handle_line(line) << '\n' << std::flush;
    }
}

}  // namespace hookstep

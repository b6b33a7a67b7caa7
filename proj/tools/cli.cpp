#include "cli.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hookstep/conformance.hpp"
#include "hookstep/generator.hpp"
#include "hookstep/oracle.hpp"
#include "hookstep/session.hpp"

namespace hookstep {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_events(const std::string& text) {
    std::vector<std::size_t> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
            throw UsageError("--events expects semicolon-separated handler indices, got \"" + text + "\"");
        }
        out.push_back(v);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string budget_note(const Budgets& b) {
    return "(retry limit " + std::to_string(b.retry_limit) + ", rerender limit " + std::to_string(b.rerender_limit) +
           ")";
}

void report_error(std::ostream& err, const ErrorRecord& e, const Budgets& b) {
    err << "error: " << e.message << " " << budget_note(b) << "\n";
}

void print_report(std::ostream& os, const InvariantReport& report) {
    for (const auto& s : report.suites) {
        os << (s.skipped ? "SKIP" : s.ok() ? "ok  " : "FAIL") << "  " << std::left << std::setw(26) << s.name;
        if (!s.skipped) os << s.checked - s.failed << "/" << s.checked;
        if (!s.note.empty()) os << "  " << s.note;
        os << "\n";
    }
}

struct Options {
    std::string file;
    std::string events;
    std::string output;
    Budgets budgets;
    bool check_invariants = false;
    bool verify = false;
    std::uint64_t seed = 1;
    std::size_t count = 200;
};

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
    std::string source = read_file(o.file);
    std::vector<std::size_t> events = parse_events(o.events);
    TraceFile t = record_run(source, events, o.budgets, &out);
    int status = 0;
    if (t.outcome.error) {
        report_error(err, *t.outcome.error, o.budgets);
        status = 1;
    }
    if (o.check_invariants) {
        InvariantReport r = run_invariant_suites(source, events, o.budgets);
        print_report(err, r);
        if (!r.ok()) status = 1;
    }
    return status;
}

int cmd_trace(const Options& o, std::ostream& err) {
    TraceFile t = record_run(read_file(o.file), parse_events(o.events), o.budgets);
    std::ofstream f(o.output, std::ios::binary);
    if (!f) throw UsageError("cannot write " + o.output);
    f << serialize(t);
    if (t.outcome.error) {
        report_error(err, *t.outcome.error, o.budgets);
        return 1;
    }
    return 0;
}

int cmd_replay(const Options& o, std::ostream& out, std::ostream& err) {
    std::string bytes = read_file(o.file);
    TraceFile t;
    try {
        t = deserialize(bytes);
    } catch (const TraceFormatError& e) {
        err << "error: malformed trace: " << e.what() << "\n";
        return 1;
    }
    for (const auto& line : trace_console(t)) out << line << "\n";
    if (o.verify) {
        TraceFile again = record_run(t.program, t.events, t.budgets);
        if (serialize(again) != bytes) {
            err << "error: re-running the program does not reproduce this trace\n";
            return 1;
        }
    }
    if (t.outcome.error) {
        report_error(err, *t.outcome.error, t.budgets);
        return 1;
    }
    return 0;
}

int cmd_conform(std::ostream& out) {
    int failed = 0;
    out << "row  result  renders  outcome                        scenario\n";
    for (const auto& s : conformance_scenarios()) {
        ScenarioResult r = run_scenario(s);
        out << std::right << std::setw(3) << r.row << "  " << (r.passed ? "pass  " : "FAIL  ") << std::setw(7)
            << r.renders << "  " << std::left << std::setw(29) << r.outcome << "  " << r.title << "\n";
        for (const auto& f : r.failures) out << "       " << f << "\n";
        if (!r.passed) ++failed;
    }
    out << (conformance_scenarios().size() - static_cast<std::size_t>(failed)) << "/"
        << conformance_scenarios().size() << " scenarios pass\n";
    return failed ? 1 : 0;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
    if (!o.file.empty()) {
        InvariantReport r = run_invariant_suites(read_file(o.file), parse_events(o.events), o.budgets);
        print_report(out, r);
        if (r.trace.outcome.error) err << "note: the run ended with " << r.trace.outcome.error->message << "\n";
        return r.ok() ? 0 : 1;
    }
    std::size_t failed = 0;
    std::size_t skipped_similar = 0;
    ProgramGenerator gen(o.seed);
    for (std::size_t i = 0; i < o.count; ++i) {
        GeneratedProgram g = gen.next();
        InvariantReport r = run_invariant_suites(g.source, g.events, o.budgets);
        if (r.find("similar transitions")->skipped) ++skipped_similar;
        if (!r.ok()) {
            ++failed;
            out << "program " << i << " fails:\n" << g.source;
            print_report(out, r);
        }
    }
    out << o.count - failed << "/" << o.count << " generated programs pass (seed " << o.seed << ", "
        << skipped_similar << " with impure updaters skipped the similarity check)\n";
    return failed ? 1 : 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Executable semantics of React-style hooks: run, trace and check programs.", "hookstep"};
    app.require_subcommand(1);
    Options o;

    auto add_budgets = [&](CLI::App* cmd) {
        cmd->add_option("--retry-limit", o.budgets.retry_limit, "Body passes before RetryLimitExceeded")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--rerender-limit", o.budgets.rerender_limit, "Re-renders before RerenderLimitExceeded")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* run = app.add_subcommand("run", "Run a program to idle and print its console");
    run->add_option("file", o.file, "Program source")->required();
    run->add_option("--events", o.events, "Handler indices, one per EventLoop visit, e.g. \"0;0;1\"");
    run->add_flag("--check-invariants", o.check_invariants, "Also run every oracle suite over the run");
    add_budgets(run);

    CLI::App* trace = app.add_subcommand("trace", "Run a program and write its .rtrace.json");
    trace->add_option("file", o.file, "Program source")->required();
    trace->add_option("-o,--output", o.output, "Trace file to write")->required();
    trace->add_option("--events", o.events, "Handler indices, one per EventLoop visit");
    add_budgets(trace);

    CLI::App* replay = app.add_subcommand("replay", "Print the console recorded in a trace file");
    replay->add_option("file", o.file, "Trace file")->required();
    replay->add_flag("--verify", o.verify, "Re-run the program and require an identical trace");

    CLI::App* serve = app.add_subcommand("serve", "Speak the JSON-lines session protocol on stdin/stdout");
    add_budgets(serve);

    CLI::App* conform = app.add_subcommand("conform", "Run the scenario corpus and print the pass/fail matrix");

    CLI::App* check = app.add_subcommand("check", "Run the oracle suites on a program, or on a generated corpus");
    check->add_option("file", o.file, "Program source; omit to check a generated corpus");
    check->add_option("--events", o.events, "Handler indices, one per EventLoop visit");
    check->add_option("--seed,--corpus-seed", o.seed, "Generator seed for the corpus");
    check->add_option("--count", o.count, "Number of generated programs");
    add_budgets(check);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(o, out, err);
        if (trace->parsed()) return cmd_trace(o, err);
        if (replay->parsed()) return cmd_replay(o, out, err);
        if (conform->parsed()) return cmd_conform(out);
        if (check->parsed()) return cmd_check(o, out, err);
        if (serve->parsed()) {
            Session session(o.budgets);
            session.serve(in, out);
            return 0;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const SyntaxError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace hookstep

#include <doctest.h>

#include <algorithm>
#include <set>

#include "hookstep/generator.hpp"
#include "hookstep/syntax.hpp"
#include "test_helpers.hpp"

using namespace hookstep;

namespace {

SyntaxErrorKind error_kind(const std::string& src) {
    try {
        parse_program(src);
    } catch (const SyntaxError& e) {
        return e.kind();
    }
    FAIL("expected a syntax error for: " << src);
    return SyntaxErrorKind::Syntax;
}

}  // namespace

TEST_SUITE("syntax") {

TEST_CASE("literal main") {
    Program p = parse_program("42");
    CHECK(p.defs.empty());
    REQUIRE(std::holds_alternative<ast::Int>(p.main->node));
    CHECK(std::get<ast::Int>(p.main->node).value == 42);
}

TEST_CASE("counter listing") {
    Program p = parse_program(
        "let Counter x = let (s, setS) = useState x in [s, button (fun _ -> setS (fun s -> s+1); setS (fun s -> "
        "s+1))];; Counter 0");
    REQUIRE(p.defs.size() == 1);
    CHECK(p.defs[0].name == "Counter");
    CHECK(p.defs[0].param == "x");
    auto labels = labels_of(p);
    REQUIRE(labels.size() == 1);
    CHECK(labels[0].id == 0);
    const auto& app = std::get<ast::App>(p.main->node);
    CHECK(std::get<ast::Component>(app.fn->node).name == "Counter");
    CHECK(std::get<ast::Int>(app.arg->node).value == 0);
}

TEST_CASE("button desugars and if gets a unit else") {
    Program p = parse_program("button (if true then 1)");
    const auto& cond = std::get<ast::If>(p.main->node);
    CHECK(std::holds_alternative<ast::Unit>(cond.else_branch->node));
}

TEST_CASE("labels follow pre-order across definitions") {
    Program p = parse_program(
        "let A x = let (a, sa) = useState 0 in let (b, sb) = useState 1 in a;;\n"
        "let B x = let (c, sc) = useState 2 in c;;\nA 0");
    auto labels = labels_of(p);
    REQUIRE(labels.size() == 3);
    CHECK(labels[0].id == 0);
    CHECK(labels[1].id == 1);
    CHECK(labels[2].id == 2);
}

TEST_CASE("hook placement is enforced") {
    CHECK(error_kind("let C x = if x then (let (s,t) = useState 0 in s) else 0;; C true") ==
          SyntaxErrorKind::HookPlacement);
    CHECK(error_kind("let C x = fun y -> useEffect (print 1);; C 0") == SyntaxErrorKind::HookPlacement);
    CHECK(error_kind("let C x = [useEffect (print 1)];; C 0") == SyntaxErrorKind::HookPlacement);
    CHECK(error_kind("let C x = print (useEffect 1);; C 0") == SyntaxErrorKind::HookPlacement);
    CHECK(error_kind("let (s, t) = useState 0 in s") == SyntaxErrorKind::HookPlacement);
    CHECK(error_kind("useEffect (print 1)") == SyntaxErrorKind::HookPlacement);
}

TEST_CASE("hooks on the spine are accepted") {
    CHECK_NOTHROW(parse_program("let C x = print 1; useEffect (print 2); let y = 3 in let (s, t) = useState y in s;; C 0"));
}

TEST_CASE("malformed input") {
    CHECK(error_kind("let C x = ;; C 0") == SyntaxErrorKind::Syntax);
    CHECK(error_kind("(1") == SyntaxErrorKind::Syntax);
    CHECK(error_kind("\"open") == SyntaxErrorKind::Syntax);
    CHECK(error_kind("let A x = 1;; let A y = 2;; A 0") == SyntaxErrorKind::DuplicateComponent);
}

TEST_CASE("comments nest") {
    Program p = parse_program("(* a (* nested *) comment *) 7");
    CHECK(std::get<ast::Int>(p.main->node).value == 7);
}

TEST_CASE("definition table") {
    Program p = parse_program(program_text("demo.rtr"));
    auto [table, main] = build_def_table(p);
    REQUIRE(table.size() == 1);
    CHECK(table.count("Demo") == 1);
    CHECK(table.at("Demo").param == "x");
    CHECK(same_tree(*main, *p.main));

    Program two = parse_program("let A x = x + 1;; let B y = [y];; A 1");
    auto [t2, m2] = build_def_table(two);
    REQUIRE(t2.size() == 2);
    CHECK(same_tree(*t2.at("A").body, *parse_program("x + 1").main));
    CHECK(same_tree(*t2.at("B").body, *parse_program("[y]").main));
}

TEST_CASE("operator precedence") {
    Program a = parse_program("1 + 2 * 3 = 7 && true || false");
    Program b = parse_program("(((1 + (2 * 3)) = 7) && true) || false");
    CHECK(same_tree(*a.main, *b.main));
    CHECK(same_tree(*parse_program("s mod 2 = 0").main, *parse_program("(s mod 2) = 0").main));
    CHECK(same_tree(*parse_program("f x y").main, *parse_program("(f x) y").main));
}

TEST_CASE("round trip on the sample programs") {
    for (const char* name : {"counter.rtr", "counter_print.rtr", "demo.rtr", "flicker.rtr", "impure_updates.rtr",
                             "inf.rtr", "inf2.rtr", "parent_child.rtr", "parity.rtr", "selfcounter.rtr",
                             "empty-main-42.rtr"}) {
        CAPTURE(name);
        Program p = parse_program(program_text(name));
        Program q = parse_program(print_program(p));
        CHECK(same_program(p, q));
    }
}

TEST_CASE("round trip, label injectivity and hook rejection on generated programs") {
    ProgramGenerator gen(11);
    for (int i = 0; i < 300; ++i) {
        GeneratedProgram g = gen.next();
        CAPTURE(g.source);
        Program p = parse_program(g.source);
        std::string printed = print_program(p);
        Program q = parse_program(printed);
        CHECK(same_program(p, q));
        CHECK(print_program(q) == printed);

        auto labels = labels_of(p);
        std::set<std::uint32_t> distinct;
        for (Label l : labels) distinct.insert(l.id);
        CHECK(distinct.size() == labels.size());

        // Wrapping the first hook-bearing body in a lambda must be rejected.
        for (const auto& def : p.defs) {
            if (labels_of(*def.body).empty()) continue;
            std::string bad = "let Bad x = fun y -> (" + print_expr(*def.body) + ");;\n0";
            CHECK(error_kind(bad) == SyntaxErrorKind::HookPlacement);
            std::string bad_if = "let Bad x = if true then (" + print_expr(*def.body) + ") else ();;\n0";
            CHECK(error_kind(bad_if) == SyntaxErrorKind::HookPlacement);
            std::string bad_arr = "let Bad x = [(" + print_expr(*def.body) + ")];;\n0";
            CHECK(error_kind(bad_arr) == SyntaxErrorKind::HookPlacement);
            std::string bad_arg = "let Bad x = print (" + print_expr(*def.body) + ");;\n0";
            CHECK(error_kind(bad_arg) == SyntaxErrorKind::HookPlacement);
            break;
        }
    }
}

TEST_CASE("negative literals print parenthesized") {
    Program p = parse_program("-3 + 1");
    CHECK(same_program(p, parse_program(print_program(p))));
}

}

#include "hookstep/syntax.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace hookstep {

std::string_view to_string(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "mod";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "<>";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    }
    return "?";
}

std::string_view to_string(SyntaxErrorKind kind) {
    switch (kind) {
    case SyntaxErrorKind::Syntax: return "SyntaxError";
    case SyntaxErrorKind::HookPlacement: return "HookPlacementError";
    case SyntaxErrorKind::DuplicateComponent: return "DuplicateComponent";
    }
    return "SyntaxError";
}

SyntaxError::SyntaxError(SyntaxErrorKind kind, SourcePos pos, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " at " + std::to_string(pos.line) + ":" +
                         std::to_string(pos.column) + ": " + message),
      kind_(kind), pos_(pos) {}

namespace {

// ------------------------------
// lexer
// ------------------------------

enum class Tok {
    Int, String, Ident, CName,
    Let, In, Fun, If, Then, Else, True, False, UseState, UseEffect, Print, Button, Mod,
    LParen, RParen, LBracket, RBracket, Comma, Semi, SemiSemi, Arrow,
    Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, AndAnd, OrOr,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
};

const std::map<std::string, Tok, std::less<>>& keywords() {
    static const std::map<std::string, Tok, std::less<>> table{
        {"let", Tok::Let},       {"in", Tok::In},
        {"fun", Tok::Fun},       {"if", Tok::If},
        {"then", Tok::Then},     {"else", Tok::Else},
        {"true", Tok::True},     {"false", Tok::False},
        {"useState", Tok::UseState}, {"useEffect", Tok::UseEffect},
        {"print", Tok::Print},   {"button", Tok::Button},
        {"mod", Tok::Mod},
    };
    return table;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            SourcePos start = pos_;
            if (at_end()) {
                out.push_back({Tok::End, "", start});
                return out;
            }
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string digits;
                while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) digits += advance();
                out.push_back({Tok::Int, digits, start});
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string word;
                while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                                     peek() == '\'')) {
                    word += advance();
                }
                if (auto it = keywords().find(word); it != keywords().end()) {
                    out.push_back({it->second, word, start});
                } else if (std::isupper(static_cast<unsigned char>(word[0]))) {
                    out.push_back({Tok::CName, word, start});
                } else {
                    out.push_back({Tok::Ident, word, start});
                }
            } else if (c == '"') {
                out.push_back({Tok::String, lex_string(), start});
            } else {
                out.push_back({lex_symbol(), "", start});
            }
        }
    }

private:
    bool at_end() const { return index_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return index_ + ahead < src_.size() ? src_[index_ + ahead] : '\0';
    }
    char advance() {
        char c = src_[index_++];
        if (c == '\n') {
            ++pos_.line;
            pos_.column = 1;
        } else {
            ++pos_.column;
        }
        return c;
    }

    [[noreturn]] void fail(SourcePos at, const std::string& message) const {
        throw SyntaxError(SyntaxErrorKind::Syntax, at, message);
    }

    void skip_space_and_comments() {
        for (;;) {
            while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
            if (peek() == '(' && peek(1) == '*') {
                SourcePos open = pos_;
                advance();
                advance();
                int depth = 1;
                while (depth > 0) {
                    if (at_end()) fail(open, "unterminated comment");
                    if (peek() == '(' && peek(1) == '*') {
                        advance();
                        advance();
                        ++depth;
                    } else if (peek() == '*' && peek(1) == ')') {
                        advance();
                        advance();
                        --depth;
                    } else {
                        advance();
                    }
                }
                continue;
            }
            return;
        }
    }

    std::string lex_string() {
        SourcePos open = pos_;
        advance();
        std::string text;
        for (;;) {
            if (at_end()) fail(open, "unterminated string literal");
            char c = advance();
            if (c == '"') return text;
            if (c == '\\') {
                if (at_end()) fail(open, "unterminated string literal");
                char e = advance();
                switch (e) {
                case 'n': text += '\n'; break;
                case 't': text += '\t'; break;
                case '\\': text += '\\'; break;
                case '"': text += '"'; break;
                default: fail(pos_, std::string("unknown escape \\") + e);
                }
            } else {
                text += c;
            }
        }
    }

    Tok lex_symbol() {
        SourcePos at = pos_;
        char c = advance();
        switch (c) {
        case '(': return Tok::LParen;
        case ')': return Tok::RParen;
        case '[': return Tok::LBracket;
        case ']': return Tok::RBracket;
        case ',': return Tok::Comma;
        case ';':
            if (peek() == ';') {
                advance();
                return Tok::SemiSemi;
            }
            return Tok::Semi;
        case '-':
            if (peek() == '>') {
                advance();
                return Tok::Arrow;
            }
            return Tok::Minus;
        case '=': return Tok::Eq;
        case '<':
            if (peek() == '>') {
                advance();
                return Tok::Ne;
            }
            if (peek() == '=') {
                advance();
                return Tok::Le;
            }
            return Tok::Lt;
        case '>':
            if (peek() == '=') {
                advance();
                return Tok::Ge;
            }
            return Tok::Gt;
        case '+': return Tok::Plus;
        case '*': return Tok::Star;
        case '/': return Tok::Slash;
        case '&':
            if (peek() == '&') {
                advance();
                return Tok::AndAnd;
            }
            break;
        case '|':
            if (peek() == '|') {
                advance();
                return Tok::OrOr;
            }
            break;
        default: break;
        }
        fail(at, std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    std::size_t index_ = 0;
    SourcePos pos_;
};

// ------------------------------
// parser
// ------------------------------

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Int:
    case Tok::Ident:
    case Tok::CName: return "'" + t.text + "'";
    case Tok::String: return "string literal";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::SemiSemi: return "';;'";
    case Tok::Arrow: return "'->'";
    default: return t.text.empty() ? "operator" : "'" + t.text + "'";
    }
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Program program() {
        Program prog;
        std::set<std::string, std::less<>> seen;
        while (at(Tok::Let) && at(Tok::CName, 1)) {
            SourcePos pos = next().pos;
            std::string name = next().text;
            if (!seen.insert(name).second) {
                throw SyntaxError(SyntaxErrorKind::DuplicateComponent, pos,
                                  "component '" + name + "' is defined more than once");
            }
            std::string param = expect(Tok::Ident, "component parameter").text;
            expect(Tok::Eq, "'='");
            ExprPtr body = seq();
            expect(Tok::SemiSemi, "';;' after component definition");
            prog.defs.push_back({std::move(name), std::move(param), std::move(body), pos});
        }
        prog.main = seq();
        if (at(Tok::SemiSemi)) next();
        if (!at(Tok::End)) fail("unexpected " + describe(peek()) + " after main expression");
        return prog;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(index_ + ahead, toks_.size() - 1);
        return toks_[i];
    }
    bool at(Tok kind, std::size_t ahead = 0) const { return peek(ahead).kind == kind; }
    const Token& next() {
        const Token& t = toks_[index_];
        if (index_ + 1 < toks_.size()) ++index_;
        return t;
    }
    [[noreturn]] void fail(const std::string& message) const {
        throw SyntaxError(SyntaxErrorKind::Syntax, peek().pos, message);
    }
    const Token& expect(Tok kind, const std::string& what) {
        if (!at(kind)) fail("expected " + what + ", found " + describe(peek()));
        return next();
    }

    ExprPtr seq() {
        ExprPtr first = nonseq();
        if (!at(Tok::Semi)) return first;
        SourcePos pos = next().pos;
        ExprPtr second = seq();
        return make_expr(ast::Seq{std::move(first), std::move(second)}, pos);
    }

    ExprPtr nonseq() {
        switch (peek().kind) {
        case Tok::Let: return let_form();
        case Tok::Fun: return fun_form();
        case Tok::If: return if_form();
        default: return binary(0);
        }
    }

    ExprPtr let_form() {
        SourcePos pos = next().pos;
        if (at(Tok::LParen)) {
            next();
            std::string value = expect(Tok::Ident, "state variable name").text;
            expect(Tok::Comma, "','");
            std::string setter = expect(Tok::Ident, "setter name").text;
            expect(Tok::RParen, "')'");
            expect(Tok::Eq, "'='");
            expect(Tok::UseState, "useState");
            Label label{next_label_++};
            ExprPtr init = seq();
            expect(Tok::In, "'in'");
            ExprPtr body = seq();
            return make_expr(ast::UseState{std::move(value), std::move(setter), label, std::move(init),
                                           std::move(body)},
                             pos);
        }
        if (at(Tok::CName)) fail("component definitions are only allowed at the top level");
        std::string name = expect(Tok::Ident, "identifier after 'let'").text;
        expect(Tok::Eq, "'='");
        ExprPtr bound = seq();
        expect(Tok::In, "'in'");
        ExprPtr body = seq();
        return make_expr(ast::Let{std::move(name), std::move(bound), std::move(body)}, pos);
    }

    ExprPtr fun_form() {
        SourcePos pos = next().pos;
        std::string param = expect(Tok::Ident, "parameter after 'fun'").text;
        expect(Tok::Arrow, "'->'");
        ExprPtr body = seq();
        return make_expr(ast::Fun{std::move(param), std::move(body)}, pos);
    }

    ExprPtr if_form() {
        SourcePos pos = next().pos;
        ExprPtr cond = seq();
        expect(Tok::Then, "'then'");
        ExprPtr then_branch = nonseq();
        ExprPtr else_branch;
        if (at(Tok::Else)) {
            next();
            else_branch = nonseq();
        } else {
            else_branch = make_expr(ast::Unit{}, pos);
        }
        return make_expr(ast::If{std::move(cond), std::move(then_branch), std::move(else_branch)}, pos);
    }

    // Binary operator tiers, loosest first.
    static constexpr int kTiers = 5;

    static bool tier_op(int tier, Tok kind, BinOp& op) {
        switch (tier) {
        case 0:
            if (kind == Tok::OrOr) { op = BinOp::Or; return true; }
            return false;
        case 1:
            if (kind == Tok::AndAnd) { op = BinOp::And; return true; }
            return false;
        case 2:
            switch (kind) {
            case Tok::Eq: op = BinOp::Eq; return true;
            case Tok::Ne: op = BinOp::Ne; return true;
            case Tok::Lt: op = BinOp::Lt; return true;
            case Tok::Le: op = BinOp::Le; return true;
            case Tok::Gt: op = BinOp::Gt; return true;
            case Tok::Ge: op = BinOp::Ge; return true;
            default: return false;
            }
        case 3:
            if (kind == Tok::Plus) { op = BinOp::Add; return true; }
            if (kind == Tok::Minus) { op = BinOp::Sub; return true; }
            return false;
        case 4:
            if (kind == Tok::Star) { op = BinOp::Mul; return true; }
            if (kind == Tok::Slash) { op = BinOp::Div; return true; }
            if (kind == Tok::Mod) { op = BinOp::Mod; return true; }
            return false;
        default: return false;
        }
    }

    ExprPtr binary(int tier) {
        if (tier == kTiers) return application();
        ExprPtr lhs = binary(tier + 1);
        BinOp op{};
        while (tier_op(tier, peek().kind, op)) {
            SourcePos pos = next().pos;
            ExprPtr rhs = binary(tier + 1);
            lhs = make_expr(ast::Binary{op, std::move(lhs), std::move(rhs)}, pos);
        }
        return lhs;
    }

    bool atom_start() const {
        switch (peek().kind) {
        case Tok::Int:
        case Tok::String:
        case Tok::Ident:
        case Tok::CName:
        case Tok::True:
        case Tok::False:
        case Tok::LParen:
        case Tok::LBracket: return true;
        default: return false;
        }
    }

    ExprPtr application() {
        ExprPtr head;
        SourcePos pos = peek().pos;
        switch (peek().kind) {
        case Tok::Print:
            next();
            head = make_expr(ast::Print{atom()}, pos);
            break;
        case Tok::UseEffect:
            next();
            head = make_expr(ast::UseEffect{atom()}, pos);
            break;
        case Tok::Button:
            next();
            head = atom();
            break;
        case Tok::UseState:
            fail("useState must be bound with 'let (x, setX) = useState e in ...'");
        default: head = atom();
        }
        while (atom_start()) {
            SourcePos at_pos = peek().pos;
            ExprPtr arg = atom();
            head = make_expr(ast::App{std::move(head), std::move(arg)}, at_pos);
        }
        return head;
    }

    std::int64_t integer(const Token& t, bool negative) const {
        std::int64_t value = 0;
        std::string text = negative ? "-" + t.text : t.text;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw SyntaxError(SyntaxErrorKind::Syntax, t.pos, "integer literal out of range");
        }
        return value;
    }

    ExprPtr atom() {
        const Token& t = peek();
        SourcePos pos = t.pos;
        switch (t.kind) {
        case Tok::Int: {
            std::int64_t v = integer(next(), false);
            return make_expr(ast::Int{v}, pos);
        }
        case Tok::Minus:
            if (at(Tok::Int, 1)) {
                next();
                std::int64_t v = integer(next(), true);
                return make_expr(ast::Int{v}, pos);
            }
            break;
        case Tok::String: return make_expr(ast::Str{next().text}, pos);
        case Tok::True: next(); return make_expr(ast::Bool{true}, pos);
        case Tok::False: next(); return make_expr(ast::Bool{false}, pos);
        case Tok::Ident: return make_expr(ast::Var{next().text}, pos);
        case Tok::CName: return make_expr(ast::Component{next().text}, pos);
        case Tok::LParen: {
            next();
            if (at(Tok::RParen)) {
                next();
                return make_expr(ast::Unit{}, pos);
            }
            ExprPtr inner = seq();
            expect(Tok::RParen, "')'");
            return inner;
        }
        case Tok::LBracket: {
            next();
            std::vector<ExprPtr> items;
            if (!at(Tok::RBracket)) {
                items.push_back(seq());
                while (at(Tok::Comma)) {
                    next();
                    items.push_back(seq());
                }
            }
            expect(Tok::RBracket, "']'");
            return make_expr(ast::Array{std::move(items)}, pos);
        }
        default: break;
        }
        fail("expected an expression, found " + describe(t));
    }

    std::vector<Token> toks_;
    std::size_t index_ = 0;
    std::uint32_t next_label_ = 0;
};

// ------------------------------
// hook placement
// ------------------------------

// `spine` holds for positions evaluated exactly once, unconditionally, per
// body evaluation: the body itself and both halves of a let / sequence /
// state-binding chain that starts there.
void check_hooks(const Expr& e, bool spine, bool in_component) {
    auto reject = [&](std::string_view hook) {
        std::string where = in_component ? "only allowed at the top level of a component body"
                                         : "not allowed outside component bodies";
        throw SyntaxError(SyntaxErrorKind::HookPlacement, e.pos, std::string(hook) + " is " + where);
    };
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ast::UseState>) {
                if (!spine) reject("useState");
                check_hooks(*n.init, false, in_component);
                check_hooks(*n.body, true, in_component);
            } else if constexpr (std::is_same_v<T, ast::UseEffect>) {
                if (!spine) reject("useEffect");
                check_hooks(*n.body, false, in_component);
            } else if constexpr (std::is_same_v<T, ast::Seq>) {
                check_hooks(*n.first, spine, in_component);
                check_hooks(*n.second, spine, in_component);
            } else if constexpr (std::is_same_v<T, ast::Let>) {
                check_hooks(*n.bound, spine, in_component);
                check_hooks(*n.body, spine, in_component);
            } else if constexpr (std::is_same_v<T, ast::Binary>) {
                check_hooks(*n.lhs, false, in_component);
                check_hooks(*n.rhs, false, in_component);
            } else if constexpr (std::is_same_v<T, ast::If>) {
                check_hooks(*n.cond, false, in_component);
                check_hooks(*n.then_branch, false, in_component);
                check_hooks(*n.else_branch, false, in_component);
            } else if constexpr (std::is_same_v<T, ast::Fun>) {
                check_hooks(*n.body, false, in_component);
            } else if constexpr (std::is_same_v<T, ast::App>) {
                check_hooks(*n.fn, false, in_component);
                check_hooks(*n.arg, false, in_component);
            } else if constexpr (std::is_same_v<T, ast::Array>) {
                for (const auto& item : n.items) check_hooks(*item, false, in_component);
            } else if constexpr (std::is_same_v<T, ast::Print>) {
                check_hooks(*n.arg, false, in_component);
            }
        },
        e.node);
}

// ------------------------------
// printer
// ------------------------------

// Precedence levels used by the printer; a node printed in a context whose
// level exceeds its own gets parentheses.
enum Level : int { kSeq = 0, kOpen = 1, kOr = 2, kAnd = 3, kCmp = 4, kAdd = 5, kMul = 6, kApp = 7, kAtom = 8 };

int op_level(BinOp op) {
    switch (op) {
    case BinOp::Or: return kOr;
    case BinOp::And: return kAnd;
    case BinOp::Add:
    case BinOp::Sub: return kAdd;
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod: return kMul;
    default: return kCmp;
    }
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    return out + "\"";
}

class Printer {
public:
    std::string out;

    // `tail`: nothing follows this expression before its enclosing delimiter,
    // so forms that extend rightwards (fun, let) may run unparenthesized.
    void emit(const Expr& e, int level, bool tail) {
        std::visit([&](const auto& n) { node(n, level, tail); }, e.node);
    }

private:
    void wrap(bool parens, auto&& body) {
        if (parens) out += '(';
        body(parens);
        if (parens) out += ')';
    }

    void node(const ast::Unit&, int, bool) { out += "()"; }
    void node(const ast::Bool& n, int, bool) { out += n.value ? "true" : "false"; }
    void node(const ast::Int& n, int, bool) {
        if (n.value < 0) {
            out += "(" + std::to_string(n.value) + ")";
        } else {
            out += std::to_string(n.value);
        }
    }
    void node(const ast::Str& n, int, bool) { out += quote(n.value); }
    void node(const ast::Var& n, int, bool) { out += n.name; }
    void node(const ast::Component& n, int, bool) { out += n.name; }

    void node(const ast::Binary& n, int level, bool) {
        int own = op_level(n.op);
        wrap(level > own, [&](bool) {
            emit(*n.lhs, own, false);
            out += ' ';
            out += to_string(n.op);
            out += ' ';
            emit(*n.rhs, own + 1, false);
        });
    }

    void node(const ast::App& n, int level, bool) {
        wrap(level > kApp, [&](bool) {
            emit(*n.fn, kApp, false);
            out += ' ';
            emit(*n.arg, kAtom, false);
        });
    }

    void node(const ast::Print& n, int level, bool) {
        wrap(level > kApp, [&](bool) {
            out += "print ";
            emit(*n.arg, kAtom, false);
        });
    }

    void node(const ast::UseEffect& n, int level, bool) {
        wrap(level > kApp, [&](bool) {
            out += "useEffect ";
            emit(*n.body, kAtom, false);
        });
    }

    void node(const ast::Array& n, int, bool) {
        out += '[';
        for (std::size_t i = 0; i < n.items.size(); ++i) {
            if (i) out += ", ";
            emit(*n.items[i], kSeq, true);
        }
        out += ']';
    }

    void node(const ast::If& n, int level, bool tail) {
        wrap(level > kOpen, [&](bool parens) {
            out += "if ";
            emit(*n.cond, kSeq, true);
            out += " then ";
            emit(*n.then_branch, kOpen, true);
            out += " else ";
            emit(*n.else_branch, kOpen, parens || tail);
        });
    }

    void node(const ast::Fun& n, int level, bool tail) {
        wrap(level > kOpen || !tail, [&](bool) {
            out += "fun " + n.param + " -> ";
            emit(*n.body, kSeq, true);
        });
    }

    void node(const ast::Let& n, int level, bool tail) {
        wrap(level > kOpen || !tail, [&](bool) {
            out += "let " + n.name + " = ";
            emit(*n.bound, kSeq, true);
            out += " in ";
            emit(*n.body, kSeq, true);
        });
    }

    void node(const ast::UseState& n, int level, bool tail) {
        wrap(level > kOpen || !tail, [&](bool) {
            out += "let (" + n.value_name + ", " + n.setter_name + ") = useState ";
            emit(*n.init, kSeq, true);
            out += " in ";
            emit(*n.body, kSeq, true);
        });
    }

    void node(const ast::Seq& n, int level, bool tail) {
        wrap(level > kSeq, [&](bool parens) {
            emit(*n.first, kOpen, false);
            out += "; ";
            emit(*n.second, kSeq, parens || tail);
        });
    }
};

void collect_labels(const Expr& e, std::vector<Label>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ast::UseState>) {
                out.push_back(n.label);
                collect_labels(*n.init, out);
                collect_labels(*n.body, out);
            } else if constexpr (std::is_same_v<T, ast::Binary>) {
                collect_labels(*n.lhs, out);
                collect_labels(*n.rhs, out);
            } else if constexpr (std::is_same_v<T, ast::If>) {
                collect_labels(*n.cond, out);
                collect_labels(*n.then_branch, out);
                collect_labels(*n.else_branch, out);
            } else if constexpr (std::is_same_v<T, ast::Fun>) {
                collect_labels(*n.body, out);
            } else if constexpr (std::is_same_v<T, ast::App>) {
                collect_labels(*n.fn, out);
                collect_labels(*n.arg, out);
            } else if constexpr (std::is_same_v<T, ast::Seq>) {
                collect_labels(*n.first, out);
                collect_labels(*n.second, out);
            } else if constexpr (std::is_same_v<T, ast::Let>) {
                collect_labels(*n.bound, out);
                collect_labels(*n.body, out);
            } else if constexpr (std::is_same_v<T, ast::Array>) {
                for (const auto& item : n.items) collect_labels(*item, out);
            } else if constexpr (std::is_same_v<T, ast::UseEffect>) {
                collect_labels(*n.body, out);
            } else if constexpr (std::is_same_v<T, ast::Print>) {
                collect_labels(*n.arg, out);
            }
        },
        e.node);
}

bool same(const ExprPtr& a, const ExprPtr& b) { return same_tree(*a, *b); }

}  // namespace

Program parse_program(std::string_view source) {
    Program prog = Parser(Lexer(source).run()).program();
    for (const auto& def : prog.defs) check_hooks(*def.body, true, true);
    check_hooks(*prog.main, false, false);
    return prog;
}

std::pair<DefinitionTable, ExprPtr> build_def_table(const Program& program) {
    DefinitionTable table;
    for (const auto& def : program.defs) table.emplace(def.name, def);
    return {std::move(table), program.main};
}

std::string print_expr(const Expr& expr) {
    Printer p;
    p.emit(expr, kSeq, true);
    return std::move(p.out);
}

std::string print_program(const Program& program) {
    std::string out;
    for (const auto& def : program.defs) {
        out += "let " + def.name + " " + def.param + " =\n  " + print_expr(*def.body) + ";;\n";
    }
    out += print_expr(*program.main);
    out += '\n';
    return out;
}

std::vector<Label> labels_of(const Expr& expr) {
    std::vector<Label> out;
    collect_labels(expr, out);
    return out;
}

std::vector<Label> labels_of(const Program& program) {
    std::vector<Label> out;
    for (const auto& def : program.defs) collect_labels(*def.body, out);
    collect_labels(*program.main, out);
    return out;
}

bool same_tree(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, ast::Unit>) {
                return true;
            } else if constexpr (std::is_same_v<T, ast::Bool> || std::is_same_v<T, ast::Int> ||
                                 std::is_same_v<T, ast::Str>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, ast::Var> || std::is_same_v<T, ast::Component>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, ast::Binary>) {
                return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
            } else if constexpr (std::is_same_v<T, ast::If>) {
                return same(x.cond, y.cond) && same(x.then_branch, y.then_branch) &&
                       same(x.else_branch, y.else_branch);
            } else if constexpr (std::is_same_v<T, ast::Fun>) {
                return x.param == y.param && same(x.body, y.body);
            } else if constexpr (std::is_same_v<T, ast::App>) {
                return same(x.fn, y.fn) && same(x.arg, y.arg);
            } else if constexpr (std::is_same_v<T, ast::Seq>) {
                return same(x.first, y.first) && same(x.second, y.second);
            } else if constexpr (std::is_same_v<T, ast::Let>) {
                return x.name == y.name && same(x.bound, y.bound) && same(x.body, y.body);
            } else if constexpr (std::is_same_v<T, ast::Array>) {
                if (x.items.size() != y.items.size()) return false;
                for (std::size_t i = 0; i < x.items.size(); ++i) {
                    if (!same(x.items[i], y.items[i])) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, ast::UseState>) {
                return x.value_name == y.value_name && x.setter_name == y.setter_name &&
                       x.label == y.label && same(x.init, y.init) && same(x.body, y.body);
            } else if constexpr (std::is_same_v<T, ast::UseEffect>) {
                return same(x.body, y.body);
            } else {
                return same(x.arg, y.arg);
            }
        },
        a.node);
}

bool same_program(const Program& a, const Program& b) {
    if (a.defs.size() != b.defs.size()) return false;
    for (std::size_t i = 0; i < a.defs.size(); ++i) {
        const auto& x = a.defs[i];
        const auto& y = b.defs[i];
        if (x.name != y.name || x.param != y.param || !same_tree(*x.body, *y.body)) return false;
    }
    return same_tree(*a.main, *b.main);
}

}  // namespace hookstep

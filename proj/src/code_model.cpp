// SPDX-License-Identifier: Apache-2.0
#include "patchtrace/code_model.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace patchtrace {

// ---------------------------------------------------------------------------
// VarRef

std::string VarRef::key() const {
    std::string k = base;
    for (const auto& m : member_path) {
        k += '.';
        k += m;
    }
    return k;
}

bool VarRef::same_object(const VarRef& other) const {
    return base == other.base && member_path == other.member_path;
}

bool VarRef::overlaps(const VarRef& other) const {
    if (base != other.base)
        return false;
    const auto& a = member_path;
    const auto& b = other.member_path;
    const size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i)
        if (a[i] != b[i])
            return false;
    return true;
}

bool operator==(const VarRef& a, const VarRef& b) {
    return a.same_object(b);
}

bool operator<(const VarRef& a, const VarRef& b) {
    if (a.base != b.base)
        return a.base < b.base;
    return a.member_path < b.member_path;
}

const char* to_string(StmtKind k) {
    switch (k) {
    case StmtKind::Assign: return "assign";
    case StmtKind::Call: return "call";
    case StmtKind::Decl: return "decl";
    case StmtKind::Control: return "control";
    case StmtKind::Return: return "return";
    case StmtKind::Goto: return "goto";
    case StmtKind::Label: return "label";
    case StmtKind::MacroUse: return "macro_use";
    case StmtKind::Opaque: return "opaque";
    }
    return "?";
}

const char* to_string(ControlKind k) {
    switch (k) {
    case ControlKind::None: return "none";
    case ControlKind::If: return "if";
    case ControlKind::For: return "for";
    case ControlKind::While: return "while";
    case ControlKind::DoWhile: return "dowhile";
    case ControlKind::Switch: return "switch";
    }
    return "?";
}

const char* to_string(VersionTag tag) {
    return tag == VersionTag::Vulnerable ? "vulnerable" : "patched";
}

bool Statement::uses_var(const std::string& base) const {
    for (const auto& u : uses)
        if (u.base == base)
            return true;
    return false;
}

bool Statement::uses_member_of(const std::string& base) const {
    for (const auto& u : uses)
        if (u.base == base && !u.member_path.empty())
            return true;
    return false;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

struct Token {
    enum class Kind { Ident, Number, Str, CharLit, Punct };
    Kind kind = Kind::Punct;
    std::string text;
    int line = 1;

    bool is(const char* s) const { return text == s; }
    bool ident() const { return kind == Kind::Ident; }
};

struct Directive {
    int line = 1;
    std::string text;  // full logical line without the leading '#'
};

bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;  // tolerate Latin-1 bytes
}
bool is_ident_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

const char* kMultiOps[] = {"<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=",
                           "==", "!=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=",
                           "|=", "^=", "::"};

struct Lexer {
    const std::string& src;
    size_t pos = 0;
    int line = 1;
    std::vector<Token> tokens;
    std::vector<Directive> directives;
    bool at_line_start = true;

    explicit Lexer(const std::string& s) : src(s) {}

    char peek(size_t off = 0) const { return pos + off < src.size() ? src[pos + off] : '\0'; }

    void run() {
        while (pos < src.size()) {
            char c = src[pos];
            if (c == '\n') {
                ++line;
                ++pos;
                at_line_start = true;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
                continue;
            }
            if (c == '/' && peek(1) == '/') {
                while (pos < src.size() && src[pos] != '\n')
                    ++pos;
                continue;
            }
            if (c == '/' && peek(1) == '*') {
                pos += 2;
                while (pos < src.size() && !(src[pos] == '*' && peek(1) == '/')) {
                    if (src[pos] == '\n')
                        ++line;
                    ++pos;
                }
                pos = std::min(pos + 2, src.size());
                continue;
            }
            if (c == '#' && at_line_start) {
                read_directive();
                continue;
            }
            at_line_start = false;
            if (is_ident_start(static_cast<unsigned char>(c))) {
                size_t start = pos;
                while (pos < src.size() && is_ident_char(static_cast<unsigned char>(src[pos])))
                    ++pos;
                tokens.push_back({Token::Kind::Ident, src.substr(start, pos - start), line});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                size_t start = pos;
                while (pos < src.size() &&
                       (is_ident_char(static_cast<unsigned char>(src[pos])) || src[pos] == '.' ||
                        ((src[pos] == '+' || src[pos] == '-') && pos > start &&
                         (src[pos - 1] == 'e' || src[pos - 1] == 'E'))))
                    ++pos;
                tokens.push_back({Token::Kind::Number, src.substr(start, pos - start), line});
                continue;
            }
            if (c == '"' || c == '\'') {
                read_literal(c);
                continue;
            }
            bool matched = false;
            for (const char* op : kMultiOps) {
                size_t n = std::strlen(op);
                if (src.compare(pos, n, op) == 0) {
                    tokens.push_back({Token::Kind::Punct, op, line});
                    pos += n;
                    matched = true;
                    break;
                }
            }
            if (matched)
                continue;
            tokens.push_back({Token::Kind::Punct, std::string(1, c), line});
            ++pos;
        }
    }

    void read_literal(char quote) {
        int start_line = line;
        size_t start = pos;
        ++pos;
        while (pos < src.size() && src[pos] != quote) {
            if (src[pos] == '\\' && pos + 1 < src.size())
                ++pos;
            if (src[pos] == '\n')
                ++line;
            ++pos;
        }
        pos = std::min(pos + 1, src.size());
        tokens.push_back({quote == '"' ? Token::Kind::Str : Token::Kind::CharLit,
                          src.substr(start, pos - start), start_line});
    }

    void read_directive() {
        int start_line = line;
        ++pos;  // '#'
        std::string text;
        while (pos < src.size()) {
            char c = src[pos];
            if (c == '\\' && peek(1) == '\n') {
                pos += 2;
                ++line;
                text += ' ';
                continue;
            }
            if (c == '\n')
                break;
            text += c;
            ++pos;
        }
        // strip trailing // comment
        auto slash = text.find("//");
        if (slash != std::string::npos)
            text.resize(slash);
        directives.push_back({start_line, text});
        at_line_start = false;
    }
};

const std::set<std::string> kKeywords = {
    "if", "else", "for", "while", "do", "switch", "case", "default", "return",
    "goto", "break", "continue", "sizeof", "struct", "union", "enum", "typedef",
    "static", "const", "volatile", "extern", "register", "inline", "void",
    "char", "short", "int", "long", "float", "double", "signed", "unsigned",
    "bool", "_Bool", "auto", "NULL", "nullptr", "true", "false"};

const std::set<std::string> kTypeKeywords = {
    "void", "char", "short", "int", "long", "float", "double", "signed",
    "unsigned", "bool", "_Bool", "struct", "union", "enum", "const", "static",
    "volatile", "extern", "register", "inline", "typedef", "auto"};

const std::set<std::string> kCommonTypeNames = {
    "size_t", "ssize_t", "u8", "u16", "u32", "u64", "s8", "s16", "s32", "s64",
    "uchar", "uint", "ulong", "FILE"};

bool is_type_start(const Token& t) {
    if (t.kind != Token::Kind::Ident)
        return false;
    if (kTypeKeywords.count(t.text))
        return true;
    if (kCommonTypeNames.count(t.text))
        return true;
    if (t.text.size() > 2 && t.text.compare(t.text.size() - 2, 2, "_t") == 0)
        return true;
    return false;
}

bool is_keyword(const std::string& s) {
    return kKeywords.count(s) != 0;
}

// ---------------------------------------------------------------------------
// Token joining: the canonical spacing rule shared by normalize_statement and
// statement text construction.

bool is_word_token(const Token& t) {
    return t.kind != Token::Kind::Punct;
}

const std::set<std::string> kBinaryOps = {
    "+", "-", "*", "/", "%", "<", ">", "<=", ">=", "==", "!=", "&&", "||",
    "&", "|", "^", "<<", ">>", "=", "+=", "-=", "*=", "/=", "%=", "&=",
    "|=", "^=", "<<=", ">>=", "?", ":"};

std::string join_tokens(const std::vector<Token>& toks) {
    // Classify * & + - ++ -- as unary when the previous token cannot end an
    // operand; unary operators bind to their operand with no space.
    std::vector<bool> unary(toks.size(), false);
    for (size_t i = 0; i < toks.size(); ++i) {
        const std::string& t = toks[i].text;
        if (toks[i].kind != Token::Kind::Punct)
            continue;
        if (t == "*" || t == "&" || t == "+" || t == "-" || t == "++" || t == "--" ||
            t == "!" || t == "~") {
            if (i == 0) {
                unary[i] = true;
            } else {
                const Token& p = toks[i - 1];
                bool prev_operand = is_word_token(p) || p.is(")") || p.is("]");
                if (is_word_token(p) && is_keyword(p.text) && p.text != "NULL" &&
                    p.text != "true" && p.text != "false" && !is_type_start(p))
                    prev_operand = false;  // e.g. "return -1"
                unary[i] = !prev_operand;
                if (t == "!" || t == "~")
                    unary[i] = true;
            }
        }
    }
    std::string out;
    for (size_t i = 0; i < toks.size(); ++i) {
        const Token& cur = toks[i];
        if (i > 0) {
            const Token& prev = toks[i - 1];
            bool space = true;
            const std::string& pt = prev.text;
            const std::string& ct = cur.text;
            bool prev_unary = prev.kind == Token::Kind::Punct && unary[i - 1];
            bool cur_postfix_incdec =
                (ct == "++" || ct == "--") && !unary[i];

            if (pt == "(" || pt == "[" || pt == "." || pt == "->")
                space = false;
            else if (prev_unary)
                space = false;
            else if (ct == ")" || ct == "]" || ct == ";" || ct == "," || ct == "." ||
                     ct == "->")
                space = false;
            else if (cur_postfix_incdec)
                space = false;
            else if (ct == "[")
                space = false;
            else if (ct == "(") {
                // no space for calls: ident( or )( or ](
                if (prev.ident() && !is_keyword(pt))
                    space = false;
                else if (pt == ")" || pt == "]")
                    space = false;
                else if (prev.kind == Token::Kind::Punct && !prev_unary && pt != ")" &&
                         pt != "]")
                    space = true;
            }
            if (space)
                out += ' ';
        }
        out += cur.text;
    }
    return out;
}

std::vector<Token> lex_fragment(const std::string& text) {
    Lexer lx(text);
    lx.run();
    return std::move(lx.tokens);
}

}  // namespace

std::string normalize_statement(const std::string& raw_text) {
    return join_tokens(lex_fragment(raw_text));
}

bool is_ignorable_line(const std::string& raw_text) {
    auto toks = lex_fragment(raw_text);
    for (const auto& t : toks)
        if (!t.is("{") && !t.is("}"))
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Expression analysis

namespace {

struct ExprFacts {
    std::vector<VarRef> uses;
    std::vector<CallInfo> calls;
    std::vector<VarRef> array_refs;
    std::vector<VarRef> index_vars;
    std::vector<VarRef> deref_vars;
    std::vector<VarRef> divisors;
    std::vector<VarRef> arith_vars;
};

void push_unique(std::vector<VarRef>& v, const VarRef& r) {
    for (auto& e : v) {
        if (e.same_object(r)) {
            e.is_pointer = e.is_pointer || r.is_pointer;
            e.is_array_access = e.is_array_access || r.is_array_access;
            return;
        }
    }
    v.push_back(r);
}

class ExprScanner {
public:
    ExprScanner(const std::vector<Token>& toks, ExprFacts& facts)
        : toks_(toks), facts_(facts) {}

    void scan(size_t begin, size_t end) { scan_range(begin, end, /*in_index=*/false); }

private:
    const std::vector<Token>& toks_;
    ExprFacts& facts_;

    static bool is_arith(const std::string& t) {
        return t == "+" || t == "-" || t == "*" || t == "+=" || t == "-=" || t == "*=";
    }

    size_t match_close(size_t open, size_t end, const char* o, const char* c) const {
        int depth = 0;
        for (size_t i = open; i < end; ++i) {
            if (toks_[i].is(o))
                ++depth;
            else if (toks_[i].is(c)) {
                --depth;
                if (depth == 0)
                    return i;
            }
        }
        return end;
    }

    // Parses a postfix chain starting at i: ident (. ident | -> ident | [expr])*
    // Returns one past the chain; fills ref.
    size_t parse_chain(size_t i, size_t end, VarRef& ref, bool in_index) {
        ref.base = toks_[i].text;
        ++i;
        while (i < end) {
            if ((toks_[i].is(".") || toks_[i].is("->")) && i + 1 < end && toks_[i + 1].ident()) {
                if (toks_[i].is("->"))
                    ref.is_pointer = true;
                ref.member_path.push_back(toks_[i + 1].text);
                i += 2;
            } else if (toks_[i].is("[")) {
                ref.is_array_access = true;
                size_t close = match_close(i, end, "[", "]");
                scan_index(i + 1, close);
                i = close < end ? close + 1 : end;
            } else {
                break;
            }
        }
        (void)in_index;
        return i;
    }

    void scan_index(size_t begin, size_t end) {
        ExprFacts inner;
        ExprScanner s(toks_, inner);
        s.scan_range(begin, end, /*in_index=*/true);
        for (const auto& u : inner.uses) {
            push_unique(facts_.uses, u);
            push_unique(facts_.index_vars, u);
        }
        for (const auto& c : inner.calls)
            facts_.calls.push_back(c);
        for (const auto& d : inner.divisors)
            push_unique(facts_.divisors, d);
        for (const auto& a : inner.arith_vars)
            push_unique(facts_.arith_vars, a);
        for (const auto& a : inner.array_refs)
            push_unique(facts_.array_refs, a);
        for (const auto& i : inner.index_vars)
            push_unique(facts_.index_vars, i);
        for (const auto& d : inner.deref_vars)
            push_unique(facts_.deref_vars, d);
    }

    void note_context(const VarRef& ref, size_t chain_begin, size_t chain_end, size_t begin,
                      size_t end) {
        // divisor: previous significant token is / or %
        if (chain_begin > begin) {
            const std::string& p = toks_[chain_begin - 1].text;
            if (p == "/" || p == "%")
                push_unique(facts_.divisors, ref);
            if (is_arith(p))
                push_unique(facts_.arith_vars, ref);
            if (p == "*" && chain_begin >= begin + 1) {
                // unary deref? previous-previous token decides
                bool unary = chain_begin == begin + 1;
                if (!unary) {
                    const Token& pp = toks_[chain_begin - 2];
                    bool operand = is_word_token(pp) || pp.is(")") || pp.is("]");
                    if (is_word_token(pp) && is_keyword(pp.text) && pp.text != "NULL")
                        operand = false;
                    unary = !operand;
                }
                if (unary) {
                    VarRef d = ref;
                    d.is_pointer = true;
                    push_unique(facts_.deref_vars, d);
                }
            }
        }
        if (chain_end < end && is_arith(toks_[chain_end].text))
            push_unique(facts_.arith_vars, ref);
        if (ref.is_array_access)
            push_unique(facts_.array_refs, ref);
    }

    void scan_range(size_t begin, size_t end, bool in_index) {
        size_t i = begin;
        while (i < end) {
            const Token& t = toks_[i];
            if (t.ident() && !is_keyword(t.text)) {
                // call?
                VarRef ref;
                size_t after = parse_chain(i, end, ref, in_index);
                if (after < end && toks_[after].is("(")) {
                    size_t close = match_close(after, end, "(", ")");
                    CallInfo ci;
                    ci.callee = ref.member_path.empty() ? ref.base : ref.member_path.back();
                    if (!ref.member_path.empty()) {
                        ci.callee_ref = ref;
                        // a member call reads the object it goes through
                        push_unique(facts_.uses, ref);
                        push_unique(facts_.uses, VarRef{ref.base, {}, ref.is_pointer, false});
                    }
                    parse_args(after + 1, close, ci);
                    facts_.calls.push_back(std::move(ci));
                    i = close < end ? close + 1 : end;
                    continue;
                }
                push_unique(facts_.uses, ref);
                // aggregate weak use keeps member flows connected to the base
                if (!ref.member_path.empty()) {
                    VarRef base{ref.base, {}, ref.is_pointer, false};
                    push_unique(facts_.uses, base);
                }
                note_context(ref, i, after, begin, end);
                i = after;
                continue;
            }
            if (t.ident() && t.text == "sizeof") {
                ++i;
                continue;
            }
            ++i;
        }
    }

    void parse_args(size_t begin, size_t end, CallInfo& ci) {
        size_t arg_start = begin;
        int depth = 0;
        for (size_t i = begin; i <= end; ++i) {
            bool at_end = i == end;
            if (!at_end) {
                const std::string& t = toks_[i].text;
                if (t == "(" || t == "[")
                    ++depth;
                else if (t == ")" || t == "]")
                    --depth;
            }
            if (at_end || (depth == 0 && toks_[i].is(","))) {
                if (i > arg_start) {
                    CallArg arg;
                    if (toks_[arg_start].is("&"))
                        arg.address_of = true;
                    ExprFacts inner;
                    ExprScanner s(toks_, inner);
                    s.scan_range(arg_start, i, false);
                    arg.vars = inner.uses;
                    for (const auto& u : inner.uses)
                        push_unique(facts_.uses, u);
                    for (const auto& c : inner.calls)
                        facts_.calls.push_back(c);
                    for (const auto& d : inner.divisors)
                        push_unique(facts_.divisors, d);
                    for (const auto& a : inner.arith_vars)
                        push_unique(facts_.arith_vars, a);
                    for (const auto& a : inner.array_refs)
                        push_unique(facts_.array_refs, a);
                    for (const auto& ix : inner.index_vars)
                        push_unique(facts_.index_vars, ix);
                    for (const auto& d : inner.deref_vars)
                        push_unique(facts_.deref_vars, d);
                    ci.args.push_back(std::move(arg));
                }
                arg_start = i + 1;
            }
        }
    }
};

void apply_expr_facts(Statement& st, const ExprFacts& f) {
    for (const auto& u : f.uses)
        push_unique(st.uses, u);
    for (const auto& c : f.calls)
        st.calls.push_back(c);
    for (const auto& a : f.array_refs)
        push_unique(st.array_refs, a);
    for (const auto& ix : f.index_vars)
        push_unique(st.index_vars, ix);
    for (const auto& d : f.deref_vars)
        push_unique(st.deref_vars, d);
    for (const auto& d : f.divisors)
        push_unique(st.divisors, d);
    for (const auto& a : f.arith_vars)
        push_unique(st.arith_vars, a);
    if (!st.calls.empty() && !st.callee)
        st.callee = st.calls.front().callee;
}

// ---------------------------------------------------------------------------
// Statement-level parser

class UnitParser {
public:
    UnitParser(std::string path, const std::string& content) : unit_() {
        unit_.path = std::move(path);
        std::istringstream is(content);
        std::string line;
        while (std::getline(is, line))
            unit_.raw_lines.push_back(line);
        Lexer lx(content);
        lx.run();
        toks_ = std::move(lx.tokens);
        for (const auto& d : lx.directives)
            handle_directive(d);
    }

    SourceUnit parse() {
        parse_top_level();
        return std::move(unit_);
    }

private:
    SourceUnit unit_;
    std::vector<Token> toks_;
    int next_id_ = 0;

    void handle_directive(const Directive& d) {
        std::istringstream is(d.text);
        std::string word;
        is >> word;
        if (word == "include") {
            std::string rest;
            std::getline(is, rest);
            auto q1 = rest.find_first_of("\"<");
            auto q2 = rest.find_first_of("\">", q1 == std::string::npos ? 0 : q1 + 1);
            if (q1 != std::string::npos && q2 != std::string::npos)
                unit_.includes.push_back(rest.substr(q1 + 1, q2 - q1 - 1));
        } else if (word == "define") {
            auto toks = lex_fragment(d.text);
            if (toks.size() >= 2 && toks[1].ident()) {
                std::string name = toks[1].text;
                std::vector<Token> body(toks.begin() + 2, toks.end());
                // skip the parameter list of function-like macros
                if (!body.empty() && body.front().is("(")) {
                    size_t depth = 0, i = 0;
                    for (; i < body.size(); ++i) {
                        if (body[i].is("("))
                            ++depth;
                        else if (body[i].is(")")) {
                            if (--depth == 0) {
                                ++i;
                                break;
                            }
                        }
                    }
                    body.erase(body.begin(), body.begin() + i);
                }
                unit_.macros[name] = join_tokens(body);
            }
        }
    }

    size_t find_matching(size_t open, const char* o, const char* c) const {
        int depth = 0;
        for (size_t i = open; i < toks_.size(); ++i) {
            if (toks_[i].is(o))
                ++depth;
            else if (toks_[i].is(c)) {
                if (--depth == 0)
                    return i;
            }
        }
        return toks_.size();
    }

    void parse_top_level() {
        size_t i = 0;
        while (i < toks_.size()) {
            if (toks_[i].is(";") || toks_[i].is("}")) {
                ++i;
                continue;
            }
            // collect a top-level run until ';' or '{' at depth 0
            size_t j = i;
            int pdepth = 0;
            bool saw_eq = false;
            size_t brace = toks_.size(), semi = toks_.size();
            for (; j < toks_.size(); ++j) {
                const std::string& t = toks_[j].text;
                if (t == "(" || t == "[")
                    ++pdepth;
                else if (t == ")" || t == "]")
                    --pdepth;
                else if (pdepth == 0 && t == "=")
                    saw_eq = true;
                else if (pdepth == 0 && t == "{") {
                    brace = j;
                    break;
                } else if (pdepth == 0 && t == ";") {
                    semi = j;
                    break;
                }
            }
            if (brace < toks_.size() && !saw_eq) {
                // function definition or aggregate type definition
                if (looks_like_function(i, brace)) {
                    parse_function(i, brace);
                    size_t close = find_matching(brace, "{", "}");
                    i = close + 1;
                    continue;
                }
                // struct/union/enum definition: emit one decl for the header,
                // skip the member block
                size_t close = find_matching(brace, "{", "}");
                Statement st;
                st.id = next_id_++;
                st.line = toks_[i].line;
                st.kind = StmtKind::Decl;
                st.text = join_tokens({toks_.begin() + i, toks_.begin() + brace});
                unit_.globals.push_back(std::move(st));
                // trailing declarators until ';'
                i = close + 1;
                while (i < toks_.size() && !toks_[i].is(";"))
                    ++i;
                ++i;
                continue;
            }
            if (semi < toks_.size()) {
                Statement st = make_statement(i, semi + 1, kNoStatement);
                unit_.globals.push_back(std::move(st));
                i = semi + 1;
                continue;
            }
            break;  // trailing garbage
        }
    }

    bool looks_like_function(size_t begin, size_t brace) const {
        // ... ident ( params ) {   with the ')' directly before '{'
        if (brace == 0 || !toks_[brace - 1].is(")"))
            return false;
        int depth = 0;
        size_t open = brace;
        for (size_t i = brace; i-- > begin;) {
            if (toks_[i].is(")"))
                ++depth;
            else if (toks_[i].is("(")) {
                if (--depth == 0) {
                    open = i;
                    break;
                }
            }
        }
        if (open == brace || open == begin)
            return false;
        const Token& name = toks_[open - 1];
        return name.ident() && !is_keyword(name.text);
    }

    void parse_function(size_t begin, size_t brace) {
        size_t close_paren = brace - 1;
        int depth = 0;
        size_t open_paren = brace;
        for (size_t i = brace; i-- > begin;) {
            if (toks_[i].is(")"))
                ++depth;
            else if (toks_[i].is("(")) {
                if (--depth == 0) {
                    open_paren = i;
                    break;
                }
            }
        }
        FunctionDef fn;
        fn.name = toks_[open_paren - 1].text;
        fn.start_line = toks_[begin].line;
        parse_params(open_paren + 1, close_paren, fn);
        size_t body_close = find_matching(brace, "{", "}");
        fn.end_line = body_close < toks_.size() ? toks_[body_close].line : toks_.back().line;

        BlockParser bp{*this, fn, {}};
        bp.parse_block(brace + 1, body_close, kNoStatement);
        std::stable_sort(fn.body.begin(), fn.body.end(),
                         [](const Statement& a, const Statement& b) { return a.line < b.line; });
        // a call through a locally declared identifier reads that variable
        // (function-pointer call); resolvable only once the symbol table exists
        for (auto& s : fn.body)
            for (const auto& ci : s.calls)
                if (!ci.callee_ref && fn.declares_var(ci.callee))
                    push_unique(s.uses, VarRef{ci.callee, {}, fn.is_pointer_var(ci.callee), false});
        unit_.functions.push_back(std::move(fn));
    }

    void parse_params(size_t begin, size_t end, FunctionDef& fn) {
        size_t start = begin;
        int depth = 0;
        for (size_t i = begin; i <= end; ++i) {
            bool at_end = i == end;
            if (!at_end) {
                const std::string& t = toks_[i].text;
                if (t == "(" || t == "[")
                    ++depth;
                else if (t == ")" || t == "]")
                    --depth;
            }
            if (at_end || (depth == 0 && toks_[i].is(","))) {
                if (i > start) {
                    VarDecl d;
                    d.decl_text = join_tokens({toks_.begin() + start, toks_.begin() + i});
                    // last identifier in the chunk is the parameter name
                    for (size_t k = i; k-- > start;) {
                        if (toks_[k].ident() && !is_keyword(toks_[k].text)) {
                            d.name = toks_[k].text;
                            for (size_t m = start; m < k; ++m)
                                if (toks_[m].is("*"))
                                    d.is_pointer = true;
                            for (size_t m = k + 1; m < i; ++m)
                                if (toks_[m].is("["))
                                    d.is_array = true;
                            break;
                        }
                        if (toks_[k].is("]")) {
                            d.is_array = true;
                        }
                    }
                    if (!d.name.empty() && d.decl_text != "void" && d.name != "void")
                        fn.params.push_back(std::move(d));
                }
                start = i + 1;
            }
        }
    }

    Statement make_statement(size_t begin, size_t end, StatementId parent) {
        Statement st;
        st.id = next_id_++;
        st.line = toks_[begin].line;
        st.parent = parent;
        st.text = join_tokens({toks_.begin() + begin, toks_.begin() + end});
        classify_expression_statement(st, begin, end);
        return st;
    }

    void classify_expression_statement(Statement& st, size_t begin, size_t end) {
        size_t stop = end;
        if (stop > begin && toks_[stop - 1].is(";"))
            --stop;
        if (stop == begin) {
            st.kind = StmtKind::MacroUse;
            return;
        }
        if (is_type_start(toks_[begin]) ||
            (toks_[begin].ident() && !is_keyword(toks_[begin].text) && stop - begin >= 2 &&
             (toks_[begin + 1].ident() ||
              (toks_[begin + 1].is("*") && begin + 2 < stop && toks_[begin + 2].ident())))) {
            if (parse_decl(st, begin, stop))
                return;
        }
        // top-level assignment operator?
        int depth = 0;
        size_t assign_pos = stop;
        std::string assign_op;
        for (size_t i = begin; i < stop; ++i) {
            const std::string& t = toks_[i].text;
            if (t == "(" || t == "[")
                ++depth;
            else if (t == ")" || t == "]")
                --depth;
            else if (depth == 0 &&
                     (t == "=" || t == "+=" || t == "-=" || t == "*=" || t == "/=" ||
                      t == "%=" || t == "&=" || t == "|=" || t == "^=" || t == "<<=" ||
                      t == ">>=")) {
                assign_pos = i;
                assign_op = t;
                break;
            }
        }
        if (assign_pos < stop) {
            st.kind = StmtKind::Assign;
            ExprFacts lhs;
            ExprScanner ls(toks_, lhs);
            ls.scan(begin, assign_pos);
            for (const auto& u : lhs.uses) {
                bool is_index = false;
                for (const auto& ix : lhs.index_vars)
                    if (ix.same_object(u))
                        is_index = true;
                if (is_index)
                    continue;  // a[i] = x defines a, reads i
                if (u.member_path.empty()) {
                    // skip the weak aggregate companion of a member write:
                    // s->len = ... defines the member, not the whole object
                    bool member_sibling = false;
                    for (const auto& other : lhs.uses)
                        if (other.base == u.base && !other.member_path.empty())
                            member_sibling = true;
                    if (member_sibling) {
                        push_unique(st.uses, u);
                        continue;
                    }
                }
                push_unique(st.defs, u);
                if (!u.member_path.empty()) {
                    VarRef base{u.base, {}, u.is_pointer, false};
                    push_unique(st.uses, base);  // weak aggregate use
                }
            }
            for (const auto& ix : lhs.index_vars) {
                push_unique(st.uses, ix);
                push_unique(st.index_vars, ix);
            }
            for (const auto& a : lhs.array_refs)
                push_unique(st.array_refs, a);
            for (const auto& d : lhs.deref_vars) {
                push_unique(st.deref_vars, d);
                push_unique(st.uses, d);  // *p = x reads p itself
            }
            if (assign_op != "=") {
                for (const auto& u : lhs.uses) {
                    push_unique(st.uses, u);
                    if (assign_op == "+=" || assign_op == "-=" || assign_op == "*=")
                        push_unique(st.arith_vars, u);
                }
            }
            ExprFacts rhs;
            ExprScanner rs(toks_, rhs);
            rs.scan(assign_pos + 1, stop);
            apply_expr_facts(st, rhs);
            if (assign_op == "+=" || assign_op == "-=" || assign_op == "*=")
                for (const auto& u : rhs.uses)
                    push_unique(st.arith_vars, u);
            if (assign_op == "/=" || assign_op == "%=")
                for (const auto& u : rhs.uses)
                    push_unique(st.divisors, u);
            if (stop - (assign_pos + 1) == 1) {
                const Token& v = toks_[assign_pos + 1];
                if (v.is("NULL") || v.is("nullptr") || v.text == "0")
                    st.assigns_null = true;
            }
            return;
        }
        // ++/-- statement
        if (toks_[begin].is("++") || toks_[begin].is("--") ||
            (stop >= begin + 2 && (toks_[stop - 1].is("++") || toks_[stop - 1].is("--")))) {
            st.kind = StmtKind::Assign;
            ExprFacts f;
            ExprScanner s(toks_, f);
            s.scan(begin, stop);
            for (const auto& u : f.uses) {
                push_unique(st.defs, u);
                push_unique(st.uses, u);
                push_unique(st.arith_vars, u);
            }
            return;
        }
        // call statement
        ExprFacts f;
        ExprScanner s(toks_, f);
        s.scan(begin, stop);
        if (!f.calls.empty() && toks_[begin].ident() && !is_keyword(toks_[begin].text)) {
            st.kind = StmtKind::Call;
            apply_expr_facts(st, f);
            return;
        }
        st.kind = StmtKind::MacroUse;
        apply_expr_facts(st, f);
    }

    bool parse_decl(Statement& st, size_t begin, size_t stop) {
        // skip type tokens (struct/union/enum keywords carry a tag identifier)
        size_t i = begin;
        bool progressed = true;
        while (i < stop && progressed) {
            progressed = false;
            if (is_type_start(toks_[i])) {
                bool tagged = toks_[i].text == "struct" || toks_[i].text == "union" ||
                              toks_[i].text == "enum";
                ++i;
                progressed = true;
                if (tagged && i < stop && toks_[i].ident() && !is_keyword(toks_[i].text))
                    ++i;
            } else if (i == begin && toks_[i].ident() && !is_keyword(toks_[i].text) &&
                       i + 1 < stop && (toks_[i + 1].ident() || toks_[i + 1].is("*"))) {
                ++i;  // typedef'd type name heuristic
                progressed = true;
            }
        }
        if (i == begin || i >= stop)
            return false;
        st.kind = StmtKind::Decl;
        // declarators separated by top-level commas
        size_t start = i;
        int depth = 0;
        auto handle = [&](size_t from, size_t to) {
            bool pointer = false;
            size_t k = from;
            while (k < to && (toks_[k].is("*") || toks_[k].is("("))) {
                if (toks_[k].is("*"))
                    pointer = true;
                ++k;
            }
            if (k >= to || !toks_[k].ident() || is_keyword(toks_[k].text))
                return;
            VarRef d{toks_[k].text, {}, pointer, false};
            size_t m = k + 1;
            bool has_init = false;
            for (; m < to; ++m) {
                if (toks_[m].is("["))
                    d.is_array_access = true;
                if (toks_[m].is("=")) {
                    has_init = true;
                    break;
                }
            }
            push_unique(st.defs, d);
            if (has_init) {
                ExprFacts f;
                ExprScanner s(toks_, f);
                s.scan(m + 1, to);
                apply_expr_facts(st, f);
                if (to - (m + 1) == 1) {
                    const Token& v = toks_[m + 1];
                    if (v.is("NULL") || v.is("nullptr") || v.text == "0")
                        st.assigns_null = true;
                }
            } else {
                st.uninit_decls.push_back(d.base);
            }
        };
        for (size_t k = i; k <= stop; ++k) {
            bool at_end = k == stop;
            if (!at_end) {
                const std::string& t = toks_[k].text;
                if (t == "(" || t == "[" || t == "{")
                    ++depth;
                else if (t == ")" || t == "]" || t == "}")
                    --depth;
            }
            if (at_end || (depth == 0 && toks_[k].is(","))) {
                handle(start, k);
                start = k + 1;
            }
        }
        return !st.defs.empty();
    }

    // ------------------------------------------------------------------
    struct BlockParser {
        UnitParser& up;
        FunctionDef& fn;
        std::vector<StatementId> loop_stack;  // innermost loop/switch for break

        // Parses [begin, end) as a statement sequence; returns ids of the
        // direct statements of the block.
        std::vector<StatementId> parse_block(size_t begin, size_t end, StatementId parent) {
            std::vector<StatementId> ids;
            size_t i = begin;
            while (i < end) {
                const Token& t = up.toks_[i];
                if (t.is(";")) {
                    ++i;
                    continue;
                }
                if (t.is("{")) {
                    size_t close = up.find_matching(i, "{", "}");
                    auto inner = parse_block(i + 1, std::min(close, end), parent);
                    ids.insert(ids.end(), inner.begin(), inner.end());
                    i = close + 1;
                    continue;
                }
                if (t.is("}")) {
                    ++i;
                    continue;
                }
                try {
                    i = parse_one(i, end, parent, ids);
                } catch (...) {
                    // tolerate anything unexpected: cover the rest of the line
                    // with an opaque statement and resume on the next line
                    size_t j = i;
                    while (j < end && up.toks_[j].line == t.line)
                        ++j;
                    Statement st;
                    st.id = up.next_id_++;
                    st.line = t.line;
                    st.parent = parent;
                    st.kind = StmtKind::Opaque;
                    st.text = join_tokens({up.toks_.begin() + i, up.toks_.begin() + j});
                    fn.body.push_back(std::move(st));
                    ids.push_back(fn.body.back().id);
                    i = j;
                }
            }
            return ids;
        }

        size_t parse_one(size_t i, size_t end, StatementId parent, std::vector<StatementId>& ids) {
            const Token& t = up.toks_[i];
            if (t.ident()) {
                if (t.text == "if")
                    return parse_if(i, end, parent, ids);
                if (t.text == "for" || t.text == "while" || t.text == "switch")
                    return parse_loop_or_switch(i, end, parent, ids);
                if (t.text == "do")
                    return parse_do(i, end, parent, ids);
                if (t.text == "return")
                    return parse_return(i, end, parent, ids);
                if (t.text == "goto")
                    return parse_goto(i, end, parent, ids);
                if (t.text == "break" || t.text == "continue")
                    return parse_break_continue(i, end, parent, ids);
                if (t.text == "case" || t.text == "default")
                    return parse_case(i, end, parent, ids);
                if (t.text == "else") {
                    // handled inside parse_if; stray else: skip keyword
                    return i + 1;
                }
                // label?
                if (i + 1 < end && up.toks_[i + 1].is(":") && !is_keyword(t.text)) {
                    Statement st;
                    st.id = up.next_id_++;
                    st.line = t.line;
                    st.parent = parent;
                    st.kind = StmtKind::Label;
                    st.label_name = t.text;
                    st.text = join_tokens({up.toks_.begin() + i, up.toks_.begin() + i + 2});
                    fn.body.push_back(std::move(st));
                    ids.push_back(fn.body.back().id);
                    return i + 2;
                }
            }
            // plain statement up to ';'
            size_t semi = find_semi(i, end);
            Statement st = up.make_statement(i, std::min(semi + 1, end), parent);
            st.parent = parent;
            fn.body.push_back(std::move(st));
            ids.push_back(fn.body.back().id);
            return semi + 1;
        }

        size_t find_semi(size_t i, size_t end) const {
            int depth = 0;
            for (size_t k = i; k < end; ++k) {
                const std::string& t = up.toks_[k].text;
                if (t == "(" || t == "[" || t == "{")
                    ++depth;
                else if (t == ")" || t == "]" || t == "}")
                    --depth;
                else if (depth == 0 && t == ";")
                    return k;
            }
            return end;
        }

        // Parses a governed region: either a braced block or a single statement.
        // Returns (ids, next position).
        std::pair<std::vector<StatementId>, size_t> parse_governed(size_t i, size_t end,
                                                                   StatementId parent) {
            if (i < end && up.toks_[i].is("{")) {
                size_t close = up.find_matching(i, "{", "}");
                auto ids = parse_block(i + 1, std::min(close, end), parent);
                return {ids, close + 1};
            }
            std::vector<StatementId> ids;
            size_t next = parse_one(i, end, parent, ids);
            return {ids, next};
        }

        size_t parse_if(size_t i, size_t end, StatementId parent, std::vector<StatementId>& ids) {
            size_t open = i + 1;
            if (open >= end || !up.toks_[open].is("("))
                throw std::runtime_error("if without condition");
            size_t close = up.find_matching(open, "(", ")");
            if (close >= end)
                throw std::runtime_error("unbalanced if condition");
            Statement st;
            st.id = up.next_id_++;
            st.line = up.toks_[i].line;
            st.parent = parent;
            st.kind = StmtKind::Control;
            st.control = ControlKind::If;
            st.text = join_tokens({up.toks_.begin() + i, up.toks_.begin() + close + 1});
            ExprFacts f;
            ExprScanner s(up.toks_, f);
            s.scan(open + 1, close);
            apply_expr_facts(st, f);
            StatementId my_id = st.id;
            fn.body.push_back(std::move(st));
            ids.push_back(my_id);

            auto [then_ids, next] = parse_governed(close + 1, end, my_id);
            stmt_by_id(my_id).then_children = then_ids;
            if (next < end && up.toks_[next].ident() && up.toks_[next].text == "else") {
                auto [else_ids, after] = parse_governed(next + 1, end, my_id);
                stmt_by_id(my_id).else_children = else_ids;
                return after;
            }
            return next;
        }

        size_t parse_loop_or_switch(size_t i, size_t end, StatementId parent,
                                    std::vector<StatementId>& ids) {
            const std::string& kw = up.toks_[i].text;
            size_t open = i + 1;
            if (open >= end || !up.toks_[open].is("("))
                throw std::runtime_error(kw + " without header");
            size_t close = up.find_matching(open, "(", ")");
            if (close >= end)
                throw std::runtime_error("unbalanced " + kw + " header");
            Statement st;
            st.id = up.next_id_++;
            st.line = up.toks_[i].line;
            st.parent = parent;
            st.kind = StmtKind::Control;
            st.control = kw == "for" ? ControlKind::For
                        : kw == "while" ? ControlKind::While
                                        : ControlKind::Switch;
            st.text = join_tokens({up.toks_.begin() + i, up.toks_.begin() + close + 1});
            if (st.control == ControlKind::For) {
                parse_for_header(st, open + 1, close);
            } else {
                ExprFacts f;
                ExprScanner s(up.toks_, f);
                s.scan(open + 1, close);
                apply_expr_facts(st, f);
            }
            StatementId my_id = st.id;
            fn.body.push_back(std::move(st));
            ids.push_back(my_id);

            loop_stack.push_back(my_id);
            auto [body_ids, next] = parse_governed(close + 1, end, my_id);
            loop_stack.pop_back();
            stmt_by_id(my_id).then_children = body_ids;
            return next;
        }

        void parse_for_header(Statement& st, size_t begin, size_t end) {
            // init; cond; step   -- init may declare or assign
            std::vector<std::pair<size_t, size_t>> parts;
            size_t start = begin;
            int depth = 0;
            for (size_t k = begin; k <= end; ++k) {
                bool at_end = k == end;
                if (!at_end) {
                    const std::string& t = up.toks_[k].text;
                    if (t == "(" || t == "[")
                        ++depth;
                    else if (t == ")" || t == "]")
                        --depth;
                }
                if (at_end || (depth == 0 && up.toks_[k].is(";"))) {
                    parts.emplace_back(start, k);
                    start = k + 1;
                }
            }
            for (size_t p = 0; p < parts.size(); ++p) {
                auto [b, e] = parts[p];
                if (b >= e)
                    continue;
                Statement part;
                up.classify_expression_statement(part, b, e);
                for (const auto& d : part.defs)
                    push_unique(st.defs, d);
                for (const auto& u : part.uses)
                    push_unique(st.uses, u);
                for (const auto& c : part.calls)
                    st.calls.push_back(c);
                for (const auto& a : part.arith_vars)
                    push_unique(st.arith_vars, a);
                for (const auto& a : part.array_refs)
                    push_unique(st.array_refs, a);
                for (const auto& iv : part.index_vars)
                    push_unique(st.index_vars, iv);
                for (const auto& dv : part.divisors)
                    push_unique(st.divisors, dv);
                // undo the statement-id the temp classification consumed
            }
            if (!st.calls.empty() && !st.callee)
                st.callee = st.calls.front().callee;
        }

        size_t parse_do(size_t i, size_t end, StatementId parent, std::vector<StatementId>& ids) {
            // Body statements are parsed first; the construct is anchored at the
            // trailing `while (cond);` line which carries the condition.
            Statement st;
            st.id = up.next_id_++;
            st.kind = StmtKind::Control;
            st.control = ControlKind::DoWhile;
            st.parent = parent;
            StatementId my_id = st.id;
            fn.body.push_back(std::move(st));
            ids.push_back(my_id);

            loop_stack.push_back(my_id);
            auto [body_ids, next] = parse_governed(i + 1, end, my_id);
            loop_stack.pop_back();
            stmt_by_id(my_id).then_children = body_ids;

            // expect: while ( cond ) ;
            if (next < end && up.toks_[next].ident() && up.toks_[next].text == "while" &&
                next + 1 < end && up.toks_[next + 1].is("(") &&
                up.find_matching(next + 1, "(", ")") < end) {
                size_t close = up.find_matching(next + 1, "(", ")");
                Statement& me = stmt_by_id(my_id);
                me.line = up.toks_[next].line;
                me.text = join_tokens({up.toks_.begin() + next, up.toks_.begin() + close + 1}) + ";";
                ExprFacts f;
                ExprScanner s(up.toks_, f);
                s.scan(next + 2, close);
                apply_expr_facts(me, f);
                size_t after = close + 1;
                if (after < end && up.toks_[after].is(";"))
                    ++after;
                return after;
            }
            stmt_by_id(my_id).line = up.toks_[i].line;
            stmt_by_id(my_id).text = "do";
            return next;
        }

        size_t parse_return(size_t i, size_t end, StatementId parent,
                            std::vector<StatementId>& ids) {
            size_t semi = find_semi(i, end);
            Statement st;
            st.id = up.next_id_++;
            st.line = up.toks_[i].line;
            st.parent = parent;
            st.kind = StmtKind::Return;
            st.text = join_tokens({up.toks_.begin() + i, up.toks_.begin() + std::min(semi + 1, end)});
            ExprFacts f;
            ExprScanner s(up.toks_, f);
            s.scan(i + 1, semi);
            apply_expr_facts(st, f);
            fn.body.push_back(std::move(st));
            ids.push_back(fn.body.back().id);
            return semi + 1;
        }

        size_t parse_goto(size_t i, size_t end, StatementId parent, std::vector<StatementId>& ids) {
            size_t semi = find_semi(i, end);
            Statement st;
            st.id = up.next_id_++;
            st.line = up.toks_[i].line;
            st.parent = parent;
            st.kind = StmtKind::Goto;
            st.text = join_tokens({up.toks_.begin() + i, up.toks_.begin() + std::min(semi + 1, end)});
            if (i + 1 < semi && up.toks_[i + 1].ident())
                st.jump_target = up.toks_[i + 1].text;
            fn.body.push_back(std::move(st));
            ids.push_back(fn.body.back().id);
            return semi + 1;
        }

        size_t parse_break_continue(size_t i, size_t end, StatementId parent,
                                    std::vector<StatementId>& ids) {
            size_t semi = find_semi(i, end);
            Statement st;
            st.id = up.next_id_++;
            st.line = up.toks_[i].line;
            st.parent = parent;
            st.kind = StmtKind::Goto;
            st.jump_target = up.toks_[i].text == "break" ? "@break" : "@continue";
            st.text = join_tokens({up.toks_.begin() + i, up.toks_.begin() + std::min(semi + 1, end)});
            fn.body.push_back(std::move(st));
            ids.push_back(fn.body.back().id);
            return semi + 1;
        }

        size_t parse_case(size_t i, size_t end, StatementId parent, std::vector<StatementId>& ids) {
            size_t colon = i;
            while (colon < end && !up.toks_[colon].is(":"))
                ++colon;
            Statement st;
            st.id = up.next_id_++;
            st.line = up.toks_[i].line;
            st.parent = parent;
            st.kind = StmtKind::Label;
            st.label_name = up.toks_[i].text;
            st.text = join_tokens({up.toks_.begin() + i, up.toks_.begin() + std::min(colon + 1, end)});
            fn.body.push_back(std::move(st));
            ids.push_back(fn.body.back().id);
            return colon + 1;
        }

        Statement& stmt_by_id(StatementId id) {
            for (auto& s : fn.body)
                if (s.id == id)
                    return s;
            throw std::logic_error("statement id lookup failed");
        }
    };

    friend struct BlockParser;
};

}  // namespace

// ---------------------------------------------------------------------------
// FunctionDef / SourceUnit / SourceTree

const Statement* FunctionDef::stmt_by_id(StatementId id) const {
    for (const auto& s : body)
        if (s.id == id)
            return &s;
    return nullptr;
}

const Statement* FunctionDef::first_stmt_at_line(int line) const {
    for (const auto& s : body)
        if (s.line == line)
            return &s;
    return nullptr;
}

bool FunctionDef::is_pointer_var(const std::string& name) const {
    if (const VarDecl* p = param(name))
        return p->is_pointer || p->is_array;
    for (const auto& s : body) {
        if (s.kind != StmtKind::Decl)
            continue;
        for (const auto& d : s.defs)
            if (d.base == name)
                return d.is_pointer || d.is_array_access;
    }
    return false;
}

bool FunctionDef::declares_var(const std::string& name) const {
    if (param(name))
        return true;
    for (const auto& s : body)
        if (s.kind == StmtKind::Decl)
            for (const auto& d : s.defs)
                if (d.base == name)
                    return true;
    return false;
}

const VarDecl* FunctionDef::param(const std::string& name) const {
    for (const auto& p : params)
        if (p.name == name)
            return &p;
    return nullptr;
}

int FunctionDef::param_index(const std::string& name) const {
    for (size_t i = 0; i < params.size(); ++i)
        if (params[i].name == name)
            return static_cast<int>(i);
    return -1;
}

const std::string& SourceUnit::line_text(int line) const {
    static const std::string empty;
    if (line < 1 || line > static_cast<int>(raw_lines.size()))
        return empty;
    return raw_lines[line - 1];
}

const SourceUnit* SourceTree::unit(const std::string& path) const {
    for (const auto& u : units)
        if (u.path == path)
            return &u;
    return nullptr;
}

namespace {
std::vector<std::string> path_components(const std::string& p) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : p) {
        if (c == '/') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

bool suffix_match(const std::vector<std::string>& path, const std::vector<std::string>& query) {
    if (query.empty() || query.size() > path.size())
        return false;
    return std::equal(query.rbegin(), query.rend(), path.rbegin());
}
}  // namespace

const SourceUnit* SourceTree::resolve_unit(const std::string& diff_path) const {
    if (const SourceUnit* u = unit(diff_path))
        return u;
    auto query = path_components(diff_path);
    // drop diff prefixes a/ b/ or a corpus directory name
    for (int drop = 0; drop < 2 && !query.empty(); ++drop) {
        const SourceUnit* found = nullptr;
        int hits = 0;
        for (const auto& u : units) {
            if (suffix_match(path_components(u.path), query)) {
                found = &u;
                ++hits;
            }
        }
        if (hits == 1)
            return found;
        query.erase(query.begin());
    }
    return nullptr;
}

const FunctionDef* SourceTree::function(const std::string& name) const {
    for (const auto& u : units)
        for (const auto& f : u.functions)
            if (f.name == name)
                return &f;
    return nullptr;
}

const SourceUnit* SourceTree::unit_of_function(const std::string& name) const {
    for (const auto& u : units)
        for (const auto& f : u.functions)
            if (f.name == name)
                return &u;
    return nullptr;
}

const Statement* SourceTree::stmt(StatementId id) const {
    if (id < 0 || id >= static_cast<int>(index_.size()))
        return nullptr;
    const StmtLoc& loc = index_[id];
    const SourceUnit& u = units[loc.unit];
    if (loc.function < 0)
        return &u.globals[loc.index];
    return &u.functions[loc.function].body[loc.index];
}

const FunctionDef* SourceTree::function_of(StatementId id) const {
    if (id < 0 || id >= static_cast<int>(index_.size()))
        return nullptr;
    const StmtLoc& loc = index_[id];
    if (loc.function < 0)
        return nullptr;
    return &units[loc.unit].functions[loc.function];
}

const SourceUnit* SourceTree::unit_of(StatementId id) const {
    if (id < 0 || id >= static_cast<int>(index_.size()))
        return nullptr;
    return &units[index_[id].unit];
}

int SourceTree::opaque_count() const {
    int n = 0;
    for (const auto& u : units) {
        for (const auto& g : u.globals)
            n += g.kind == StmtKind::Opaque;
        for (const auto& f : u.functions)
            for (const auto& s : f.body)
                n += s.kind == StmtKind::Opaque;
    }
    return n;
}

bool SourceTree::macro_body(const std::string& name, std::string& body_out) const {
    for (const auto& u : units) {
        auto it = u.macros.find(name);
        if (it != u.macros.end()) {
            body_out = it->second;
            return true;
        }
    }
    return false;
}

void SourceTree::reindex() {
    index_.clear();
    int next = 0;
    for (int ui = 0; ui < static_cast<int>(units.size()); ++ui) {
        SourceUnit& u = units[ui];
        for (int gi = 0; gi < static_cast<int>(u.globals.size()); ++gi) {
            Statement& s = u.globals[gi];
            // remap ids referenced in structure
            s.id = next++;
            s.file = u.path;
            s.function.clear();
            index_.push_back({ui, -1, gi});
        }
        for (int fi = 0; fi < static_cast<int>(u.functions.size()); ++fi) {
            FunctionDef& f = u.functions[fi];
            std::map<StatementId, StatementId> remap;
            for (auto& s : f.body)
                remap[s.id] = 0;  // placeholder
            for (int si = 0; si < static_cast<int>(f.body.size()); ++si) {
                Statement& s = f.body[si];
                remap[s.id] = next;
                s.file = u.path;
                s.function = f.name;
                index_.push_back({ui, fi, si});
                ++next;
            }
            for (auto& s : f.body) {
                s.id = remap[s.id];
                if (s.parent != kNoStatement)
                    s.parent = remap[s.parent];
                for (auto& c : s.then_children)
                    c = remap[c];
                for (auto& c : s.else_children)
                    c = remap[c];
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points

SourceUnit parse_source_unit(const std::string& path, const std::string& content) {
    UnitParser p(path, content);
    return p.parse();
}

SourceTree parse_source_tree(const std::string& root, VersionTag tag) {
    SourceTree tree;
    tree.root = root;
    tree.version_tag = tag;
    if (!fs::exists(root))
        throw IoError("source root does not exist: " + root);
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file())
            continue;
        auto ext = entry.path().extension().string();
        if (ext == ".c" || ext == ".h" || ext == ".cpp" || ext == ".hpp")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw EmptyTreeError("no source files under " + root);
    for (const auto& f : files) {
        std::ifstream is(f, std::ios::binary);
        if (!is)
            throw IoError("cannot read " + f.string());
        std::ostringstream ss;
        ss << is.rdbuf();
        std::string rel = fs::relative(f, root).generic_string();
        tree.units.push_back(parse_source_unit(rel, ss.str()));
    }
    tree.reindex();
    return tree;
}

const FunctionDef* find_function_at(const SourceTree& tree, const std::string& path, int line) {
    const SourceUnit* u = tree.unit(path);
    if (!u)
        u = tree.resolve_unit(path);
    if (!u)
        throw UnknownPathError("path not in tree: " + path);
    for (const auto& f : u->functions)
        if (line >= f.start_line && line <= f.end_line)
            return &f;
    return nullptr;
}

}  // namespace patchtrace

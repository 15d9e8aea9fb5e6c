// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace patchtrace {

/// A reference to a variable as it appears in source: a base identifier plus
/// an optional member chain (s->linelen is {base "s", path ["linelen"]}).
struct VarRef {
    std::string base;
    std::vector<std::string> member_path;
    bool is_pointer = false;
    bool is_array_access = false;

    std::string key() const;

    /// Exact base + member-path equality (qualifier flags ignored).
    bool same_object(const VarRef& other) const;

    /// Aggregate-aware match: same base, and one member path is a prefix of
    /// the other. A def of `s` reaches a use of `s->x` and vice versa.
    bool overlaps(const VarRef& other) const;
};

bool operator==(const VarRef& a, const VarRef& b);
bool operator<(const VarRef& a, const VarRef& b);

enum class StmtKind { Assign, Call, Decl, Control, Return, Goto, Label, MacroUse, Opaque };
enum class ControlKind { None, If, For, While, DoWhile, Switch };

const char* to_string(StmtKind k);
const char* to_string(ControlKind k);

using StatementId = int;
inline constexpr StatementId kNoStatement = -1;

struct CallArg {
    std::vector<VarRef> vars;
    bool address_of = false;
};

struct CallInfo {
    std::string callee;
    std::optional<VarRef> callee_ref;  // set for calls through p->fn / obj.fn
    std::vector<CallArg> args;
};

struct Statement {
    StatementId id = kNoStatement;
    int line = 0;
    StmtKind kind = StmtKind::Opaque;
    ControlKind control = ControlKind::None;
    std::vector<VarRef> defs;
    std::vector<VarRef> uses;
    std::optional<std::string> callee;  // primary callee when the statement contains a call
    std::vector<CallInfo> calls;        // every named call in the statement
    std::string text;                   // normalized text

    std::string function;  // enclosing function, empty for globals
    std::string file;      // owning unit path

    // Block structure. parent is the statement id of the nearest enclosing
    // control statement; children lists hold directly governed statements.
    StatementId parent = kNoStatement;
    std::vector<StatementId> then_children;
    std::vector<StatementId> else_children;

    // Expression facts consumed by the dependence and trigger modules.
    std::vector<VarRef> array_refs;   // refs subscripted with []
    std::vector<VarRef> index_vars;   // refs appearing inside a subscript
    std::vector<VarRef> deref_vars;   // refs dereferenced with unary *
    std::vector<VarRef> divisors;     // x in "/ x" or "% x"
    std::vector<VarRef> arith_vars;   // operands of binary + - * and compound forms
    std::vector<std::string> uninit_decls;  // declared names without initializer
    bool assigns_null = false;        // RHS is NULL / 0 / nullptr

    std::string jump_target;  // goto label, or "@break" / "@continue"
    std::string label_name;   // for kind == Label

    bool is_loop() const {
        return kind == StmtKind::Control &&
               (control == ControlKind::For || control == ControlKind::While ||
                control == ControlKind::DoWhile);
    }
    bool uses_var(const std::string& base) const;
    bool uses_member_of(const std::string& base) const;
};

struct VarDecl {
    std::string name;
    bool is_pointer = false;
    bool is_array = false;
    std::string decl_text;
};

struct FunctionDef {
    std::string name;
    std::vector<VarDecl> params;
    std::vector<Statement> body;  // source order
    int start_line = 0;
    int end_line = 0;

    const Statement* stmt_by_id(StatementId id) const;
    const Statement* first_stmt_at_line(int line) const;
    bool is_pointer_var(const std::string& name) const;
    bool declares_var(const std::string& name) const;
    const VarDecl* param(const std::string& name) const;
    int param_index(const std::string& name) const;  // -1 when absent
};

struct SourceUnit {
    std::string path;
    std::vector<FunctionDef> functions;
    std::vector<Statement> globals;
    std::vector<std::string> includes;          // targets of #include directives
    std::map<std::string, std::string> macros;  // #define name -> body text
    std::vector<std::string> raw_lines;

    const std::string& line_text(int line) const;  // 1-based, empty when out of range
};

enum class VersionTag { Vulnerable, Patched };

const char* to_string(VersionTag tag);

class EmptyTreeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class UnknownPathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SourceTree {
    std::string root;
    VersionTag version_tag = VersionTag::Vulnerable;
    std::vector<SourceUnit> units;

    const SourceUnit* unit(const std::string& path) const;
    // Resolves diff-style paths (a/..., b/..., vuln/...) by component-suffix match.
    const SourceUnit* resolve_unit(const std::string& diff_path) const;
    const FunctionDef* function(const std::string& name) const;
    const SourceUnit* unit_of_function(const std::string& name) const;
    const Statement* stmt(StatementId id) const;
    const FunctionDef* function_of(StatementId id) const;
    const SourceUnit* unit_of(StatementId id) const;
    int opaque_count() const;
    bool macro_body(const std::string& name, std::string& body_out) const;

    // Rebuilds the statement-id index; called by the parser after construction.
    void reindex();

private:
    struct StmtLoc {
        int unit = -1;
        int function = -1;  // -1 for globals
        int index = -1;
    };
    std::vector<StmtLoc> index_;
};

/// Parses every .c/.h/.cpp/.hpp file under `root`. Unparseable regions become
/// opaque statements; the parser never aborts on unsupported syntax.
SourceTree parse_source_tree(const std::string& root, VersionTag tag);

/// Parses one in-memory unit (statement ids are local); used by parse_source_tree
/// and directly by tests.
SourceUnit parse_source_unit(const std::string& path, const std::string& content);

/// Strips comments, canonicalizes spacing, keeps the trailing semicolon.
/// Blank or comment-only input normalizes to the empty string.
std::string normalize_statement(const std::string& raw_text);

/// True for lines that carry no statement content once normalized: blank,
/// comment-only, or brace-only lines.
bool is_ignorable_line(const std::string& raw_text);

const FunctionDef* find_function_at(const SourceTree& tree, const std::string& path, int line);

}  // namespace patchtrace

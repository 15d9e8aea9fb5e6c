// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "patchtrace/code_model.hpp"

namespace patchtrace {

enum class LineMarker { Context, Add, Del };

struct HunkLine {
    LineMarker marker = LineMarker::Context;
    std::string text;
};

struct Hunk {
    int old_start = 0;
    int old_len = 0;
    int new_start = 0;
    int new_len = 0;
    std::vector<HunkLine> lines;
};

struct DiffFile {
    struct FilePatch {
        std::string old_path;
        std::string new_path;
        std::vector<Hunk> hunks;
    };
    std::vector<FilePatch> files;

    std::vector<Hunk> hunks() const;  // flattened over files
    std::vector<std::pair<std::string, std::string>> files_touched() const;
};

enum class PatchAction { Add, Delete, Modify };

const char* to_string(PatchAction a);

/// One changed statement of the patch, bound to the function that hosts it.
struct PatchStatement {
    PatchAction action = PatchAction::Add;
    std::string p_type;  // "P-1".."P-11"
    std::string file;    // tree-relative path
    std::string function;  // empty when outside any function
    std::optional<int> line_vuln;
    std::optional<int> line_patched;
    // Position of the change in the tree that does not contain it: for adds,
    // the vulnerable-tree line the insertion precedes; for deletes, the
    // patched-tree line where the removal happened.
    int anchor_line_vuln = 0;
    int anchor_line_patched = 0;
    Statement statement;           // parsed from the new text (old text for deletes)
    std::optional<Statement> statement_old;  // present for modifies
    std::string text_new;  // normalized
    std::string text_old;  // normalized, modifies and deletes
    bool is_signature = false;  // the changed line is a function-definition header
};

class MalformedDiffError : public std::runtime_error {
public:
    MalformedDiffError(const std::string& msg, int line)
        : std::runtime_error(msg + " at diff line " + std::to_string(line)), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class UnanchoredHunkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

DiffFile parse_diff(const std::string& path);
DiffFile parse_diff_text(const std::string& content);

/// Drops comment/blank-only changes, pairs del+add lines into modifies, drops
/// pairs whose normalized texts are equal, binds survivors to functions, and
/// classifies each result into P-1..P-11.
std::vector<PatchStatement> preprocess_diff(const DiffFile& diff, const SourceTree& vuln,
                                            const SourceTree& patched);

/// Table-driven classification; P-11 is the fallback.
std::string classify_patch_statement(const PatchStatement& ps);

}  // namespace patchtrace

// SPDX-License-Identifier: Apache-2.0
#include "patchtrace/diff_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace patchtrace {

const char* to_string(PatchAction a) {
    switch (a) {
    case PatchAction::Add: return "add";
    case PatchAction::Delete: return "delete";
    case PatchAction::Modify: return "modify";
    }
    return "?";
}

std::vector<Hunk> DiffFile::hunks() const {
    std::vector<Hunk> out;
    for (const auto& f : files)
        out.insert(out.end(), f.hunks.begin(), f.hunks.end());
    return out;
}

std::vector<std::pair<std::string, std::string>> DiffFile::files_touched() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : files)
        out.emplace_back(f.old_path, f.new_path);
    return out;
}

namespace {

std::string chomp(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n'))
        s.pop_back();
    return s;
}

std::string parse_header_path(const std::string& line, size_t prefix_len) {
    std::string rest = line.substr(prefix_len);
    auto tab = rest.find('\t');
    if (tab != std::string::npos)
        rest.resize(tab);
    return chomp(rest);
}

bool parse_hunk_header(const std::string& line, Hunk& h) {
    // @@ -old_start[,old_len] +new_start[,new_len] @@
    if (line.rfind("@@ -", 0) != 0)
        return false;
    size_t i = 4;
    auto read_int = [&](int& out) {
        if (i >= line.size() || !isdigit(static_cast<unsigned char>(line[i])))
            return false;
        out = 0;
        while (i < line.size() && isdigit(static_cast<unsigned char>(line[i])))
            out = out * 10 + (line[i++] - '0');
        return true;
    };
    if (!read_int(h.old_start))
        return false;
    h.old_len = 1;
    if (i < line.size() && line[i] == ',') {
        ++i;
        if (!read_int(h.old_len))
            return false;
    }
    if (i + 1 >= line.size() || line[i] != ' ' || line[i + 1] != '+')
        return false;
    i += 2;
    if (!read_int(h.new_start))
        return false;
    h.new_len = 1;
    if (i < line.size() && line[i] == ',') {
        ++i;
        if (!read_int(h.new_len))
            return false;
    }
    return line.compare(i, 3, " @@") == 0;
}

void validate_hunk(const Hunk& h, int header_line) {
    int old_count = 0, new_count = 0;
    for (const auto& l : h.lines) {
        if (l.marker != LineMarker::Add)
            ++old_count;
        if (l.marker != LineMarker::Del)
            ++new_count;
    }
    if (old_count != h.old_len || new_count != h.new_len)
        throw MalformedDiffError("hunk line counts do not match header", header_line);
}

}  // namespace

DiffFile parse_diff_text(const std::string& content) {
    DiffFile out;
    std::istringstream is(content);
    std::string raw;
    int line_no = 0;
    DiffFile::FilePatch* cur = nullptr;
    Hunk* hunk = nullptr;
    int hunk_header_line = 0;
    int old_left = 0, new_left = 0;

    auto close_hunk = [&]() {
        if (hunk) {
            validate_hunk(*hunk, hunk_header_line);
            hunk = nullptr;
        }
    };

    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = chomp(raw);
        if (hunk && (old_left > 0 || new_left > 0)) {
            if (line.empty()) {
                // tolerate bare empty context lines some tools emit
                hunk->lines.push_back({LineMarker::Context, ""});
                --old_left;
                --new_left;
                continue;
            }
            char m = line[0];
            if (m == ' ' || m == '+' || m == '-') {
                LineMarker marker = m == ' '  ? LineMarker::Context
                                   : m == '+' ? LineMarker::Add
                                              : LineMarker::Del;
                hunk->lines.push_back({marker, line.substr(1)});
                if (marker != LineMarker::Add)
                    --old_left;
                if (marker != LineMarker::Del)
                    --new_left;
                continue;
            }
            if (m == '\\')
                continue;  // "\ No newline at end of file"
            throw MalformedDiffError("unexpected line inside hunk", line_no);
        }
        close_hunk();
        if (line.rfind("--- ", 0) == 0) {
            out.files.emplace_back();
            cur = &out.files.back();
            cur->old_path = parse_header_path(line, 4);
            continue;
        }
        if (line.rfind("+++ ", 0) == 0) {
            if (!cur)
                throw MalformedDiffError("+++ without ---", line_no);
            cur->new_path = parse_header_path(line, 4);
            continue;
        }
        Hunk h;
        if (parse_hunk_header(line, h)) {
            if (!cur)
                throw MalformedDiffError("hunk before file header", line_no);
            cur->hunks.push_back(h);
            hunk = &cur->hunks.back();
            hunk_header_line = line_no;
            old_left = h.old_len;
            new_left = h.new_len;
            continue;
        }
        // anything else (git headers, commit message) is ignored
    }
    close_hunk();
    return out;
}

DiffFile parse_diff(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw MalformedDiffError("cannot read diff file " + path, 0);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_diff_text(ss.str());
}

// ---------------------------------------------------------------------------
// Preprocessing

namespace {

struct LocatedLine {
    int line = 0;          // line number in its tree
    int other_line = 0;    // corresponding position in the opposite tree
    size_t hunk_pos = 0;   // position within the hunk, for nearest pairing
    std::string norm;      // normalized text
    const SourceUnit* unit = nullptr;
    const FunctionDef* fn = nullptr;
    const Statement* stmt = nullptr;
    bool is_signature = false;
    bool paired = false;
};

Statement synthesize_stmt(const std::string& norm, int line) {
    Statement st;
    st.line = line;
    st.kind = StmtKind::Opaque;
    st.text = norm;
    return st;
}

Statement signature_stmt(const FunctionDef& fn, const std::string& norm, int line) {
    Statement st;
    st.line = line;
    st.kind = StmtKind::Decl;
    st.text = norm;
    for (const auto& p : fn.params)
        st.uses.push_back(VarRef{p.name, {}, p.is_pointer, p.is_array});
    return st;
}

bool locate(const SourceTree& tree, const std::string& diff_path, int line, LocatedLine& out) {
    const SourceUnit* unit = tree.resolve_unit(diff_path);
    if (!unit)
        return false;
    out.unit = unit;
    out.line = line;
    for (const auto& f : unit->functions) {
        if (line >= f.start_line && line <= f.end_line) {
            out.fn = &f;
            out.is_signature = line == f.start_line;
            out.stmt = f.first_stmt_at_line(line);
            return true;
        }
    }
    for (const auto& g : unit->globals)
        if (g.line == line)
            out.stmt = &g;
    return true;
}

std::string pair_key(const LocatedLine& l) {
    if (l.is_signature && l.fn)
        return "sig:" + l.fn->name;
    if (!l.stmt)
        return "text";
    const Statement& s = *l.stmt;
    switch (s.kind) {
    case StmtKind::Assign:
    case StmtKind::Decl:
        if (!s.defs.empty())
            return "def:" + s.defs.front().key();
        return "def:?";
    case StmtKind::Call:
        return s.callee ? "call:" + *s.callee : "call:?";
    case StmtKind::Control:
        return std::string("ctrl:") + to_string(s.control);
    case StmtKind::Return:
        return "return";
    case StmtKind::Goto:
        return "goto";
    default:
        return "other";
    }
}

PatchStatement build_patch_statement(PatchAction action, const LocatedLine* vuln_side,
                                     const LocatedLine* patched_side) {
    PatchStatement ps;
    ps.action = action;
    const LocatedLine* primary = patched_side ? patched_side : vuln_side;
    const LocatedLine* binder = vuln_side ? vuln_side : patched_side;
    ps.file = binder->unit->path;
    if (binder->fn)
        ps.function = binder->fn->name;
    else if (primary->fn)
        ps.function = primary->fn->name;
    if (vuln_side) {
        ps.line_vuln = vuln_side->line;
        ps.text_old = vuln_side->norm;
        ps.anchor_line_vuln = vuln_side->line;
        ps.anchor_line_patched = vuln_side->other_line;
    }
    if (patched_side) {
        ps.line_patched = patched_side->line;
        ps.text_new = patched_side->norm;
        ps.anchor_line_patched = patched_side->line;
        if (!vuln_side)
            ps.anchor_line_vuln = patched_side->other_line;
    }
    ps.is_signature = primary->is_signature || (vuln_side && vuln_side->is_signature);

    auto materialize = [](const LocatedLine& l) -> Statement {
        if (l.is_signature && l.fn)
            return signature_stmt(*l.fn, l.norm, l.line);
        if (l.stmt)
            return *l.stmt;
        return synthesize_stmt(l.norm, l.line);
    };
    ps.statement = materialize(*primary);
    if (action == PatchAction::Modify && vuln_side)
        ps.statement_old = materialize(*vuln_side);
    return ps;
}

}  // namespace

std::string classify_patch_statement(const PatchStatement& ps) {
    const bool modify = ps.action == PatchAction::Modify;
    if (ps.is_signature)
        return modify ? "P-8" : "P-7";
    switch (ps.statement.kind) {
    case StmtKind::Assign:
        return modify ? "P-2" : "P-1";
    case StmtKind::Call:
        return modify ? "P-4" : "P-3";
    case StmtKind::Decl:
        return modify ? "P-6" : "P-5";
    case StmtKind::Control:
        return modify ? "P-10" : "P-9";
    default:
        return "P-11";
    }
}

std::vector<PatchStatement> preprocess_diff(const DiffFile& diff, const SourceTree& vuln,
                                            const SourceTree& patched) {
    std::vector<PatchStatement> out;
    for (const auto& fp : diff.files) {
        for (const auto& hunk : fp.hunks) {
            std::vector<LocatedLine> dels, adds;
            int old_line = hunk.old_start;
            int new_line = hunk.new_start;
            size_t pos = 0;
            for (const auto& hl : hunk.lines) {
                ++pos;
                switch (hl.marker) {
                case LineMarker::Context:
                    ++old_line;
                    ++new_line;
                    break;
                case LineMarker::Del: {
                    if (!is_ignorable_line(hl.text)) {
                        LocatedLine l;
                        l.hunk_pos = pos;
                        l.other_line = new_line;
                        l.norm = normalize_statement(hl.text);
                        if (!locate(vuln, fp.old_path, old_line, l))
                            throw UnanchoredHunkError("cannot locate " + fp.old_path +
                                                      " in vulnerable tree");
                        dels.push_back(std::move(l));
                    }
                    ++old_line;
                    break;
                }
                case LineMarker::Add: {
                    if (!is_ignorable_line(hl.text)) {
                        LocatedLine l;
                        l.hunk_pos = pos;
                        l.other_line = old_line;
                        l.norm = normalize_statement(hl.text);
                        if (!locate(patched, fp.new_path, new_line, l))
                            throw UnanchoredHunkError("cannot locate " + fp.new_path +
                                                      " in patched tree");
                        adds.push_back(std::move(l));
                    }
                    ++new_line;
                    break;
                }
                }
            }
            // Pair each deleted line with the nearest unpaired added line that
            // shares its key (def target, callee, or statement family).
            for (auto& d : dels) {
                std::string key = pair_key(d);
                LocatedLine* best = nullptr;
                size_t best_dist = SIZE_MAX;
                for (auto& a : adds) {
                    if (a.paired || pair_key(a) != key)
                        continue;
                    size_t dist = a.hunk_pos > d.hunk_pos ? a.hunk_pos - d.hunk_pos
                                                          : d.hunk_pos - a.hunk_pos;
                    if (dist < best_dist) {
                        best_dist = dist;
                        best = &a;
                    }
                }
                if (best) {
                    d.paired = true;
                    best->paired = true;
                    if (d.norm == best->norm)
                        continue;  // semantically equivalent rewrite, dropped
                    out.push_back(build_patch_statement(PatchAction::Modify, &d, best));
                }
            }
            for (auto& d : dels)
                if (!d.paired)
                    out.push_back(build_patch_statement(PatchAction::Delete, &d, nullptr));
            for (auto& a : adds)
                if (!a.paired)
                    out.push_back(build_patch_statement(PatchAction::Add, nullptr, &a));
        }
    }
    for (auto& ps : out)
        ps.p_type = classify_patch_statement(ps);
    std::stable_sort(out.begin(), out.end(), [](const PatchStatement& a, const PatchStatement& b) {
        int la = a.line_patched ? *a.line_patched : a.line_vuln.value_or(0);
        int lb = b.line_patched ? *b.line_patched : b.line_vuln.value_or(0);
        if (a.file != b.file)
            return a.file < b.file;
        return la < lb;
    });
    return out;
}

}  // namespace patchtrace

// SPDX-License-Identifier: Apache-2.0
#include "patchtrace/trigger_id.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace patchtrace {

KeywordConfig KeywordConfig::defaults() {
    KeywordConfig k;
    k.memory_apis = {"memcpy", "memmove", "memset", "memcmp", "strcpy", "strncpy",
                     "strcat", "sprintf", "alloc"};
    k.assertion_apis = {"assert", "BUG"};
    k.path_apis = {"open", "read", "path_copy", "mkdir"};
    k.free_apis = {"free", "delete", "destroy", "unregister"};
    k.alloc_apis = {"alloc"};
    k.division_macros = {"DIV"};
    return k;
}

KeywordConfig KeywordConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot read keyword config " + path);
    KeywordConfig k;
    std::map<std::string, std::vector<std::string>*> sections = {
        {"memory_apis", &k.memory_apis},   {"assertion_apis", &k.assertion_apis},
        {"path_apis", &k.path_apis},       {"free_apis", &k.free_apis},
        {"alloc_apis", &k.alloc_apis},     {"division_macros", &k.division_macros},
    };
    std::vector<std::string>* cur = nullptr;
    std::string line;
    while (std::getline(is, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos)
            continue;
        line = line.substr(start);
        if (line[0] == '#')
            continue;
        if (line.front() == '[' && line.back() == ']') {
            std::string name = line.substr(1, line.size() - 2);
            auto it = sections.find(name);
            if (it == sections.end())
                throw std::runtime_error("unknown keyword section [" + name + "]");
            cur = it->second;
            continue;
        }
        if (!cur)
            throw std::runtime_error("keyword outside any section: " + line);
        cur->push_back(line);
    }
    for (auto& [name, list] : sections)
        if (list->empty())
            throw std::runtime_error("keyword list " + name + " must not be empty");
    return k;
}

bool KeywordConfig::matches(const std::vector<std::string>& list, const std::string& identifier) {
    for (const auto& kw : list)
        if (identifier.find(kw) != std::string::npos)
            return true;
    return false;
}

std::set<std::string> cwe_allowed_types(int cwe) {
    switch (cwe) {
    case 119:
    case 125:
    case 787:
    case 120:
        return {"T-1", "T-2", "T-3"};
    case 189:
    case 190:
    case 191:
        return {"T-1", "T-2", "T-3", "T-4"};
    case 617:
        return {"T-5"};
    case 22:
        return {"T-6"};
    case 835:
        return {"T-7", "T-8", "T-9"};
    case 772:
    case 401:
        return {"T-10", "T-11"};
    case 415:
        return {"T-12"};
    case 416:
        return {"T-12", "T-13"};
    case 476:
        return {"T-14", "T-15", "T-16"};
    case 369:
        return {"T-17", "T-18", "T-19"};
    default:
        throw UnsupportedCweError("unsupported CWE-" + std::to_string(cwe));
    }
}

bool cwe_is_first_class(int cwe) {
    return cwe == 772 || cwe == 401 || cwe == 835;
}

namespace {

bool involves(const Statement& s, const CriticalVariable& cv) {
    for (const auto& u : s.uses)
        if (u.base == cv.var.base)
            return true;
    for (const auto& d : s.defs)
        if (d.base == cv.var.base)
            return true;
    return false;
}

bool cv_is_pointer(const TriggerContext& ctx, const Statement& s, const CriticalVariable& cv) {
    if (cv.var.is_pointer)
        return true;
    if (const FunctionDef* fn = ctx.vuln->function(s.function))
        if (fn->is_pointer_var(cv.var.base))
            return true;
    if (const FunctionDef* fn = ctx.vuln->function(cv.scope))
        if (fn->is_pointer_var(cv.var.base))
            return true;
    return false;
}

/// Does any statement of the variable's scope access a member of it?
bool cv_is_struct_like(const TriggerContext& ctx, const CriticalVariable& cv) {
    auto scan = [&](const FunctionDef* fn) {
        if (!fn)
            return false;
        for (const auto& s : fn->body)
            for (const auto& u : s.uses)
                if (u.base == cv.var.base && !u.member_path.empty())
                    return true;
        return false;
    };
    return scan(ctx.vuln->function(cv.scope));
}

bool reaching_possibly_null(const TriggerContext& ctx, const Statement& s,
                            const CriticalVariable& cv) {
    const Pdg& pdg = ctx.graphs->pdg(s.function);
    auto it = pdg.reaching.find(s.id);
    if (it == pdg.reaching.end())
        return false;
    for (const auto& fact : it->second) {
        if (fact.var.base != cv.var.base || !fact.var.member_path.empty())
            continue;
        if (fact.from < 0)
            continue;  // parameter: assume initialized by the caller
        const Statement* def = ctx.vuln->stmt(fact.from);
        if (!def)
            continue;
        if (def->assigns_null)
            return true;
        for (const auto& name : def->uninit_decls)
            if (name == cv.var.base)
                return true;
        for (const auto& ci : def->calls)
            if (KeywordConfig::matches(ctx.keywords.alloc_apis, ci.callee))
                return true;  // allocation may fail and leave the value NULL
    }
    return false;
}

bool is_division_macro(const TriggerContext& ctx, const std::string& name) {
    if (KeywordConfig::matches(ctx.keywords.division_macros, name))
        return true;
    std::string body;
    if (ctx.vuln->macro_body(name, body))
        return body.find('/') != std::string::npos || body.find('%') != std::string::npos;
    return false;
}

/// Rule matching for one statement against one (possibly absent) critical
/// variable. Returns the matched T-types among the allowed set.
std::vector<std::string> match_rules(const TriggerContext& ctx, const Statement& s,
                                     const CriticalVariable* cv,
                                     const std::set<std::string>& allowed) {
    std::vector<std::string> out;
    auto allow = [&](const char* t) { return allowed.count(t) != 0; };

    if (cv) {
        if (allow("T-1") && involves(s, *cv))
            for (const auto& ci : s.calls)
                if (KeywordConfig::matches(ctx.keywords.memory_apis, ci.callee)) {
                    out.push_back("T-1");
                    break;
                }
        if (allow("T-2")) {
            bool hit = false;
            for (const auto& a : s.array_refs)
                if (a.base == cv->var.base)
                    hit = true;
            for (const auto& ix : s.index_vars)
                if (ix.base == cv->var.base)
                    hit = true;
            if (hit)
                out.push_back("T-2");
        }
        if (allow("T-3") && cv_is_pointer(ctx, s, *cv)) {
            bool hit = false;
            for (const auto& d : s.deref_vars)
                if (d.base == cv->var.base && d.member_path.empty())
                    hit = true;
            for (const auto& a : s.arith_vars)
                if (a.base == cv->var.base && a.member_path.empty())
                    hit = true;
            if (hit)
                out.push_back("T-3");
        }
        if (allow("T-4") && !cv_is_pointer(ctx, s, *cv)) {
            for (const auto& a : s.arith_vars)
                if (a.base == cv->var.base) {
                    out.push_back("T-4");
                    break;
                }
        }
        if (allow("T-5") && involves(s, *cv))
            for (const auto& ci : s.calls)
                if (KeywordConfig::matches(ctx.keywords.assertion_apis, ci.callee)) {
                    out.push_back("T-5");
                    break;
                }
        if (allow("T-6") && involves(s, *cv))
            for (const auto& ci : s.calls)
                if (KeywordConfig::matches(ctx.keywords.path_apis, ci.callee)) {
                    out.push_back("T-6");
                    break;
                }
        if (allow("T-12") && involves(s, *cv))
            for (const auto& ci : s.calls)
                if (KeywordConfig::matches(ctx.keywords.free_apis, ci.callee)) {
                    out.push_back("T-12");
                    break;
                }
        if (allow("T-13")) {
            // "usage" means reading the variable or touching one of its
            // members; overwriting the pointer itself is not a use-after-free
            bool hit = false;
            for (const auto& u : s.uses)
                if (u.base == cv->var.base)
                    hit = true;
            for (const auto& d : s.defs)
                if (d.base == cv->var.base && !d.member_path.empty())
                    hit = true;
            if (hit)
                out.push_back("T-13");
        }
        if (allow("T-14")) {
            bool hit = s.uses_member_of(cv->var.base);
            for (const auto& d : s.defs)
                if (d.base == cv->var.base && !d.member_path.empty())
                    hit = true;
            if (hit)
                out.push_back("T-14");
        }
        if (allow("T-15") && involves(s, *cv) && !cv_is_struct_like(ctx, *cv) &&
            reaching_possibly_null(ctx, s, *cv)) {
            for (const auto& ci : s.calls)
                if (KeywordConfig::matches(ctx.keywords.memory_apis, ci.callee)) {
                    out.push_back("T-15");
                    break;
                }
        }
        if (allow("T-16")) {
            for (const auto& ci : s.calls) {
                bool through_member =
                    ci.callee_ref && ci.callee_ref->base == cv->var.base;
                bool through_var = !ci.callee_ref && ci.callee == cv->var.base &&
                                   !ctx.vuln->function(ci.callee);
                if (through_var) {
                    const FunctionDef* fn = ctx.vuln->function(s.function);
                    through_var = fn && fn->declares_var(ci.callee);
                }
                if (through_member || through_var) {
                    out.push_back("T-16");
                    break;
                }
            }
        }
        if (allow("T-17"))
            for (const auto& d : s.divisors)
                if (d.base == cv->var.base) {
                    out.push_back("T-17");
                    break;
                }
        if (allow("T-18") && involves(s, *cv))
            for (const auto& ci : s.calls)
                if (KeywordConfig::matches(ctx.keywords.alloc_apis, ci.callee)) {
                    out.push_back("T-18");
                    break;
                }
        if (allow("T-19") && involves(s, *cv))
            for (const auto& ci : s.calls)
                if (is_division_macro(ctx, ci.callee)) {
                    out.push_back("T-19");
                    break;
                }
    }
    return out;
}

struct Candidate {
    StatementId stmt;
    int slice_index;
    bool at_or_after;
};

/// Slice statements in slice order, deduplicated, with membership flags.
std::vector<Candidate> collect_candidates(const std::vector<ProgramSlice>& slices) {
    std::vector<Candidate> out;
    std::set<StatementId> seen;
    for (size_t i = 0; i < slices.size(); ++i) {
        for (const auto& e : slices[i].statements) {
            if (!seen.insert(e.stmt).second)
                continue;
            out.push_back({e.stmt, static_cast<int>(i), e.at_or_after_patch});
        }
    }
    return out;
}

void merge_finding(std::vector<TriggerFinding>& findings, TriggerFinding f) {
    for (auto& existing : findings) {
        if (existing.file == f.file && existing.line == f.line) {
            for (const auto& t : f.t_types)
                if (std::find(existing.t_types.begin(), existing.t_types.end(), t) ==
                    existing.t_types.end())
                    existing.t_types.push_back(t);
            std::sort(existing.t_types.begin(), existing.t_types.end());
            return;
        }
    }
    std::sort(f.t_types.begin(), f.t_types.end());
    findings.push_back(std::move(f));
}

TriggerFinding make_finding(const TriggerContext& ctx, const Statement& s,
                            std::vector<std::string> types, const CriticalVariable* cv,
                            const std::string& phase, int slice_index) {
    TriggerFinding f;
    f.file = s.file;
    f.function = s.function;
    f.line = s.line;
    f.stmt = s.id;
    f.t_types = std::move(types);
    if (cv)
        f.matched_cv = *cv;
    f.search_phase = phase;
    f.slice_index = slice_index;
    (void)ctx;
    return f;
}

/// The functions hosting patch statements, in the vulnerable tree.
std::vector<const FunctionDef*> patched_functions(const TriggerContext& ctx) {
    std::vector<const FunctionDef*> out;
    std::set<std::string> seen;
    for (const auto& ps : *ctx.patch_statements) {
        if (ps.function.empty() || !seen.insert(ps.function).second)
            continue;
        if (const FunctionDef* fn = ctx.vuln->function(ps.function))
            out.push_back(fn);
    }
    return out;
}

int patch_anchor_line(const TriggerContext& ctx, const std::string& function) {
    int line = 1 << 30;
    for (const auto& ps : *ctx.patch_statements) {
        if (ps.function != function)
            continue;
        int l = ps.line_vuln ? *ps.line_vuln : ps.anchor_line_vuln;
        line = std::min(line, l);
    }
    return line == 1 << 30 ? 0 : line;
}

}  // namespace

TriggerResult identify_triggers_class1(const TriggerContext& ctx,
                                       const std::vector<ProgramSlice>& slices) {
    TriggerResult res;
    res.trace.phases_tried.push_back("forward");
    const int cwe = ctx.cwe;

    if (cwe == 772 || cwe == 401) {
        // the release must happen before the function ends: the trigger is the
        // first return at or after the patch, or the last statement otherwise
        for (const FunctionDef* fn : patched_functions(ctx)) {
            int anchor = patch_anchor_line(ctx, fn->name);
            const Statement* chosen = nullptr;
            for (const auto& s : fn->body) {
                if (s.kind != StmtKind::Return || s.line < anchor)
                    continue;
                if (!chosen || s.line < chosen->line)
                    chosen = &s;
            }
            if (chosen) {
                merge_finding(res.findings,
                              make_finding(ctx, *chosen, {"T-10"}, nullptr, "forward", -1));
            } else if (!fn->body.empty()) {
                const Statement* last = &fn->body.back();
                merge_finding(res.findings,
                              make_finding(ctx, *last, {"T-11"}, nullptr, "forward", -1));
            }
        }
        return res;
    }

    // CWE-835: loop conditions, gotos, and recursive calls, searched in the
    // slices and the to-be-patched functions
    std::vector<const Statement*> domain;
    std::set<StatementId> seen;
    std::map<StatementId, int> slice_of;
    for (size_t i = 0; i < slices.size(); ++i)
        for (const auto& e : slices[i].statements)
            if (seen.insert(e.stmt).second) {
                domain.push_back(ctx.vuln->stmt(e.stmt));
                slice_of[e.stmt] = static_cast<int>(i);
            }
    for (const FunctionDef* fn : patched_functions(ctx))
        for (const auto& s : fn->body)
            if (seen.insert(s.id).second)
                domain.push_back(&s);

    for (const Statement* s : domain) {
        if (!s)
            continue;
        std::vector<std::string> types;
        if (s->is_loop())
            types.push_back("T-7");
        if (s->kind == StmtKind::Goto && !s->jump_target.empty() && s->jump_target[0] != '@')
            types.push_back("T-8");
        for (const auto& ci : s->calls)
            if (!ci.callee_ref && ctx.graphs->callgraph().on_cycle_with(s->function, ci.callee)) {
                types.push_back("T-9");
                break;
            }
        if (!types.empty()) {
            int si = slice_of.count(s->id) ? slice_of[s->id] : -1;
            merge_finding(res.findings, make_finding(ctx, *s, types, nullptr, "forward", si));
        }
    }
    return res;
}

std::vector<CriticalVariable> transform_critical_variables(
    const TriggerContext& ctx, const std::vector<CriticalVariable>& cvs,
    const std::vector<ProgramSlice>& slices) {
    std::vector<CriticalVariable> out;
    auto candidates = collect_candidates(slices);

    std::set<std::string> patched_fn_names;
    for (const auto& ps : *ctx.patch_statements)
        if (!ps.function.empty())
            patched_fn_names.insert(ps.function);

    auto known = [&](const std::string& base, const std::string& scope) {
        for (const auto& cv : cvs)
            if (cv.var.base == base && cv.scope == scope)
                return true;
        for (const auto& cv : out)
            if (cv.var.base == base && cv.scope == scope)
                return true;
        return false;
    };
    auto emit = [&](const std::string& base, const std::string& scope, int level,
                    const std::string& origin) {
        if (base.empty() || known(base, scope))
            return;
        CriticalVariable nv;
        nv.var = VarRef{base, {}, false, false};
        nv.level = level;
        nv.origin = origin;
        nv.scope = scope;
        out.push_back(std::move(nv));
    };

    for (const auto& cv : cvs) {
        int next_level = cv.level + 1;
        for (const auto& cand : candidates) {
            const Statement* s = ctx.vuln->stmt(cand.stmt);
            if (!s)
                continue;
            // Assignment: c' = ... c ...
            if (s->kind == StmtKind::Assign) {
                bool uses_cv = false;
                for (const auto& u : s->uses)
                    if (u.base == cv.var.base)
                        uses_cv = true;
                if (uses_cv)
                    for (const auto& d : s->defs)
                        if (d.base != cv.var.base)
                            emit(d.base, s->function, next_level,
                                 "assignment of " + cv.var.base + " at " + s->function + ":" +
                                     std::to_string(s->line));
            }
            // Function header: cv used as an argument maps to the parameter
            for (const auto& ci : s->calls) {
                if (ci.callee_ref)
                    continue;
                const FunctionDef* g = ctx.vuln->function(ci.callee);
                if (!g)
                    continue;
                size_t n = std::min(ci.args.size(), g->params.size());
                for (size_t j = 0; j < n; ++j)
                    for (const auto& v : ci.args[j].vars)
                        if (v.base == cv.var.base)
                            emit(g->params[j].name, g->name, next_level,
                                 "parameter of " + g->name + " bound at " + s->function + ":" +
                                     std::to_string(s->line));
                // To-be-patched function call with return value
                if (s->kind == StmtKind::Assign && patched_fn_names.count(ci.callee)) {
                    bool cv_in_return = false;
                    for (const auto& rs : g->body)
                        if (rs.kind == StmtKind::Return)
                            for (const auto& u : rs.uses)
                                if (u.base == cv.var.base)
                                    cv_in_return = true;
                    if (cv_in_return)
                        for (const auto& d : s->defs)
                            emit(d.base, s->function, next_level,
                                 "return value of " + ci.callee + " at " + s->function + ":" +
                                     std::to_string(s->line));
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::vector<TriggerFinding> search_phase(const TriggerContext& ctx,
                                         const std::vector<ProgramSlice>& slices,
                                         const std::vector<Candidate>& candidates,
                                         const std::vector<CriticalVariable>& cvs,
                                         const std::set<std::string>& allowed, bool at_or_after,
                                         const std::string& phase_name) {
    std::vector<TriggerFinding> findings;
    (void)slices;
    for (const auto& cand : candidates) {
        if (cand.at_or_after != at_or_after)
            continue;
        const Statement* s = ctx.vuln->stmt(cand.stmt);
        if (!s)
            continue;
        for (const auto& cv : cvs) {
            auto types = match_rules(ctx, *s, &cv, allowed);
            if (!types.empty())
                merge_finding(findings, make_finding(ctx, *s, std::move(types), &cv, phase_name,
                                                     cand.slice_index));
        }
    }
    return findings;
}

}  // namespace

TriggerResult identify_triggers_class2(const TriggerContext& ctx,
                                       const std::vector<ProgramSlice>& slices,
                                       const std::vector<CriticalVariable>& cvs) {
    TriggerResult res = identify_triggers(ctx, slices, cvs);
    if (res.findings.empty())
        throw NoTriggerFoundError("no vulnerability-triggering statement identified for CWE-" +
                                  std::to_string(ctx.cwe));
    return res;
}

TriggerResult identify_triggers(const TriggerContext& ctx, const std::vector<ProgramSlice>& slices,
                                const std::vector<CriticalVariable>& cvs) {
    if (cwe_is_first_class(ctx.cwe))
        return identify_triggers_class1(ctx, slices);

    TriggerResult res;
    auto allowed = cwe_allowed_types(ctx.cwe);
    auto candidates = collect_candidates(slices);

    // T-13 applies only when no free-related call sits in the slices
    bool free_calls_present = false;
    for (const auto& cand : candidates) {
        const Statement* s = ctx.vuln->stmt(cand.stmt);
        if (!s)
            continue;
        for (const auto& ci : s->calls)
            if (KeywordConfig::matches(ctx.keywords.free_apis, ci.callee))
                free_calls_present = true;
    }
    std::set<std::string> eff_allowed = allowed;
    if (free_calls_present)
        eff_allowed.erase("T-13");

    // Phase 1: level-1 variables, statements at or after the patch.
    res.trace.phases_tried.push_back("forward");
    auto findings = search_phase(ctx, slices, candidates, cvs, eff_allowed, true, "forward");
    // T-13/T-14 keep only the first usage in slice order
    auto keep_first_of = [&](std::vector<TriggerFinding>& fs, const std::string& type) {
        bool seen_one = false;
        for (auto& f : fs) {
            auto it = std::find(f.t_types.begin(), f.t_types.end(), type);
            if (it == f.t_types.end())
                continue;
            if (seen_one)
                f.t_types.erase(it);
            else
                seen_one = true;
        }
        fs.erase(std::remove_if(fs.begin(), fs.end(),
                                [](const TriggerFinding& f) { return f.t_types.empty(); }),
                 fs.end());
    };
    keep_first_of(findings, "T-13");
    keep_first_of(findings, "T-14");
    res.trace.level_findings.emplace_back(1, static_cast<int>(findings.size()));
    if (!findings.empty()) {
        res.findings = std::move(findings);
        return res;
    }

    // Phase 2: transformed variables, smaller levels first.
    res.trace.phases_tried.push_back("transformed-cv");
    std::vector<CriticalVariable> accumulated = cvs;
    std::vector<CriticalVariable> frontier = cvs;
    for (int level = 2; level <= ctx.max_transform_level; ++level) {
        auto next = transform_critical_variables(ctx, frontier, slices);
        if (next.empty())
            break;
        accumulated.insert(accumulated.end(), next.begin(), next.end());
        auto fs = search_phase(ctx, slices, candidates, next, eff_allowed, true, "transformed-cv");
        keep_first_of(fs, "T-13");
        keep_first_of(fs, "T-14");
        res.trace.level_findings.emplace_back(level, static_cast<int>(fs.size()));
        if (!fs.empty()) {
            res.findings = std::move(fs);
            return res;
        }
        frontier = std::move(next);
    }

    // Phase 3: statements preceding the patch, all accumulated levels.
    res.trace.phases_tried.push_back("preceding");
    auto fs = search_phase(ctx, slices, candidates, accumulated, eff_allowed, false, "preceding");
    keep_first_of(fs, "T-13");
    keep_first_of(fs, "T-14");
    res.findings = std::move(fs);
    return res;
}

}  // namespace patchtrace

// SPDX-License-Identifier: Apache-2.0
#include "patchtrace/critical_vars.hpp"

#include <algorithm>
#include <set>

namespace patchtrace {

bool cwe_supported(int cwe) {
    static const std::set<int> kSupported = {119, 125, 787, 120, 189, 190, 191, 617,
                                             22,  835, 772, 401, 415, 416, 476, 369};
    return kSupported.count(cwe) != 0;
}

namespace {

bool is_numeric_error_cwe(int cwe) {
    return cwe == 189 || cwe == 190 || cwe == 191;
}

/// A member of a struct promotes to the struct variable itself.
VarRef promote(const VarRef& v) {
    return VarRef{v.base, {}, v.is_pointer, false};
}

/// Identifiers written in the macro-constant convention (FOO_BAR) are
/// constants, not variables; there is no preprocessor to resolve them.
bool looks_like_constant(const std::string& name) {
    bool has_alpha = false;
    for (char c : name) {
        if (c >= 'a' && c <= 'z')
            return false;
        if (c >= 'A' && c <= 'Z')
            has_alpha = true;
        else if (c != '_' && !(c >= '0' && c <= '9'))
            return false;
    }
    return has_alpha;
}

void add_var(std::vector<VarRef>& out, const VarRef& v) {
    if (looks_like_constant(v.base))
        return;
    VarRef p = promote(v);
    for (const auto& e : out)
        if (e.same_object(p))
            return;
    out.push_back(p);
}

std::vector<VarRef> all_vars(const Statement& s) {
    std::vector<VarRef> out;
    for (const auto& d : s.defs)
        add_var(out, d);
    for (const auto& u : s.uses)
        add_var(out, u);
    return out;
}

std::vector<VarRef> assigned_vars(const Statement& s) {
    std::vector<VarRef> out;
    for (const auto& d : s.defs)
        add_var(out, d);
    return out;
}

std::vector<VarRef> argument_vars(const Statement& s) {
    std::vector<VarRef> out;
    for (const auto& ci : s.calls)
        for (const auto& arg : ci.args)
            for (const auto& v : arg.vars)
                add_var(out, v);
    return out;
}

std::vector<VarRef> used_vars(const Statement& s) {
    std::vector<VarRef> out;
    for (const auto& u : s.uses)
        add_var(out, u);
    return out;
}

std::vector<std::string> names_of(const std::vector<VarRef>& vars) {
    std::vector<std::string> out;
    for (const auto& v : vars)
        out.push_back(v.base);
    return out;
}

/// "Modified variables" of a paired modify: the symmetric difference of the
/// two sides' variable sets, by base name.
std::vector<VarRef> modified_vars(const std::vector<VarRef>& old_side,
                                  const std::vector<VarRef>& new_side) {
    std::vector<VarRef> out;
    auto old_names = names_of(old_side);
    auto new_names = names_of(new_side);
    for (const auto& v : new_side)
        if (std::find(old_names.begin(), old_names.end(), v.base) == old_names.end())
            add_var(out, v);
    for (const auto& v : old_side)
        if (std::find(new_names.begin(), new_names.end(), v.base) == new_names.end())
            add_var(out, v);
    return out;
}

std::vector<VarRef> param_refs(const Statement& signature) {
    // signature statements carry their parameters as uses
    std::vector<VarRef> out;
    for (const auto& u : signature.uses)
        add_var(out, u);
    return out;
}

std::vector<VarRef> modified_params(const PatchStatement& ps) {
    if (!ps.statement_old)
        return param_refs(ps.statement);
    std::vector<VarRef> out;
    const auto& old_params = ps.statement_old->uses;
    const auto& new_params = ps.statement.uses;
    auto old_names = names_of(old_params);
    auto new_names = names_of(new_params);
    for (const auto& v : new_params)
        if (std::find(old_names.begin(), old_names.end(), v.base) == old_names.end())
            add_var(out, v);
    for (const auto& v : old_params)
        if (std::find(new_names.begin(), new_names.end(), v.base) == new_names.end())
            add_var(out, v);
    // same names, changed declaration text: compare positionally
    if (out.empty()) {
        size_t n = std::min(old_params.size(), new_params.size());
        for (size_t i = 0; i < n; ++i)
            if (old_params[i].is_pointer != new_params[i].is_pointer)
                add_var(out, new_params[i]);
    }
    return out;
}

std::vector<VarRef> declared_changed_vars(const PatchStatement& ps) {
    // P-6: variables whose definitions changed between the paired sides
    if (!ps.statement_old)
        return assigned_vars(ps.statement);
    std::vector<VarRef> out;
    if (ps.text_old != ps.text_new) {
        for (const auto& d : ps.statement.defs)
            add_var(out, d);
        for (const auto& d : ps.statement_old->defs)
            add_var(out, d);
    }
    return out;
}

}  // namespace

std::vector<CriticalVariable> identify_critical_variables_or_empty(const PatchStatement& ps,
                                                                   int cwe) {
    const Statement& st = ps.statement;
    std::vector<VarRef> vars;

    if (ps.p_type == "P-1" || ps.p_type == "P-2") {
        vars = is_numeric_error_cwe(cwe) ? all_vars(st) : assigned_vars(st);
    } else if (ps.p_type == "P-3") {
        vars = argument_vars(st);
    } else if (ps.p_type == "P-4") {
        std::vector<VarRef> old_args =
            ps.statement_old ? argument_vars(*ps.statement_old) : std::vector<VarRef>{};
        vars = modified_vars(old_args, argument_vars(st));
    } else if (ps.p_type == "P-5") {
        vars = assigned_vars(st);
    } else if (ps.p_type == "P-6") {
        vars = declared_changed_vars(ps);
    } else if (ps.p_type == "P-7") {
        vars = param_refs(st);
    } else if (ps.p_type == "P-8") {
        vars = modified_params(ps);
    } else if (ps.p_type == "P-9") {
        vars = used_vars(st);
        for (const auto& d : st.defs)  // for-loop headers define their counter
            add_var(vars, d);
    } else if (ps.p_type == "P-10") {
        std::vector<VarRef> old_side =
            ps.statement_old ? all_vars(*ps.statement_old) : std::vector<VarRef>{};
        vars = modified_vars(old_side, all_vars(st));
    } else {  // P-11
        if (st.kind == StmtKind::Return) {
            if (ps.action == PatchAction::Modify && ps.statement_old) {
                vars = modified_vars(used_vars(*ps.statement_old), used_vars(st));
            } else {
                vars = used_vars(st);
            }
        }
        // other P-11 kinds (goto, labels, opaque): no extraction rule
    }

    std::vector<CriticalVariable> out;
    std::string origin = ps.p_type + "@" + ps.file + ":" +
                         std::to_string(ps.line_vuln ? *ps.line_vuln : ps.line_patched.value_or(0));
    for (const auto& v : vars) {
        CriticalVariable cv;
        cv.var = v;
        cv.level = 1;
        cv.origin = origin;
        cv.scope = ps.function;
        out.push_back(std::move(cv));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<CriticalVariable> identify_critical_variables(const PatchStatement& ps, int cwe) {
    auto out = identify_critical_variables_or_empty(ps, cwe);
    if (out.empty())
        throw NoCriticalVariablesError("no critical variables for " + ps.p_type + " patch at " +
                                       ps.file + ":" +
                                       std::to_string(ps.line_vuln.value_or(
                                           ps.line_patched.value_or(0))));
    return out;
}

}  // namespace patchtrace

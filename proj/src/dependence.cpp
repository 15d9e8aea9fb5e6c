// SPDX-License-Identifier: Apache-2.0
#include "patchtrace/dependence.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace patchtrace {

std::map<StatementId, std::vector<StatementId>> Cfg::pred() const {
    std::map<StatementId, std::vector<StatementId>> p;
    for (const auto& [from, succs] : succ)
        for (StatementId to : succs)
            p[to].push_back(from);
    return p;
}

namespace {

class CfgBuilder {
public:
    explicit CfgBuilder(const FunctionDef& f) : f_(f) {
        for (const auto& s : f.body) {
            by_id_[s.id] = &s;
            if (s.kind == StmtKind::Label && !s.label_name.empty())
                labels_[s.label_name] = s.id;
        }
    }

    Cfg build() {
        std::vector<StatementId> top;
        for (const auto& s : f_.body)
            if (s.parent == kNoStatement)
                top.push_back(s.id);
        cfg_.entry = top.empty() ? kCfgExit : entry_of(top.front());
        build_seq(top, kCfgExit, kNoStatement, kNoStatement);
        return std::move(cfg_);
    }

private:
    const FunctionDef& f_;
    Cfg cfg_;
    std::map<StatementId, const Statement*> by_id_;
    std::map<std::string, StatementId> labels_;

    void add_edge(StatementId from, StatementId to) {
        auto& v = cfg_.succ[from];
        if (std::find(v.begin(), v.end(), to) == v.end())
            v.push_back(to);
    }

    // Where control enters a construct. Do-while bodies run before their
    // condition statement.
    StatementId entry_of(StatementId id) const {
        const Statement* s = by_id_.at(id);
        if (s->kind == StmtKind::Control && s->control == ControlKind::DoWhile &&
            !s->then_children.empty())
            return entry_of(s->then_children.front());
        return id;
    }

    void build_seq(const std::vector<StatementId>& stmts, StatementId follow,
                   StatementId break_target, StatementId continue_target) {
        for (size_t i = 0; i < stmts.size(); ++i) {
            StatementId next = i + 1 < stmts.size() ? entry_of(stmts[i + 1]) : follow;
            build_one(stmts[i], next, break_target, continue_target);
        }
    }

    void build_one(StatementId id, StatementId follow, StatementId break_target,
                   StatementId continue_target) {
        const Statement& s = *by_id_.at(id);
        switch (s.kind) {
        case StmtKind::Control:
            switch (s.control) {
            case ControlKind::If: {
                add_edge(id, s.then_children.empty() ? follow : entry_of(s.then_children.front()));
                add_edge(id, s.else_children.empty() ? follow : entry_of(s.else_children.front()));
                build_seq(s.then_children, follow, break_target, continue_target);
                build_seq(s.else_children, follow, break_target, continue_target);
                return;
            }
            case ControlKind::While:
            case ControlKind::For: {
                add_edge(id, s.then_children.empty() ? id : entry_of(s.then_children.front()));
                add_edge(id, follow);
                build_seq(s.then_children, id, follow, id);
                return;
            }
            case ControlKind::DoWhile: {
                // children run first, the condition statement follows them
                build_seq(s.then_children, id, follow, id);
                add_edge(id, s.then_children.empty() ? follow
                                                     : entry_of(s.then_children.front()));
                add_edge(id, follow);
                return;
            }
            case ControlKind::Switch: {
                bool has_label = false;
                for (StatementId c : s.then_children) {
                    const Statement* cs = by_id_.at(c);
                    if (cs->kind == StmtKind::Label) {
                        add_edge(id, c);
                        has_label = true;
                    }
                }
                if (!has_label && !s.then_children.empty())
                    add_edge(id, entry_of(s.then_children.front()));
                add_edge(id, follow);
                build_seq(s.then_children, follow, follow, continue_target);
                return;
            }
            default:
                break;
            }
            add_edge(id, follow);
            return;
        case StmtKind::Return:
            add_edge(id, kCfgExit);
            return;
        case StmtKind::Goto: {
            if (s.jump_target == "@break") {
                add_edge(id, break_target == kNoStatement ? follow : break_target);
            } else if (s.jump_target == "@continue") {
                add_edge(id, continue_target == kNoStatement ? follow : continue_target);
            } else {
                auto it = labels_.find(s.jump_target);
                add_edge(id, it != labels_.end() ? it->second : follow);
            }
            return;
        }
        default:
            add_edge(id, follow);
            return;
        }
    }
};

bool kills(const VarRef& def, const VarRef& victim) {
    if (def.base != victim.base)
        return false;
    if (def.member_path.empty())
        return true;  // whole-object assignment kills members
    return def.member_path == victim.member_path;
}

}  // namespace

Cfg build_cfg(const FunctionDef& f) {
    return CfgBuilder(f).build();
}

Pdg build_pdg(const FunctionDef& f) {
    Pdg pdg;
    pdg.function = f.name;
    for (const auto& s : f.body)
        pdg.nodes.push_back(s.id);
    pdg.cfg = build_cfg(f);
    auto preds = pdg.cfg.pred();

    std::map<StatementId, const Statement*> by_id;
    for (const auto& s : f.body)
        by_id[s.id] = &s;

    // Facts are (defining ref, def site). Parameters are live at entry with
    // pseudo ids below kParamDef.
    using Fact = DataEdge;  // from = def site, var = defining ref, to unused
    std::set<Fact> entry_facts;
    for (size_t i = 0; i < f.params.size(); ++i) {
        VarRef r{f.params[i].name, {}, f.params[i].is_pointer, f.params[i].is_array};
        entry_facts.insert({kParamDef - static_cast<StatementId>(i), kNoStatement, r});
    }

    std::map<StatementId, std::set<Fact>> in, out;
    std::deque<StatementId> work(pdg.nodes.begin(), pdg.nodes.end());
    while (!work.empty()) {
        StatementId id = work.front();
        work.pop_front();
        std::set<Fact> new_in;
        if (id == pdg.cfg.entry)
            new_in = entry_facts;
        for (StatementId p : preds[id])
            if (p != kNoStatement && p != kCfgExit)
                for (const auto& fct : out[p])
                    new_in.insert(fct);
        const Statement& s = *by_id.at(id);
        std::set<Fact> new_out;
        for (const auto& fct : new_in) {
            bool killed = false;
            for (const auto& d : s.defs)
                if (kills(d, fct.var)) {
                    killed = true;
                    break;
                }
            if (!killed)
                new_out.insert(fct);
        }
        for (const auto& d : s.defs)
            new_out.insert({id, kNoStatement, d});
        bool changed = new_in != in[id] || new_out != out[id];
        in[id] = std::move(new_in);
        out[id] = std::move(new_out);
        if (changed)
            for (StatementId succ : pdg.cfg.succ[id])
                if (succ != kCfgExit)
                    work.push_back(succ);
    }
    pdg.reaching = in;

    for (const auto& s : f.body) {
        for (const auto& fct : in[s.id]) {
            if (fct.from < 0)
                continue;  // parameter pseudo-defs are not statement edges
            for (const auto& u : s.uses) {
                if (fct.var.overlaps(u)) {
                    pdg.data_edges.insert({fct.from, s.id, fct.var});
                    break;
                }
            }
        }
        if (s.kind == StmtKind::Control) {
            for (StatementId c : s.then_children)
                pdg.ctrl_edges.insert({s.id, c});
            for (StatementId c : s.else_children)
                pdg.ctrl_edges.insert({s.id, c});
        }
    }

    // Implicit-return augmentation for pointer arguments: the call acts as a
    // def of the pointer for statements downstream of the call site.
    for (const auto& s : f.body) {
        if (s.calls.empty())
            continue;
        std::set<std::string> pointer_args;
        for (const auto& ci : s.calls) {
            for (const auto& arg : ci.args) {
                for (const auto& v : arg.vars) {
                    if (!v.member_path.empty())
                        continue;
                    if (arg.address_of || v.is_pointer || f.is_pointer_var(v.base))
                        pointer_args.insert(v.base);
                }
            }
        }
        for (const auto& name : pointer_args) {
            VarRef pref{name, {}, true, false};
            // forward walk from the call site, stopping at real redefinitions
            std::set<StatementId> seen;
            std::deque<StatementId> q;
            for (StatementId nxt : pdg.cfg.succ[s.id])
                if (nxt != kCfgExit)
                    q.push_back(nxt);
            while (!q.empty()) {
                StatementId cur = q.front();
                q.pop_front();
                if (cur == kCfgExit || !seen.insert(cur).second)
                    continue;
                const Statement& cs = *by_id.at(cur);
                for (const auto& u : cs.uses)
                    if (pref.overlaps(u)) {
                        pdg.pointer_edges.insert({s.id, cur, pref});
                        break;
                    }
                bool redefined = false;
                for (const auto& d : cs.defs)
                    if (kills(d, pref))
                        redefined = true;
                if (!redefined)
                    for (StatementId nxt : pdg.cfg.succ[cur])
                        if (nxt != kCfgExit)
                            q.push_back(nxt);
            }
        }
    }
    return pdg;
}

// ---------------------------------------------------------------------------
// Call graph

std::vector<const CallSite*> CallGraph::callers_of(const std::string& callee) const {
    std::vector<const CallSite*> out;
    for (const auto& e : edges)
        if (e.callee == callee)
            out.push_back(&e);
    return out;
}

std::vector<const CallSite*> CallGraph::calls_from(const std::string& caller) const {
    std::vector<const CallSite*> out;
    for (const auto& e : edges)
        if (e.caller == caller)
            out.push_back(&e);
    return out;
}

bool CallGraph::reaches(const std::string& from, const std::string& to) const {
    std::set<std::string> seen;
    std::deque<std::string> q{from};
    while (!q.empty()) {
        std::string cur = q.front();
        q.pop_front();
        if (!seen.insert(cur).second)
            continue;
        for (const auto& e : edges)
            if (e.caller == cur) {
                if (e.callee == to)
                    return true;
                q.push_back(e.callee);
            }
    }
    return false;
}

bool CallGraph::on_cycle_with(const std::string& from, const std::string& callee) const {
    if (callee == from)
        return true;
    return reaches(callee, from);
}

CallGraph build_call_graph(const SourceTree& tree) {
    CallGraph cg;
    for (const auto& u : tree.units)
        for (const auto& f : u.functions)
            cg.nodes.insert(f.name);
    for (const auto& u : tree.units) {
        for (const auto& f : u.functions) {
            for (const auto& s : f.body) {
                for (const auto& ci : s.calls) {
                    if (ci.callee_ref) {
                        cg.external.insert({f.name, ci.callee});
                        continue;  // member/pointer call, target unresolved
                    }
                    if (cg.nodes.count(ci.callee))
                        cg.edges.insert({f.name, ci.callee, s.id});
                    else
                        cg.external.insert({f.name, ci.callee});
                }
            }
        }
    }
    return cg;
}

// ---------------------------------------------------------------------------
// File-dependency closure

namespace {

std::string basename_of(const std::string& p) {
    auto pos = p.find_last_of('/');
    return pos == std::string::npos ? p : p.substr(pos + 1);
}

void include_closure(const SourceTree& tree, const std::string& start,
                     std::set<std::string>& out) {
    std::deque<std::string> q{start};
    while (!q.empty()) {
        std::string cur = q.front();
        q.pop_front();
        if (!out.insert(cur).second)
            continue;
        const SourceUnit* u = tree.unit(cur);
        if (!u)
            continue;
        for (const auto& inc : u->includes) {
            // resolve project-local headers by exact path, then basename
            const SourceUnit* target = tree.unit(inc);
            if (!target) {
                for (const auto& cand : tree.units)
                    if (basename_of(cand.path) == basename_of(inc)) {
                        target = &cand;
                        break;
                    }
            }
            if (target)
                q.push_back(target->path);
        }
    }
}

}  // namespace

DependencyFiles collect_dependency_files(const SourceTree& tree, const FunctionDef& f) {
    DependencyFiles df;
    const SourceUnit* seed_unit = tree.unit_of_function(f.name);
    if (!seed_unit)
        return df;
    df.seed = seed_unit->path;
    include_closure(tree, df.seed, df.closure);

    CallGraph cg = build_call_graph(tree);
    std::set<std::string> reached;
    std::deque<std::string> q{f.name};
    while (!q.empty()) {
        std::string cur = q.front();
        q.pop_front();
        if (!reached.insert(cur).second)
            continue;
        if (const SourceUnit* u = tree.unit_of_function(cur))
            include_closure(tree, u->path, df.closure);
        for (const auto& e : cg.edges)
            if (e.caller == cur)
                q.push_back(e.callee);
    }
    return df;
}

// ---------------------------------------------------------------------------
// DOT export

std::string to_dot(const Pdg& pdg, const SourceTree& tree) {
    std::ostringstream os;
    os << "digraph pdg {\n";
    for (StatementId id : pdg.nodes) {
        const Statement* s = tree.stmt(id);
        os << "  n" << id << " [label=\"" << pdg.function << ":" << (s ? s->line : 0) << "\"];\n";
    }
    for (const auto& e : pdg.data_edges)
        os << "  n" << e.from << " -> n" << e.to << " [label=\"" << e.var.key() << "\"];\n";
    for (const auto& [from, to] : pdg.ctrl_edges)
        os << "  n" << from << " -> n" << to << " [style=dashed];\n";
    os << "}\n";
    return os.str();
}

std::string to_dot(const CallGraph& cg) {
    std::ostringstream os;
    os << "digraph callgraph {\n";
    for (const auto& n : cg.nodes)
        os << "  \"" << n << "\";\n";
    for (const auto& e : cg.edges)
        os << "  \"" << e.caller << "\" -> \"" << e.callee << "\";\n";
    os << "}\n";
    return os.str();
}

}  // namespace patchtrace

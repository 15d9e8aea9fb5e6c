// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "patchtrace/code_model.hpp"

namespace patchtrace {

/// Sentinel CFG node for the function exit.
inline constexpr StatementId kCfgExit = -2;
/// Sentinel id for parameter definitions live at function entry.
inline constexpr StatementId kParamDef = -3;

struct Cfg {
    StatementId entry = kNoStatement;
    std::map<StatementId, std::vector<StatementId>> succ;

    std::map<StatementId, std::vector<StatementId>> pred() const;
};

Cfg build_cfg(const FunctionDef& f);

struct DataEdge {
    StatementId from;
    StatementId to;
    VarRef var;  // the defining reference carried by the edge

    bool operator<(const DataEdge& o) const {
        if (from != o.from)
            return from < o.from;
        if (to != o.to)
            return to < o.to;
        return var < o.var;
    }
    bool operator==(const DataEdge& o) const {
        return from == o.from && to == o.to && var == o.var;
    }
};

struct Pdg {
    std::string function;
    std::vector<StatementId> nodes;
    std::set<DataEdge> data_edges;
    std::set<std::pair<StatementId, StatementId>> ctrl_edges;
    // Implicit-return augmentation: a call site with a pointer argument acts
    // as a definition of that pointer for the statements after it. Kept apart
    // from data_edges, which stay pure reaching-definition edges.
    std::set<DataEdge> pointer_edges;
    Cfg cfg;

    // Reaching definitions at each node, including parameter defs (kParamDef).
    std::map<StatementId, std::set<DataEdge>> reaching;  // DataEdge.to unused here
};

Pdg build_pdg(const FunctionDef& f);

struct CallSite {
    std::string caller;
    std::string callee;
    StatementId call_site;

    bool operator<(const CallSite& o) const {
        if (caller != o.caller)
            return caller < o.caller;
        if (callee != o.callee)
            return callee < o.callee;
        return call_site < o.call_site;
    }
};

struct CallGraph {
    std::set<std::string> nodes;  // defined functions
    std::set<CallSite> edges;
    std::set<std::pair<std::string, std::string>> external;  // unresolved callees

    std::vector<const CallSite*> callers_of(const std::string& callee) const;
    std::vector<const CallSite*> calls_from(const std::string& caller) const;
    bool reaches(const std::string& from, const std::string& to) const;
    /// True when `callee`, invoked from `from`, can re-enter `from` (self or
    /// mutual recursion).
    bool on_cycle_with(const std::string& from, const std::string& callee) const;
};

CallGraph build_call_graph(const SourceTree& tree);

struct DependencyFiles {
    std::string seed;
    std::set<std::string> closure;
};

DependencyFiles collect_dependency_files(const SourceTree& tree, const FunctionDef& f);

std::string to_dot(const Pdg& pdg, const SourceTree& tree);
std::string to_dot(const CallGraph& cg);

}  // namespace patchtrace

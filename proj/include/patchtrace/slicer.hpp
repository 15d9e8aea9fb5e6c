// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "patchtrace/critical_vars.hpp"
#include "patchtrace/dependence.hpp"
#include "patchtrace/diff_model.hpp"

namespace patchtrace {

struct SliceConfig {
    int theta = 3;  // max distinct functions on a dependence chain
    bool improve_control = true;       // backward-to-definition seeding for control patches
    bool improve_pointer = true;       // pointer arguments as implicit return values
    bool improve_after_return = true;  // resume slicing in callers after f returns

    static SliceConfig with_theta(int t) {
        SliceConfig c;
        c.theta = t;
        return c;
    }
};

/// Per-tree graph bundle: call graph plus lazily built PDGs.
class AnalysisGraphs {
public:
    explicit AnalysisGraphs(const SourceTree& tree);

    const SourceTree& tree() const { return tree_; }
    const CallGraph& callgraph() const { return callgraph_; }
    const Pdg& pdg(const std::string& function) const;

private:
    const SourceTree& tree_;
    CallGraph callgraph_;
    mutable std::map<std::string, std::unique_ptr<Pdg>> pdgs_;
};

enum class SliceEdgeKind {
    Seed,
    DataForward,
    DefOfSeed,      // backward hop to a definition of the criterion variable
    ControlParent,  // governing control statement
    ParamFlow,      // criterion is a parameter; flow from function entry
    ParamBind,      // argument-to-parameter binding at a call site
    PointerArg,     // implicit return through a pointer argument
    AfterReturn     // resumption at a call site after the callee returns
};

const char* to_string(SliceEdgeKind k);

struct SliceProvenance {
    StatementId from = kNoStatement;  // kNoStatement marks a chain root
    SliceEdgeKind kind = SliceEdgeKind::Seed;
    std::string var;  // key of the carried variable, may be empty
};

struct SliceEntry {
    std::string function;
    StatementId stmt = kNoStatement;
    int layer = 1;  // distinct functions on the chain that reached this statement
    bool at_or_after_patch = true;
};

struct ProgramSlice {
    CriticalVariable seed;
    StatementId anchor = kNoStatement;  // the patch statement in the sliced tree
    bool projected = false;             // true when mapped onto the vulnerable tree
    std::vector<SliceEntry> statements;
    std::map<StatementId, SliceProvenance> provenance;
    std::vector<std::string> functions;  // entry order, to-be-patched function first

    bool contains(StatementId id) const;
    const SliceEntry* entry(StatementId id) const;
    int max_layer() const;
};

class SeedNotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Step II: inter-procedural slice for one critical variable. Add-only patches
/// slice the patched tree and project the result onto the vulnerable tree;
/// delete/modify patches slice the vulnerable tree directly.
ProgramSlice slice_for_variable(const CriticalVariable& cv, const PatchStatement& ps,
                                const SourceTree& vuln, const SourceTree& patched,
                                const AnalysisGraphs& vuln_graphs,
                                const AnalysisGraphs& patched_graphs, bool add_only,
                                const SliceConfig& cfg);

/// Control-statement criterion: backward to the definitions of cv, forward
/// along data dependence; statements between definition and control statement
/// appear only when they sit on a data chain.
std::set<StatementId> slice_control_statement(const CriticalVariable& cv, const Statement& ctrl,
                                              const Pdg& pdg);

/// Pointer-argument criterion: backward to the pointer's definition, forward
/// through the uses downstream of the call.
std::set<StatementId> slice_through_pointer_arg(const CriticalVariable& cv, const Statement& call,
                                                const Pdg& pdg);

struct AfterReturnLayer {
    int layer = 2;  // distinct functions on the upward chain
    std::string function;
    StatementId call_site = kNoStatement;
    std::vector<StatementId> statements;  // forward slice inside the caller
};

/// Resumption of slicing in the callers of f, iterated upward while the layer
/// count stays within theta.
std::vector<AfterReturnLayer> slice_after_return(const FunctionDef& f,
                                                 const AnalysisGraphs& graphs,
                                                 const SliceConfig& cfg);

std::string dump_slice(const ProgramSlice& slice, const SourceTree& tree);

}  // namespace patchtrace

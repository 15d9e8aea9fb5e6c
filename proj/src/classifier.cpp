// SPDX-License-Identifier: Apache-2.0
#include "patchtrace/classifier.hpp"

#include <algorithm>
#include <set>

namespace patchtrace {

int count_layers(const std::vector<std::string>& chain) {
    std::set<std::string> distinct(chain.begin(), chain.end());
    return static_cast<int>(distinct.size());
}

std::string patch_function_baseline(const std::vector<PatchStatement>& patch_stmts) {
    std::set<std::string> fns;
    for (const auto& ps : patch_stmts)
        if (!ps.function.empty())
            fns.insert(ps.function);
    return fns.size() >= 2 ? "inter" : "intra";
}

namespace {

struct Walk {
    std::vector<std::string> chain;  // patch function first, trigger last
    bool post_return = false;
    bool ok = false;
};

Walk walk_provenance(const ProgramSlice& slice, StatementId stmt, const SourceTree& vuln) {
    Walk w;
    std::vector<std::string> reversed;
    bool post_return = false;
    StatementId cur = stmt;
    std::set<StatementId> guard;
    while (cur != kNoStatement) {
        if (!guard.insert(cur).second)
            break;
        const Statement* s = vuln.stmt(cur);
        if (s && (reversed.empty() || reversed.back() != s->function))
            reversed.push_back(s->function);
        auto it = slice.provenance.find(cur);
        if (it == slice.provenance.end())
            break;
        if (it->second.kind == SliceEdgeKind::AfterReturn)
            post_return = true;
        cur = it->second.from;
    }
    if (reversed.empty())
        return w;
    // ensure the to-be-patched function heads the chain
    const std::string& root = slice.seed.scope;
    if (!root.empty() && reversed.back() != root)
        reversed.push_back(root);
    w.chain.assign(reversed.rbegin(), reversed.rend());
    w.post_return = post_return;
    w.ok = true;
    return w;
}

}  // namespace

Classification classify_vulnerability(const std::vector<PatchStatement>& patch_stmts,
                                      const std::vector<TriggerFinding>& findings,
                                      const std::vector<ProgramSlice>& slices,
                                      const SourceTree& vuln) {
    if (findings.empty())
        throw NoEvidenceError("no trigger findings to classify");

    std::set<std::string> patch_fns;
    for (const auto& ps : patch_stmts)
        if (!ps.function.empty())
            patch_fns.insert(ps.function);

    Classification cls;
    cls.kind = "intra";
    std::set<std::string> instance_keys;

    auto push_instance = [&](InstanceClassification inst) {
        std::string key = inst.patch_function + "->" + inst.trigger_function + ":" +
                          std::to_string(inst.trigger_line);
        for (const auto& c : inst.chain)
            key += "," + c;
        if (instance_keys.insert(key).second)
            cls.instances.push_back(std::move(inst));
    };

    for (const auto& f : findings) {
        bool evidenced = false;
        // one instance per (patch statement, trigger) pair: every slice whose
        // provenance reaches the finding contributes its own chain
        for (const auto& slice : slices) {
            if (f.stmt == kNoStatement || !slice.contains(f.stmt))
                continue;
            Walk w = walk_provenance(slice, f.stmt, vuln);
            if (!w.ok)
                continue;
            InstanceClassification inst;
            inst.trigger_function = f.function;
            inst.trigger_line = f.line;
            inst.patch_function = w.chain.front();
            inst.chain = w.chain;
            inst.inter = inst.patch_function != inst.trigger_function;
            if (inst.inter) {
                inst.layers = count_layers(w.chain);
                inst.inter_type = w.post_return ? "callee" : "caller";
            }
            push_instance(std::move(inst));
            evidenced = true;
        }
        if (!evidenced && patch_fns.count(f.function)) {
            // class-1 findings live in the to-be-patched function itself
            InstanceClassification inst;
            inst.trigger_function = f.function;
            inst.trigger_line = f.line;
            inst.patch_function = f.function;
            inst.chain = {f.function};
            inst.inter = false;
            push_instance(std::move(inst));
        }
    }

    if (cls.instances.empty())
        throw NoEvidenceError("findings exist but no dependence path connects them to the patch");

    // case verdict: inter when any instance is; headline layers = max over
    // instances, per-instance values retained
    const InstanceClassification* headline = nullptr;
    for (const auto& inst : cls.instances) {
        if (!inst.inter)
            continue;
        if (!headline || inst.layers.value_or(0) > headline->layers.value_or(0))
            headline = &inst;
    }
    if (headline) {
        cls.kind = "inter";
        cls.inter_type = headline->inter_type;
        cls.layers = headline->layers;
        cls.chain = headline->chain;
    } else {
        cls.chain = cls.instances.front().chain;
    }
    return cls;
}

}  // namespace patchtrace

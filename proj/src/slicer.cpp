// SPDX-License-Identifier: Apache-2.0
#include "patchtrace/slicer.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace patchtrace {

const char* to_string(SliceEdgeKind k) {
    switch (k) {
    case SliceEdgeKind::Seed: return "seed";
    case SliceEdgeKind::DataForward: return "data";
    case SliceEdgeKind::DefOfSeed: return "def";
    case SliceEdgeKind::ControlParent: return "control";
    case SliceEdgeKind::ParamFlow: return "param-flow";
    case SliceEdgeKind::ParamBind: return "param-bind";
    case SliceEdgeKind::PointerArg: return "pointer-arg";
    case SliceEdgeKind::AfterReturn: return "after-return";
    }
    return "?";
}

AnalysisGraphs::AnalysisGraphs(const SourceTree& tree)
    : tree_(tree), callgraph_(build_call_graph(tree)) {}

const Pdg& AnalysisGraphs::pdg(const std::string& function) const {
    auto it = pdgs_.find(function);
    if (it != pdgs_.end())
        return *it->second;
    auto p = std::make_unique<Pdg>();
    if (const FunctionDef* f = tree_.function(function))
        *p = build_pdg(*f);
    else
        p->function = function;
    auto [ins, _] = pdgs_.emplace(function, std::move(p));
    return *ins->second;
}

bool ProgramSlice::contains(StatementId id) const {
    return entry(id) != nullptr;
}

const SliceEntry* ProgramSlice::entry(StatementId id) const {
    for (const auto& e : statements)
        if (e.stmt == id)
            return &e;
    return nullptr;
}

int ProgramSlice::max_layer() const {
    int m = 0;
    for (const auto& e : statements)
        m = std::max(m, e.layer);
    return m;
}

namespace {

std::string chain_key(const std::vector<std::string>& chain) {
    std::string k;
    for (const auto& c : chain) {
        k += c;
        k += '|';
    }
    return k;
}

bool on_chain(const std::vector<std::string>& chain, const std::string& fn) {
    return std::find(chain.begin(), chain.end(), fn) != chain.end();
}

/// The statement the slice is anchored at in the chosen tree.
const Statement* resolve_anchor(const SourceTree& tree, const PatchStatement& ps,
                                bool patched_tree) {
    const FunctionDef* fn = tree.function(ps.function);
    if (!fn)
        return nullptr;
    int line = 0;
    if (patched_tree)
        line = ps.line_patched ? *ps.line_patched : ps.anchor_line_patched;
    else
        line = ps.line_vuln ? *ps.line_vuln : ps.anchor_line_vuln;
    if (const Statement* s = fn->first_stmt_at_line(line))
        return s;
    // fall back to the first statement at or after the anchor position
    const Statement* best = nullptr;
    for (const auto& s : fn->body) {
        if (s.line >= line && (!best || s.line < best->line))
            best = &s;
    }
    if (!best && !fn->body.empty())
        best = &fn->body.back();
    return best;
}

struct WorkItem {
    StatementId stmt;
    std::vector<std::string> chain;
    bool at_or_after;
    SliceProvenance prov;
};

class SliceEngine {
public:
    SliceEngine(const CriticalVariable& cv, const SourceTree& tree, const AnalysisGraphs& graphs,
                const SliceConfig& cfg, const std::string& root_fn, const Statement& anchor)
        : cv_(cv), tree_(tree), graphs_(graphs), cfg_(cfg), root_fn_(root_fn), anchor_(anchor) {}

    ProgramSlice run() {
        ProgramSlice out;
        out.seed = cv_;
        out.anchor = anchor_.id;

        seed();
        if (cfg_.improve_after_return)
            enqueue_after_return();
        drain();

        // function order: root first, then discovery order
        out.functions.push_back(root_fn_);
        for (const auto& fn : discovered_)
            if (fn != root_fn_)
                out.functions.push_back(fn);
        std::map<std::string, int> order;
        for (size_t i = 0; i < out.functions.size(); ++i)
            order[out.functions[i]] = static_cast<int>(i);

        for (auto& [id, e] : entries_)
            out.statements.push_back(e);
        std::sort(out.statements.begin(), out.statements.end(),
                  [&](const SliceEntry& a, const SliceEntry& b) {
                      int oa = order.count(a.function) ? order[a.function] : 1 << 20;
                      int ob = order.count(b.function) ? order[b.function] : 1 << 20;
                      if (oa != ob)
                          return oa < ob;
                      const Statement* sa = tree_.stmt(a.stmt);
                      const Statement* sb = tree_.stmt(b.stmt);
                      int la = sa ? sa->line : 0;
                      int lb = sb ? sb->line : 0;
                      if (la != lb)
                          return la < lb;
                      return a.stmt < b.stmt;
                  });
        out.provenance = provenance_;
        return out;
    }

private:
    const CriticalVariable& cv_;
    const SourceTree& tree_;
    const AnalysisGraphs& graphs_;
    const SliceConfig& cfg_;
    std::string root_fn_;
    const Statement& anchor_;

    std::deque<WorkItem> work_;
    std::set<std::pair<StatementId, std::string>> visited_;
    std::map<StatementId, SliceEntry> entries_;
    std::map<StatementId, SliceProvenance> provenance_;
    std::vector<std::string> discovered_;

    bool line_at_or_after(const Statement& s) const { return s.line >= anchor_.line; }

    void note_function(const std::string& fn) {
        if (std::find(discovered_.begin(), discovered_.end(), fn) == discovered_.end())
            discovered_.push_back(fn);
    }

    void add(StatementId id, const std::vector<std::string>& chain, bool aoa,
             SliceProvenance prov) {
        const Statement* s = tree_.stmt(id);
        if (!s || s->function.empty())
            return;
        if (static_cast<int>(chain.size()) > cfg_.theta)
            return;
        note_function(s->function);
        bool eff_aoa = s->function == root_fn_ && chain.size() == 1 ? line_at_or_after(*s) : aoa;
        auto it = entries_.find(id);
        if (it == entries_.end()) {
            entries_[id] = SliceEntry{s->function, id, static_cast<int>(chain.size()), eff_aoa};
            provenance_[id] = prov;
        } else {
            it->second.layer = std::min(it->second.layer, static_cast<int>(chain.size()));
            it->second.at_or_after_patch = it->second.at_or_after_patch || eff_aoa;
        }
        auto key = std::make_pair(id, chain_key(chain));
        if (visited_.insert(key).second)
            work_.push_back(WorkItem{id, chain, eff_aoa, prov});
    }

    void seed() {
        std::vector<std::string> chain{root_fn_};
        add(anchor_.id, chain, true, SliceProvenance{kNoStatement, SliceEdgeKind::Seed, cv_.var.key()});

        const Pdg& pdg = graphs_.pdg(root_fn_);
        // backward to the definitions of the criterion variable
        auto rit = pdg.reaching.find(anchor_.id);
        bool found_def = false;
        if (rit != pdg.reaching.end()) {
            for (const auto& fact : rit->second) {
                if (!fact.var.overlaps(cv_.var))
                    continue;
                if (fact.from >= 0) {
                    add(fact.from, chain, false,
                        SliceProvenance{anchor_.id, SliceEdgeKind::DefOfSeed, cv_.var.key()});
                    found_def = true;
                }
            }
        }
        // parameter (or unresolved outer) criterion: pick up the flow from the
        // function entry
        const FunctionDef* fn = tree_.function(root_fn_);
        if (fn && !found_def) {
            for (const auto& s : fn->body) {
                bool uses_cv = false;
                for (const auto& u : s.uses)
                    if (u.overlaps(cv_.var))
                        uses_cv = true;
                for (const auto& d : s.defs)
                    if (d.overlaps(cv_.var))
                        uses_cv = true;
                if (uses_cv)
                    add(s.id, chain, false,
                        SliceProvenance{anchor_.id, SliceEdgeKind::ParamFlow, cv_.var.key()});
            }
        }
    }

    void enqueue_after_return() {
        const CallGraph& cg = graphs_.callgraph();
        struct UpItem {
            std::string fn;
            std::vector<std::string> chain;
            StatementId resumed_from;  // call site one level below, anchor at the root
        };
        std::deque<UpItem> up;
        up.push_back({root_fn_, {root_fn_}, anchor_.id});
        std::set<std::pair<std::string, std::string>> seen_up;
        while (!up.empty()) {
            UpItem item = up.front();
            up.pop_front();
            if (!seen_up.insert({item.fn, chain_key(item.chain)}).second)
                continue;
            for (const CallSite* e : cg.callers_of(item.fn)) {
                if (on_chain(item.chain, e->caller))
                    continue;
                auto next = item.chain;
                next.push_back(e->caller);
                if (static_cast<int>(next.size()) > cfg_.theta)
                    continue;
                // chain the provenance through the intermediate call sites so
                // the reported layers count every function on the way up
                add(e->call_site, next, true,
                    SliceProvenance{item.resumed_from, SliceEdgeKind::AfterReturn, ""});
                up.push_back({e->caller, next, e->call_site});
            }
        }
    }

    void drain() {
        while (!work_.empty()) {
            WorkItem item = work_.front();
            work_.pop_front();
            const Statement* s = tree_.stmt(item.stmt);
            if (!s)
                continue;
            const Pdg& pdg = graphs_.pdg(s->function);

            for (const auto& e : pdg.data_edges)
                if (e.from == item.stmt)
                    add(e.to, item.chain, item.at_or_after,
                        SliceProvenance{item.stmt, SliceEdgeKind::DataForward, e.var.key()});

            if (cfg_.improve_pointer) {
                for (const auto& e : pdg.pointer_edges)
                    if (e.from == item.stmt)
                        add(e.to, item.chain, item.at_or_after,
                            SliceProvenance{item.stmt, SliceEdgeKind::PointerArg, e.var.key()});
                // backward to the definition of every pointer argument
                std::set<std::string> ptr_vars;
                const FunctionDef* fn = tree_.function(s->function);
                for (const auto& ci : s->calls)
                    for (const auto& arg : ci.args)
                        for (const auto& v : arg.vars)
                            if (v.member_path.empty() &&
                                (arg.address_of || v.is_pointer ||
                                 (fn && fn->is_pointer_var(v.base))))
                                ptr_vars.insert(v.base);
                auto rit = pdg.reaching.find(item.stmt);
                if (rit != pdg.reaching.end() && !ptr_vars.empty())
                    for (const auto& fact : rit->second)
                        if (fact.from >= 0 && fact.var.member_path.empty() &&
                            ptr_vars.count(fact.var.base))
                            add(fact.from, item.chain, false,
                                SliceProvenance{item.stmt, SliceEdgeKind::DefOfSeed,
                                                fact.var.key()});
            }

            if (s->parent != kNoStatement)
                add(s->parent, item.chain, item.at_or_after,
                    SliceProvenance{item.stmt, SliceEdgeKind::ControlParent, ""});

            descend(*s, item);
        }
    }

    void descend(const Statement& s, const WorkItem& item) {
        for (const auto& ci : s.calls) {
            if (ci.callee_ref)
                continue;  // function-pointer call, target unknown
            const FunctionDef* g = tree_.function(ci.callee);
            if (!g || on_chain(item.chain, ci.callee))
                continue;
            auto next = item.chain;
            next.push_back(ci.callee);
            if (static_cast<int>(next.size()) > cfg_.theta)
                continue;
            const Pdg& gpdg = graphs_.pdg(ci.callee);
            size_t nparams = std::min(ci.args.size(), g->params.size());
            for (size_t j = 0; j < nparams; ++j) {
                if (ci.args[j].vars.empty())
                    continue;  // constant argument carries no dependence
                VarRef pref{g->params[j].name, {}, g->params[j].is_pointer, g->params[j].is_array};
                for (const auto& gs : g->body) {
                    auto rit = gpdg.reaching.find(gs.id);
                    if (rit == gpdg.reaching.end())
                        continue;
                    bool from_entry = false;
                    for (const auto& fact : rit->second)
                        if (fact.from < 0 && fact.var.base == pref.base)
                            from_entry = true;
                    if (!from_entry)
                        continue;
                    bool touches = false;
                    for (const auto& u : gs.uses)
                        if (u.overlaps(pref))
                            touches = true;
                    if (touches)
                        add(gs.id, next, item.at_or_after,
                            SliceProvenance{s.id, SliceEdgeKind::ParamBind, pref.key()});
                }
            }
        }
    }
};

/// Text-based projection of a patched-tree slice onto the vulnerable tree.
class Projector {
public:
    Projector(const SourceTree& patched, const SourceTree& vuln)
        : patched_(patched), vuln_(vuln) {}

    std::optional<StatementId> map_stmt(StatementId patched_id) {
        auto it = cache_.find(patched_id);
        if (it != cache_.end())
            return it->second;
        std::optional<StatementId> result = compute(patched_id);
        cache_[patched_id] = result;
        return result;
    }

private:
    const SourceTree& patched_;
    const SourceTree& vuln_;
    std::map<StatementId, std::optional<StatementId>> cache_;

    std::optional<StatementId> compute(StatementId patched_id) {
        const Statement* s = patched_.stmt(patched_id);
        if (!s || s->function.empty())
            return std::nullopt;
        const FunctionDef* pfn = patched_.function(s->function);
        const FunctionDef* vfn = vuln_.function(s->function);
        if (!pfn || !vfn)
            return std::nullopt;
        std::vector<const Statement*> candidates;
        for (const auto& c : vfn->body)
            if (c.text == s->text)
                candidates.push_back(&c);
        if (candidates.empty())
            return std::nullopt;
        if (candidates.size() == 1)
            return candidates.front()->id;
        // disambiguate duplicates by the nearest context lines
        std::string prev_text, next_text;
        for (size_t i = 0; i < pfn->body.size(); ++i) {
            if (pfn->body[i].id == patched_id) {
                if (i > 0)
                    prev_text = pfn->body[i - 1].text;
                if (i + 1 < pfn->body.size())
                    next_text = pfn->body[i + 1].text;
                break;
            }
        }
        const Statement* best = nullptr;
        int best_score = -1;
        int best_dist = 1 << 30;
        for (const Statement* c : candidates) {
            int score = 0;
            for (size_t i = 0; i < vfn->body.size(); ++i) {
                if (vfn->body[i].id != c->id)
                    continue;
                if (i > 0 && vfn->body[i - 1].text == prev_text)
                    ++score;
                if (i + 1 < vfn->body.size() && vfn->body[i + 1].text == next_text)
                    ++score;
                break;
            }
            int dist = std::abs(c->line - s->line);
            if (score > best_score || (score == best_score && dist < best_dist)) {
                best = c;
                best_score = score;
                best_dist = dist;
            }
        }
        return best ? std::optional<StatementId>(best->id) : std::nullopt;
    }
};

}  // namespace

ProgramSlice slice_for_variable(const CriticalVariable& cv, const PatchStatement& ps,
                                const SourceTree& vuln, const SourceTree& patched,
                                const AnalysisGraphs& vuln_graphs,
                                const AnalysisGraphs& patched_graphs, bool add_only,
                                const SliceConfig& cfg) {
    const SourceTree& tree = add_only ? patched : vuln;
    const AnalysisGraphs& graphs = add_only ? patched_graphs : vuln_graphs;
    const Statement* anchor = resolve_anchor(tree, ps, add_only);
    if (!anchor)
        throw SeedNotFoundError("cannot anchor slice for " + cv.var.key() + " in function " +
                                ps.function);

    SliceEngine engine(cv, tree, graphs, cfg, ps.function, *anchor);
    ProgramSlice slice = engine.run();

    bool references_cv = false;
    for (const auto& e : slice.statements) {
        const Statement* s = tree.stmt(e.stmt);
        if (!s)
            continue;
        for (const auto& u : s->uses)
            if (u.overlaps(cv.var))
                references_cv = true;
        for (const auto& d : s->defs)
            if (d.overlaps(cv.var))
                references_cv = true;
    }
    if (!references_cv)
        throw SeedNotFoundError("critical variable " + cv.var.key() +
                                " is referenced nowhere reachable");

    if (!add_only)
        return slice;

    // Keep only statements that also exist in the vulnerable program.
    Projector proj(patched, vuln);
    ProgramSlice projected;
    projected.seed = slice.seed;
    projected.projected = true;
    projected.anchor = kNoStatement;
    projected.functions = slice.functions;
    std::map<StatementId, StatementId> remap;
    for (const auto& e : slice.statements) {
        auto mapped = proj.map_stmt(e.stmt);
        if (!mapped)
            continue;
        if (remap.count(e.stmt))
            continue;
        remap[e.stmt] = *mapped;
        bool dup = false;
        for (const auto& pe : projected.statements)
            if (pe.stmt == *mapped)
                dup = true;
        if (dup)
            continue;
        SliceEntry ne = e;
        ne.stmt = *mapped;
        projected.statements.push_back(ne);
    }
    // re-parent provenance through dropped statements
    for (const auto& e : slice.statements) {
        auto self = remap.find(e.stmt);
        if (self == remap.end())
            continue;
        SliceProvenance p = slice.provenance.at(e.stmt);
        StatementId from = p.from;
        while (from != kNoStatement && !remap.count(from)) {
            auto up = slice.provenance.find(from);
            if (up == slice.provenance.end())
                break;
            from = up->second.from;
        }
        p.from = from == kNoStatement ? kNoStatement
                                      : (remap.count(from) ? remap[from] : kNoStatement);
        projected.provenance[self->second] = p;
    }
    return projected;
}

std::set<StatementId> slice_control_statement(const CriticalVariable& cv, const Statement& ctrl,
                                              const Pdg& pdg) {
    std::set<StatementId> out{ctrl.id};
    std::deque<StatementId> fwd;
    auto rit = pdg.reaching.find(ctrl.id);
    if (rit != pdg.reaching.end()) {
        for (const auto& fact : rit->second) {
            if (fact.from >= 0 && fact.var.overlaps(cv.var)) {
                out.insert(fact.from);
                fwd.push_back(fact.from);
            }
        }
    }
    // forward data-dependency closure from the definitions (and the control
    // statement itself defines nothing, so unrelated in-between statements
    // never enter)
    std::set<StatementId> seen(fwd.begin(), fwd.end());
    while (!fwd.empty()) {
        StatementId cur = fwd.front();
        fwd.pop_front();
        for (const auto& e : pdg.data_edges) {
            if (e.from != cur)
                continue;
            out.insert(e.to);
            if (seen.insert(e.to).second)
                fwd.push_back(e.to);
        }
    }
    return out;
}

std::set<StatementId> slice_through_pointer_arg(const CriticalVariable& cv, const Statement& call,
                                                const Pdg& pdg) {
    std::set<StatementId> out{call.id};
    bool pointer_arg = false;
    for (const auto& ci : call.calls)
        for (const auto& arg : ci.args)
            for (const auto& v : arg.vars)
                if (v.base == cv.var.base && (arg.address_of || v.is_pointer || cv.var.is_pointer))
                    pointer_arg = true;
    if (!pointer_arg)
        return out;  // value argument: no augmentation

    auto rit = pdg.reaching.find(call.id);
    std::deque<StatementId> fwd;
    if (rit != pdg.reaching.end())
        for (const auto& fact : rit->second)
            if (fact.from >= 0 && fact.var.member_path.empty() && fact.var.base == cv.var.base) {
                out.insert(fact.from);
            }
    for (const auto& e : pdg.pointer_edges)
        if (e.from == call.id && e.var.base == cv.var.base) {
            out.insert(e.to);
            fwd.push_back(e.to);
        }
    std::set<StatementId> seen(fwd.begin(), fwd.end());
    while (!fwd.empty()) {
        StatementId cur = fwd.front();
        fwd.pop_front();
        for (const auto& e : pdg.data_edges) {
            if (e.from != cur)
                continue;
            out.insert(e.to);
            if (seen.insert(e.to).second)
                fwd.push_back(e.to);
        }
    }
    return out;
}

std::vector<AfterReturnLayer> slice_after_return(const FunctionDef& f, const AnalysisGraphs& graphs,
                                                 const SliceConfig& cfg) {
    std::vector<AfterReturnLayer> out;
    const CallGraph& cg = graphs.callgraph();
    std::deque<std::pair<std::string, std::vector<std::string>>> up;
    up.emplace_back(f.name, std::vector<std::string>{f.name});
    std::set<std::pair<std::string, std::string>> seen;
    while (!up.empty()) {
        auto [g, chain] = up.front();
        up.pop_front();
        if (!seen.insert({g, chain_key(chain)}).second)
            continue;
        for (const CallSite* e : cg.callers_of(g)) {
            if (on_chain(chain, e->caller))
                continue;
            auto next = chain;
            next.push_back(e->caller);
            if (static_cast<int>(next.size()) > cfg.theta)
                continue;
            AfterReturnLayer layer;
            layer.layer = static_cast<int>(next.size());
            layer.function = e->caller;
            layer.call_site = e->call_site;
            // forward closure inside the caller from the call site
            const Pdg& pdg = graphs.pdg(e->caller);
            std::set<StatementId> acc{e->call_site};
            std::deque<StatementId> q{e->call_site};
            while (!q.empty()) {
                StatementId cur = q.front();
                q.pop_front();
                for (const auto& de : pdg.data_edges)
                    if (de.from == cur && acc.insert(de.to).second)
                        q.push_back(de.to);
                if (cfg.improve_pointer)
                    for (const auto& pe : pdg.pointer_edges)
                        if (pe.from == cur && acc.insert(pe.to).second)
                            q.push_back(pe.to);
            }
            layer.statements.assign(acc.begin(), acc.end());
            out.push_back(std::move(layer));
            up.emplace_back(e->caller, next);
        }
    }
    std::sort(out.begin(), out.end(), [](const AfterReturnLayer& a, const AfterReturnLayer& b) {
        if (a.layer != b.layer)
            return a.layer < b.layer;
        return a.function < b.function;
    });
    return out;
}

std::string dump_slice(const ProgramSlice& slice, const SourceTree& tree) {
    std::ostringstream os;
    for (const auto& e : slice.statements) {
        const Statement* s = tree.stmt(e.stmt);
        os << "layer" << e.layer << " " << e.function << ":" << (s ? s->line : 0) << " "
           << (s ? s->text : "?") << "\n";
    }
    return os.str();
}

}  // namespace patchtrace

// SPDX-License-Identifier: Apache-2.0
#include "patchtrace/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace patchtrace {

AnalysisConfig AnalysisConfig::from_env() {
    AnalysisConfig cfg;
    if (const char* env = std::getenv("PATCHTRACE_THETA")) {
        try {
            int t = std::stoi(env);
            if (t >= 1)
                cfg.theta = t;
        } catch (const std::exception&) {
            // ignore malformed overrides
        }
    }
    return cfg;
}

CaseManifest CaseManifest::load(const std::string& case_dir) {
    fs::path dir(case_dir);
    fs::path mf = dir / "manifest.json";
    std::ifstream is(mf);
    if (!is)
        throw ManifestError("cannot read " + mf.string());
    Json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ManifestError("malformed manifest " + mf.string() + ": " + e.what());
    }
    CaseManifest m;
    m.id = j.value("id", dir.filename().string());
    std::string cwe = j.value("cwe", "");
    if (cwe.rfind("CWE-", 0) == 0)
        cwe = cwe.substr(4);
    try {
        m.cwe = std::stoi(cwe);
    } catch (const std::exception&) {
        throw ManifestError("manifest " + mf.string() + " has no usable cwe field");
    }
    if (!cwe_supported(m.cwe))
        throw ManifestError("unsupported CWE-" + std::to_string(m.cwe) + " in " + mf.string());
    m.diff_path = (dir / j.value("diff", "patch.diff")).string();
    m.vuln_root = (dir / j.value("vuln", "vuln")).string();
    m.patched_root = (dir / j.value("patched", "patched")).string();
    for (const auto& p : {m.diff_path, m.vuln_root, m.patched_root})
        if (!fs::exists(p))
            throw ManifestError("manifest path does not exist: " + p);
    if (j.contains("ground_truth")) {
        const Json& g = j["ground_truth"];
        GroundTruth gt;
        for (const auto& t : g.value("trigger_lines", Json::array()))
            gt.trigger_lines.emplace_back(t.at(0).get<std::string>(), t.at(1).get<int>());
        gt.is_inter = g.value("is_inter", false);
        if (g.contains("inter_type"))
            gt.inter_type = g["inter_type"].get<std::string>();
        if (g.contains("layers"))
            gt.layers = g["layers"].get<int>();
        m.ground_truth = std::move(gt);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

Json patch_statement_json(const PatchStatement& ps) {
    Json j;
    j["file"] = ps.file;
    j["function"] = ps.function;
    j["action"] = to_string(ps.action);
    j["p_type"] = ps.p_type;
    j["line_vuln"] = ps.line_vuln ? Json(*ps.line_vuln) : Json(nullptr);
    j["line_patched"] = ps.line_patched ? Json(*ps.line_patched) : Json(nullptr);
    j["text"] = ps.action == PatchAction::Delete ? ps.text_old : ps.text_new;
    if (ps.action == PatchAction::Modify)
        j["text_old"] = ps.text_old;
    return j;
}

Json cv_json(const CriticalVariable& cv) {
    Json j;
    j["name"] = cv.var.base;
    j["level"] = cv.level;
    j["origin"] = cv.origin;
    j["scope"] = cv.scope;
    return j;
}

Json slice_json(const ProgramSlice& s) {
    Json j;
    j["seed"] = s.seed.var.base;
    j["seed_scope"] = s.seed.scope;
    j["statement_count"] = s.statements.size();
    j["max_layer"] = s.max_layer();
    j["functions"] = s.functions;
    j["projected"] = s.projected;
    return j;
}

Json finding_json(const TriggerFinding& f) {
    Json j;
    j["file"] = f.file;
    j["function"] = f.function;
    j["line"] = f.line;
    j["t_types"] = f.t_types;
    j["phase"] = f.search_phase;
    j["matched_cv"] = f.matched_cv ? Json(f.matched_cv->var.base) : Json(nullptr);
    if (f.matched_cv)
        j["matched_cv_level"] = f.matched_cv->level;
    return j;
}

Json classification_json(const Classification& c) {
    Json j;
    j["kind"] = c.kind;
    j["inter_type"] = c.inter_type ? Json(*c.inter_type) : Json(nullptr);
    j["layers"] = c.layers ? Json(*c.layers) : Json(nullptr);
    j["chain"] = c.chain;
    Json insts = Json::array();
    for (const auto& i : c.instances) {
        Json ij;
        ij["patch_function"] = i.patch_function;
        ij["trigger_function"] = i.trigger_function;
        ij["trigger_line"] = i.trigger_line;
        ij["kind"] = i.inter ? "inter" : "intra";
        ij["inter_type"] = i.inter_type ? Json(*i.inter_type) : Json(nullptr);
        ij["layers"] = i.layers ? Json(*i.layers) : Json(nullptr);
        ij["chain"] = i.chain;
        insts.push_back(std::move(ij));
    }
    j["instances"] = std::move(insts);
    return j;
}

Json metrics_json(const Metrics& m) {
    Json j;
    j["fpr"] = m.fpr;
    j["fnr"] = m.fnr;
    j["accuracy"] = m.accuracy;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["undefined"] = m.undefined;
    return j;
}

Json confusion_json(const Confusion& c) {
    Json j;
    j["tp"] = c.tp;
    j["fp"] = c.fp;
    j["fn"] = c.fn;
    j["tn"] = c.tn;
    return j;
}

}  // namespace

Json CaseReport::to_json() const {
    Json j;
    j["schema_version"] = 1;
    j["case"] = id;
    j["cwe"] = "CWE-" + std::to_string(cwe);
    Json pss = Json::array();
    for (const auto& ps : patch_statements)
        pss.push_back(patch_statement_json(ps));
    j["patch_statements"] = std::move(pss);
    Json cvs = Json::array();
    for (const auto& cv : critical_variables)
        cvs.push_back(cv_json(cv));
    j["critical_variables"] = std::move(cvs);
    Json sl = Json::array();
    for (const auto& s : slices)
        sl.push_back(slice_json(s));
    j["slices"] = std::move(sl);
    Json tr = Json::array();
    for (const auto& f : triggers.findings)
        tr.push_back(finding_json(f));
    j["triggers"] = std::move(tr);
    j["classification"] = classification ? classification_json(*classification) : Json(nullptr);
    j["baseline"] = baseline;
    Json diag;
    diag["opaque_statements"] = Json{{"vuln", opaque_vuln}, {"patched", opaque_patched}};
    diag["dependency_files"] = dependency_files;
    diag["errors"] = diagnostics;
    j["diagnostics"] = std::move(diag);
    return j;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

struct LoadedCase {
    SourceTree vuln;
    SourceTree patched;
    DiffFile diff;
    std::vector<PatchStatement> patch_statements;
};

LoadedCase load_case(const CaseManifest& m) {
    LoadedCase lc;
    lc.vuln = parse_source_tree(m.vuln_root, VersionTag::Vulnerable);
    lc.patched = parse_source_tree(m.patched_root, VersionTag::Patched);
    lc.diff = parse_diff(m.diff_path);
    lc.patch_statements = preprocess_diff(lc.diff, lc.vuln, lc.patched);
    return lc;
}

bool same_file(const std::string& a, const std::string& b) {
    if (a == b)
        return true;
    auto base = [](const std::string& p) {
        auto pos = p.find_last_of('/');
        return pos == std::string::npos ? p : p.substr(pos + 1);
    };
    return base(a) == base(b);
}

}  // namespace

CaseReport run_analyze(const CaseManifest& manifest, const AnalysisConfig& config) {
    CaseReport report;
    report.id = manifest.id;
    report.cwe = manifest.cwe;

    LoadedCase lc = load_case(manifest);
    report.patch_statements = lc.patch_statements;
    report.opaque_vuln = lc.vuln.opaque_count();
    report.opaque_patched = lc.patched.opaque_count();

    bool any_in_function = false;
    for (const auto& ps : lc.patch_statements)
        if (!ps.function.empty())
            any_in_function = true;
    if (!any_in_function) {
        report.diagnostics.push_back("NoPatchInFunction");
        return report;
    }
    report.baseline = patch_function_baseline(lc.patch_statements);

    // Step I: critical variables, deduplicated by (scope, name)
    std::set<std::pair<std::string, std::string>> seen_cv;
    for (const auto& ps : lc.patch_statements) {
        if (ps.function.empty())
            continue;
        auto cvs = identify_critical_variables_or_empty(ps, manifest.cwe);
        if (cvs.empty() && !cwe_is_first_class(manifest.cwe))
            report.diagnostics.push_back("NoCriticalVariables:" + ps.p_type + "@" + ps.file + ":" +
                                         std::to_string(ps.line_vuln.value_or(
                                             ps.line_patched.value_or(0))));
        for (auto& cv : cvs)
            if (seen_cv.insert({cv.scope, cv.var.base}).second)
                report.critical_variables.push_back(std::move(cv));
    }

    AnalysisGraphs vuln_graphs(lc.vuln);
    AnalysisGraphs patched_graphs(lc.patched);

    bool add_only = !lc.patch_statements.empty();
    for (const auto& ps : lc.patch_statements)
        if (ps.action != PatchAction::Add)
            add_only = false;

    // Step II: one slice per critical variable, seeded at its patch statement
    SliceConfig scfg;
    scfg.theta = config.theta;
    for (const auto& cv : report.critical_variables) {
        const PatchStatement* origin = nullptr;
        for (const auto& ps : lc.patch_statements) {
            if (ps.function != cv.scope)
                continue;
            std::string ref = ps.p_type + "@" + ps.file + ":" +
                              std::to_string(ps.line_vuln ? *ps.line_vuln
                                                          : ps.line_patched.value_or(0));
            if (ref == cv.origin) {
                origin = &ps;
                break;
            }
        }
        if (!origin)
            for (const auto& ps : lc.patch_statements)
                if (ps.function == cv.scope) {
                    origin = &ps;
                    break;
                }
        if (!origin)
            continue;
        try {
            report.slices.push_back(slice_for_variable(cv, *origin, lc.vuln, lc.patched,
                                                       vuln_graphs, patched_graphs, add_only,
                                                       scfg));
        } catch (const SeedNotFoundError& e) {
            report.diagnostics.push_back(std::string("SeedNotFound:") + e.what());
        }
    }

    // Step III
    TriggerContext tctx;
    tctx.vuln = &lc.vuln;
    tctx.graphs = &vuln_graphs;
    tctx.keywords = config.keywords;
    tctx.cwe = manifest.cwe;
    tctx.patch_statements = &lc.patch_statements;
    tctx.max_transform_level = config.max_transform_level;
    try {
        report.triggers = identify_triggers(tctx, report.slices, report.critical_variables);
    } catch (const UnsupportedCweError& e) {
        report.diagnostics.push_back(std::string("UnsupportedCwe:") + e.what());
    }
    if (report.triggers.findings.empty())
        report.diagnostics.push_back("NoTriggerFound");

    if (!report.triggers.findings.empty()) {
        try {
            report.classification = classify_vulnerability(
                lc.patch_statements, report.triggers.findings, report.slices, lc.vuln);
        } catch (const NoEvidenceError& e) {
            report.diagnostics.push_back(std::string("NoEvidence:") + e.what());
        }
    }

    for (const auto& ps : lc.patch_statements) {
        if (ps.function.empty())
            continue;
        if (const FunctionDef* fn = lc.vuln.function(ps.function)) {
            DependencyFiles df = collect_dependency_files(lc.vuln, *fn);
            for (const auto& f : df.closure)
                if (std::find(report.dependency_files.begin(), report.dependency_files.end(), f) ==
                    report.dependency_files.end())
                    report.dependency_files.push_back(f);
        }
    }
    std::sort(report.dependency_files.begin(), report.dependency_files.end());
    return report;
}

std::string run_slice_debug(const CaseManifest& manifest, const AnalysisConfig& config,
                            const std::string& var_name) {
    CaseReport report = run_analyze(manifest, config);
    LoadedCase lc = load_case(manifest);
    std::ostringstream os;
    for (const auto& s : report.slices)
        if (s.seed.var.base == var_name)
            os << dump_slice(s, lc.vuln);
    return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<std::string> list_corpus_cases(const std::string& corpus_dir) {
    std::vector<std::string> out;
    if (!fs::exists(corpus_dir))
        throw ManifestError("corpus directory does not exist: " + corpus_dir);
    for (const auto& entry : fs::directory_iterator(corpus_dir))
        if (entry.is_directory() && fs::exists(entry.path() / "manifest.json"))
            out.push_back(entry.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

EvaluationReport run_evaluate(const std::string& corpus_dir, const AnalysisConfig& config,
                              bool with_baseline) {
    auto case_dirs = list_corpus_cases(corpus_dir);
    if (case_dirs.empty())
        throw ManifestError("no cases under " + corpus_dir);

    std::vector<CaseManifest> manifests;
    std::vector<std::string> missing;
    for (const auto& dir : case_dirs) {
        manifests.push_back(CaseManifest::load(dir));
        if (!manifests.back().ground_truth)
            missing.push_back(manifests.back().id);
    }
    if (!missing.empty()) {
        std::string msg = "cases without ground truth:";
        for (const auto& id : missing)
            msg += " " + id;
        throw MissingGroundTruthError(msg);
    }

    EvaluationReport ev;
    ev.with_baseline = with_baseline;
    ev.rows.resize(manifests.size());

    // bounded worker pool; rows land at their case's index, keeping the
    // output order independent of scheduling
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= manifests.size())
                return;
            const CaseManifest& m = manifests[i];
            EvaluationRow row;
            row.id = m.id;
            row.cwe = m.cwe;
            row.truth_inter = m.ground_truth->is_inter;
            try {
                CaseReport rep = run_analyze(m, config);
                row.predicted =
                    rep.classification ? rep.classification->kind : std::string("intra");
                row.baseline = rep.baseline.empty() ? "intra" : rep.baseline;
                for (const auto& f : rep.triggers.findings)
                    for (const auto& [file, line] : m.ground_truth->trigger_lines)
                        if (f.line == line && same_file(f.file, file))
                            row.trigger_correct = true;
                std::set<std::string> truth_files;
                for (const auto& [file, line] : m.ground_truth->trigger_lines)
                    truth_files.insert(file);
                for (const auto& f : rep.triggers.findings)
                    for (const auto& tf : truth_files)
                        if (same_file(f.file, tf)) {
                            ++row.identified_in_trigger_files;
                            break;
                        }
            } catch (const std::exception& e) {
                row.error = e.what();
                row.predicted = "intra";
                row.baseline = "intra";
            }
            ev.rows[i] = std::move(row);
        }
    };
    int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(manifests.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    long correct = 0;
    long identified_total = 0;
    for (const auto& row : ev.rows) {
        correct += row.trigger_correct;
        identified_total += row.identified_in_trigger_files;
        bool truth = row.truth_inter;
        bool pred = row.predicted == "inter";
        bool base = row.baseline == "inter";
        ev.classifier_confusion.tp += truth && pred;
        ev.classifier_confusion.fn += truth && !pred;
        ev.classifier_confusion.fp += !truth && pred;
        ev.classifier_confusion.tn += !truth && !pred;
        ev.baseline_confusion.tp += truth && base;
        ev.baseline_confusion.fn += truth && !base;
        ev.baseline_confusion.fp += !truth && base;
        ev.baseline_confusion.tn += !truth && !base;
    }
    ev.trigger_accuracy = static_cast<double>(correct) / static_cast<double>(ev.rows.size());
    ev.avg_identified_triggers =
        static_cast<double>(identified_total) / static_cast<double>(ev.rows.size());
    ev.classifier_metrics = compute_metrics(ev.classifier_confusion);
    ev.baseline_metrics = compute_metrics(ev.baseline_confusion);
    return ev;
}

Json EvaluationReport::to_json() const {
    Json j;
    j["schema_version"] = 1;
    j["cases"] = rows.size();
    j["trigger_accuracy"] = trigger_accuracy;
    j["avg_identified_triggers"] = avg_identified_triggers;
    j["classifier"] = Json{{"confusion", confusion_json(classifier_confusion)},
                           {"metrics", metrics_json(classifier_metrics)}};
    if (with_baseline)
        j["baseline"] = Json{{"confusion", confusion_json(baseline_confusion)},
                             {"metrics", metrics_json(baseline_metrics)}};
    Json table = Json::array();
    for (const auto& row : rows) {
        Json r;
        r["id"] = row.id;
        r["cwe"] = "CWE-" + std::to_string(row.cwe);
        r["trigger_correct"] = row.trigger_correct;
        r["identified_in_trigger_files"] = row.identified_in_trigger_files;
        r["predicted"] = row.predicted;
        if (with_baseline)
            r["baseline"] = row.baseline;
        r["truth_inter"] = row.truth_inter;
        if (!row.error.empty())
            r["error"] = row.error;
        table.push_back(std::move(r));
    }
    j["per_case"] = std::move(table);
    return j;
}

std::string EvaluationReport::to_text() const {
    std::ostringstream os;
    os << "cases: " << rows.size() << "\n";
    os << "trigger_accuracy: " << trigger_accuracy << "\n";
    os << "avg_identified_triggers: " << avg_identified_triggers << "\n";
    os << "classifier: fpr=" << classifier_metrics.fpr << " fnr=" << classifier_metrics.fnr
       << " accuracy=" << classifier_metrics.accuracy
       << " precision=" << classifier_metrics.precision << " f1=" << classifier_metrics.f1 << "\n";
    if (with_baseline)
        os << "baseline:   fpr=" << baseline_metrics.fpr << " fnr=" << baseline_metrics.fnr
           << " accuracy=" << baseline_metrics.accuracy
           << " precision=" << baseline_metrics.precision << " f1=" << baseline_metrics.f1 << "\n";
    for (const auto& row : rows) {
        os << row.id << " cwe=" << row.cwe << " trigger=" << (row.trigger_correct ? "ok" : "MISS")
           << " predicted=" << row.predicted;
        if (with_baseline)
            os << " baseline=" << row.baseline;
        os << " truth=" << (row.truth_inter ? "inter" : "intra");
        if (!row.error.empty())
            os << " error=" << row.error;
        os << "\n";
    }
    return os.str();
}

}  // namespace patchtrace

// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "patchtrace/report.hpp"

namespace fs = std::filesystem;
using namespace patchtrace;

namespace {

void write_output(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n')
            std::cout << '\n';
        return;
    }
    std::ofstream os(out_path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot write " + out_path);
    os << content;
}

std::string report_text(const CaseReport& rep) {
    std::ostringstream os;
    os << "case " << rep.id << " (CWE-" << rep.cwe << ")\n";
    os << "patch statements:\n";
    for (const auto& ps : rep.patch_statements) {
        os << "  " << ps.p_type << " " << to_string(ps.action) << " " << ps.file << ":"
           << (ps.line_vuln ? *ps.line_vuln : ps.line_patched.value_or(0));
        if (!ps.function.empty())
            os << " in " << ps.function;
        os << "  " << (ps.action == PatchAction::Delete ? ps.text_old : ps.text_new) << "\n";
    }
    os << "critical variables:\n";
    for (const auto& cv : rep.critical_variables)
        os << "  " << cv.var.base << " (level " << cv.level << ", " << cv.scope << ")\n";
    os << "triggers:\n";
    for (const auto& f : rep.triggers.findings) {
        os << "  " << f.file << ":" << f.line << " in " << f.function << " [";
        for (size_t i = 0; i < f.t_types.size(); ++i)
            os << (i ? "," : "") << f.t_types[i];
        os << "] phase=" << f.search_phase << "\n";
    }
    if (rep.classification) {
        os << "classification: " << rep.classification->kind;
        if (rep.classification->inter_type)
            os << " " << *rep.classification->inter_type;
        if (rep.classification->layers)
            os << " layers=" << *rep.classification->layers;
        os << "\n";
        if (!rep.classification->chain.empty()) {
            os << "chain:";
            for (const auto& fn : rep.classification->chain)
                os << " " << fn;
            os << "\n";
        }
    } else {
        os << "classification: skipped\n";
    }
    if (!rep.diagnostics.empty()) {
        os << "diagnostics:\n";
        for (const auto& d : rep.diagnostics)
            os << "  " << d << "\n";
    }
    return os.str();
}

void dump_dots(const CaseManifest& manifest, const std::string& dot_dir) {
    SourceTree vuln = parse_source_tree(manifest.vuln_root, VersionTag::Vulnerable);
    AnalysisGraphs graphs(vuln);
    fs::create_directories(dot_dir);
    {
        std::ofstream os(fs::path(dot_dir) / "callgraph.dot");
        os << to_dot(graphs.callgraph());
    }
    for (const auto& unit : vuln.units)
        for (const auto& fn : unit.functions) {
            std::ofstream os(fs::path(dot_dir) / ("pdg_" + fn.name + ".dot"));
            os << to_dot(graphs.pdg(fn.name), vuln);
        }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patchtrace: locate vulnerability-triggering statements from patches"};
    app.require_subcommand(1);

    std::string case_dir, corpus_dir, keywords_path, out_path, var_name, dot_dir;
    std::string format = "json";
    int theta = 0;
    int jobs = 4;
    bool with_baseline = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--theta", theta, "max inter-procedural layers (default 3)");
        cmd->add_option("--keywords", keywords_path, "keyword config file");
        cmd->add_option("--out", out_path, "write the report to a file");
        cmd->add_option("--format", format, "json|text")->check(CLI::IsMember({"json", "text"}));
    };

    CLI::App* analyze = app.add_subcommand("analyze", "analyze one case directory");
    analyze->add_option("--case", case_dir, "case directory")->required();
    analyze->add_option("--dump-dot", dot_dir, "write PDG/call-graph DOT files to a directory");
    add_common(analyze);

    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a corpus with ground truth");
    evaluate->add_option("--corpus", corpus_dir, "corpus directory")->required();
    evaluate->add_flag("--baseline", with_baseline, "include the patch-function baseline");
    evaluate->add_option("--jobs", jobs, "parallel case workers");
    add_common(evaluate);

    CLI::App* slice = app.add_subcommand("slice", "dump the slice of one critical variable");
    slice->add_option("--case", case_dir, "case directory")->required();
    slice->add_option("--var", var_name, "critical variable name")->required();
    slice->add_option("--theta", theta, "max inter-procedural layers (default 3)");
    slice->add_option("--out", out_path, "write the dump to a file");

    CLI11_PARSE(app, argc, argv);

    AnalysisConfig cfg = AnalysisConfig::from_env();
    if (theta > 0)
        cfg.theta = theta;
    cfg.jobs = jobs;
    try {
        if (!keywords_path.empty())
            cfg.keywords = KeywordConfig::load(keywords_path);

        if (app.got_subcommand(analyze)) {
            CaseManifest manifest = CaseManifest::load(case_dir);
            CaseReport rep = run_analyze(manifest, cfg);
            if (!dot_dir.empty())
                dump_dots(manifest, dot_dir);
            write_output(format == "json" ? rep.to_json().dump(2) + "\n" : report_text(rep),
                         out_path);
        } else if (app.got_subcommand(evaluate)) {
            EvaluationReport rep = run_evaluate(corpus_dir, cfg, with_baseline);
            write_output(format == "json" ? rep.to_json().dump(2) + "\n" : rep.to_text(),
                         out_path);
        } else if (app.got_subcommand(slice)) {
            CaseManifest manifest = CaseManifest::load(case_dir);
            write_output(run_slice_debug(manifest, cfg, var_name), out_path);
        }
    } catch (const ManifestError& e) {
        std::cerr << "manifest error: " << e.what() << "\n";
        return 1;
    } catch (const MissingGroundTruthError& e) {
        std::cerr << "manifest error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

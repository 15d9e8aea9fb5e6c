// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "patchtrace/classifier.hpp"
#include "patchtrace/metrics.hpp"

namespace patchtrace {

using Json = nlohmann::ordered_json;

struct GroundTruth {
    std::vector<std::pair<std::string, int>> trigger_lines;  // (file, line)
    bool is_inter = false;
    std::optional<std::string> inter_type;
    std::optional<int> layers;
};

class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingGroundTruthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One corpus case: a directory with manifest.json, patch.diff, vuln/, patched/.
struct CaseManifest {
    std::string id;
    int cwe = 0;
    std::string diff_path;
    std::string vuln_root;
    std::string patched_root;
    std::optional<GroundTruth> ground_truth;

    static CaseManifest load(const std::string& case_dir);
};

struct AnalysisConfig {
    int theta = 3;
    int max_transform_level = 3;
    KeywordConfig keywords = KeywordConfig::defaults();
    int jobs = 4;

    /// Applies the PATCHTRACE_THETA environment override to the default.
    static AnalysisConfig from_env();
};

/// Full per-case result; `to_json` serializes deterministically.
struct CaseReport {
    std::string id;
    int cwe = 0;
    std::vector<PatchStatement> patch_statements;
    std::vector<CriticalVariable> critical_variables;
    std::vector<ProgramSlice> slices;
    TriggerResult triggers;
    std::optional<Classification> classification;
    std::string baseline;  // "intra" | "inter" | ""
    std::vector<std::string> diagnostics;
    int opaque_vuln = 0;
    int opaque_patched = 0;
    std::vector<std::string> dependency_files;

    Json to_json() const;
};

CaseReport run_analyze(const CaseManifest& manifest, const AnalysisConfig& config);

/// Debug helper behind the `slice` CLI subcommand.
std::string run_slice_debug(const CaseManifest& manifest, const AnalysisConfig& config,
                            const std::string& var_name);

struct EvaluationRow {
    std::string id;
    int cwe = 0;
    bool trigger_correct = false;
    int identified_in_trigger_files = 0;
    std::string predicted;  // "intra" | "inter"
    std::string baseline;
    bool truth_inter = false;
    std::string error;  // non-empty when the case failed
};

struct EvaluationReport {
    std::vector<EvaluationRow> rows;
    double trigger_accuracy = 0.0;
    double avg_identified_triggers = 0.0;
    Confusion classifier_confusion;
    Metrics classifier_metrics;
    Confusion baseline_confusion;
    Metrics baseline_metrics;
    bool with_baseline = false;

    Json to_json() const;
    std::string to_text() const;
};

EvaluationReport run_evaluate(const std::string& corpus_dir, const AnalysisConfig& config,
                              bool with_baseline);

/// Case directories (sorted) under a corpus root.
std::vector<std::string> list_corpus_cases(const std::string& corpus_dir);

}  // namespace patchtrace

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "patchtrace/slicer.hpp"

namespace patchtrace {

/// Keyword lists driving the API-related trigger rules. Matching is
/// case-sensitive substring on the callee identifier, so "av_malloc"
/// matches "alloc".
struct KeywordConfig {
    std::vector<std::string> memory_apis;
    std::vector<std::string> assertion_apis;
    std::vector<std::string> path_apis;
    std::vector<std::string> free_apis;
    std::vector<std::string> alloc_apis;
    std::vector<std::string> division_macros;

    static KeywordConfig defaults();
    /// Plain-text format: one `[section]` per list, one keyword per line,
    /// '#' comments. Unknown sections are rejected.
    static KeywordConfig load(const std::string& path);

    static bool matches(const std::vector<std::string>& list, const std::string& identifier);
};

class UnsupportedCweError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoTriggerFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Table of admissible trigger types per CWE.
std::set<std::string> cwe_allowed_types(int cwe);

/// CWEs whose triggers are not tied to critical variables.
bool cwe_is_first_class(int cwe);

struct TriggerFinding {
    std::string file;
    std::string function;
    int line = 0;
    StatementId stmt = kNoStatement;  // vulnerable-tree statement id
    std::vector<std::string> t_types;
    std::optional<CriticalVariable> matched_cv;
    std::string search_phase;  // "forward" | "transformed-cv" | "preceding"
    int slice_index = -1;      // slice that contains the statement, -1 if none
};

struct TriggerTrace {
    std::vector<std::string> phases_tried;            // in order
    std::vector<std::pair<int, int>> level_findings;  // (level, finding count)
};

struct TriggerResult {
    std::vector<TriggerFinding> findings;
    TriggerTrace trace;
};

struct TriggerContext {
    const SourceTree* vuln = nullptr;
    const AnalysisGraphs* graphs = nullptr;  // graphs of the vulnerable tree
    KeywordConfig keywords = KeywordConfig::defaults();
    int cwe = 0;
    const std::vector<PatchStatement>* patch_statements = nullptr;
    int max_transform_level = 3;
};

/// First class (CWE-772/401/835): characteristics-based search. The resource
/// CWEs always produce a finding (T-10 or T-11).
TriggerResult identify_triggers_class1(const TriggerContext& ctx,
                                       const std::vector<ProgramSlice>& slices);

/// Second class: three-phase search over the slices; throws NoTriggerFoundError
/// when every phase comes back empty.
TriggerResult identify_triggers_class2(const TriggerContext& ctx,
                                       const std::vector<ProgramSlice>& slices,
                                       const std::vector<CriticalVariable>& cvs);

/// Non-throwing variant used by the batch pipeline.
TriggerResult identify_triggers(const TriggerContext& ctx,
                                const std::vector<ProgramSlice>& slices,
                                const std::vector<CriticalVariable>& cvs);

/// Step III substep (ii): assignment, function-header, and return-value
/// transformations; results carry level k+1.
std::vector<CriticalVariable> transform_critical_variables(
    const TriggerContext& ctx, const std::vector<CriticalVariable>& cvs,
    const std::vector<ProgramSlice>& slices);

}  // namespace patchtrace

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "patchtrace/trigger_id.hpp"

namespace patchtrace {

struct InstanceClassification {
    std::string patch_function;
    std::string trigger_function;
    int trigger_line = 0;
    bool inter = false;
    std::optional<std::string> inter_type;  // "caller" | "callee"
    std::optional<int> layers;
    std::vector<std::string> chain;  // patch function first, trigger function last
};

struct Classification {
    std::string kind;  // "intra" | "inter"
    std::optional<std::string> inter_type;
    std::optional<int> layers;
    std::vector<std::string> chain;
    std::vector<InstanceClassification> instances;
};

class NoEvidenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Definition-3 verdict: one instance per (patch statement, trigger) pair with
/// a dependence path; the case is inter-procedural when any instance is.
Classification classify_vulnerability(const std::vector<PatchStatement>& patch_stmts,
                                      const std::vector<TriggerFinding>& findings,
                                      const std::vector<ProgramSlice>& slices,
                                      const SourceTree& vuln);

/// Number of distinct functions on the chain.
int count_layers(const std::vector<std::string>& chain);

/// Prior-work heuristic: inter iff the patch touches at least two functions.
std::string patch_function_baseline(const std::vector<PatchStatement>& patch_stmts);

}  // namespace patchtrace

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "patchtrace/diff_model.hpp"

namespace patchtrace {

/// Supported CWE ids (16 total).
bool cwe_supported(int cwe);

struct CriticalVariable {
    VarRef var;
    int level = 1;  // 1 = straight from a patch statement
    std::string origin;  // patch statement reference or transformation record
    std::string scope;   // function the variable lives in

    bool operator<(const CriticalVariable& o) const {
        if (scope != o.scope)
            return scope < o.scope;
        if (!(var == o.var))
            return var < o.var;
        return level < o.level;
    }
};

class NoCriticalVariablesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Step I: derive level-1 critical variables from one patch statement
/// according to its P-type. Member references promote to the aggregate base.
/// Throws NoCriticalVariablesError when the rule yields an empty set.
std::vector<CriticalVariable> identify_critical_variables(const PatchStatement& ps, int cwe);

/// Same, but returns the empty set instead of throwing.
std::vector<CriticalVariable> identify_critical_variables_or_empty(const PatchStatement& ps,
                                                                   int cwe);

}  // namespace patchtrace

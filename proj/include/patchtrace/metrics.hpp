// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace patchtrace {

struct Confusion {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long tn = 0;

    long total() const { return tp + fp + fn + tn; }
};

struct Metrics {
    double fpr = 0.0;
    double fnr = 0.0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // metrics whose denominator was zero and were pinned to 0
    std::vector<std::string> undefined;
};

class EmptyConfusionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Metrics compute_metrics(const Confusion& c);

}  // namespace patchtrace

// SPDX-License-Identifier: Apache-2.0
#include "patchtrace/metrics.hpp"

namespace patchtrace {

Metrics compute_metrics(const Confusion& c) {
    if (c.tp < 0 || c.fp < 0 || c.fn < 0 || c.tn < 0)
        throw EmptyConfusionError("negative confusion counts");
    if (c.total() == 0)
        throw EmptyConfusionError("empty confusion matrix");

    Metrics m;
    auto ratio = [&](long num, long den, const char* name) {
        if (den == 0) {
            m.undefined.push_back(name);
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.fpr = ratio(c.fp, c.fp + c.tn, "fpr");
    m.fnr = ratio(c.fn, c.fn + c.tp, "fnr");
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    m.precision = ratio(c.tp, c.tp + c.fp, "precision");
    m.recall = ratio(c.tp, c.tp + c.fn, "recall");
    if (m.precision + m.recall == 0.0) {
        m.undefined.push_back("f1");
        m.f1 = 0.0;
    } else {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    return m;
}

}  // namespace patchtrace

// Copyright 2026 The QFL-HEP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qfl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qfl/error.hpp"

namespace qfl {

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw ShapeError("scores and labels differ in length");
    }
    std::size_t pos = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) {
            throw MetricError("labels must be 0 or 1");
        }
        if (std::isnan(scores[i])) {
            throw MetricError("score " + std::to_string(i) + " is NaN");
        }
        pos += static_cast<std::size_t>(labels[i]);
    }
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) {
        throw MetricError("ROC needs at least one positive and one negative "
                          "label");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    curve.thresholds.push_back(std::numeric_limits<double>::infinity());
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double cut = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == cut; ++i) {
            if (labels[order[i]] == 1) {
                ++tp;
            } else {
                ++fp;
            }
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                static_cast<double>(tp) / static_cast<double>(pos)});
        curve.thresholds.push_back(cut);
    }
    return curve;
}

double auc(const RocCurve &curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto &a = curve.points[i - 1];
        const auto &b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return area;
}

double accuracy(std::span<const double> scores, std::span<const int> labels,
                double threshold) {
    if (scores.size() != labels.size()) {
        throw ShapeError("scores (" + std::to_string(scores.size()) +
                         ") and labels (" + std::to_string(labels.size()) +
                         ") differ in length");
    }
    if (scores.empty()) {
        throw ShapeError("accuracy of an empty set is undefined");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const int predicted = scores[i] >= threshold ? 1 : 0;
        correct += predicted == labels[i] ? 1U : 0U;
    }
    return static_cast<double>(correct) / static_cast<double>(scores.size());
}

std::string roc_to_csv(const RocCurve &curve) {
    std::ostringstream os;
    os.precision(17);
    os << "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        os << curve.thresholds[i] << ',' << curve.points[i].fpr << ','
           << curve.points[i].tpr << '\n';
    }
    return os.str();
}

} // namespace qfl

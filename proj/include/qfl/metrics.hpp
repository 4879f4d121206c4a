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
#pragma once

#include <span>
#include <string>
#include <vector>

namespace qfl {

struct RocPoint {
    double fpr{0.0};
    double tpr{0.0};
};

/// Points start at (0,0) with threshold +inf and end at (1,1). Tied scores
/// share one threshold, so each point is a distinct score cutoff.
struct RocCurve {
    std::vector<RocPoint> points;
    std::vector<double> thresholds;
};

/// Throws MetricError unless both classes are present.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

/// Trapezoidal area under the curve.
double auc(const RocCurve &curve);

/// Fraction of samples where (score >= threshold) matches the label.
double accuracy(std::span<const double> scores, std::span<const int> labels,
                double threshold = 0.5);

/// CSV with header "threshold,fpr,tpr".
std::string roc_to_csv(const RocCurve &curve);

} // namespace qfl

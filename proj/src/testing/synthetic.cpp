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
#include "qfl/testing/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qfl/random.hpp"

namespace qfl::synthetic {

namespace {

double normal(Rng &rng) {
    // Box-Muller; one draw per call keeps the stream easy to reason about.
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace

Dataset susy_like(std::size_t n, std::uint64_t seed, double separation) {
    Rng rng(derive_seed(seed, {0x5e5e}));
    Dataset d;
    d.feature_names.assign(kSusyColumns.begin(), kSusyColumns.end());
    d.features.reserve(n * kSusyColumns.size());
    d.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int y = rng.uniform() < 0.46 ? 1 : 0;
        d.labels.push_back(y);
        for (const auto name : kSusyColumns) {
            const bool low = std::find(kLow7Columns.begin(), kLow7Columns.end(), name) !=
                             kLow7Columns.end();
            const double shift = y * separation * (low ? 1.0 : 0.1);
            double x = normal(rng) + shift;
            if (name.find("pT") != std::string_view::npos ||
                name == "missing energy magnitude") {
                x = std::exp(0.5 * x);
            }
            d.features.push_back(x);
        }
    }
    return d;
}

std::string to_csv(const Dataset &data) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < data.size(); ++i) {
        os << data.labels[i];
        for (double v : data.row(i)) {
            os << ',' << v;
        }
        os << '\n';
    }
    return os.str();
}

} // namespace qfl::synthetic

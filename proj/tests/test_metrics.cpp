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
#include <cmath>
#include <limits>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "qfl/error.hpp"
#include "qfl/metrics.hpp"
#include "qfl/random.hpp"
#include "qfl/testing/oracles.hpp"

using namespace qfl;

namespace {

struct Instance {
    std::vector<double> scores;
    std::vector<int> labels;
};

/// Random instance with both classes present; `levels` > 0 quantizes
/// scores to force ties.
Instance random_instance(Rng &rng, std::size_t n, int levels) {
    Instance in;
    in.scores.resize(n);
    in.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        in.labels[i] = rng.uniform() < 0.4 ? 1 : 0;
        const double s = rng.uniform() + 0.3 * in.labels[i];
        in.scores[i] = levels > 0 ? std::floor(s * levels) / levels : s;
    }
    in.labels[0] = 1;
    in.labels[1] = 0;
    return in;
}

double auc_of(std::span<const double> s, std::span<const int> y) {
    return auc(roc_curve(s, y));
}

} // namespace

TEST_CASE("roc_curve", "[metrics]") {
    SECTION("perfect ranking passes through (0,1)") {
        const std::vector<double> s{0.9, 0.1};
        const std::vector<int> y{1, 0};
        const auto c = roc_curve(s, y);
        bool hit = false;
        for (const auto &p : c.points) {
            hit = hit || (p.fpr == 0.0 && p.tpr == 1.0);
        }
        CHECK(hit);
        CHECK(auc(c) == 1.0);
    }
    SECTION("inverted ranking") {
        const std::vector<double> s{0.1, 0.9};
        const std::vector<int> y{1, 0};
        const auto c = roc_curve(s, y);
        CHECK(c.points[1].fpr == 1.0);
        CHECK(c.points[1].tpr == 0.0);
        CHECK(auc(c) == 0.0);
    }
    SECTION("all ties give the diagonal") {
        const std::vector<double> s(6, 0.3);
        const std::vector<int> y{1, 0, 1, 0, 0, 1};
        const auto c = roc_curve(s, y);
        REQUIRE(c.points.size() == 2);
        CHECK(c.points[0].fpr == 0.0);
        CHECK(c.points[0].tpr == 0.0);
        CHECK(c.points[1].fpr == 1.0);
        CHECK(c.points[1].tpr == 1.0);
        CHECK(auc(c) == 0.5);
    }
    SECTION("thresholds descend from +inf") {
        const std::vector<double> s{0.2, 0.8, 0.5, 0.8};
        const std::vector<int> y{0, 1, 0, 1};
        const auto c = roc_curve(s, y);
        CHECK(c.thresholds.front() == std::numeric_limits<double>::infinity());
        CHECK(c.thresholds == std::vector<double>{
                                  std::numeric_limits<double>::infinity(), 0.8, 0.5, 0.2});
    }
    SECTION("errors") {
        const std::vector<double> s{0.1, 0.2};
        CHECK_THROWS_AS(roc_curve(s, std::vector<int>{1, 1}), MetricError);
        CHECK_THROWS_AS(roc_curve(s, std::vector<int>{0, 0}), MetricError);
        CHECK_THROWS_AS(roc_curve(s, std::vector<int>{0}), ShapeError);
        CHECK_THROWS_AS(roc_curve(std::vector<double>{NAN, 0.1}, std::vector<int>{0, 1}),
                        MetricError);
    }
    SECTION("csv export") {
        const auto c = roc_curve(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0});
        const auto csv = roc_to_csv(c);
        CHECK(csv.rfind("threshold,fpr,tpr\n", 0) == 0);
        CHECK(csv.find("inf,0,0\n") != std::string::npos);
    }
}

TEST_CASE("roc curve shape invariants", "[metrics][property]") {
    Rng rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        const auto in = random_instance(rng, 2 + rng.below(100), trial % 2 ? 5 : 0);
        const auto c = roc_curve(in.scores, in.labels);
        CHECK(c.points.front().fpr == 0.0);
        CHECK(c.points.front().tpr == 0.0);
        CHECK(c.points.back().fpr == 1.0);
        CHECK(c.points.back().tpr == 1.0);
        for (std::size_t i = 1; i < c.points.size(); ++i) {
            CHECK(c.points[i].fpr >= c.points[i - 1].fpr);
            CHECK(c.points[i].tpr >= c.points[i - 1].tpr);
            CHECK(c.thresholds[i] < c.thresholds[i - 1]);
        }
    }
}

TEST_CASE("auc matches the pairwise rank statistic", "[metrics][oracle]") {
    Rng rng(52);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<std::size_t>(2 + rng.below(199));
        const auto in = random_instance(rng, n, trial % 3 == 0 ? 7 : 0);
        const double got = auc_of(in.scores, in.labels);
        const double want = oracle::rank_auc(in.scores, in.labels);
        worst = std::max(worst, std::abs(got - want));
        CHECK(std::abs(got - want) < 1e-12);
    }
    INFO("worst deviation " << worst);
    CHECK(worst < 1e-12);
}

TEST_CASE("auc invariances", "[metrics][property]") {
    Rng rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        const auto in = random_instance(rng, 2 + rng.below(150), 0);
        const double base = auc_of(in.scores, in.labels);

        std::vector<double> transformed(in.scores.size());
        std::vector<double> negated(in.scores.size());
        for (std::size_t i = 0; i < in.scores.size(); ++i) {
            transformed[i] = std::exp(3.0 * in.scores[i]) - 7.0;
            negated[i] = -in.scores[i];
        }
        CHECK(std::abs(auc_of(transformed, in.labels) - base) < 1e-12);
        CHECK(std::abs(auc_of(negated, in.labels) + base - 1.0) < 1e-12);
        CHECK((base >= 0.0 && base <= 1.0));
    }
}

TEST_CASE("accuracy", "[metrics]") {
    CHECK(accuracy(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}) == 1.0);
    CHECK(accuracy(std::vector<double>{0.9, 0.1}, std::vector<int>{0, 1}) == 0.0);
    CHECK(accuracy(std::vector<double>{0.9, 0.2, 0.6, 0.4}, std::vector<int>{1, 0, 0, 0}) ==
          0.75);
    CHECK(accuracy(std::vector<double>{0.5}, std::vector<int>{1}) == 1.0);
    CHECK_THROWS_AS(accuracy(std::vector<double>{0.5}, std::vector<int>{1, 0}), ShapeError);
    CHECK_THROWS_AS(accuracy(std::vector<double>{}, std::vector<int>{}), ShapeError);
}

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
/**
 * @file
 * Fast oracle suite run by `qfl selftest`: simulator against dense
 * matrices, gradients against central differences, AUC against the
 * pairwise rank statistic and FedAvg algebra.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace qfl::app {

struct OracleCheck {
    std::string module;
    std::string name;
    bool passed{true};
    std::string detail; ///< worst deviation or the first failure
    std::size_t instances{0};
};

struct SelftestOptions {
    std::uint64_t seed{20260101};
    /// Deliberate defect for exercising the failure path: "gradient",
    /// "bptt", "auc", "fedavg" or "norm". Empty for a clean run.
    std::string inject_fault;
};

struct SelftestReport {
    std::vector<OracleCheck> checks;
    double wall_time_s{0.0};

    [[nodiscard]] bool passed() const;
    /// Instances checked per module.
    [[nodiscard]] std::map<std::string, std::size_t> counts() const;
};

SelftestReport run_selftest(const SelftestOptions &options);

/// One line per check, per-module counts and a summary line.
void print_report(const SelftestReport &report, std::ostream &out);

/// Names accepted by SelftestOptions::inject_fault.
const std::vector<std::string> &fault_names();

} // namespace qfl::app

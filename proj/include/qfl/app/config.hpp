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
 * Run configuration for the command-line front end. The file format is
 * flat `key = value` text with `#` comments; every key is also a CLI flag
 * (`--key-name`) and flags override the file.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qfl/data.hpp"
#include "qfl/federated.hpp"
#include "qfl/model.hpp"

namespace qfl::app {

/// Parameter budget the default layer count is resolved against.
inline constexpr std::size_t kParamBudget = 300;

struct RunConfig {
    ModelKind model_kind{ModelKind::Qlstm};
    FeatureSubset feature_subset{FeatureSubset::Low7};
    std::size_t n_qubits{6};
    std::optional<std::size_t> n_layers; ///< unset resolves to 4, see resolve()
    std::size_t hidden_dim{1};
    std::size_t epochs{30};
    double lr{0.01};
    std::size_t batch_size{32};
    std::uint64_t seed{42};
    std::size_t window{1};
    RecurrentInput recurrent_input{RecurrentInput::InputOnly};
    bool gate_activation{true};
    OutputSource output_head_source{OutputSource::Cell};
    Encoding encoding{Encoding::AngleRX};
    Entangler entangler{Entangler::CnotRing};

    NormMode normalization{NormMode::MinMax};
    std::size_t max_rows{20000};
    Sampling sampling{Sampling::Head};
    bool has_header{false};
    double split_ratio{0.8};

    std::size_t n_nodes{3};
    std::size_t global_rounds{5};
    std::optional<std::size_t> local_epochs; ///< unset follows `epochs`
    Aggregation aggregation{Aggregation::SampleWeighted};

    /// Assign one key from its text form. Throws ConfigError for unknown
    /// keys or malformed values.
    void set(std::string_view key, std::string_view value);

    /// Canonical (key, value) listing in schema order. Unset optionals are
    /// omitted.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> items() const;

    void validate() const;

    [[nodiscard]] ModelConfig model_config() const;
    [[nodiscard]] FedConfig fed_config() const;
    [[nodiscard]] TrainOptions train_options(std::size_t workers) const;
};

/// Every accepted key, in schema order.
const std::vector<std::string_view> &config_keys();

/// Parse `key = value` text. Blank lines and `#` comments are ignored.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>",
                       RunConfig base = {});
RunConfig load_config(const std::filesystem::path &path, RunConfig base = {});

void apply_overrides(RunConfig &config,
                     const std::map<std::string, std::string> &overrides);

struct ResolvedConfig {
    RunConfig config;               ///< every optional filled in
    std::vector<std::string> notes; ///< adjustments made while resolving
};

/**
 * Validate and fill defaults. An unset n_layers becomes 4, lowered for the
 * QLSTM until its trainable parameter count is below kParamBudget; each
 * such adjustment is reported in `notes`.
 */
ResolvedConfig resolve(const RunConfig &config);

/// Canonical text (one `key = value` per line).
std::string to_text(const RunConfig &config);

/// FNV-1a of the canonical text, 16 hex digits.
std::string config_hash(const RunConfig &config);

} // namespace qfl::app

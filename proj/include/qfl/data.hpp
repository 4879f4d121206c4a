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
 * SUSY-format ingestion: CSV rows of one 0/1 label followed by 18 kinematic
 * features, feature-subset selection, train/test splitting, scaling of
 * features to rotation angles, and sequence construction.
 */
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qfl/qlstm.hpp"

namespace qfl {

/// Column order of the SUSY archive after the label column.
inline constexpr std::array<std::string_view, 18> kSusyColumns{
    "lepton 1 pT",      "lepton 1 eta",     "lepton 1 phi",
    "lepton 2 pT",      "lepton 2 eta",     "lepton 2 phi",
    "missing energy magnitude", "missing energy phi", "MET_rel",
    "axial MET",        "M_R",              "M_TR_2",
    "R",                "MT2",              "S_R",
    "M_Delta_R",        "dPhi_r_b",         "cos(theta_r1)"};

/// The seven low-level features, in the order the model consumes them.
inline constexpr std::array<std::string_view, 7> kLow7Columns{
    "lepton 1 pT", "lepton 2 pT", "missing energy magnitude", "M_TR_2",
    "M_Delta_R",   "lepton 1 eta", "lepton 2 eta"};

enum class FeatureSubset { Full18, Low7 };

std::string_view to_string(FeatureSubset s);
FeatureSubset parse_feature_subset(std::string_view s);
std::span<const std::string_view> subset_columns(FeatureSubset s);

struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<double> features; ///< row-major [size()][num_features()]
    std::vector<int> labels;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    [[nodiscard]] std::size_t num_features() const noexcept {
        return feature_names.size();
    }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return std::span(features).subspan(i * num_features(), num_features());
    }
    /// Rows `idx` in the given order.
    [[nodiscard]] Dataset take(std::span<const std::size_t> idx) const;
};

enum class Sampling { Head, Random };

struct CsvOptions {
    bool has_header{false};
    std::size_t max_rows{0}; ///< 0 reads every row
    Sampling sampling{Sampling::Head};
    std::uint64_t sample_seed{0};
    std::size_t feature_columns{18};
};

/// Throws IoError if the file cannot be opened and FormatError (with the
/// line number) on malformed rows.
Dataset load_csv(const std::filesystem::path &path, const CsvOptions &options);
Dataset parse_csv(std::istream &in, const CsvOptions &options,
                  std::string_view source = "<stream>");

/// Column projection by name. Throws ConfigError on an unknown name.
Dataset select_columns(const Dataset &data,
                       std::span<const std::string_view> names);
Dataset select_features(const Dataset &data, FeatureSubset subset);

/// Seeded shuffle, then the first floor(ratio * n) rows train.
std::pair<Dataset, Dataset> split(const Dataset &data, double ratio,
                                  std::uint64_t seed);

enum class NormMode { MinMax, ZScore };

std::string_view to_string(NormMode m);
NormMode parse_norm_mode(std::string_view s);

/// Per-feature scaling fit on the training split. For MinMax, (a, b) are
/// (min, max); for ZScore, (mean, std).
struct Normalization {
    NormMode mode{NormMode::MinMax};
    std::vector<std::string> feature_names;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<std::size_t> constant_features;
};

Normalization fit_normalization(const Dataset &train,
                                NormMode mode = NormMode::MinMax);

/// MinMax maps [min, max] to [-pi, pi] and clamps values outside the
/// fitted range; constant features map to 0.
Dataset apply_normalization(const Dataset &data, const Normalization &norm);

struct NormalizedSplit {
    Dataset train;
    Dataset test;
    Normalization metadata;
};

NormalizedSplit normalize_fit_transform(const Dataset &train, const Dataset &test,
                                        NormMode mode = NormMode::MinMax);

/// window == 1: one single-step sequence per row. window == T: sliding
/// windows over consecutive rows labeled by the last row (n - T + 1 of them).
std::vector<LabeledSequence> make_sequences(const Dataset &data,
                                            std::size_t window);

/// FNV-1a over labels and feature bytes, as 16 hex digits.
std::string fingerprint(const Dataset &data);

} // namespace qfl

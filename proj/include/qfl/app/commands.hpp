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
 * Experiment commands behind the `qfl` executable. Each run writes into
 * its output directory:
 *
 *   manifest.json   resolved config, dataset fingerprint, metrics, timing
 *   model.qflckpt   final (global) model
 *   roc.csv         test-set ROC of the final model
 *   metrics.csv     per-epoch (train) or per-round (federate) metrics
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfl/app/config.hpp"
#include "qfl/data.hpp"
#include "qfl/federated.hpp"
#include "qfl/metrics.hpp"
#include "qfl/model.hpp"

namespace qfl::app {

struct RunOptions {
    std::size_t workers{1};
    std::ostream *log{nullptr}; ///< progress lines; null silences them
};

/// Train/test sequences ready for a model, plus what is needed to replay
/// the preprocessing.
struct PreparedData {
    std::string dataset_fingerprint; ///< of the rows as loaded, all 18 columns
    std::size_t rows{0};
    std::vector<std::string> feature_names;
    Normalization normalization;
    std::vector<LabeledSequence> train;
    std::vector<LabeledSequence> test;
};

/// load -> select features -> split -> normalize (fit on train) -> window.
PreparedData prepare_data(const RunConfig &config, const std::filesystem::path &data_path);

struct EpochRecord {
    std::size_t epoch{0};
    double train_loss{0.0};
    double test_auc{0.0};
    double test_accuracy{0.0};
    double test_loss{0.0};
    double wall_time_s{0.0};
};

struct RunManifest {
    std::string command;
    std::string config_hash;
    RunConfig config; ///< resolved
    std::vector<std::string> notes;
    std::string data_path;
    std::string dataset_fingerprint;
    std::size_t rows{0};
    std::size_t train_size{0};
    std::size_t test_size{0};
    std::vector<std::string> feature_names;
    Normalization normalization;
    std::size_t parameter_count{0};
    std::map<std::string, std::size_t> parameter_counts; ///< by model kind
    std::vector<EpochRecord> epochs;
    std::vector<RoundMetrics> rounds;
    std::vector<std::size_t> shard_sizes;
    double final_auc{0.0};
    double final_accuracy{0.0};
    double final_loss{0.0};
    double wall_time_s{0.0};
    std::size_t workers{1};
    std::map<std::string, std::string> artifacts;
};

nlohmann::json to_json(const RunManifest &m);

/// Config recorded in a manifest, for re-running it.
RunConfig config_from_manifest(const std::filesystem::path &manifest_path);

/// Trainable parameter counts of every model kind under `config`.
std::map<std::string, std::size_t> parameter_counts(const RunConfig &resolved);

/// Centralized training. Config errors surface before any data is read.
RunManifest cmd_train(const RunConfig &config, const std::filesystem::path &data_path,
                      const std::filesystem::path &out_dir, const RunOptions &options);

/// Federated training with `config.n_nodes` nodes.
RunManifest cmd_federate(const RunConfig &config, const std::filesystem::path &data_path,
                         const std::filesystem::path &out_dir, const RunOptions &options);

struct EvalReport {
    double auc{0.0};
    double accuracy{0.0};
    double loss{0.0};
    std::size_t samples{0};
    RocCurve roc;
};

/**
 * Rebuild the test split recorded in the checkpoint and score it. With
 * `feature_subset` set, that subset is used instead of the recorded one;
 * a width mismatch with the model is a ShapeError naming both subsets.
 * Writes evaluation.csv and evaluation_roc.csv when `out_dir` is given.
 */
EvalReport cmd_evaluate(const std::filesystem::path &checkpoint,
                        const std::filesystem::path &data_path,
                        std::optional<FeatureSubset> feature_subset,
                        const std::optional<std::filesystem::path> &out_dir,
                        const RunOptions &options);

struct RepeatSummary {
    std::vector<std::uint64_t> seeds;
    std::vector<double> auc;
    std::vector<double> accuracy;
    double auc_mean{0.0};
    double auc_std{0.0}; ///< sample standard deviation (n - 1)
    double accuracy_mean{0.0};
    double accuracy_std{0.0};
};

/// `repeats` runs of train or federate with seeds seed, seed + 1, ...
/// into out_dir/repeat-<k>; writes out_dir/repeats.json.
RepeatSummary run_repeats(const std::string &command, const RunConfig &config,
                          const std::filesystem::path &data_path,
                          const std::filesystem::path &out_dir, std::size_t repeats,
                          const RunOptions &options);

/// One federate run per node count into out_dir/nodes-<n>; writes
/// out_dir/sweep.csv.
std::vector<RunManifest> sweep_nodes(const RunConfig &config,
                                     const std::filesystem::path &data_path,
                                     const std::filesystem::path &out_dir,
                                     const std::vector<std::size_t> &node_counts,
                                     const RunOptions &options);

double sample_mean(const std::vector<double> &v);
double sample_std(const std::vector<double> &v);

} // namespace qfl::app

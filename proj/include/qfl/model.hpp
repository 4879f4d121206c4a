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
 * Type-erased classifier (QLSTM, classical LSTM or VQC) and the mini-batch
 * Adam/BCE training loop shared by centralized and federated runs.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "qfl/nn.hpp"
#include "qfl/qlstm.hpp"

namespace qfl {

enum class ModelKind { Qlstm, Lstm, Vqc };

std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);

using AnyModel = std::variant<QlstmModel, LstmModel, VqcClassifier>;

struct ModelConfig {
    ModelKind kind{ModelKind::Qlstm};
    /// The VQC classifier reads input_dim and spec only.
    CellConfig cell{};
};

/// Seeded initialization.
AnyModel make_model(const ModelConfig &config, std::uint64_t seed);
/// All parameters zero.
AnyModel make_zero_model(const ModelConfig &config);

ModelKind kind_of(const AnyModel &model);
std::size_t param_count(const AnyModel &model);
std::size_t input_dim(const AnyModel &model);
std::vector<double> get_params(const AnyModel &model);
void set_params(AnyModel &model, std::span<const double> flat);

/// Probability of the positive class. The VQC classifier sees only the
/// final step of the sequence.
double predict(const AnyModel &model, std::span<const std::vector<double>> seq);

struct SampleGradient {
    std::vector<double> grad; ///< flat, same order as get_params
    double loss{0.0};
    double prediction{0.0};
};

SampleGradient loss_gradient(const AnyModel &model,
                             std::span<const std::vector<double>> seq,
                             int label);

struct TrainOptions {
    std::size_t epochs{30};
    std::size_t batch_size{32};
    AdamConfig adam{};
    /// Seeds the per-epoch batch order.
    std::uint64_t seed{0};
    std::size_t workers{1};
};

/// Called after every epoch with the zero-based epoch index, that epoch's
/// mean training loss and the updated model.
using EpochCallback =
    std::function<void(std::size_t epoch, double train_loss, const AnyModel &model)>;

struct TrainReport {
    std::vector<double> epoch_loss; ///< mean per-sample BCE seen during the epoch
};

/**
 * Mini-batch training. Per-sample gradients are computed in parallel and
 * summed in sample order, so results do not depend on the worker count.
 * Throws TrainingError naming the epoch on a non-finite loss.
 */
TrainReport train(AnyModel &model, AdamState &optimizer,
                  std::span<const LabeledSequence> data,
                  const TrainOptions &options,
                  const EpochCallback &on_epoch = {});

std::vector<double> predict_all(const AnyModel &model,
                                std::span<const LabeledSequence> data,
                                std::size_t workers);

struct Evaluation {
    double auc{0.0};
    double accuracy{0.0};
    double loss{0.0};
    std::vector<double> scores;
};

Evaluation evaluate(const AnyModel &model,
                    std::span<const LabeledSequence> data,
                    std::size_t workers);

} // namespace qfl

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
#include "qfl/model.hpp"

#include <cmath>
#include <string>

#include "qfl/metrics.hpp"
#include "qfl/parallel.hpp"
#include "qfl/random.hpp"

namespace qfl {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};

template <class M>
SampleGradient pack(const Gradient<M> &g) {
    return {flatten(g.grad), g.loss, g.prediction};
}

} // namespace

std::string_view to_string(ModelKind k) {
    switch (k) {
    case ModelKind::Qlstm:
        return "qlstm";
    case ModelKind::Lstm:
        return "lstm";
    case ModelKind::Vqc:
        return "vqc";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view s) {
    for (auto k : {ModelKind::Qlstm, ModelKind::Lstm, ModelKind::Vqc}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw ConfigError("unknown model_kind '" + std::string(s) +
                      "' (expected qlstm, lstm or vqc)");
}

AnyModel make_model(const ModelConfig &config, std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0x1a17}));
    switch (config.kind) {
    case ModelKind::Qlstm:
        return make_qlstm(config.cell, rng);
    case ModelKind::Lstm:
        return make_lstm(config.cell, rng);
    case ModelKind::Vqc:
        return make_vqc_classifier(config.cell.input_dim, config.cell.spec, rng);
    }
    throw ConfigError("unknown model kind");
}

AnyModel make_zero_model(const ModelConfig &config) {
    switch (config.kind) {
    case ModelKind::Qlstm:
        return make_qlstm(config.cell);
    case ModelKind::Lstm:
        return make_lstm(config.cell);
    case ModelKind::Vqc:
        return make_vqc_classifier(config.cell.input_dim, config.cell.spec);
    }
    throw ConfigError("unknown model kind");
}

ModelKind kind_of(const AnyModel &model) {
    return std::visit(overloaded{
                          [](const QlstmModel &) { return ModelKind::Qlstm; },
                          [](const LstmModel &) { return ModelKind::Lstm; },
                          [](const VqcClassifier &) { return ModelKind::Vqc; },
                      },
                      model);
}

std::size_t param_count(const AnyModel &model) {
    return std::visit([](const auto &m) { return param_count(m); }, model);
}

std::size_t input_dim(const AnyModel &model) {
    return std::visit(overloaded{
                          [](const VqcClassifier &m) { return m.input_dim; },
                          [](const auto &m) { return m.config.input_dim; },
                      },
                      model);
}

std::vector<double> get_params(const AnyModel &model) {
    return std::visit([](const auto &m) { return flatten(m); }, model);
}

void set_params(AnyModel &model, std::span<const double> flat) {
    std::visit([&](auto &m) { unflatten(m, flat); }, model);
}

double predict(const AnyModel &model, std::span<const std::vector<double>> seq) {
    if (seq.empty()) {
        throw DataError("sequence must contain at least one step");
    }
    return std::visit(overloaded{
                          [&](const VqcClassifier &m) {
                              return vqc_classifier_forward(m, seq.back());
                          },
                          [&](const auto &m) { return sequence_forward(m, seq); },
                      },
                      model);
}

SampleGradient loss_gradient(const AnyModel &model,
                             std::span<const std::vector<double>> seq,
                             int label) {
    if (seq.empty()) {
        throw DataError("sequence must contain at least one step");
    }
    return std::visit(
        overloaded{
            [&](const VqcClassifier &m) {
                return pack(vqc_classifier_gradient(m, seq.back(), label));
            },
            [&](const auto &m) { return pack(bptt_gradient(m, seq, label)); },
        },
        model);
}

TrainReport train(AnyModel &model, AdamState &optimizer,
                  std::span<const LabeledSequence> data,
                  const TrainOptions &options, const EpochCallback &on_epoch) {
    TrainReport report;
    if (options.epochs == 0) {
        return report;
    }
    if (data.empty()) {
        throw DataError("training set is empty");
    }
    if (options.batch_size == 0) {
        throw ConfigError("batch_size must be positive");
    }
    std::vector<double> params = get_params(model);
    if (optimizer.m.size() != params.size()) {
        optimizer = AdamState(params.size(), optimizer.config);
    }

    const std::size_t n = data.size();
    std::vector<SampleGradient> per_sample;
    std::vector<double> grad(params.size());

    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        Rng rng(derive_seed(options.seed, {epoch}));
        const std::vector<std::size_t> order = rng.permutation(n);
        double loss_sum = 0.0;

        for (std::size_t start = 0; start < n; start += options.batch_size) {
            const std::size_t count = std::min(options.batch_size, n - start);
            per_sample.assign(count, {});
            try {
                parallel_for(count, options.workers, [&](std::size_t i) {
                    const auto &s = data[order[start + i]];
                    per_sample[i] = loss_gradient(model, s.steps, s.label);
                });
            } catch (const TrainingError &e) {
                throw TrainingError(std::string(e.what()) + " in epoch " +
                                    std::to_string(epoch + 1));
            }

            std::fill(grad.begin(), grad.end(), 0.0);
            for (const auto &sg : per_sample) {
                loss_sum += sg.loss;
                for (std::size_t k = 0; k < grad.size(); ++k) {
                    grad[k] += sg.grad[k];
                }
            }
            const double inv = 1.0 / static_cast<double>(count);
            for (auto &g : grad) {
                g *= inv;
            }
            if (!std::isfinite(loss_sum)) {
                throw TrainingError("non-finite loss in epoch " +
                                    std::to_string(epoch + 1));
            }
            try {
                adam_step(optimizer, params, grad);
            } catch (const TrainingError &e) {
                throw TrainingError(std::string(e.what()) + " in epoch " +
                                    std::to_string(epoch + 1));
            }
            set_params(model, params);
        }
        report.epoch_loss.push_back(loss_sum / static_cast<double>(n));
        if (on_epoch) {
            on_epoch(epoch, report.epoch_loss.back(), model);
        }
    }
    return report;
}

std::vector<double> predict_all(const AnyModel &model,
                                std::span<const LabeledSequence> data,
                                std::size_t workers) {
    std::vector<double> out(data.size());
    parallel_for(data.size(), workers,
                 [&](std::size_t i) { out[i] = predict(model, data[i].steps); });
    return out;
}

Evaluation evaluate(const AnyModel &model,
                    std::span<const LabeledSequence> data,
                    std::size_t workers) {
    Evaluation ev;
    ev.scores = predict_all(model, data, workers);
    std::vector<int> labels(data.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        labels[i] = data[i].label;
        loss += bce_loss(ev.scores[i], labels[i]).loss;
    }
    ev.loss = data.empty() ? 0.0 : loss / static_cast<double>(data.size());
    ev.auc = auc(roc_curve(ev.scores, labels));
    ev.accuracy = accuracy(ev.scores, labels);
    return ev;
}

} // namespace qfl

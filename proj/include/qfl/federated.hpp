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
 * In-process federated averaging. A logical server broadcasts a flat
 * parameter snapshot, every node trains on its IID shard with a fresh Adam
 * state, and the server replaces the global model with the weighted mean
 * of the returned snapshots.
 *
 * Node n in round r trains with seed stream derive_seed(seed, {r, n}).
 * Centralized runs use stream {0, 0}, so a one-node, one-round federation
 * replays a centralized run exactly.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qfl/model.hpp"

namespace qfl {

enum class Aggregation { Uniform, SampleWeighted };

std::string_view to_string(Aggregation a);
Aggregation parse_aggregation(std::string_view s);

struct FedConfig {
    std::size_t n_nodes{3};
    std::size_t global_rounds{5};
    std::size_t local_epochs{30};
    Aggregation aggregation{Aggregation::SampleWeighted};
    std::uint64_t seed{0};

    void validate() const;
};

/// Training seed for `node` in `round`.
std::uint64_t node_seed(std::uint64_t seed, std::size_t round, std::size_t node);

/**
 * Seeded assignment of n_items to n_nodes shards of sizes differing by at
 * most one. Shards are disjoint, cover every item, and list their items in
 * ascending order. Throws ConfigError when n_nodes is 0 or exceeds n_items.
 */
std::vector<std::vector<std::size_t>> partition_iid(std::size_t n_items,
                                                    std::size_t n_nodes,
                                                    std::uint64_t seed);

struct NodeState {
    std::size_t node_id{0};
    std::vector<std::size_t> shard;
    AnyModel model;
    AdamState optimizer;
    std::vector<double> loss_trace;
};

/// Runs `epochs` epochs on the node's shard, appending to its loss trace.
/// Divergence is reported as TrainingError naming the node.
void local_train(NodeState &node, std::span<const LabeledSequence> data,
                 std::size_t epochs, const TrainOptions &base, std::size_t round);

/// Elementwise weighted mean with weights normalized to sum to one.
std::vector<double> fedavg(std::span<const std::vector<double>> snapshots,
                           std::span<const double> weights);

struct RoundMetrics {
    std::size_t round{0};
    std::size_t node_count{0};
    ModelKind model_kind{ModelKind::Qlstm};
    double train_loss{0.0};
    double test_auc{0.0};
    double test_accuracy{0.0};
    double test_loss{0.0};
    double wall_time_s{0.0};
};

std::string round_metrics_csv_header();
std::string to_csv_row(const RoundMetrics &m);

struct FederationResult {
    AnyModel global;
    std::vector<RoundMetrics> rounds;
    std::vector<std::size_t> shard_sizes;
};

/**
 * Full federation: for each round broadcast, train all nodes concurrently,
 * aggregate, evaluate on `test`. `options` supplies batch size, Adam
 * settings and the worker budget; its epochs and seed are replaced by the
 * federation's. `on_round` (optional) sees each row as it is produced.
 */
FederationResult run_federation(const FedConfig &config, AnyModel initial,
                                std::span<const LabeledSequence> train,
                                std::span<const LabeledSequence> test,
                                const TrainOptions &options,
                                const std::function<void(const RoundMetrics &)> &on_round = {});

} // namespace qfl

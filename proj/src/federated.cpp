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
#include "qfl/federated.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qfl/parallel.hpp"
#include "qfl/random.hpp"

namespace qfl {

std::string_view to_string(Aggregation a) {
    return a == Aggregation::Uniform ? "uniform" : "sample_weighted";
}

Aggregation parse_aggregation(std::string_view s) {
    if (s == "uniform") {
        return Aggregation::Uniform;
    }
    if (s == "sample_weighted") {
        return Aggregation::SampleWeighted;
    }
    throw ConfigError("aggregation must be uniform or sample_weighted, got '" +
                      std::string(s) + "'");
}

void FedConfig::validate() const {
    if (n_nodes < 1) {
        throw ConfigError("n_nodes must be at least 1");
    }
    if (global_rounds < 1) {
        throw ConfigError("global_rounds must be at least 1");
    }
    if (local_epochs < 1) {
        throw ConfigError("local_epochs must be at least 1");
    }
}

std::uint64_t node_seed(std::uint64_t seed, std::size_t round, std::size_t node) {
    return derive_seed(seed, {round, node});
}

std::vector<std::vector<std::size_t>> partition_iid(std::size_t n_items,
                                                    std::size_t n_nodes,
                                                    std::uint64_t seed) {
    if (n_nodes == 0) {
        throw ConfigError("n_nodes must be at least 1");
    }
    if (n_nodes > n_items) {
        throw ConfigError("cannot split " + std::to_string(n_items) +
                          " samples across " + std::to_string(n_nodes) + " nodes");
    }
    Rng rng(derive_seed(seed, {0xfed}));
    const auto perm = rng.permutation(n_items);
    const std::size_t base = n_items / n_nodes;
    const std::size_t extra = n_items % n_nodes;

    std::vector<std::vector<std::size_t>> shards(n_nodes);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const std::size_t len = base + (k < extra ? 1 : 0);
        shards[k].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                         perm.begin() + static_cast<std::ptrdiff_t>(pos + len));
        std::sort(shards[k].begin(), shards[k].end());
        pos += len;
    }
    return shards;
}

void local_train(NodeState &node, std::span<const LabeledSequence> data,
                 std::size_t epochs, const TrainOptions &base, std::size_t round) {
    std::vector<LabeledSequence> local;
    local.reserve(node.shard.size());
    for (std::size_t i : node.shard) {
        local.push_back(data[i]);
    }
    TrainOptions opts = base;
    opts.epochs = epochs;
    opts.seed = node_seed(base.seed, round, node.node_id);
    try {
        const TrainReport rep = train(node.model, node.optimizer, local, opts);
        node.loss_trace.insert(node.loss_trace.end(), rep.epoch_loss.begin(),
                               rep.epoch_loss.end());
    } catch (const TrainingError &e) {
        throw TrainingError("node " + std::to_string(node.node_id) + ", round " +
                            std::to_string(round + 1) + ": " + e.what());
    }
}

std::vector<double> fedavg(std::span<const std::vector<double>> snapshots,
                           std::span<const double> weights) {
    if (snapshots.empty()) {
        throw AggregationError("no snapshots to aggregate");
    }
    if (weights.size() != snapshots.size()) {
        throw AggregationError("got " + std::to_string(weights.size()) +
                               " weights for " + std::to_string(snapshots.size()) +
                               " snapshots");
    }
    const std::size_t dim = snapshots.front().size();
    double total = 0.0;
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        if (snapshots[k].size() != dim) {
            throw AggregationError("snapshot " + std::to_string(k) + " has " +
                                   std::to_string(snapshots[k].size()) +
                                   " parameters, expected " + std::to_string(dim));
        }
        if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) {
            throw AggregationError("aggregation weights must be finite and >= 0");
        }
        total += weights[k];
    }
    if (!(total > 0.0)) {
        throw AggregationError("at least one aggregation weight must be positive");
    }

    // Accumulate in a canonical order (by weight, then contents) as offsets
    // from the first snapshot. Reordering the inputs then cannot change a
    // single bit, and identical snapshots come back exactly.
    std::vector<std::size_t> order(snapshots.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (weights[a] != weights[b]) {
            return weights[a] < weights[b];
        }
        return snapshots[a] < snapshots[b];
    });
    total = 0.0;
    for (std::size_t k : order) {
        total += weights[k];
    }
    const std::vector<double> &ref = snapshots[order.front()];
    std::vector<double> out = ref;
    for (std::size_t k : order) {
        const double w = weights[k] / total;
        for (std::size_t i = 0; i < dim; ++i) {
            out[i] += w * (snapshots[k][i] - ref[i]);
        }
    }
    return out;
}

std::string round_metrics_csv_header() {
    return "round,node_count,model_kind,train_loss,test_auc,test_accuracy,"
           "wall_time_s";
}

std::string to_csv_row(const RoundMetrics &m) {
    std::ostringstream os;
    os.precision(17);
    os << m.round << ',' << m.node_count << ',' << to_string(m.model_kind) << ','
       << m.train_loss << ',' << m.test_auc << ',' << m.test_accuracy << ','
       << m.wall_time_s;
    return os.str();
}

FederationResult run_federation(const FedConfig &config, AnyModel initial,
                                std::span<const LabeledSequence> train,
                                std::span<const LabeledSequence> test,
                                const TrainOptions &options,
                                const std::function<void(const RoundMetrics &)> &on_round) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    const auto shards = partition_iid(train.size(), config.n_nodes, config.seed);

    FederationResult result{std::move(initial), {}, {}};
    for (const auto &s : shards) {
        result.shard_sizes.push_back(s.size());
    }
    std::vector<double> weights(config.n_nodes, 1.0);
    if (config.aggregation == Aggregation::SampleWeighted) {
        for (std::size_t k = 0; k < config.n_nodes; ++k) {
            weights[k] = static_cast<double>(shards[k].size());
        }
    }

    // Nodes share the worker budget; the inner loop gets the remainder.
    const std::size_t node_workers = std::min(options.workers, config.n_nodes);
    TrainOptions inner = options;
    inner.seed = config.seed;
    inner.workers = std::max<std::size_t>(1, options.workers / std::max<std::size_t>(1, node_workers));

    for (std::size_t round = 0; round < config.global_rounds; ++round) {
        // The wire boundary: nodes receive a flat snapshot, never the
        // server's model object.
        const std::vector<double> broadcast = get_params(result.global);
        std::vector<NodeState> nodes(config.n_nodes);
        for (std::size_t k = 0; k < config.n_nodes; ++k) {
            nodes[k].node_id = k;
            nodes[k].shard = shards[k];
            nodes[k].model = result.global;
            set_params(nodes[k].model, broadcast);
            nodes[k].optimizer = AdamState(broadcast.size(), options.adam);
        }

        parallel_for(config.n_nodes, node_workers, [&](std::size_t k) {
            local_train(nodes[k], train, config.local_epochs, inner, round);
        });

        std::vector<std::vector<double>> snapshots;
        snapshots.reserve(config.n_nodes);
        double loss = 0.0;
        double wsum = 0.0;
        for (const auto &node : nodes) {
            snapshots.push_back(get_params(node.model));
            const double w = static_cast<double>(node.shard.size());
            loss += w * node.loss_trace.back();
            wsum += w;
        }
        set_params(result.global, fedavg(snapshots, weights));

        const Evaluation ev = evaluate(result.global, test, options.workers);
        RoundMetrics m;
        m.round = round + 1;
        m.node_count = config.n_nodes;
        m.model_kind = kind_of(result.global);
        m.train_loss = loss / wsum;
        m.test_auc = ev.auc;
        m.test_accuracy = ev.accuracy;
        m.test_loss = ev.loss;
        m.wall_time_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - started)
                            .count();
        result.rounds.push_back(m);
        if (on_round) {
            on_round(m);
        }
    }
    return result;
}

} // namespace qfl

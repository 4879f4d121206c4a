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
#include "qfl/app/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include "qfl/app/checkpoint.hpp"
#include "qfl/error.hpp"

namespace qfl::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

CsvOptions csv_options(const RunConfig &c) {
    CsvOptions o;
    o.has_header = c.has_header;
    o.max_rows = c.max_rows;
    o.sampling = c.sampling;
    o.sample_seed = c.seed;
    return o;
}

std::string csv_real(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

json config_json(const RunConfig &c) {
    json j = json::object();
    for (const auto &[k, v] : c.items()) {
        j[k] = v;
    }
    return j;
}

json normalization_json(const Normalization &n) {
    return {{"mode", to_string(n.mode)},
            {"features", n.feature_names},
            {"a", n.a},
            {"b", n.b},
            {"constant_features", n.constant_features}};
}

void log_line(const RunOptions &o, const std::string &line) {
    if (o.log != nullptr) {
        *o.log << line << '\n' << std::flush;
    }
}

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

RunManifest start_manifest(const std::string &command, const ResolvedConfig &resolved,
                           const fs::path &data_path, const PreparedData &data,
                           const AnyModel &model, std::size_t workers) {
    RunManifest m;
    m.command = command;
    m.config = resolved.config;
    m.config_hash = config_hash(resolved.config);
    m.notes = resolved.notes;
    m.data_path = data_path.string();
    m.dataset_fingerprint = data.dataset_fingerprint;
    m.rows = data.rows;
    m.train_size = data.train.size();
    m.test_size = data.test.size();
    m.feature_names = data.feature_names;
    m.normalization = data.normalization;
    m.parameter_count = param_count(model);
    m.parameter_counts = parameter_counts(resolved.config);
    m.workers = workers;
    return m;
}

/// Final evaluation plus the artifacts every run writes.
void finish_run(RunManifest &m, const AnyModel &model, const PreparedData &data,
                const fs::path &out_dir, const RunOptions &options,
                Clock::time_point started) {
    const Evaluation ev = evaluate(model, data.test, options.workers);
    m.final_auc = ev.auc;
    m.final_accuracy = ev.accuracy;
    m.final_loss = ev.loss;

    std::vector<int> labels;
    labels.reserve(data.test.size());
    for (const auto &s : data.test) {
        labels.push_back(s.label);
    }
    write_file_atomic(out_dir / "roc.csv", roc_to_csv(roc_curve(ev.scores, labels)));

    Checkpoint ck{m.config, data.feature_names, data.normalization,
                  data.dataset_fingerprint, model};
    save_checkpoint(out_dir / "model.qflckpt", ck);

    m.artifacts = {{"checkpoint", "model.qflckpt"},
                   {"roc", "roc.csv"},
                   {"metrics", "metrics.csv"},
                   {"manifest", "manifest.json"}};
    m.wall_time_s = seconds_since(started);
    write_file_atomic(out_dir / "manifest.json", to_json(m).dump(2) + "\n");
    log_line(options, "[" + m.command + "] final test_auc=" + fmt(m.final_auc) +
                          " test_accuracy=" + fmt(m.final_accuracy) + " (" +
                          fmt(m.wall_time_s, 1) + " s)");
}

std::string epoch_csv(const std::vector<EpochRecord> &rows) {
    std::string out = "epoch,train_loss,test_auc,test_accuracy,test_loss,wall_time_s\n";
    for (const auto &r : rows) {
        out += std::to_string(r.epoch) + "," + csv_real(r.train_loss) + "," +
               csv_real(r.test_auc) + "," + csv_real(r.test_accuracy) + "," +
               csv_real(r.test_loss) + "," + csv_real(r.wall_time_s) + "\n";
    }
    return out;
}

std::string round_csv(const std::vector<RoundMetrics> &rows) {
    std::string out = round_metrics_csv_header() + "\n";
    for (const auto &r : rows) {
        out += to_csv_row(r) + "\n";
    }
    return out;
}

} // namespace

PreparedData prepare_data(const RunConfig &config, const fs::path &data_path) {
    const Dataset raw = load_csv(data_path, csv_options(config));
    if (raw.size() < 2) {
        throw DataError("'" + data_path.string() + "' has " + std::to_string(raw.size()) +
                        " usable rows; at least 2 are needed for a train/test split");
    }
    PreparedData out;
    out.dataset_fingerprint = fingerprint(raw);
    out.rows = raw.size();
    const Dataset selected = select_features(raw, config.feature_subset);
    out.feature_names = selected.feature_names;
    auto [train, test] = split(selected, config.split_ratio, config.seed);
    if (train.size() == 0 || test.size() == 0) {
        throw DataError("split_ratio " + csv_real(config.split_ratio) + " on " +
                        std::to_string(raw.size()) + " rows leaves an empty split");
    }
    NormalizedSplit norm = normalize_fit_transform(train, test, config.normalization);
    out.normalization = std::move(norm.metadata);
    out.train = make_sequences(norm.train, config.window);
    out.test = make_sequences(norm.test, config.window);
    return out;
}

json to_json(const RunManifest &m) {
    json epochs = json::array();
    for (const auto &e : m.epochs) {
        epochs.push_back({{"epoch", e.epoch},
                          {"train_loss", e.train_loss},
                          {"test_auc", e.test_auc},
                          {"test_accuracy", e.test_accuracy},
                          {"test_loss", e.test_loss},
                          {"wall_time_s", e.wall_time_s}});
    }
    json rounds = json::array();
    for (const auto &r : m.rounds) {
        rounds.push_back({{"round", r.round},
                          {"node_count", r.node_count},
                          {"model_kind", to_string(r.model_kind)},
                          {"train_loss", r.train_loss},
                          {"test_auc", r.test_auc},
                          {"test_accuracy", r.test_accuracy},
                          {"test_loss", r.test_loss},
                          {"wall_time_s", r.wall_time_s}});
    }
    return {{"format", "qfl-manifest/1"},
            {"command", m.command},
            {"config_hash", m.config_hash},
            {"config", config_json(m.config)},
            {"seed", m.config.seed},
            {"notes", m.notes},
            {"dataset",
             {{"path", m.data_path},
              {"fingerprint", m.dataset_fingerprint},
              {"rows", m.rows},
              {"train_size", m.train_size},
              {"test_size", m.test_size},
              {"features", m.feature_names}}},
            {"normalization", normalization_json(m.normalization)},
            {"parameter_count", m.parameter_count},
            {"parameter_counts", m.parameter_counts},
            {"epochs", epochs},
            {"rounds", rounds},
            {"shard_sizes", m.shard_sizes},
            {"final", {{"test_auc", m.final_auc},
                       {"test_accuracy", m.final_accuracy},
                       {"test_loss", m.final_loss}}},
            {"wall_time_s", m.wall_time_s},
            {"workers", m.workers},
            {"artifacts", m.artifacts}};
}

RunConfig config_from_manifest(const fs::path &manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) {
        throw IoError("cannot open manifest '" + manifest_path.string() + "'");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        throw FormatError(manifest_path.string() + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) {
        throw FormatError(manifest_path.string() + ": no config object");
    }
    RunConfig c;
    for (const auto &[k, v] : j["config"].items()) {
        c.set(k, v.get<std::string>());
    }
    return c;
}

std::map<std::string, std::size_t> parameter_counts(const RunConfig &resolved) {
    std::map<std::string, std::size_t> out;
    for (auto kind : {ModelKind::Qlstm, ModelKind::Lstm, ModelKind::Vqc}) {
        RunConfig c = resolved;
        c.model_kind = kind;
        out[std::string(to_string(kind))] = param_count(make_zero_model(c.model_config()));
    }
    return out;
}

RunManifest cmd_train(const RunConfig &config, const fs::path &data_path,
                      const fs::path &out_dir, const RunOptions &options) {
    const ResolvedConfig resolved = resolve(config);
    const RunConfig &c = resolved.config;
    const auto started = Clock::now();
    const PreparedData data = prepare_data(c, data_path);

    AnyModel model = make_model(c.model_config(), c.seed);
    RunManifest m = start_manifest("train", resolved, data_path, data, model, options.workers);
    for (const auto &note : m.notes) {
        log_line(options, "[train] note: " + note);
    }
    log_line(options, "[train] " + std::string(to_string(c.model_kind)) + " with " +
                          std::to_string(m.parameter_count) + " parameters, " +
                          std::to_string(data.train.size()) + " train / " +
                          std::to_string(data.test.size()) + " test");

    AdamState adam(param_count(model), AdamConfig{c.lr});
    const TrainOptions opts = c.train_options(options.workers);
    train(model, adam, data.train, opts,
          [&](std::size_t epoch, double loss, const AnyModel &current) {
              const Evaluation ev = evaluate(current, data.test, options.workers);
              m.epochs.push_back({epoch + 1, loss, ev.auc, ev.accuracy, ev.loss,
                                  seconds_since(started)});
              write_file_atomic(out_dir / "metrics.csv", epoch_csv(m.epochs));
              log_line(options, "[train] epoch " + std::to_string(epoch + 1) + "/" +
                                    std::to_string(c.epochs) + " loss=" + fmt(loss) +
                                    " test_auc=" + fmt(ev.auc) +
                                    " test_accuracy=" + fmt(ev.accuracy));
          });
    if (m.epochs.empty()) {
        write_file_atomic(out_dir / "metrics.csv", epoch_csv(m.epochs));
    }
    finish_run(m, model, data, out_dir, options, started);
    return m;
}

RunManifest cmd_federate(const RunConfig &config, const fs::path &data_path,
                         const fs::path &out_dir, const RunOptions &options) {
    const ResolvedConfig resolved = resolve(config);
    const RunConfig &c = resolved.config;
    const auto started = Clock::now();
    const PreparedData data = prepare_data(c, data_path);
    const FedConfig fc = c.fed_config();
    if (fc.n_nodes > data.train.size()) {
        throw ConfigError("n_nodes " + std::to_string(fc.n_nodes) + " exceeds the " +
                          std::to_string(data.train.size()) + " training sequences");
    }

    AnyModel initial = make_model(c.model_config(), c.seed);
    RunManifest m =
        start_manifest("federate", resolved, data_path, data, initial, options.workers);
    for (const auto &note : m.notes) {
        log_line(options, "[federate] note: " + note);
    }
    log_line(options, "[federate] " + std::to_string(fc.n_nodes) + " nodes, " +
                          std::to_string(fc.global_rounds) + " rounds x " +
                          std::to_string(fc.local_epochs) + " local epochs, " +
                          std::to_string(m.parameter_count) + " parameters");

    const FederationResult fed = run_federation(
        fc, std::move(initial), data.train, data.test, c.train_options(options.workers),
        [&](const RoundMetrics &r) {
            m.rounds.push_back(r);
            write_file_atomic(out_dir / "metrics.csv", round_csv(m.rounds));
            log_line(options, "[federate] round " + std::to_string(r.round) + "/" +
                                  std::to_string(fc.global_rounds) +
                                  " train_loss=" + fmt(r.train_loss) +
                                  " test_auc=" + fmt(r.test_auc) +
                                  " test_accuracy=" + fmt(r.test_accuracy));
        });
    m.shard_sizes = fed.shard_sizes;
    finish_run(m, fed.global, data, out_dir, options, started);
    return m;
}

EvalReport cmd_evaluate(const fs::path &checkpoint, const fs::path &data_path,
                        std::optional<FeatureSubset> feature_subset,
                        const std::optional<fs::path> &out_dir, const RunOptions &options) {
    const Checkpoint ck = load_checkpoint(checkpoint);
    RunConfig c = ck.config;
    const FeatureSubset recorded = c.feature_subset;
    if (feature_subset) {
        c.feature_subset = *feature_subset;
    }
    const std::size_t want = input_dim(ck.model);
    const std::size_t have = subset_columns(c.feature_subset).size();
    if (have != want) {
        throw ShapeError("checkpoint model expects " + std::to_string(want) +
                         " input features (feature subset " +
                         std::string(to_string(recorded)) + ") but feature subset " +
                         std::string(to_string(c.feature_subset)) + " provides " +
                         std::to_string(have));
    }

    const Dataset raw = load_csv(data_path, csv_options(c));
    if (fingerprint(raw) != ck.dataset_fingerprint) {
        log_line(options, "[evaluate] warning: dataset fingerprint differs from the "
                          "training data; scoring the split it induces");
    }
    const Dataset selected = select_features(raw, c.feature_subset);
    const auto [train, test] = split(selected, c.split_ratio, c.seed);
    (void)train;
    const Dataset normed = apply_normalization(test, ck.normalization);
    const auto sequences = make_sequences(normed, c.window);

    const Evaluation ev = evaluate(ck.model, sequences, options.workers);
    EvalReport rep{ev.auc, ev.accuracy, ev.loss, sequences.size(), {}};
    std::vector<int> labels;
    for (const auto &s : sequences) {
        labels.push_back(s.label);
    }
    rep.roc = roc_curve(ev.scores, labels);
    if (out_dir) {
        write_file_atomic(*out_dir / "evaluation.csv",
                          "test_auc,test_accuracy,test_loss,samples\n" + csv_real(rep.auc) +
                              "," + csv_real(rep.accuracy) + "," + csv_real(rep.loss) +
                              "," + std::to_string(rep.samples) + "\n");
        write_file_atomic(*out_dir / "evaluation_roc.csv", roc_to_csv(rep.roc));
    }
    return rep;
}

double sample_mean(const std::vector<double> &v) {
    if (v.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double> &v) {
    if (v.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double mean = sample_mean(v);
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

RepeatSummary run_repeats(const std::string &command, const RunConfig &config,
                          const fs::path &data_path, const fs::path &out_dir,
                          std::size_t repeats, const RunOptions &options) {
    if (repeats == 0) {
        throw ConfigError("repeats must be positive");
    }
    if (command != "train" && command != "federate") {
        throw ConfigError("repeats apply to train or federate, not '" + command + "'");
    }
    resolve(config);
    RepeatSummary s;
    for (std::size_t k = 0; k < repeats; ++k) {
        RunConfig c = config;
        c.seed = config.seed + k;
        const fs::path dir = out_dir / ("repeat-" + std::to_string(k + 1));
        log_line(options, "[repeats] run " + std::to_string(k + 1) + "/" +
                              std::to_string(repeats) + " seed " + std::to_string(c.seed));
        const RunManifest m = command == "train" ? cmd_train(c, data_path, dir, options)
                                                 : cmd_federate(c, data_path, dir, options);
        s.seeds.push_back(c.seed);
        s.auc.push_back(m.final_auc);
        s.accuracy.push_back(m.final_accuracy);
    }
    s.auc_mean = sample_mean(s.auc);
    s.auc_std = sample_std(s.auc);
    s.accuracy_mean = sample_mean(s.accuracy);
    s.accuracy_std = sample_std(s.accuracy);

    const json j{{"command", command},
                 {"repeats", repeats},
                 {"seeds", s.seeds},
                 {"test_auc", s.auc},
                 {"test_accuracy", s.accuracy},
                 {"test_auc_mean", s.auc_mean},
                 {"test_auc_std", s.auc_std},
                 {"test_accuracy_mean", s.accuracy_mean},
                 {"test_accuracy_std", s.accuracy_std},
                 {"std_definition", "sample standard deviation (n - 1)"}};
    write_file_atomic(out_dir / "repeats.json", j.dump(2) + "\n");
    log_line(options, "[repeats] test_auc " + fmt(s.auc_mean) + " +/- " + fmt(s.auc_std) +
                          ", test_accuracy " + fmt(s.accuracy_mean) + " +/- " +
                          fmt(s.accuracy_std) + " (sample std, n=" +
                          std::to_string(repeats) + ")");
    return s;
}

std::vector<RunManifest> sweep_nodes(const RunConfig &config, const fs::path &data_path,
                                     const fs::path &out_dir,
                                     const std::vector<std::size_t> &node_counts,
                                     const RunOptions &options) {
    if (node_counts.empty()) {
        throw ConfigError("sweep-nodes needs at least one node count");
    }
    for (std::size_t n : node_counts) {
        RunConfig c = config;
        c.n_nodes = n;
        resolve(c);
    }
    std::vector<RunManifest> out;
    std::string csv = "node_count,test_auc,test_accuracy,test_loss,wall_time_s,manifest\n";
    for (std::size_t n : node_counts) {
        RunConfig c = config;
        c.n_nodes = n;
        const std::string name = "nodes-" + std::to_string(n);
        out.push_back(cmd_federate(c, data_path, out_dir / name, options));
        const auto &m = out.back();
        csv += std::to_string(n) + "," + csv_real(m.final_auc) + "," +
               csv_real(m.final_accuracy) + "," + csv_real(m.final_loss) + "," +
               csv_real(m.wall_time_s) + "," + name + "/manifest.json\n";
        write_file_atomic(out_dir / "sweep.csv", csv);
    }
    return out;
}

} // namespace qfl::app

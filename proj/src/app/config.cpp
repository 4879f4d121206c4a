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
#include "qfl/app/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qfl/error.hpp"

namespace qfl::app {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string bad_value(std::string_view key, std::string_view value,
                      std::string_view expected) {
    return "invalid value '" + std::string(value) + "' for " + std::string(key) +
           " (expected " + std::string(expected) + ")";
}

template <class T>
T parse_unsigned(std::string_view key, std::string_view value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
        throw ConfigError(bad_value(key, value, "a non-negative integer"));
    }
    return out;
}

double parse_real(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
        throw ConfigError(bad_value(key, value, "a real number"));
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    throw ConfigError(bad_value(key, value, "true or false"));
}

std::string real_text(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string_view to_string(Sampling s) { return s == Sampling::Head ? "head" : "random"; }

Sampling parse_sampling(std::string_view s) {
    if (s == "head") {
        return Sampling::Head;
    }
    if (s == "random") {
        return Sampling::Random;
    }
    throw ConfigError(bad_value("sampling", s, "head or random"));
}

} // namespace

const std::vector<std::string_view> &config_keys() {
    static const std::vector<std::string_view> keys{
        "model_kind",    "feature_subset", "n_qubits",        "n_layers",
        "hidden_dim",    "epochs",         "lr",              "batch_size",
        "seed",          "window",         "recurrent_input", "gate_activation",
        "output_head_source", "encoding",  "entangler",       "normalization",
        "max_rows",      "sampling",       "has_header",      "split_ratio",
        "n_nodes",       "global_rounds",  "local_epochs",    "aggregation"};
    return keys;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
    const std::string_view value = trim(raw);
    if (key == "model_kind") {
        model_kind = parse_model_kind(value);
    } else if (key == "feature_subset") {
        feature_subset = parse_feature_subset(value);
    } else if (key == "n_qubits") {
        n_qubits = parse_unsigned<std::size_t>(key, value);
    } else if (key == "n_layers") {
        n_layers = parse_unsigned<std::size_t>(key, value);
    } else if (key == "hidden_dim") {
        hidden_dim = parse_unsigned<std::size_t>(key, value);
    } else if (key == "epochs") {
        epochs = parse_unsigned<std::size_t>(key, value);
    } else if (key == "lr") {
        lr = parse_real(key, value);
    } else if (key == "batch_size") {
        batch_size = parse_unsigned<std::size_t>(key, value);
    } else if (key == "seed") {
        seed = parse_unsigned<std::uint64_t>(key, value);
    } else if (key == "window") {
        window = parse_unsigned<std::size_t>(key, value);
    } else if (key == "recurrent_input") {
        recurrent_input = parse_recurrent_input(value);
    } else if (key == "gate_activation") {
        gate_activation = parse_bool(key, value);
    } else if (key == "output_head_source") {
        output_head_source = parse_output_source(value);
    } else if (key == "encoding") {
        encoding = parse_encoding(value);
    } else if (key == "entangler") {
        entangler = parse_entangler(value);
    } else if (key == "normalization") {
        normalization = parse_norm_mode(value);
    } else if (key == "max_rows") {
        max_rows = parse_unsigned<std::size_t>(key, value);
    } else if (key == "sampling") {
        sampling = parse_sampling(value);
    } else if (key == "has_header") {
        has_header = parse_bool(key, value);
    } else if (key == "split_ratio") {
        split_ratio = parse_real(key, value);
    } else if (key == "n_nodes") {
        n_nodes = parse_unsigned<std::size_t>(key, value);
    } else if (key == "global_rounds") {
        global_rounds = parse_unsigned<std::size_t>(key, value);
    } else if (key == "local_epochs") {
        local_epochs = parse_unsigned<std::size_t>(key, value);
    } else if (key == "aggregation") {
        aggregation = parse_aggregation(value);
    } else {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::items() const {
    std::vector<std::pair<std::string, std::string>> out;
    auto add = [&](std::string_view k, std::string v) { out.emplace_back(k, std::move(v)); };
    add("model_kind", std::string(to_string(model_kind)));
    add("feature_subset", std::string(to_string(feature_subset)));
    add("n_qubits", std::to_string(n_qubits));
    if (n_layers) {
        add("n_layers", std::to_string(*n_layers));
    }
    add("hidden_dim", std::to_string(hidden_dim));
    add("epochs", std::to_string(epochs));
    add("lr", real_text(lr));
    add("batch_size", std::to_string(batch_size));
    add("seed", std::to_string(seed));
    add("window", std::to_string(window));
    add("recurrent_input", std::string(to_string(recurrent_input)));
    add("gate_activation", gate_activation ? "true" : "false");
    add("output_head_source", std::string(to_string(output_head_source)));
    add("encoding", std::string(to_string(encoding)));
    add("entangler", std::string(to_string(entangler)));
    add("normalization", std::string(to_string(normalization)));
    add("max_rows", std::to_string(max_rows));
    add("sampling", std::string(to_string(sampling)));
    add("has_header", has_header ? "true" : "false");
    add("split_ratio", real_text(split_ratio));
    add("n_nodes", std::to_string(n_nodes));
    add("global_rounds", std::to_string(global_rounds));
    if (local_epochs) {
        add("local_epochs", std::to_string(*local_epochs));
    }
    add("aggregation", std::string(to_string(aggregation)));
    return out;
}

void RunConfig::validate() const {
    auto positive = [](std::size_t v, const char *name) {
        if (v == 0) {
            throw ConfigError(std::string(name) + " must be positive");
        }
    };
    positive(n_qubits, "n_qubits");
    if (n_layers) {
        positive(*n_layers, "n_layers");
    }
    positive(hidden_dim, "hidden_dim");
    positive(batch_size, "batch_size");
    positive(window, "window");
    positive(n_nodes, "n_nodes");
    positive(global_rounds, "global_rounds");
    if (local_epochs) {
        positive(*local_epochs, "local_epochs");
    }
    if (!(lr > 0.0) || !std::isfinite(lr)) {
        throw ConfigError("lr must be a positive finite number");
    }
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        throw ConfigError("split_ratio must lie in (0, 1)");
    }
    if (encoding == Encoding::Amplitude && model_kind != ModelKind::Lstm) {
        throw ConfigError("amplitude encoding is not supported for trainable "
                          "quantum models (no feature gradient)");
    }
    model_config().cell.validate();
}

ModelConfig RunConfig::model_config() const {
    ModelConfig mc;
    mc.kind = model_kind;
    mc.cell.input_dim = subset_columns(feature_subset).size();
    mc.cell.hidden_dim = hidden_dim;
    mc.cell.spec = VqcSpec{n_qubits, n_layers.value_or(4), encoding, entangler};
    mc.cell.recurrent_input = recurrent_input;
    mc.cell.gate_activation = gate_activation;
    mc.cell.output_source = output_head_source;
    return mc;
}

FedConfig RunConfig::fed_config() const {
    FedConfig fc;
    fc.n_nodes = n_nodes;
    fc.global_rounds = global_rounds;
    fc.local_epochs = local_epochs.value_or(epochs);
    fc.aggregation = aggregation;
    fc.seed = seed;
    return fc;
}

TrainOptions RunConfig::train_options(std::size_t workers) const {
    TrainOptions o;
    o.epochs = epochs;
    o.batch_size = batch_size;
    o.adam.lr = lr;
    o.seed = node_seed(seed, 0, 0);
    o.workers = workers;
    return o;
}

RunConfig parse_config(std::string_view text, std::string_view source, RunConfig base) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        try {
            base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError &e) {
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " +
                              e.what());
        }
    }
    return base;
}

RunConfig load_config(const std::filesystem::path &path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string(), std::move(base));
}

void apply_overrides(RunConfig &config,
                     const std::map<std::string, std::string> &overrides) {
    for (const auto &[k, v] : overrides) {
        config.set(k, v);
    }
}

ResolvedConfig resolve(const RunConfig &config) {
    config.validate();
    ResolvedConfig out{config, {}};
    RunConfig &c = out.config;
    if (!c.n_layers) {
        std::size_t layers = 4;
        if (c.model_kind == ModelKind::Qlstm) {
            auto count = [&](std::size_t l) {
                RunConfig probe = c;
                probe.n_layers = l;
                return param_count(make_zero_model(probe.model_config()));
            };
            const std::size_t at_default = count(layers);
            while (layers > 1 && count(layers) >= kParamBudget) {
                --layers;
            }
            if (layers != 4) {
                out.notes.push_back("n_layers resolved to " + std::to_string(layers) +
                                    ": the default of 4 gives " +
                                    std::to_string(at_default) + " parameters for " +
                                    std::string(to_string(c.feature_subset)) +
                                    ", budget is < " + std::to_string(kParamBudget) +
                                    " (now " + std::to_string(count(layers)) + ")");
            }
        }
        c.n_layers = layers;
    }
    if (!c.local_epochs) {
        c.local_epochs = c.epochs;
    }
    return out;
}

std::string to_text(const RunConfig &config) {
    std::string out;
    for (const auto &[k, v] : config.items()) {
        out += k + " = " + v + "\n";
    }
    return out;
}

std::string config_hash(const RunConfig &config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_text(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace qfl::app

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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "qfl/app/checkpoint.hpp"
#include "qfl/app/cli.hpp"
#include "qfl/app/commands.hpp"
#include "qfl/app/config.hpp"
#include "qfl/app/selftest.hpp"
#include "qfl/error.hpp"
#include "qfl/parallel.hpp"
#include "qfl/testing/synthetic.hpp"

using namespace qfl;
using namespace qfl::app;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

/// Scratch directory removed at scope exit.
struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("qfl-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

fs::path write_data(const TempDir &dir, std::size_t rows = 300, std::uint64_t seed = 2) {
    const fs::path p = dir.path / "data.csv";
    write_file_atomic(p, synthetic::to_csv(synthetic::susy_like(rows, seed)));
    return p;
}

RunConfig quick_config() {
    RunConfig c;
    c.epochs = 2;
    c.seed = 7;
    return c;
}

nlohmann::json read_json(const fs::path &p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

int cli(std::vector<std::string> args, std::string *out = nullptr,
        std::string *err = nullptr) {
    args.insert(args.begin(), "qfl");
    std::ostringstream o;
    std::ostringstream e;
    const int code = run_cli(args, o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

} // namespace

TEST_CASE("run configuration", "[cli][config]") {
    SECTION("defaults encode the reference setup") {
        const auto r = resolve(RunConfig{});
        CHECK(r.config.model_kind == ModelKind::Qlstm);
        CHECK(r.config.feature_subset == FeatureSubset::Low7);
        CHECK(r.config.n_qubits == 6);
        CHECK(r.config.n_layers == 4);
        CHECK(r.config.hidden_dim == 1);
        CHECK(r.config.epochs == 30);
        CHECK(r.config.lr == 0.01);
        CHECK(r.config.batch_size == 32);
        CHECK(r.config.global_rounds == 5);
        CHECK(r.config.local_epochs == 30);
        CHECK(r.notes.empty());
        CHECK(parameter_counts(r.config).at("qlstm") == 270);
    }
    SECTION("full18 default layer count is lowered under the budget") {
        RunConfig c;
        c.feature_subset = FeatureSubset::Full18;
        const auto r = resolve(c);
        CHECK(r.config.n_layers == 3);
        CHECK(parameter_counts(r.config).at("qlstm") == 288);
        REQUIRE(r.notes.size() == 1);
        CHECK_THAT(r.notes[0], ContainsSubstring("336"));
        c.n_layers = 4;
        CHECK(resolve(c).notes.empty());
        CHECK(parameter_counts(resolve(c).config).at("qlstm") == 336);
    }
    SECTION("file then overrides") {
        const auto c = parse_config("# comment\nmodel_kind = lstm\nepochs=5 # trailing\n\n"
                                    "gate_activation = false\n");
        CHECK(c.model_kind == ModelKind::Lstm);
        CHECK(c.epochs == 5);
        CHECK_FALSE(c.gate_activation);
        RunConfig d = c;
        apply_overrides(d, {{"epochs", "9"}});
        CHECK(d.epochs == 9);
    }
    SECTION("errors carry the line") {
        CHECK_THROWS_WITH(parse_config("epochs = 3\nmodel_kind = rnn\n", "run.cfg"),
                          ContainsSubstring("run.cfg:2"));
        CHECK_THROWS_WITH(parse_config("colour = blue\n"), ContainsSubstring("colour"));
        CHECK_THROWS_AS(parse_config("epochs 3\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("epochs = -1\n"), ConfigError);
        RunConfig c;
        c.split_ratio = 1.5;
        CHECK_THROWS_AS(resolve(c), ConfigError);
    }
    SECTION("canonical text round-trips and hashes") {
        RunConfig c = quick_config();
        c.lr = 0.003;
        const auto r = resolve(c).config;
        CHECK(to_text(parse_config(to_text(r))) == to_text(r));
        CHECK(config_hash(r) == config_hash(parse_config(to_text(r))));
        RunConfig other = r;
        other.seed += 1;
        CHECK(config_hash(other) != config_hash(r));
        CHECK(config_hash(r).size() == 16);
    }
}

TEST_CASE("checkpoint format", "[cli][checkpoint]") {
    TempDir dir;
    const auto cfg = resolve(quick_config()).config;
    Checkpoint ck{cfg, {"a", "b"}, {}, "0123456789abcdef", make_model(cfg.model_config(), 3)};
    ck.normalization.a = {0.5, -1.0};
    ck.normalization.b = {2.0, 1.0 / 3.0};
    const fs::path p = dir.path / "m.qflckpt";
    save_checkpoint(p, ck);
    CHECK_FALSE(fs::exists(dir.path / "m.qflckpt.tmp"));

    SECTION("round trip is exact") {
        const auto back = load_checkpoint(p);
        CHECK(get_params(back.model) == get_params(ck.model));
        CHECK(to_text(back.config) == to_text(cfg));
        CHECK(back.normalization.b == ck.normalization.b);
        CHECK(back.dataset_fingerprint == ck.dataset_fingerprint);
    }
    auto corrupt = [&](std::size_t offset, char value) {
        std::string bytes;
        {
            std::ifstream in(p, std::ios::binary);
            bytes.assign(std::istreambuf_iterator<char>(in), {});
        }
        bytes[offset] = value;
        write_file_atomic(p, bytes);
    };
    SECTION("bad magic") {
        corrupt(0, 'X');
        CHECK_THROWS_AS(load_checkpoint(p), FormatError);
    }
    SECTION("unsupported version") {
        corrupt(8, 9);
        CHECK_THROWS_WITH(load_checkpoint(p), ContainsSubstring("version 9"));
    }
    SECTION("truncated") {
        const auto size = fs::file_size(p);
        fs::resize_file(p, size - 5);
        CHECK_THROWS_WITH(load_checkpoint(p), ContainsSubstring("truncated"));
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_checkpoint(dir.path / "none.qflckpt"), IoError);
    }
}

TEST_CASE("train command", "[cli][train]") {
    TempDir dir;
    const auto data = write_data(dir);
    const RunOptions ro{};
    const auto m = cmd_train(quick_config(), data, dir.path / "a", ro);

    SECTION("manifest contents") {
        const auto j = read_json(dir.path / "a" / "manifest.json");
        CHECK(j["parameter_count"] == 270);
        CHECK(j["parameter_counts"]["qlstm"] == 270);
        CHECK(j["config_hash"] == m.config_hash);
        CHECK(j["config"]["n_layers"] == "4");
        CHECK(j["dataset"]["train_size"] == 240);
        CHECK(j["dataset"]["test_size"] == 60);
        CHECK(j["epochs"].size() == 2);
        CHECK(j["final"]["test_auc"].get<double>() == m.final_auc);
        CHECK(j["seed"] == 7);
        CHECK(fs::exists(dir.path / "a" / "model.qflckpt"));
        CHECK(fs::exists(dir.path / "a" / "roc.csv"));
        std::ifstream metrics(dir.path / "a" / "metrics.csv");
        std::string header;
        std::getline(metrics, header);
        CHECK(header == "epoch,train_loss,test_auc,test_accuracy,test_loss,wall_time_s");
    }
    SECTION("same seed gives identical metrics") {
        const auto again = cmd_train(quick_config(), data, dir.path / "b", ro);
        CHECK(again.final_auc == m.final_auc);
        CHECK(again.final_accuracy == m.final_accuracy);
        for (std::size_t e = 0; e < m.epochs.size(); ++e) {
            CHECK(again.epochs[e].train_loss == m.epochs[e].train_loss);
            CHECK(again.epochs[e].test_auc == m.epochs[e].test_auc);
        }
    }
    SECTION("manifest replays bitwise") {
        const auto cfg = config_from_manifest(dir.path / "a" / "manifest.json");
        const auto again = cmd_train(cfg, data, dir.path / "c", ro);
        CHECK(again.config_hash == m.config_hash);
        CHECK(again.final_auc == m.final_auc);
        CHECK(again.final_loss == m.final_loss);
    }
    SECTION("worker count does not change results") {
        RunOptions many;
        many.workers = 3;
        const auto par = cmd_train(quick_config(), data, dir.path / "d", many);
        CHECK(par.final_loss == m.final_loss);
    }
    SECTION("evaluate reproduces the final test metrics") {
        const auto r = cmd_evaluate(dir.path / "a" / "model.qflckpt", data, std::nullopt,
                                    dir.path / "a", ro);
        CHECK(r.auc == m.final_auc);
        CHECK(r.accuracy == m.final_accuracy);
        CHECK(r.loss == m.final_loss);
        CHECK(r.samples == 60);
        CHECK(fs::exists(dir.path / "a" / "evaluation.csv"));
    }
    SECTION("evaluate with the wrong feature subset") {
        CHECK_THROWS_WITH(cmd_evaluate(dir.path / "a" / "model.qflckpt", data,
                                       FeatureSubset::Full18, std::nullopt, ro),
                          ContainsSubstring("feature subset full18") &&
                              ContainsSubstring("low7"));
    }
    SECTION("config errors come before any data is read") {
        RunConfig bad = quick_config();
        bad.batch_size = 0;
        CHECK_THROWS_AS(cmd_train(bad, dir.path / "missing.csv", dir.path / "e", ro),
                        ConfigError);
        CHECK_THROWS_AS(cmd_train(quick_config(), dir.path / "missing.csv", dir.path / "e", ro),
                        IoError);
    }
}

TEST_CASE("federate command", "[cli][federate]") {
    TempDir dir;
    const auto data = write_data(dir);
    const RunOptions ro{};

    SECTION("one node for one round equals train") {
        RunConfig c = quick_config();
        c.n_nodes = 1;
        c.global_rounds = 1;
        const auto fed = cmd_federate(c, data, dir.path / "f", ro);
        const auto cen = cmd_train(c, data, dir.path / "t", ro);
        CHECK(fed.final_auc == cen.final_auc);
        CHECK(fed.final_accuracy == cen.final_accuracy);
        CHECK(fed.final_loss == cen.final_loss);
        CHECK(get_params(load_checkpoint(dir.path / "f" / "model.qflckpt").model) ==
              get_params(load_checkpoint(dir.path / "t" / "model.qflckpt").model));
    }
    SECTION("three nodes, five rounds") {
        RunConfig c = quick_config();
        c.epochs = 1;
        const auto fed = cmd_federate(c, data, dir.path / "f3", ro);
        CHECK(fed.rounds.size() == 5);
        CHECK(fed.shard_sizes == std::vector<std::size_t>{80, 80, 80});
        CHECK(fed.final_auc == fed.rounds.back().test_auc);
        std::ifstream in(dir.path / "f3" / "metrics.csv");
        std::string line;
        std::size_t lines = 0;
        while (std::getline(in, line)) ++lines;
        CHECK(lines == 6);

        const auto r = cmd_evaluate(dir.path / "f3" / "model.qflckpt", data, std::nullopt,
                                    std::nullopt, ro);
        CHECK(r.auc == fed.final_auc);
    }
}

TEST_CASE("repeats and node sweep", "[cli]") {
    TempDir dir;
    const auto data = write_data(dir, 200);
    RunConfig c = quick_config();
    c.epochs = 1;
    c.model_kind = ModelKind::Lstm;

    SECTION("repeats report mean and sample standard deviation") {
        const auto s = run_repeats("train", c, data, dir.path / "r", 3, RunOptions{});
        REQUIRE(s.auc.size() == 3);
        CHECK(s.seeds == std::vector<std::uint64_t>{7, 8, 9});
        const double mean = (s.auc[0] + s.auc[1] + s.auc[2]) / 3.0;
        double ss = 0.0;
        for (double a : s.auc) ss += (a - mean) * (a - mean);
        CHECK(s.auc_mean == Catch::Approx(mean).epsilon(1e-15));
        CHECK(s.auc_std == Catch::Approx(std::sqrt(ss / 2.0)).epsilon(1e-12));
        CHECK(fs::exists(dir.path / "r" / "repeats.json"));
        CHECK(fs::exists(dir.path / "r" / "repeat-3" / "manifest.json"));
    }
    SECTION("sweep writes one manifest per node count") {
        c.global_rounds = 1;
        const auto runs = sweep_nodes(c, data, dir.path / "s", {2, 3}, RunOptions{});
        REQUIRE(runs.size() == 2);
        CHECK(runs[1].config.n_nodes == 3);
        CHECK(fs::exists(dir.path / "s" / "nodes-2" / "manifest.json"));
        CHECK(fs::exists(dir.path / "s" / "nodes-3" / "manifest.json"));
        std::ifstream in(dir.path / "s" / "sweep.csv");
        std::string line;
        std::size_t lines = 0;
        while (std::getline(in, line)) ++lines;
        CHECK(lines == 3);
    }
}

TEST_CASE("command line", "[cli]") {
    TempDir dir;
    const auto data = write_data(dir, 200);
    std::string out;
    std::string err;

    SECTION("invalid model kind is a usage error") {
        CHECK(cli({"train", "--data", data.string(), "--out", (dir.path / "x").string(),
                   "--model-kind", "transformer"},
                  &out, &err) == kExitUsage);
        CHECK_THAT(err, ContainsSubstring("model_kind"));
        CHECK_FALSE(fs::exists(dir.path / "x" / "manifest.json"));
    }
    SECTION("missing required flag") {
        CHECK(cli({"train", "--out", "x"}, &out, &err) == kExitUsage);
        CHECK(cli({}, &out, &err) == kExitUsage);
    }
    SECTION("missing data file") {
        CHECK(cli({"train", "--data", (dir.path / "nope.csv").string(), "--out",
                   (dir.path / "x").string()},
                  &out, &err) == kExitIo);
    }
    SECTION("config file with flag overrides") {
        write_file_atomic(dir.path / "run.cfg", "model_kind = lstm\nepochs = 4\n");
        REQUIRE(cli({"train", "--data", data.string(), "--out", (dir.path / "o").string(),
                     "--config", (dir.path / "run.cfg").string(), "--epochs", "1"},
                    &out, &err) == kExitOk);
        const auto j = read_json(dir.path / "o" / "manifest.json");
        CHECK(j["config"]["model_kind"] == "lstm");
        CHECK(j["config"]["epochs"] == "1");
        CHECK_THAT(out, ContainsSubstring("test_auc="));
    }
    SECTION("selftest passes and reports per-module counts") {
        REQUIRE(cli({"selftest"}, &out, &err) == kExitOk);
        for (const char *module : {"statevector=", "vqc=", "nn=", "qlstm=", "metrics=",
                                   "federated=", "data="}) {
            CHECK_THAT(out, ContainsSubstring(module));
        }
    }
    SECTION("an injected gradient bug is a named failure") {
        CHECK(cli({"selftest", "--inject-fault", "gradient"}, &out, &err) == kExitFailure);
        CHECK_THAT(out, ContainsSubstring("FAIL vqc/parameter-shift-vs-finite-differences"));
        CHECK(cli({"selftest", "--inject-fault", "bptt"}, &out, &err) == kExitFailure);
        CHECK_THAT(out, ContainsSubstring("FAIL qlstm/bptt-vs-finite-differences"));
    }
    SECTION("selftest stays fast") {
        CHECK(run_selftest({}).wall_time_s < 60.0);
    }
}

TEST_CASE("worker count environment override", "[cli]") {
    ::setenv(kWorkersEnv, "3", 1);
    CHECK(default_workers() == 3);
    ::setenv(kWorkersEnv, "0", 1);
    CHECK(default_workers() >= 1);
    ::unsetenv(kWorkersEnv);
    CHECK(default_workers() >= 1);
}

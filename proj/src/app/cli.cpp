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
#include "qfl/app/cli.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "qfl/app/commands.hpp"
#include "qfl/app/config.hpp"
#include "qfl/app/selftest.hpp"
#include "qfl/error.hpp"
#include "qfl/parallel.hpp"

namespace qfl::app {

namespace {

std::string flag_name(std::string_view key) {
    std::string s(key);
    std::replace(s.begin(), s.end(), '_', '-');
    return "--" + s;
}

/// Shared by train, federate and sweep-nodes.
struct RunArgs {
    std::string data;
    std::string out;
    std::string config_file;
    std::string from_manifest;
    std::size_t repeats{1};
    std::map<std::string, std::string> overrides;
};

void add_run_options(CLI::App *cmd, RunArgs &a) {
    cmd->add_option("--data", a.data, "SUSY-format CSV (label first, 18 features)")
        ->required();
    cmd->add_option("--out", a.out, "output directory")->required();
    cmd->add_option("--config", a.config_file, "key = value config file");
    cmd->add_option("--from-manifest", a.from_manifest,
                    "re-run the config recorded in a manifest.json");
    for (auto key : config_keys()) {
        const std::string k(key);
        cmd->add_option_function<std::string>(
               flag_name(key), [&a, k](const std::string &v) { a.overrides[k] = v; },
               "overrides '" + k + "'")
            ->group("Run configuration");
    }
}

RunConfig build_config(const RunArgs &a) {
    RunConfig c;
    if (!a.from_manifest.empty()) {
        c = config_from_manifest(a.from_manifest);
    }
    if (!a.config_file.empty()) {
        c = load_config(a.config_file, c);
    }
    apply_overrides(c, a.overrides);
    return c;
}

void print_manifest_summary(const RunManifest &m, const std::string &out_dir,
                            std::ostream &out) {
    out << std::setprecision(6) << "test_auc=" << m.final_auc
        << " test_accuracy=" << m.final_accuracy << " parameters=" << m.parameter_count
        << " manifest=" << out_dir << "/manifest.json\n";
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Federated quantum LSTM experiments on SUSY-format data", "qfl"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "qfl 1.0.0");

    RunArgs train_args;
    auto *train_cmd = app.add_subcommand("train", "centralized training run");
    add_run_options(train_cmd, train_args);
    train_cmd->add_option("--repeats", train_args.repeats,
                          "independent runs with seeds seed, seed+1, ...")
        ->check(CLI::PositiveNumber);

    RunArgs fed_args;
    auto *fed_cmd = app.add_subcommand("federate", "federated training run");
    add_run_options(fed_cmd, fed_args);
    fed_cmd->add_option("--repeats", fed_args.repeats,
                        "independent runs with seeds seed, seed+1, ...")
        ->check(CLI::PositiveNumber);

    RunArgs sweep_args;
    std::vector<std::size_t> sweep_nodes_list{2, 3, 5, 10};
    auto *sweep_cmd =
        app.add_subcommand("sweep-nodes", "one federated run per node count");
    add_run_options(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--nodes", sweep_nodes_list, "node counts")->delimiter(',');

    std::string eval_ckpt;
    std::string eval_data;
    std::string eval_out;
    std::string eval_subset;
    auto *eval_cmd = app.add_subcommand("evaluate", "score a checkpoint on its test split");
    eval_cmd->add_option("--checkpoint", eval_ckpt, "model.qflckpt")->required();
    eval_cmd->add_option("--data", eval_data, "SUSY-format CSV")->required();
    eval_cmd->add_option("--out", eval_out, "directory for evaluation CSVs");
    eval_cmd->add_option("--feature-subset", eval_subset, "override the recorded subset");

    SelftestOptions st_opts;
    auto *st_cmd = app.add_subcommand("selftest", "fast oracle suite");
    st_cmd->add_option("--seed", st_opts.seed, "seed for the random instances");
    st_cmd->add_option("--inject-fault", st_opts.inject_fault)
        ->check(CLI::IsMember(fault_names()))
        ->group("");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) {
        rev.pop_back();
    }
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion &e) {
        out << e.what() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "qfl: " << e.what() << '\n';
        if (auto *sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front()) {
            err << "run '" << sub->get_name() << " --help' for usage\n";
        }
        return kExitUsage;
    }

    RunOptions ro;
    ro.workers = default_workers();
    ro.log = &err;

    try {
        if (train_cmd->parsed() || fed_cmd->parsed()) {
            const bool is_train = train_cmd->parsed();
            const RunArgs &a = is_train ? train_args : fed_args;
            const RunConfig c = build_config(a);
            if (a.repeats > 1) {
                const auto s = run_repeats(is_train ? "train" : "federate", c, a.data, a.out,
                                           a.repeats, ro);
                out << std::setprecision(6) << "test_auc=" << s.auc_mean << " +/- "
                    << s.auc_std << " test_accuracy=" << s.accuracy_mean << " +/- "
                    << s.accuracy_std << " (sample std over " << a.repeats
                    << " runs) summary=" << a.out << "/repeats.json\n";
                return kExitOk;
            }
            const RunManifest m = is_train ? cmd_train(c, a.data, a.out, ro)
                                           : cmd_federate(c, a.data, a.out, ro);
            print_manifest_summary(m, a.out, out);
            return kExitOk;
        }
        if (sweep_cmd->parsed()) {
            const RunConfig c = build_config(sweep_args);
            const auto runs = sweep_nodes(c, sweep_args.data, sweep_args.out,
                                          sweep_nodes_list, ro);
            for (const auto &m : runs) {
                out << "n_nodes=" << m.config.n_nodes << ' ';
                print_manifest_summary(m, sweep_args.out + "/nodes-" +
                                              std::to_string(m.config.n_nodes),
                                       out);
            }
            return kExitOk;
        }
        if (eval_cmd->parsed()) {
            std::optional<FeatureSubset> subset;
            if (!eval_subset.empty()) {
                subset = parse_feature_subset(eval_subset);
            }
            std::optional<std::filesystem::path> dir;
            if (!eval_out.empty()) {
                dir = eval_out;
            }
            const EvalReport r = cmd_evaluate(eval_ckpt, eval_data, subset, dir, ro);
            out << std::setprecision(17) << "test_auc=" << r.auc
                << " test_accuracy=" << r.accuracy << " test_loss=" << r.loss
                << " samples=" << r.samples << '\n';
            return kExitOk;
        }
        if (st_cmd->parsed()) {
            const SelftestReport rep = run_selftest(st_opts);
            print_report(rep, out);
            return rep.passed() ? kExitOk : kExitFailure;
        }
    } catch (const ConfigError &e) {
        err << "qfl: configuration error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError &e) {
        err << "qfl: I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error &e) {
        err << "qfl: error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::filesystem::filesystem_error &e) {
        err << "qfl: I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}

} // namespace qfl::app

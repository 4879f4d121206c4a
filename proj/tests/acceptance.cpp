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
// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion.
//
//   qfl-acceptance                 criteria 1-5 (exact oracles, seconds)
//   qfl-acceptance --desk-scale    criteria 6-7 on a SUSY CSV (minutes)
//   qfl-acceptance --full-scale    criterion 8 (hours, not gating)
//
// The SUSY file is taken from --data or the QFL_SUSY_CSV environment
// variable. Without it the data-dependent modes exit with code 77.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfl/app/commands.hpp"
#include "qfl/app/config.hpp"
#include "qfl/data.hpp"
#include "qfl/federated.hpp"
#include "qfl/metrics.hpp"
#include "qfl/model.hpp"
#include "qfl/nn.hpp"
#include "qfl/parallel.hpp"
#include "qfl/qlstm.hpp"
#include "qfl/random.hpp"
#include "qfl/statevector.hpp"
#include "qfl/testing/oracles.hpp"
#include "qfl/testing/synthetic.hpp"
#include "qfl/vqc.hpp"

namespace fs = std::filesystem;
using namespace qfl;

namespace {

constexpr double pi = std::numbers::pi;
constexpr int kSkipped = 77;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << v;
    return os.str();
}

std::string fix(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

struct Tally {
    int passed{0};
    int failed{0};
    int skipped{0};

    void report(const std::string &id, bool ok, const std::string &detail) {
        std::cout << (ok ? "PASS " : "FAIL ") << id << ": " << detail << std::endl;
        (ok ? passed : failed)++;
    }
    void skip(const std::string &id, const std::string &why) {
        std::cout << "SKIP " << id << ": " << why << std::endl;
        ++skipped;
    }
};

std::vector<double> random_vec(Rng &rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto &x : v) x = rng.uniform(lo, hi);
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

Gate random_gate(Rng &rng, std::size_t n) {
    const auto pick = rng.below(n >= 2 ? 5 : 3);
    const auto t = static_cast<std::size_t>(rng.below(n));
    const double a = rng.uniform(-2 * pi, 2 * pi);
    if (pick == 0) return Gate::rx(t, a);
    if (pick == 1) return Gate::ry(t, a);
    if (pick == 2) return Gate::rz(t, a);
    auto c = static_cast<std::size_t>(rng.below(n - 1));
    if (c >= t) ++c;
    return pick == 3 ? Gate::cnot(c, t) : Gate::cz(c, t);
}

// --- 1 -------------------------------------------------------------------

void gradient_oracles(Tally &tally, Rng &rng) {
    const auto t0 = Clock::now();
    constexpr int kInstances = 60;

    double worst_vqc = 0.0;
    for (int k = 0; k < kInstances; ++k) {
        const VqcSpec spec{static_cast<std::size_t>(1 + rng.below(6)),
                           static_cast<std::size_t>(1 + rng.below(4)),
                           k % 3 == 0 ? Encoding::AngleRY : Encoding::AngleRX,
                           k % 2 ? Entangler::CzRing : Entangler::CnotRing};
        VqcParams p(spec);
        p.theta = random_vec(rng, spec.param_count(), -pi, pi);
        const auto x = random_vec(rng, spec.n_qubits, -pi, pi);
        const auto up = random_vec(rng, spec.n_qubits, -1, 1);
        const auto g = vqc_gradient(spec, p, x, up);
        const auto fd = oracle::finite_difference(
            [&](std::span<const double> th) {
                VqcParams q = p;
                q.theta.assign(th.begin(), th.end());
                return dot(up, vqc_forward(spec, q, x));
            },
            p.theta, 1e-5);
        const auto fdx = oracle::finite_difference(
            [&](std::span<const double> xs) { return dot(up, vqc_forward(spec, p, xs)); }, x,
            1e-5);
        worst_vqc = std::max({worst_vqc, oracle::relative_error(g.theta, fd),
                              oracle::relative_error(g.features, fdx)});
    }

    double worst_qlstm = 0.0;
    for (int k = 0; k < kInstances; ++k) {
        CellConfig cfg;
        cfg.input_dim = 1 + rng.below(7);
        cfg.hidden_dim = 1 + rng.below(2);
        cfg.spec = VqcSpec{static_cast<std::size_t>(1 + rng.below(6)),
                           static_cast<std::size_t>(1 + rng.below(4)), Encoding::AngleRX,
                           Entangler::CnotRing};
        cfg.recurrent_input = k % 2 ? RecurrentInput::Concat : RecurrentInput::InputOnly;
        cfg.gate_activation = k % 4 != 3;
        cfg.output_source = k % 5 == 4 ? OutputSource::Hidden : OutputSource::Cell;
        const auto m = make_qlstm(cfg, rng);
        Sequence seq(3);
        for (auto &s : seq) s = random_vec(rng, cfg.input_dim, -pi, pi);
        const int label = k % 2;
        const auto analytic = flatten(bptt_gradient(m, seq, label).grad);
        const auto fd = oracle::finite_difference(
            [&](std::span<const double> flat) {
                QlstmModel q = m;
                unflatten(q, flat);
                return bce_loss(sequence_forward(q, seq), label).loss;
            },
            flatten(m), 1e-5);
        worst_qlstm = std::max(worst_qlstm, oracle::relative_error(analytic, fd));
    }

    const double elapsed = seconds_since(t0);
    tally.report("1 gradient oracles",
                 worst_vqc < 1e-5 && worst_qlstm < 1e-4 && elapsed < 120.0,
                 std::to_string(kInstances) + "+" + std::to_string(kInstances) +
                     " instances, n<=6, L<=4; parameter-shift worst " + sci(worst_vqc) +
                     " (< 1e-05), BPTT worst " + sci(worst_qlstm) + " (< 1e-04), " +
                     fix(elapsed, 1) + " s (< 120 s)");
}

// --- 2 -------------------------------------------------------------------

void simulator_oracles(Tally &tally, Rng &rng) {
    double worst_norm = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto n = static_cast<std::size_t>(1 + rng.below(10));
        auto s = init_zero_state(n);
        for (int g = 0; g < 100; ++g) s.apply(random_gate(rng, n));
        worst_norm = std::max(worst_norm, std::abs(s.norm_squared() - 1.0));
    }

    double worst_dense = 0.0;
    for (std::size_t n = 1; n <= 3; ++n) {
        for (int k = 0; k < 30; ++k) {
            auto s = init_zero_state(n);
            auto dense = oracle::matvec(oracle::gate_matrix(Gate::rx(0, 0.0), n), s.amplitudes());
            for (int g = 0; g < 20; ++g) {
                const Gate gate = random_gate(rng, n);
                s.apply(gate);
                dense = oracle::matvec(oracle::gate_matrix(gate, n), dense);
            }
            for (std::size_t i = 0; i < dense.size(); ++i) {
                worst_dense = std::max(worst_dense, std::abs(s.amplitudes()[i] - dense[i]));
            }
        }
    }

    double worst_cos = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double th = rng.uniform(-2 * pi, 2 * pi);
        worst_cos = std::max(
            worst_cos,
            std::abs(expect_z(apply_gate(init_zero_state(1), Gate::ry(0, th)), 0) - std::cos(th)));
    }

    tally.report("2 simulator oracles",
                 worst_norm < 1e-10 && worst_dense < 1e-12 && worst_cos < 1e-12,
                 "norm drift " + sci(worst_norm) + " (< 1e-10) over 100 sequences of 100 gates; "
                 "dense-matrix " + sci(worst_dense) + " (< 1e-12) for n<=3; "
                 "<Z> of RY(t)|0> vs cos t " + sci(worst_cos) + " (< 1e-12)");
}

// --- 3 -------------------------------------------------------------------

void parameter_budget(Tally &tally) {
    const auto low7 = app::resolve(app::RunConfig{});
    const auto n_low7 = param_count(make_model(low7.config.model_config(), 0));

    app::RunConfig c18;
    c18.feature_subset = FeatureSubset::Full18;
    const auto full18 = app::resolve(c18);
    const auto n_full18 = param_count(make_model(full18.config.model_config(), 0));
    const bool documented = full18.config.n_layers == std::optional<std::size_t>{4} ||
                            !full18.notes.empty();

    tally.report("3 parameter budget",
                 n_low7 == 270 && n_full18 < app::kParamBudget && documented,
                 "low7 default " + std::to_string(n_low7) + " (== 270); full18 default " +
                     std::to_string(n_full18) + " (< 300) at n_layers=" +
                     std::to_string(*full18.config.n_layers) +
                     (full18.notes.empty() ? "" : ", manifest note: " + full18.notes.front()));
}

// --- 4 -------------------------------------------------------------------

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

void federation_algebra(Tally &tally, Rng &rng, const fs::path &scratch) {
    double idem = 0.0;
    double perm = 0.0;
    double lin = 0.0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 1 + rng.below(10);
        const std::size_t dim = 1 + rng.below(300);
        std::vector<std::vector<double>> snaps(n);
        for (auto &s : snaps) s = random_vec(rng, dim, -1, 1);
        const auto w = random_vec(rng, n, 0.1, 3.0);
        const auto base = fedavg(snaps, w);

        idem = std::max(idem, max_abs_diff(fedavg(std::vector(n, snaps[0]), w), snaps[0]));

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span(order));
        std::vector<std::vector<double>> ps;
        std::vector<double> pw;
        for (std::size_t j : order) {
            ps.push_back(snaps[j]);
            pw.push_back(w[j]);
        }
        perm = std::max(perm, max_abs_diff(fedavg(ps, pw), base));

        const double a = rng.uniform(0, 1);
        auto sy = snaps;
        auto sz = snaps;
        for (std::size_t i = 0; i < dim; ++i) {
            sy[0][i] = rng.uniform(-1, 1);
            sz[0][i] = a * snaps[0][i] + (1 - a) * sy[0][i];
        }
        const auto fy = fedavg(sy, w);
        const auto fz = fedavg(sz, w);
        for (std::size_t i = 0; i < dim; ++i) {
            lin = std::max(lin, std::abs(fz[i] - (a * base[i] + (1 - a) * fy[i])));
        }
    }

    // One node, one round against plain training on the same data and seed.
    const fs::path csv = scratch / "algebra.csv";
    {
        std::ofstream out(csv);
        out << synthetic::to_csv(synthetic::susy_like(400, 5));
    }
    app::RunConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 17;
    cfg.n_nodes = 1;
    cfg.global_rounds = 1;
    const auto resolved = app::resolve(cfg).config;
    const auto data = app::prepare_data(resolved, csv);
    const std::size_t workers = std::max<std::size_t>(2, default_workers());

    const auto fed = run_federation(resolved.fed_config(),
                                    make_model(resolved.model_config(), resolved.seed), data.train,
                                    data.test, resolved.train_options(workers));
    AnyModel central = make_model(resolved.model_config(), resolved.seed);
    AdamState adam(param_count(central), resolved.train_options(1).adam);
    train(central, adam, data.train, resolved.train_options(1));
    const bool bitwise = get_params(fed.global) == get_params(central) &&
                         fed.rounds.back().test_auc == evaluate(central, data.test, 1).auc;

    tally.report("4 federation algebra",
                 idem <= 1e-15 && perm <= 1e-15 && lin <= 1e-15 && bitwise,
                 "100 instances; idempotence " + sci(idem) + ", permutation " + sci(perm) +
                     ", linearity " + sci(lin) + " (all <= 1e-15); one-node federation (" +
                     std::to_string(workers) + " workers) vs centralized (1 worker): " +
                     (bitwise ? "bitwise equal" : "DIFFERENT"));
}

// --- 5 -------------------------------------------------------------------

void auc_oracle(Tally &tally, Rng &rng) {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto n = static_cast<std::size_t>(2 + rng.below(199));
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform() < 0.5 ? 1 : 0;
            s[i] = rng.uniform() + 0.3 * y[i];
            if (k % 3 == 0) s[i] = std::floor(s[i] * 5) / 5;
        }
        y[0] = 1;
        y[1] = 0;
        worst = std::max(worst, std::abs(auc(roc_curve(s, y)) - oracle::rank_auc(s, y)));
    }
    tally.report("5 AUC oracle", worst < 1e-12,
                 "100 instances of size <= 200 (one third heavily tied); worst " + sci(worst) +
                     " (< 1e-12)");
}

// --- 6, 7, 8 -------------------------------------------------------------

struct DataRun {
    fs::path data;
    fs::path out;
    std::size_t workers{1};
};

app::RunManifest run(const std::string &command, app::RunConfig cfg, const DataRun &dr,
                     const std::string &tag) {
    app::RunOptions ro;
    ro.workers = dr.workers;
    const auto t0 = Clock::now();
    auto m = command == "federate" ? app::cmd_federate(cfg, dr.data, dr.out / tag, ro)
                                   : app::cmd_train(cfg, dr.data, dr.out / tag, ro);
    std::cout << "  " << tag << ": test_auc=" << fix(m.final_auc)
              << " test_accuracy=" << fix(m.final_accuracy) << " (" << fix(seconds_since(t0), 0)
              << " s)" << std::endl;
    return m;
}

app::RunConfig desk_config(std::uint64_t seed) {
    app::RunConfig c;
    c.max_rows = 2500;
    c.split_ratio = 0.8;
    c.seed = seed;
    return c;
}

void desk_scale(Tally &tally, const DataRun &dr, std::uint64_t seed) {
    const auto t0 = Clock::now();
    std::vector<double> q_auc;
    std::vector<double> v_auc;
    for (std::uint64_t k = 0; k < 3; ++k) {
        auto c = desk_config(seed + k);
        q_auc.push_back(run("train", c, dr, "qlstm-seed" + std::to_string(seed + k)).final_auc);
        c.model_kind = ModelKind::Vqc;
        v_auc.push_back(run("train", c, dr, "vqc-seed" + std::to_string(seed + k)).final_auc);
    }
    const double q = app::sample_mean(q_auc);
    const double v = app::sample_mean(v_auc);
    const double elapsed = seconds_since(t0);
    const std::string suffix = " (" + fix(elapsed / 60, 1) + " min so far, budget 30 min)";
    tally.report("6a desk-scale QLSTM AUC", q >= 0.78,
                 "mean over 3 seeds " + fix(q) + " (>= 0.78), std " +
                     fix(app::sample_std(q_auc)) + suffix);
    tally.report("6b desk-scale QLSTM beats VQC", q > v,
                 "QLSTM " + fix(q) + " > VQC " + fix(v));
    tally.report("6c desk-scale VQC AUC", v >= 0.68,
                 "mean over 3 seeds " + fix(v) + " (>= 0.68), std " + fix(app::sample_std(v_auc)));

    // Same split and seed as the first QLSTM repeat; the federation spends
    // the same number of local epochs per sample as the centralized run.
    auto c = desk_config(seed);
    c.n_nodes = 3;
    c.global_rounds = 5;
    c.local_epochs = c.epochs / c.global_rounds;
    const double fed = run("federate", c, dr, "federated-3nodes").final_auc;
    const double gap = std::abs(fed - q_auc.front());
    tally.report("7 federation gap", gap < 0.02,
                 "3 nodes x 5 rounds x " + std::to_string(*c.local_epochs) +
                     " local epochs " + fix(fed) + " vs centralized " + fix(q_auc.front()) +
                     ", |gap| " + fix(gap) + " (< 0.02)");
    const double total = seconds_since(t0);
    if (total >= 1800.0) {
        tally.report("6 desk-scale runtime", false, fix(total / 60, 1) + " min (>= 30 min)");
    }
}

void full_scale(Tally &tally, const DataRun &dr, std::uint64_t seed) {
    app::RunConfig c;
    c.seed = seed;
    const auto low7 = run("train", c, dr, "full-low7");
    tally.report("8a full-scale QLSTM-low7 accuracy", std::abs(low7.final_accuracy - 0.821) <= 0.03,
                 fix(low7.final_accuracy) + " within 0.03 of 0.821");
    c.feature_subset = FeatureSubset::Full18;
    const auto full = run("train", c, dr, "full-full18");
    tally.report("8b full-scale QLSTM-full18 AUC", std::abs(full.final_auc - 0.88) <= 0.03,
                 fix(full.final_auc) + " within 0.03 of 0.88");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App cli{"qfl acceptance suite"};
    bool desk = false;
    bool full = false;
    std::string data;
    std::string out = (fs::temp_directory_path() / "qfl-acceptance").string();
    std::uint64_t seed = 42;
    std::size_t workers = default_workers();
    cli.add_flag("--desk-scale", desk, "run the 2,000/500-sample learning criteria");
    cli.add_flag("--full-scale", full, "run the 16K/4K reproduction (long)");
    cli.add_option("--data", data, "SUSY CSV (default: $QFL_SUSY_CSV)");
    cli.add_option("--out", out, "directory for run artifacts");
    cli.add_option("--seed", seed, "base seed")->capture_default_str();
    cli.add_option("--workers", workers, "worker threads")->capture_default_str();
    CLI11_PARSE(cli, argc, argv);

    Tally tally;
    const auto t0 = Clock::now();
    try {
        if (!desk && !full) {
            const fs::path scratch = fs::path(out) / "oracles";
            fs::create_directories(scratch);
            Rng rng(seed);
            gradient_oracles(tally, rng);
            simulator_oracles(tally, rng);
            parameter_budget(tally);
            federation_algebra(tally, rng, scratch);
            auc_oracle(tally, rng);
            std::cout << "NOTE 6-7 run with --desk-scale; 8 with --full-scale (nightly)\n";
        } else {
            if (data.empty()) {
                if (const char *env = std::getenv("QFL_SUSY_CSV")) data = env;
            }
            const char *ids = desk ? "6-7" : "8";
            if (data.empty() || !fs::exists(data)) {
                tally.skip(ids, data.empty() ? "no SUSY CSV (set QFL_SUSY_CSV or pass --data)"
                                             : "SUSY CSV not found: " + data);
                std::cout << "summary: skipped" << std::endl;
                return kSkipped;
            }
            const DataRun dr{data, fs::path(out), std::max<std::size_t>(1, workers)};
            if (desk) desk_scale(tally, dr, seed);
            if (full) full_scale(tally, dr, seed);
        }
    } catch (const std::exception &e) {
        std::cout << "FAIL aborted: " << e.what() << std::endl;
        return 1;
    }
    std::cout << "summary: " << tally.passed << " passed, " << tally.failed << " failed, "
              << tally.skipped << " skipped in " << fix(seconds_since(t0), 1) << " s" << std::endl;
    return tally.failed == 0 ? 0 : 1;
}

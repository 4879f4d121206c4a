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
#include "qfl/app/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "qfl/data.hpp"
#include "qfl/federated.hpp"
#include "qfl/metrics.hpp"
#include "qfl/nn.hpp"
#include "qfl/qlstm.hpp"
#include "qfl/random.hpp"
#include "qfl/statevector.hpp"
#include "qfl/testing/oracles.hpp"
#include "qfl/vqc.hpp"

namespace qfl::app {

namespace {

constexpr double pi = std::numbers::pi;

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << v;
    return os.str();
}

/// Tracks the worst deviation over a check's instances.
class Check {
public:
    Check(std::string module, std::string name, double tolerance)
        : result_{std::move(module), std::move(name), true, {}, 0}, tol_(tolerance) {}

    void observe(double deviation, const std::string &where = {}) {
        ++result_.instances;
        if (!(deviation <= worst_)) {
            worst_ = deviation;
        }
        if (!(deviation < tol_) && result_.passed) {
            result_.passed = false;
            first_failure_ = "instance " + std::to_string(result_.instances) +
                             (where.empty() ? "" : " (" + where + ")") + ": " +
                             sci(deviation) + " >= " + sci(tol_);
        }
    }

    OracleCheck finish() {
        result_.detail = result_.passed ? "worst " + sci(worst_) + " < " + sci(tol_)
                                        : first_failure_;
        return result_;
    }

private:
    OracleCheck result_;
    double tol_;
    double worst_{0.0};
    std::string first_failure_;
};

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double max_abs(std::span<const complex_t> a, std::span<const complex_t> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
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

StateVector random_state(Rng &rng, std::size_t n) {
    std::vector<complex_t> amps(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &a : amps) {
        a = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        norm += std::norm(a);
    }
    for (auto &a : amps) a /= std::sqrt(norm);
    return StateVector::from_amplitudes(std::move(amps));
}

std::vector<double> random_vec(Rng &rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto &x : v) x = rng.uniform(lo, hi);
    return v;
}

void statevector_checks(Rng &rng, const SelftestOptions &o, std::vector<OracleCheck> &out) {
    Check norm("statevector", "norm-conservation", 1e-10);
    for (int k = 0; k < 20; ++k) {
        const auto n = static_cast<std::size_t>(1 + rng.below(8));
        auto s = init_zero_state(n);
        for (int g = 0; g < 100; ++g) s.apply(random_gate(rng, n));
        double dev = std::abs(s.norm_squared() - 1.0);
        if (o.inject_fault == "norm") dev += 1e-6;
        norm.observe(dev);
    }
    out.push_back(norm.finish());

    Check dense("statevector", "dense-matrix-equivalence", 1e-12);
    for (std::size_t n = 1; n <= 3; ++n) {
        for (int k = 0; k < 10; ++k) {
            const auto s = random_state(rng, n);
            const Gate g = random_gate(rng, n);
            const auto want = oracle::matvec(oracle::gate_matrix(g, n), s.amplitudes());
            dense.observe(max_abs(apply_gate(s, g).amplitudes(), want),
                          std::string(to_string(g.kind)));
        }
    }
    out.push_back(dense.finish());

    Check ez("statevector", "expect-z-of-ry-is-cos", 1e-12);
    for (int k = 0; k < 8; ++k) {
        const double th = rng.uniform(-pi, pi);
        ez.observe(std::abs(expect_z(apply_gate(init_zero_state(1), Gate::ry(0, th)), 0) -
                            std::cos(th)));
    }
    out.push_back(ez.finish());
}

void vqc_checks(Rng &rng, const SelftestOptions &o, std::vector<OracleCheck> &out) {
    Check fwd("vqc", "forward-vs-dense-matrices", 1e-12);
    for (int k = 0; k < 10; ++k) {
        const VqcSpec spec{static_cast<std::size_t>(1 + rng.below(3)),
                           static_cast<std::size_t>(1 + rng.below(3)), Encoding::AngleRX,
                           k % 2 ? Entangler::CzRing : Entangler::CnotRing};
        VqcParams p(spec);
        p.theta = random_vec(rng, spec.param_count(), -pi, pi);
        const auto x = random_vec(rng, spec.n_qubits, -pi, pi);
        const auto got = vqc_forward(spec, p, x);
        const auto want = oracle::dense_vqc_forward(spec, p.theta, x);
        double dev = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i) dev = std::max(dev, std::abs(got[i] - want[i]));
        fwd.observe(dev);
    }
    out.push_back(fwd.finish());

    Check grad("vqc", "parameter-shift-vs-finite-differences", 1e-5);
    for (int k = 0; k < 20; ++k) {
        const VqcSpec spec{static_cast<std::size_t>(1 + rng.below(6)),
                           static_cast<std::size_t>(1 + rng.below(4)), Encoding::AngleRX,
                           Entangler::CnotRing};
        VqcParams p(spec);
        p.theta = random_vec(rng, spec.param_count(), -pi, pi);
        const auto x = random_vec(rng, spec.n_qubits, -pi, pi);
        const auto up = random_vec(rng, spec.n_qubits, -1, 1);
        auto g = vqc_gradient(spec, p, x, up);
        if (o.inject_fault == "gradient") {
            for (auto &v : g.theta) v *= 1.0 + 1e-3;
        }
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
        grad.observe(std::max(oracle::relative_error(g.theta, fd),
                              oracle::relative_error(g.features, fdx)),
                     "n=" + std::to_string(spec.n_qubits) + " L=" +
                         std::to_string(spec.n_layers));
    }
    out.push_back(grad.finish());
}

void nn_checks(Rng &rng, std::vector<OracleCheck> &out) {
    Check lin("nn", "linear-backward-vs-finite-differences", 1e-6);
    for (int k = 0; k < 10; ++k) {
        LinearLayer l(1 + rng.below(5), 1 + rng.below(5));
        l.weight = random_vec(rng, l.weight.size(), -1, 1);
        l.bias = random_vec(rng, l.bias.size(), -1, 1);
        const auto x = random_vec(rng, l.in_dim, -1, 1);
        const auto up = random_vec(rng, l.out_dim, -1, 1);
        const auto g = linear_backward(l, x, up);
        const auto fw = oracle::finite_difference(
            [&](std::span<const double> w) {
                LinearLayer m = l;
                m.weight.assign(w.begin(), w.end());
                return dot(up, linear_forward(m, x));
            },
            l.weight, 1e-6);
        const auto fx = oracle::finite_difference(
            [&](std::span<const double> xs) { return dot(up, linear_forward(l, xs)); }, x,
            1e-6);
        lin.observe(std::max(oracle::relative_error(g.weight, fw),
                             oracle::relative_error(g.input, fx)));
    }
    out.push_back(lin.finish());

    Check bce("nn", "bce-derivative-vs-finite-differences", 1e-6);
    for (double p : {0.1, 0.35, 0.9}) {
        for (int y : {0, 1}) {
            const double h = 1e-7;
            const double fd = (bce_loss(p + h, y).loss - bce_loss(p - h, y).loss) / (2 * h);
            bce.observe(std::abs(bce_loss(p, y).grad - fd) / std::max(1.0, std::abs(fd)));
        }
    }
    out.push_back(bce.finish());
}

void qlstm_checks(Rng &rng, const SelftestOptions &o, std::vector<OracleCheck> &out) {
    Check bptt("qlstm", "bptt-vs-finite-differences", 1e-4);
    for (int k = 0; k < 6; ++k) {
        CellConfig cfg;
        cfg.input_dim = 3;
        cfg.hidden_dim = 2;
        cfg.spec = VqcSpec{3, 2, Encoding::AngleRX, Entangler::CnotRing};
        cfg.recurrent_input = k % 2 ? RecurrentInput::Concat : RecurrentInput::InputOnly;
        cfg.gate_activation = k % 3 != 2;
        const auto m = make_qlstm(cfg, rng);
        Sequence seq(3);
        for (auto &s : seq) s = random_vec(rng, 3, -3, 3);
        const int label = k % 2;
        auto analytic = flatten(bptt_gradient(m, seq, label).grad);
        if (o.inject_fault == "bptt") {
            analytic.front() += 1e-2;
        }
        const auto fd = oracle::finite_difference(
            [&](std::span<const double> flat) {
                QlstmModel q = m;
                unflatten(q, flat);
                return bce_loss(sequence_forward(q, seq), label).loss;
            },
            flatten(m), 1e-5);
        bptt.observe(oracle::relative_error(analytic, fd),
                     std::string(to_string(cfg.recurrent_input)));
    }
    out.push_back(bptt.finish());
}

void metrics_checks(Rng &rng, const SelftestOptions &o, std::vector<OracleCheck> &out) {
    Check c("metrics", "auc-vs-rank-statistic", 1e-12);
    for (int k = 0; k < 50; ++k) {
        const auto n = static_cast<std::size_t>(2 + rng.below(199));
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform() < 0.5 ? 1 : 0;
            s[i] = rng.uniform() + 0.3 * y[i];
            if (k % 3 == 0) s[i] = std::floor(s[i] * 6) / 6;
        }
        y[0] = 1;
        y[1] = 0;
        double got = auc(roc_curve(s, y));
        if (o.inject_fault == "auc") got += 1e-9;
        c.observe(std::abs(got - oracle::rank_auc(s, y)));
    }
    out.push_back(c.finish());
}

void federated_checks(Rng &rng, const SelftestOptions &o, std::vector<OracleCheck> &out) {
    Check idem("federated", "fedavg-idempotence", 1e-15);
    Check perm("federated", "fedavg-permutation-invariance", 1e-15);
    Check lin("federated", "fedavg-linearity", 1e-15);
    for (int k = 0; k < 30; ++k) {
        const std::size_t n = 1 + rng.below(6);
        const std::size_t dim = 1 + rng.below(100);
        std::vector<std::vector<double>> snaps(n);
        for (auto &s : snaps) s = random_vec(rng, dim, -1, 1);
        const auto w = random_vec(rng, n, 0.1, 3.0);
        const auto base = fedavg(snaps, w);

        const std::vector<std::vector<double>> same(n, snaps[0]);
        const auto ident = fedavg(same, w);
        double d = 0.0;
        for (std::size_t i = 0; i < dim; ++i) d = std::max(d, std::abs(ident[i] - snaps[0][i]));
        idem.observe(d);

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span(order));
        std::vector<std::vector<double>> ps;
        std::vector<double> pw;
        for (std::size_t j : order) {
            ps.push_back(snaps[j]);
            pw.push_back(w[j]);
        }
        auto permuted = fedavg(ps, pw);
        if (o.inject_fault == "fedavg") permuted[0] += 1e-12;
        d = 0.0;
        for (std::size_t i = 0; i < dim; ++i) d = std::max(d, std::abs(permuted[i] - base[i]));
        perm.observe(d);

        const double a = rng.uniform(0, 1);
        auto sy = snaps;
        auto sz = snaps;
        for (std::size_t i = 0; i < dim; ++i) {
            sy[0][i] = rng.uniform(-1, 1);
            sz[0][i] = a * snaps[0][i] + (1 - a) * sy[0][i];
        }
        const auto fy = fedavg(sy, w);
        const auto fz = fedavg(sz, w);
        d = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            d = std::max(d, std::abs(fz[i] - (a * base[i] + (1 - a) * fy[i])));
        }
        lin.observe(d);
    }
    out.push_back(idem.finish());
    out.push_back(perm.finish());
    out.push_back(lin.finish());
}

void data_checks(std::vector<OracleCheck> &out) {
    Check c("data", "minmax-midpoint-endpoints-clamp", 1e-15);
    Dataset train;
    train.feature_names = {"x"};
    train.features = {0.0, 10.0};
    train.labels = {0, 1};
    Dataset test = train;
    test.features = {5.0, 10.0, 0.0, 12.0};
    test.labels = {0, 1, 0, 1};
    const auto r = normalize_fit_transform(train, test);
    const double want[] = {0.0, pi, -pi, pi};
    for (std::size_t i = 0; i < 4; ++i) c.observe(std::abs(r.test.features[i] - want[i]));
    out.push_back(c.finish());
}

} // namespace

bool SelftestReport::passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const OracleCheck &c) { return c.passed; });
}

std::map<std::string, std::size_t> SelftestReport::counts() const {
    std::map<std::string, std::size_t> out;
    for (const auto &c : checks) out[c.module] += c.instances;
    return out;
}

const std::vector<std::string> &fault_names() {
    static const std::vector<std::string> names{"gradient", "bptt", "auc", "fedavg", "norm"};
    return names;
}

SelftestReport run_selftest(const SelftestOptions &options) {
    const auto t0 = std::chrono::steady_clock::now();
    SelftestReport rep;
    Rng rng(options.seed);
    statevector_checks(rng, options, rep.checks);
    vqc_checks(rng, options, rep.checks);
    nn_checks(rng, rep.checks);
    qlstm_checks(rng, options, rep.checks);
    metrics_checks(rng, options, rep.checks);
    federated_checks(rng, options, rep.checks);
    data_checks(rep.checks);
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

void print_report(const SelftestReport &report, std::ostream &out) {
    std::size_t failed = 0;
    for (const auto &c : report.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.module << '/' << c.name << " ["
            << c.instances << "] " << c.detail << '\n';
        failed += c.passed ? 0 : 1;
    }
    out << "oracle counts:";
    for (const auto &[module, n] : report.counts()) out << ' ' << module << '=' << n;
    out << '\n'
        << (failed == 0 ? "selftest passed" : "selftest FAILED") << ": "
        << report.checks.size() - failed << '/' << report.checks.size() << " checks in "
        << std::fixed << std::setprecision(2) << report.wall_time_s << " s\n";
}

} // namespace qfl::app

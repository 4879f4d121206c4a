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
#include "qfl/qlstm.hpp"

#include <cmath>
#include <numbers>

#include "qfl/random.hpp"

namespace qfl {

namespace {

void add_into(std::span<double> acc, std::span<const double> v) {
    for (std::size_t i = 0; i < acc.size(); ++i) {
        acc[i] += v[i];
    }
}

void add_linear_grad(LinearLayer &acc, const LinearGrad &g) {
    add_into(acc.weight, g.weight);
    add_into(acc.bias, g.bias);
}

void check_finite(std::span<const double> v, const char *what,
                  std::size_t step) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw TrainingError(std::string("non-finite ") + what +
                                " at sequence step " + std::to_string(step));
        }
    }
}

void init_theta(VqcParams &p, Rng &rng) {
    for (auto &t : p.theta) {
        t = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
}

// Branch kernels. Each branch maps z (n_qubits) to q (n_qubits).

std::vector<double> branch_forward(const CellConfig &cfg,
                                   const QuantumBranch &b,
                                   std::span<const double> z) {
    return vqc_forward(cfg.spec, b.theta, z);
}

std::vector<double> branch_forward(const CellConfig & /*cfg*/,
                                   const ClassicalBranch &b,
                                   std::span<const double> z) {
    return tanh(linear_forward(b.hidden, z));
}

/// Accumulates parameter gradients into `acc` and returns d/dz.
std::vector<double> branch_backward(const CellConfig &cfg,
                                    const QuantumBranch &b,
                                    std::span<const double> z,
                                    std::span<const double> /*q*/,
                                    std::span<const double> dq,
                                    QuantumBranch &acc) {
    const VqcGradient g = vqc_gradient(cfg.spec, b.theta, z, dq);
    add_into(acc.theta.theta, g.theta);
    return g.features;
}

std::vector<double> branch_backward(const CellConfig & /*cfg*/,
                                    const ClassicalBranch &b,
                                    std::span<const double> z,
                                    std::span<const double> q,
                                    std::span<const double> dq,
                                    ClassicalBranch &acc) {
    std::vector<double> du(dq.size());
    for (std::size_t k = 0; k < dq.size(); ++k) {
        du[k] = dq[k] * tanh_grad_from_output(q[k]);
    }
    const LinearGrad g = linear_backward(b.hidden, z, du);
    add_linear_grad(acc.hidden, g);
    return g.input;
}

} // namespace

std::string_view to_string(RecurrentInput r) {
    return r == RecurrentInput::Concat ? "concat" : "input_only";
}

std::string_view to_string(OutputSource o) {
    return o == OutputSource::Cell ? "cell" : "hidden";
}

RecurrentInput parse_recurrent_input(std::string_view s) {
    if (s == "concat") {
        return RecurrentInput::Concat;
    }
    if (s == "input_only") {
        return RecurrentInput::InputOnly;
    }
    throw ConfigError("recurrent_input must be concat or input_only, got '" +
                      std::string(s) + "'");
}

OutputSource parse_output_source(std::string_view s) {
    if (s == "cell") {
        return OutputSource::Cell;
    }
    if (s == "hidden") {
        return OutputSource::Hidden;
    }
    throw ConfigError("output_head_source must be cell or hidden, got '" +
                      std::string(s) + "'");
}

void CellConfig::validate() const {
    spec.validate();
    if (input_dim < 1) {
        throw ConfigError("input_dim must be positive");
    }
    if (hidden_dim < 1) {
        throw ConfigError("hidden_dim must be positive");
    }
}

QlstmModel make_qlstm(const CellConfig &config) {
    config.validate();
    if (config.spec.encoding == Encoding::Amplitude) {
        throw UnsupportedError("the recurrent cell needs an angle encoding so "
                               "gradients reach the input projection");
    }
    const std::size_t nq = config.spec.n_qubits;
    QlstmModel m;
    m.config = config;
    m.input_proj = LinearLayer(config.projection_in(), nq);
    for (auto &g : m.gates) {
        g.theta = VqcParams(config.spec);
        g.out_proj = LinearLayer(nq, config.hidden_dim);
    }
    m.output_head = LinearLayer(config.hidden_dim, 1);
    return m;
}

QlstmModel make_qlstm(const CellConfig &config, Rng &rng) {
    QlstmModel m = make_qlstm(config);
    m.input_proj.init_uniform(rng);
    for (auto &g : m.gates) {
        init_theta(g.theta, rng);
        g.out_proj.init_uniform(rng);
    }
    m.output_head.init_uniform(rng);
    return m;
}

LstmModel make_lstm(const CellConfig &config) {
    config.validate();
    const std::size_t nq = config.spec.n_qubits;
    LstmModel m;
    m.config = config;
    m.input_proj = LinearLayer(config.projection_in(), nq);
    for (auto &g : m.gates) {
        g.hidden = LinearLayer(nq, nq);
        g.out_proj = LinearLayer(nq, config.hidden_dim);
    }
    m.output_head = LinearLayer(config.hidden_dim, 1);
    return m;
}

LstmModel make_lstm(const CellConfig &config, Rng &rng) {
    LstmModel m = make_lstm(config);
    m.input_proj.init_uniform(rng);
    for (auto &g : m.gates) {
        g.hidden.init_uniform(rng);
        g.out_proj.init_uniform(rng);
    }
    m.output_head.init_uniform(rng);
    return m;
}

VqcClassifier make_vqc_classifier(std::size_t input_dim, const VqcSpec &spec) {
    spec.validate();
    if (spec.encoding == Encoding::Amplitude) {
        throw UnsupportedError("the VQC classifier compresses features through "
                               "a trained layer and needs an angle encoding");
    }
    VqcClassifier m;
    m.input_dim = input_dim;
    m.spec = spec;
    m.input_proj = LinearLayer(input_dim, spec.n_qubits);
    m.theta = VqcParams(spec);
    m.head = LinearLayer(spec.n_qubits, 1);
    return m;
}

VqcClassifier make_vqc_classifier(std::size_t input_dim, const VqcSpec &spec,
                                  Rng &rng) {
    VqcClassifier m = make_vqc_classifier(input_dim, spec);
    m.input_proj.init_uniform(rng);
    init_theta(m.theta, rng);
    m.head.init_uniform(rng);
    return m;
}

template <class Branch>
CellTrace cell_trace(const RecurrentModel<Branch> &model,
                     std::span<const double> x_t, const CellState &prev) {
    const CellConfig &cfg = model.config;
    if (x_t.size() != cfg.input_dim) {
        throw ShapeError("cell input has " + std::to_string(x_t.size()) +
                         " features, model expects " +
                         std::to_string(cfg.input_dim));
    }
    if (prev.h.size() != cfg.hidden_dim || prev.c.size() != cfg.hidden_dim) {
        throw ShapeError("previous cell state does not match hidden_dim " +
                         std::to_string(cfg.hidden_dim));
    }

    CellTrace tr;
    if (cfg.recurrent_input == RecurrentInput::Concat) {
        tr.proj_input = prev.h;
    }
    tr.proj_input.insert(tr.proj_input.end(), x_t.begin(), x_t.end());
    tr.z = linear_forward(model.input_proj, tr.proj_input);

    for (std::size_t g = 0; g < kNumGates; ++g) {
        tr.q[g] = branch_forward(cfg, model.gates[g], tr.z);
        std::vector<double> s = linear_forward(model.gates[g].out_proj, tr.q[g]);
        if (cfg.gate_activation) {
            s = g == kGateCandidate ? tanh(s) : sigmoid(s);
        }
        tr.s[g] = std::move(s);
    }

    const std::size_t hd = cfg.hidden_dim;
    tr.c_prev = prev.c;
    tr.next = CellState::zeros(hd);
    tr.tanh_c.resize(hd);
    for (std::size_t k = 0; k < hd; ++k) {
        tr.next.c[k] = tr.s[kGateForget][k] * prev.c[k] +
                       tr.s[kGateInput][k] * tr.s[kGateCandidate][k];
        tr.tanh_c[k] = std::tanh(tr.next.c[k]);
        tr.next.h[k] = tr.s[kGateOutput][k] * tr.tanh_c[k];
    }
    const auto &head_in =
        cfg.output_source == OutputSource::Cell ? tr.next.c : tr.next.h;
    tr.logit = linear_forward(model.output_head, head_in)[0];
    return tr;
}

template <class Branch>
CellStep cell_step(const RecurrentModel<Branch> &model,
                   std::span<const double> x_t, const CellState &prev) {
    CellTrace tr = cell_trace(model, x_t, prev);
    return {std::move(tr.next), tr.logit};
}

template <class Branch>
double sequence_forward(const RecurrentModel<Branch> &model,
                        std::span<const std::vector<double>> sequence) {
    if (sequence.empty()) {
        throw DataError("sequence must contain at least one step");
    }
    CellState state = CellState::zeros(model.config.hidden_dim);
    double logit = 0.0;
    for (const auto &x : sequence) {
        CellStep step = cell_step(model, x, state);
        state = std::move(step.state);
        logit = step.logit;
    }
    return sigmoid(logit);
}

template <class Branch>
Gradient<RecurrentModel<Branch>>
bptt_gradient(const RecurrentModel<Branch> &model,
              std::span<const std::vector<double>> sequence, int label) {
    if (sequence.empty()) {
        throw DataError("sequence must contain at least one step");
    }
    const CellConfig &cfg = model.config;
    const std::size_t hd = cfg.hidden_dim;

    std::vector<CellTrace> traces;
    traces.reserve(sequence.size());
    CellState state = CellState::zeros(hd);
    for (std::size_t t = 0; t < sequence.size(); ++t) {
        traces.push_back(cell_trace(model, sequence[t], state));
        check_finite(traces.back().next.c, "cell state", t);
        state = traces.back().next;
    }

    Gradient<RecurrentModel<Branch>> out{zeros_like(model), 0.0, 0.0};
    const double logit = traces.back().logit;
    if (!std::isfinite(logit)) {
        throw TrainingError("non-finite logit at sequence step " +
                            std::to_string(sequence.size() - 1));
    }
    out.prediction = sigmoid(logit);
    const BceResult bce = bce_loss(out.prediction, label);
    out.loss = bce.loss;
    const double dlogit =
        bce.grad * sigmoid_grad_from_output(out.prediction);

    std::vector<double> dh(hd, 0.0);
    std::vector<double> dc(hd, 0.0);
    {
        const CellTrace &last = traces.back();
        const auto &head_in =
            cfg.output_source == OutputSource::Cell ? last.next.c : last.next.h;
        const std::array<double, 1> up{dlogit};
        const LinearGrad g = linear_backward(model.output_head, head_in, up);
        add_linear_grad(out.grad.output_head, g);
        add_into(cfg.output_source == OutputSource::Cell ? std::span(dc)
                                                         : std::span(dh),
                 g.input);
    }

    for (std::size_t step = sequence.size(); step-- > 0;) {
        const CellTrace &tr = traces[step];
        std::array<std::vector<double>, kNumGates> ds;
        for (auto &v : ds) {
            v.assign(hd, 0.0);
        }
        std::vector<double> dc_prev(hd, 0.0);
        for (std::size_t k = 0; k < hd; ++k) {
            ds[kGateOutput][k] = dh[k] * tr.tanh_c[k];
            const double dct =
                dc[k] + dh[k] * tr.s[kGateOutput][k] *
                            tanh_grad_from_output(tr.tanh_c[k]);
            ds[kGateForget][k] = dct * tr.c_prev[k];
            ds[kGateInput][k] = dct * tr.s[kGateCandidate][k];
            ds[kGateCandidate][k] = dct * tr.s[kGateInput][k];
            dc_prev[k] = dct * tr.s[kGateForget][k];
        }

        std::vector<double> dz(cfg.spec.n_qubits, 0.0);
        for (std::size_t g = 0; g < kNumGates; ++g) {
            std::vector<double> du = ds[g];
            if (cfg.gate_activation) {
                for (std::size_t k = 0; k < hd; ++k) {
                    du[k] *= g == kGateCandidate
                                 ? tanh_grad_from_output(tr.s[g][k])
                                 : sigmoid_grad_from_output(tr.s[g][k]);
                }
            }
            const LinearGrad gp =
                linear_backward(model.gates[g].out_proj, tr.q[g], du);
            add_linear_grad(out.grad.gates[g].out_proj, gp);
            const std::vector<double> dzg = branch_backward(
                cfg, model.gates[g], tr.z, tr.q[g], gp.input, out.grad.gates[g]);
            add_into(dz, dzg);
        }

        const LinearGrad gin = linear_backward(model.input_proj, tr.proj_input, dz);
        add_linear_grad(out.grad.input_proj, gin);
        check_finite(gin.input, "input-projection gradient", step);

        dh.assign(hd, 0.0);
        if (cfg.recurrent_input == RecurrentInput::Concat) {
            std::copy_n(gin.input.begin(), hd, dh.begin());
        }
        dc = std::move(dc_prev);
    }
    return out;
}

double vqc_classifier_forward(const VqcClassifier &model,
                              std::span<const double> features) {
    if (features.size() != model.input_dim) {
        throw ShapeError("VQC classifier expects " +
                         std::to_string(model.input_dim) + " features, got " +
                         std::to_string(features.size()));
    }
    const auto angles = linear_forward(model.input_proj, features);
    const auto q = vqc_forward(model.spec, model.theta, angles);
    return sigmoid(linear_forward(model.head, q)[0]);
}

Gradient<VqcClassifier> vqc_classifier_gradient(const VqcClassifier &model,
                                                std::span<const double> features,
                                                int label) {
    if (features.size() != model.input_dim) {
        throw ShapeError("VQC classifier expects " +
                         std::to_string(model.input_dim) + " features, got " +
                         std::to_string(features.size()));
    }
    const auto angles = linear_forward(model.input_proj, features);
    const auto q = vqc_forward(model.spec, model.theta, angles);
    const double logit = linear_forward(model.head, q)[0];
    if (!std::isfinite(logit)) {
        throw TrainingError("non-finite logit in VQC classifier");
    }

    Gradient<VqcClassifier> out{zeros_like(model), 0.0, sigmoid(logit)};
    const BceResult bce = bce_loss(out.prediction, label);
    out.loss = bce.loss;
    const std::array<double, 1> up{bce.grad *
                                   sigmoid_grad_from_output(out.prediction)};

    const LinearGrad gh = linear_backward(model.head, q, up);
    add_linear_grad(out.grad.head, gh);
    const VqcGradient gv = vqc_gradient(model.spec, model.theta, angles, gh.input);
    add_into(out.grad.theta.theta, gv.theta);
    const LinearGrad gi = linear_backward(model.input_proj, features, gv.features);
    add_linear_grad(out.grad.input_proj, gi);
    return out;
}

template CellTrace cell_trace(const QlstmModel &, std::span<const double>,
                              const CellState &);
template CellTrace cell_trace(const LstmModel &, std::span<const double>,
                              const CellState &);
template CellStep cell_step(const QlstmModel &, std::span<const double>,
                            const CellState &);
template CellStep cell_step(const LstmModel &, std::span<const double>,
                            const CellState &);
template double sequence_forward(const QlstmModel &,
                                 std::span<const std::vector<double>>);
template double sequence_forward(const LstmModel &,
                                 std::span<const std::vector<double>>);
template Gradient<QlstmModel> bptt_gradient(const QlstmModel &,
                                            std::span<const std::vector<double>>,
                                            int);
template Gradient<LstmModel> bptt_gradient(const LstmModel &,
                                           std::span<const std::vector<double>>,
                                           int);

} // namespace qfl

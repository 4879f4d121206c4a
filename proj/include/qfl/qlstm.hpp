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
 * Recurrent classifiers built from the same cell equations:
 *
 *   a_t  = [h_{t-1}; x_t]   (or x_t alone, see RecurrentInput)
 *   z_t  = W_c a_t + b_c                   shared by all four gates
 *   q^g  = branch_g(z_t)                   VQC, or tanh(W z + b) classically
 *   s^g  = act_g(W_q^g q^g + b_q^g)        act = sigmoid (f,i,o), tanh (c~)
 *   c_t  = s^f * c_{t-1} + s^i * s^c~
 *   h_t  = s^o * tanh(c_t)
 *   y_t  = W_o c_t + b_o                   (or h_t, see OutputSource)
 *
 * With gate activations disabled s^g is the raw projection.
 *
 * VqcClassifier is the non-recurrent baseline: a linear compression to
 * n_qubits angles, one VQC, and a linear head.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "qfl/error.hpp"
#include "qfl/nn.hpp"
#include "qfl/vqc.hpp"

namespace qfl {

class Rng;

using Sequence = std::vector<std::vector<double>>;

struct LabeledSequence {
    Sequence steps;
    int label{0};
};

enum class RecurrentInput { Concat, InputOnly };
enum class OutputSource { Cell, Hidden };

std::string_view to_string(RecurrentInput r);
std::string_view to_string(OutputSource o);
RecurrentInput parse_recurrent_input(std::string_view s);
OutputSource parse_output_source(std::string_view s);

inline constexpr std::size_t kGateForget = 0;
inline constexpr std::size_t kGateInput = 1;
inline constexpr std::size_t kGateOutput = 2;
inline constexpr std::size_t kGateCandidate = 3;
inline constexpr std::size_t kNumGates = 4;

struct CellConfig {
    std::size_t input_dim{7};
    std::size_t hidden_dim{1};
    VqcSpec spec{};
    RecurrentInput recurrent_input{RecurrentInput::InputOnly};
    bool gate_activation{true};
    OutputSource output_source{OutputSource::Cell};

    /// Width of the vector fed to the shared input projection.
    [[nodiscard]] std::size_t projection_in() const noexcept {
        return recurrent_input == RecurrentInput::Concat
                   ? hidden_dim + input_dim
                   : input_dim;
    }
    void validate() const;

    bool operator==(const CellConfig &) const = default;
};

struct QuantumBranch {
    VqcParams theta;
    LinearLayer out_proj;
};

/// Stand-in for the VQC: tanh(W z + b), width n_qubits -> n_qubits.
struct ClassicalBranch {
    LinearLayer hidden;
    LinearLayer out_proj;
};

template <class Branch> struct RecurrentModel {
    CellConfig config;
    LinearLayer input_proj;
    std::array<Branch, kNumGates> gates;
    LinearLayer output_head;
};

using QlstmModel = RecurrentModel<QuantumBranch>;
using LstmModel = RecurrentModel<ClassicalBranch>;

struct VqcClassifier {
    std::size_t input_dim{7};
    VqcSpec spec{};
    LinearLayer input_proj;
    VqcParams theta;
    LinearLayer head;
};

struct CellState {
    std::vector<double> h;
    std::vector<double> c;

    static CellState zeros(std::size_t hidden_dim) {
        return {std::vector<double>(hidden_dim, 0.0),
                std::vector<double>(hidden_dim, 0.0)};
    }
};

/// Every intermediate of one cell step (the BPTT cache).
struct CellTrace {
    std::vector<double> proj_input;                     ///< a_t
    std::vector<double> z;                              ///< z_t
    std::array<std::vector<double>, kNumGates> q;       ///< branch outputs
    std::array<std::vector<double>, kNumGates> s;       ///< gate values
    std::vector<double> c_prev;
    CellState next;
    std::vector<double> tanh_c;
    double logit{0.0};
};

struct CellStep {
    CellState state;
    double logit{0.0};
};

// Construction. Zero-initialized models are useful as gradient holders.
QlstmModel make_qlstm(const CellConfig &config);
QlstmModel make_qlstm(const CellConfig &config, Rng &rng);
LstmModel make_lstm(const CellConfig &config);
LstmModel make_lstm(const CellConfig &config, Rng &rng);
VqcClassifier make_vqc_classifier(std::size_t input_dim, const VqcSpec &spec);
VqcClassifier make_vqc_classifier(std::size_t input_dim, const VqcSpec &spec,
                                  Rng &rng);

template <class Branch>
CellTrace cell_trace(const RecurrentModel<Branch> &model,
                     std::span<const double> x_t, const CellState &prev);

template <class Branch>
CellStep cell_step(const RecurrentModel<Branch> &model,
                   std::span<const double> x_t, const CellState &prev);

/// sigmoid of the final logit after unrolling from the zero state.
template <class Branch>
double sequence_forward(const RecurrentModel<Branch> &model,
                        std::span<const std::vector<double>> sequence);

double vqc_classifier_forward(const VqcClassifier &model,
                              std::span<const double> features);

/// Gradient holder of the same type as the model, plus the forward values.
template <class Model> struct Gradient {
    Model grad;
    double loss{0.0};
    double prediction{0.0};
};

/// Exact gradient of BCE(sequence_forward(model, sequence), label).
template <class Branch>
Gradient<RecurrentModel<Branch>>
bptt_gradient(const RecurrentModel<Branch> &model,
              std::span<const std::vector<double>> sequence, int label);

Gradient<VqcClassifier> vqc_classifier_gradient(const VqcClassifier &model,
                                                std::span<const double> features,
                                                int label);

// Parameter traversal in declaration order: input projection, then for each
// gate (f, i, o, c~) its branch parameters and output projection, then the
// output head.

template <class F> void for_each_block(LinearLayer &l, F &&f) {
    f(std::span<double>(l.weight));
    f(std::span<double>(l.bias));
}
template <class F> void for_each_block(const LinearLayer &l, F &&f) {
    f(std::span<const double>(l.weight));
    f(std::span<const double>(l.bias));
}

template <class M, class F> void for_each_block(M &model, F &&f) {
    using Model = std::remove_const_t<M>;
    if constexpr (std::is_same_v<Model, VqcClassifier>) {
        for_each_block(model.input_proj, f);
        f(std::span(model.theta.theta));
        for_each_block(model.head, f);
    } else {
        for_each_block(model.input_proj, f);
        for (auto &g : model.gates) {
            if constexpr (std::is_same_v<Model, QlstmModel>) {
                f(std::span(g.theta.theta));
            } else {
                for_each_block(g.hidden, f);
            }
            for_each_block(g.out_proj, f);
        }
        for_each_block(model.output_head, f);
    }
}

template <class M> std::size_t param_count(const M &model) {
    std::size_t n = 0;
    for_each_block(model, [&](auto block) { n += block.size(); });
    return n;
}

template <class M> std::vector<double> flatten(const M &model) {
    std::vector<double> out;
    out.reserve(param_count(model));
    for_each_block(model,
                   [&](auto block) { out.insert(out.end(), block.begin(), block.end()); });
    return out;
}

/// Overwrite all parameters from a flat array; throws ShapeError on a
/// length mismatch.
template <class M> void unflatten(M &model, std::span<const double> flat) {
    const std::size_t expected = param_count(model);
    if (flat.size() != expected) {
        throw ShapeError("parameter array has " + std::to_string(flat.size()) +
                         " entries, model expects " + std::to_string(expected));
    }
    std::size_t pos = 0;
    for_each_block(model, [&](std::span<double> block) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), block.size(),
                    block.begin());
        pos += block.size();
    });
}

template <class M> M zeros_like(const M &model) {
    M z = model;
    for_each_block(z, [](auto block) { std::fill(block.begin(), block.end(), 0.0); });
    return z;
}

} // namespace qfl

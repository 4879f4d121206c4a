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
#include "qfl/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qfl/error.hpp"
#include "qfl/random.hpp"

namespace qfl {

LinearLayer::LinearLayer(std::size_t in, std::size_t out)
    : in_dim(in), out_dim(out), weight(in * out, 0.0), bias(out, 0.0) {
    if (in < 1 || out < 1) {
        throw ConfigError("linear layer dimensions must be positive, got " +
                          std::to_string(out) + "x" + std::to_string(in));
    }
}

void LinearLayer::init_uniform(Rng &rng) {
    const double k = 1.0 / std::sqrt(static_cast<double>(in_dim));
    for (auto &w : weight) {
        w = rng.uniform(-k, k);
    }
    for (auto &b : bias) {
        b = rng.uniform(-k, k);
    }
}

std::vector<double> linear_forward(const LinearLayer &layer,
                                   std::span<const double> x) {
    if (x.size() != layer.in_dim) {
        throw ShapeError("linear layer expects input of length " +
                         std::to_string(layer.in_dim) + ", got " +
                         std::to_string(x.size()));
    }
    std::vector<double> y(layer.bias);
    for (std::size_t r = 0; r < layer.out_dim; ++r) {
        const double *row = layer.weight.data() + r * layer.in_dim;
        double acc = 0.0;
        for (std::size_t c = 0; c < layer.in_dim; ++c) {
            acc += row[c] * x[c];
        }
        y[r] += acc;
    }
    return y;
}

LinearGrad linear_backward(const LinearLayer &layer, std::span<const double> x,
                           std::span<const double> upstream) {
    if (x.size() != layer.in_dim || upstream.size() != layer.out_dim) {
        throw ShapeError("linear backward shape mismatch: layer " +
                         std::to_string(layer.out_dim) + "x" +
                         std::to_string(layer.in_dim) + ", input " +
                         std::to_string(x.size()) + ", upstream " +
                         std::to_string(upstream.size()));
    }
    LinearGrad g{std::vector<double>(layer.weight.size(), 0.0),
                 std::vector<double>(upstream.begin(), upstream.end()),
                 std::vector<double>(layer.in_dim, 0.0)};
    for (std::size_t r = 0; r < layer.out_dim; ++r) {
        const double u = upstream[r];
        for (std::size_t c = 0; c < layer.in_dim; ++c) {
            g.weight[r * layer.in_dim + c] = u * x[c];
            g.input[c] += layer.weight[r * layer.in_dim + c] * u;
        }
    }
    return g;
}

double sigmoid(double x) noexcept {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<double> sigmoid(std::span<const double> x) {
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(),
                   [](double v) { return sigmoid(v); });
    return y;
}

std::vector<double> tanh(std::span<const double> x) {
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(),
                   [](double v) { return std::tanh(v); });
    return y;
}

double sigmoid_grad_from_output(double y) noexcept { return y * (1.0 - y); }

double tanh_grad_from_output(double y) noexcept { return 1.0 - y * y; }

BceResult bce_loss(double prediction, int label, double eps) {
    if (label != 0 && label != 1) {
        throw DataError("label must be 0 or 1, got " + std::to_string(label));
    }
    if (std::isnan(prediction)) {
        throw DataError("prediction is NaN");
    }
    const double p = std::clamp(prediction, eps, 1.0 - eps);
    const bool clamped = p != prediction;
    const double y = label;
    BceResult r;
    r.loss = -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    r.grad = clamped ? 0.0 : -y / p + (1.0 - y) / (1.0 - p);
    return r;
}

void adam_step(AdamState &state, std::span<double> params,
               std::span<const double> grads) {
    if (params.size() != grads.size() || state.m.size() != params.size() ||
        state.v.size() != params.size()) {
        throw ShapeError("adam_step: params (" + std::to_string(params.size()) +
                         "), grads (" + std::to_string(grads.size()) +
                         ") and moments (" + std::to_string(state.m.size()) +
                         ") must have equal length");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw TrainingError("non-finite gradient at parameter " +
                                std::to_string(i) + " (step " +
                                std::to_string(state.t + 1) + ")");
        }
    }

    state.t += 1;
    const auto &c = state.config;
    const double t = static_cast<double>(state.t);
    const double bc1 = 1.0 - std::pow(c.beta1, t);
    const double bc2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
}

} // namespace qfl

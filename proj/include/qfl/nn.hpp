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
 * Classical building blocks: dense layers, activations, binary
 * cross-entropy and Adam.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace qfl {

class Rng;

/// y = W x + b with W stored row-major [out_dim][in_dim].
struct LinearLayer {
    std::size_t in_dim{0};
    std::size_t out_dim{0};
    std::vector<double> weight;
    std::vector<double> bias;

    LinearLayer() = default;
    LinearLayer(std::size_t in, std::size_t out);

    double &w(std::size_t row, std::size_t col) {
        return weight[row * in_dim + col];
    }
    [[nodiscard]] double w(std::size_t row, std::size_t col) const {
        return weight[row * in_dim + col];
    }
    [[nodiscard]] std::size_t param_count() const noexcept {
        return weight.size() + bias.size();
    }

    /// Uniform in [-k, k] with k = 1/sqrt(in_dim).
    void init_uniform(Rng &rng);
};

std::vector<double> linear_forward(const LinearLayer &layer,
                                   std::span<const double> x);

struct LinearGrad {
    std::vector<double> weight;
    std::vector<double> bias;
    std::vector<double> input;
};

LinearGrad linear_backward(const LinearLayer &layer, std::span<const double> x,
                           std::span<const double> upstream);

double sigmoid(double x) noexcept;
std::vector<double> sigmoid(std::span<const double> x);
std::vector<double> tanh(std::span<const double> x);
/// Derivatives expressed through the activation output y.
double sigmoid_grad_from_output(double y) noexcept;
double tanh_grad_from_output(double y) noexcept;

inline constexpr double kBceEpsilon = 1e-7;

struct BceResult {
    double loss{0.0};
    double grad{0.0}; ///< d loss / d prediction (zero where the clamp is active)
};

/// Binary cross-entropy with the prediction clamped to [eps, 1 - eps].
BceResult bce_loss(double prediction, int label,
                   double eps = kBceEpsilon);

struct AdamConfig {
    double lr{0.01};
    double beta1{0.9};
    double beta2{0.999};
    double eps{1e-8};
};

struct AdamState {
    AdamConfig config;
    std::vector<double> m;
    std::vector<double> v;
    std::size_t t{0};

    AdamState() = default;
    AdamState(std::size_t n_params, AdamConfig cfg)
        : config(cfg), m(n_params, 0.0), v(n_params, 0.0) {}

    void reset() {
        std::fill(m.begin(), m.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);
        t = 0;
    }
};

/// One bias-corrected Adam update of `params` in place. Throws
/// TrainingError naming the first non-finite gradient entry.
void adam_step(AdamState &state, std::span<double> params,
               std::span<const double> grads);

} // namespace qfl

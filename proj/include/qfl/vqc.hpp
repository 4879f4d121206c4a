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
 * Variational quantum circuit: one encoding pass, then L layers of
 * RZ/RY rotations on every qubit followed by an entangler ring (or chain),
 * read out as <Z> on each qubit.
 *
 * Gate order inside a layer is fixed: RZ(theta[l][j][0]) then
 * RY(theta[l][j][1]) on qubit j = 0..n-1, then entanglers with control j
 * and target j+1 (wrapping for the ring). Parameter files rely on this
 * order.
 */
#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "qfl/statevector.hpp"

namespace qfl {

enum class Encoding { AngleRX, AngleRY, AngleRZ, Amplitude };
enum class Entangler { CnotRing, CzRing, CnotChain, CzChain };

std::string_view to_string(Encoding e);
std::string_view to_string(Entangler e);
Encoding parse_encoding(std::string_view s);
Entangler parse_entangler(std::string_view s);

struct VqcSpec {
    std::size_t n_qubits{6};
    std::size_t n_layers{4};
    Encoding encoding{Encoding::AngleRX};
    Entangler entangler{Entangler::CnotRing};

    /// Trainable rotation angles: 2 * n_qubits * n_layers.
    [[nodiscard]] std::size_t param_count() const noexcept {
        return 2 * n_qubits * n_layers;
    }
    /// Accepted feature vector length (upper bound for amplitude encoding).
    [[nodiscard]] std::size_t feature_capacity() const noexcept;

    /// Throws ConfigError on out-of-range sizes.
    void validate() const;

    bool operator==(const VqcSpec &) const = default;
};

/// Rotation angles laid out flat as [layer][qubit][RZ, RY].
struct VqcParams {
    std::size_t n_qubits{0};
    std::size_t n_layers{0};
    std::vector<double> theta;

    VqcParams() = default;
    explicit VqcParams(const VqcSpec &spec)
        : n_qubits(spec.n_qubits), n_layers(spec.n_layers),
          theta(spec.param_count(), 0.0) {}

    [[nodiscard]] static constexpr std::size_t index(std::size_t n_qubits,
                                                     std::size_t layer,
                                                     std::size_t qubit,
                                                     std::size_t which) {
        return (layer * n_qubits + qubit) * 2 + which;
    }
    double &rz(std::size_t layer, std::size_t qubit) {
        return theta[index(n_qubits, layer, qubit, 0)];
    }
    double &ry(std::size_t layer, std::size_t qubit) {
        return theta[index(n_qubits, layer, qubit, 1)];
    }
    [[nodiscard]] double rz(std::size_t layer, std::size_t qubit) const {
        return theta[index(n_qubits, layer, qubit, 0)];
    }
    [[nodiscard]] double ry(std::size_t layer, std::size_t qubit) const {
        return theta[index(n_qubits, layer, qubit, 1)];
    }
};

StateVector encode_angle(const VqcSpec &spec, std::span<const double> features);
StateVector encode_amplitude(const VqcSpec &spec,
                             std::span<const double> features);

/// One gate of the unrolled circuit, tagged with the trainable parameter or
/// input feature that sets its angle (or npos).
struct CircuitOp {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    Gate gate;
    std::size_t param_index{npos};
    std::size_t feature_index{npos};
};

/// Initial state plus gate list for one evaluation. For amplitude encoding
/// the initial state already carries the data and no encoding gates appear.
struct Circuit {
    StateVector initial;
    std::vector<CircuitOp> ops;
};

Circuit build_circuit(const VqcSpec &spec, const VqcParams &params,
                      std::span<const double> features);

/// <Z_k> for k = 0..n_qubits-1.
std::vector<double> vqc_forward(const VqcSpec &spec, const VqcParams &params,
                                std::span<const double> features);

struct VqcGradient {
    std::vector<double> theta;    ///< same layout as VqcParams::theta
    std::vector<double> features; ///< empty when not requested
};

enum class FeatureGrad { Skip, Compute };

/**
 * Parameter-shift gradient of sum_k upstream[k] * <Z_k>. Every shiftable
 * gate (trainable rotation, and angle-encoding rotation when feature
 * gradients are requested) is evaluated at +-pi/2. Feature gradients are
 * unsupported for amplitude encoding.
 */
VqcGradient vqc_gradient(const VqcSpec &spec, const VqcParams &params,
                         std::span<const double> features,
                         std::span<const double> upstream,
                         FeatureGrad feature_grad = FeatureGrad::Compute);

} // namespace qfl

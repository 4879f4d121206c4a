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
 * Dense statevector simulation.
 *
 * Conventions:
 *  - Qubit 0 is the least-significant bit of the basis index (little-endian).
 *  - Rotations are R_P(theta) = exp(-i theta P / 2).
 *  - StateVector::apply mutates in place; the free apply_gate takes and
 *    returns by value.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qfl {

using complex_t = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 20;

enum class GateKind { RX, RY, RZ, CNOT, CZ };

std::string_view to_string(GateKind kind);

struct Gate {
    GateKind kind{GateKind::RX};
    std::size_t target{0};
    std::optional<std::size_t> control{};
    double angle{0.0};

    static Gate rx(std::size_t q, double a) { return {GateKind::RX, q, {}, a}; }
    static Gate ry(std::size_t q, double a) { return {GateKind::RY, q, {}, a}; }
    static Gate rz(std::size_t q, double a) { return {GateKind::RZ, q, {}, a}; }
    static Gate cnot(std::size_t c, std::size_t t) {
        return {GateKind::CNOT, t, c, 0.0};
    }
    static Gate cz(std::size_t c, std::size_t t) {
        return {GateKind::CZ, t, c, 0.0};
    }

    [[nodiscard]] bool is_rotation() const noexcept {
        return kind == GateKind::RX || kind == GateKind::RY ||
               kind == GateKind::RZ;
    }

    /// Inverse gate: negated angle for rotations, self for entanglers.
    [[nodiscard]] Gate inverse() const {
        Gate g = *this;
        if (is_rotation()) {
            g.angle = -angle;
        }
        return g;
    }
};

class StateVector {
  public:
    /// |0...0> on n qubits; throws ConfigError unless 1 <= n <= max_qubits.
    explicit StateVector(std::size_t n_qubits,
                         std::size_t max_qubits = kMaxQubits);

    /// Adopt an amplitude array; length must be a power of two >= 2.
    static StateVector from_amplitudes(std::vector<complex_t> amplitudes);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amps_.size(); }
    [[nodiscard]] std::span<const complex_t> amplitudes() const noexcept {
        return amps_;
    }
    [[nodiscard]] const complex_t &operator[](std::size_t i) const {
        return amps_[i];
    }

    void apply(const Gate &gate);
    void apply_rx(std::size_t target, double angle);
    void apply_ry(std::size_t target, double angle);
    void apply_rz(std::size_t target, double angle);
    void apply_cnot(std::size_t control, std::size_t target);
    void apply_cz(std::size_t control, std::size_t target);

    [[nodiscard]] double norm_squared() const noexcept;

    /// <Z_qubit>
    [[nodiscard]] double expect_z(std::size_t qubit) const;

    /// <Z_k> for every qubit in one pass over the amplitudes.
    [[nodiscard]] std::vector<double> expect_z_all() const;

  private:
    StateVector() = default;
    void check_qubit(std::size_t q) const;
    void check_pair(std::size_t control, std::size_t target) const;

    std::size_t n_qubits_{0};
    std::vector<complex_t> amps_;
};

StateVector init_zero_state(std::size_t n_qubits,
                            std::size_t max_qubits = kMaxQubits);

StateVector apply_gate(StateVector state, const Gate &gate);

double expect_z(const StateVector &state, std::size_t qubit);

} // namespace qfl

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
#include "qfl/statevector.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qfl/error.hpp"

namespace qfl {

namespace {

/// Visit every index pair (i0, i1) that differs only in bit `target`,
/// with i0 having that bit cleared.
template <class F>
inline void for_each_pair(std::size_t dim, std::size_t target, F &&f) {
    const std::size_t stride = std::size_t{1} << target;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t i0 = base + off;
            f(i0, i0 + stride);
        }
    }
}

} // namespace

std::string_view to_string(GateKind kind) {
    switch (kind) {
    case GateKind::RX:
        return "RX";
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::CNOT:
        return "CNOT";
    case GateKind::CZ:
        return "CZ";
    }
    return "?";
}

StateVector::StateVector(std::size_t n_qubits, std::size_t max_qubits)
    : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > max_qubits) {
        throw ConfigError("n_qubits must be in [1, " +
                          std::to_string(max_qubits) + "], got " +
                          std::to_string(n_qubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, complex_t{0.0, 0.0});
    amps_[0] = complex_t{1.0, 0.0};
}

StateVector StateVector::from_amplitudes(std::vector<complex_t> amplitudes) {
    const std::size_t dim = amplitudes.size();
    if (dim < 2 || !std::has_single_bit(dim)) {
        throw ShapeError("amplitude array length must be a power of two >= 2, "
                         "got " +
                         std::to_string(dim));
    }
    const auto n = static_cast<std::size_t>(std::countr_zero(dim));
    if (n > kMaxQubits) {
        throw ConfigError("amplitude array exceeds the qubit cap");
    }
    StateVector s;
    s.n_qubits_ = n;
    s.amps_ = std::move(amplitudes);
    return s;
}

void StateVector::check_qubit(std::size_t q) const {
    if (q >= n_qubits_) {
        throw IndexError("qubit index " + std::to_string(q) +
                         " out of range for " + std::to_string(n_qubits_) +
                         "-qubit state");
    }
}

void StateVector::check_pair(std::size_t control, std::size_t target) const {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
        throw IndexError("control and target must differ (both " +
                         std::to_string(target) + ")");
    }
}

void StateVector::apply(const Gate &gate) {
    switch (gate.kind) {
    case GateKind::RX:
        apply_rx(gate.target, gate.angle);
        return;
    case GateKind::RY:
        apply_ry(gate.target, gate.angle);
        return;
    case GateKind::RZ:
        apply_rz(gate.target, gate.angle);
        return;
    case GateKind::CNOT:
    case GateKind::CZ:
        if (!gate.control) {
            throw IndexError(std::string(to_string(gate.kind)) +
                             " requires a control qubit");
        }
        if (gate.kind == GateKind::CNOT) {
            apply_cnot(*gate.control, gate.target);
        } else {
            apply_cz(*gate.control, gate.target);
        }
        return;
    }
}

void StateVector::apply_rx(std::size_t target, double angle) {
    check_qubit(target);
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    // [[c, -is], [-is, c]]
    for_each_pair(amps_.size(), target, [&](std::size_t i0, std::size_t i1) {
        const complex_t a0 = amps_[i0];
        const complex_t a1 = amps_[i1];
        amps_[i0] = {c * a0.real() + s * a1.imag(), c * a0.imag() - s * a1.real()};
        amps_[i1] = {c * a1.real() + s * a0.imag(), c * a1.imag() - s * a0.real()};
    });
}

void StateVector::apply_ry(std::size_t target, double angle) {
    check_qubit(target);
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    // [[c, -s], [s, c]]
    for_each_pair(amps_.size(), target, [&](std::size_t i0, std::size_t i1) {
        const complex_t a0 = amps_[i0];
        const complex_t a1 = amps_[i1];
        amps_[i0] = c * a0 - s * a1;
        amps_[i1] = s * a0 + c * a1;
    });
}

void StateVector::apply_rz(std::size_t target, double angle) {
    check_qubit(target);
    const complex_t phase0{std::cos(angle / 2), -std::sin(angle / 2)};
    const complex_t phase1 = std::conj(phase0);
    for_each_pair(amps_.size(), target, [&](std::size_t i0, std::size_t i1) {
        amps_[i0] *= phase0;
        amps_[i1] *= phase1;
    });
}

void StateVector::apply_cnot(std::size_t control, std::size_t target) {
    check_pair(control, target);
    const std::size_t cmask = std::size_t{1} << control;
    for_each_pair(amps_.size(), target, [&](std::size_t i0, std::size_t i1) {
        if ((i0 & cmask) != 0U) {
            std::swap(amps_[i0], amps_[i1]);
        }
    });
}

void StateVector::apply_cz(std::size_t control, std::size_t target) {
    check_pair(control, target);
    const std::size_t mask =
        (std::size_t{1} << control) | (std::size_t{1} << target);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & mask) == mask) {
            amps_[i] = -amps_[i];
        }
    }
}

double StateVector::norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

double StateVector::expect_z(std::size_t qubit) const {
    check_qubit(qubit);
    const std::size_t mask = std::size_t{1} << qubit;
    double acc = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const double p = std::norm(amps_[i]);
        acc += (i & mask) != 0U ? -p : p;
    }
    return acc;
}

std::vector<double> StateVector::expect_z_all() const {
    std::vector<double> out(n_qubits_, 0.0);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        const double p = std::norm(amps_[i]);
        for (std::size_t q = 0; q < n_qubits_; ++q) {
            out[q] += ((i >> q) & 1U) != 0U ? -p : p;
        }
    }
    return out;
}

StateVector init_zero_state(std::size_t n_qubits, std::size_t max_qubits) {
    return StateVector(n_qubits, max_qubits);
}

StateVector apply_gate(StateVector state, const Gate &gate) {
    state.apply(gate);
    return state;
}

double expect_z(const StateVector &state, std::size_t qubit) {
    return state.expect_z(qubit);
}

} // namespace qfl

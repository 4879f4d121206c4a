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
#include "qfl/vqc.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qfl/error.hpp"

namespace qfl {

namespace {

constexpr double kShift = std::numbers::pi / 2;

void check_finite(std::span<const double> features) {
    for (std::size_t j = 0; j < features.size(); ++j) {
        if (!std::isfinite(features[j])) {
            throw DataError("feature " + std::to_string(j) +
                            " is not finite");
        }
    }
}

void check_params(const VqcSpec &spec, const VqcParams &params) {
    if (params.n_qubits != spec.n_qubits || params.n_layers != spec.n_layers ||
        params.theta.size() != spec.param_count()) {
        throw ShapeError("VQC parameters do not match the circuit spec: "
                         "expected " +
                         std::to_string(spec.param_count()) + " angles, got " +
                         std::to_string(params.theta.size()));
    }
}

GateKind encoding_gate(Encoding e) {
    switch (e) {
    case Encoding::AngleRX:
        return GateKind::RX;
    case Encoding::AngleRY:
        return GateKind::RY;
    case Encoding::AngleRZ:
        return GateKind::RZ;
    case Encoding::Amplitude:
        break;
    }
    throw UnsupportedError("amplitude encoding has no encoding gate");
}

/// sum_k w[k] * <Z_k>, single pass.
double weighted_z(const StateVector &state, std::span<const double> w) {
    const auto amps = state.amplitudes();
    const std::size_t n = state.num_qubits();
    double acc = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        double sign_sum = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            sign_sum += ((i >> q) & 1U) != 0U ? -w[q] : w[q];
        }
        acc += std::norm(amps[i]) * sign_sum;
    }
    return acc;
}

double shifted_value(const std::vector<StateVector> &prefix,
                     const std::vector<CircuitOp> &ops, std::size_t at,
                     double shift, std::span<const double> upstream) {
    StateVector s = prefix[at];
    Gate g = ops[at].gate;
    g.angle += shift;
    s.apply(g);
    for (std::size_t k = at + 1; k < ops.size(); ++k) {
        s.apply(ops[k].gate);
    }
    return weighted_z(s, upstream);
}

} // namespace

std::string_view to_string(Encoding e) {
    switch (e) {
    case Encoding::AngleRX:
        return "angle_rx";
    case Encoding::AngleRY:
        return "angle_ry";
    case Encoding::AngleRZ:
        return "angle_rz";
    case Encoding::Amplitude:
        return "amplitude";
    }
    return "?";
}

std::string_view to_string(Entangler e) {
    switch (e) {
    case Entangler::CnotRing:
        return "cnot_ring";
    case Entangler::CzRing:
        return "cz_ring";
    case Entangler::CnotChain:
        return "cnot_chain";
    case Entangler::CzChain:
        return "cz_chain";
    }
    return "?";
}

Encoding parse_encoding(std::string_view s) {
    for (auto e : {Encoding::AngleRX, Encoding::AngleRY, Encoding::AngleRZ,
                   Encoding::Amplitude}) {
        if (s == to_string(e)) {
            return e;
        }
    }
    throw ConfigError("unknown encoding '" + std::string(s) + "'");
}

Entangler parse_entangler(std::string_view s) {
    for (auto e : {Entangler::CnotRing, Entangler::CzRing,
                   Entangler::CnotChain, Entangler::CzChain}) {
        if (s == to_string(e)) {
            return e;
        }
    }
    throw ConfigError("unknown entangler '" + std::string(s) + "'");
}

std::size_t VqcSpec::feature_capacity() const noexcept {
    return encoding == Encoding::Amplitude ? (std::size_t{1} << n_qubits)
                                           : n_qubits;
}

void VqcSpec::validate() const {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ConfigError("n_qubits must be in [1, " +
                          std::to_string(kMaxQubits) + "], got " +
                          std::to_string(n_qubits));
    }
    if (n_layers < 1) {
        throw ConfigError("n_layers must be positive");
    }
}

StateVector encode_angle(const VqcSpec &spec,
                         std::span<const double> features) {
    spec.validate();
    const GateKind kind = encoding_gate(spec.encoding);
    if (features.size() != spec.n_qubits) {
        throw ShapeError("angle encoding expects " +
                         std::to_string(spec.n_qubits) + " features, got " +
                         std::to_string(features.size()));
    }
    check_finite(features);
    StateVector s(spec.n_qubits);
    for (std::size_t j = 0; j < features.size(); ++j) {
        s.apply(Gate{kind, j, {}, features[j]});
    }
    return s;
}

StateVector encode_amplitude(const VqcSpec &spec,
                             std::span<const double> features) {
    spec.validate();
    const std::size_t dim = std::size_t{1} << spec.n_qubits;
    if (features.empty() || features.size() > dim) {
        throw ShapeError("amplitude encoding accepts 1.." +
                         std::to_string(dim) + " features, got " +
                         std::to_string(features.size()));
    }
    check_finite(features);
    double norm2 = 0.0;
    for (double x : features) {
        norm2 += x * x;
    }
    if (!(norm2 > 0.0)) {
        throw DataError("amplitude encoding of an all-zero vector is undefined");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    std::vector<complex_t> amps(dim, complex_t{0.0, 0.0});
    for (std::size_t i = 0; i < features.size(); ++i) {
        amps[i] = complex_t{features[i] * inv, 0.0};
    }
    return StateVector::from_amplitudes(std::move(amps));
}

Circuit build_circuit(const VqcSpec &spec, const VqcParams &params,
                      std::span<const double> features) {
    spec.validate();
    check_params(spec, params);
    const std::size_t n = spec.n_qubits;

    Circuit c{spec.encoding == Encoding::Amplitude
                  ? encode_amplitude(spec, features)
                  : StateVector(n),
              {}};

    if (spec.encoding != Encoding::Amplitude) {
        if (features.size() != n) {
            throw ShapeError("angle encoding expects " + std::to_string(n) +
                             " features, got " +
                             std::to_string(features.size()));
        }
        check_finite(features);
        const GateKind kind = encoding_gate(spec.encoding);
        for (std::size_t j = 0; j < n; ++j) {
            c.ops.push_back({Gate{kind, j, {}, features[j]}, CircuitOp::npos, j});
        }
    }

    const bool ring = spec.entangler == Entangler::CnotRing ||
                      spec.entangler == Entangler::CzRing;
    const bool use_cz = spec.entangler == Entangler::CzRing ||
                        spec.entangler == Entangler::CzChain;
    // No entanglers on a single qubit.
    const std::size_t n_links = n < 2 ? 0 : (ring ? n : n - 1);

    for (std::size_t l = 0; l < spec.n_layers; ++l) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t iz = VqcParams::index(n, l, j, 0);
            const std::size_t iy = VqcParams::index(n, l, j, 1);
            c.ops.push_back({Gate::rz(j, params.theta[iz]), iz, CircuitOp::npos});
            c.ops.push_back({Gate::ry(j, params.theta[iy]), iy, CircuitOp::npos});
        }
        for (std::size_t j = 0; j < n_links; ++j) {
            const std::size_t t = (j + 1) % n;
            c.ops.push_back(
                {use_cz ? Gate::cz(j, t) : Gate::cnot(j, t), CircuitOp::npos,
                 CircuitOp::npos});
        }
    }
    return c;
}

std::vector<double> vqc_forward(const VqcSpec &spec, const VqcParams &params,
                                std::span<const double> features) {
    Circuit c = build_circuit(spec, params, features);
    for (const auto &op : c.ops) {
        c.initial.apply(op.gate);
    }
    return c.initial.expect_z_all();
}

VqcGradient vqc_gradient(const VqcSpec &spec, const VqcParams &params,
                         std::span<const double> features,
                         std::span<const double> upstream,
                         FeatureGrad feature_grad) {
    const bool want_features = feature_grad == FeatureGrad::Compute;
    if (want_features && spec.encoding == Encoding::Amplitude) {
        throw UnsupportedError(
            "feature gradients are not available for amplitude encoding");
    }
    if (upstream.size() != spec.n_qubits) {
        throw ShapeError("upstream gradient must have " +
                         std::to_string(spec.n_qubits) + " entries, got " +
                         std::to_string(upstream.size()));
    }

    Circuit c = build_circuit(spec, params, features);
    VqcGradient grad{std::vector<double>(spec.param_count(), 0.0),
                     want_features ? std::vector<double>(features.size(), 0.0)
                                   : std::vector<double>{}};

    bool any = false;
    for (double u : upstream) {
        any = any || u != 0.0;
    }
    if (!any) {
        return grad;
    }

    // States before each op so that each shifted evaluation only replays
    // the suffix of the circuit.
    std::vector<StateVector> prefix;
    prefix.reserve(c.ops.size());
    StateVector s = c.initial;
    for (const auto &op : c.ops) {
        prefix.push_back(s);
        s.apply(op.gate);
    }

    for (std::size_t k = 0; k < c.ops.size(); ++k) {
        const auto &op = c.ops[k];
        const bool is_param = op.param_index != CircuitOp::npos;
        const bool is_feature =
            want_features && op.feature_index != CircuitOp::npos;
        if (!is_param && !is_feature) {
            continue;
        }
        const double plus = shifted_value(prefix, c.ops, k, kShift, upstream);
        const double minus = shifted_value(prefix, c.ops, k, -kShift, upstream);
        const double d = 0.5 * (plus - minus);
        if (is_param) {
            grad.theta[op.param_index] += d;
        } else {
            grad.features[op.feature_index] += d;
        }
    }
    return grad;
}

} // namespace qfl

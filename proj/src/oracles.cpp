// Copyright 2026 The QFL Authors.
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

#include "qfl/oracles.hpp"

#include <cmath>
#include <numbers>

namespace qfl::oracle {

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Embeds per-qubit factors; factors[q] acts on qubit q.
Eigen::MatrixXcd kron_all(const std::vector<Eigen::Matrix2cd> &factors) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t q = factors.size(); q-- > 0;) {
        out = kron(out, factors[q]);
    }
    return out;
}

} // namespace

Eigen::Matrix2cd pauli_matrix(Axis axis) {
    const std::complex<double> i{0.0, 1.0};
    Eigen::Matrix2cd p;
    switch (axis) {
    case Axis::X:
        p << 0, 1, 1, 0;
        break;
    case Axis::Y:
        p << 0, -i, i, 0;
        break;
    case Axis::Z:
        p << 1, 0, 0, -1;
        break;
    }
    return p;
}

Eigen::Matrix2cd rotation_matrix(Axis axis, double angle) {
    const std::complex<double> i{0.0, 1.0};
    return std::cos(angle / 2) * Eigen::Matrix2cd::Identity() -
           i * std::sin(angle / 2) * pauli_matrix(axis);
}

Eigen::MatrixXcd embed(const Eigen::Matrix2cd &gate, std::size_t qubit,
                       std::size_t num_qubits) {
    std::vector<Eigen::Matrix2cd> factors(num_qubits, Eigen::Matrix2cd::Identity());
    factors[qubit] = gate;
    return kron_all(factors);
}

Eigen::MatrixXcd cnot(std::size_t control, std::size_t target,
                      std::size_t num_qubits) {
    Eigen::Matrix2cd p0;
    p0 << 1, 0, 0, 0;
    Eigen::Matrix2cd p1;
    p1 << 0, 0, 0, 1;
    std::vector<Eigen::Matrix2cd> off(num_qubits, Eigen::Matrix2cd::Identity());
    off[control] = p0;
    std::vector<Eigen::Matrix2cd> on(num_qubits, Eigen::Matrix2cd::Identity());
    on[control] = p1;
    on[target] = pauli_matrix(Axis::X);
    return kron_all(off) + kron_all(on);
}

Eigen::VectorXcd to_vector(const StateVector &state) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(state.dimension()));
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        v(static_cast<Eigen::Index>(i)) = state[i];
    }
    return v;
}

Eigen::MatrixXcd circuit_unitary(const LayeredAnsatz &ansatz,
                                 std::span<const double> params,
                                 std::size_t stop_layer,
                                 bool include_last_rotations) {
    const std::size_t n = ansatz.num_qubits();
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (std::size_t l = 0; l < stop_layer; ++l) {
        const auto &layer = ansatz.layers()[l];
        for (const auto &[control, target] : layer.wall.pairs) {
            u = cnot(control, target, n) * u;
        }
        if (l + 1 == stop_layer && !include_last_rotations) {
            break;
        }
        for (const auto &rot : layer.rotations) {
            u = embed(rotation_matrix(rot.axis, params[rot.param_index]), rot.qubit,
                      n) *
                u;
        }
    }
    return u;
}

Eigen::VectorXcd evaluate(const LayeredAnsatz &ansatz,
                          std::span<const double> params,
                          const StateVector &input) {
    return circuit_unitary(ansatz, params, ansatz.num_layers(), true) *
           to_vector(input);
}

Eigen::VectorXcd tpe_encode(std::span<const double> features) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Ones(1, 1);
    for (std::size_t q = features.size(); q-- > 0;) {
        Eigen::MatrixXcd column(2, 1);
        column << std::cos(std::numbers::pi * features[q] / 2),
            std::sin(std::numbers::pi * features[q] / 2);
        out = kron(out, column);
    }
    return out.col(0);
}

Eigen::MatrixXd metric_block(const LayeredAnsatz &ansatz,
                             std::span<const double> params,
                             const StateVector &input, std::size_t layer) {
    const std::size_t n = ansatz.num_qubits();
    const Eigen::VectorXcd psi =
        circuit_unitary(ansatz, params, layer, false) * to_vector(input);
    const auto &rotations = ansatz.layers()[layer - 1].rotations;
    std::vector<Eigen::MatrixXcd> generators;
    for (const auto &rot : rotations) {
        generators.push_back(0.5 * embed(pauli_matrix(rot.axis), rot.qubit, n));
    }
    const auto size = static_cast<Eigen::Index>(rotations.size());
    Eigen::MatrixXd g(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
        for (Eigen::Index j = 0; j < size; ++j) {
            const auto &hi = generators[static_cast<std::size_t>(i)];
            const auto &hj = generators[static_cast<std::size_t>(j)];
            const std::complex<double> joint = psi.dot(hi * hj * psi);
            const std::complex<double> mi = psi.dot(hi * psi);
            const std::complex<double> mj = psi.dot(hj * psi);
            g(i, j) = joint.real() - mi.real() * mj.real();
        }
    }
    return g;
}

std::vector<double> logits(const ClassifierHead &head,
                           const LayeredAnsatz &ansatz,
                           std::span<const double> params,
                           std::span<const double> features) {
    const std::size_t n = ansatz.num_qubits();
    const Eigen::VectorXcd psi =
        circuit_unitary(ansatz, params, ansatz.num_layers(), true) *
        tpe_encode(features);
    std::vector<double> out;
    for (const auto q : head.readout_qubits) {
        out.push_back(head.logit_scale *
                      psi.dot(embed(pauli_matrix(Axis::Z), q, n) * psi).real());
    }
    return out;
}

std::vector<double>
central_difference(const std::function<double(std::span<const double>)> &f,
                   std::span<const double> params, double h) {
    std::vector<double> x(params.begin(), params.end());
    std::vector<double> grad(params.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = params[i] + h;
        const double plus = f(x);
        x[i] = params[i] - h;
        const double minus = f(x);
        x[i] = params[i];
        grad[i] = (plus - minus) / (2 * h);
    }
    return grad;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd &matrix) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(matrix);
    return cod.pseudoInverse();
}

LayeredAnsatz random_ansatz(Xoshiro256 &rng, std::size_t num_qubits,
                            std::size_t num_layers) {
    std::vector<RotationLayer> layers(num_layers);
    std::size_t param_count = 0;
    for (auto &layer : layers) {
        if (num_qubits > 1) {
            const auto pairs = rng.below(num_qubits + 1);
            for (std::size_t p = 0; p < pairs; ++p) {
                const auto control = rng.below(num_qubits);
                auto target = rng.below(num_qubits - 1);
                if (target >= control) {
                    ++target;
                }
                layer.wall.pairs.emplace_back(control, target);
            }
        }
        for (std::size_t q = 0; q < num_qubits; ++q) {
            if (rng.below(4) == 0) {
                continue;
            }
            layer.rotations.push_back(
                {static_cast<Axis>(rng.below(3)), q, param_count++});
        }
        if (layer.rotations.empty()) {
            layer.rotations.push_back({static_cast<Axis>(rng.below(3)),
                                       static_cast<std::size_t>(rng.below(num_qubits)),
                                       param_count++});
        }
    }
    std::vector<std::size_t> relabel(param_count);
    for (std::size_t i = 0; i < param_count; ++i) {
        relabel[i] = i;
    }
    rng.shuffle(relabel);
    for (auto &layer : layers) {
        for (auto &rot : layer.rotations) {
            rot.param_index = relabel[rot.param_index];
        }
    }
    return LayeredAnsatz(num_qubits, std::move(layers));
}

ParameterVector random_angles(Xoshiro256 &rng, std::size_t count) {
    ParameterVector out(count);
    for (auto &a : out) {
        a = (2.0 * rng.uniform() - 1.0) * std::numbers::pi;
    }
    return out;
}

std::vector<double> random_features(Xoshiro256 &rng, std::size_t count) {
    std::vector<double> out(count);
    for (auto &x : out) {
        x = rng.uniform();
    }
    return out;
}

} // namespace qfl::oracle

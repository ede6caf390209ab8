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
/**
 * @file
 * Reference implementations built from explicit 2^n x 2^n matrices and
 * finite differences. They share no code with the statevector kernels and
 * exist to check them.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qfl/classifier.hpp"
#include "qfl/circuit.hpp"
#include "qfl/rng.hpp"

namespace qfl::oracle {

/// exp(-i theta P / 2) as cos(theta/2) I - i sin(theta/2) P.
Eigen::Matrix2cd rotation_matrix(Axis axis, double angle);
Eigen::Matrix2cd pauli_matrix(Axis axis);

/// Kronecker product with qubit 0 as the rightmost (least significant) factor.
Eigen::MatrixXcd embed(const Eigen::Matrix2cd &gate, std::size_t qubit,
                       std::size_t num_qubits);
/// |0><0|_c (x) I + |1><1|_c (x) X_t.
Eigen::MatrixXcd cnot(std::size_t control, std::size_t target,
                      std::size_t num_qubits);

Eigen::VectorXcd to_vector(const StateVector &state);

/// Product of the embedded gate matrices for layers [0, stop_layer), with
/// `include_last_rotations` deciding whether the final layer's rotations
/// are part of the product.
Eigen::MatrixXcd circuit_unitary(const LayeredAnsatz &ansatz,
                                 std::span<const double> params,
                                 std::size_t stop_layer,
                                 bool include_last_rotations);

Eigen::VectorXcd evaluate(const LayeredAnsatz &ansatz,
                          std::span<const double> params,
                          const StateVector &input);

/// Kronecker product of per-feature [cos(pi x/2), sin(pi x/2)] columns.
Eigen::VectorXcd tpe_encode(std::span<const double> features);

/// <psi|H_i H_j|psi> - <psi|H_i|psi><psi|H_j|psi> with H = P/2 as explicit
/// matrices; `layer` is 1-based.
Eigen::MatrixXd metric_block(const LayeredAnsatz &ansatz,
                             std::span<const double> params,
                             const StateVector &input, std::size_t layer);

/// <Z> on each readout qubit via explicit matrices.
std::vector<double> logits(const ClassifierHead &head,
                           const LayeredAnsatz &ansatz,
                           std::span<const double> params,
                           std::span<const double> features);

/// Central difference (f(x + h e_i) - f(x - h e_i)) / 2h.
std::vector<double>
central_difference(const std::function<double(std::span<const double>)> &f,
                   std::span<const double> params, double h = 1e-5);

/// Moore-Penrose inverse through complete orthogonal decomposition.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd &matrix);

/// Random layered ansatz: each layer gets a random CNOT wall (possibly
/// empty) and rotations on a random non-empty subset of distinct qubits,
/// with parameter indices shuffled across the circuit.
LayeredAnsatz random_ansatz(Xoshiro256 &rng, std::size_t num_qubits,
                            std::size_t num_layers);

ParameterVector random_angles(Xoshiro256 &rng, std::size_t count);

/// Uniform features in [0, 1].
std::vector<double> random_features(Xoshiro256 &rng, std::size_t count);

} // namespace qfl::oracle

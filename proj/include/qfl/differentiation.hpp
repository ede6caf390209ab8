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
 * Parameter-shift gradients and the block-diagonal Fubini-Study metric.
 *
 * Rotation generators are taken as H = P/2, so metric entries are a quarter
 * of the raw Pauli covariances and shifted evaluations use +-pi/2.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qfl/circuit.hpp"

namespace qfl {

using GradientVector = std::vector<double>;

/// Loss that is a single expectation value of the circuit output.
using ExpectationFn = std::function<double(std::span<const double>)>;

/// [f(theta + pi/2 e_i) - f(theta - pi/2 e_i)] / 2 for every i.
GradientVector parameter_shift_gradient(const ExpectationFn &f,
                                        std::span<const double> params);

/// Values and parameter-shift Jacobian of several Pauli expectations of
/// evaluate(ansatz, params, input). Shifted circuits resume from cached
/// prefix states, so each shift replays only the gates after it.
struct ExpectationJacobian {
    std::vector<double> values;
    Eigen::MatrixXd jacobian; ///< observables x parameters
};

ExpectationJacobian
expectation_jacobian(const LayeredAnsatz &ansatz, std::span<const double> params,
                     const StateVector &input_state,
                     std::span<const PauliObservable> observables);

struct MetricBlock {
    Eigen::MatrixXd matrix;
    /// Parameter index of each row/column.
    std::vector<std::size_t> param_indices;
};

/// Per-layer blocks; off-block entries are zero and never stored.
struct BlockDiagMetric {
    std::vector<MetricBlock> blocks;

    /// Blocks covering consecutive parameter ranges in the given order.
    static BlockDiagMetric from_blocks(std::vector<Eigen::MatrixXd> matrices);

    [[nodiscard]] std::size_t dimension() const;
    [[nodiscard]] Eigen::MatrixXd to_dense() const;
};

/// Metric block of one rotation layer given the state entering it.
Eigen::MatrixXd metric_block_for_state(const StateVector &pre_layer_state,
                                       const RotationLayer &layer);

/// Block for layer `layer` (1-based).
Eigen::MatrixXd metric_block(const LayeredAnsatz &ansatz,
                             std::span<const double> params,
                             const StateVector &input_state, std::size_t layer);

BlockDiagMetric assemble_metric(const LayeredAnsatz &ansatz,
                                std::span<const double> params,
                                const StateVector &input_state);

/// Sample mean of the per-input metrics, accumulated in input order.
BlockDiagMetric assemble_metric(const LayeredAnsatz &ansatz,
                                std::span<const double> params,
                                std::span<const StateVector> input_states);

/// Solves (g_l + damping I) d_l = grad_l block by block. A block whose
/// reciprocal condition estimate drops below 1e-12 is handled with an SVD
/// pseudo-inverse that drops singular values under 1e-10 sigma_max.
GradientVector natural_direction(const BlockDiagMetric &metric,
                                 std::span<const double> grad, double damping);

} // namespace qfl

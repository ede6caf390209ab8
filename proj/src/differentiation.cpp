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

#include "qfl/differentiation.hpp"

#include <numbers>
#include <string>

#include "qfl/error.hpp"

namespace qfl {

namespace {

constexpr double kShift = std::numbers::pi / 2;

Eigen::VectorXd pseudo_inverse_solve(const Eigen::MatrixXd &a,
                                     const Eigen::VectorXd &b) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU |
                                                 Eigen::ComputeThinV);
    const auto &sigma = svd.singularValues();
    const double cutoff = sigma.size() > 0 ? 1e-10 * sigma(0) : 0.0;
    Eigen::VectorXd projected = svd.matrixU().transpose() * b;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        projected(i) = sigma(i) > cutoff ? projected(i) / sigma(i) : 0.0;
    }
    return svd.matrixV() * projected;
}

} // namespace

GradientVector parameter_shift_gradient(const ExpectationFn &f,
                                        std::span<const double> params) {
    std::vector<double> shifted(params.begin(), params.end());
    GradientVector grad(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        shifted[i] = params[i] + kShift;
        const double plus = f(shifted);
        shifted[i] = params[i] - kShift;
        const double minus = f(shifted);
        shifted[i] = params[i];
        grad[i] = (plus - minus) / 2;
    }
    return grad;
}

ExpectationJacobian
expectation_jacobian(const LayeredAnsatz &ansatz, std::span<const double> params,
                     const StateVector &input_state,
                     std::span<const PauliObservable> observables) {
    if (params.size() != ansatz.num_parameters()) {
        throw ArgumentError("parameter vector length does not match ansatz");
    }
    if (input_state.num_qubits() != ansatz.num_qubits()) {
        throw ArgumentError("input state register does not match ansatz");
    }
    const auto &ops = ansatz.ops();
    const std::size_t num_obs = observables.size();

    // Forward sweep, remembering the state in front of every rotation.
    std::vector<StateVector> before;
    before.reserve(ansatz.num_parameters());
    StateVector state = input_state;
    std::vector<std::size_t> rotation_ops;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].is_rotation) {
            rotation_ops.push_back(i);
            before.push_back(state);
        }
        run_ops(ansatz, params, state, i, i + 1);
    }

    ExpectationJacobian out;
    out.values.resize(num_obs);
    for (std::size_t o = 0; o < num_obs; ++o) {
        out.values[o] = expectation(state, observables[o]);
    }
    out.jacobian = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_obs),
                                         static_cast<Eigen::Index>(params.size()));
    for (std::size_t r = 0; r < rotation_ops.size(); ++r) {
        const std::size_t op_index = rotation_ops[r];
        const auto &op = ops[op_index];
        const double theta = params[op.b];
        StateVector plus = before[r];
        plus.apply_rotation(op.axis, theta + kShift, op.a);
        run_ops(ansatz, params, plus, op_index + 1, ops.size());
        StateVector minus = before[r];
        minus.apply_rotation(op.axis, theta - kShift, op.a);
        run_ops(ansatz, params, minus, op_index + 1, ops.size());
        for (std::size_t o = 0; o < num_obs; ++o) {
            out.jacobian(static_cast<Eigen::Index>(o),
                         static_cast<Eigen::Index>(op.b)) =
                (expectation(plus, observables[o]) -
                 expectation(minus, observables[o])) /
                2;
        }
    }
    return out;
}

BlockDiagMetric BlockDiagMetric::from_blocks(std::vector<Eigen::MatrixXd> matrices) {
    BlockDiagMetric metric;
    std::size_t offset = 0;
    for (auto &m : matrices) {
        if (m.rows() != m.cols()) {
            throw ArgumentError("metric blocks must be square");
        }
        MetricBlock block;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            block.param_indices.push_back(offset++);
        }
        block.matrix = std::move(m);
        metric.blocks.push_back(std::move(block));
    }
    return metric;
}

std::size_t BlockDiagMetric::dimension() const {
    std::size_t n = 0;
    for (const auto &b : blocks) {
        n += b.param_indices.size();
    }
    return n;
}

Eigen::MatrixXd BlockDiagMetric::to_dense() const {
    const auto n = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
    for (const auto &b : blocks) {
        for (std::size_t i = 0; i < b.param_indices.size(); ++i) {
            for (std::size_t j = 0; j < b.param_indices.size(); ++j) {
                dense(static_cast<Eigen::Index>(b.param_indices[i]),
                      static_cast<Eigen::Index>(b.param_indices[j])) =
                    b.matrix(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(j));
            }
        }
    }
    return dense;
}

Eigen::MatrixXd metric_block_for_state(const StateVector &pre_layer_state,
                                       const RotationLayer &layer) {
    const std::size_t n = layer.rotations.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto &a = layer.rotations[i];
            const auto &b = layer.rotations[j];
            if (a.qubit == b.qubit && a.axis != b.axis) {
                throw UnsupportedPairingError(
                    "rotation layer mixes axes on qubit " +
                    std::to_string(a.qubit));
            }
        }
    }
    // Entries from Re<P_i psi|P_j psi> - <P_i><P_j>, sharing the n Pauli
    // images across the block.
    std::vector<StateVector> images;
    std::vector<double> means(n);
    images.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        StateVector image = pre_layer_state;
        image.apply_pauli(layer.rotations[i].axis, layer.rotations[i].qubit);
        means[i] = inner_product(pre_layer_state, image).real();
        images.push_back(std::move(image));
    }
    Eigen::MatrixXd block(static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double joint = inner_product(images[i], images[j]).real();
            const double value = 0.25 * (joint - means[i] * means[j]);
            block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                value;
            block(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                value;
        }
    }
    return block;
}

Eigen::MatrixXd metric_block(const LayeredAnsatz &ansatz,
                             std::span<const double> params,
                             const StateVector &input_state, std::size_t layer) {
    const StateVector pre = state_at_layer(ansatz, params, input_state, layer);
    return metric_block_for_state(pre, ansatz.layer(layer - 1));
}

BlockDiagMetric assemble_metric(const LayeredAnsatz &ansatz,
                                std::span<const double> params,
                                const StateVector &input_state) {
    return assemble_metric(ansatz, params, std::span(&input_state, 1));
}

BlockDiagMetric assemble_metric(const LayeredAnsatz &ansatz,
                                std::span<const double> params,
                                std::span<const StateVector> input_states) {
    if (input_states.empty()) {
        throw ArgumentError("metric needs at least one input state");
    }
    BlockDiagMetric metric;
    for (const auto &layer : ansatz.layers()) {
        MetricBlock block;
        const auto n = static_cast<Eigen::Index>(layer.rotations.size());
        block.matrix = Eigen::MatrixXd::Zero(n, n);
        for (const auto &rot : layer.rotations) {
            block.param_indices.push_back(rot.param_index);
        }
        metric.blocks.push_back(std::move(block));
    }
    for (const auto &input : input_states) {
        const auto states = all_layer_states(ansatz, params, input);
        for (std::size_t l = 0; l < states.size(); ++l) {
            metric.blocks[l].matrix +=
                metric_block_for_state(states[l], ansatz.layer(l));
        }
    }
    if (input_states.size() > 1) {
        const auto count = static_cast<double>(input_states.size());
        for (auto &block : metric.blocks) {
            block.matrix /= count;
        }
    }
    return metric;
}

GradientVector natural_direction(const BlockDiagMetric &metric,
                                 std::span<const double> grad, double damping) {
    if (!(damping >= 0.0)) {
        throw ArgumentError("damping must be >= 0");
    }
    if (metric.dimension() != grad.size()) {
        throw ArgumentError("metric covers " + std::to_string(metric.dimension()) +
                            " parameters but gradient has " +
                            std::to_string(grad.size()));
    }
    GradientVector direction(grad.size(), 0.0);
    for (const auto &block : metric.blocks) {
        const auto n = static_cast<Eigen::Index>(block.param_indices.size());
        Eigen::VectorXd rhs(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto p = block.param_indices[static_cast<std::size_t>(i)];
            if (p >= grad.size()) {
                throw ArgumentError("metric block references parameter " +
                                    std::to_string(p) + " beyond gradient");
            }
            rhs(i) = grad[p];
        }
        Eigen::MatrixXd damped = block.matrix;
        damped.diagonal().array() += damping;
        Eigen::VectorXd solution;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
        // LDLT quietly zeroes null pivots, so inspect them before trusting it.
        const Eigen::VectorXd pivots = ldlt.vectorD();
        const bool regular = ldlt.info() == Eigen::Success && n > 0 &&
                             pivots.minCoeff() > 1e-12 * pivots.maxCoeff() &&
                             ldlt.rcond() >= 1e-12;
        if (regular) {
            solution = ldlt.solve(rhs);
        } else {
            solution = pseudo_inverse_solve(damped, rhs);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            direction[block.param_indices[static_cast<std::size_t>(i)]] =
                solution(i);
        }
    }
    return direction;
}

} // namespace qfl

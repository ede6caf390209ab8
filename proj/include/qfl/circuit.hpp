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
 * Layered variational circuits: tensor-product input encoding followed by
 * alternating CNOT walls and single-axis rotation layers.
 */

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfl/state_vector.hpp"

namespace qfl {

using ParameterVector = std::vector<double>;

struct RotationSpec {
    Axis axis;
    std::size_t qubit;
    std::size_t param_index;

    friend bool operator==(const RotationSpec &, const RotationSpec &) = default;
};

struct EntanglerWall {
    /// (control, target) pairs applied in order.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    friend bool operator==(const EntanglerWall &, const EntanglerWall &) = default;
};

/// One W_l followed by one V_l. The rotations of a layer form one block of
/// the metric tensor.
struct RotationLayer {
    EntanglerWall wall;
    std::vector<RotationSpec> rotations;

    friend bool operator==(const RotationLayer &, const RotationLayer &) = default;
};

class LayeredAnsatz {
  public:
    /// A flattened gate for the evaluation kernels.
    struct Op {
        bool is_rotation;
        Axis axis;
        std::size_t a; ///< rotation qubit, or CNOT control
        std::size_t b; ///< CNOT target, or parameter index for rotations
    };

    /// Validates wiring and parameter numbering; throws ConfigError.
    LayeredAnsatz(std::size_t num_qubits, std::vector<RotationLayer> layers,
                  std::size_t depth = 1);

    [[nodiscard]] std::size_t num_qubits() const { return num_qubits_; }
    [[nodiscard]] std::size_t depth() const { return depth_; }
    [[nodiscard]] std::size_t num_layers() const { return layers_.size(); }
    [[nodiscard]] std::size_t num_parameters() const { return num_parameters_; }
    [[nodiscard]] const std::vector<RotationLayer> &layers() const {
        return layers_;
    }
    [[nodiscard]] const RotationLayer &layer(std::size_t l) const;

    [[nodiscard]] const std::vector<Op> &ops() const { return ops_; }
    /// Index into ops() of the first gate of layer l (0-based), i.e. where
    /// its wall begins. layer_begin(num_layers()) == ops().size().
    [[nodiscard]] std::size_t layer_begin(std::size_t l) const {
        return layer_begin_[l];
    }
    /// Index into ops() of the first rotation of layer l (0-based).
    [[nodiscard]] std::size_t rotations_begin(std::size_t l) const {
        return rotations_begin_[l];
    }

    friend bool operator==(const LayeredAnsatz &a, const LayeredAnsatz &b) {
        return a.num_qubits_ == b.num_qubits_ && a.depth_ == b.depth_ &&
               a.layers_ == b.layers_;
    }

  private:
    std::size_t num_qubits_;
    std::size_t depth_;
    std::vector<RotationLayer> layers_;
    std::size_t num_parameters_{0};
    std::vector<Op> ops_;
    std::vector<std::size_t> layer_begin_;
    std::vector<std::size_t> rotations_begin_;
};

/// Product state with per-qubit amplitudes [cos(pi x/2), sin(pi x/2)];
/// feature i drives qubit i. Throws ValidationError outside [0, 1].
StateVector tpe_encode(std::span<const double> features);

/// (0,1), (1,2), ..., (n-1,0); a single (0,1) for n = 2, empty for n = 1.
EntanglerWall ring_wall(std::size_t num_qubits);

/// CNOTs from every qubit >= hubs onto each hub qubit 0..hubs-1. The gates
/// commute, so the wall copies parities of the other qubits into the hubs.
EntanglerWall hub_wall(std::size_t num_qubits, std::size_t hubs);

/// `depth` copies of: `wall`, then RX, RY and RZ layers on every qubit.
/// P = 3 * num_qubits * depth.
LayeredAnsatz build_block_ansatz(std::size_t num_qubits, std::size_t depth,
                                 const EntanglerWall &wall);

/// build_block_ansatz with ring_wall.
LayeredAnsatz build_ring_ansatz(std::size_t num_qubits, std::size_t depth);

/// Runs ops [first_op, ops().size()) on `state` in place.
void run_ops(const LayeredAnsatz &ansatz, std::span<const double> params,
             StateVector &state, std::size_t first_op, std::size_t last_op);

StateVector evaluate(const LayeredAnsatz &ansatz,
                     std::span<const double> params, StateVector input_state);

/// State after W_l and before V_l; `layer` is 1-based.
StateVector state_at_layer(const LayeredAnsatz &ansatz,
                           std::span<const double> params,
                           StateVector input_state, std::size_t layer);

/// state_at_layer for every layer in one sweep, in layer order.
std::vector<StateVector> all_layer_states(const LayeredAnsatz &ansatz,
                                          std::span<const double> params,
                                          StateVector input_state);

nlohmann::json to_json(const LayeredAnsatz &ansatz);
LayeredAnsatz ansatz_from_json(const nlohmann::json &doc);

} // namespace qfl

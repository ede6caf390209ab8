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

#include "qfl/circuit.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qfl/error.hpp"

namespace qfl {

namespace {

void check_params(const LayeredAnsatz &ansatz, std::span<const double> params) {
    if (params.size() != ansatz.num_parameters()) {
        throw ArgumentError("parameter vector has " +
                            std::to_string(params.size()) +
                            " entries, ansatz expects " +
                            std::to_string(ansatz.num_parameters()));
    }
}

void check_input(const LayeredAnsatz &ansatz, const StateVector &input) {
    if (input.num_qubits() != ansatz.num_qubits()) {
        throw ArgumentError("input state has " +
                            std::to_string(input.num_qubits()) +
                            " qubits, ansatz expects " +
                            std::to_string(ansatz.num_qubits()));
    }
}

Axis parse_axis(const std::string &name) {
    if (name == "X") {
        return Axis::X;
    }
    if (name == "Y") {
        return Axis::Y;
    }
    if (name == "Z") {
        return Axis::Z;
    }
    throw ConfigError("unknown rotation axis '" + name + "'");
}

} // namespace

LayeredAnsatz::LayeredAnsatz(std::size_t num_qubits,
                             std::vector<RotationLayer> layers,
                             std::size_t depth)
    : num_qubits_(num_qubits), depth_(depth), layers_(std::move(layers)) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw ConfigError("ansatz qubit count must be in [1, " +
                          std::to_string(kMaxQubits) + "]");
    }
    if (depth < 1) {
        throw ConfigError("ansatz depth must be >= 1");
    }
    for (const auto &layer : layers_) {
        num_parameters_ += layer.rotations.size();
    }
    std::vector<bool> seen(num_parameters_, false);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto &layer = layers_[l];
        layer_begin_.push_back(ops_.size());
        for (const auto &[control, target] : layer.wall.pairs) {
            if (control >= num_qubits || target >= num_qubits) {
                throw ConfigError("CNOT in layer " + std::to_string(l + 1) +
                                  " addresses a qubit outside the register");
            }
            if (control == target) {
                throw ConfigError("CNOT in layer " + std::to_string(l + 1) +
                                  " has control == target");
            }
            ops_.push_back({false, Axis::X, control, target});
        }
        if (layer.rotations.empty()) {
            throw ConfigError("rotation layer " + std::to_string(l + 1) +
                              " is empty");
        }
        rotations_begin_.push_back(ops_.size());
        for (const auto &rot : layer.rotations) {
            if (rot.qubit >= num_qubits) {
                throw ConfigError("rotation in layer " + std::to_string(l + 1) +
                                  " addresses a qubit outside the register");
            }
            if (rot.param_index >= num_parameters_ || seen[rot.param_index]) {
                throw ConfigError(
                    "parameter indices must be a permutation of 0.." +
                    std::to_string(num_parameters_ - 1) + " (offending index " +
                    std::to_string(rot.param_index) + ")");
            }
            seen[rot.param_index] = true;
            ops_.push_back({true, rot.axis, rot.qubit, rot.param_index});
        }
    }
    layer_begin_.push_back(ops_.size());
}

const RotationLayer &LayeredAnsatz::layer(std::size_t l) const {
    if (l >= layers_.size()) {
        throw IndexError("layer index " + std::to_string(l) + " out of range");
    }
    return layers_[l];
}

StateVector tpe_encode(std::span<const double> features) {
    const std::size_t n = features.size();
    if (n < 1 || n > kMaxQubits) {
        throw ConfigError("feature count must be in [1, " +
                          std::to_string(kMaxQubits) + "]");
    }
    std::vector<double> cosines(n);
    std::vector<double> sines(n);
    for (std::size_t q = 0; q < n; ++q) {
        const double x = features[q];
        if (!(x >= 0.0 && x <= 1.0)) {
            throw ValidationError("feature " + std::to_string(q) + " = " +
                                  std::to_string(x) + " outside [0, 1]");
        }
        const double angle = std::numbers::pi * x / 2;
        cosines[q] = std::cos(angle);
        sines[q] = std::sin(angle);
    }
    std::vector<Complex> amplitudes(std::size_t{1} << n);
    for (std::size_t index = 0; index < amplitudes.size(); ++index) {
        double value = 1.0;
        for (std::size_t q = 0; q < n; ++q) {
            value *= ((index >> q) & 1U) != 0 ? sines[q] : cosines[q];
        }
        amplitudes[index] = value;
    }
    return StateVector::from_amplitudes(std::move(amplitudes));
}

EntanglerWall ring_wall(std::size_t num_qubits) {
    EntanglerWall ring;
    if (num_qubits == 2) {
        ring.pairs.emplace_back(0, 1);
    } else if (num_qubits > 2) {
        for (std::size_t q = 0; q < num_qubits; ++q) {
            ring.pairs.emplace_back(q, (q + 1) % num_qubits);
        }
    }
    return ring;
}

EntanglerWall hub_wall(std::size_t num_qubits, std::size_t hubs) {
    if (hubs < 1 || hubs >= num_qubits) {
        throw ConfigError("hub wall needs 1 <= hubs < num_qubits");
    }
    EntanglerWall wall;
    for (std::size_t control = hubs; control < num_qubits; ++control) {
        for (std::size_t hub = 0; hub < hubs; ++hub) {
            wall.pairs.emplace_back(control, hub);
        }
    }
    return wall;
}

LayeredAnsatz build_block_ansatz(std::size_t num_qubits, std::size_t depth,
                                 const EntanglerWall &wall) {
    if (depth < 1) {
        throw ConfigError("ansatz depth must be >= 1");
    }
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw ConfigError("ansatz qubit count must be in [1, " +
                          std::to_string(kMaxQubits) + "]");
    }
    std::vector<RotationLayer> layers;
    std::size_t next_param = 0;
    for (std::size_t block = 0; block < depth; ++block) {
        for (const Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
            RotationLayer layer;
            if (axis == Axis::X) {
                layer.wall = wall;
            }
            for (std::size_t q = 0; q < num_qubits; ++q) {
                layer.rotations.push_back({axis, q, next_param++});
            }
            layers.push_back(std::move(layer));
        }
    }
    return LayeredAnsatz(num_qubits, std::move(layers), depth);
}

LayeredAnsatz build_ring_ansatz(std::size_t num_qubits, std::size_t depth) {
    if (depth < 1) {
        throw ConfigError("ansatz depth must be >= 1");
    }
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
        throw ConfigError("ansatz qubit count must be in [1, " +
                          std::to_string(kMaxQubits) + "]");
    }
    return build_block_ansatz(num_qubits, depth, ring_wall(num_qubits));
}

void run_ops(const LayeredAnsatz &ansatz, std::span<const double> params,
             StateVector &state, std::size_t first_op, std::size_t last_op) {
    const auto &ops = ansatz.ops();
    for (std::size_t i = first_op; i < last_op; ++i) {
        const auto &op = ops[i];
        if (op.is_rotation) {
            state.apply_rotation(op.axis, params[op.b], op.a);
        } else {
            state.apply_cnot(op.a, op.b);
        }
    }
}

StateVector evaluate(const LayeredAnsatz &ansatz,
                     std::span<const double> params, StateVector input_state) {
    check_params(ansatz, params);
    check_input(ansatz, input_state);
    run_ops(ansatz, params, input_state, 0, ansatz.ops().size());
    return input_state;
}

StateVector state_at_layer(const LayeredAnsatz &ansatz,
                           std::span<const double> params,
                           StateVector input_state, std::size_t layer) {
    check_params(ansatz, params);
    check_input(ansatz, input_state);
    if (layer < 1 || layer > ansatz.num_layers()) {
        throw ArgumentError("layer " + std::to_string(layer) +
                            " outside [1, " +
                            std::to_string(ansatz.num_layers()) + "]");
    }
    run_ops(ansatz, params, input_state, 0, ansatz.rotations_begin(layer - 1));
    return input_state;
}

std::vector<StateVector> all_layer_states(const LayeredAnsatz &ansatz,
                                          std::span<const double> params,
                                          StateVector input_state) {
    check_params(ansatz, params);
    check_input(ansatz, input_state);
    std::vector<StateVector> states;
    states.reserve(ansatz.num_layers());
    std::size_t cursor = 0;
    for (std::size_t l = 0; l < ansatz.num_layers(); ++l) {
        run_ops(ansatz, params, input_state, cursor, ansatz.rotations_begin(l));
        states.push_back(input_state);
        cursor = ansatz.rotations_begin(l);
    }
    return states;
}

nlohmann::json to_json(const LayeredAnsatz &ansatz) {
    nlohmann::json walls = nlohmann::json::array();
    nlohmann::json rotations = nlohmann::json::array();
    for (const auto &layer : ansatz.layers()) {
        nlohmann::json wall = nlohmann::json::array();
        for (const auto &[control, target] : layer.wall.pairs) {
            wall.push_back({control, target});
        }
        walls.push_back(std::move(wall));
        nlohmann::json rots = nlohmann::json::array();
        for (const auto &rot : layer.rotations) {
            rots.push_back({{"axis", std::string(1, axis_name(rot.axis))},
                            {"qubit", rot.qubit},
                            {"param", rot.param_index}});
        }
        rotations.push_back(std::move(rots));
    }
    return {{"num_qubits", ansatz.num_qubits()},
            {"depth", ansatz.depth()},
            {"walls", std::move(walls)},
            {"rotations", std::move(rotations)}};
}

LayeredAnsatz ansatz_from_json(const nlohmann::json &doc) {
    try {
        const auto &walls = doc.at("walls");
        const auto &rotations = doc.at("rotations");
        if (walls.size() != rotations.size()) {
            throw ConfigError("ansatz JSON: walls and rotations differ in length");
        }
        std::vector<RotationLayer> layers(walls.size());
        for (std::size_t l = 0; l < layers.size(); ++l) {
            for (const auto &pair : walls[l]) {
                layers[l].wall.pairs.emplace_back(pair.at(0).get<std::size_t>(),
                                                  pair.at(1).get<std::size_t>());
            }
            for (const auto &rot : rotations[l]) {
                layers[l].rotations.push_back(
                    {parse_axis(rot.at("axis").get<std::string>()),
                     rot.at("qubit").get<std::size_t>(),
                     rot.at("param").get<std::size_t>()});
            }
        }
        return LayeredAnsatz(doc.at("num_qubits").get<std::size_t>(),
                             std::move(layers), doc.at("depth").get<std::size_t>());
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("ansatz JSON: ") + e.what());
    }
}

} // namespace qfl

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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qfl/circuit.hpp"
#include "qfl/dataset.hpp"
#include "qfl/differentiation.hpp"

namespace qfl {

/// Class c is scored by logit_scale * <Z> on readout_qubits[c].
struct ClassifierHead {
    std::size_t num_classes = 2;
    std::vector<std::size_t> readout_qubits;
    /// Fixed softmax temperature; <Z> alone caps logit gaps at 2.
    double logit_scale = 1.0;

    /// Reads classes from qubits 0..num_classes-1.
    static ClassifierHead first_qubits(std::size_t num_classes,
                                       std::size_t num_qubits,
                                       double logit_scale = 1.0);

    /// Throws ConfigError if readouts are not distinct qubits of the register.
    void validate(std::size_t num_qubits) const;
};

struct LossReport {
    double loss = 0.0;
    bool correct = false;
    std::vector<double> logits;
};

/// Mean-reduced statistics over a batch.
struct BatchLoss {
    double loss = 0.0;
    std::size_t correct = 0;
    std::size_t count = 0;
    GradientVector gradient; ///< empty when not requested

    [[nodiscard]] double accuracy() const {
        return count == 0 ? 0.0
                          : static_cast<double>(correct) /
                                static_cast<double>(count);
    }
};

std::vector<double> forward(const ClassifierHead &head,
                            const LayeredAnsatz &ansatz,
                            std::span<const double> params,
                            std::span<const double> features);

/// Argmax with ties going to the lowest class index.
std::size_t predict(std::span<const double> logits);

/// Softmax cross-entropy at unit temperature.
LossReport cross_entropy_loss(std::span<const double> logits, std::size_t label);

/// Mean loss and accuracy over `batch`; with `with_gradient` also the mean
/// parameter-shift gradient, chained through the softmax.
BatchLoss batch_loss(const ClassifierHead &head, const LayeredAnsatz &ansatz,
                     std::span<const double> params, const EncodedDataset &batch,
                     bool with_gradient);

/// Fraction of samples whose argmax logit equals the label.
double evaluate_accuracy(const ClassifierHead &head, const LayeredAnsatz &ansatz,
                         std::span<const double> params,
                         const EncodedDataset &dataset);

/// Encoded input states of every row, in order.
std::vector<StateVector> encode_all(const EncodedDataset &dataset);

} // namespace qfl

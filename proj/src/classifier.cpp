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

#include "qfl/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qfl/error.hpp"

namespace qfl {

namespace {

std::vector<PauliObservable> readouts(const ClassifierHead &head) {
    std::vector<PauliObservable> obs;
    for (const auto q : head.readout_qubits) {
        obs.push_back({Axis::Z, q});
    }
    return obs;
}

void check_batch(const ClassifierHead &head, const LayeredAnsatz &ansatz,
                 const EncodedDataset &batch) {
    head.validate(ansatz.num_qubits());
    if (batch.size() == 0) {
        throw ArgumentError("dataset is empty");
    }
    if (batch.num_features != ansatz.num_qubits()) {
        throw ArgumentError("dataset has " + std::to_string(batch.num_features) +
                            " features but the circuit has " +
                            std::to_string(ansatz.num_qubits()) + " qubits");
    }
}

} // namespace

ClassifierHead ClassifierHead::first_qubits(std::size_t num_classes,
                                            std::size_t num_qubits,
                                            double logit_scale) {
    ClassifierHead head;
    head.num_classes = num_classes;
    head.logit_scale = logit_scale;
    for (std::size_t c = 0; c < num_classes; ++c) {
        head.readout_qubits.push_back(c);
    }
    head.validate(num_qubits);
    return head;
}

void ClassifierHead::validate(std::size_t num_qubits) const {
    if (num_classes < 1 || readout_qubits.size() != num_classes) {
        throw ConfigError("head needs one readout qubit per class");
    }
    if (!(logit_scale > 0.0) || !std::isfinite(logit_scale)) {
        throw ConfigError("logit scale must be finite and > 0");
    }
    for (std::size_t i = 0; i < readout_qubits.size(); ++i) {
        if (readout_qubits[i] >= num_qubits) {
            throw ConfigError("readout qubit " +
                              std::to_string(readout_qubits[i]) +
                              " outside the register");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (readout_qubits[i] == readout_qubits[j]) {
                throw ConfigError("readout qubits must be distinct");
            }
        }
    }
}

std::vector<double> forward(const ClassifierHead &head,
                            const LayeredAnsatz &ansatz,
                            std::span<const double> params,
                            std::span<const double> features) {
    head.validate(ansatz.num_qubits());
    const StateVector out = evaluate(ansatz, params, tpe_encode(features));
    std::vector<double> logits;
    logits.reserve(head.num_classes);
    for (const auto q : head.readout_qubits) {
        logits.push_back(head.logit_scale * expectation(out, {Axis::Z, q}));
    }
    return logits;
}

std::size_t predict(std::span<const double> logits) {
    return static_cast<std::size_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
}

LossReport cross_entropy_loss(std::span<const double> logits, std::size_t label) {
    if (label >= logits.size()) {
        throw ArgumentError("label " + std::to_string(label) +
                            " outside the class range");
    }
    const double top = *std::max_element(logits.begin(), logits.end());
    double partition = 0.0;
    for (const double z : logits) {
        partition += std::exp(z - top);
    }
    LossReport report;
    report.loss = std::log(partition) + top - logits[label];
    report.correct = predict(logits) == label;
    report.logits.assign(logits.begin(), logits.end());
    return report;
}

BatchLoss batch_loss(const ClassifierHead &head, const LayeredAnsatz &ansatz,
                     std::span<const double> params, const EncodedDataset &batch,
                     bool with_gradient) {
    check_batch(head, ansatz, batch);
    const auto obs = readouts(head);
    BatchLoss out;
    out.count = batch.size();
    if (with_gradient) {
        out.gradient.assign(ansatz.num_parameters(), 0.0);
    }
    for (std::size_t n = 0; n < batch.size(); ++n) {
        const std::size_t label = batch.labels[n];
        const StateVector input = tpe_encode(batch.row(n));
        LossReport report;
        if (with_gradient) {
            const auto jac = expectation_jacobian(ansatz, params, input, obs);
            std::vector<double> logits = jac.values;
            for (auto &z : logits) {
                z *= head.logit_scale;
            }
            report = cross_entropy_loss(logits, label);
            // dL/dz_c = softmax_c - [c == label], then through the scale.
            const double top = *std::max_element(logits.begin(), logits.end());
            std::vector<double> weights(obs.size());
            double partition = 0.0;
            for (std::size_t c = 0; c < obs.size(); ++c) {
                weights[c] = std::exp(logits[c] - top);
                partition += weights[c];
            }
            for (std::size_t c = 0; c < obs.size(); ++c) {
                weights[c] = head.logit_scale *
                             (weights[c] / partition - (c == label ? 1.0 : 0.0));
            }
            for (std::size_t p = 0; p < out.gradient.size(); ++p) {
                double g = 0.0;
                for (std::size_t c = 0; c < obs.size(); ++c) {
                    g += weights[c] * jac.jacobian(static_cast<Eigen::Index>(c),
                                                   static_cast<Eigen::Index>(p));
                }
                out.gradient[p] += g;
            }
        } else {
            const StateVector final_state = evaluate(ansatz, params, input);
            std::vector<double> logits;
            for (const auto &o : obs) {
                logits.push_back(head.logit_scale * expectation(final_state, o));
            }
            report = cross_entropy_loss(logits, label);
        }
        out.loss += report.loss;
        out.correct += report.correct ? 1 : 0;
    }
    const auto count = static_cast<double>(batch.size());
    out.loss /= count;
    for (auto &g : out.gradient) {
        g /= count;
    }
    return out;
}

double evaluate_accuracy(const ClassifierHead &head, const LayeredAnsatz &ansatz,
                         std::span<const double> params,
                         const EncodedDataset &dataset) {
    return batch_loss(head, ansatz, params, dataset, false).accuracy();
}

std::vector<StateVector> encode_all(const EncodedDataset &dataset) {
    std::vector<StateVector> states;
    states.reserve(dataset.size());
    for (std::size_t n = 0; n < dataset.size(); ++n) {
        states.push_back(tpe_encode(dataset.row(n)));
    }
    return states;
}

} // namespace qfl

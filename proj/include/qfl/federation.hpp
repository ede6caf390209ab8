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
 * In-process simulation of federated training with a coordinator and K
 * participants. Participants upload one (optionally metric-preconditioned)
 * gradient per round; the coordinator combines them with weights N_k / N
 * and broadcasts the new global parameters. Traffic is modelled by byte
 * counters at 8 bytes per real.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qfl/classifier.hpp"
#include "qfl/optimizers.hpp"

namespace qfl {

inline constexpr std::uint64_t kBytesPerReal = 8;

struct Participant {
    std::size_t id = 0;
    EncodedDataset shard;
    ParameterVector local_params;
};

struct FederationState {
    ParameterVector global_params;
    std::vector<Participant> participants;
    std::size_t round = 0;
    double learning_rate = 0.05;
    std::uint64_t bytes_up = 0;
    std::uint64_t bytes_down = 0;

    /// N = sum of shard sizes.
    [[nodiscard]] std::size_t total_samples() const;
    /// Bytes of one full parameter vector sent by every participant.
    [[nodiscard]] std::uint64_t payload_bytes() const;
};

/// Participants get ids 0..K-1 in shard order. Nothing is broadcast yet.
FederationState make_federation(ParameterVector initial_params,
                                std::vector<EncodedDataset> shards,
                                double learning_rate);

/// Copies the global parameters to every participant.
FederationState broadcast(FederationState state);

enum class Upload { NaturalGradient, RawGradient };

struct LocalStepOptions {
    Upload upload = Upload::NaturalGradient;
    /// 0 selects the whole shard.
    std::size_t batch_size = 0;
    double damping = 1e-6;
    /// Offsets the minibatch window when batch_size < N_k.
    std::size_t round = 0;
};

/// Rows used for a minibatch: a window of `batch_size` rows starting at
/// round * batch_size, wrapping around the dataset.
EncodedDataset minibatch(const EncodedDataset &data, std::size_t batch_size,
                         std::size_t round);

/// Gradient of the participant's mean loss at its local parameters,
/// preconditioned by the batch-averaged metric when uploading natural
/// gradients. Local parameters are left untouched.
GradientVector local_step(const Participant &participant,
                          const LayeredAnsatz &ansatz,
                          const ClassifierHead &head,
                          const LocalStepOptions &options);

/// sum_k (N_k / N) d_k, summed in ascending participant id.
/// `directions[i]` belongs to `state.participants[i]`.
GradientVector aggregate(const FederationState &state,
                         std::span<const GradientVector> directions);

/// theta <- theta - eta * aggregate(...); advances the round and counts the
/// uploads.
FederationState aggregate_and_update(FederationState state,
                                     std::span<const GradientVector> directions);

struct RoundReport {
    std::size_t round = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::vector<double> gradient_norms;
    std::uint64_t bytes_this_round = 0;
    std::uint64_t bytes_up = 0;
    std::uint64_t bytes_down = 0;
    double wall_ms = 0.0;
};

struct TrainingSetup {
    LayeredAnsatz ansatz;
    ClassifierHead head;
    std::vector<EncodedDataset> shards;
    EncodedDataset test;
    ParameterVector initial_params;
    OptimizerKind optimizer = OptimizerKind::Qngd;
    Hyperparameters hyper;
    std::size_t rounds = 0;
    std::size_t batch_size = 0;
    /// Worker threads for the participants' local steps.
    std::size_t threads = 1;
    bool record_wall_time = false;
};

struct TrainingResult {
    std::vector<RoundReport> reports;
    FederationState final_state;
    /// Global parameters after each round, starting with the initial ones.
    std::vector<ParameterVector> trajectory;
};

/// Broadcast, then per round: local steps, aggregation, global update,
/// broadcast, evaluation. Baseline optimizers upload raw gradients and keep
/// their accumulators at the coordinator. Non-finite values raise
/// DivergenceError naming the round.
TrainingResult
run_federated_training(const TrainingSetup &setup,
                       const std::function<void(const RoundReport &)> &on_round = {});

/// Plain single-model training on one dataset, one full step per round.
/// Returns the parameter trajectory including the initial point.
std::vector<ParameterVector>
train_single_device(const LayeredAnsatz &ansatz, const ClassifierHead &head,
                    const EncodedDataset &data, ParameterVector initial_params,
                    OptimizerKind optimizer, const Hyperparameters &hyper,
                    std::size_t rounds, std::size_t batch_size = 0);

} // namespace qfl

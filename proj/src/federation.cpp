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

#include "qfl/federation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>
#include <thread>

#include "qfl/error.hpp"

namespace qfl {

namespace {

double l2_norm(std::span<const double> v) {
    double sum = 0.0;
    for (const double x : v) {
        sum += x * x;
    }
    return std::sqrt(sum);
}

/// Evaluates the global model on the union of shards, in shard order.
BatchLoss training_metrics(const TrainingSetup &setup,
                           std::span<const double> params) {
    BatchLoss total;
    for (const auto &s : setup.shards) {
        const auto part = batch_loss(setup.head, setup.ansatz, params, s, false);
        total.loss += part.loss * static_cast<double>(part.count);
        total.correct += part.correct;
        total.count += part.count;
    }
    total.loss /= static_cast<double>(total.count);
    return total;
}

std::vector<GradientVector>
run_local_steps(const FederationState &state, const TrainingSetup &setup,
                const LocalStepOptions &options) {
    const std::size_t k = state.participants.size();
    std::vector<GradientVector> uploads(k);
    std::vector<std::exception_ptr> failures(k);
    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < k; i += stride) {
            try {
                uploads[i] = local_step(state.participants[i], setup.ansatz,
                                        setup.head, options);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(setup.threads, 1, k);
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work, w, workers);
        }
    }
    for (const auto &failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    return uploads;
}

} // namespace

std::size_t FederationState::total_samples() const {
    std::size_t n = 0;
    for (const auto &p : participants) {
        n += p.shard.size();
    }
    return n;
}

std::uint64_t FederationState::payload_bytes() const {
    return static_cast<std::uint64_t>(participants.size()) *
           static_cast<std::uint64_t>(global_params.size()) * kBytesPerReal;
}

FederationState make_federation(ParameterVector initial_params,
                                std::vector<EncodedDataset> shards,
                                double learning_rate) {
    if (shards.empty()) {
        throw ConfigError("federation needs at least one participant");
    }
    FederationState state;
    state.global_params = std::move(initial_params);
    state.learning_rate = learning_rate;
    for (std::size_t k = 0; k < shards.size(); ++k) {
        if (shards[k].size() == 0) {
            throw ConfigError("participant " + std::to_string(k) +
                              " has an empty shard");
        }
        state.participants.push_back({k, std::move(shards[k]), {}});
    }
    return state;
}

FederationState broadcast(FederationState state) {
    for (auto &p : state.participants) {
        p.local_params = state.global_params;
    }
    state.bytes_down += state.payload_bytes();
    return state;
}

EncodedDataset minibatch(const EncodedDataset &data, std::size_t batch_size,
                         std::size_t round) {
    if (batch_size == 0 || batch_size >= data.size()) {
        return data;
    }
    std::vector<std::size_t> rows(batch_size);
    const std::size_t start = (round * batch_size) % data.size();
    for (std::size_t j = 0; j < batch_size; ++j) {
        rows[j] = (start + j) % data.size();
    }
    return data.subset(rows);
}

GradientVector local_step(const Participant &participant,
                          const LayeredAnsatz &ansatz,
                          const ClassifierHead &head,
                          const LocalStepOptions &options) {
    if (participant.shard.size() == 0) {
        throw ConfigError("participant " + std::to_string(participant.id) +
                          " has an empty shard");
    }
    if (options.batch_size > participant.shard.size()) {
        throw ConfigError("batch size exceeds shard of participant " +
                          std::to_string(participant.id));
    }
    const EncodedDataset batch =
        minibatch(participant.shard, options.batch_size, options.round);
    const auto &params = participant.local_params;
    BatchLoss stats = batch_loss(head, ansatz, params, batch, true);
    require_finite(stats.gradient, "gradient of participant " +
                                       std::to_string(participant.id));
    if (options.upload == Upload::RawGradient) {
        return std::move(stats.gradient);
    }
    const auto inputs = encode_all(batch);
    const BlockDiagMetric metric = assemble_metric(ansatz, params, inputs);
    GradientVector direction =
        natural_direction(metric, stats.gradient, options.damping);
    require_finite(direction, "natural gradient of participant " +
                                  std::to_string(participant.id));
    return direction;
}

GradientVector aggregate(const FederationState &state,
                         std::span<const GradientVector> directions) {
    const std::size_t k = state.participants.size();
    if (directions.size() != k) {
        throw ProtocolError("expected " + std::to_string(k) +
                            " uploads, received " +
                            std::to_string(directions.size()));
    }
    const std::size_t p = state.global_params.size();
    for (const auto &d : directions) {
        if (d.size() != p) {
            throw ProtocolError("upload of length " + std::to_string(d.size()) +
                                " for a model with " + std::to_string(p) +
                                " parameters");
        }
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return state.participants[a].id < state.participants[b].id;
    });
    const auto total = static_cast<double>(state.total_samples());
    GradientVector combined(p, 0.0);
    for (const std::size_t i : order) {
        const double weight =
            static_cast<double>(state.participants[i].shard.size()) / total;
        for (std::size_t j = 0; j < p; ++j) {
            combined[j] += weight * directions[i][j];
        }
    }
    return combined;
}

FederationState aggregate_and_update(FederationState state,
                                     std::span<const GradientVector> directions) {
    const GradientVector combined = aggregate(state, directions);
    state.global_params =
        sgd_step(state.global_params, combined, state.learning_rate);
    ++state.round;
    state.bytes_up += state.payload_bytes();
    return state;
}

TrainingResult
run_federated_training(const TrainingSetup &setup,
                       const std::function<void(const RoundReport &)> &on_round) {
    using Clock = std::chrono::steady_clock;
    setup.head.validate(setup.ansatz.num_qubits());
    if (setup.initial_params.size() != setup.ansatz.num_parameters()) {
        throw ConfigError("initial parameters do not match the ansatz");
    }
    const bool natural = setup.optimizer == OptimizerKind::Qngd;

    TrainingResult result;
    FederationState state = make_federation(setup.initial_params, setup.shards,
                                            setup.hyper.learning_rate);
    state = broadcast(std::move(state));
    OptimizerState optimizer = OptimizerState::fresh(
        setup.optimizer, setup.hyper, setup.ansatz.num_parameters());
    result.trajectory.push_back(state.global_params);

    for (std::size_t t = 0; t < setup.rounds; ++t) {
        const auto started = Clock::now();
        const std::uint64_t bytes_before = state.bytes_up + state.bytes_down;
        try {
            LocalStepOptions options;
            options.upload = natural ? Upload::NaturalGradient : Upload::RawGradient;
            options.batch_size = setup.batch_size;
            options.damping = setup.hyper.damping;
            options.round = t;
            const auto uploads = run_local_steps(state, setup, options);

            RoundReport report;
            for (const auto &u : uploads) {
                report.gradient_norms.push_back(l2_norm(u));
            }
            switch (setup.optimizer) {
            case OptimizerKind::Qngd:
            case OptimizerKind::Sgd:
                state = aggregate_and_update(std::move(state), uploads);
                break;
            case OptimizerKind::Adagrad:
            case OptimizerKind::Adam: {
                const GradientVector mean = aggregate(state, uploads);
                auto [next_state, next_params] =
                    setup.optimizer == OptimizerKind::Adam
                        ? adam_step(std::move(optimizer), state.global_params, mean)
                        : adagrad_step(std::move(optimizer), state.global_params,
                                       mean);
                optimizer = std::move(next_state);
                state.global_params = std::move(next_params);
                ++state.round;
                state.bytes_up += state.payload_bytes();
                break;
            }
            }
            require_finite(state.global_params, "global parameter");
            state = broadcast(std::move(state));

            const BatchLoss train = training_metrics(setup, state.global_params);
            report.round = state.round;
            report.train_loss = train.loss;
            report.train_accuracy = train.accuracy();
            report.test_accuracy =
                setup.test.size() == 0
                    ? 0.0
                    : evaluate_accuracy(setup.head, setup.ansatz,
                                        state.global_params, setup.test);
            report.bytes_up = state.bytes_up;
            report.bytes_down = state.bytes_down;
            report.bytes_this_round = state.bytes_up + state.bytes_down - bytes_before;
            if (!std::isfinite(report.train_loss)) {
                throw DivergenceError("training loss is not finite");
            }
            if (setup.record_wall_time) {
                report.wall_ms = std::chrono::duration<double, std::milli>(
                                     Clock::now() - started)
                                     .count();
            }
            result.trajectory.push_back(state.global_params);
            if (on_round) {
                on_round(report);
            }
            result.reports.push_back(std::move(report));
        } catch (const DivergenceError &e) {
            throw DivergenceError("round " + std::to_string(t + 1) + ": " +
                                  e.what());
        }
    }
    result.final_state = std::move(state);
    return result;
}

std::vector<ParameterVector>
train_single_device(const LayeredAnsatz &ansatz, const ClassifierHead &head,
                    const EncodedDataset &data, ParameterVector initial_params,
                    OptimizerKind optimizer, const Hyperparameters &hyper,
                    std::size_t rounds, std::size_t batch_size) {
    std::vector<ParameterVector> trajectory{initial_params};
    ParameterVector params = std::move(initial_params);
    OptimizerState state =
        OptimizerState::fresh(optimizer, hyper, ansatz.num_parameters());
    for (std::size_t t = 0; t < rounds; ++t) {
        const EncodedDataset batch = minibatch(data, batch_size, t);
        const BatchLoss stats = batch_loss(head, ansatz, params, batch, true);
        switch (optimizer) {
        case OptimizerKind::Sgd:
            params = sgd_step(params, stats.gradient, hyper.learning_rate);
            break;
        case OptimizerKind::Adagrad:
            std::tie(state, params) =
                adagrad_step(std::move(state), params, stats.gradient);
            break;
        case OptimizerKind::Adam:
            std::tie(state, params) =
                adam_step(std::move(state), params, stats.gradient);
            break;
        case OptimizerKind::Qngd: {
            const BlockDiagMetric metric =
                assemble_metric(ansatz, params, encode_all(batch));
            params = qngd_step(params, stats.gradient, metric,
                               hyper.learning_rate, hyper.damping);
            break;
        }
        }
        trajectory.push_back(params);
    }
    return trajectory;
}

} // namespace qfl

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
#include <string>
#include <utility>
#include <vector>

#include "qfl/differentiation.hpp"

namespace qfl {

enum class OptimizerKind { Sgd, Adagrad, Adam, Qngd };

std::string to_string(OptimizerKind kind);
/// Accepts "sgd", "adagrad", "adam", "qngd" and "fqngd".
OptimizerKind parse_optimizer_kind(const std::string &name);
/// Learning rate used when a config leaves it unset.
double default_learning_rate(OptimizerKind kind);

struct Hyperparameters {
    double learning_rate = 0.05;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double adagrad_epsilon = 1e-8;
    double damping = 1e-6;

    friend bool operator==(const Hyperparameters &,
                           const Hyperparameters &) = default;
};

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::Sgd;
    Hyperparameters hyper;
    std::size_t step_count = 0;
    /// Adam first moment.
    std::vector<double> first_moment;
    /// Adam second moment, or the Adagrad running sum of squares.
    std::vector<double> second_moment;

    static OptimizerState fresh(OptimizerKind kind, const Hyperparameters &hyper,
                                std::size_t num_parameters);

    friend bool operator==(const OptimizerState &,
                           const OptimizerState &) = default;
};

ParameterVector sgd_step(std::span<const double> params,
                         std::span<const double> grad, double learning_rate);

std::pair<OptimizerState, ParameterVector>
adagrad_step(OptimizerState state, std::span<const double> params,
             std::span<const double> grad);

std::pair<OptimizerState, ParameterVector>
adam_step(OptimizerState state, std::span<const double> params,
          std::span<const double> grad);

ParameterVector qngd_step(std::span<const double> params,
                          std::span<const double> grad,
                          const BlockDiagMetric &metric, double learning_rate,
                          double damping);

/// Throws DivergenceError naming `what` if any entry is NaN or infinite.
void require_finite(std::span<const double> values, const std::string &what);

} // namespace qfl

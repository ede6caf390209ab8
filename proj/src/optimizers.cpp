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

#include "qfl/optimizers.hpp"

#include <cmath>

#include "qfl/error.hpp"

namespace qfl {

namespace {

void check_step_inputs(std::span<const double> params,
                       std::span<const double> grad, double learning_rate) {
    if (params.size() != grad.size()) {
        throw ArgumentError("gradient length " + std::to_string(grad.size()) +
                            " does not match parameter length " +
                            std::to_string(params.size()));
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ArgumentError("learning rate must be finite and >= 0");
    }
    require_finite(grad, "gradient");
}

void check_state(const OptimizerState &state, OptimizerKind expected,
                 std::size_t n) {
    if (state.kind != expected) {
        throw ArgumentError("optimizer state kind mismatch");
    }
    if (state.second_moment.size() != n ||
        (expected == OptimizerKind::Adam && state.first_moment.size() != n)) {
        throw ArgumentError("optimizer accumulators sized for a different model");
    }
}

} // namespace

std::string to_string(OptimizerKind kind) {
    switch (kind) {
    case OptimizerKind::Sgd:
        return "sgd";
    case OptimizerKind::Adagrad:
        return "adagrad";
    case OptimizerKind::Adam:
        return "adam";
    case OptimizerKind::Qngd:
        return "fqngd";
    }
    return "unknown";
}

OptimizerKind parse_optimizer_kind(const std::string &name) {
    if (name == "sgd") {
        return OptimizerKind::Sgd;
    }
    if (name == "adagrad") {
        return OptimizerKind::Adagrad;
    }
    if (name == "adam") {
        return OptimizerKind::Adam;
    }
    if (name == "fqngd" || name == "qngd") {
        return OptimizerKind::Qngd;
    }
    throw ConfigError("unknown optimizer '" + name + "'");
}

double default_learning_rate(OptimizerKind kind) {
    return kind == OptimizerKind::Adam ? 0.01 : 0.05;
}

OptimizerState OptimizerState::fresh(OptimizerKind kind,
                                     const Hyperparameters &hyper,
                                     std::size_t num_parameters) {
    OptimizerState state;
    state.kind = kind;
    state.hyper = hyper;
    state.second_moment.assign(num_parameters, 0.0);
    if (kind == OptimizerKind::Adam) {
        state.first_moment.assign(num_parameters, 0.0);
    }
    return state;
}

void require_finite(std::span<const double> values, const std::string &what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw DivergenceError(what + " entry " + std::to_string(i) +
                                  " is not finite");
        }
    }
}

ParameterVector sgd_step(std::span<const double> params,
                         std::span<const double> grad, double learning_rate) {
    check_step_inputs(params, grad, learning_rate);
    ParameterVector next(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        next[i] = params[i] - learning_rate * grad[i];
    }
    require_finite(next, "parameter");
    return next;
}

std::pair<OptimizerState, ParameterVector>
adagrad_step(OptimizerState state, std::span<const double> params,
             std::span<const double> grad) {
    check_step_inputs(params, grad, state.hyper.learning_rate);
    check_state(state, OptimizerKind::Adagrad, params.size());
    ParameterVector next(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.second_moment[i] += grad[i] * grad[i];
        next[i] = params[i] - state.hyper.learning_rate * grad[i] /
                                  (std::sqrt(state.second_moment[i]) +
                                   state.hyper.adagrad_epsilon);
    }
    ++state.step_count;
    require_finite(next, "parameter");
    return {std::move(state), std::move(next)};
}

std::pair<OptimizerState, ParameterVector>
adam_step(OptimizerState state, std::span<const double> params,
          std::span<const double> grad) {
    check_step_inputs(params, grad, state.hyper.learning_rate);
    check_state(state, OptimizerKind::Adam, params.size());
    const auto &h = state.hyper;
    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(h.adam_beta1, t);
    const double correction2 = 1.0 - std::pow(h.adam_beta2, t);
    ParameterVector next(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.first_moment[i] =
            h.adam_beta1 * state.first_moment[i] + (1.0 - h.adam_beta1) * grad[i];
        state.second_moment[i] = h.adam_beta2 * state.second_moment[i] +
                                 (1.0 - h.adam_beta2) * grad[i] * grad[i];
        const double m_hat = state.first_moment[i] / correction1;
        const double v_hat = state.second_moment[i] / correction2;
        next[i] = params[i] -
                  h.learning_rate * m_hat / (std::sqrt(v_hat) + h.adam_epsilon);
    }
    require_finite(next, "parameter");
    return {std::move(state), std::move(next)};
}

ParameterVector qngd_step(std::span<const double> params,
                          std::span<const double> grad,
                          const BlockDiagMetric &metric, double learning_rate,
                          double damping) {
    check_step_inputs(params, grad, learning_rate);
    const GradientVector direction = natural_direction(metric, grad, damping);
    require_finite(direction, "natural gradient");
    return sgd_step(params, direction, learning_rate);
}

} // namespace qfl

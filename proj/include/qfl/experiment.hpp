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
 * Experiment configuration and the train/compare drivers behind the CLI.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfl/dataset.hpp"
#include "qfl/federation.hpp"

namespace qfl {

/// Environment variable that overrides ExperimentConfig::data_dir.
inline constexpr const char *kDataDirEnv = "QFL_DATA_DIR";

enum class DataSource { Mnist, Synthetic };

struct ExperimentConfig {
    std::string task = "binary";
    std::vector<int> digits{2, 5};
    DataSource source = DataSource::Mnist;
    std::size_t num_features = 8;
    ReductionMethod feature_method = ReductionMethod::AvgPool;
    std::size_t depth = 2;
    /// CNOT wall of every block: "ring" or "hub" (see hub_wall; the hubs
    /// are the readout qubits).
    std::string entangler = "ring";
    std::size_t participants = 6;
    std::size_t rounds = 50;
    OptimizerKind optimizer = OptimizerKind::Qngd;
    /// Unset means default_learning_rate(optimizer).
    std::optional<double> learning_rate;
    double damping = 1e-6;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double adagrad_epsilon = 1e-8;
    /// Initial parameters are uniform in [-init_range, init_range].
    double init_range = 0.1;
    /// Multiplies every <Z> readout before the softmax.
    double logit_scale = 1.0;
    std::uint64_t seed = 0;
    /// Training rows kept after digit selection; 0 keeps all.
    std::size_t train_samples = 600;
    /// Test rows kept; 0 keeps all.
    std::size_t test_samples = 0;
    /// Rows per local step; 0 uses the whole shard.
    std::size_t batch_size = 0;
    /// Row counts for DataSource::Synthetic.
    std::size_t synthetic_train = 120;
    std::size_t synthetic_test = 120;
    double accuracy_threshold = 0.9;
    std::size_t threads = 1;
    bool record_wall_time = false;
    std::string data_dir;
    std::string output_dir = "qfl_out";

    [[nodiscard]] std::size_t num_classes() const { return digits.size(); }
    [[nodiscard]] double effective_learning_rate() const {
        return learning_rate.value_or(default_learning_rate(optimizer));
    }
    [[nodiscard]] Hyperparameters hyperparameters() const;

    friend bool operator==(const ExperimentConfig &,
                           const ExperimentConfig &) = default;
};

nlohmann::json to_json(const ExperimentConfig &config);
/// Rejects unknown keys and ill-typed values; missing keys keep defaults.
/// Throws ConfigError listing every problem found.
ExperimentConfig config_from_json(const nlohmann::json &doc);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Every constraint problem in `config`, empty when valid.
std::vector<std::string> validation_errors(const ExperimentConfig &config);
/// Throws ConfigError listing all of validation_errors().
void validate(const ExperimentConfig &config);

/// data_dir, replaced by $QFL_DATA_DIR when that is set.
std::filesystem::path resolve_data_dir(const ExperimentConfig &config);

struct PreparedData {
    std::vector<EncodedDataset> shards;
    EncodedDataset test;
};

PreparedData prepare_data(const ExperimentConfig &config);

ParameterVector initial_parameters(const ExperimentConfig &config,
                                   std::size_t count);

/// Block ansatz with the configured wall.
LayeredAnsatz make_ansatz(const ExperimentConfig &config);

TrainingSetup make_setup(const ExperimentConfig &config, PreparedData data);

struct SummaryRow {
    std::string optimizer;
    double final_test_accuracy = 0.0;
    double final_train_accuracy = 0.0;
    std::optional<std::size_t> rounds_to_threshold;
    std::uint64_t total_bytes = 0;
};

struct ExperimentOutcome {
    TrainingResult training;
    SummaryRow summary;
};

/// First round whose train accuracy reaches `threshold`.
std::optional<std::size_t>
rounds_to_threshold(const std::vector<RoundReport> &reports, double threshold);

ExperimentOutcome run_experiment(const ExperimentConfig &config);

/// Learning-curve CSV: round,train_loss,train_acc,test_acc,bytes_up,
/// bytes_down,wall_ms. Numbers use shortest round-trip formatting.
std::string curve_csv(const std::vector<RoundReport> &reports);

std::string summary_csv(const std::vector<SummaryRow> &rows);

/// Runs the experiment and writes curve.csv, params.bin, params.json and
/// summary.csv into config.output_dir.
ExperimentOutcome cmd_train(const ExperimentConfig &config);

/// Checks that the configs differ only in their optimizer and that no
/// optimizer repeats. Throws ConfigError otherwise.
void validate_comparison(const std::vector<ExperimentConfig> &configs);

/// Runs every config, writes compare.csv (curves with a leading optimizer
/// column) and compare_summary.csv into the first config's output_dir, and
/// returns the table sorted by rounds-to-threshold (never reached last).
std::vector<SummaryRow> cmd_compare(const std::vector<ExperimentConfig> &configs);

/// Human-readable rendering of a summary table.
std::string format_summary(const std::vector<SummaryRow> &rows);

} // namespace qfl

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

#include "qfl/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "qfl/error.hpp"
#include "qfl/selftest.hpp"

namespace qfl {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig Toy(const std::string &name) {
    ExperimentConfig c;
    c.source = DataSource::Synthetic;
    c.num_features = 4;
    c.depth = 1;
    c.participants = 2;
    c.rounds = 3;
    c.synthetic_train = 20;
    c.synthetic_test = 10;
    c.seed = 5;
    c.output_dir = (fs::temp_directory_path() / ("qfl_experiment_" + name)).string();
    fs::remove_all(c.output_dir);
    return c;
}

TEST(Config, RoundTrip) {
    ExperimentConfig c;
    c.task = "ternary";
    c.digits = {1, 3, 7};
    c.feature_method = ReductionMethod::Pca;
    c.optimizer = OptimizerKind::Adam;
    c.learning_rate = 0.02;
    c.seed = 123456789012345ULL;
    c.damping = 1e-4;
    c.logit_scale = 4.0;
    c.entangler = "hub";
    c.record_wall_time = true;
    c.data_dir = "/data/mnist";
    EXPECT_EQ(config_from_json(to_json(c)), c);
    EXPECT_EQ(config_from_json(nlohmann::json::parse(to_json(c).dump())), c);
    const ExperimentConfig defaults;
    EXPECT_EQ(config_from_json(to_json(defaults)), defaults);
    EXPECT_EQ(config_from_json(nlohmann::json::object()), defaults);
}

TEST(Config, RejectsUnknownKeysAndListsAllProblems) {
    auto doc = to_json(ExperimentConfig{});
    doc["learnign_rate"] = 0.1;
    doc["depth"] = "two";
    try {
        config_from_json(doc);
        FAIL() << "expected a configuration error";
    } catch (const ConfigError &e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("learnign_rate"), std::string::npos);
        EXPECT_NE(msg.find("depth"), std::string::npos);
    }
}

TEST(Config, ValidationCollectsEveryError) {
    ExperimentConfig c;
    c.depth = 0;
    c.num_features = 5;
    c.damping = -1.0;
    c.participants = 0;
    const auto errors = validation_errors(c);
    EXPECT_GE(errors.size(), 4u);
    EXPECT_THROW(validate(c), ConfigError);
    EXPECT_TRUE(validation_errors(ExperimentConfig{}).empty());
}

TEST(Config, EntanglerChoices) {
    ExperimentConfig c;
    c.entangler = "mesh";
    EXPECT_FALSE(validation_errors(c).empty());
    c.entangler = "hub";
    EXPECT_TRUE(validation_errors(c).empty());
    EXPECT_EQ(make_ansatz(c), build_block_ansatz(8, 2, hub_wall(8, 2)));
    c.num_features = 4;
    c.digits = {1, 3, 7};
    c.task = "ternary";
    EXPECT_TRUE(validation_errors(c).empty());
    c.entangler = "ring";
    EXPECT_EQ(make_ansatz(c), build_ring_ansatz(4, 2));
}

TEST(Config, TaskMustMatchDigits) {
    ExperimentConfig c;
    c.task = "ternary";
    EXPECT_FALSE(validation_errors(c).empty());
    c.digits = {1, 3, 7};
    EXPECT_TRUE(validation_errors(c).empty());
}

TEST(Config, LoadFromFile) {
    const auto path = fs::temp_directory_path() / "qfl_config_test.json";
    std::ofstream(path) << R"({"rounds": 7, "optimizer": "sgd"})";
    const auto c = load_config(path);
    EXPECT_EQ(c.rounds, 7u);
    EXPECT_EQ(c.optimizer, OptimizerKind::Sgd);
    EXPECT_EQ(c.effective_learning_rate(), 0.05);
    std::ofstream(path) << "{not json";
    EXPECT_THROW(load_config(path), ConfigError);
    fs::remove(path);
}

TEST(Config, DataDirEnvironmentOverride) {
    ExperimentConfig c;
    c.data_dir = "/from/config";
    const char *saved = std::getenv(kDataDirEnv);
    const std::string restore = saved ? saved : "";
    ::unsetenv(kDataDirEnv);
    EXPECT_EQ(resolve_data_dir(c), fs::path("/from/config"));
    ::setenv(kDataDirEnv, "/from/env", 1);
    EXPECT_EQ(resolve_data_dir(c), fs::path("/from/env"));
    if (saved) {
        ::setenv(kDataDirEnv, restore.c_str(), 1);
    } else {
        ::unsetenv(kDataDirEnv);
    }
}

TEST(RoundsToThreshold, FirstQualifyingRound) {
    std::vector<RoundReport> reports(4);
    const double acc[] = {0.5, 0.91, 0.85, 0.95};
    for (std::size_t i = 0; i < 4; ++i) {
        reports[i].round = i + 1;
        reports[i].train_accuracy = acc[i];
    }
    EXPECT_EQ(rounds_to_threshold(reports, 0.9), 2u);
    EXPECT_EQ(rounds_to_threshold(reports, 0.99), std::nullopt);
    EXPECT_EQ(rounds_to_threshold({}, 0.9), std::nullopt);
}

TEST(CmdTrain, ZeroRoundsWritesInitialParameters) {
    auto c = Toy("t0");
    c.rounds = 0;
    const auto outcome = cmd_train(c);
    const fs::path dir = c.output_dir;
    EXPECT_EQ(Slurp(dir / "curve.csv"),
              "round,train_loss,train_acc,test_acc,bytes_up,bytes_down,wall_ms\n");
    const auto p = build_ring_ansatz(4, 1).num_parameters();
    const std::string blob = Slurp(dir / "params.bin");
    ASSERT_EQ(blob.size(), p * 8);
    const auto init = initial_parameters(c, p);
    for (std::size_t i = 0; i < p; ++i) {
        double v = 0.0;
        std::memcpy(&v, blob.data() + 8 * i, 8);
        EXPECT_EQ(v, init[i]);
    }
    const auto sidecar = nlohmann::json::parse(Slurp(dir / "params.json"));
    EXPECT_EQ(config_from_json(sidecar.at("config")), c);
    EXPECT_EQ(ansatz_from_json(sidecar.at("ansatz")), build_ring_ansatz(4, 1));
    EXPECT_TRUE(fs::exists(dir / "summary.csv"));
    fs::remove_all(dir);
}

TEST(CmdTrain, ByteIdenticalCsvForSameSeed) {
    auto c = Toy("det");
    cmd_train(c);
    const std::string first = Slurp(fs::path(c.output_dir) / "curve.csv");
    const std::string summary = Slurp(fs::path(c.output_dir) / "summary.csv");
    cmd_train(c);
    EXPECT_EQ(Slurp(fs::path(c.output_dir) / "curve.csv"), first);
    EXPECT_EQ(Slurp(fs::path(c.output_dir) / "summary.csv"), summary);
    EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 4);
    c.seed = 6;
    cmd_train(c);
    EXPECT_NE(Slurp(fs::path(c.output_dir) / "curve.csv"), first);
    fs::remove_all(c.output_dir);
}

TEST(CmdTrain, InvalidConfigThrowsBeforeRunning) {
    auto c = Toy("bad");
    c.depth = 0;
    EXPECT_THROW(cmd_train(c), ConfigError);
    EXPECT_FALSE(fs::exists(c.output_dir));
}

TEST(CmdTrain, MissingMnistIsReported) {
    ExperimentConfig c;
    c.data_dir = "/nonexistent/mnist";
    c.output_dir = (fs::temp_directory_path() / "qfl_experiment_nomnist").string();
    const char *saved = std::getenv(kDataDirEnv);
    const std::string restore = saved ? saved : "";
    ::unsetenv(kDataDirEnv);
    EXPECT_THROW(cmd_train(c), Error);
    if (saved) {
        ::setenv(kDataDirEnv, restore.c_str(), 1);
    }
    fs::remove_all(c.output_dir);
}

std::vector<ExperimentConfig> FourOptimizers(const std::string &name) {
    std::vector<ExperimentConfig> configs;
    for (const auto kind : {OptimizerKind::Sgd, OptimizerKind::Adagrad,
                            OptimizerKind::Adam, OptimizerKind::Qngd}) {
        auto c = Toy(name);
        c.optimizer = kind;
        c.learning_rate = 0.1;
        configs.push_back(c);
    }
    return configs;
}

TEST(CmdCompare, FourRowsSortedByRounds) {
    auto configs = FourOptimizers("cmp");
    for (auto &c : configs) {
        c.accuracy_threshold = 0.5;
    }
    const auto rows = cmd_compare(configs);
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto a = rows[i - 1].rounds_to_threshold;
        const auto b = rows[i].rounds_to_threshold;
        EXPECT_TRUE(!b || (a && *a <= *b));
    }
    const fs::path dir = configs.front().output_dir;
    EXPECT_TRUE(fs::exists(dir / "compare.csv"));
    const std::string summary = Slurp(dir / "compare_summary.csv");
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 5);
    EXPECT_FALSE(format_summary(rows).empty());
    fs::remove_all(dir);
}

TEST(CmdCompare, RejectsDuplicatesAndMismatches) {
    auto configs = FourOptimizers("cmp_bad");
    configs[1].optimizer = configs[0].optimizer;
    EXPECT_THROW(validate_comparison(configs), ConfigError);
    configs = FourOptimizers("cmp_bad");
    configs[2].seed = 99;
    EXPECT_THROW(validate_comparison(configs), ConfigError);
    configs = FourOptimizers("cmp_bad");
    EXPECT_NO_THROW(validate_comparison(configs));
}

TEST(CurveCsv, ShortestRoundTripNumbers) {
    RoundReport r;
    r.round = 1;
    r.train_loss = 0.1;
    r.train_accuracy = 0.5;
    r.test_accuracy = 1.0 / 3.0;
    r.bytes_up = 96;
    r.bytes_down = 192;
    const std::string csv = curve_csv({r});
    EXPECT_NE(csv.find("\n1,0.1,0.5,0.3333333333333333,96,192,0\n"), std::string::npos);
}

TEST(Selftest, AllPropertiesPass) {
    SelftestOptions options;
    options.data_dir = "/nonexistent";
    const auto results = run_selftest(options);
    bool saw_skip = false;
    for (const auto &r : results) {
        EXPECT_NE(r.status, PropertyResult::Status::Fail) << r.name << ": " << r.detail;
        saw_skip = saw_skip || r.status == PropertyResult::Status::Skip;
    }
    EXPECT_TRUE(saw_skip);
}

TEST(Selftest, MetricSignFlipIsCaught) {
    SelftestOptions options;
    options.flip_metric_sign = true;
    options.data_dir = "/nonexistent";
    bool caught = false;
    for (const auto &r : run_selftest(options)) {
        if (r.name == "metric-oracle") {
            caught = r.status == PropertyResult::Status::Fail;
        } else {
            EXPECT_NE(r.status, PropertyResult::Status::Fail) << r.name;
        }
    }
    EXPECT_TRUE(caught);
}

} // namespace
} // namespace qfl

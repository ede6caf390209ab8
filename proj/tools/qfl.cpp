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

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfl/error.hpp"
#include "qfl/experiment.hpp"
#include "qfl/selftest.hpp"

namespace {

std::vector<std::string> split_list(const std::string &text) {
    std::vector<std::string> items;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

int train(const std::string &config_path) {
    const auto config = qfl::load_config(config_path);
    const auto outcome = qfl::cmd_train(config);
    std::cout << qfl::format_summary({outcome.summary});
    std::cout << "artifacts written to " << config.output_dir << "\n";
    return 0;
}

int compare(const std::vector<std::string> &config_paths,
            const std::string &optimizer_list) {
    std::vector<qfl::ExperimentConfig> configs;
    for (const auto &path : config_paths) {
        configs.push_back(qfl::load_config(path));
    }
    if (!optimizer_list.empty()) {
        if (configs.size() != 1) {
            throw qfl::ConfigError("--optimizers needs exactly one --config");
        }
        const auto base = configs.front();
        configs.clear();
        for (const auto &name : split_list(optimizer_list)) {
            auto c = base;
            c.optimizer = qfl::parse_optimizer_kind(name);
            configs.push_back(std::move(c));
        }
    }
    const auto rows = qfl::cmd_compare(configs);
    std::cout << qfl::format_summary(rows);
    return 0;
}

int selftest(const std::string &data_dir, const std::string &fault) {
    qfl::SelftestOptions options;
    if (!data_dir.empty()) {
        options.data_dir = data_dir;
    } else if (const char *env = std::getenv(qfl::kDataDirEnv); env != nullptr) {
        options.data_dir = env;
    }
    if (fault == "metric-sign") {
        options.flip_metric_sign = true;
    } else if (!fault.empty()) {
        throw qfl::ConfigError("unknown fault '" + fault + "'");
    }
    int status = 0;
    for (const auto &r : qfl::run_selftest(options)) {
        std::cout << qfl::to_string(r.status) << "  " << r.name << "  " << r.detail
                  << "\n";
        if (r.status == qfl::PropertyResult::Status::Fail) {
            status = 1;
        }
    }
    return status;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Federated quantum natural gradient simulator"};
    app.require_subcommand(1);

    std::string train_config;
    auto *train_cmd = app.add_subcommand("train", "Run one federated training job");
    train_cmd->add_option("--config", train_config, "Experiment JSON")->required();

    std::vector<std::string> compare_configs;
    std::string optimizers;
    auto *compare_cmd =
        app.add_subcommand("compare", "Run several optimizers on one schedule");
    compare_cmd->add_option("--config", compare_configs, "Experiment JSON (repeatable)")
        ->required();
    compare_cmd->add_option("--optimizers", optimizers,
                            "Comma-separated list, e.g. sgd,adagrad,adam,fqngd");

    std::string data_dir;
    std::string fault;
    auto *selftest_cmd =
        app.add_subcommand("selftest", "Check kernels against dense oracles");
    selftest_cmd->add_option("--data-dir", data_dir, "MNIST directory");
    selftest_cmd->add_option("--inject-fault", fault, "Test hook: metric-sign");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            return train(train_config);
        }
        if (*compare_cmd) {
            return compare(compare_configs, optimizers);
        }
        if (*selftest_cmd) {
            return selftest(data_dir, fault);
        }
    } catch (const qfl::ConfigError &e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const qfl::DivergenceError &e) {
        std::cerr << "training diverged: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

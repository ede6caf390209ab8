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
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qfl/error.hpp"
#include "qfl/rng.hpp"

namespace qfl {

namespace {

constexpr std::uint64_t kInitStream = 4;
constexpr std::uint64_t kSyntheticTestOffset = 0x7e57;

std::string format_number(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string join(const std::vector<std::string> &items, const std::string &sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += items[i];
    }
    return out;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

std::string source_name(DataSource source) {
    return source == DataSource::Mnist ? "mnist" : "synthetic";
}

/// Comparison key: the config with its optimizer field neutralised.
nlohmann::json without_optimizer(const ExperimentConfig &config) {
    nlohmann::json doc = to_json(config);
    doc.erase("optimizer");
    return doc;
}

} // namespace

Hyperparameters ExperimentConfig::hyperparameters() const {
    Hyperparameters h;
    h.learning_rate = effective_learning_rate();
    h.adam_beta1 = adam_beta1;
    h.adam_beta2 = adam_beta2;
    h.adam_epsilon = adam_epsilon;
    h.adagrad_epsilon = adagrad_epsilon;
    h.damping = damping;
    return h;
}

nlohmann::json to_json(const ExperimentConfig &c) {
    nlohmann::json doc = {
        {"task", c.task},
        {"digits", c.digits},
        {"source", source_name(c.source)},
        {"num_features", c.num_features},
        {"feature_method", to_string(c.feature_method)},
        {"depth", c.depth},
        {"entangler", c.entangler},
        {"participants", c.participants},
        {"rounds", c.rounds},
        {"optimizer", to_string(c.optimizer)},
        {"learning_rate", nullptr},
        {"damping", c.damping},
        {"adam_beta1", c.adam_beta1},
        {"adam_beta2", c.adam_beta2},
        {"adam_epsilon", c.adam_epsilon},
        {"adagrad_epsilon", c.adagrad_epsilon},
        {"init_range", c.init_range},
        {"logit_scale", c.logit_scale},
        {"seed", c.seed},
        {"train_samples", c.train_samples},
        {"test_samples", c.test_samples},
        {"batch_size", c.batch_size},
        {"synthetic_train", c.synthetic_train},
        {"synthetic_test", c.synthetic_test},
        {"accuracy_threshold", c.accuracy_threshold},
        {"threads", c.threads},
        {"record_wall_time", c.record_wall_time},
        {"data_dir", c.data_dir},
        {"output_dir", c.output_dir},
    };
    if (c.learning_rate) {
        doc["learning_rate"] = *c.learning_rate;
    }
    return doc;
}

ExperimentConfig config_from_json(const nlohmann::json &doc) {
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    ExperimentConfig c;
    std::vector<std::string> errors;
    using Setter = std::function<void(const nlohmann::json &)>;
    auto size_field = [](std::size_t &field) -> Setter {
        return [&field](const nlohmann::json &v) {
            if (!v.is_number_unsigned()) {
                throw ConfigError("expected a non-negative integer");
            }
            field = v.get<std::size_t>();
        };
    };
    auto real_field = [](double &field) -> Setter {
        return [&field](const nlohmann::json &v) {
            if (!v.is_number()) {
                throw ConfigError("expected a number");
            }
            field = v.get<double>();
        };
    };
    auto string_field = [](std::string &field) -> Setter {
        return [&field](const nlohmann::json &v) {
            if (!v.is_string()) {
                throw ConfigError("expected a string");
            }
            field = v.get<std::string>();
        };
    };
    const std::map<std::string, Setter> setters = {
        {"task", string_field(c.task)},
        {"digits",
         [&](const nlohmann::json &v) {
             if (!v.is_array()) {
                 throw ConfigError("expected an array of digits");
             }
             c.digits.clear();
             for (const auto &d : v) {
                 if (!d.is_number_integer()) {
                     throw ConfigError("digits must be integers");
                 }
                 c.digits.push_back(d.get<int>());
             }
         }},
        {"source",
         [&](const nlohmann::json &v) {
             const auto name = v.get<std::string>();
             if (name == "mnist") {
                 c.source = DataSource::Mnist;
             } else if (name == "synthetic") {
                 c.source = DataSource::Synthetic;
             } else {
                 throw ConfigError("unknown source '" + name + "'");
             }
         }},
        {"num_features", size_field(c.num_features)},
        {"feature_method",
         [&](const nlohmann::json &v) {
             c.feature_method = parse_reduction_method(v.get<std::string>());
         }},
        {"depth", size_field(c.depth)},
        {"entangler", string_field(c.entangler)},
        {"participants", size_field(c.participants)},
        {"rounds", size_field(c.rounds)},
        {"optimizer",
         [&](const nlohmann::json &v) {
             c.optimizer = parse_optimizer_kind(v.get<std::string>());
         }},
        {"learning_rate",
         [&](const nlohmann::json &v) {
             if (v.is_null()) {
                 c.learning_rate.reset();
             } else if (v.is_number()) {
                 c.learning_rate = v.get<double>();
             } else {
                 throw ConfigError("expected a number or null");
             }
         }},
        {"damping", real_field(c.damping)},
        {"adam_beta1", real_field(c.adam_beta1)},
        {"adam_beta2", real_field(c.adam_beta2)},
        {"adam_epsilon", real_field(c.adam_epsilon)},
        {"adagrad_epsilon", real_field(c.adagrad_epsilon)},
        {"init_range", real_field(c.init_range)},
        {"logit_scale", real_field(c.logit_scale)},
        {"seed",
         [&](const nlohmann::json &v) {
             if (!v.is_number_unsigned()) {
                 throw ConfigError("expected a non-negative integer");
             }
             c.seed = v.get<std::uint64_t>();
         }},
        {"train_samples", size_field(c.train_samples)},
        {"test_samples", size_field(c.test_samples)},
        {"batch_size", size_field(c.batch_size)},
        {"synthetic_train", size_field(c.synthetic_train)},
        {"synthetic_test", size_field(c.synthetic_test)},
        {"accuracy_threshold", real_field(c.accuracy_threshold)},
        {"threads", size_field(c.threads)},
        {"record_wall_time",
         [&](const nlohmann::json &v) {
             if (!v.is_boolean()) {
                 throw ConfigError("expected true or false");
             }
             c.record_wall_time = v.get<bool>();
         }},
        {"data_dir", string_field(c.data_dir)},
        {"output_dir", string_field(c.output_dir)},
    };
    for (const auto &[key, value] : doc.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            errors.push_back("unknown key '" + key + "'");
            continue;
        }
        try {
            it->second(value);
        } catch (const std::exception &e) {
            errors.push_back("key '" + key + "': " + e.what());
        }
    }
    if (!errors.empty()) {
        throw ConfigError("invalid config:\n  " + join(errors, "\n  "));
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(doc);
}

std::vector<std::string> validation_errors(const ExperimentConfig &c) {
    std::vector<std::string> errors;
    auto fail = [&](std::string message) { errors.push_back(std::move(message)); };

    if (c.task != "binary" && c.task != "ternary") {
        fail("task must be 'binary' or 'ternary'");
    } else if (c.digits.size() != (c.task == "binary" ? 2U : 3U)) {
        fail("task '" + c.task + "' needs " +
             std::string(c.task == "binary" ? "2" : "3") + " digits");
    }
    std::set<int> distinct(c.digits.begin(), c.digits.end());
    if (distinct.size() != c.digits.size()) {
        fail("digits must be distinct");
    }
    for (const int d : c.digits) {
        if (d < 0 || d > 9) {
            fail("digit " + std::to_string(d) + " outside 0..9");
        }
    }
    if (c.source == DataSource::Mnist) {
        if (c.num_features != 4 && c.num_features != 8 && c.num_features != 16) {
            fail("num_features must be 4, 8 or 16 for MNIST");
        }
    } else if (c.num_features < 1 || c.num_features > kMaxQubits) {
        fail("num_features must be in [1, " + std::to_string(kMaxQubits) + "]");
    }
    if (c.num_classes() > c.num_features) {
        fail("need at least one qubit per class");
    }
    if (c.depth < 1) {
        fail("depth must be >= 1");
    }
    if (c.participants < 1) {
        fail("participants must be >= 1");
    }
    const std::size_t train_rows =
        c.source == DataSource::Synthetic ? c.synthetic_train : c.train_samples;
    if (train_rows > 0 && c.participants > train_rows) {
        fail("more participants than training samples");
    }
    if (train_rows > 0 && c.participants > 0 &&
        c.batch_size > train_rows / c.participants) {
        fail("batch_size exceeds the smallest shard");
    }
    if (c.source == DataSource::Synthetic && c.synthetic_test < 1) {
        fail("synthetic_test must be >= 1");
    }
    if (c.learning_rate && !(*c.learning_rate > 0.0)) {
        fail("learning_rate must be > 0");
    }
    if (!(c.damping >= 0.0)) {
        fail("damping must be >= 0");
    }
    if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0) ||
        !(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0)) {
        fail("Adam betas must lie in [0, 1)");
    }
    if (!(c.adam_epsilon > 0.0) || !(c.adagrad_epsilon > 0.0)) {
        fail("epsilons must be > 0");
    }
    if (!(c.init_range >= 0.0)) {
        fail("init_range must be >= 0");
    }
    if (c.entangler != "ring" && c.entangler != "hub") {
        fail("entangler must be \"ring\" or \"hub\"");
    } else if (c.entangler == "hub" && c.num_features <= c.num_classes()) {
        fail("hub entangler needs more qubits than classes");
    }
    if (!(c.logit_scale > 0.0) || !std::isfinite(c.logit_scale)) {
        fail("logit_scale must be finite and > 0");
    }
    if (!(c.accuracy_threshold > 0.0 && c.accuracy_threshold <= 1.0)) {
        fail("accuracy_threshold must lie in (0, 1]");
    }
    if (c.threads < 1) {
        fail("threads must be >= 1");
    }
    if (c.output_dir.empty()) {
        fail("output_dir must not be empty");
    }
    return errors;
}

void validate(const ExperimentConfig &config) {
    const auto errors = validation_errors(config);
    if (!errors.empty()) {
        throw ConfigError("invalid config:\n  " + join(errors, "\n  "));
    }
}

std::filesystem::path resolve_data_dir(const ExperimentConfig &config) {
    if (const char *env = std::getenv(kDataDirEnv); env != nullptr && *env != 0) {
        return env;
    }
    return config.data_dir;
}

PreparedData prepare_data(const ExperimentConfig &config) {
    validate(config);
    EncodedDataset train;
    PreparedData data;
    if (config.source == DataSource::Synthetic) {
        train = synthetic_dataset(config.num_features, config.num_classes(),
                                  config.synthetic_train, config.seed);
        data.test = synthetic_dataset(config.num_features, config.num_classes(),
                                      config.synthetic_test,
                                      config.seed + kSyntheticTestOffset);
    } else {
        const auto dir = resolve_data_dir(config);
        const RawDataset raw_train =
            select_digits(load_idx(dir / "train-images-idx3-ubyte",
                                   dir / "train-labels-idx1-ubyte"),
                          config.digits);
        const RawDataset raw_test =
            select_digits(load_idx(dir / "t10k-images-idx3-ubyte",
                                   dir / "t10k-labels-idx1-ubyte"),
                          config.digits);
        const auto reducer = FeatureReducer::fit(raw_train, config.num_features,
                                                 config.feature_method);
        train = subsample(reducer.apply(raw_train), config.train_samples,
                          config.seed);
        data.test = subsample(reducer.apply(raw_test), config.test_samples,
                              config.seed);
    }
    if (config.batch_size > train.size() / config.participants) {
        throw ConfigError("batch_size exceeds the smallest shard");
    }
    data.shards = shard(train, config.participants, config.seed);
    return data;
}

ParameterVector initial_parameters(const ExperimentConfig &config,
                                   std::size_t count) {
    auto rng = seeded_stream(config.seed, kInitStream);
    ParameterVector params(count);
    for (auto &p : params) {
        p = config.init_range * (2.0 * rng.uniform() - 1.0);
    }
    return params;
}

LayeredAnsatz make_ansatz(const ExperimentConfig &config) {
    if (config.entangler == "hub") {
        return build_block_ansatz(config.num_features, config.depth,
                                  hub_wall(config.num_features, config.num_classes()));
    }
    return build_ring_ansatz(config.num_features, config.depth);
}

TrainingSetup make_setup(const ExperimentConfig &config, PreparedData data) {
    LayeredAnsatz ansatz = make_ansatz(config);
    ClassifierHead head =
        ClassifierHead::first_qubits(config.num_classes(), config.num_features,
                                     config.logit_scale);
    ParameterVector init = initial_parameters(config, ansatz.num_parameters());
    return TrainingSetup{std::move(ansatz),
                         std::move(head),
                         std::move(data.shards),
                         std::move(data.test),
                         std::move(init),
                         config.optimizer,
                         config.hyperparameters(),
                         config.rounds,
                         config.batch_size,
                         config.threads,
                         config.record_wall_time};
}

std::optional<std::size_t>
rounds_to_threshold(const std::vector<RoundReport> &reports, double threshold) {
    for (const auto &r : reports) {
        if (r.train_accuracy >= threshold) {
            return r.round;
        }
    }
    return std::nullopt;
}

ExperimentOutcome run_experiment(const ExperimentConfig &config) {
    const TrainingSetup setup = make_setup(config, prepare_data(config));
    ExperimentOutcome outcome;
    outcome.training = run_federated_training(setup);
    const auto &reports = outcome.training.reports;
    auto &row = outcome.summary;
    row.optimizer = to_string(config.optimizer);
    if (reports.empty()) {
        row.final_test_accuracy =
            setup.test.size() == 0
                ? 0.0
                : evaluate_accuracy(setup.head, setup.ansatz,
                                    setup.initial_params, setup.test);
    } else {
        row.final_test_accuracy = reports.back().test_accuracy;
        row.final_train_accuracy = reports.back().train_accuracy;
    }
    row.rounds_to_threshold = rounds_to_threshold(reports, config.accuracy_threshold);
    row.total_bytes =
        outcome.training.final_state.bytes_up + outcome.training.final_state.bytes_down;
    return outcome;
}

std::string curve_csv(const std::vector<RoundReport> &reports) {
    std::ostringstream out;
    out << "round,train_loss,train_acc,test_acc,bytes_up,bytes_down,wall_ms\n";
    for (const auto &r : reports) {
        out << r.round << ',' << format_number(r.train_loss) << ','
            << format_number(r.train_accuracy) << ','
            << format_number(r.test_accuracy) << ',' << r.bytes_up << ','
            << r.bytes_down << ',' << format_number(r.wall_ms) << '\n';
    }
    return out.str();
}

std::string summary_csv(const std::vector<SummaryRow> &rows) {
    std::ostringstream out;
    out << "optimizer,final_test_acc,final_train_acc,rounds_to_threshold,total_bytes\n";
    for (const auto &r : rows) {
        out << r.optimizer << ',' << format_number(r.final_test_accuracy) << ','
            << format_number(r.final_train_accuracy) << ','
            << (r.rounds_to_threshold ? std::to_string(*r.rounds_to_threshold)
                                      : std::string())
            << ',' << r.total_bytes << '\n';
    }
    return out.str();
}

ExperimentOutcome cmd_train(const ExperimentConfig &config) {
    validate(config);
    ExperimentOutcome outcome = run_experiment(config);
    const std::filesystem::path dir = config.output_dir;
    std::filesystem::create_directories(dir);
    write_text(dir / "curve.csv", curve_csv(outcome.training.reports));

    const auto &params = outcome.training.final_state.global_params;
    std::string blob(params.size() * 8, '\0');
    for (std::size_t i = 0; i < params.size(); ++i) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &params[i], sizeof(bits));
        for (int b = 0; b < 8; ++b) {
            blob[i * 8 + static_cast<std::size_t>(b)] =
                static_cast<char>((bits >> (8 * b)) & 0xFF);
        }
    }
    write_text(dir / "params.bin", blob);
    const nlohmann::json sidecar = {
        {"config", to_json(config)},
        {"ansatz", to_json(make_ansatz(config))},
        {"num_parameters", params.size()},
        {"encoding", "float64 little-endian"},
    };
    write_text(dir / "params.json", sidecar.dump(2) + "\n");
    write_text(dir / "summary.csv", summary_csv({outcome.summary}));
    return outcome;
}

void validate_comparison(const std::vector<ExperimentConfig> &configs) {
    if (configs.empty()) {
        throw ConfigError("comparison needs at least one optimizer");
    }
    std::vector<std::string> errors;
    std::set<OptimizerKind> seen;
    const nlohmann::json reference = without_optimizer(configs.front());
    for (const auto &c : configs) {
        if (!seen.insert(c.optimizer).second) {
            errors.push_back("optimizer '" + to_string(c.optimizer) +
                             "' listed more than once");
        }
        if (without_optimizer(c) != reference) {
            errors.push_back("config for '" + to_string(c.optimizer) +
                             "' differs from the first in a non-optimizer field");
        }
        for (const auto &e : validation_errors(c)) {
            errors.push_back(to_string(c.optimizer) + ": " + e);
        }
    }
    if (!errors.empty()) {
        throw ConfigError("invalid comparison:\n  " + join(errors, "\n  "));
    }
}

std::vector<SummaryRow> cmd_compare(const std::vector<ExperimentConfig> &configs) {
    validate_comparison(configs);
    std::vector<SummaryRow> rows;
    std::ostringstream merged;
    merged << "optimizer,round,train_loss,train_acc,test_acc,bytes_up,"
              "bytes_down,wall_ms\n";
    for (const auto &config : configs) {
        const ExperimentOutcome outcome = run_experiment(config);
        std::istringstream curve(curve_csv(outcome.training.reports));
        std::string line;
        std::getline(curve, line); // header
        while (std::getline(curve, line)) {
            merged << outcome.summary.optimizer << ',' << line << '\n';
        }
        rows.push_back(outcome.summary);
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SummaryRow &a, const SummaryRow &b) {
                         if (a.rounds_to_threshold && b.rounds_to_threshold) {
                             return *a.rounds_to_threshold < *b.rounds_to_threshold;
                         }
                         return a.rounds_to_threshold.has_value() &&
                                !b.rounds_to_threshold.has_value();
                     });
    const std::filesystem::path dir = configs.front().output_dir;
    std::filesystem::create_directories(dir);
    write_text(dir / "compare.csv", merged.str());
    write_text(dir / "compare_summary.csv", summary_csv(rows));
    return rows;
}

std::string format_summary(const std::vector<SummaryRow> &rows) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %10s %10s %18s %14s\n", "optimizer",
                  "test_acc", "train_acc", "rounds_to_thresh", "total_bytes");
    out << line;
    for (const auto &r : rows) {
        const std::string rounds = r.rounds_to_threshold
                                       ? std::to_string(*r.rounds_to_threshold)
                                       : std::string("-");
        std::snprintf(line, sizeof(line), "%-10s %10.4f %10.4f %18s %14llu\n",
                      r.optimizer.c_str(), r.final_test_accuracy,
                      r.final_train_accuracy, rounds.c_str(),
                      static_cast<unsigned long long>(r.total_bytes));
        out << line;
    }
    return out.str();
}

} // namespace qfl

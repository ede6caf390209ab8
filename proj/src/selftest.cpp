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

#include "qfl/selftest.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "qfl/classifier.hpp"
#include "qfl/dataset.hpp"
#include "qfl/differentiation.hpp"
#include "qfl/federation.hpp"
#include "qfl/oracles.hpp"

namespace qfl {

namespace {

using Status = PropertyResult::Status;

PropertyResult check_kronecker(Xoshiro256 &rng) {
    double worst = 0.0;
    for (int draw = 0; draw < 50; ++draw) {
        const auto n = 1 + rng.below(4);
        const auto ansatz = oracle::random_ansatz(rng, n, 1 + rng.below(4));
        const auto params = oracle::random_angles(rng, ansatz.num_parameters());
        const StateVector input = tpe_encode(oracle::random_features(rng, n));
        const StateVector fast = evaluate(ansatz, params, input);
        const Eigen::VectorXcd slow = oracle::evaluate(ansatz, params, input);
        worst = std::max(worst, (oracle::to_vector(fast) - slow).cwiseAbs().maxCoeff());
    }
    std::ostringstream detail;
    detail << "max deviation " << worst;
    return {"kronecker-equivalence", worst <= 1e-12 ? Status::Pass : Status::Fail,
            detail.str()};
}

PropertyResult check_gradient(Xoshiro256 &rng) {
    double worst = 0.0;
    for (int draw = 0; draw < 30; ++draw) {
        const auto n = 2 + rng.below(2);
        const auto ansatz = build_ring_ansatz(n, 1 + rng.below(2));
        const auto head = ClassifierHead::first_qubits(2, n);
        const auto params = oracle::random_angles(rng, ansatz.num_parameters());
        EncodedDataset batch;
        batch.num_features = n;
        batch.num_classes = 2;
        batch.features = oracle::random_features(rng, n);
        batch.labels = {rng.below(2)};
        const auto shift = batch_loss(head, ansatz, params, batch, true).gradient;
        const auto fd = oracle::central_difference(
            [&](std::span<const double> p) {
                return cross_entropy_loss(
                           oracle::logits(head, ansatz, p, batch.row(0)),
                           batch.labels[0])
                    .loss;
            },
            params);
        for (std::size_t i = 0; i < fd.size(); ++i) {
            worst = std::max(worst, std::abs(shift[i] - fd[i]));
        }
    }
    std::ostringstream detail;
    detail << "max |shift - fd| " << worst;
    return {"gradient-parity", worst <= 1e-5 ? Status::Pass : Status::Fail,
            detail.str()};
}

PropertyResult check_metric(Xoshiro256 &rng, bool flip) {
    double worst = 0.0;
    for (int draw = 0; draw < 30; ++draw) {
        const auto n = 1 + rng.below(3);
        const auto ansatz = oracle::random_ansatz(rng, n, 1 + rng.below(3));
        const auto params = oracle::random_angles(rng, ansatz.num_parameters());
        const StateVector input = tpe_encode(oracle::random_features(rng, n));
        for (std::size_t l = 1; l <= ansatz.num_layers(); ++l) {
            Eigen::MatrixXd block = metric_block(ansatz, params, input, l);
            if (flip) {
                block = -block;
            }
            const Eigen::MatrixXd reference =
                oracle::metric_block(ansatz, params, input, l);
            worst = std::max(worst, (block - reference).cwiseAbs().maxCoeff());
        }
    }
    std::ostringstream detail;
    detail << "max deviation " << worst;
    return {"metric-oracle", worst <= 1e-10 ? Status::Pass : Status::Fail,
            detail.str()};
}

PropertyResult check_degenerate_federation() {
    const auto ansatz = build_ring_ansatz(2, 1);
    const auto head = ClassifierHead::first_qubits(2, 2);
    const EncodedDataset data = synthetic_dataset(2, 2, 16, 11);
    Hyperparameters hyper;
    hyper.learning_rate = 0.05;
    ParameterVector init(ansatz.num_parameters(), 0.1);
    TrainingSetup setup{ansatz,    head,  {data}, {}, init,
                        OptimizerKind::Qngd, hyper, 10, 0, 1, false};
    const auto federated = run_federated_training(setup).trajectory;
    const auto single = train_single_device(ansatz, head, data, init,
                                            OptimizerKind::Qngd, hyper, 10);
    double worst = 0.0;
    for (std::size_t t = 0; t < single.size(); ++t) {
        for (std::size_t i = 0; i < single[t].size(); ++i) {
            worst = std::max(worst, std::abs(single[t][i] - federated[t][i]));
        }
    }
    std::ostringstream detail;
    detail << "max parameter distance " << worst;
    return {"k1-federation-equivalence", worst <= 1e-12 ? Status::Pass : Status::Fail,
            detail.str()};
}

PropertyResult check_mnist_counts(const std::filesystem::path &dir) {
    const auto train_images = dir / "train-images-idx3-ubyte";
    if (dir.empty() || !std::filesystem::exists(train_images)) {
        return {"mnist-digit-counts", Status::Skip,
                "MNIST files not found" +
                    (dir.empty() ? std::string() : " in " + dir.string())};
    }
    const auto train = load_idx(train_images, dir / "train-labels-idx1-ubyte");
    const auto test =
        load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
    const std::size_t counts[4] = {
        select_digits(train, {2, 5}).size(), select_digits(test, {2, 5}).size(),
        select_digits(train, {1, 3, 7}).size(),
        select_digits(test, {1, 3, 7}).size()};
    const bool ok = counts[0] == 11379 && counts[1] == 1924 &&
                    counts[2] == 19138 && counts[3] == 3173;
    std::ostringstream detail;
    detail << counts[0] << '/' << counts[1] << ' ' << counts[2] << '/' << counts[3];
    return {"mnist-digit-counts", ok ? Status::Pass : Status::Fail, detail.str()};
}

template <class F> PropertyResult guarded(const std::string &name, F &&check) {
    try {
        return check();
    } catch (const std::exception &e) {
        return {name, Status::Fail, std::string("threw: ") + e.what()};
    }
}

} // namespace

std::string to_string(PropertyResult::Status status) {
    switch (status) {
    case Status::Pass:
        return "PASS";
    case Status::Fail:
        return "FAIL";
    case Status::Skip:
        return "SKIP";
    }
    return "?";
}

std::vector<PropertyResult> run_selftest(const SelftestOptions &options) {
    Xoshiro256 rng(20240917);
    return {
        guarded("kronecker-equivalence", [&] { return check_kronecker(rng); }),
        guarded("gradient-parity", [&] { return check_gradient(rng); }),
        guarded("metric-oracle",
                [&] { return check_metric(rng, options.flip_metric_sign); }),
        guarded("k1-federation-equivalence",
                [&] { return check_degenerate_federation(); }),
        guarded("mnist-digit-counts",
                [&] { return check_mnist_counts(options.data_dir); }),
    };
}

} // namespace qfl

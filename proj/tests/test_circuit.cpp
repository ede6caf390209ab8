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

#include "qfl/circuit.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "qfl/error.hpp"
#include "qfl/oracles.hpp"
#include "qfl/rng.hpp"

namespace qfl {
namespace {

constexpr double kPi = std::numbers::pi;
const double kHalf = std::sqrt(0.5);

double MaxDeviation(const StateVector &s, const Eigen::VectorXcd &v) {
    double worst = 0.0;
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        worst = std::max(worst, std::abs(s[i] - v(static_cast<Eigen::Index>(i))));
    }
    return worst;
}

LayeredAnsatz SingleRy() {
    return LayeredAnsatz(1, {RotationLayer{{}, {{Axis::Y, 0, 0}}}});
}

TEST(TpeEncode, Fixtures) {
    const std::vector<double> zeros{0, 0};
    EXPECT_EQ(tpe_encode(zeros), zero_state(2));
    const std::vector<double> one{1};
    const auto s1 = tpe_encode(one);
    EXPECT_NEAR(std::abs(s1[0]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s1[1] - 1.0), 0.0, 1e-15);
    const std::vector<double> half{0.5};
    const auto sh = tpe_encode(half);
    EXPECT_NEAR(sh[0].real(), kHalf, 1e-15);
    EXPECT_NEAR(sh[1].real(), kHalf, 1e-15);
}

TEST(TpeEncode, OutOfRange) {
    const std::vector<double> bad{0.2, 1.5};
    EXPECT_THROW(tpe_encode(bad), ValidationError);
    const std::vector<double> negative{-0.01};
    EXPECT_THROW(tpe_encode(negative), ValidationError);
}

TEST(TpeEncode, MatchesDenseProductState) {
    Xoshiro256 rng(2);
    for (int draw = 0; draw < 20; ++draw) {
        const auto x = oracle::random_features(rng, 4);
        EXPECT_LT(MaxDeviation(tpe_encode(x), oracle::tpe_encode(x)), 1e-15);
    }
}

TEST(TpeEncode, Injective) {
    Xoshiro256 rng(3);
    for (int draw = 0; draw < 200; ++draw) {
        auto x = oracle::random_features(rng, 3);
        auto y = x;
        const auto i = rng.below(3);
        y[i] = x[i] > 0.5 ? x[i] - 1e-5 : x[i] + 1e-5;
        EXPECT_GT(fubini_study_distance(tpe_encode(x), tpe_encode(y)), 0.0);
    }
}

TEST(RingAnsatz, ParameterCounts) {
    EXPECT_EQ(build_ring_ansatz(4, 1).num_parameters(), 12u);
    EXPECT_EQ(build_ring_ansatz(8, 2).num_parameters(), 48u);
    EXPECT_THROW(build_ring_ansatz(4, 0), ConfigError);
}

TEST(RingAnsatz, TwoQubitWallDegenerates) {
    const auto a = build_ring_ansatz(2, 1);
    ASSERT_EQ(a.num_layers(), 3u);
    EXPECT_EQ(a.layer(0).wall.pairs,
              (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}}));
    EXPECT_TRUE(a.layer(1).wall.pairs.empty());
    EXPECT_TRUE(a.layer(2).wall.pairs.empty());
}

TEST(RingAnsatz, LayerStructure) {
    const auto a = build_ring_ansatz(4, 2);
    ASSERT_EQ(a.num_layers(), 6u);
    EXPECT_EQ(a.layer(0).wall.pairs.size(), 4u);
    EXPECT_EQ(a.layer(3).wall.pairs.size(), 4u);
    const Axis expected[] = {Axis::X, Axis::Y, Axis::Z};
    for (std::size_t l = 0; l < a.num_layers(); ++l) {
        ASSERT_EQ(a.layer(l).rotations.size(), 4u);
        for (const auto &r : a.layer(l).rotations) {
            EXPECT_EQ(r.axis, expected[l % 3]);
        }
    }
}

TEST(BlockAnsatz, RingWallMatchesRingAnsatz) {
    EXPECT_EQ(build_block_ansatz(5, 2, ring_wall(5)), build_ring_ansatz(5, 2));
    EXPECT_TRUE(ring_wall(1).pairs.empty());
}

TEST(BlockAnsatz, HubWallPairs) {
    using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;
    EXPECT_EQ(hub_wall(4, 1).pairs, (Pairs{{1, 0}, {2, 0}, {3, 0}}));
    EXPECT_EQ(hub_wall(4, 2).pairs, (Pairs{{2, 0}, {2, 1}, {3, 0}, {3, 1}}));
    EXPECT_THROW(hub_wall(4, 0), ConfigError);
    EXPECT_THROW(hub_wall(4, 4), ConfigError);
    EXPECT_EQ(build_block_ansatz(8, 2, hub_wall(8, 3)).num_parameters(), 48u);
}

// On basis inputs with zero angles, each hub ends up holding the parity of
// its own bit and every non-hub bit.
TEST(BlockAnsatz, HubWallCopiesParityIntoHubs) {
    const std::size_t n = 5;
    const std::size_t hubs = 2;
    const auto a = build_block_ansatz(n, 1, hub_wall(n, hubs));
    const ParameterVector zeros(a.num_parameters(), 0.0);
    for (std::size_t bits = 0; bits < (1u << n); ++bits) {
        std::vector<double> x(n);
        for (std::size_t q = 0; q < n; ++q) {
            x[q] = static_cast<double>((bits >> q) & 1u);
        }
        std::size_t rest = 0;
        for (std::size_t q = hubs; q < n; ++q) {
            rest ^= (bits >> q) & 1u;
        }
        std::size_t want = bits;
        for (std::size_t h = 0; h < hubs; ++h) {
            want ^= rest << h;
        }
        const auto out = evaluate(a, zeros, tpe_encode(x));
        EXPECT_NEAR(std::abs(out[want]), 1.0, 1e-12) << "input " << bits;
    }
}

TEST(LayeredAnsatz, Validation) {
    EXPECT_THROW(LayeredAnsatz(2, {RotationLayer{{{{1, 1}}}, {{Axis::X, 0, 0}}}}),
                 ConfigError);
    EXPECT_THROW(LayeredAnsatz(2, {RotationLayer{{}, {}}}), ConfigError);
    EXPECT_THROW(LayeredAnsatz(2, {RotationLayer{{}, {{Axis::X, 0, 1}}}}),
                 ConfigError);
    EXPECT_THROW(LayeredAnsatz(2, {RotationLayer{{}, {{Axis::X, 0, 0},
                                                      {Axis::Y, 1, 0}}}}),
                 ConfigError);
    EXPECT_THROW(LayeredAnsatz(2, {RotationLayer{{}, {{Axis::X, 2, 0}}}}),
                 ConfigError);
    EXPECT_THROW(LayeredAnsatz(2, {RotationLayer{{{{0, 3}}}, {{Axis::X, 0, 0}}}}),
                 ConfigError);
}

TEST(Evaluate, ZeroAnglesApplyWallsOnly) {
    const auto a = build_ring_ansatz(3, 1);
    const ParameterVector zeros(a.num_parameters(), 0.0);
    const std::vector<double> x{0.3, 0.9, 0.6};
    StateVector expected = tpe_encode(x);
    for (const auto &[c, t] : a.layer(0).wall.pairs) {
        expected.apply_cnot(c, t);
    }
    const StateVector got = evaluate(a, zeros, tpe_encode(x));
    for (std::size_t i = 0; i < got.dimension(); ++i) {
        EXPECT_NEAR(std::abs(got[i] - expected[i]), 0.0, 1e-15);
    }
}

TEST(Evaluate, SingleQubitRy) {
    const ParameterVector theta{kPi / 2};
    const auto s = evaluate(SingleRy(), theta, zero_state(1));
    EXPECT_NEAR(s[0].real(), kHalf, 1e-15);
    EXPECT_NEAR(s[1].real(), kHalf, 1e-15);
}

TEST(Evaluate, RingSeed42MatchesMatrixChain) {
    Xoshiro256 rng(42);
    const auto a = build_ring_ansatz(2, 1);
    const auto theta = oracle::random_angles(rng, a.num_parameters());
    const auto x = oracle::random_features(rng, 2);
    const auto s = evaluate(a, theta, tpe_encode(x));
    EXPECT_LT(MaxDeviation(s, oracle::evaluate(a, theta, tpe_encode(x))), 1e-12);
}

TEST(Evaluate, LengthMismatch) {
    const auto a = build_ring_ansatz(2, 1);
    const ParameterVector short_params(5, 0.0);
    EXPECT_THROW(evaluate(a, short_params, zero_state(2)), ArgumentError);
    EXPECT_THROW(evaluate(a, ParameterVector(6, 0.0), zero_state(3)),
                 ArgumentError);
}

TEST(Evaluate, NormPreserved) {
    Xoshiro256 rng(7);
    for (int draw = 0; draw < 50; ++draw) {
        const auto a = oracle::random_ansatz(rng, 4, 1 + rng.below(5));
        const auto theta = oracle::random_angles(rng, a.num_parameters());
        const auto s =
            evaluate(a, theta, tpe_encode(oracle::random_features(rng, 4)));
        EXPECT_LT(std::abs(s.norm() - 1.0), 1e-10);
    }
}

TEST(Evaluate, RandomCircuitsMatchMatrixChain) {
    Xoshiro256 rng(11);
    for (int draw = 0; draw < 60; ++draw) {
        const std::size_t n = 1 + rng.below(4);
        const auto a = oracle::random_ansatz(rng, n, 1 + rng.below(4));
        const auto theta = oracle::random_angles(rng, a.num_parameters());
        const auto input = tpe_encode(oracle::random_features(rng, n));
        EXPECT_LT(MaxDeviation(evaluate(a, theta, input),
                               oracle::evaluate(a, theta, input)),
                  1e-12);
    }
}

TEST(StateAtLayer, FirstLayerWithEmptyWallIsInput) {
    const auto a = SingleRy();
    const ParameterVector theta{1.1};
    const std::vector<double> x{0.4};
    EXPECT_EQ(state_at_layer(a, theta, tpe_encode(x), 1), tpe_encode(x));
}

TEST(StateAtLayer, RingOnZeroStateIsUnchanged) {
    const auto a = build_ring_ansatz(2, 1);
    const ParameterVector theta(a.num_parameters(), 0.3);
    EXPECT_EQ(state_at_layer(a, theta, zero_state(2), 1), zero_state(2));
}

TEST(StateAtLayer, OutOfRange) {
    const auto a = build_ring_ansatz(2, 1);
    const ParameterVector theta(a.num_parameters(), 0.0);
    EXPECT_THROW(state_at_layer(a, theta, zero_state(2), 0), ArgumentError);
    EXPECT_THROW(state_at_layer(a, theta, zero_state(2), 4), ArgumentError);
}

TEST(StateAtLayer, MatchesTruncatedSubAnsatz) {
    Xoshiro256 rng(13);
    for (int draw = 0; draw < 20; ++draw) {
        const auto a = oracle::random_ansatz(rng, 3, 3);
        const auto theta = oracle::random_angles(rng, a.num_parameters());
        const auto input = tpe_encode(oracle::random_features(rng, 3));
        const auto got = state_at_layer(a, theta, input, 2);
        // Sub-ansatz: layer 1 in full, then the bare wall of layer 2.
        const Eigen::VectorXcd expected =
            oracle::circuit_unitary(a, theta, 2, false) * oracle::to_vector(input);
        EXPECT_LT(MaxDeviation(got, expected), 1e-12);
    }
}

TEST(StateAtLayer, PrefixSuffixComposition) {
    Xoshiro256 rng(17);
    for (int draw = 0; draw < 20; ++draw) {
        const auto a = oracle::random_ansatz(rng, 3, 4);
        const auto theta = oracle::random_angles(rng, a.num_parameters());
        const auto input = tpe_encode(oracle::random_features(rng, 3));
        const std::size_t last = a.num_layers();
        StateVector s = state_at_layer(a, theta, input, last);
        for (const auto &r : a.layer(last - 1).rotations) {
            s.apply_rotation(r.axis, theta[r.param_index], r.qubit);
        }
        EXPECT_EQ(s, evaluate(a, theta, input));
        const auto all = all_layer_states(a, theta, input);
        ASSERT_EQ(all.size(), last);
        EXPECT_EQ(all.back(), state_at_layer(a, theta, input, last));
    }
}

TEST(AnsatzJson, RoundTrip) {
    Xoshiro256 rng(19);
    const auto ring = build_ring_ansatz(4, 2);
    EXPECT_EQ(ansatz_from_json(to_json(ring)), ring);
    const auto doc = to_json(ring);
    EXPECT_EQ(doc.at("num_qubits"), 4);
    EXPECT_EQ(doc.at("depth"), 2);
    EXPECT_TRUE(doc.contains("walls"));
    EXPECT_TRUE(doc.contains("rotations"));
    const auto random = oracle::random_ansatz(rng, 3, 5);
    EXPECT_EQ(ansatz_from_json(nlohmann::json::parse(to_json(random).dump())),
              random);
}

TEST(AnsatzJson, RejectsInvalidWiring) {
    auto doc = to_json(build_ring_ansatz(2, 1));
    doc["walls"][0][0] = nlohmann::json::array({1, 1});
    EXPECT_THROW(ansatz_from_json(doc), ConfigError);
}

} // namespace
} // namespace qfl

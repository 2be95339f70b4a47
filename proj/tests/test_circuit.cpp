// Copyright 2026 The pepsrqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "pepsrqc/circuit.hpp"

namespace pepsrqc {
namespace {

using std::numbers::pi;

ErrorKind kind_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Io;
}

void expect_matrix(const Mat4 &g, const std::array<cplx, 16> &want, double tol) {
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(std::abs(g[i] - want[i]), 0.0, tol) << "entry " << i;
}

TEST(Lattice, SmallestHasFourEdges) {
    const Lattice l = build_lattice(2, 2);
    ASSERT_EQ(l.edges().size(), 4u);
    std::size_t horizontal = 0;
    for (const Edge &e : l.edges()) horizontal += e.horizontal ? 1 : 0;
    EXPECT_EQ(horizontal, 2u);
}

TEST(Lattice, EdgeCountFormula) {
    EXPECT_EQ(build_lattice(4, 4).edges().size(), 24u);
    for (std::size_t r = 2; r < 7; ++r)
        for (std::size_t c = 2; c < 7; ++c) EXPECT_EQ(build_lattice(r, c).edges().size(), 2 * r * c - r - c);
}

TEST(Lattice, SetsAreDisjointAndCoverEveryPairOnce) {
    const Lattice l = build_lattice(8, 8);
    std::map<EdgeSet, std::set<std::size_t>> used;
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (const Edge &e : l.edges()) {
        EXPECT_TRUE(used[e.set].insert(e.a).second);
        EXPECT_TRUE(used[e.set].insert(e.b).second);
        EXPECT_TRUE(pairs.insert({e.a, e.b}).second);
    }
    std::size_t neighbours = 0;
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) {
            if (c + 1 < 8) {
                EXPECT_TRUE(pairs.count({l.site(r, c), l.site(r, c + 1)}));
                ++neighbours;
            }
            if (r + 1 < 8) {
                EXPECT_TRUE(pairs.count({l.site(r, c), l.site(r + 1, c)}));
                ++neighbours;
            }
        }
    EXPECT_EQ(neighbours, pairs.size());
}

TEST(Lattice, ParityConvention) {
    const Lattice l = build_lattice(3, 4);
    for (const Edge &e : l.edges()) {
        const std::size_t parity = (l.row_of(e.a) + l.col_of(e.a)) % 2;
        if (e.horizontal) {
            EXPECT_EQ(e.set, parity == 0 ? EdgeSet::A : EdgeSet::B);
        } else {
            EXPECT_EQ(e.set, parity == 0 ? EdgeSet::C : EdgeSet::D);
        }
    }
}

TEST(Lattice, RejectsTooSmall) {
    EXPECT_EQ(kind_of([] { build_lattice(1, 4); }), ErrorKind::Size);
    EXPECT_EQ(kind_of([] { build_lattice(4, 1); }), ErrorKind::Size);
}

TEST(Schedule, PeriodEightPattern) {
    EXPECT_EQ(scheduled_set(1), EdgeSet::A);
    EXPECT_EQ(scheduled_set(4), EdgeSet::D);
    EXPECT_EQ(scheduled_set(5), EdgeSet::C);
    EXPECT_EQ(scheduled_set(8), EdgeSet::B);
    EXPECT_EQ(scheduled_set(9), EdgeSet::A);
    const std::string pattern = "ABCDCDAB";
    for (std::size_t t = 1; t <= 32; ++t) EXPECT_EQ(edge_set_name(scheduled_set(t)), pattern[(t - 1) % 8]);
}

TEST(Gates, SingleQubitMatrices) {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i{0.0, 1.0};
    const Mat2 x = sqrt_x();
    const Mat2 y = sqrt_y();
    const Mat2 w = sqrt_w();
    const std::array<cplx, 4> wx{s, -i * s, -i * s, s};
    const std::array<cplx, 4> wy{s, -s, s, s};
    const std::array<cplx, 4> ww{s, -std::sqrt(i) * s, std::sqrt(-i) * s, s};
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(std::abs(x[k] - wx[k]), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(y[k] - wy[k]), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(w[k] - ww[k]), 0.0, 1e-15);
    }
    EXPECT_LT(unitarity_defect(x), 1e-12);
    EXPECT_LT(unitarity_defect(y), 1e-12);
    EXPECT_LT(unitarity_defect(w), 1e-12);
}

TEST(Gates, FsimSpecialCases) {
    const cplx i{0.0, 1.0};
    expect_matrix(fsim_matrix(0, pi), {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1}, 1e-15);
    expect_matrix(fsim_matrix(0, pi), cz_matrix(), 1e-15);
    expect_matrix(fsim_matrix(0, 0), {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1}, 0.0);
    expect_matrix(fsim_matrix(pi / 2, pi), {1, 0, 0, 0, 0, 0, -i, 0, 0, -i, 0, 0, 0, 0, 0, -1}, 1e-15);
}

TEST(Gates, FsimGeneralAndRange) {
    const double th = 0.7;
    const double ph = 2.1;
    const cplx i{0.0, 1.0};
    expect_matrix(fsim_matrix(th, ph),
                  {1, 0, 0, 0, 0, std::cos(th), -i * std::sin(th), 0, 0, -i * std::sin(th), std::cos(th), 0, 0, 0,
                   0, std::exp(-i * ph)},
                  1e-15);
    EXPECT_LT(unitarity_defect(fsim_matrix(th, ph)), 1e-12);
    EXPECT_EQ(kind_of([] { fsim_matrix(-0.1, 0); }), ErrorKind::Parameter);
    EXPECT_EQ(kind_of([] { fsim_matrix(0, 3.5); }), ErrorKind::Parameter);
    EXPECT_EQ(kind_of([] { fsim_matrix(1.6, 0); }), ErrorKind::Parameter);
}

TEST(Haar, UnitaryForAnySeed) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        CounterRng rng(seed, 1, 2, 3);
        EXPECT_LT(unitarity_defect(haar_unitary4(rng)), 1e-12);
    }
}

TEST(Haar, SecondMomentOfTrace) {
    // For Haar U(4), E|tr U|^2 = 1 and Var|tr U|^2 = E|tr U|^4 - 1 = 1.
    const std::size_t draws = 10000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
        CounterRng rng(12345, k, 0, 7);
        const Mat4 u = haar_unitary4(rng);
        const double v = std::norm(u[0] + u[5] + u[10] + u[15]);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
    EXPECT_NEAR(mean, 1.0, 3 * se);
}

TEST(Rng, CounterStreamsAreKeyed) {
    CounterRng a(1, 2, 3, 4);
    CounterRng b(1, 2, 3, 4);
    CounterRng c(1, 2, 4, 4);
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    for (int k = 0; k < 1000; ++k) {
        const double u = a.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(a.below(3), 3u);
    }
}

TEST(Instance, DepthZeroHasNoLayers) {
    EXPECT_TRUE(generate_instance(3, 3, 0, Sequence::cz(), 1).layers.empty());
}

TEST(Instance, TwoQubitGateCountOverOnePeriod) {
    const CircuitInstance c = generate_instance(4, 4, 8, Sequence::fsim(pi / 2, pi / 6), 3);
    EXPECT_EQ(c.two_qubit_gates(8), 48u);
}

TEST(Instance, LayerStructure) {
    const CircuitInstance c = generate_instance(4, 5, 16, Sequence::haar(), 9);
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> per_edge;
    for (const Layer &layer : c.layers) {
        EXPECT_EQ(layer.set, scheduled_set(layer.index));
        ASSERT_EQ(layer.single.size(), c.lattice.size());
        for (std::size_t s = 0; s < layer.single.size(); ++s) {
            ASSERT_EQ(layer.single[s].targets, std::vector<std::size_t>{s});
            EXPECT_LT(unitarity_defect(layer.single[s].matrix2()), 1e-12);
        }
        std::set<std::size_t> touched;
        for (const GateSpec &g : layer.two) {
            ASSERT_TRUE(g.two_qubit());
            EXPECT_TRUE(touched.insert(g.targets[0]).second);
            EXPECT_TRUE(touched.insert(g.targets[1]).second);
            const Edge &e = c.lattice.edges()[c.lattice.edge_between(g.targets[0], g.targets[1])];
            EXPECT_EQ(e.set, layer.set);
            EXPECT_LT(unitarity_defect(g.matrix4()), 1e-12);
            ++per_edge[{e.a, e.b}];
        }
        EXPECT_EQ(layer.two.size(), c.lattice.edges_in(layer.set).size());
    }
    // Sixteen layers are two periods: every edge gets four gates.
    EXPECT_EQ(per_edge.size(), c.lattice.edges().size());
    for (const auto &kv : per_edge) EXPECT_EQ(kv.second, 4u);
}

TEST(Instance, SingleQubitDrawsLookUniform) {
    const CircuitInstance c = generate_instance(10, 10, 30, Sequence::cz(), 5);
    std::map<GateKind, std::size_t> counts;
    for (const Layer &layer : c.layers)
        for (const GateSpec &g : layer.single) ++counts[g.kind];
    const double total = 3000.0;
    for (GateKind k : {GateKind::SqrtX, GateKind::SqrtY, GateKind::SqrtW}) {
        EXPECT_NEAR(static_cast<double>(counts[k]) / total, 1.0 / 3.0, 0.03);
    }
}

TEST(Instance, DeterministicAndSeedSensitive) {
    const auto a = circuit_to_json(generate_instance(4, 4, 12, Sequence::haar(), 42));
    const auto b = circuit_to_json(generate_instance(4, 4, 12, Sequence::haar(), 42));
    const auto c = circuit_to_json(generate_instance(4, 4, 12, Sequence::haar(), 43));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Instance, PrefixStable) {
    // Counter-keyed draws: a shorter instance is a prefix of a longer one.
    const CircuitInstance s = generate_instance(3, 3, 5, Sequence::haar(), 7);
    const CircuitInstance l = generate_instance(3, 3, 9, Sequence::haar(), 7);
    for (std::size_t t = 0; t < 5; ++t) {
        for (std::size_t k = 0; k < s.layers[t].single.size(); ++k)
            EXPECT_EQ(s.layers[t].single[k].kind, l.layers[t].single[k].kind);
        for (std::size_t k = 0; k < s.layers[t].two.size(); ++k)
            EXPECT_EQ(s.layers[t].two[k].matrix4(), l.layers[t].two[k].matrix4());
    }
}

TEST(Serialization, RoundTripIsLossless) {
    for (const Sequence &seq : {Sequence::cz(), Sequence::fsim(0.3, 1.9), Sequence::haar()}) {
        const CircuitInstance c = generate_instance(3, 4, 10, seq, 11);
        const std::string text = circuit_to_json(c);
        const CircuitInstance back = circuit_from_json(text);
        EXPECT_EQ(circuit_to_json(back), text);
        EXPECT_EQ(back.depth, c.depth);
        EXPECT_EQ(back.seed, c.seed);
        EXPECT_EQ(back.sequence.kind, c.sequence.kind);
        EXPECT_EQ(back.sequence.theta, c.sequence.theta);
        EXPECT_EQ(back.sequence.phi, c.sequence.phi);
        for (std::size_t t = 0; t < c.layers.size(); ++t)
            for (std::size_t k = 0; k < c.layers[t].two.size(); ++k)
                EXPECT_EQ(back.layers[t].two[k].matrix4(), c.layers[t].two[k].matrix4());
    }
}

TEST(Serialization, RejectsMalformedDocuments) {
    EXPECT_EQ(kind_of([] { circuit_from_json("{"); }), ErrorKind::Format);
    EXPECT_EQ(kind_of([] { circuit_from_json("{\"schema\": \"other\"}"); }), ErrorKind::Format);
    EXPECT_EQ(kind_of([] { load_circuit("/nonexistent/dir/file.json"); }), ErrorKind::Io);
}

}  // namespace
}  // namespace pepsrqc

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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "pepsrqc/oracle.hpp"
#include "test_support.hpp"

namespace pepsrqc {
namespace {

using std::numbers::pi;
using testing::naive_apply;
using testing::naive_run;
using testing::random_vector;

ErrorKind kind_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Io;
}

PepsState run_peps(const CircuitInstance &c, std::size_t chi, std::size_t depth) {
    PepsOptions o;
    o.chi_max = chi;
    PepsState s = init_product_state(c.lattice, o);
    for (std::size_t t = 0; t < depth; ++t) apply_layer(s, c.layers[t]);
    return s;
}

TEST(StateVector, DepthZeroIsAllZeros) {
    const CircuitInstance c = generate_instance(3, 3, 4, Sequence::cz(), 1);
    const StateVector psi = statevector_run(c, 0);
    ASSERT_EQ(psi.amplitudes.size(), 512u);
    EXPECT_EQ(psi.amplitudes[0], cplx(1.0, 0.0));
    for (std::size_t i = 1; i < 512; ++i) EXPECT_EQ(psi.amplitudes[i], cplx(0.0, 0.0));
}

TEST(StateVector, CzLayerStabilizesZeros) {
    const Lattice lat = build_lattice(3, 3);
    Layer layer;
    layer.index = 1;
    for (std::size_t e : lat.edges_in(EdgeSet::A)) {
        GateSpec g;
        g.kind = GateKind::CZ;
        g.targets = {lat.edges()[e].a, lat.edges()[e].b};
        layer.two.push_back(g);
    }
    StateVector psi = zero_state(9);
    statevector_apply_layer(psi, layer);
    EXPECT_EQ(psi.amplitudes[0], cplx(1.0, 0.0));
    EXPECT_NEAR(psi.norm(), 1.0, 1e-15);
}

TEST(StateVector, MatchesNaiveSimulation) {
    for (const Sequence &seq : {Sequence::cz(), Sequence::fsim(pi / 2, pi / 6), Sequence::haar()}) {
        const CircuitInstance c = generate_instance(3, 3, 7, seq, 5);
        const std::vector<cplx> ref = naive_run(c, 7);
        StateVector psi = zero_state(9);
        for (std::size_t t = 0; t < 7; ++t) {
            statevector_apply_layer(psi, c.layers[t]);
            EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
        }
        for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(std::abs(psi.amplitudes[i] - ref[i]), 0.0, 1e-12);
    }
}

TEST(StateVector, Limits) {
    EXPECT_EQ(kind_of([] { zero_state(30); }), ErrorKind::Resource);
    EXPECT_EQ(kind_of([] { zero_state(12, 10); }), ErrorKind::Resource);
    const CircuitInstance c = generate_instance(2, 2, 3, Sequence::cz(), 1);
    EXPECT_EQ(kind_of([&] { statevector_run(c, 4); }), ErrorKind::Parameter);
}

TEST(PepsContraction, UntruncatedCzEqualsStateVector) {
    const CircuitInstance c = generate_instance(3, 3, 4, Sequence::cz(), 2);
    const std::vector<cplx> amp = peps_amplitudes(run_peps(c, 64, 4));
    const std::vector<cplx> ref = naive_run(c, 4);
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(std::abs(amp[i] - ref[i]), 0.0, 1e-10);
}

TEST(PepsContraction, RectangularLattices) {
    for (auto [r, c] : {std::pair<std::size_t, std::size_t>{2, 5}, {5, 2}, {3, 4}, {4, 3}}) {
        const CircuitInstance circ = generate_instance(r, c, 6, Sequence::haar(), 9);
        const PepsState s = run_peps(circ, 64, 6);
        EXPECT_NEAR(exact_fidelity(s, StateVector{r * c, naive_run(circ, 6)}), 1.0, 1e-10) << r << "x" << c;
    }
}

TEST(PepsContraction, OverlapWithBasisStates) {
    const PepsState s = init_product_state(build_lattice(3, 3));
    StateVector zero = zero_state(9);
    EXPECT_NEAR(std::abs(peps_overlap(s, zero) - 1.0), 0.0, 1e-15);
    StateVector ones{9, std::vector<cplx>(512, 0.0)};
    ones.amplitudes[511] = 1.0;
    EXPECT_EQ(std::abs(peps_overlap(s, ones)), 0.0);
    EXPECT_NEAR(exact_fidelity(s, zero), 1.0, 1e-15);
}

TEST(PepsContraction, RefusesAboveMemoryCap) {
    const CircuitInstance c = generate_instance(3, 3, 4, Sequence::haar(), 2);
    const PepsState s = run_peps(c, 8, 4);
    EXPECT_GT(contraction_bytes(s), 512u * 16u);
    EXPECT_EQ(kind_of([&] { peps_amplitudes(s, 1024); }), ErrorKind::Resource);
    EXPECT_EQ(kind_of([&] { peps_overlap(s, zero_state(8)); }), ErrorKind::Dimension);
}

TEST(Fidelity, IdenticalAndHaarPairs) {
    const auto v = random_vector(256, 1);
    EXPECT_NEAR(fidelity(v, v), 1.0, 1e-12);
    // Independent Haar-random states: E[F] = 1/d with Var[F] = (d-1)/(d^2 (d+1)).
    const std::size_t trials = 200;
    const double d = 256.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < trials; ++k) {
        sum += fidelity(random_vector(256, static_cast<std::uint32_t>(100 + 2 * k)),
                        random_vector(256, static_cast<std::uint32_t>(101 + 2 * k)));
    }
    const double se = std::sqrt((d - 1) / (d * d * (d + 1)) / trials);
    EXPECT_NEAR(sum / trials, 1.0 / d, 3 * se);
}

TEST(Nxeb, EqualAndUniformTables) {
    std::vector<double> p{0.5, 0.25, 0.125, 0.125};
    EXPECT_NEAR(nxeb(p, p), 1.0, 1e-14);
    const std::vector<double> uniform(4, 0.25);
    EXPECT_NEAR(nxeb(uniform, p), 0.0, 1e-14);
    // Unnormalized PEPS table is renormalized first.
    std::vector<double> scaled = p;
    for (double &x : scaled) x *= 0.3;
    EXPECT_NEAR(nxeb(scaled, p), 1.0, 1e-14);
}

TEST(Nxeb, InvariantUnderRelabeling) {
    std::mt19937_64 gen(3);
    std::exponential_distribution<double> ex;
    std::vector<double> a(64);
    std::vector<double> b(64);
    for (std::size_t i = 0; i < 64; ++i) {
        a[i] = ex(gen);
        b[i] = ex(gen) + 0.5 * a[i];
    }
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t i = 0; i < 64; ++i) {
        sa += a[i];
        sb += b[i];
    }
    for (std::size_t i = 0; i < 64; ++i) {
        a[i] /= sa;
        b[i] /= sb;
    }
    std::vector<std::size_t> perm(64);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<double> pa(64);
    std::vector<double> pb(64);
    for (std::size_t i = 0; i < 64; ++i) {
        pa[i] = a[perm[i]];
        pb[i] = b[perm[i]];
    }
    EXPECT_NEAR(nxeb(a, b), nxeb(pa, pb), 1e-12);
}

TEST(Nxeb, Errors) {
    const std::vector<double> uniform(4, 0.25);
    EXPECT_EQ(kind_of([&] { nxeb(uniform, uniform); }), ErrorKind::DegenerateInput);
    const std::vector<double> three(3, 1.0 / 3);
    EXPECT_EQ(kind_of([&] { nxeb(three, three); }), ErrorKind::Dimension);
    const std::vector<double> neg{0.5, 0.5, 0.25, -0.25};
    const std::vector<double> p{0.5, 0.25, 0.125, 0.125};
    EXPECT_EQ(kind_of([&] { nxeb(neg, p); }), ErrorKind::Domain);
}

std::vector<double> exponential_quantiles(std::size_t size) {
    std::vector<double> p(size);
    double sum = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        p[i] = -std::log1p(-(static_cast<double>(i) + 0.5) / static_cast<double>(size));
        sum += p[i];
    }
    for (double &x : p) x /= sum;
    return p;
}

TEST(Ptd, ExponentialQuantilesConverge) {
    const double small = ptd_distance(exponential_quantiles(1 << 6));
    const double large = ptd_distance(exponential_quantiles(1 << 14));
    EXPECT_LT(large, small);
    EXPECT_LT(large, 1e-3);
}

TEST(Ptd, PointMassIsFar) {
    std::vector<double> p(1 << 10, 0.0);
    p[17] = 1.0;
    EXPECT_GT(ptd_distance(p), 0.99);
}

TEST(Entanglement, ProductAndBellStates) {
    const StateVector zero = zero_state(6);
    for (double s : entropy_profile(zero)) EXPECT_NEAR(s, 0.0, 1e-12);
    // Bell pair on sites 2,3 of six qubits.
    std::vector<cplx> psi(64, 0.0);
    psi[0] = 1.0 / std::sqrt(2.0);
    psi[0b001100] = 1.0 / std::sqrt(2.0);
    const StateVector bell{6, psi};
    EXPECT_NEAR(entanglement_entropy(bell, 3), 1.0, 1e-12);
    EXPECT_NEAR(entanglement_entropy(bell, 2), 0.0, 1e-12);
    EXPECT_NEAR(entanglement_entropy(bell, 4), 0.0, 1e-12);
    const EntanglementCut cut = entanglement(bell, 3);
    ASSERT_GE(cut.spectrum.size(), 2u);
    EXPECT_NEAR(cut.spectrum[0], 0.5, 1e-12);
    EXPECT_NEAR(cut.spectrum[1], 0.5, 1e-12);
    EXPECT_EQ(kind_of([&] { entanglement(bell, 0); }), ErrorKind::Parameter);
    EXPECT_EQ(kind_of([&] { entanglement(bell, 6); }), ErrorKind::Parameter);
}

TEST(Entanglement, BoundsAndComplementaryCuts) {
    const CircuitInstance c = generate_instance(3, 3, 10, Sequence::haar(), 4);
    const StateVector psi = statevector_run(c);
    const std::vector<double> prof = entropy_profile(psi);
    ASSERT_EQ(prof.size(), 8u);
    // The same cut seen from the other side: reverse the site order.
    std::vector<cplx> rev(psi.amplitudes.size());
    for (std::size_t x = 0; x < rev.size(); ++x) {
        std::size_t y = 0;
        for (std::size_t b = 0; b < 9; ++b) y |= ((x >> b) & 1U) << (8 - b);
        rev[y] = psi.amplitudes[x];
    }
    const StateVector flipped{9, rev};
    for (std::size_t i = 1; i < 9; ++i) {
        EXPECT_LE(prof[i - 1], static_cast<double>(std::min(i, 9 - i)) + 1e-9);
        EXPECT_NEAR(prof[i - 1], entanglement_entropy(flipped, 9 - i), 1e-9);
        const auto spec = entanglement(psi, i).spectrum;
        for (std::size_t k = 1; k < spec.size(); ++k) EXPECT_GE(spec[k - 1], spec[k]);
    }
}

TEST(DeepCircuit, PorterThomasAndVolumeLaw) {
    const CircuitInstance c = generate_instance(4, 4, 20, Sequence::fsim(pi / 2, pi / 6), 1);
    const StateVector psi = statevector_run(c);
    EXPECT_LT(ptd_distance(probabilities(psi.amplitudes)), 0.05);
    EXPECT_GE(entanglement_entropy(psi, 8), 0.9 * 8);
}

std::vector<double> osc(const Mat4 &g) {
    return operator_schmidt(g);
}

TEST(OperatorSchmidt, QuotedDegeneracies) {
    const auto cz = osc(cz_matrix());
    ASSERT_EQ(cz.size(), 2u);
    for (double v : cz) EXPECT_NEAR(v, 1.0, 1e-12);
    const auto fs = osc(fsim_matrix(pi / 2, pi / 6));
    ASSERT_EQ(fs.size(), 4u);
    for (double v : fs) EXPECT_NEAR(v, 1.0, 1e-12);
    const auto id = osc(fsim_matrix(0, 0));
    ASSERT_EQ(id.size(), 1u);
    EXPECT_NEAR(id[0], 1.0, 1e-12);
}

TEST(OperatorSchmidt, ProductOperatorAndIndependentReshape) {
    // A (x) B has a single coefficient.
    const Mat2 a = sqrt_w();
    const Mat2 b = sqrt_x();
    Mat4 ab{};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l) ab[(i * 2 + j) * 4 + (k * 2 + l)] = a[i * 2 + k] * b[j * 2 + l];
    EXPECT_EQ(osc(ab).size(), 1u);
    // Cross-check a Haar gate against Eigen on the realigned matrix.
    CounterRng rng(5, 0, 0, 0);
    const Mat4 u = haar_unitary4(rng);
    Eigen::Matrix4cd m;
    for (std::size_t x1 = 0; x1 < 2; ++x1)
        for (std::size_t x2 = 0; x2 < 2; ++x2)
            for (std::size_t y1 = 0; y1 < 2; ++y1)
                for (std::size_t y2 = 0; y2 < 2; ++y2)
                    m(static_cast<Eigen::Index>(x1 * 2 + y1), static_cast<Eigen::Index>(x2 * 2 + y2)) =
                        u[(x1 * 2 + x2) * 4 + (y1 * 2 + y2)];
    const Eigen::Vector4d s = Eigen::JacobiSVD<Eigen::Matrix4cd>(m).singularValues();
    const auto got = osc(u);
    ASSERT_EQ(got.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(got[k], s(static_cast<Eigen::Index>(k)) / s(0), 1e-12);
}

TEST(OperatorSchmidt, HaarIsNonDegenerate) {
    double gap = 1.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        CounterRng rng(seed, 0, 0, 0);
        const auto v = osc(haar_unitary4(rng));
        ASSERT_EQ(v.size(), 4u);
        for (std::size_t k = 1; k < 4; ++k) gap = std::min(gap, v[k - 1] - v[k]);
    }
    EXPECT_GT(gap, 1e-10);
}

TEST(OperatorSchmidt, ZeroMatrixIsRejected) {
    EXPECT_EQ(kind_of([] { operator_schmidt(Mat4{}); }), ErrorKind::DegenerateInput);
}

TEST(Metrics, ExactPepsGivesUnitFidelityAndXeb) {
    const CircuitInstance c = generate_instance(3, 3, 6, Sequence::haar(), 8);
    const PepsState s = run_peps(c, 64, 6);
    const StateVector psi = statevector_run(c, 6);
    const OracleMetrics m = oracle_metrics(s, psi, 6);
    EXPECT_EQ(m.depth, 6u);
    EXPECT_NEAR(m.f_ex, 1.0, 1e-10);
    EXPECT_NEAR(m.f_nxeb, 1.0, 1e-9);
    ASSERT_EQ(m.entropy_profile.size(), 8u);
    ASSERT_EQ(m.spectra.size(), 8u);
    EXPECT_NEAR(m.entropy_profile[3], entanglement_entropy(psi, 4), 1e-12);
}

TEST(Metrics, TruncatedFidelityBelowOne) {
    const CircuitInstance c = generate_instance(4, 4, 10, Sequence::fsim(pi / 2, pi / 6), 2);
    const PepsState s = run_peps(c, 2, 10);
    const double f = exact_fidelity(s, statevector_run(c, 10));
    EXPECT_GT(f, 0.0);
    EXPECT_LT(f, 0.99);
    // Independent check of the same number through the naive simulator.
    EXPECT_NEAR(f, testing::overlap_fidelity(peps_amplitudes(s), naive_run(c, 10)), 1e-10);
}

}  // namespace
}  // namespace pepsrqc

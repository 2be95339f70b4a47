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

#include "pepsrqc/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "pepsrqc/kernels.hpp"
#include "pepsrqc/linalg.hpp"

namespace pepsrqc {

double StateVector::norm() const {
    double s = 0.0;
    for (const auto &a : amplitudes) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

StateVector zero_state(std::size_t n, std::size_t qubit_cap) {
    if (n > qubit_cap) {
        throw Error(ErrorKind::Resource,
                    fmt::format("state vector of {} qubits exceeds the cap of {}", n, qubit_cap));
    }
    StateVector psi;
    psi.n = n;
    psi.amplitudes.assign(std::size_t{1} << n, cplx{0.0, 0.0});
    psi.amplitudes[0] = 1.0;
    return psi;
}

void statevector_apply_layer(StateVector &psi, const Layer &layer) {
    for (const auto &g : layer.single) {
        kernels::apply_1q(psi.amplitudes, psi.n, g.targets.at(0), g.matrix2());
    }
    // Gates of one layer act on disjoint qubit pairs.
    for (const auto &g : layer.two) {
        kernels::apply_2q(psi.amplitudes, psi.n, g.targets.at(0), g.targets.at(1), g.matrix4());
    }
}

StateVector statevector_run(const CircuitInstance &circuit, std::size_t depth, std::size_t qubit_cap) {
    const std::size_t d = std::min(depth, circuit.layers.size());
    if (depth != static_cast<std::size_t>(-1) && depth > circuit.layers.size()) {
        throw Error(ErrorKind::Parameter,
                    fmt::format("depth {} exceeds the circuit depth {}", depth, circuit.layers.size()));
    }
    StateVector psi = zero_state(circuit.lattice.size(), qubit_cap);
    for (std::size_t t = 0; t < d; ++t) {
        statevector_apply_layer(psi, circuit.layers[t]);
    }
    return psi;
}

namespace {

std::string edge_label(std::size_t e) {
    return "e" + std::to_string(e);
}

std::string phys_label(std::size_t site) {
    return "p" + std::to_string(site);
}

/// Gamma with sqrt(lambda) on every virtual leg; legs are relabelled to
/// p<site> and e<edge>, and the extent-1 boundary legs are dropped.
DenseTensor site_tensor(const PepsState &state, std::size_t site) {
    const DenseTensor &g = state.gamma(site);
    std::array<std::vector<double>, 4> roots;
    kernels::LegWeights weights(5);
    std::vector<std::string> legs{phys_label(site)};
    std::vector<std::size_t> dims{2};
    for (auto d : kDirections) {
        const std::size_t e = state.lattice().edge_at(site, d);
        if (e == kNoEdge) {
            continue;
        }
        const auto k = static_cast<std::size_t>(d);
        for (double v : state.lambda(e)) {
            roots[k].push_back(std::sqrt(v));
        }
        weights[1 + k] = roots[k];
        legs.push_back(edge_label(e));
        dims.push_back(g.dims()[1 + k]);
    }
    std::vector<cplx> data(g.size());
    const std::array<std::size_t, 5> id{0, 1, 2, 3, 4};
    kernels::permute_scale(g.data(), g.dims(), id, weights, data);
    return DenseTensor(std::move(legs), std::move(dims), std::move(data));
}

/// The lattice cut into four quadrants; edges crossing between quadrants form
/// the groups a (top-left|top-right), b (top-left|bottom-left),
/// c (bottom-left|bottom-right) and d (top-right|bottom-right).
struct Quadrants {
    std::array<std::vector<std::size_t>, 4> sites;  // tl, tr, bl, br
    std::vector<std::size_t> a, b, c, d;
};

Quadrants split(const Lattice &lat) {
    Quadrants q;
    const std::size_t rs = lat.rows() / 2;
    const std::size_t cs = lat.cols() / 2;
    auto quad = [&](std::size_t s) { return (lat.row_of(s) >= rs ? 2u : 0u) + (lat.col_of(s) >= cs ? 1u : 0u); };
    // Within each quadrant, reading order mirrored so that it starts in the
    // lattice corner; this keeps at most one extra bond open while zipping.
    for (std::size_t k = 0; k < 4; ++k) {
        const bool flip_r = (k & 2) != 0;
        const bool flip_c = (k & 1) != 0;
        for (std::size_t i = 0; i < lat.rows(); ++i) {
            for (std::size_t j = 0; j < lat.cols(); ++j) {
                const std::size_t s = lat.site(flip_r ? lat.rows() - 1 - i : i, flip_c ? lat.cols() - 1 - j : j);
                if (quad(s) == k) {
                    q.sites[k].push_back(s);
                }
            }
        }
    }
    for (std::size_t e = 0; e < lat.edges().size(); ++e) {
        const auto qa = quad(lat.edges()[e].a);
        const auto qb = quad(lat.edges()[e].b);
        if (qa == qb) {
            continue;
        }
        const std::pair<unsigned, unsigned> key{std::min(qa, qb), std::max(qa, qb)};
        if (key == std::pair{0u, 1u}) {
            q.a.push_back(e);
        } else if (key == std::pair{0u, 2u}) {
            q.b.push_back(e);
        } else if (key == std::pair{2u, 3u}) {
            q.c.push_back(e);
        } else {
            q.d.push_back(e);
        }
    }
    return q;
}

std::vector<std::string> labels(const std::vector<std::size_t> &edges) {
    std::vector<std::string> out;
    for (auto e : edges) {
        out.push_back(edge_label(e));
    }
    return out;
}

/// Contracts the sites of one region in reading order.
DenseTensor contract_region(const PepsState &state, const std::vector<std::size_t> &sites) {
    DenseTensor t = site_tensor(state, sites.front());
    for (std::size_t k = 1; k < sites.size(); ++k) {
        DenseTensor a = site_tensor(state, sites[k]);
        std::vector<std::string> shared;
        for (const auto &l : a.legs()) {
            if (l.front() == 'e' && t.has_leg(l)) {
                shared.push_back(l);
            }
        }
        t = contract(t, shared, a, shared);
    }
    return t;
}

/// Element counts alive at the worst moment of contract_region.
std::pair<std::size_t, std::size_t> region_plan(const PepsState &state, const std::vector<std::size_t> &sites) {
    const Lattice &lat = state.lattice();
    std::vector<int> touched(lat.edges().size(), 0);
    std::size_t phys = 0;
    std::size_t peak = 0;
    std::size_t size = 1;
    for (auto s : sites) {
        ++phys;
        for (auto d : kDirections) {
            const std::size_t e = lat.edge_at(s, d);
            if (e != kNoEdge) {
                ++touched[e];
            }
        }
        std::size_t next = std::size_t{1} << phys;
        for (std::size_t e = 0; e < touched.size(); ++e) {
            if (touched[e] == 1) {
                next *= state.bond_dim(e);
            }
        }
        peak = std::max(peak, 2 * size + 2 * next);
        size = next;
    }
    return {peak, size};
}

}  // namespace

std::size_t contraction_bytes(const PepsState &state) {
    const Lattice &lat = state.lattice();
    const Quadrants q = split(lat);
    std::size_t held = 0;
    std::size_t peak = 0;
    std::array<std::size_t, 4> sizes{};
    for (std::size_t k = 0; k < 4; ++k) {
        const auto [p, s] = region_plan(state, q.sites[k]);
        peak = std::max(peak, held + p);
        held += s;
        sizes[k] = s;
    }
    auto group = [&](const std::vector<std::size_t> &g) {
        std::size_t m = 1;
        for (auto e : g) {
            m *= state.bond_dim(e);
        }
        return m;
    };
    const std::size_t chunks = state.bond_dim(q.b.front());
    const std::size_t n_amp = std::size_t{1} << lat.size();
    const std::size_t top = (std::size_t{1} << (q.sites[0].size() + q.sites[1].size())) * group(q.b) / chunks * group(q.d);
    const std::size_t bot = (std::size_t{1} << (q.sites[2].size() + q.sites[3].size())) * group(q.b) / chunks * group(q.d);
    const std::size_t tl = sizes[0] / chunks;
    const std::size_t bl = sizes[2] / chunks;
    const std::size_t join = held + n_amp + std::max({2 * tl + 2 * sizes[1] + top, top + 2 * bl + 2 * sizes[3] + bot,
                                                      2 * top + 2 * bot + 2 * n_amp});
    return sizeof(cplx) * (std::max(peak, join) + n_amp);
}

std::vector<cplx> peps_amplitudes(const PepsState &state, std::size_t memory_cap) {
    const Lattice &lat = state.lattice();
    if (lat.size() > 40) {
        throw Error(ErrorKind::Resource, fmt::format("exact contraction of {} sites is out of reach", lat.size()));
    }
    const std::size_t need = contraction_bytes(state);
    if (need > memory_cap) {
        throw Error(ErrorKind::Resource,
                    fmt::format("exact contraction needs {} bytes, above the cap of {}", need, memory_cap));
    }
    const Quadrants q = split(lat);
    std::array<DenseTensor, 4> quad;
    for (std::size_t k = 0; k < 4; ++k) {
        quad[k] = contract_region(state, q.sites[k]);
    }
    const auto la = labels(q.a);
    const auto lc = labels(q.c);
    auto lbd = labels(q.b);
    for (const auto &l : labels(q.d)) {
        lbd.push_back(l);
    }
    // Sum over the first b bond one index at a time to bound the intermediates.
    const std::string chunk = edge_label(q.b.front());
    DenseTensor full;
    for (std::size_t i = 0; i < quad[0].dim(chunk); ++i) {
        DenseTensor top = contract(quad[0].sliced(chunk, i), la, quad[1], la);
        DenseTensor bot = contract(quad[2].sliced(chunk, i), lc, quad[3], lc);
        DenseTensor part = contract(top, lbd, bot, lbd);
        if (i == 0) {
            full = std::move(part);
        } else {
            auto dst = full.data();
            auto src = part.data();
            for (std::size_t k = 0; k < dst.size(); ++k) {
                dst[k] += src[k];
            }
        }
    }
    std::vector<std::string> order;
    for (std::size_t s = 0; s < lat.size(); ++s) {
        order.push_back(phys_label(s));
    }
    return std::move(full.permuted(order).storage());
}

double fidelity(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::Dimension, "amplitude tables differ in length");
    }
    cplx ov{0.0, 0.0};
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ov += std::conj(a[k]) * b[k];
        na += std::norm(a[k]);
        nb += std::norm(b[k]);
    }
    if (na == 0.0 || nb == 0.0) {
        throw Error(ErrorKind::DegenerateInput, "fidelity with a zero vector");
    }
    return std::norm(ov) / (na * nb);
}

cplx peps_overlap(const PepsState &state, const StateVector &psi, std::size_t memory_cap) {
    if (psi.n != state.lattice().size()) {
        throw Error(ErrorKind::Dimension, "state vector and PEPS differ in qubit count");
    }
    const auto amp = peps_amplitudes(state, memory_cap);
    cplx ov{0.0, 0.0};
    for (std::size_t k = 0; k < amp.size(); ++k) {
        ov += std::conj(psi.amplitudes[k]) * amp[k];
    }
    return ov;
}

double exact_fidelity(const PepsState &state, const StateVector &psi, std::size_t memory_cap) {
    if (psi.n != state.lattice().size()) {
        throw Error(ErrorKind::Dimension, "state vector and PEPS differ in qubit count");
    }
    return fidelity(psi.amplitudes, peps_amplitudes(state, memory_cap));
}

std::vector<double> probabilities(std::span<const cplx> amplitudes) {
    std::vector<double> p(amplitudes.size());
    std::transform(amplitudes.begin(), amplitudes.end(), p.begin(), [](cplx a) { return std::norm(a); });
    return p;
}

double nxeb(std::span<const double> p_peps, std::span<const double> p_ex) {
    const std::size_t n = p_ex.size();
    if (p_peps.size() != n || n == 0 || (n & (n - 1)) != 0) {
        throw Error(ErrorKind::Dimension, "probability tables must share a power-of-two length");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (p_peps[k] < 0.0 || p_ex[k] < 0.0) {
            throw Error(ErrorKind::Domain, "negative probability");
        }
        total += p_peps[k];
    }
    if (total <= 0.0) {
        throw Error(ErrorKind::DegenerateInput, "PEPS probability table is zero");
    }
    double cross = 0.0;
    double self = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cross += p_peps[k] / total * p_ex[k];
        self += p_ex[k] * p_ex[k];
    }
    const double dim = static_cast<double>(n);
    const double den = dim * self - 1.0;
    if (std::abs(den) < 1e-12) {
        throw Error(ErrorKind::DegenerateInput, "exact distribution is uniform; nXEB undefined");
    }
    return (dim * cross - 1.0) / den;
}

double ptd_distance(std::span<const double> p) {
    if (p.empty()) {
        throw Error(ErrorKind::Dimension, "empty probability table");
    }
    const double dim = static_cast<double>(p.size());
    std::vector<double> y(p.begin(), p.end());
    for (double &v : y) {
        v *= dim;
    }
    std::sort(y.begin(), y.end());
    double d = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double f = -std::expm1(-y[k]);
        d = std::max({d, static_cast<double>(k + 1) / dim - f, f - static_cast<double>(k) / dim});
    }
    return d;
}

EntanglementCut entanglement(const StateVector &psi, std::size_t cut) {
    if (cut == 0 || cut >= psi.n) {
        throw Error(ErrorKind::Parameter, fmt::format("cut {} outside 1..{}", cut, psi.n - 1));
    }
    // Column-major (2^(n-cut) x 2^cut): the transpose of the row-major split.
    const auto rows = static_cast<Eigen::Index>(std::size_t{1} << (psi.n - cut));
    const auto cols = static_cast<Eigen::Index>(std::size_t{1} << cut);
    const linalg::Matrix m = Eigen::Map<const linalg::Matrix>(psi.amplitudes.data(), rows, cols);
    std::vector<double> s = linalg::singular_values(m);
    double total = 0.0;
    for (double v : s) {
        total += v * v;
    }
    EntanglementCut out;
    for (double v : s) {
        const double q = v * v / total;
        out.spectrum.push_back(q);
        if (q > 0.0) {
            out.entropy -= q * std::log2(q);
        }
    }
    return out;
}

double entanglement_entropy(const StateVector &psi, std::size_t cut) {
    return entanglement(psi, cut).entropy;
}

std::vector<double> entropy_profile(const StateVector &psi) {
    std::vector<double> out;
    for (std::size_t i = 1; i < psi.n; ++i) {
        out.push_back(entanglement_entropy(psi, i));
    }
    return out;
}

std::vector<double> operator_schmidt(const Mat4 &gate) {
    // M[(x1 x1'), (x2 x2')] = G[(x1 x2), (x1' x2')]
    linalg::Matrix m(4, 4);
    for (std::size_t x1 = 0; x1 < 2; ++x1) {
        for (std::size_t x2 = 0; x2 < 2; ++x2) {
            for (std::size_t y1 = 0; y1 < 2; ++y1) {
                for (std::size_t y2 = 0; y2 < 2; ++y2) {
                    m(static_cast<Eigen::Index>(2 * x1 + y1), static_cast<Eigen::Index>(2 * x2 + y2)) =
                        gate[4 * (2 * x1 + x2) + (2 * y1 + y2)];
                }
            }
        }
    }
    std::vector<double> s = linalg::singular_values(m);
    if (s.empty() || s.front() == 0.0) {
        throw Error(ErrorKind::DegenerateInput, "operator Schmidt decomposition of a zero matrix");
    }
    const double top = s.front();
    std::vector<double> out;
    for (double v : s) {
        if (v >= 1e-12 * top) {
            out.push_back(v / top);
        }
    }
    return out;
}

OracleMetrics oracle_metrics(const PepsState &state, const StateVector &psi, std::size_t depth,
                             std::size_t memory_cap) {
    const auto amp = peps_amplitudes(state, memory_cap);
    OracleMetrics m;
    m.depth = depth;
    m.f_ex = fidelity(psi.amplitudes, amp);
    const auto p_ex = probabilities(psi.amplitudes);
    try {
        m.f_nxeb = nxeb(probabilities(amp), p_ex);
    } catch (const Error &e) {
        if (e.kind() != ErrorKind::DegenerateInput) {
            throw;
        }
        m.f_nxeb = std::nan("");
    }
    m.ptd = ptd_distance(p_ex);
    for (std::size_t i = 1; i < psi.n; ++i) {
        EntanglementCut cut = entanglement(psi, i);
        m.entropy_profile.push_back(cut.entropy);
        m.spectra.push_back(std::move(cut.spectrum));
    }
    return m;
}

}  // namespace pepsrqc

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

#include "pepsrqc/circuit.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "pepsrqc/linalg.hpp"

namespace pepsrqc {

char edge_set_name(EdgeSet s) {
    return static_cast<char>('A' + static_cast<int>(s));
}

Direction opposite(Direction d) {
    switch (d) {
        case Direction::Left:
            return Direction::Right;
        case Direction::Right:
            return Direction::Left;
        case Direction::Up:
            return Direction::Down;
        case Direction::Down:
            return Direction::Up;
    }
    return d;
}

Lattice::Lattice(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows < 2 || cols < 2) {
        throw Error(ErrorKind::Size, fmt::format("lattice must be at least 2x2, got {}x{}", rows, cols));
    }
    neighbors_.assign(rows * cols, {kNoEdge, kNoEdge, kNoEdge, kNoEdge});
    auto add = [&](std::size_t a, std::size_t b, EdgeSet set, bool horizontal) {
        const std::size_t id = edges_.size();
        edges_.push_back({a, b, set, horizontal});
        if (horizontal) {
            neighbors_[a][static_cast<std::size_t>(Direction::Right)] = id;
            neighbors_[b][static_cast<std::size_t>(Direction::Left)] = id;
        } else {
            neighbors_[a][static_cast<std::size_t>(Direction::Down)] = id;
            neighbors_[b][static_cast<std::size_t>(Direction::Up)] = id;
        }
    };
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c + 1 < cols; ++c) {
            add(site(r, c), site(r, c + 1), (r + c) % 2 == 0 ? EdgeSet::A : EdgeSet::B, true);
        }
        if (r + 1 < rows) {
            for (std::size_t c = 0; c < cols; ++c) {
                add(site(r, c), site(r + 1, c), (r + c) % 2 == 0 ? EdgeSet::C : EdgeSet::D, false);
            }
        }
    }
}

std::size_t Lattice::edge_between(std::size_t s, std::size_t t) const {
    for (auto d : kDirections) {
        const std::size_t e = edge_at(s, d);
        if (e != kNoEdge && (edges_[e].a == t || edges_[e].b == t)) {
            return e;
        }
    }
    throw Error(ErrorKind::Parameter, fmt::format("sites {} and {} are not nearest neighbours", s, t));
}

std::vector<std::size_t> Lattice::edges_in(EdgeSet set) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (edges_[e].set == set) {
            out.push_back(e);
        }
    }
    return out;
}

Lattice build_lattice(std::size_t n_r, std::size_t n_c) {
    return Lattice(n_r, n_c);
}

EdgeSet scheduled_set(std::size_t t) {
    static constexpr std::array<EdgeSet, 8> pattern{EdgeSet::A, EdgeSet::B, EdgeSet::C, EdgeSet::D,
                                                    EdgeSet::C, EdgeSet::D, EdgeSet::A, EdgeSet::B};
    if (t == 0) {
        throw Error(ErrorKind::Parameter, "layer index starts at 1");
    }
    return pattern[(t - 1) % 8];
}

std::string gate_kind_name(GateKind k) {
    switch (k) {
        case GateKind::SqrtX:
            return "sqrt_x";
        case GateKind::SqrtY:
            return "sqrt_y";
        case GateKind::SqrtW:
            return "sqrt_w";
        case GateKind::CZ:
            return "cz";
        case GateKind::FSim:
            return "fsim";
        case GateKind::Haar4:
            return "haar4";
    }
    return "?";
}

namespace {

GateKind parse_gate_kind(const std::string &s) {
    for (auto k : {GateKind::SqrtX, GateKind::SqrtY, GateKind::SqrtW, GateKind::CZ, GateKind::FSim,
                   GateKind::Haar4}) {
        if (gate_kind_name(k) == s) {
            return k;
        }
    }
    throw Error(ErrorKind::Format, fmt::format("unknown gate kind '{}'", s));
}

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

}  // namespace

Mat2 sqrt_x() {
    const cplx i{0.0, 1.0};
    return {kInvSqrt2, -i * kInvSqrt2, -i * kInvSqrt2, kInvSqrt2};
}

Mat2 sqrt_y() {
    return {kInvSqrt2, -kInvSqrt2, kInvSqrt2, kInvSqrt2};
}

Mat2 sqrt_w() {
    // sqrt(i) = e^{i pi/4}, sqrt(-i) = e^{-i pi/4}
    const cplx sqrt_i = std::polar(1.0, std::numbers::pi / 4.0);
    const cplx sqrt_mi = std::polar(1.0, -std::numbers::pi / 4.0);
    return {kInvSqrt2, -sqrt_i * kInvSqrt2, sqrt_mi * kInvSqrt2, kInvSqrt2};
}

Mat4 cz_matrix() {
    Mat4 g{};
    g[0] = 1.0;
    g[5] = 1.0;
    g[10] = 1.0;
    g[15] = -1.0;
    return g;
}

Mat4 fsim_matrix(double theta, double phi) {
    constexpr double tol = 1e-12;
    if (!(theta >= -tol && theta <= std::numbers::pi / 2 + tol && phi >= -tol && phi <= std::numbers::pi + tol)) {
        throw Error(ErrorKind::Parameter,
                    fmt::format("fSim angles out of range: theta={} (0..pi/2), phi={} (0..pi)", theta, phi));
    }
    const cplx i{0.0, 1.0};
    Mat4 g{};
    g[0] = 1.0;
    g[5] = std::cos(theta);
    g[6] = -i * std::sin(theta);
    g[9] = -i * std::sin(theta);
    g[10] = std::cos(theta);
    g[15] = std::exp(-i * phi);
    return g;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t layer, std::uint64_t index, std::uint64_t stream) {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ layer);
    k = splitmix64(k ^ index);
    key_ = splitmix64(k ^ stream);
}

std::uint64_t CounterRng::next_u64() {
    return splitmix64(key_ ^ splitmix64(counter_++));
}

double CounterRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t CounterRng::below(std::size_t n) {
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % static_cast<std::uint64_t>(n);
    std::uint64_t x = next_u64();
    while (x >= limit) {
        x = next_u64();
    }
    return static_cast<std::size_t>(x % n);
}

double CounterRng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Mat4 haar_unitary4(CounterRng &rng) {
    linalg::Matrix z(4, 4);
    for (int c = 0; c < 4; ++c) {
        for (int r = 0; r < 4; ++r) {
            z(r, c) = cplx{rng.normal(), rng.normal()} * kInvSqrt2;
        }
    }
    // qr_thin already fixes diag(R) to be positive, which is the phase
    // correction that makes Q Haar distributed.
    const linalg::Qr f = linalg::qr_thin(z);
    Mat4 u{};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            u[static_cast<std::size_t>(4 * r + c)] = f.q(r, c);
        }
    }
    return u;
}

namespace {

template <std::size_t N>
double unitarity_defect_impl(const std::array<cplx, N * N> &g) {
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < N; ++k) {
                s += std::conj(g[k * N + i]) * g[k * N + j];
            }
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

}  // namespace

double unitarity_defect(const Mat2 &g) {
    return unitarity_defect_impl<2>(g);
}

double unitarity_defect(const Mat4 &g) {
    return unitarity_defect_impl<4>(g);
}

Mat2 GateSpec::matrix2() const {
    switch (kind) {
        case GateKind::SqrtX:
            return sqrt_x();
        case GateKind::SqrtY:
            return sqrt_y();
        case GateKind::SqrtW:
            return sqrt_w();
        default:
            throw Error(ErrorKind::Parameter, "not a single-qubit gate");
    }
}

Mat4 GateSpec::matrix4() const {
    switch (kind) {
        case GateKind::CZ:
            return cz_matrix();
        case GateKind::FSim:
            return fsim_matrix(theta, phi);
        case GateKind::Haar4:
            if (!haar) {
                throw Error(ErrorKind::Parameter, "Haar gate without a matrix");
            }
            return *haar;
        default:
            throw Error(ErrorKind::Parameter, "not a two-qubit gate");
    }
}

std::string sequence_kind_name(SequenceKind k) {
    switch (k) {
        case SequenceKind::CZ:
            return "cz";
        case SequenceKind::FSim:
            return "fsim";
        case SequenceKind::TwoQubitHaar:
            return "2hr";
    }
    return "?";
}

SequenceKind parse_sequence_kind(const std::string &name) {
    if (name == "cz") {
        return SequenceKind::CZ;
    }
    if (name == "fsim") {
        return SequenceKind::FSim;
    }
    if (name == "2hr" || name == "haar") {
        return SequenceKind::TwoQubitHaar;
    }
    throw Error(ErrorKind::Parameter, fmt::format("unknown sequence kind '{}'", name));
}

std::string Sequence::name() const {
    if (kind == SequenceKind::FSim) {
        return fmt::format("fsim({:.6g},{:.6g})", theta, phi);
    }
    return sequence_kind_name(kind);
}

std::size_t CircuitInstance::two_qubit_gates(std::size_t d) const {
    std::size_t n = 0;
    for (std::size_t t = 0; t < std::min(d, layers.size()); ++t) {
        n += layers[t].two.size();
    }
    return n;
}

namespace {

constexpr std::uint64_t kSingleStream = 1;
constexpr std::uint64_t kTwoStream = 2;

}  // namespace

CircuitInstance generate_instance(std::size_t n_r, std::size_t n_c, std::size_t depth, const Sequence &sequence,
                                  std::uint64_t seed) {
    CircuitInstance c;
    c.lattice = build_lattice(n_r, n_c);
    c.depth = depth;
    c.sequence = sequence;
    c.seed = seed;
    if (sequence.kind == SequenceKind::FSim) {
        fsim_matrix(sequence.theta, sequence.phi);  // validates the angles
    }
    static constexpr std::array<GateKind, 3> singles{GateKind::SqrtX, GateKind::SqrtY, GateKind::SqrtW};
    for (std::size_t t = 1; t <= depth; ++t) {
        Layer layer;
        layer.index = t;
        layer.set = scheduled_set(t);
        for (std::size_t s = 0; s < c.lattice.size(); ++s) {
            CounterRng rng(seed, t, s, kSingleStream);
            layer.single.push_back({singles[rng.below(3)], {s}, 0.0, 0.0, std::nullopt});
        }
        for (std::size_t e : c.lattice.edges_in(layer.set)) {
            const Edge &edge = c.lattice.edges()[e];
            GateSpec g;
            g.targets = {edge.a, edge.b};
            switch (sequence.kind) {
                case SequenceKind::CZ:
                    g.kind = GateKind::CZ;
                    break;
                case SequenceKind::FSim:
                    g.kind = GateKind::FSim;
                    g.theta = sequence.theta;
                    g.phi = sequence.phi;
                    break;
                case SequenceKind::TwoQubitHaar: {
                    g.kind = GateKind::Haar4;
                    CounterRng rng(seed, t, e, kTwoStream);
                    g.haar = haar_unitary4(rng);
                    break;
                }
            }
            layer.two.push_back(std::move(g));
        }
        c.layers.push_back(std::move(layer));
    }
    return c;
}

namespace {

using nlohmann::json;

constexpr int kCircuitSchemaVersion = 1;

json gate_matrix_json(const Mat4 &m) {
    json arr = json::array();
    for (const auto &v : m) {
        arr.push_back({v.real(), v.imag()});
    }
    return arr;
}

Mat4 gate_matrix_from_json(const json &arr) {
    if (!arr.is_array() || arr.size() != 16) {
        throw Error(ErrorKind::Format, "gate matrix must hold 16 [re, im] pairs");
    }
    Mat4 m{};
    for (std::size_t k = 0; k < 16; ++k) {
        m[k] = cplx{arr[k].at(0).get<double>(), arr[k].at(1).get<double>()};
    }
    return m;
}

}  // namespace

std::string circuit_to_json(const CircuitInstance &c) {
    json doc;
    doc["schema"] = "pepsrqc.circuit";
    doc["version"] = kCircuitSchemaVersion;
    doc["lattice"] = {{"rows", c.lattice.rows()}, {"cols", c.lattice.cols()}};
    doc["depth"] = c.depth;
    doc["seed"] = c.seed;
    doc["sequence"] = {{"kind", sequence_kind_name(c.sequence.kind)},
                       {"theta", c.sequence.theta},
                       {"phi", c.sequence.phi}};
    doc["site_order"] = "reading order, site = row * cols + col; site 0 is the most significant bit";
    doc["gate_basis"] = "|00>,|01>,|10>,|11> with the first target most significant";
    json layers = json::array();
    for (const auto &layer : c.layers) {
        json l;
        l["t"] = layer.index;
        l["set"] = std::string(1, edge_set_name(layer.set));
        json singles = json::array();
        for (const auto &g : layer.single) {
            singles.push_back(gate_kind_name(g.kind));
        }
        l["single"] = std::move(singles);
        json two = json::array();
        for (const auto &g : layer.two) {
            json jg;
            jg["kind"] = gate_kind_name(g.kind);
            jg["sites"] = g.targets;
            if (g.kind == GateKind::FSim) {
                jg["theta"] = g.theta;
                jg["phi"] = g.phi;
            }
            if (g.haar) {
                jg["matrix"] = gate_matrix_json(*g.haar);
            }
            two.push_back(std::move(jg));
        }
        l["two"] = std::move(two);
        layers.push_back(std::move(l));
    }
    doc["layers"] = std::move(layers);
    return doc.dump(1) + "\n";
}

CircuitInstance circuit_from_json(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception &e) {
        throw Error(ErrorKind::Format, fmt::format("circuit file is not valid JSON: {}", e.what()));
    }
    try {
        if (doc.at("schema").get<std::string>() != "pepsrqc.circuit") {
            throw Error(ErrorKind::Format, "not a pepsrqc circuit document");
        }
        const int version = doc.at("version").get<int>();
        if (version != kCircuitSchemaVersion) {
            throw Error(ErrorKind::Format, fmt::format("unsupported circuit schema version {}", version));
        }
        CircuitInstance c;
        c.lattice = build_lattice(doc.at("lattice").at("rows").get<std::size_t>(),
                                  doc.at("lattice").at("cols").get<std::size_t>());
        c.depth = doc.at("depth").get<std::size_t>();
        c.seed = doc.at("seed").get<std::uint64_t>();
        c.sequence.kind = parse_sequence_kind(doc.at("sequence").at("kind").get<std::string>());
        c.sequence.theta = doc.at("sequence").at("theta").get<double>();
        c.sequence.phi = doc.at("sequence").at("phi").get<double>();
        const auto &layers = doc.at("layers");
        if (layers.size() != c.depth) {
            throw Error(ErrorKind::Format, "layer count does not match depth");
        }
        for (const auto &l : layers) {
            Layer layer;
            layer.index = l.at("t").get<std::size_t>();
            const auto set = l.at("set").get<std::string>();
            if (set.size() != 1 || set[0] < 'A' || set[0] > 'D') {
                throw Error(ErrorKind::Format, fmt::format("bad edge set '{}'", set));
            }
            layer.set = static_cast<EdgeSet>(set[0] - 'A');
            const auto &singles = l.at("single");
            if (singles.size() != c.lattice.size()) {
                throw Error(ErrorKind::Format, "each layer needs one single-qubit gate per site");
            }
            for (std::size_t s = 0; s < singles.size(); ++s) {
                layer.single.push_back({parse_gate_kind(singles[s].get<std::string>()), {s}, 0.0, 0.0, std::nullopt});
            }
            for (const auto &jg : l.at("two")) {
                GateSpec g;
                g.kind = parse_gate_kind(jg.at("kind").get<std::string>());
                g.targets = jg.at("sites").get<std::vector<std::size_t>>();
                if (g.targets.size() != 2) {
                    throw Error(ErrorKind::Format, "two-qubit gate needs two sites");
                }
                c.lattice.edge_between(g.targets[0], g.targets[1]);
                if (g.kind == GateKind::FSim) {
                    g.theta = jg.at("theta").get<double>();
                    g.phi = jg.at("phi").get<double>();
                }
                if (jg.contains("matrix")) {
                    g.haar = gate_matrix_from_json(jg.at("matrix"));
                }
                layer.two.push_back(std::move(g));
            }
            c.layers.push_back(std::move(layer));
        }
        return c;
    } catch (const json::exception &e) {
        throw Error(ErrorKind::Format, fmt::format("malformed circuit document: {}", e.what()));
    }
}

void save_circuit(const CircuitInstance &c, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path));
    }
    out << circuit_to_json(c);
    if (!out) {
        throw Error(ErrorKind::Io, fmt::format("write failed for '{}'", path));
    }
}

CircuitInstance load_circuit(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, fmt::format("cannot read '{}'", path));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return circuit_from_json(ss.str());
}

}  // namespace pepsrqc

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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pepsrqc/kernels.hpp"
#include "pepsrqc/tensor.hpp"

namespace pepsrqc {

using kernels::Mat2;
using kernels::Mat4;

/// Brickwork edge classes. Horizontal edge (r,c)-(r,c+1) is A when r+c is
/// even and B otherwise; vertical edge (r,c)-(r+1,c) is C when r+c is even
/// and D otherwise.
enum class EdgeSet { A, B, C, D };

char edge_set_name(EdgeSet s);

enum class Direction { Left = 0, Right = 1, Up = 2, Down = 3 };

inline constexpr std::array<Direction, 4> kDirections{Direction::Left, Direction::Right, Direction::Up,
                                                      Direction::Down};

Direction opposite(Direction d);

struct Edge {
    std::size_t a = 0;  // left or upper site, always a < b
    std::size_t b = 0;
    EdgeSet set = EdgeSet::A;
    bool horizontal = true;
};

inline constexpr std::size_t kNoEdge = static_cast<std::size_t>(-1);

/// Square lattice with sites in reading order (site = row * cols + col).
/// Edges are stored in the English-reading order used by gauging sweeps:
/// horizontal edges of row 0, vertical edges between rows 0 and 1, horizontal
/// edges of row 1, and so on.
class Lattice {
   public:
    Lattice() = default;
    Lattice(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept {
        return rows_;
    }
    std::size_t cols() const noexcept {
        return cols_;
    }
    std::size_t size() const noexcept {
        return rows_ * cols_;
    }
    const std::vector<Edge> &edges() const noexcept {
        return edges_;
    }
    std::size_t site(std::size_t r, std::size_t c) const noexcept {
        return r * cols_ + c;
    }
    std::size_t row_of(std::size_t s) const noexcept {
        return s / cols_;
    }
    std::size_t col_of(std::size_t s) const noexcept {
        return s % cols_;
    }
    /// Edge index leaving site `s` in direction `d`, or kNoEdge on the boundary.
    std::size_t edge_at(std::size_t s, Direction d) const noexcept {
        return neighbors_[s][static_cast<std::size_t>(d)];
    }
    /// Edge index joining two sites; throws when they are not neighbours.
    std::size_t edge_between(std::size_t s, std::size_t t) const;
    std::vector<std::size_t> edges_in(EdgeSet set) const;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::array<std::size_t, 4>> neighbors_;
};

Lattice build_lattice(std::size_t n_r, std::size_t n_c);

/// Edge class used by layer t >= 1 in the period-eight ABCD-CDAB pattern.
EdgeSet scheduled_set(std::size_t t);

enum class GateKind { SqrtX, SqrtY, SqrtW, CZ, FSim, Haar4 };

std::string gate_kind_name(GateKind k);

struct GateSpec {
    GateKind kind = GateKind::SqrtX;
    std::vector<std::size_t> targets;
    double theta = 0.0;         // FSim only
    double phi = 0.0;           // FSim only
    std::optional<Mat4> haar;  // Haar4 only

    bool two_qubit() const noexcept {
        return targets.size() == 2;
    }
    Mat2 matrix2() const;
    Mat4 matrix4() const;
};

Mat2 sqrt_x();
Mat2 sqrt_y();
Mat2 sqrt_w();
Mat4 cz_matrix();
/// fSim(theta, phi) in basis |00>,|01>,|10>,|11>; requires 0 <= theta <= pi/2, 0 <= phi <= pi.
Mat4 fsim_matrix(double theta, double phi);

/// Counter-based generator: every draw is a pure function of (key, counter),
/// so streams keyed by (seed, layer, site) are independent of iteration order.
class CounterRng {
   public:
    CounterRng(std::uint64_t seed, std::uint64_t layer, std::uint64_t index, std::uint64_t stream);
    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    std::size_t below(std::size_t n);
    double normal();

   private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Haar-distributed U(4): QR of a complex Ginibre matrix with the R diagonal made positive.
Mat4 haar_unitary4(CounterRng &rng);

double unitarity_defect(const Mat2 &g);
double unitarity_defect(const Mat4 &g);

enum class SequenceKind { CZ, FSim, TwoQubitHaar };

struct Sequence {
    SequenceKind kind = SequenceKind::CZ;
    double theta = 0.0;
    double phi = 0.0;

    static Sequence cz() {
        return {SequenceKind::CZ, 0.0, 0.0};
    }
    static Sequence fsim(double theta, double phi) {
        return {SequenceKind::FSim, theta, phi};
    }
    static Sequence haar() {
        return {SequenceKind::TwoQubitHaar, 0.0, 0.0};
    }
    std::string name() const;
};

struct Layer {
    std::size_t index = 0;  // 1-based layer number t
    EdgeSet set = EdgeSet::A;
    std::vector<GateSpec> single;  // one per site, in site order
    std::vector<GateSpec> two;     // one per scheduled edge, in edge order
};

struct CircuitInstance {
    Lattice lattice;
    std::size_t depth = 0;
    Sequence sequence;
    std::uint64_t seed = 0;
    std::vector<Layer> layers;

    /// Number of two-qubit gates in the first `depth` layers.
    std::size_t two_qubit_gates(std::size_t depth) const;
};

CircuitInstance generate_instance(std::size_t n_r, std::size_t n_c, std::size_t depth, const Sequence &sequence,
                                  std::uint64_t seed);

/// Versioned JSON document; Haar matrices are stored as [re, im] pairs at full precision.
std::string circuit_to_json(const CircuitInstance &c);
CircuitInstance circuit_from_json(const std::string &text);
void save_circuit(const CircuitInstance &c, const std::string &path);
CircuitInstance load_circuit(const std::string &path);

std::string sequence_kind_name(SequenceKind k);
SequenceKind parse_sequence_kind(const std::string &name);

}  // namespace pepsrqc

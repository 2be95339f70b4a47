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

#include "pepsrqc/peps.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "pepsrqc/kernels.hpp"
#include "pepsrqc/linalg.hpp"

namespace pepsrqc {

using linalg::Matrix;

double FidelityTrace::log_fapx() const {
    double s = 0.0;
    for (const auto &l : layers) {
        s += l.log_factor;
    }
    return s;
}

PepsState::PepsState(Lattice lattice, PepsOptions options, std::vector<DenseTensor> gamma,
                     std::vector<std::vector<double>> lambda, double log_fapx, FidelityTrace trace)
    : lattice_(std::move(lattice)),
      options_(options),
      gamma_(std::move(gamma)),
      lambda_(std::move(lambda)),
      log_fapx_(log_fapx),
      trace_(std::move(trace)) {
    if (options_.chi_max == 0) {
        throw Error(ErrorKind::Parameter, "chi_max must be at least 1");
    }
    if (gamma_.size() != lattice_.size() || lambda_.size() != lattice_.edges().size()) {
        throw Error(ErrorKind::Dimension, "tensor count does not match the lattice");
    }
}

std::size_t PepsState::max_bond_dim() const {
    std::size_t m = 1;
    for (const auto &l : lambda_) {
        m = std::max(m, l.size());
    }
    return m;
}

double PepsState::fapx() const {
    return std::exp(log_fapx_);
}

namespace {

const std::vector<std::string> kGammaLegs{"p", "l", "r", "u", "d"};

std::size_t leg_of(Direction d) {
    return 1 + static_cast<std::size_t>(d);
}

std::span<const double> lambda_on(const PepsState &st, std::size_t site, Direction d) {
    const std::size_t e = st.lattice().edge_at(site, d);
    if (e == kNoEdge) {
        return {};
    }
    return st.lambda(e);
}

std::vector<double> clipped_inverse(std::span<const double> lam, double floor_rel) {
    std::vector<double> inv(lam.size(), 0.0);
    if (lam.empty()) {
        return inv;
    }
    const double mx = *std::max_element(lam.begin(), lam.end());
    for (std::size_t k = 0; k < lam.size(); ++k) {
        inv[k] = (lam[k] >= floor_rel * mx && lam[k] > 0.0) ? 1.0 / lam[k] : 0.0;
    }
    return inv;
}

/// One side of a bond after absorbing its environment lambdas and projecting
/// onto the bond: M = Q R with M rows = other virtual legs, columns = (p, bond).
struct BondSide {
    std::size_t site = 0;
    Direction bond_dir = Direction::Left;
    std::array<Direction, 3> others{};
    std::array<std::size_t, 3> other_dims{};
    std::size_t rows = 1;
    Matrix q;
    Matrix r;
};

BondSide project_side(const PepsState &st, std::size_t site, Direction bond_dir) {
    BondSide side;
    side.site = site;
    side.bond_dir = bond_dir;
    const DenseTensor &g = st.gamma(site);
    std::size_t k = 0;
    for (auto d : kDirections) {
        if (d != bond_dir) {
            side.others[k] = d;
            side.other_dims[k] = g.dims()[leg_of(d)];
            side.rows *= side.other_dims[k];
            ++k;
        }
    }
    const std::size_t chi_b = g.dims()[leg_of(bond_dir)];
    const std::array<std::size_t, 5> perm{0, leg_of(bond_dir), leg_of(side.others[0]), leg_of(side.others[1]),
                                          leg_of(side.others[2])};
    kernels::LegWeights weights(5);
    for (auto d : side.others) {
        weights[leg_of(d)] = lambda_on(st, site, d);
    }
    // Row-major [p, bond, others...] is the column-major (rows x 2 chi_b) matrix.
    Matrix m(static_cast<Eigen::Index>(side.rows), static_cast<Eigen::Index>(2 * chi_b));
    kernels::permute_scale(g.data(), g.dims(), perm, weights, std::span<cplx>(m.data(), static_cast<std::size_t>(m.size())));
    linalg::Qr f = linalg::qr_thin(m);
    side.q = std::move(f.q);
    side.r = std::move(f.r);
    return side;
}

/// Rebuild Gamma from Q and the per-physical-index blocks of the new isometry,
/// factoring the environment lambdas back out.
DenseTensor restore_gamma(const PepsState &st, const BondSide &side, const std::array<Matrix, 2> &blocks,
                          std::size_t keep) {
    const auto kk = static_cast<Eigen::Index>(keep);
    Matrix m(static_cast<Eigen::Index>(side.rows), 2 * kk);
    for (Eigen::Index p = 0; p < 2; ++p) {
        m.middleCols(p * kk, kk).noalias() = side.q * blocks[static_cast<std::size_t>(p)];
    }
    // m is row-major [p, bond, o0, o1, o2]; map it back to [p, l, r, u, d].
    const std::vector<std::size_t> in_dims{2, keep, side.other_dims[0], side.other_dims[1], side.other_dims[2]};
    std::array<std::size_t, 5> perm{};
    std::vector<std::size_t> out_dims(5);
    perm[0] = 0;
    out_dims[0] = 2;
    for (auto d : kDirections) {
        const std::size_t j = leg_of(d);
        if (d == side.bond_dir) {
            perm[j] = 1;
        } else {
            const auto pos = static_cast<std::size_t>(std::find(side.others.begin(), side.others.end(), d) -
                                                      side.others.begin());
            perm[j] = 2 + pos;
        }
        out_dims[j] = in_dims[perm[j]];
    }
    std::array<std::vector<double>, 3> inv;
    kernels::LegWeights weights(5);
    for (std::size_t k = 0; k < 3; ++k) {
        inv[k] = clipped_inverse(lambda_on(st, side.site, side.others[k]), st.options().inverse_floor);
        if (!inv[k].empty()) {
            weights[2 + k] = inv[k];
        }
    }
    DenseTensor out(kGammaLegs, out_dims);
    kernels::permute_scale(std::span<const cplx>(m.data(), static_cast<std::size_t>(m.size())), in_dims, perm,
                           weights, out.data());
    return out;
}

Mat4 oriented_gate(const Mat4 &g, bool swapped) {
    if (!swapped) {
        return g;
    }
    // Conjugate by SWAP: exchange the roles of the two qubits.
    auto sw = [](std::size_t x) { return ((x & 1) << 1) | (x >> 1); };
    Mat4 out{};
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            out[4 * sw(r) + sw(c)] = g[4 * r + c];
        }
    }
    return out;
}

}  // namespace

PepsState init_product_state(const Lattice &lattice, PepsOptions options) {
    std::vector<DenseTensor> gamma;
    gamma.reserve(lattice.size());
    for (std::size_t s = 0; s < lattice.size(); ++s) {
        DenseTensor g(kGammaLegs, {2, 1, 1, 1, 1});
        g.data()[0] = 1.0;
        gamma.push_back(std::move(g));
    }
    std::vector<std::vector<double>> lambda(lattice.edges().size(), std::vector<double>{1.0});
    return PepsState(lattice, options, std::move(gamma), std::move(lambda));
}

void apply_single_qubit(PepsState &state, std::size_t site, const Mat2 &gate) {
    if (state.options().validate_gates && unitarity_defect(gate) > 1e-10) {
        throw Error(ErrorKind::Parameter, "single-qubit gate is not unitary");
    }
    DenseTensor &g = state.gamma(site);
    const std::size_t half = g.size() / 2;
    auto data = g.data();
    for (std::size_t k = 0; k < half; ++k) {
        const cplx a = data[k];
        const cplx b = data[half + k];
        data[k] = gate[0] * a + gate[1] * b;
        data[half + k] = gate[2] * a + gate[3] * b;
    }
}

double simple_update(PepsState &state, std::size_t edge, const std::optional<Mat4> &gate, bool truncate) {
    const Lattice &lat = state.lattice();
    if (edge >= lat.edges().size()) {
        throw Error(ErrorKind::Parameter, fmt::format("edge {} is not on the lattice", edge));
    }
    if (gate && state.options().validate_gates && unitarity_defect(*gate) > 1e-10) {
        throw Error(ErrorKind::Parameter, "two-qubit gate is not unitary");
    }
    const Edge &e = lat.edges()[edge];
    const Direction dir_a = e.horizontal ? Direction::Right : Direction::Down;
    const Direction dir_b = opposite(dir_a);
    const std::vector<double> &lam = state.lambda(edge);
    const std::size_t chi_b = lam.size();

    const BondSide sa = project_side(state, e.a, dir_a);
    const BondSide sb = project_side(state, e.b, dir_b);
    const Eigen::Index ka = sa.r.rows();
    const Eigen::Index kb = sb.r.rows();
    const auto cb = static_cast<Eigen::Index>(chi_b);

    // X[pa, pb] = R_a[:, pa] diag(lambda) R_b[:, pb]^T
    Eigen::Map<const Eigen::VectorXd> lv(lam.data(), cb);
    std::array<Matrix, 4> x;
    for (Eigen::Index pa = 0; pa < 2; ++pa) {
        const Matrix ra = sa.r.middleCols(pa * cb, cb) * lv.cast<cplx>().asDiagonal();
        for (Eigen::Index pb = 0; pb < 2; ++pb) {
            x[static_cast<std::size_t>(2 * pa + pb)].noalias() = ra * sb.r.middleCols(pb * cb, cb).transpose();
        }
    }
    Matrix theta = Matrix::Zero(2 * ka, 2 * kb);
    for (std::size_t out = 0; out < 4; ++out) {
        auto blk = theta.block(static_cast<Eigen::Index>(out / 2) * ka, static_cast<Eigen::Index>(out % 2) * kb, ka, kb);
        if (gate) {
            for (std::size_t in = 0; in < 4; ++in) {
                const cplx gv = (*gate)[4 * out + in];
                if (gv != cplx{0.0, 0.0}) {
                    blk += gv * x[in];
                }
            }
        } else {
            blk = x[out];
        }
    }

    linalg::Svd f = linalg::svd_thin(theta);
    double total = 0.0;
    for (double s : f.s) {
        total += s * s;
    }
    if (f.s.empty() || !(total > 0.0)) {
        throw Error(ErrorKind::DegenerateInput, fmt::format("bond {} collapsed to zero", edge));
    }
    const double norm = std::sqrt(total);
    for (double &s : f.s) {
        s /= norm;
    }
    const double floor = state.options().rank_cutoff * f.s.front();
    std::size_t keep = 0;
    if (truncate) {
        while (keep < f.s.size() && keep < state.options().chi_max && f.s[keep] > floor) {
            ++keep;
        }
    } else {
        keep = std::min(chi_b, f.s.size());
    }
    double kept = 0.0;
    for (std::size_t k = 0; k < keep; ++k) {
        kept += f.s[k] * f.s[k];
    }
    // Values at or below the cutoff are numerical zeros, not discarded weight.
    double dropped = 0.0;
    for (std::size_t k = keep; k < f.s.size() && f.s[k] > floor; ++k) {
        dropped += f.s[k] * f.s[k];
    }
    const double discarded = truncate ? dropped / (kept + dropped) : 0.0;
    std::vector<double> new_lambda(f.s.begin(), f.s.begin() + static_cast<std::ptrdiff_t>(keep));
    const double renorm = 1.0 / std::sqrt(kept);
    for (double &v : new_lambda) {
        v *= renorm;
    }

    const auto kk = static_cast<Eigen::Index>(keep);
    std::array<Matrix, 2> blocks_a;
    std::array<Matrix, 2> blocks_b;
    for (Eigen::Index p = 0; p < 2; ++p) {
        blocks_a[static_cast<std::size_t>(p)] = f.u.block(p * ka, 0, ka, kk);
        blocks_b[static_cast<std::size_t>(p)] = f.vh.block(0, p * kb, kk, kb).transpose();
    }
    DenseTensor ga = restore_gamma(state, sa, blocks_a, keep);
    DenseTensor gb = restore_gamma(state, sb, blocks_b, keep);
    state.gamma(e.a) = std::move(ga);
    state.gamma(e.b) = std::move(gb);
    state.lambda(edge) = std::move(new_lambda);
    return discarded;
}

void gauge_sweep(PepsState &state, std::size_t sweeps) {
    const std::size_t n_edges = state.lattice().edges().size();
    for (std::size_t s = 0; s < sweeps; ++s) {
        for (std::size_t e = 0; e < n_edges; ++e) {
            simple_update(state, e, std::nullopt, false);
        }
    }
}

void apply_layer(PepsState &state, const Layer &layer) {
    const auto start = std::chrono::steady_clock::now();
    const Lattice &lat = state.lattice();
    const PepsOptions &opt = state.options();
    for (const auto &g : layer.single) {
        apply_single_qubit(state, g.targets.at(0), g.matrix2());
    }
    const std::size_t n_gates = layer.two.size();
    std::vector<std::size_t> edges(n_gates);
    std::vector<Mat4> mats(n_gates);
    for (std::size_t k = 0; k < n_gates; ++k) {
        const GateSpec &g = layer.two[k];
        edges[k] = lat.edge_between(g.targets.at(0), g.targets.at(1));
        mats[k] = oriented_gate(g.matrix4(), g.targets[0] != lat.edges()[edges[k]].a);
    }
    std::vector<double> weights(n_gates, 0.0);
    if (opt.parallel_edges && opt.gauge_schedule == GaugeSchedule::PerLayer) {
        // Edges of one scheduled set share no tensors.
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_gates); ++k) {
            const auto kk = static_cast<std::size_t>(k);
            weights[kk] = simple_update(state, edges[kk], mats[kk], true);
        }
    } else {
        for (std::size_t k = 0; k < n_gates; ++k) {
            weights[k] = simple_update(state, edges[k], mats[k], true);
            if (opt.gauge_schedule == GaugeSchedule::PerGate) {
                gauge_sweep(state, opt.gauge_sweeps);
            }
        }
    }
    if (opt.gauge_schedule == GaugeSchedule::PerLayer) {
        gauge_sweep(state, opt.gauge_sweeps);
    }
    LayerRecord rec;
    rec.layer = layer.index;
    for (std::size_t k = 0; k < n_gates; ++k) {
        rec.discarded.push_back({edges[k], weights[k]});
        rec.log_factor += std::log1p(-weights[k]);
    }
    state.add_log_fidelity(rec.log_factor);
    rec.log_fapx = state.log_fapx();
    rec.max_bond = state.max_bond_dim();
    rec.gauge_residual = opt.record_residual ? gauge_residual(state) : std::numeric_limits<double>::quiet_NaN();
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    state.trace().layers.push_back(std::move(rec));
}

void apply_layer(PepsState &state, const Layer &layer, std::size_t chi_max) {
    if (chi_max == 0) {
        throw Error(ErrorKind::Parameter, "chi_max must be at least 1");
    }
    state.options().chi_max = chi_max;
    apply_layer(state, layer);
}

double gauge_residual(const PepsState &state) {
    double worst = 0.0;
    for (std::size_t e = 0; e < state.lattice().edges().size(); ++e) {
        double s = 0.0;
        for (double v : state.lambda(e)) {
            s += v * v;
        }
        worst = std::max(worst, std::abs(s - 1.0));
    }
    for (std::size_t site = 0; site < state.lattice().size(); ++site) {
        const DenseTensor &g = state.gamma(site);
        for (auto open : kDirections) {
            std::array<std::size_t, 5> perm{};
            perm[0] = leg_of(open);
            std::size_t k = 1;
            perm[k++] = 0;
            kernels::LegWeights weights(5);
            for (auto d : kDirections) {
                if (d != open) {
                    perm[k++] = leg_of(d);
                    weights[leg_of(d)] = lambda_on(state, site, d);
                }
            }
            const auto chi_o = static_cast<Eigen::Index>(g.dims()[leg_of(open)]);
            const auto rest = static_cast<Eigen::Index>(g.size()) / chi_o;
            // Row-major [open, p, others] = column-major (rest x chi_o).
            Matrix n(rest, chi_o);
            kernels::permute_scale(g.data(), g.dims(), perm, weights,
                                   std::span<cplx>(n.data(), static_cast<std::size_t>(n.size())));
            Matrix env = n.adjoint() * n;
            if (open == Direction::Left) {
                // Full contraction including the open leg's own lambda.
                std::span<const double> lo = lambda_on(state, site, open);
                cplx full = 0.0;
                for (Eigen::Index a = 0; a < chi_o; ++a) {
                    const double w = lo.empty() ? 1.0 : lo[static_cast<std::size_t>(a)];
                    full += env(a, a) * (w * w);
                }
                worst = std::max(worst, std::abs(full - 1.0));
            }
            env -= Matrix::Identity(chi_o, chi_o);
            for (double ev : linalg::hermitian_eigenvalues(env)) {
                worst = std::max(worst, std::abs(ev));
            }
        }
    }
    return worst;
}

std::vector<std::vector<double>> lambda_spectra(const PepsState &state) {
    std::vector<std::vector<double>> out;
    out.reserve(state.lattice().edges().size());
    for (std::size_t e = 0; e < state.lattice().edges().size(); ++e) {
        out.push_back(state.lambda(e));
    }
    return out;
}

}  // namespace pepsrqc

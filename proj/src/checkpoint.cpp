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

#include <cstdint>
#include <cstring>
#include <fstream>
#include <type_traits>

#include "pepsrqc/peps.hpp"

namespace pepsrqc {

namespace {

constexpr char kMagic[8] = {'P', 'E', 'P', 'S', 'R', 'Q', 'C', '1'};

class Writer {
   public:
    explicit Writer(const std::string &path) : out_(path, std::ios::binary) {
        if (!out_) {
            throw Error(ErrorKind::Io, "cannot open checkpoint for writing: " + path);
        }
    }
    template <class T>
    void pod(const T &v) {
        static_assert(std::is_trivially_copyable_v<T>);
        out_.write(reinterpret_cast<const char *>(&v), sizeof(T));
    }
    void u64(std::size_t v) {
        pod(static_cast<std::uint64_t>(v));
    }
    template <class T>
    void array(const T *p, std::size_t n) {
        u64(n);
        out_.write(reinterpret_cast<const char *>(p), static_cast<std::streamsize>(n * sizeof(T)));
    }
    void finish() {
        out_.flush();
        if (!out_) {
            throw Error(ErrorKind::Io, "checkpoint write failed");
        }
    }

   private:
    std::ofstream out_;
};

class Reader {
   public:
    explicit Reader(const std::string &path) : in_(path, std::ios::binary) {
        if (!in_) {
            throw Error(ErrorKind::Io, "cannot open checkpoint: " + path);
        }
    }
    template <class T>
    T pod() {
        T v{};
        in_.read(reinterpret_cast<char *>(&v), sizeof(T));
        check();
        return v;
    }
    std::size_t u64() {
        const auto v = pod<std::uint64_t>();
        if (v > (std::uint64_t{1} << 40)) {
            throw Error(ErrorKind::Format, "checkpoint field out of range");
        }
        return static_cast<std::size_t>(v);
    }
    template <class T>
    std::vector<T> array() {
        std::vector<T> v(u64());
        in_.read(reinterpret_cast<char *>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
        check();
        return v;
    }
    void raw(char *p, std::size_t n) {
        in_.read(p, static_cast<std::streamsize>(n));
        check();
    }

   private:
    void check() {
        if (!in_) {
            throw Error(ErrorKind::Format, "truncated checkpoint");
        }
    }
    std::ifstream in_;
};

}  // namespace

void save_checkpoint(const PepsState &state, const std::string &path) {
    Writer w(path);
    for (char c : kMagic) {
        w.pod(c);
    }
    const auto &opt = state.options();
    w.u64(state.lattice().rows());
    w.u64(state.lattice().cols());
    w.u64(opt.chi_max);
    w.u64(opt.gauge_sweeps);
    w.pod(static_cast<std::uint8_t>(opt.gauge_schedule));
    w.pod(opt.inverse_floor);
    w.pod(opt.rank_cutoff);
    w.pod(static_cast<std::uint8_t>(opt.validate_gates));
    w.pod(static_cast<std::uint8_t>(opt.parallel_edges));
    w.pod(static_cast<std::uint8_t>(opt.record_residual));
    w.pod(state.log_fapx());
    for (std::size_t s = 0; s < state.lattice().size(); ++s) {
        const DenseTensor &g = state.gamma(s);
        w.array(g.dims().data(), g.dims().size());
        w.array(g.data().data(), g.size());
    }
    for (std::size_t e = 0; e < state.lattice().edges().size(); ++e) {
        w.array(state.lambda(e).data(), state.lambda(e).size());
    }
    const auto &layers = state.trace().layers;
    w.u64(layers.size());
    for (const auto &l : layers) {
        w.u64(l.layer);
        w.u64(l.discarded.size());
        for (const auto &d : l.discarded) {
            w.u64(d.edge);
            w.pod(d.weight);
        }
        w.pod(l.log_factor);
        w.pod(l.log_fapx);
        w.u64(l.max_bond);
        w.pod(l.gauge_residual);
        w.pod(l.seconds);
    }
    w.finish();
}

PepsState load_checkpoint(const std::string &path) {
    Reader r(path);
    char magic[8];
    r.raw(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw Error(ErrorKind::Format, "not a checkpoint file: " + path);
    }
    const std::size_t rows = r.u64();
    const std::size_t cols = r.u64();
    Lattice lat(rows, cols);
    PepsOptions opt;
    opt.chi_max = r.u64();
    opt.gauge_sweeps = r.u64();
    opt.gauge_schedule = static_cast<GaugeSchedule>(r.pod<std::uint8_t>());
    opt.inverse_floor = r.pod<double>();
    opt.rank_cutoff = r.pod<double>();
    opt.validate_gates = r.pod<std::uint8_t>() != 0;
    opt.parallel_edges = r.pod<std::uint8_t>() != 0;
    opt.record_residual = r.pod<std::uint8_t>() != 0;
    const double log_fapx = r.pod<double>();
    std::vector<DenseTensor> gamma;
    for (std::size_t s = 0; s < lat.size(); ++s) {
        auto dims64 = r.array<std::size_t>();
        auto data = r.array<cplx>();
        if (dims64.size() != 5) {
            throw Error(ErrorKind::Format, "gamma tensor must have five legs");
        }
        gamma.emplace_back(std::vector<std::string>{"p", "l", "r", "u", "d"}, dims64, std::move(data));
    }
    std::vector<std::vector<double>> lambda;
    for (std::size_t e = 0; e < lat.edges().size(); ++e) {
        lambda.push_back(r.array<double>());
    }
    FidelityTrace trace;
    const std::size_t n_layers = r.u64();
    for (std::size_t k = 0; k < n_layers; ++k) {
        LayerRecord l;
        l.layer = r.u64();
        const std::size_t nd = r.u64();
        for (std::size_t j = 0; j < nd; ++j) {
            EdgeWeight ew;
            ew.edge = r.u64();
            ew.weight = r.pod<double>();
            l.discarded.push_back(ew);
        }
        l.log_factor = r.pod<double>();
        l.log_fapx = r.pod<double>();
        l.max_bond = r.u64();
        l.gauge_residual = r.pod<double>();
        l.seconds = r.pod<double>();
        trace.layers.push_back(std::move(l));
    }
    return PepsState(std::move(lat), opt, std::move(gamma), std::move(lambda), log_fapx, std::move(trace));
}

}  // namespace pepsrqc

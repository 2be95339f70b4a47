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

#include "pepsrqc/experiment.hpp"

#include <fmt/format.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <tuple>

#include "json.hpp"
#include "pepsrqc/analysis.hpp"

namespace pepsrqc {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kConfigVersion = 1;
constexpr int kManifestVersion = 1;

std::string schedule_name(GaugeSchedule s) {
    return s == GaugeSchedule::PerLayer ? "per_layer" : "per_gate";
}

GaugeSchedule parse_schedule(const std::string &s) {
    if (s == "per_layer") {
        return GaugeSchedule::PerLayer;
    }
    if (s == "per_gate") {
        return GaugeSchedule::PerGate;
    }
    throw Error(ErrorKind::Format, fmt::format("unknown gauge schedule '{}'", s));
}

json semantic_json(const RunConfig &c) {
    json j;
    j["schema"] = "pepsrqc.config";
    j["version"] = kConfigVersion;
    j["lattice"] = {{"rows", c.rows}, {"cols", c.cols}};
    j["depth"] = c.depth;
    j["sequence"] = {{"kind", sequence_kind_name(c.sequence.kind)},
                     {"theta", c.sequence.theta},
                     {"phi", c.sequence.phi}};
    j["chi"] = c.chis;
    j["instances"] = c.instances;
    j["seed"] = c.seed;
    j["gauge_sweeps"] = c.gauge_sweeps;
    j["gauge_schedule"] = schedule_name(c.gauge_schedule);
    j["oracle"] = {{"enabled", c.oracle},
                   {"every", c.oracle_every},
                   {"memory_bytes", c.oracle_memory_bytes},
                   {"qubit_cap", c.qubit_cap}};
    j["checkpoints"] = c.checkpoints;
    return j;
}

template <class T>
void take(const json &j, const char *key, T &out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception &e) {
            throw Error(ErrorKind::Format, fmt::format("config field '{}': {}", key, e.what()));
        }
    }
}

void reject_unknown(const json &j, std::initializer_list<const char *> known, const char *where) {
    for (const auto &[k, v] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char *n) { return k == n; })) {
            throw Error(ErrorKind::Format, fmt::format("unknown {} field '{}'", where, k));
        }
    }
}

std::string file_tag(std::size_t instance) {
    return fmt::format("i{:03d}", instance);
}

std::string file_tag(std::size_t instance, std::size_t chi) {
    return fmt::format("i{:03d}_chi{:03d}", instance, chi);
}

void ensure_dir(const fs::path &p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) {
        throw Error(ErrorKind::Io, fmt::format("cannot create '{}': {}", p.string(), ec.message()));
    }
}

}  // namespace

void RunConfig::validate() const {
    if (rows < 2 || cols < 2) {
        throw Error(ErrorKind::Size, fmt::format("lattice must be at least 2x2, got {}x{}", rows, cols));
    }
    if (chis.empty() || std::any_of(chis.begin(), chis.end(), [](std::size_t x) { return x == 0; })) {
        throw Error(ErrorKind::Parameter, "chi list must be non-empty with every chi >= 1");
    }
    if (instances == 0) {
        throw Error(ErrorKind::Parameter, "instance count must be positive");
    }
    if (gauge_sweeps == 0) {
        throw Error(ErrorKind::Parameter, "gauge sweeps must be positive");
    }
    if (threads == 0) {
        throw Error(ErrorKind::Parameter, "thread count must be positive");
    }
    if (sequence.kind == SequenceKind::FSim) {
        fsim_matrix(sequence.theta, sequence.phi);  // range check
    }
}

std::string config_to_json(const RunConfig &c) {
    json j = semantic_json(c);
    j["output_dir"] = c.output_dir;
    j["threads"] = c.threads;
    return j.dump(1) + "\n";
}

RunConfig config_from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw Error(ErrorKind::Format, fmt::format("config is not valid JSON: {}", e.what()));
    }
    if (!j.is_object()) {
        throw Error(ErrorKind::Format, "config must be a JSON object");
    }
    reject_unknown(j,
                   {"schema", "version", "lattice", "depth", "sequence", "chi", "instances", "seed", "gauge_sweeps",
                    "gauge_schedule", "oracle", "checkpoints", "output_dir", "threads"},
                   "config");
    if (j.contains("schema") && j["schema"] != "pepsrqc.config") {
        throw Error(ErrorKind::Format, "not a pepsrqc config");
    }
    if (j.contains("version") && j["version"] != kConfigVersion) {
        throw Error(ErrorKind::Format, fmt::format("unsupported config version {}", j["version"].dump()));
    }
    RunConfig c;
    if (j.contains("lattice")) {
        reject_unknown(j["lattice"], {"rows", "cols"}, "lattice");
        take(j["lattice"], "rows", c.rows);
        take(j["lattice"], "cols", c.cols);
    }
    take(j, "depth", c.depth);
    if (j.contains("sequence")) {
        const json &s = j["sequence"];
        reject_unknown(s, {"kind", "theta", "phi"}, "sequence");
        std::string kind = sequence_kind_name(c.sequence.kind);
        take(s, "kind", kind);
        c.sequence.kind = parse_sequence_kind(kind);
        c.sequence.theta = 0.0;
        c.sequence.phi = 0.0;
        take(s, "theta", c.sequence.theta);
        take(s, "phi", c.sequence.phi);
    }
    take(j, "chi", c.chis);
    take(j, "instances", c.instances);
    take(j, "seed", c.seed);
    take(j, "gauge_sweeps", c.gauge_sweeps);
    if (j.contains("gauge_schedule")) {
        std::string s;
        take(j, "gauge_schedule", s);
        c.gauge_schedule = parse_schedule(s);
    }
    if (j.contains("oracle")) {
        const json &o = j["oracle"];
        reject_unknown(o, {"enabled", "every", "memory_bytes", "qubit_cap"}, "oracle");
        take(o, "enabled", c.oracle);
        take(o, "every", c.oracle_every);
        take(o, "memory_bytes", c.oracle_memory_bytes);
        take(o, "qubit_cap", c.qubit_cap);
    }
    take(j, "checkpoints", c.checkpoints);
    take(j, "output_dir", c.output_dir);
    take(j, "threads", c.threads);
    c.validate();
    return c;
}

RunConfig load_config(const std::string &path) {
    return config_from_json(read_text(path));
}

void save_config(const RunConfig &c, const std::string &path) {
    write_text(path, config_to_json(c));
}

std::string config_hash(const RunConfig &c) {
    return sha256_hex(semantic_json(c).dump());
}

void apply_environment(RunConfig &c) {
    if (const char *dir = std::getenv("PEPSRQC_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
        c.output_dir = dir;
    }
    if (const char *th = std::getenv("PEPSRQC_THREADS"); th != nullptr && *th != '\0') {
        char *end = nullptr;
        const unsigned long v = std::strtoul(th, &end, 10);
        if (end == th || *end != '\0' || v == 0) {
            throw Error(ErrorKind::Parameter, fmt::format("PEPSRQC_THREADS='{}' is not a positive integer", th));
        }
        c.threads = v;
    }
}

std::vector<std::size_t> oracle_depths(const RunConfig &c) {
    const std::size_t every = c.oracle_every != 0 ? c.oracle_every : (c.rows * c.cols <= 16 ? 1 : 4);
    std::vector<std::size_t> d;
    for (std::size_t t = 0; t <= c.depth; t += every) {
        d.push_back(t);
    }
    if (d.back() != c.depth) {
        d.push_back(c.depth);
    }
    return d;
}

std::uint64_t instance_seed(const RunConfig &c, std::size_t instance) {
    return c.seed + instance;
}

std::vector<std::string> generate_instances(const RunConfig &c) {
    c.validate();
    const fs::path out(c.output_dir);
    ensure_dir(out / "instances");
    std::vector<std::string> files;
    for (std::size_t i = 0; i < c.instances; ++i) {
        const CircuitInstance circuit = generate_instance(c.rows, c.cols, c.depth, c.sequence, instance_seed(c, i));
        const std::string rel = fmt::format("instances/instance_{}.json", file_tag(i));
        save_circuit(circuit, (out / rel).string());
        files.push_back(rel);
    }
    return files;
}

namespace {

struct JobOutputs {
    json run;
    std::vector<std::string> files;
    std::size_t refusals = 0;
};

JobOutputs run_job(const RunConfig &cfg, const CircuitInstance &circuit, std::size_t instance, std::size_t chi,
                   bool exact_state_metrics, const fs::path &out) {
    const Lattice &lat = circuit.lattice;
    const std::size_t n = lat.size();
    PepsOptions opt;
    opt.chi_max = chi;
    opt.gauge_sweeps = cfg.gauge_sweeps;
    opt.gauge_schedule = cfg.gauge_schedule;
    opt.parallel_edges = cfg.threads > 1;
    PepsState state = init_product_state(lat, opt);

    const bool use_oracle = cfg.oracle && n <= cfg.qubit_cap;
    const auto depths = oracle_depths(cfg);
    std::optional<StateVector> psi;
    if (use_oracle) {
        psi = zero_state(n, cfg.qubit_cap);
    }

    Table trace({"layer", "set", "n_2qg", "log_fapx", "fapx", "log_factor", "discarded_sum", "discarded_max",
                 "max_bond", "mean_bond", "gauge_residual"});
    Table timing({"layer", "seconds"});
    Table weights({"layer", "edge", "weight"});
    Table oracle({"depth", "status", "bytes", "log_fapx", "f_ex", "f_nxeb", "ptd"});
    Table entropy({"depth", "cut", "entropy_bits"});
    Table schmidt({"depth", "index", "value"});
    JobOutputs res;

    auto mean_bond = [&]() {
        double s = 0.0;
        for (std::size_t e = 0; e < lat.edges().size(); ++e) {
            s += static_cast<double>(state.bond_dim(e));
        }
        return s / static_cast<double>(lat.edges().size());
    };
    auto oracle_row = [&](std::size_t depth) {
        if (!psi) {
            return;
        }
        const std::size_t bytes = contraction_bytes(state);
        const auto p_ex = probabilities(psi->amplitudes);
        const double ptd = ptd_distance(p_ex);
        std::string f_ex = "nan";
        std::string f_nxeb = "nan";
        std::string status = "ok";
        try {
            const auto amp = peps_amplitudes(state, cfg.oracle_memory_bytes);
            f_ex = format_number(fidelity(psi->amplitudes, amp));
            try {
                f_nxeb = format_number(nxeb(probabilities(amp), p_ex));
            } catch (const Error &e) {
                if (e.kind() != ErrorKind::DegenerateInput) {
                    throw;
                }
            }
        } catch (const Error &e) {
            if (e.kind() != ErrorKind::Resource) {
                throw;
            }
            status = "refused";
            ++res.refusals;
        }
        oracle.add_row({format_number(depth), status, format_number(bytes), format_number(state.log_fapx()), f_ex,
                        f_nxeb, format_number(ptd)});
        if (exact_state_metrics) {
            for (std::size_t cut = 1; cut < n; ++cut) {
                const EntanglementCut ec = entanglement(*psi, cut);
                entropy.add_row({format_number(depth), format_number(cut), format_number(ec.entropy)});
                if (cut == n / 2) {
                    for (std::size_t k = 0; k < ec.spectrum.size(); ++k) {
                        schmidt.add_row({format_number(depth), format_number(k), format_number(ec.spectrum[k])});
                    }
                }
            }
        }
    };

    trace.add_row({"0", "-", "0", format_number(0.0), format_number(1.0), format_number(0.0), format_number(0.0),
                   format_number(0.0), format_number(state.max_bond_dim()), format_number(mean_bond()),
                   format_number(gauge_residual(state))});
    timing.add_row({"0", format_number(0.0)});
    std::size_t next_check = 0;
    if (!depths.empty() && depths[0] == 0) {
        oracle_row(0);
        next_check = 1;
    }
    for (std::size_t t = 1; t <= circuit.depth; ++t) {
        const Layer &layer = circuit.layers[t - 1];
        apply_layer(state, layer);
        if (psi) {
            statevector_apply_layer(*psi, layer);
        }
        const LayerRecord &rec = state.trace().layers.back();
        double wsum = 0.0;
        double wmax = 0.0;
        for (const auto &w : rec.discarded) {
            weights.add_row({format_number(t), format_number(w.edge), format_number(w.weight)});
            wsum += w.weight;
            wmax = std::max(wmax, w.weight);
        }
        trace.add_row({format_number(t), std::string(1, edge_set_name(layer.set)),
                       format_number(circuit.two_qubit_gates(t)), format_number(rec.log_fapx),
                       format_number(std::exp(rec.log_fapx)), format_number(rec.log_factor), format_number(wsum),
                       format_number(wmax), format_number(rec.max_bond), format_number(mean_bond()),
                       format_number(rec.gauge_residual)});
        timing.add_row({format_number(t), format_number(rec.seconds)});
        if (next_check < depths.size() && depths[next_check] == t) {
            oracle_row(t);
            ++next_check;
        }
    }

    Table spectra({"edge", "index", "value"});
    for (std::size_t e = 0; e < lat.edges().size(); ++e) {
        const auto &l = state.lambda(e);
        for (std::size_t k = 0; k < l.size(); ++k) {
            spectra.add_row({format_number(e), format_number(k), format_number(l[k])});
        }
    }

    const std::string tag = file_tag(instance, chi);
    auto emit = [&](const std::string &rel, const Table &t) {
        write_table((out / rel).string(), t);
        res.files.push_back(rel);
        return rel;
    };
    res.run["instance"] = instance;
    res.run["chi"] = chi;
    res.run["trace"] = emit(fmt::format("traces/trace_{}.csv", tag), trace);
    res.run["timing"] = emit(fmt::format("traces/timing_{}.csv", tag), timing);
    res.run["weights"] = emit(fmt::format("traces/weights_{}.csv", tag), weights);
    res.run["spectra"] = emit(fmt::format("traces/spectra_{}.csv", tag), spectra);
    res.run["oracle"] = psi ? json(emit(fmt::format("oracle/oracle_{}.csv", tag), oracle)) : json(nullptr);
    res.run["log_fapx"] = state.log_fapx();
    if (psi && exact_state_metrics) {
        res.run["entropy"] = emit(fmt::format("oracle/entropy_{}.csv", file_tag(instance)), entropy);
        res.run["schmidt"] = emit(fmt::format("oracle/schmidt_{}.csv", file_tag(instance)), schmidt);
    }
    if (cfg.checkpoints) {
        ensure_dir(out / "checkpoints");
        const std::string rel = fmt::format("checkpoints/state_{}.bin", tag);
        save_checkpoint(state, (out / rel).string());
        res.files.push_back(rel);
        res.run["checkpoint"] = rel;
    }
    return res;
}

}  // namespace

RunResult run_experiment(const RunConfig &cfg) {
    cfg.validate();
    const fs::path out(cfg.output_dir);
    for (const char *sub : {"", "instances", "traces", "oracle"}) {
        ensure_dir(out / sub);
    }
    omp_set_num_threads(static_cast<int>(cfg.threads));

    RunResult result;
    result.manifest = (out / "manifest.json").string();
    json manifest;
    manifest["schema"] = "pepsrqc.manifest";
    manifest["version"] = kManifestVersion;
    manifest["config_hash"] = config_hash(cfg);
    manifest["config"] = "config.json";
    manifest["seed"] = cfg.seed;
    manifest["complete"] = false;
    manifest["instances"] = json::array();
    manifest["runs"] = json::array();
    auto write_manifest = [&]() { write_text(result.manifest, manifest.dump(1) + "\n"); };

    try {
        save_config(cfg, (out / "config.json").string());
        result.files.push_back("config.json");
        write_manifest();
        if (cfg.oracle && cfg.rows * cfg.cols > cfg.qubit_cap) {
            manifest["oracle_disabled"] = fmt::format("{} qubits exceed the cap of {}", cfg.rows * cfg.cols,
                                                      cfg.qubit_cap);
        }
        for (std::size_t i = 0; i < cfg.instances; ++i) {
            const std::uint64_t seed = instance_seed(cfg, i);
            const CircuitInstance circuit = generate_instance(cfg.rows, cfg.cols, cfg.depth, cfg.sequence, seed);
            const std::string rel = fmt::format("instances/instance_{}.json", file_tag(i));
            save_circuit(circuit, (out / rel).string());
            result.files.push_back(rel);
            manifest["instances"].push_back({{"instance", i}, {"seed", seed}, {"circuit", rel}});
            for (std::size_t k = 0; k < cfg.chis.size(); ++k) {
                JobOutputs job = run_job(cfg, circuit, i, cfg.chis[k], k == 0, out);
                result.files.insert(result.files.end(), job.files.begin(), job.files.end());
                result.oracle_refusals += job.refusals;
                manifest["runs"].push_back(std::move(job.run));
                write_manifest();
            }
        }
        manifest["oracle_refusals"] = result.oracle_refusals;
        manifest["complete"] = true;
        write_manifest();
    } catch (const Error &e) {
        if (e.kind() == ErrorKind::Io) {
            manifest["complete"] = false;
            manifest["error"] = {{"kind", error_kind_name(e.kind())}, {"message", e.what()}};
            try {
                write_manifest();
            } catch (const Error &) {
                // The disk is gone; the original error is the useful one.
            }
        }
        throw;
    }
    return result;
}

std::string plot_kind_name(PlotKind k) {
    switch (k) {
        case PlotKind::FidelityVsDepth:
            return "fidelity_vs_depth";
        case PlotKind::EpsilonVsChi:
            return "epsilon_vs_chi";
        case PlotKind::Spectra:
            return "spectra";
        case PlotKind::Entropy:
            return "entropy";
        case PlotKind::NxebScatter:
            return "nxeb_scatter";
    }
    return "unknown";
}

PlotKind parse_plot_kind(const std::string &name) {
    for (auto k : {PlotKind::FidelityVsDepth, PlotKind::EpsilonVsChi, PlotKind::Spectra, PlotKind::Entropy,
                   PlotKind::NxebScatter}) {
        if (plot_kind_name(k) == name) {
            return k;
        }
    }
    throw Error(ErrorKind::Parameter, fmt::format("unknown plot kind '{}'", name));
}

namespace {

struct LoadedRun {
    RunConfig config;
    fs::path dir;
    std::size_t instance = 0;
    std::size_t chi = 0;
    Table trace;
    std::optional<Table> oracle;
    std::optional<Table> entropy;
    std::string spectra_path;
};

std::vector<LoadedRun> load_runs(const std::vector<std::string> &run_dirs) {
    std::vector<LoadedRun> runs;
    for (const auto &d : run_dirs) {
        const fs::path dir(d);
        json m;
        try {
            m = json::parse(read_text((dir / "manifest.json").string()));
        } catch (const json::exception &e) {
            throw Error(ErrorKind::Format, fmt::format("bad manifest in '{}': {}", d, e.what()));
        }
        if (m.value("schema", "") != "pepsrqc.manifest") {
            throw Error(ErrorKind::Format, fmt::format("'{}' has no pepsrqc manifest", d));
        }
        const RunConfig cfg = load_config((dir / m.at("config").get<std::string>()).string());
        std::map<std::size_t, std::string> entropy_files;
        for (const auto &r : m.at("runs")) {
            if (r.contains("entropy")) {
                entropy_files[r.at("instance").get<std::size_t>()] = r.at("entropy").get<std::string>();
            }
        }
        for (const auto &r : m.at("runs")) {
            LoadedRun lr;
            lr.config = cfg;
            lr.dir = dir;
            lr.instance = r.at("instance").get<std::size_t>();
            lr.chi = r.at("chi").get<std::size_t>();
            lr.trace = read_table((dir / r.at("trace").get<std::string>()).string());
            if (!r.at("oracle").is_null()) {
                lr.oracle = read_table((dir / r.at("oracle").get<std::string>()).string());
            }
            if (auto it = entropy_files.find(lr.instance); it != entropy_files.end()) {
                lr.entropy = read_table((dir / it->second).string());
            }
            lr.spectra_path = (dir / r.at("spectra").get<std::string>()).string();
            runs.push_back(std::move(lr));
        }
    }
    return runs;
}

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};

MeanStd mean_std(const std::vector<double> &v) {
    MeanStd r;
    if (v.empty()) {
        r.mean = r.stddev = std::nan("");
        return r;
    }
    for (double x : v) {
        r.mean += x;
    }
    r.mean /= static_cast<double>(v.size());
    if (v.size() < 2) {
        r.stddev = std::nan("");
        return r;
    }
    double s = 0.0;
    for (double x : v) {
        s += (x - r.mean) * (x - r.mean);
    }
    r.stddev = std::sqrt(s / static_cast<double>(v.size() - 1));
    return r;
}

using GroupKey = std::tuple<std::string, std::size_t, std::size_t, std::size_t, std::size_t>;

std::string seq_label(const Sequence &s) {
    if (s.kind == SequenceKind::FSim) {
        return fmt::format("fsim({:.6f};{:.6f})", s.theta, s.phi);
    }
    return sequence_kind_name(s.kind);
}

/// Per (sequence, rows, cols, chi, depth): values from every instance.
struct Grouped {
    std::map<GroupKey, std::vector<double>> fapx, log_fapx, fex, nxeb;
    std::map<GroupKey, std::size_t> n2qg;
};

Grouped group_runs(const std::vector<LoadedRun> &runs) {
    Grouped g;
    for (const auto &r : runs) {
        const std::string seq = seq_label(r.config.sequence);
        for (std::size_t k = 0; k < r.trace.rows().size(); ++k) {
            const auto depth = static_cast<std::size_t>(r.trace.number(k, "layer"));
            const GroupKey key{seq, r.config.rows, r.config.cols, r.chi, depth};
            g.fapx[key].push_back(r.trace.number(k, "fapx"));
            g.log_fapx[key].push_back(r.trace.number(k, "log_fapx"));
            g.n2qg[key] = static_cast<std::size_t>(r.trace.number(k, "n_2qg"));
        }
        if (r.oracle) {
            for (std::size_t k = 0; k < r.oracle->rows().size(); ++k) {
                if (r.oracle->text(k, "status") != "ok") {
                    continue;
                }
                const auto depth = static_cast<std::size_t>(r.oracle->number(k, "depth"));
                const GroupKey key{seq, r.config.rows, r.config.cols, r.chi, depth};
                g.fex[key].push_back(r.oracle->number(k, "f_ex"));
                const double x = r.oracle->number(k, "f_nxeb");
                if (!std::isnan(x)) {
                    g.nxeb[key].push_back(x);
                }
            }
        }
    }
    return g;
}

std::vector<std::string> key_cells(const GroupKey &k) {
    return {std::get<0>(k), format_number(std::get<1>(k)), format_number(std::get<2>(k))};
}

}  // namespace

Table emit_plot_data(const std::vector<std::string> &run_dirs, PlotKind kind) {
    const auto runs = load_runs(run_dirs);
    Table t;
    switch (kind) {
        case PlotKind::FidelityVsDepth: {
            t = Table({"sequence", "rows", "cols", "chi", "depth", "n_2qg", "instances", "fapx_mean", "fapx_std",
                       "fex_mean", "fex_std", "epsilon_mean", "epsilon_std"});
            const Grouped g = group_runs(runs);
            for (const auto &[key, v] : g.fapx) {
                const std::size_t n2 = g.n2qg.at(key);
                std::vector<double> eps;
                if (n2 > 0) {
                    for (double lf : g.log_fapx.at(key)) {
                        eps.push_back(error_per_gate_log(lf, n2));
                    }
                }
                const MeanStd f = mean_std(v);
                const MeanStd e = mean_std(eps);
                const auto it = g.fex.find(key);
                const MeanStd x = it != g.fex.end() && it->second.size() == v.size() ? mean_std(it->second)
                                                                                        : mean_std({});
                auto cells = key_cells(key);
                cells.insert(cells.end(), {format_number(std::get<3>(key)), format_number(std::get<4>(key)),
                                           format_number(n2), format_number(v.size()), format_number(f.mean),
                                           format_number(f.stddev), format_number(x.mean), format_number(x.stddev),
                                           format_number(e.mean), format_number(e.stddev)});
                t.add_row(std::move(cells));
            }
            break;
        }
        case PlotKind::EpsilonVsChi: {
            t = Table({"sequence", "rows", "cols", "depth", "chi", "instances", "epsilon_mean", "epsilon_std",
                       "epsilon_mps"});
            const Grouped g = group_runs(runs);
            std::map<GroupKey, std::vector<std::string>> ordered;  // re-keyed by depth before chi
            for (const auto &[key, v] : g.log_fapx) {
                const std::size_t depth = std::get<4>(key);
                if (depth == 0 || depth % 4 != 0) {
                    continue;
                }
                std::vector<double> eps;
                for (double lf : v) {
                    eps.push_back(error_per_gate_log(lf, g.n2qg.at(key)));
                }
                const MeanStd e = mean_std(eps);
                const std::size_t n = std::get<1>(key) * std::get<2>(key);
                auto cells = key_cells(key);
                cells.insert(cells.end(),
                             {format_number(depth), format_number(std::get<3>(key)), format_number(v.size()),
                              format_number(e.mean), format_number(e.stddev),
                              n % 2 == 0 ? format_number(mps_error_reference(n, std::get<3>(key), depth)) : "nan"});
                ordered[{std::get<0>(key), std::get<1>(key), std::get<2>(key), depth, std::get<3>(key)}] =
                    std::move(cells);
            }
            for (auto &[k, cells] : ordered) {
                t.add_row(std::move(cells));
            }
            break;
        }
        case PlotKind::Spectra: {
            t = Table({"sequence", "rows", "cols", "chi", "instance", "edge", "index", "value"});
            for (const auto &r : runs) {
                const Table s = read_table(r.spectra_path);
                std::map<std::size_t, double> top;
                for (std::size_t k = 0; k < s.rows().size(); ++k) {
                    const auto e = static_cast<std::size_t>(s.number(k, "edge"));
                    top[e] = std::max(top[e], s.number(k, "value"));
                }
                for (std::size_t k = 0; k < s.rows().size(); ++k) {
                    const auto e = static_cast<std::size_t>(s.number(k, "edge"));
                    t.add_row({seq_label(r.config.sequence), format_number(r.config.rows),
                               format_number(r.config.cols), format_number(r.chi), format_number(r.instance),
                               s.text(k, "edge"), s.text(k, "index"), format_number(s.number(k, "value") / top[e])});
                }
            }
            break;
        }
        case PlotKind::Entropy: {
            t = Table({"sequence", "rows", "cols", "depth", "cut", "instances", "entropy_mean", "entropy_std"});
            std::map<std::tuple<std::string, std::size_t, std::size_t, std::size_t, std::size_t>, std::vector<double>>
                by;
            std::set<std::pair<fs::path, std::size_t>> seen;
            for (const auto &r : runs) {
                if (!r.entropy || !seen.insert({r.dir, r.instance}).second) {
                    continue;
                }
                for (std::size_t k = 0; k < r.entropy->rows().size(); ++k) {
                    by[{seq_label(r.config.sequence), r.config.rows, r.config.cols,
                        static_cast<std::size_t>(r.entropy->number(k, "depth")),
                        static_cast<std::size_t>(r.entropy->number(k, "cut"))}]
                        .push_back(r.entropy->number(k, "entropy_bits"));
                }
            }
            for (const auto &[key, v] : by) {
                const MeanStd m = mean_std(v);
                t.add_row({std::get<0>(key), format_number(std::get<1>(key)), format_number(std::get<2>(key)),
                           format_number(std::get<3>(key)), format_number(std::get<4>(key)), format_number(v.size()),
                           format_number(m.mean), format_number(m.stddev)});
            }
            break;
        }
        case PlotKind::NxebScatter: {
            t = Table({"sequence", "rows", "cols", "chi", "depth", "instances", "fex_mean", "fex_std", "fnxeb_mean",
                       "fnxeb_std"});
            const Grouped g = group_runs(runs);
            for (const auto &[key, v] : g.fex) {
                const auto it = g.nxeb.find(key);
                if (it == g.nxeb.end()) {
                    continue;
                }
                const MeanStd x = mean_std(v);
                const MeanStd y = mean_std(it->second);
                auto cells = key_cells(key);
                cells.insert(cells.end(), {format_number(std::get<3>(key)), format_number(std::get<4>(key)),
                                           format_number(v.size()), format_number(x.mean), format_number(x.stddev),
                                           format_number(y.mean), format_number(y.stddev)});
                t.add_row(std::move(cells));
            }
            break;
        }
    }
    if (t.rows().empty()) {
        throw Error(ErrorKind::EmptyOutput, fmt::format("no data for '{}'", plot_kind_name(kind)));
    }
    return t;
}

std::string analyze_runs(const std::vector<std::string> &run_dirs) {
    const auto runs = load_runs(run_dirs);
    if (runs.empty()) {
        throw Error(ErrorKind::EmptyOutput, "no runs to analyze");
    }
    const Grouped g = group_runs(runs);
    // (sequence, rows, cols) -> chi -> depth -> key
    std::map<std::tuple<std::string, std::size_t, std::size_t>, std::map<std::size_t, std::vector<GroupKey>>> tree;
    for (const auto &[key, v] : g.fapx) {
        tree[{std::get<0>(key), std::get<1>(key), std::get<2>(key)}][std::get<3>(key)].push_back(key);
    }
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); };
    json doc;
    doc["schema"] = "pepsrqc.analysis";
    doc["version"] = 1;
    doc["series"] = json::array();
    for (const auto &[family, by_chi] : tree) {
        const std::size_t n = std::get<1>(family) * std::get<2>(family);
        json fam;
        fam["sequence"] = std::get<0>(family);
        fam["rows"] = std::get<1>(family);
        fam["cols"] = std::get<2>(family);
        fam["fits"] = json::array();
        std::vector<ScalingPoint> points;
        std::size_t instances = 0;
        for (const auto &[chi, keys] : by_chi) {
            json entry;
            entry["chi"] = chi;
            std::vector<double> d_apx, y_apx, d_ex, y_ex;
            for (const auto &key : keys) {
                const std::size_t depth = std::get<4>(key);
                const MeanStd f = mean_std(g.fapx.at(key));
                instances = std::max(instances, g.fapx.at(key).size());
                d_apx.push_back(static_cast<double>(depth));
                y_apx.push_back(std::log(f.mean));
                if (depth > 0 && depth % 4 == 0) {
                    points.push_back({chi, depth, error_per_gate(f.mean, g.n2qg.at(key))});
                }
                if (auto it = g.fex.find(key); it != g.fex.end() && it->second.size() == g.fapx.at(key).size()) {
                    d_ex.push_back(static_cast<double>(depth));
                    y_ex.push_back(std::log(mean_std(it->second).mean));
                }
            }
            auto fit_json = [&](const std::vector<double> &d, const std::vector<double> &y, FidelityKind kind) {
                try {
                    const ThreeStageFit f = fit_three_stage(d, y, n, kind);
                    return json{{"never_truncates", f.never_truncates}, {"d_tr", num(f.d_tr)},
                                {"epsilon_layer", f.epsilon_layer},     {"d_sat", num(f.d_sat)},
                                {"rms", f.rms},                         {"stage2_rms", f.stage2_rms},
                                {"stage2_points", f.stage2_points}};
                } catch (const Error &e) {
                    return json{{"error", error_kind_name(e.kind())}, {"message", e.what()}};
                }
            };
            entry["fapx"] = fit_json(d_apx, y_apx, FidelityKind::Approximate);
            if (!d_ex.empty()) {
                entry["fex"] = fit_json(d_ex, y_ex, FidelityKind::Exact);
            }
            fam["fits"].push_back(std::move(entry));
        }
        try {
            const ScalingFit s = fit_scaling(points, instances);
            fam["scaling"] = {{"alpha", s.alpha},
                              {"beta", s.beta},
                              {"residual", s.residual},
                              {"points", s.points},
                              {"instances", s.instances},
                              {"epsilon_layer", s.epsilon_layer(n)},
                              {"anticoncentration_depth", anticoncentration_depth(n, s.beta)}};
        } catch (const Error &e) {
            fam["scaling"] = {{"error", error_kind_name(e.kind())}, {"message", e.what()}};
        }
        doc["series"].push_back(std::move(fam));
    }
    return doc.dump(1) + "\n";
}

}  // namespace pepsrqc

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

#include "pepsrqc/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace pepsrqc {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

struct Line {
    double a = 0.0;  // intercept
    double b = 0.0;  // slope
};

Line least_squares(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    if (sxx == 0.0) {
        throw Error(ErrorKind::DegenerateInput, "all abscissae coincide");
    }
    const double b = sxy / sxx;
    return {my - b * mx, b};
}

}  // namespace

double error_per_gate_log(double log_fidelity, std::size_t n_2qg) {
    if (n_2qg == 0) {
        throw Error(ErrorKind::Parameter, "error per gate needs at least one gate");
    }
    if (!(log_fidelity <= 1e-12) || std::isnan(log_fidelity)) {
        throw Error(ErrorKind::Domain, fmt::format("ln F = {} outside (-inf, 0]", log_fidelity));
    }
    return -std::expm1(std::min(log_fidelity, 0.0) / static_cast<double>(n_2qg));
}

double error_per_gate(double fidelity, std::size_t n_2qg) {
    if (!(fidelity > 0.0)) {
        throw Error(ErrorKind::Domain, fmt::format("fidelity {} is not positive", fidelity));
    }
    return error_per_gate_log(std::log(fidelity), n_2qg);
}

double nominal_two_qubit_gates(std::size_t n_r, std::size_t n_c, std::size_t depth) {
    const double n = static_cast<double>(n_r * n_c);
    return (2.0 * n - static_cast<double>(n_r + n_c)) * static_cast<double>(depth) / 4.0;
}

ErrorReport error_report(const CircuitInstance &circuit, std::span<const double> log_fidelity_by_depth) {
    ErrorReport r;
    for (std::size_t k = 0; k < log_fidelity_by_depth.size(); ++k) {
        ErrorRow row;
        row.depth = k + 1;
        row.log_fidelity = log_fidelity_by_depth[k];
        row.n_2qg = circuit.two_qubit_gates(row.depth);
        row.epsilon = error_per_gate_log(row.log_fidelity, row.n_2qg);
        r.rows.push_back(row);
    }
    return r;
}

ErrorReport error_report(const CircuitInstance &circuit, const FidelityTrace &trace) {
    std::vector<double> lf;
    for (const auto &l : trace.layers) {
        lf.push_back(l.log_fapx);
    }
    return error_report(circuit, lf);
}

double ThreeStageFit::model(double depth, std::size_t n, FidelityKind kind) const {
    if (never_truncates) {
        return 0.0;
    }
    double y = std::min(0.0, -epsilon_layer * (depth - d_tr));
    if (kind == FidelityKind::Exact) {
        y = std::max(y, -static_cast<double>(n) * kLn2);
    }
    return y;
}

ThreeStageFit fit_three_stage(std::span<const double> depths, std::span<const double> log_fidelity, std::size_t n,
                              FidelityKind kind) {
    if (depths.size() != log_fidelity.size()) {
        throw Error(ErrorKind::Dimension, "depth and fidelity series differ in length");
    }
    std::vector<std::size_t> idx(depths.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return depths[a] < depths[b]; });
    std::vector<double> x;
    std::vector<double> y;
    for (auto k : idx) {
        x.push_back(depths[k]);
        y.push_back(log_fidelity[k]);
    }
    ThreeStageFit best;
    if (std::all_of(y.begin(), y.end(), [](double v) { return std::abs(v) < 1e-10; })) {
        best.never_truncates = true;
        best.d_tr = std::numeric_limits<double>::infinity();
        best.d_sat = std::numeric_limits<double>::infinity();
        return best;
    }
    const std::size_t m = x.size();
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t i1 = 0; i1 < m; ++i1) {
        for (std::size_t i2 = i1 + 3; i2 <= m; ++i2) {
            if (kind == FidelityKind::Approximate && i2 != m) {
                continue;
            }
            std::span<const double> xs(x.data() + i1, i2 - i1);
            std::span<const double> ys(y.data() + i1, i2 - i1);
            // The decaying stage holds only depths that have actually lost fidelity.
            if (!std::all_of(ys.begin(), ys.end(), [](double v) { return v < -1e-10; })) {
                continue;
            }
            Line line;
            try {
                line = least_squares(xs, ys);
            } catch (const Error &) {
                continue;
            }
            if (!(line.b < 0.0)) {
                continue;
            }
            ThreeStageFit f;
            f.epsilon_layer = -line.b;
            f.d_tr = line.a / f.epsilon_layer;
            f.d_sat = f.d_tr + static_cast<double>(n) * kLn2 / f.epsilon_layer;
            f.stage2_points = i2 - i1;
            double sse = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double r = y[k] - f.model(x[k], n, kind);
                sse += r * r;
            }
            double sse2 = 0.0;
            for (std::size_t k = i1; k < i2; ++k) {
                const double r = y[k] - (line.a + line.b * x[k]);
                sse2 += r * r;
            }
            f.rms = std::sqrt(sse / static_cast<double>(m));
            f.stage2_rms = std::sqrt(sse2 / static_cast<double>(i2 - i1));
            if (sse < best_sse) {
                best_sse = sse;
                best = f;
            }
        }
    }
    if (!std::isfinite(best_sse)) {
        throw Error(ErrorKind::Underdetermined, "fewer than three depths in a decaying stage");
    }
    return best;
}

double ScalingFit::truncation_depth(std::size_t chi) const {
    return beta * std::log2(static_cast<double>(chi));
}

double ScalingFit::epsilon_layer(std::size_t n) const {
    return alpha * static_cast<double>(n) / 2.0;
}

double ScalingFit::saturation_depth(std::size_t chi, std::size_t n) const {
    return truncation_depth(chi) + static_cast<double>(n) / epsilon_layer(n) * kLn2;
}

double ScalingFit::predict(std::size_t chi, std::size_t depth) const {
    return std::max(alpha * (1.0 - beta * std::log2(static_cast<double>(chi)) / static_cast<double>(depth)), 0.0);
}

ScalingFit fit_scaling(std::span<const ScalingPoint> points, std::size_t instances) {
    std::set<std::size_t> chis;
    for (const auto &p : points) {
        if (p.chi == 0 || p.depth == 0 || p.depth % 4 != 0) {
            throw Error(ErrorKind::Parameter,
                        fmt::format("scaling point (chi={}, D={}) needs chi >= 1 and D a positive multiple of 4",
                                    p.chi, p.depth));
        }
        chis.insert(p.chi);
    }
    if (chis.size() < 4) {
        throw Error(ErrorKind::Underdetermined, fmt::format("{} distinct chi values; need at least 4", chis.size()));
    }
    std::vector<double> u;
    std::vector<double> e;
    for (const auto &p : points) {
        if (p.epsilon > 1e-12) {
            u.push_back(std::log2(static_cast<double>(p.chi)) / static_cast<double>(p.depth));
            e.push_back(p.epsilon);
        }
    }
    if (e.empty()) {
        throw Error(ErrorKind::DegenerateInput, "every point has zero error");
    }
    if (e.size() < 2) {
        throw Error(ErrorKind::Underdetermined, "a single point in the linear region");
    }
    const Line line = least_squares(u, e);
    if (!(line.a > 0.0)) {
        throw Error(ErrorKind::DegenerateInput, "fitted alpha is not positive");
    }
    ScalingFit f;
    f.alpha = line.a;
    f.beta = -line.b / line.a;
    f.points = e.size();
    f.instances = instances;
    double sse = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
        const double r = e[k] - (line.a + line.b * u[k]);
        sse += r * r;
    }
    f.residual = std::sqrt(sse / static_cast<double>(e.size()));
    return f;
}

double mps_error_reference(std::size_t n, std::size_t chi, std::size_t depth) {
    if (n == 0 || n % 2 != 0 || chi == 0 || depth == 0) {
        throw Error(ErrorKind::Parameter, "mps reference needs even n, chi >= 1, D >= 1");
    }
    const double v = (kLn2 - std::log(4.0 * static_cast<double>(chi)) / (static_cast<double>(n) / 2.0)) /
                     static_cast<double>(depth);
    return std::max(v, 0.0);
}

CostEstimate cost_estimate(std::size_t n_r, std::size_t n_c, std::size_t chi, std::size_t depth) {
    constexpr double d = 2.0;
    const double n = static_cast<double>(n_r * n_c);
    const double x = static_cast<double>(chi);
    const double dd = static_cast<double>(depth);
    CostEstimate c;
    c.flops = dd * n * std::pow(x, 5) * d * d;
    c.svd_flops = dd * n * std::pow(x, 3) * std::pow(d, 6);
    c.memory_bytes = n * std::pow(x, 4) * d * 16.0;
    return c;
}

double anticoncentration_depth(std::size_t n, double beta) {
    if (n < 2 || !(beta > 0.0)) {
        throw Error(ErrorKind::Parameter, "anticoncentration depth needs n >= 2 and beta > 0");
    }
    return beta / 2.0 * std::log2(static_cast<double>(n));
}

AggregateSeries aggregate_instances(std::span<const Series> reports) {
    if (reports.size() < 2) {
        throw Error(ErrorKind::Underdetermined, "aggregation needs at least two instances");
    }
    const auto &grid = reports.front().depths;
    for (const auto &r : reports) {
        if (r.depths != grid || r.values.size() != grid.size()) {
            throw Error(ErrorKind::Alignment, "instances are on different depth grids");
        }
    }
    AggregateSeries out;
    out.depths = grid;
    out.instances = reports.size();
    const auto k = static_cast<double>(reports.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double s = 0.0;
        for (const auto &r : reports) {
            s += r.values[j];
        }
        const double mean = s / k;
        double v = 0.0;
        for (const auto &r : reports) {
            v += (r.values[j] - mean) * (r.values[j] - mean);
        }
        out.mean.push_back(mean);
        out.stddev.push_back(std::sqrt(v / (k - 1.0)));
    }
    return out;
}

}  // namespace pepsrqc

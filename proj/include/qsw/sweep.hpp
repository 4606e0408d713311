// sweep.hpp — Parameter sweeps, deterministic CSV output, figure datasets
//
// Grid points are embarrassingly parallel; rows are computed by a worker pool
// but always emitted in grid order with fixed 17-significant-digit formatting,
// so output bytes do not depend on the thread count.

#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "qsw/closed_form.hpp"
#include "qsw/est.hpp"
#include "qsw/network.hpp"

namespace qsw {

// Numerical knobs shared by the EST routes during sweeps.
struct ESTOptions {
    double horizon{400.0};
    double tol{1e-6};
    double dt{0.01};
    std::vector<double> s_values{1e-2, 1e-3, 1e-4};
};

struct SweepGrid {
    std::vector<double> alpha_values;
    std::vector<double> phi_values{0.0};
    std::vector<double> lambda_values{1.0};
    double source_rate{0.5};
    double drain_rate{1.0};
    std::vector<SourceMode> modes{SourceMode::Independent, SourceMode::Correlated};
    std::vector<ESTMethod> methods{ESTMethod::LinearSolve};

    void validate() const {
        if (alpha_values.empty() || phi_values.empty() || lambda_values.empty() ||
            modes.empty() || methods.empty()) {
            throw std::invalid_argument("SweepGrid: all grids must be non-empty");
        }
        for (double a : alpha_values) {
            if (!(a >= 0.0 && a <= 1.0)) {
                throw std::invalid_argument("SweepGrid: alpha values must lie in [0, 1]");
            }
        }
        for (double l : lambda_values) {
            if (!(l >= 0.0)) {
                throw std::invalid_argument("SweepGrid: lambda values must be >= 0");
            }
        }
        if (!(source_rate >= 0.0) || !(drain_rate >= 0.0)) {
            throw std::invalid_argument("SweepGrid: rates must be >= 0");
        }
    }
};

struct SweepRecord {
    double alpha{0.0};
    double phi{0.0};
    double lambda{0.0};
    double source_rate{0.0};
    double drain_rate{0.0};
    SourceMode mode{SourceMode::Independent};
    ESTMethod method{ESTMethod::LinearSolve};
    ESTValue est;
};

inline std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw std::invalid_argument("linspace: count must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(count));
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    }
    return out;
}

// Thread count resolution: explicit request, else the QSW_THREADS environment
// variable, else 1.
inline int resolve_threads(int requested) {
    if (requested >= 1) return requested;
    if (const char* env = std::getenv("QSW_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

namespace detail {

inline ESTValue run_method(const Generator& g, const DensityMatrix& rho0, ESTMethod method,
                           const ESTOptions& opts) {
    switch (method) {
        case ESTMethod::LinearSolve: return est_linear_solve(g, rho0);
        case ESTMethod::TimeDomain: return est_time_domain(g, rho0, opts.horizon, opts.tol, opts.dt);
        case ESTMethod::ResolventLimit: return est_resolvent_limit(g, rho0, opts.s_values);
    }
    throw std::logic_error("run_method: unknown method");
}

template <typename Task>
inline void parallel_for(std::size_t count, int threads, Task&& task) {
    const int workers = std::min<int>(threads, static_cast<int>(count) > 0 ? static_cast<int>(count) : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                task(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

// Run the grid over the given network topology. Rows are ordered
// mode -> lambda -> alpha -> phi -> method. Generators are rebuilt per point;
// evaluation order never affects results.
inline std::vector<SweepRecord> run_sweep(const NetworkSpec& spec, const SourceConfig& source_base,
                                          const DrainConfig& drain_base, const SweepGrid& grid,
                                          const ESTOptions& opts = {}, int threads = 1) {
    grid.validate();
    spec.validate();

    std::vector<SweepRecord> records;
    for (SourceMode mode : grid.modes) {
        for (double lambda : grid.lambda_values) {
            for (double alpha : grid.alpha_values) {
                for (double phi : grid.phi_values) {
                    for (ESTMethod method : grid.methods) {
                        SweepRecord rec;
                        rec.alpha = alpha;
                        rec.phi = phi;
                        rec.lambda = lambda;
                        rec.source_rate = grid.source_rate;
                        rec.drain_rate = grid.drain_rate;
                        rec.mode = mode;
                        rec.method = method;
                        records.push_back(rec);
                    }
                }
            }
        }
    }

    detail::parallel_for(records.size(), resolve_threads(threads), [&](std::size_t i) {
        SweepRecord& rec = records[i];
        SourceConfig src = source_base;
        src.mode = rec.mode;
        src.phase = rec.phi;
        src.rate = rec.source_rate;
        DrainConfig drn = drain_base;
        drn.rate = rec.drain_rate;
        const Generator g = assemble_generator(spec, src, drn,
                                               MixingParams{rec.alpha, rec.lambda});
        rec.est = detail::run_method(g, DensityMatrix::source_seed(g.dims), rec.method, opts);
    });
    return records;
}

// ------------------------------ CSV formatting -------------------------------

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string sweep_csv_header() {
    return "alpha,phi,lambda,Gamma,gamma,mode,method,est,converged,residual";
}

inline std::string to_csv_row(const SweepRecord& rec) {
    std::string row;
    row += format_g17(rec.alpha);
    row += ',';
    row += format_g17(rec.phi);
    row += ',';
    row += format_g17(rec.lambda);
    row += ',';
    row += format_g17(rec.source_rate);
    row += ',';
    row += format_g17(rec.drain_rate);
    row += ',';
    row += source_mode_name(rec.mode);
    row += ',';
    row += est_method_name(rec.method);
    row += ',';
    row += rec.est.divergent ? "inf" : format_g17(rec.est.value);
    row += ',';
    row += rec.est.converged ? "true" : "false";
    row += ',';
    row += format_g17(rec.est.diagnostics.residual);
    return row;
}

inline std::string to_csv(const std::vector<SweepRecord>& records) {
    std::string out = sweep_csv_header() + "\n";
    for (const auto& rec : records) {
        out += to_csv_row(rec);
        out += '\n';
    }
    return out;
}

// ----------------------------- Figure datasets -------------------------------

struct DatasetFile {
    std::string name;
    std::string content;
};

namespace detail {

inline const char* fig2_plot_script() {
    return R"PY(#!/usr/bin/env python3
"""Render the phase-dependence figure from fig2_surface.csv / fig2_sections.csv."""
import csv
import math

import matplotlib.pyplot as plt
import numpy as np


def load(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


surface = load("fig2_surface.csv")
sections = load("fig2_sections.csv")

alphas = sorted({float(r["alpha"]) for r in surface})
phis = sorted({float(r["phi"]) for r in surface})
grid = np.full((len(phis), len(alphas)), np.nan)
ai = {a: i for i, a in enumerate(alphas)}
pi = {p: i for i, p in enumerate(phis)}
for r in surface:
    v = r["est"]
    grid[pi[float(r["phi"])], ai[float(r["alpha"])]] = (
        np.nan if v == "inf" else float(v))

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
mesh = ax1.pcolormesh(alphas, phis, grid, shading="auto", cmap="viridis")
fig.colorbar(mesh, ax=ax1, label="survival time")
ax1.set_xlabel("alpha")
ax1.set_ylabel("phi")
ax1.set_title("eta_II(alpha, phi)")

styles = {"0": "k-", str(math.pi / 2): "b--", str(math.pi): "r-."}
for phi_key in sorted({r["phi"] for r in sections if r["mode"] == "correlated"},
                      key=float):
    xs = [float(r["alpha"]) for r in sections
          if r["mode"] == "correlated" and r["phi"] == phi_key and r["est"] != "inf"]
    ys = [float(r["est"]) for r in sections
          if r["mode"] == "correlated" and r["phi"] == phi_key and r["est"] != "inf"]
    ax2.plot(xs, ys, label=f"eta_II, phi={float(phi_key):.3f}")
xs = [float(r["alpha"]) for r in sections if r["mode"] == "independent" and r["est"] != "inf"]
ys = [float(r["est"]) for r in sections if r["mode"] == "independent" and r["est"] != "inf"]
ax2.plot(xs, ys, "k:", linewidth=2, label="eta_I")
ax2.set_xlabel("alpha")
ax2.set_ylabel("survival time")
ax2.legend()
ax2.set_title("cross sections")

fig.tight_layout()
fig.savefig("fig2.png", dpi=160)
print("wrote fig2.png")
)PY";
}

inline const char* fig3_plot_script() {
    return R"PY(#!/usr/bin/env python3
"""Render the dephasing-dependence figure from fig3_curves.csv / fig3_alpha_c.csv."""
import csv

import matplotlib.pyplot as plt


def load(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


curves = load("fig3_curves.csv")
alpha_c = load("fig3_alpha_c.csv")

fig, ax = plt.subplots(figsize=(6.4, 4.6))
for lam in sorted({r["lambda"] for r in curves}, key=float):
    for mode, style in (("independent", "--"), ("correlated", "-")):
        xs = [float(r["alpha"]) for r in curves
              if r["lambda"] == lam and r["mode"] == mode and r["est"] != "inf"]
        ys = [float(r["est"]) for r in curves
              if r["lambda"] == lam and r["mode"] == mode and r["est"] != "inf"]
        label = ("eta_I" if mode == "independent" else "eta_II(phi=0)") + f", lambda={lam}"
        ax.plot(xs, ys, style, label=label)
for r in alpha_c:
    ax.axvline(float(r["alpha_c_numeric"]), color="gray", alpha=0.4, linewidth=0.8)
ax.set_xlabel("alpha")
ax.set_ylabel("survival time")
ax.legend(fontsize=8)
ax.set_title("survival times vs dephasing (vertical lines: numeric alpha_c)")
fig.tight_layout()
fig.savefig("fig3.png", dpi=160)
print("wrote fig3.png")
)PY";
}

}  // namespace detail

// Phase-dependence dataset: eta_II over alpha x phi for lambda = 1 at the
// canonical rates, plus eta_I and three eta_II cross sections.
inline std::vector<DatasetFile> reproduce_fig2(int threads = 1) {
    const NetworkSystem sys = trimer_paper(0.5, 1.0);
    const ESTOptions opts;

    SweepGrid surface;
    surface.alpha_values = linspace(0.01, 1.0, 100);
    surface.phi_values = linspace(0.0, 2.0 * kPi, 64);
    surface.lambda_values = {1.0};
    surface.modes = {SourceMode::Correlated};
    surface.methods = {ESTMethod::LinearSolve};
    const auto surf_records = run_sweep(sys.network, sys.source, sys.drain, surface, opts, threads);

    SweepGrid sections;
    sections.alpha_values = surface.alpha_values;
    sections.phi_values = {0.0, kPi / 2.0, kPi};
    sections.lambda_values = {1.0};
    sections.modes = {SourceMode::Correlated};
    sections.methods = {ESTMethod::LinearSolve};
    auto section_records = run_sweep(sys.network, sys.source, sys.drain, sections, opts, threads);

    SweepGrid independent = sections;
    independent.phi_values = {0.0};
    independent.modes = {SourceMode::Independent};
    const auto indep_records =
        run_sweep(sys.network, sys.source, sys.drain, independent, opts, threads);
    section_records.insert(section_records.end(), indep_records.begin(), indep_records.end());

    return {DatasetFile{"fig2_surface.csv", to_csv(surf_records)},
            DatasetFile{"fig2_sections.csv", to_csv(section_records)},
            DatasetFile{"fig2_plot.py", detail::fig2_plot_script()}};
}

// Dephasing-dependence dataset: eta_I and eta_II(phi = 0) for a set of
// dephasing rates, with the numeric critical mixing weight per rate and both
// algebraic readings alongside.
inline std::vector<DatasetFile> reproduce_fig3(int threads = 1,
                                               std::vector<double> lambdas = {0.0, 1.0, 5.0}) {
    const NetworkSystem sys = trimer_paper(0.5, 1.0);
    const ESTOptions opts;

    SweepGrid grid;
    grid.alpha_values = linspace(0.01, 1.0, 100);
    grid.phi_values = {0.0};
    grid.lambda_values = lambdas;
    grid.modes = {SourceMode::Independent, SourceMode::Correlated};
    grid.methods = {ESTMethod::LinearSolve};
    const auto records = run_sweep(sys.network, sys.source, sys.drain, grid, opts, threads);

    std::string alpha_c = "lambda,alpha_c_numeric,alpha_c_lambda_cubed,alpha_c_sum_cubed\n";
    for (double lam : lambdas) {
        alpha_c += format_g17(lam) + ',' + format_g17(alpha_c_numeric(lam, 0.5)) + ',' +
                   format_g17(alpha_c_formula(lam, AlphaCVariant::LambdaCubed)) + ',' +
                   format_g17(alpha_c_formula(lam, AlphaCVariant::SumCubed)) + '\n';
    }

    return {DatasetFile{"fig3_curves.csv", to_csv(records)},
            DatasetFile{"fig3_alpha_c.csv", alpha_c},
            DatasetFile{"fig3_plot.py", detail::fig3_plot_script()}};
}

}  // namespace qsw

// est.hpp — Expected survival time by three independent numerical routes
//
// The EST is the integral of the non-drain population, eta = ∫ (1 - rho_drain).
// Routes:
//   * LinearSolve    — restricted linear solve realizing the Laplace s -> 0 limit
//   * TimeDomain     — quadrature over a propagated trajectory plus a tail fit
//   * ResolventLimit — small-s resolvent samples extrapolated to s = 0
//
// Divergence handling in LinearSolve: the restricted generator A_r may carry
// stationary modes (dark states). The EST diverges only when the initial state
// actually excites one, measured by the projection of vec(rho0) onto the left
// null space of A_r. Unexcited stationary modes are deflated away and the
// solve proceeds on the decaying subspace; this keeps the three routes
// consistent at points where a dark state exists but is never populated.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsw/liouvillian.hpp"

namespace qsw {

enum class ESTMethod { TimeDomain, LinearSolve, ResolventLimit };

inline const char* est_method_name(ESTMethod m) {
    switch (m) {
        case ESTMethod::TimeDomain: return "time";
        case ESTMethod::LinearSolve: return "solve";
        case ESTMethod::ResolventLimit: return "resolvent";
    }
    return "?";
}

// Singular-value ratio below which A_r is declared to carry stationary modes.
inline constexpr double kSingularValueRatio = 1e-10;
// Relative initial-state weight on stationary modes that certifies divergence.
inline constexpr double kExcitationThreshold = 1e-8;

struct ESTDiagnostics {
    double residual{0.0};        // method-specific: solve residual, integrand at
                                 // horizon, or extrapolation correction
    double condition{0.0};       // condition estimate of the solved system
    double horizon{0.0};         // time horizon actually integrated (TimeDomain)
    int stationary_dim{0};       // dimension of the stationary subspace found
    double excitation{0.0};      // initial-state weight on stationary modes
    double pole_exponent{0.0};   // fitted exponent of eta(s) (ResolventLimit)
    std::string note;
};

struct ESTValue {
    double value{0.0};           // +inf when divergent
    bool divergent{false};
    ESTMethod method{ESTMethod::LinearSolve};
    bool converged{false};
    ESTDiagnostics diagnostics;
};

// Numerical breakdowns are reported as errors, distinct from certified divergence.
struct SolverBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Sum of the non-drain populations of a vectorized state.
inline double survival_weight(const Eigen::VectorXcd& v, int dims) {
    double s = 0.0;
    for (int k = 0; k + 1 < dims; ++k) s += v(static_cast<Eigen::Index>(k) * dims + k).real();
    return s;
}

inline void check_state(const Generator& g, const DensityMatrix& rho0) {
    if (rho0.dims() != g.dims) {
        throw std::invalid_argument("est: state dimension does not match generator");
    }
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

}  // namespace detail

// Restricted linear solve. A_r is the generator with the drain-population row
// and column removed; solving A_r x = -vec(rho0) and summing the surviving
// populations of x gives the s -> 0 limit of the Laplace-domain survival sum.
inline ESTValue est_linear_solve(const Generator& g, const DensityMatrix& rho0) {
    detail::check_state(g, rho0);
    const int dims = g.dims;
    const Eigen::Index n = static_cast<Eigen::Index>(dims) * dims - 1;

    const Eigen::MatrixXcd a = g.matrix.topLeftCorner(n, n);
    const Eigen::VectorXcd b = -vectorize(rho0.matrix()).head(n);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd sigma = svd.singularValues();
    const double smax = sigma(0);
    const double smin = sigma(n - 1);

    ESTValue out;
    out.method = ESTMethod::LinearSolve;
    out.diagnostics.condition = smax / std::max(smin, 1e-300);

    if (smax <= 0.0) {
        throw SolverBreakdown("est_linear_solve: generator is identically zero");
    }

    if (smin >= kSingularValueRatio * smax) {
        const Eigen::VectorXcd x = svd.solve(b);
        out.value = detail::survival_weight(x, dims);
        out.converged = true;
        out.diagnostics.residual = (a * x - b).norm() / std::max(b.norm(), 1e-300);
        return out;
    }

    // Stationary subspace present: left/right null bases from the SVD tail.
    int k = 0;
    while (k < n && sigma(n - 1 - k) < kSingularValueRatio * smax) ++k;
    const Eigen::MatrixXcd w = svd.matrixU().rightCols(k);
    const Eigen::MatrixXcd v0 = svd.matrixV().rightCols(k);
    out.diagnostics.stationary_dim = k;
    out.diagnostics.excitation = (w.adjoint() * b).norm() / std::max(b.norm(), 1e-300);

    if (out.diagnostics.excitation > kExcitationThreshold) {
        out.divergent = true;
        out.value = std::numeric_limits<double>::infinity();
        out.converged = true;
        out.diagnostics.note = "initial state excites a stationary transient mode";
        return out;
    }

    // Unexcited: truncated-SVD solve, then shift the kernel component so the
    // solution lies in Range(A_r), which is where the decaying dynamics lives.
    const Eigen::Index r = n - k;
    const Eigen::VectorXcd coeffs =
        (svd.matrixU().leftCols(r).adjoint() * b).cwiseQuotient(sigma.head(r).cast<cplx>());
    Eigen::VectorXcd x = svd.matrixV().leftCols(r) * coeffs;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(w.adjoint() * v0);
    if (!lu.isInvertible()) {
        throw SolverBreakdown(
            "est_linear_solve: defective stationary subspace; cannot deflate");
    }
    x -= v0 * lu.solve(w.adjoint() * x);
    const double resid = (a * x - b).norm() / std::max(b.norm(), 1e-300);
    if (resid > 1e-6) {
        throw SolverBreakdown("est_linear_solve: deflated solve residual too large");
    }
    out.value = detail::survival_weight(x, dims);
    out.converged = true;
    out.diagnostics.residual = resid;
    out.diagnostics.note = "stationary mode present but unexcited; solved on the decaying subspace";
    return out;
}

// Composite-Simpson quadrature of the survival weight over [0, horizon] on a
// uniform grid, plus an exponential tail estimated from a log-linear fit of
// the last decade of the integrand. When the tail cannot be certified small,
// the returned value is the integrated lower bound and converged is false.
inline ESTValue est_time_domain(const Generator& g, const DensityMatrix& rho0,
                                double horizon, double tol, double dt = 0.01) {
    detail::check_state(g, rho0);
    if (!(horizon > 0.0)) throw std::invalid_argument("est_time_domain: horizon must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("est_time_domain: tol must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("est_time_domain: dt must be > 0");

    const int dims = g.dims;
    long steps = static_cast<long>(std::ceil(horizon / dt - 1e-12));
    if (steps % 2 == 1) ++steps;
    steps = std::max<long>(steps, 2);

    const Eigen::MatrixXcd e = (g.matrix * dt).exp();
    Eigen::VectorXcd v = vectorize(rho0.matrix());
    std::vector<double> w(static_cast<std::size_t>(steps) + 1);
    w[0] = detail::survival_weight(v, dims);
    for (long i = 1; i <= steps; ++i) {
        v = e * v;
        if (!v.allFinite()) {
            throw SolverBreakdown("est_time_domain: non-finite state during propagation");
        }
        w[static_cast<std::size_t>(i)] = detail::survival_weight(v, dims);
    }

    double odd = 0.0, even = 0.0;
    for (long i = 1; i < steps; i += 2) odd += w[static_cast<std::size_t>(i)];
    for (long i = 2; i < steps; i += 2) even += w[static_cast<std::size_t>(i)];
    const double integral = dt / 3.0 * (w.front() + w.back() + 4.0 * odd + 2.0 * even);

    // Tail fit over the final decade of the integrand (at least 8 samples).
    const double w_end = std::max(w.back(), 0.0);
    std::size_t first = w.size() - 1;
    const double decade_cap = 10.0 * std::max(w_end, 1e-300);
    while (first > 0 && w[first - 1] > 0.0 && w[first - 1] <= decade_cap) --first;
    if (w.size() - first < 8) first = w.size() - std::min<std::size_t>(w.size(), 8);
    std::vector<double> ts, logs;
    for (std::size_t i = first; i < w.size(); ++i) {
        if (w[i] > 0.0) {
            ts.push_back(static_cast<double>(i) * dt);
            logs.push_back(std::log(w[i]));
        }
    }
    double tail = std::numeric_limits<double>::infinity();
    double decay = 0.0;
    if (w_end <= 0.0) {
        tail = 0.0;
    } else if (ts.size() >= 2) {
        decay = -detail::fit_slope(ts, logs);
        if (decay > 1e-12) tail = w_end / decay;
    }

    ESTValue out;
    out.method = ESTMethod::TimeDomain;
    out.diagnostics.horizon = static_cast<double>(steps) * dt;
    out.diagnostics.residual = w.back();
    const double total = integral + (std::isfinite(tail) ? tail : 0.0);
    out.converged = (w_end < tol) && std::isfinite(tail) && (tail < tol * std::max(total, 1e-300));
    out.value = out.converged ? total : integral;
    if (!out.converged) {
        out.diagnostics.note = "integrand not decayed at horizon; value is a lower bound";
    }
    return out;
}

// Resolvent samples eta(s) from (s I - G) y = vec(rho0), extrapolated to s = 0
// by Neville polynomial extrapolation. A fitted log-log exponent near -1 marks
// a 1/s pole and certifies divergence.
inline ESTValue est_resolvent_limit(const Generator& g, const DensityMatrix& rho0,
                                    std::vector<double> s_values = {1e-2, 1e-3, 1e-4}) {
    detail::check_state(g, rho0);
    if (s_values.empty()) {
        throw std::invalid_argument("est_resolvent_limit: s_values must be non-empty");
    }
    for (std::size_t i = 0; i < s_values.size(); ++i) {
        if (!(s_values[i] > 0.0)) {
            throw std::invalid_argument("est_resolvent_limit: s_values must be positive");
        }
        if (i > 0 && !(s_values[i] < s_values[i - 1])) {
            throw std::invalid_argument("est_resolvent_limit: s_values must be decreasing");
        }
    }

    const int dims = g.dims;
    const Eigen::Index n = static_cast<Eigen::Index>(dims) * dims;
    const Eigen::VectorXcd b = vectorize(rho0.matrix());
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);

    std::vector<double> etas;
    etas.reserve(s_values.size());
    for (double s : s_values) {
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(s * eye - g.matrix);
        const Eigen::VectorXcd y = lu.solve(b);
        if (!y.allFinite()) {
            throw SolverBreakdown("est_resolvent_limit: resolvent solve failed");
        }
        etas.push_back(detail::survival_weight(y, dims));
    }

    ESTValue out;
    out.method = ESTMethod::ResolventLimit;
    out.diagnostics.condition = g.matrix.cwiseAbs().maxCoeff() / s_values.back();

    if (s_values.size() >= 2) {
        bool all_positive = true;
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < etas.size(); ++i) {
            if (etas[i] <= 0.0) {
                all_positive = false;
                break;
            }
            lx.push_back(std::log(s_values[i]));
            ly.push_back(std::log(etas[i]));
        }
        if (all_positive) {
            out.diagnostics.pole_exponent = detail::fit_slope(lx, ly);
            if (std::abs(out.diagnostics.pole_exponent + 1.0) <= 0.1) {
                out.divergent = true;
                out.value = std::numeric_limits<double>::infinity();
                out.converged = true;
                out.diagnostics.note = "eta(s) grows like 1/s";
                return out;
            }
        }
    }

    if (s_values.size() == 1) {
        out.value = etas[0];
        out.converged = false;
        out.diagnostics.note = "single-point evaluation; no extrapolation";
        return out;
    }

    // Neville tableau evaluated at s = 0; the residual compares against the
    // extrapolation through one fewer point.
    std::vector<double> p = etas;
    double prev_front = p[0];
    for (std::size_t j = 1; j < p.size(); ++j) {
        prev_front = p[0];
        for (std::size_t i = 0; i + j < p.size(); ++i) {
            p[i] = ((0.0 - s_values[i + j]) * p[i] + s_values[i] * p[i + 1]) /
                   (s_values[i] - s_values[i + j]);
        }
    }
    out.value = p[0];
    out.converged = true;
    out.diagnostics.residual = std::abs(p[0] - prev_front);
    return out;
}

}  // namespace qsw

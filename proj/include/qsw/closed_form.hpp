// closed_form.hpp — Analytic expected survival times for the canonical trimer
//
// Valid only for the canonical V-trimer (E = 1, V13 = V23 = 1, V12 = 0,
// drain rate 1, environment constant 1). The survival times are rational in
// the mixing weight alpha:
//
//   eta_I  = 1/Gamma + f(alpha) / g(alpha)                 (independent source)
//   eta_II = 1/Gamma + (f(alpha) - h(alpha) cos phi) / g(alpha)   (correlated)
//
// g vanishes only at alpha = 0 (its discriminant is negative for all
// dephasing rates), so divergence is confined to the purely coherent corner.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qsw {

struct PolyFGH {
    double f{0.0};
    double g{0.0};
    double h{0.0};
};

inline PolyFGH f_g_h(double alpha, double lambda) {
    if (!std::isfinite(alpha) || !std::isfinite(lambda)) {
        throw std::invalid_argument("f_g_h: inputs must be finite");
    }
    const double a = alpha, l = lambda;
    const double cubic = 11.0 + l * (9.0 + 2.0 * l);
    PolyFGH p;
    p.f = 4.0 + a * (17.0 + 13.0 * l) + 2.0 * a * a * (l * (l - 8.0) - 19.0) +
          3.0 * a * a * a * cubic;
    p.g = 4.0 * a * (2.0 + l) - a * a * (15.0 + 7.0 * l) + a * a * a * cubic;
    p.h = 4.0 * (1.0 - a) * (1.0 - a);
    return p;
}

struct ClosedFormEST {
    double value{0.0};            // +inf when divergent
    bool divergent{false};
    bool one_sided_limit{false};  // set when the value is the alpha -> 0+ limit,
                                  // not the alpha = 0 dynamics (see below)
};

// alpha -> 0+ limit of eta_II at phi = 0: 1/Gamma + (25 + 13 lambda)/(8 + 4 lambda).
inline double eta_II_zero_limit(double lambda, double source_rate) {
    if (!(source_rate > 0.0)) {
        throw std::invalid_argument("eta_II_zero_limit: source rate must be > 0");
    }
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("eta_II_zero_limit: lambda must be >= 0");
    }
    return 1.0 / source_rate + (25.0 + 13.0 * lambda) / (8.0 + 4.0 * lambda);
}

namespace detail {

inline ClosedFormEST eta_common(double alpha, double lambda, double source_rate,
                                double cos_phi) {
    if (!(source_rate > 0.0)) {
        throw std::invalid_argument("eta: source rate must be > 0");
    }
    const PolyFGH p = f_g_h(alpha, lambda);
    const double numerator = p.f - p.h * cos_phi;
    ClosedFormEST out;
    if (p.g == 0.0) {
        if (numerator != 0.0) {
            out.divergent = true;
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
        // 0/0 happens only at alpha = 0 with cos phi = 1. The continuation is
        // the one-sided limit; the alpha = 0 dynamics itself is different
        // because the undamped dark mode stops contributing exactly at 0.
        out.value = eta_II_zero_limit(lambda, source_rate);
        out.one_sided_limit = true;
        return out;
    }
    out.value = 1.0 / source_rate + numerator / p.g;
    return out;
}

}  // namespace detail

inline ClosedFormEST eta_I(double alpha, double lambda, double source_rate) {
    return detail::eta_common(alpha, lambda, source_rate, 0.0);
}

inline ClosedFormEST eta_II(double alpha, double lambda, double source_rate, double phi) {
    return detail::eta_common(alpha, lambda, source_rate, std::cos(phi));
}

// Two algebraic readings of the critical mixing weight where eta_II(phi = 0)
// peaks: the radicand numerator is either 2 + lambda^3 or (2 + lambda)^3. Only
// the second is monotone decreasing in lambda and tracks the numerical argmax;
// both are provided so the disagreement can be reported rather than hidden.
enum class AlphaCVariant { LambdaCubed, SumCubed };

inline double alpha_c_formula(double lambda, AlphaCVariant variant) {
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("alpha_c_formula: lambda must be >= 0");
    }
    const double numerator = variant == AlphaCVariant::LambdaCubed
                                 ? 2.0 + lambda * lambda * lambda
                                 : (2.0 + lambda) * (2.0 + lambda) * (2.0 + lambda);
    const double denominator = 11.0 + 9.0 * lambda + 2.0 * lambda * lambda;
    return 4.0 / (3.0 + 2.0 * lambda) * (std::sqrt(numerator / denominator) - 0.25);
}

// Argmax over alpha in (0, 1) of eta_II(alpha; phi = 0) by a coarse bracket
// scan followed by golden-section refinement to 1e-6. The source rate enters
// only as an additive constant, so the location is rate-independent.
inline double alpha_c_numeric(double lambda, double source_rate) {
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("alpha_c_numeric: lambda must be >= 0");
    }
    if (!(source_rate > 0.0)) {
        throw std::invalid_argument("alpha_c_numeric: source rate must be > 0");
    }
    auto objective = [lambda](double a) {
        const PolyFGH p = f_g_h(a, lambda);
        return (p.f - p.h) / p.g;
    };

    const int scan = 512;
    const double lo_edge = 1e-6, hi_edge = 1.0;
    double best = lo_edge, best_val = objective(lo_edge);
    for (int i = 1; i <= scan; ++i) {
        const double a = lo_edge + (hi_edge - lo_edge) * static_cast<double>(i) / scan;
        const double v = objective(a);
        if (v > best_val) {
            best = a;
            best_val = v;
        }
    }
    double lo = std::max(lo_edge, best - (hi_edge - lo_edge) / scan);
    double hi = std::min(hi_edge, best + (hi_edge - lo_edge) / scan);

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - invphi * (hi - lo);
    double d = lo + invphi * (hi - lo);
    double fc = objective(c), fd = objective(d);
    while (hi - lo > 1e-6) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = objective(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = objective(d);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace qsw

// dynamics.hpp — Master-equation propagation and observables
//
// Propagation uses the scaling-and-squaring matrix exponential of the
// generator over uniform sub-intervals; for a time-independent generator this
// is exact up to roundoff, so the step-halving refinement below terminates
// after one comparison. No trace renormalization or eigenvalue clipping is
// performed anywhere: invariant violations surface as errors.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "qsw/liouvillian.hpp"

namespace qsw {

// 64-bit FNV-1a over the generator bytes; identifies which generator produced
// a trajectory.
inline std::uint64_t generator_fingerprint(const Generator& g) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix_bytes = [&h](const void* p, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    mix_bytes(g.matrix.data(), sizeof(cplx) * static_cast<std::size_t>(g.matrix.size()));
    mix_bytes(&g.dims, sizeof g.dims);
    return h;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::uint64_t generator_fingerprint{0};
};

struct ObservableRecord {
    Eigen::VectorXd populations;
    cplx coherence_12{0.0, 0.0};
    double trace{0.0};
    double min_eigenvalue{0.0};
};

namespace detail {

// Vectorized states at the requested times, stepping with exp(G * h) on
// sub-intervals no longer than max_dt. Exponentials are cached per step size.
inline std::vector<Eigen::VectorXcd> propagate_grid(const Generator& g,
                                                    const Eigen::VectorXcd& v0,
                                                    const std::vector<double>& times,
                                                    double max_dt) {
    std::map<double, Eigen::MatrixXcd> cache;
    auto step_matrix = [&](double h) -> const Eigen::MatrixXcd& {
        auto it = cache.find(h);
        if (it == cache.end()) {
            it = cache.emplace(h, Eigen::MatrixXcd((g.matrix * h).exp())).first;
        }
        return it->second;
    };

    std::vector<Eigen::VectorXcd> out;
    out.reserve(times.size());
    Eigen::VectorXcd v = v0;
    out.push_back(v);
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double gap = times[i] - times[i - 1];
        const auto nsub = static_cast<long>(std::ceil(gap / max_dt - 1e-12));
        const long steps = std::max<long>(1, nsub);
        const double h = gap / static_cast<double>(steps);
        const Eigen::MatrixXcd& e = step_matrix(h);
        for (long s = 0; s < steps; ++s) v = e * v;
        if (!v.allFinite()) {
            throw std::runtime_error("evolve: non-finite state (step-size failure)");
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace detail

// Propagate rho0 along `times` (strictly increasing, starting at 0). The base
// sub-step is halved until two successive refinements of the final state agree
// to 1e-9 in max norm.
inline Trajectory evolve(const Generator& g, const DensityMatrix& rho0,
                         const std::vector<double>& times, double base_dt = 0.01) {
    if (times.empty() || times.front() != 0.0) {
        throw std::invalid_argument("evolve: times must start at 0");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw std::invalid_argument("evolve: times must be strictly increasing");
        }
    }
    if (rho0.dims() != g.dims) {
        throw std::invalid_argument("evolve: state dimension does not match generator");
    }
    if (!(base_dt > 0.0)) {
        throw std::invalid_argument("evolve: base_dt must be positive");
    }

    const Eigen::VectorXcd v0 = vectorize(rho0.matrix());
    double dt = base_dt;
    std::vector<Eigen::VectorXcd> vecs = detail::propagate_grid(g, v0, times, dt);
    for (int refinement = 0; refinement < 12; ++refinement) {
        dt *= 0.5;
        std::vector<Eigen::VectorXcd> finer = detail::propagate_grid(g, v0, times, dt);
        const double diff = (finer.back() - vecs.back()).cwiseAbs().maxCoeff();
        vecs = std::move(finer);
        if (diff < 1e-9) break;
        if (refinement == 11) {
            throw std::runtime_error("evolve: step refinement did not converge");
        }
    }

    Trajectory traj;
    traj.times = times;
    traj.states.reserve(vecs.size());
    for (const auto& v : vecs) {
        traj.states.push_back(DensityMatrix::validated(devectorize(v)));
    }
    traj.generator_fingerprint = generator_fingerprint(g);
    return traj;
}

inline ObservableRecord observables(const DensityMatrix& rho) {
    const Eigen::MatrixXcd& m = rho.matrix();
    ObservableRecord rec;
    rec.populations = m.diagonal().real();
    rec.coherence_12 = m.rows() >= 4 ? m(1, 2) : cplx(0.0, 0.0);
    rec.trace = m.trace().real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    rec.min_eigenvalue = es.eigenvalues().minCoeff();
    return rec;
}

// CSV dump: t, one population column per state, Re/Im of the node-1/2
// coherence, trace, and the smallest eigenvalue.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.states.empty()) return;
    const Eigen::Index d = traj.states.front().dims();
    os << "t";
    for (Eigen::Index k = 0; k < d; ++k) os << ",rho_" << k << k;
    os << ",re_rho_12,im_rho_12,trace,min_eig\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << ',' << buf;
    };
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const ObservableRecord rec = observables(traj.states[i]);
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[i]);
        os << buf;
        for (Eigen::Index k = 0; k < d; ++k) put(rec.populations(k));
        put(rec.coherence_12.real());
        put(rec.coherence_12.imag());
        put(rec.trace);
        put(rec.min_eigenvalue);
        os << '\n';
    }
}

}  // namespace qsw

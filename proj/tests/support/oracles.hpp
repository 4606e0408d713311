// oracles.hpp — Test-only reference implementations
//
// Everything here is deliberately independent of the library's numerical
// paths: the matrix exponential is a plain Taylor series with scaling and
// squaring, and the classical chain is built by hand from the hopping rates.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "qsw/network.hpp"

namespace qsw::testing {

// exp(M) via Taylor series with scaling and squaring; accurate enough for the
// small well-scaled matrices used in tests.
template <typename Matrix>
Matrix expm_taylor(Matrix m) {
    const double norm = m.cwiseAbs().sum();
    int squarings = 0;
    while (norm / std::pow(2.0, squarings) > 0.5) ++squarings;
    m /= std::pow(2.0, squarings);
    Matrix term = Matrix::Identity(m.rows(), m.cols());
    Matrix result = term;
    for (int k = 1; k <= 24; ++k) {
        term = (term * m) / static_cast<double>(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

// Classical 5-state chain for the canonical trimer at alpha = 1 (populations
// only): rates 0 -> {1,2} at Gamma/2 each, 1 <-> 3 and 2 <-> 3 at 1, 3 -> 4 at
// drain rate. Row convention: rate(i -> j) at (i, j), negative row sums on the
// diagonal.
inline Eigen::MatrixXd trimer_classical_rates(double source_rate, double drain_rate) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
    a(0, 1) = source_rate / 2.0;
    a(0, 2) = source_rate / 2.0;
    a(1, 3) = 1.0;
    a(3, 1) = 1.0;
    a(2, 3) = 1.0;
    a(3, 2) = 1.0;
    a(3, 4) = drain_rate;
    for (int i = 0; i < 5; ++i) a(i, i) = -a.row(i).sum();
    return a;
}

// Mean absorption time into `absorbing` starting from `start`: solve
// A_TT h = -1 over the transient states.
inline double classical_mean_absorption(const Eigen::MatrixXd& rates, int absorbing, int start) {
    const int n = static_cast<int>(rates.rows());
    std::vector<int> transient;
    for (int i = 0; i < n; ++i) {
        if (i != absorbing) transient.push_back(i);
    }
    const int m = static_cast<int>(transient.size());
    Eigen::MatrixXd att(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) att(i, j) = rates(transient[i], transient[j]);
    }
    const Eigen::VectorXd h = att.fullPivLu().solve(Eigen::VectorXd::Constant(m, -1.0));
    for (int i = 0; i < m; ++i) {
        if (transient[i] == start) return h(i);
    }
    return 0.0;
}

// p(t) for dp/dt = A^T p from p0.
inline Eigen::VectorXd classical_populations(const Eigen::MatrixXd& rates,
                                             const Eigen::VectorXd& p0, double t) {
    const Eigen::MatrixXd propagator = expm_taylor(Eigen::MatrixXd(rates.transpose() * t));
    return propagator * p0;
}

// Random valid system for property tests; deterministic given the engine state.
struct RandomSystem {
    NetworkSpec spec;
    SourceConfig source;
    DrainConfig drain;
    MixingParams mix;
};

inline RandomSystem random_system(std::mt19937& rng, int max_nodes = 6) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::uniform_int_distribution<int> node_count(2, max_nodes);

    RandomSystem sys;
    const int n = node_count(rng);
    sys.spec.n_nodes = n;
    sys.spec.site_energies.resize(n);
    for (int k = 0; k < n; ++k) sys.spec.site_energies(k) = 2.0 * unit(rng);
    sys.spec.couplings = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
            const double v = unit(rng) < 0.3 ? 0.0 : sym(rng);
            sys.spec.couplings(k, l) = sys.spec.couplings(l, k) = v;
        }
    }
    sys.spec.env_constant = 2.0 * unit(rng);

    std::uniform_int_distribution<int> node_label(1, n);
    const int t1 = node_label(rng);
    int t2 = node_label(rng);
    while (t2 == t1) t2 = node_label(rng);
    sys.source.targets = {t1, t2};
    sys.source.rate = 0.25 + 1.75 * unit(rng);
    sys.source.phase = 2.0 * kPi * unit(rng);
    sys.source.mode = unit(rng) < 0.5 ? SourceMode::Independent : SourceMode::Correlated;

    sys.drain.target = node_label(rng);
    sys.drain.rate = 0.5 + 1.5 * unit(rng);

    sys.mix.alpha = unit(rng);
    sys.mix.dephasing = 2.0 * unit(rng);
    return sys;
}

}  // namespace qsw::testing

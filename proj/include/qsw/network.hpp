// network.hpp — Network Hamiltonian, source/drain attachments, and dark-state analysis
//
// Full-space index convention used throughout: source = 0, network nodes = 1..N,
// drain = N+1. NetworkSpec stores network-only data; 0-based entry k of its
// vectors/matrices describes the node with 1-based label k+1.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsw {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// An eigenvector counts as dark when its drain-node amplitude is below this.
inline constexpr double kDarkOverlapThreshold = 1e-10;

enum class SourceMode { Independent, Correlated };

inline const char* source_mode_name(SourceMode m) {
    return m == SourceMode::Independent ? "independent" : "correlated";
}

// ------------------------------- Domain types --------------------------------

// Closed network: site energies E_k, symmetric couplings V_kl (zero diagonal),
// and the environment constant that sets the incoherent hopping scale.
struct NetworkSpec {
    int n_nodes{0};
    Eigen::VectorXd site_energies;   // length n_nodes
    Eigen::MatrixXd couplings;       // n_nodes x n_nodes, symmetric, zero diagonal
    double env_constant{1.0};        // incoherent rate per coupling squared

    void validate() const {
        if (n_nodes <= 0) {
            throw std::invalid_argument("NetworkSpec: n_nodes must be positive");
        }
        if (site_energies.size() != n_nodes) {
            throw std::invalid_argument("NetworkSpec: site_energies length mismatch");
        }
        if (couplings.rows() != n_nodes || couplings.cols() != n_nodes) {
            throw std::invalid_argument("NetworkSpec: couplings must be n_nodes x n_nodes");
        }
        for (int k = 0; k < n_nodes; ++k) {
            if (couplings(k, k) != 0.0) {
                throw std::invalid_argument("NetworkSpec: couplings diagonal must be zero");
            }
            for (int l = 0; l < n_nodes; ++l) {
                if (couplings(k, l) != couplings(l, k)) {
                    throw std::invalid_argument("NetworkSpec: couplings must be symmetric");
                }
                if (!std::isfinite(couplings(k, l))) {
                    throw std::invalid_argument("NetworkSpec: couplings must be finite");
                }
            }
            if (!std::isfinite(site_energies(k))) {
                throw std::invalid_argument("NetworkSpec: site_energies must be finite");
            }
        }
        if (!(env_constant >= 0.0) || !std::isfinite(env_constant)) {
            throw std::invalid_argument("NetworkSpec: env_constant must be >= 0");
        }
    }
};

// Incoherent injection. Targets are 1-based network-node labels. Independent
// mode feeds each target with its own dissipator at rate/k; Correlated mode
// feeds the superposition (|t1> + e^{i phase}(|t2> + ... + |tk>))/sqrt(k) with
// a single dissipator at the full rate. Only the two-target case is canonical;
// k > 2 is an equal-weight extension.
struct SourceConfig {
    SourceMode mode{SourceMode::Independent};
    std::vector<int> targets;   // 1-based network-node labels
    double rate{0.0};           // total injection rate
    double phase{0.0};          // radians; ignored in Independent mode

    void validate(int n_nodes) const {
        if (targets.empty()) {
            throw std::invalid_argument("SourceConfig: at least one target required");
        }
        for (std::size_t a = 0; a < targets.size(); ++a) {
            if (targets[a] < 1 || targets[a] > n_nodes) {
                throw std::invalid_argument("SourceConfig: target out of range [1, n_nodes]");
            }
            for (std::size_t b = a + 1; b < targets.size(); ++b) {
                if (targets[a] == targets[b]) {
                    throw std::invalid_argument("SourceConfig: targets must be distinct");
                }
            }
        }
        if (!(rate >= 0.0) || !std::isfinite(rate)) {
            throw std::invalid_argument("SourceConfig: rate must be >= 0");
        }
        if (!std::isfinite(phase)) {
            throw std::invalid_argument("SourceConfig: phase must be finite");
        }
    }
};

// Incoherent absorption from one network node into the drain state.
struct DrainConfig {
    int target{0};      // 1-based network-node label
    double rate{0.0};

    void validate(int n_nodes) const {
        if (target < 1 || target > n_nodes) {
            throw std::invalid_argument("DrainConfig: target out of range [1, n_nodes]");
        }
        if (!(rate >= 0.0) || !std::isfinite(rate)) {
            throw std::invalid_argument("DrainConfig: rate must be >= 0");
        }
    }
};

// Quantum-stochastic-walk interpolation weight and the global dephasing rate.
struct MixingParams {
    double alpha{0.0};
    double dephasing{0.0};

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0)) {
            throw std::invalid_argument("MixingParams: alpha must lie in [0, 1]");
        }
        if (!(dephasing >= 0.0) || !std::isfinite(dephasing)) {
            throw std::invalid_argument("MixingParams: dephasing must be >= 0");
        }
    }
};

// Hamiltonian eigenvector with (numerically) no weight on the drained node.
struct DarkState {
    Eigen::VectorXcd amplitudes;   // unit vector over network nodes (0-based)
    double eigenvalue{0.0};
    double drain_overlap{0.0};
};

// Network plus its attachments; the unit most operations consume.
struct NetworkSystem {
    NetworkSpec network;
    SourceConfig source;
    DrainConfig drain;
};

// -------------------------------- Operations ---------------------------------

// Canonical V-shaped trimer: E = (1,1,1), V13 = V23 = 1, V12 = 0, env constant 1,
// source feeding nodes {1,2}, drain at node 3.
inline NetworkSystem trimer_paper(double source_rate, double drain_rate) {
    if (!(source_rate >= 0.0) || !(drain_rate >= 0.0)) {
        throw std::invalid_argument("trimer_paper: rates must be >= 0");
    }
    NetworkSystem sys;
    sys.network.n_nodes = 3;
    sys.network.site_energies = Eigen::Vector3d::Ones();
    sys.network.couplings = Eigen::Matrix3d::Zero();
    sys.network.couplings(0, 2) = sys.network.couplings(2, 0) = 1.0;
    sys.network.couplings(1, 2) = sys.network.couplings(2, 1) = 1.0;
    sys.network.env_constant = 1.0;
    sys.source = SourceConfig{SourceMode::Independent, {1, 2}, source_rate, 0.0};
    sys.drain = DrainConfig{3, drain_rate};
    return sys;
}

// Network-only Hamiltonian: H(k,k) = E_k, H(k,l) = V_kl. Exactly Hermitian
// because the inputs are real and symmetric.
inline Eigen::MatrixXcd hamiltonian(const NetworkSpec& spec) {
    spec.validate();
    Eigen::MatrixXcd h = spec.couplings.cast<cplx>();
    h.diagonal() = spec.site_energies.cast<cplx>();
    return h;
}

// Incoherent hopping rates from the golden-rule estimate: env_constant * |V_kl|^2
// off the diagonal, zero on it (global dephasing is handled via MixingParams).
inline Eigen::MatrixXd incoherent_rates(const NetworkSpec& spec) {
    spec.validate();
    Eigen::MatrixXd rates = spec.env_constant * spec.couplings.cwiseAbs2();
    rates.diagonal().setZero();
    return rates;
}

// State injected by a correlated source, as a unit vector over network nodes.
inline Eigen::VectorXcd source_state(const SourceConfig& src, int n_nodes) {
    src.validate(n_nodes);
    if (src.mode != SourceMode::Correlated) {
        throw std::invalid_argument(
            "source_state: an independent source injects no single state");
    }
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n_nodes);
    const double w = 1.0 / std::sqrt(static_cast<double>(src.targets.size()));
    psi(src.targets[0] - 1) = w;
    const cplx ph = std::polar(1.0, src.phase);
    for (std::size_t a = 1; a < src.targets.size(); ++a) {
        psi(src.targets[a] - 1) = w * ph;
    }
    return psi;
}

namespace detail {

// First nonzero amplitude made real and positive; keeps outputs deterministic.
inline void fix_phase(Eigen::VectorXcd& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (std::abs(v(k)) > 1e-12) {
            v *= std::conj(v(k)) / std::abs(v(k));
            return;
        }
    }
}

// Orders phase-fixed vectors so that support on earlier nodes sorts first
// (|1> before |2>): larger real part wins at the first differing component.
inline bool lex_less(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        if (a(k).real() != b(k).real()) return a(k).real() > b(k).real();
        if (a(k).imag() != b(k).imag()) return a(k).imag() > b(k).imag();
    }
    return false;
}

}  // namespace detail

// All Hamiltonian eigenvectors with |<drain|v>| below the dark threshold.
// Degenerate eigenspaces are re-diagonalized against the drain coordinate so
// dark combinations are found even when the raw solver returns mixed vectors.
// Deterministic: sorted by eigenvalue (then lexicographically), first nonzero
// amplitude real positive.
inline std::vector<DarkState> dark_states(const NetworkSpec& spec, const DrainConfig& drain) {
    spec.validate();
    drain.validate(spec.n_nodes);
    const Eigen::MatrixXcd h = hamiltonian(spec);
    const int n = spec.n_nodes;
    const int drain_row = drain.target - 1;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("dark_states: eigendecomposition failed");
    }
    const Eigen::VectorXd evals = es.eigenvalues();
    const Eigen::MatrixXcd evecs = es.eigenvectors();

    // Grouping tolerance sits well below the eigenvector-residual budget so that
    // only true (roundoff-level) degeneracies are merged.
    const double scale = std::max(h.norm(), 1e-300);
    const double group_tol = 1e-11 * scale;

    std::vector<DarkState> out;
    auto push = [&](Eigen::VectorXcd v, double eigenvalue) {
        v.normalize();
        detail::fix_phase(v);
        out.push_back(DarkState{std::move(v), eigenvalue, 0.0});
        out.back().drain_overlap = std::abs(out.back().amplitudes(drain_row));
    };

    for (int a = 0; a < n;) {
        int b = a + 1;
        while (b < n && evals(b) - evals(a) <= group_tol) ++b;
        const int g = b - a;
        const double mean_eval = evals.segment(a, g).mean();
        const Eigen::MatrixXcd sub = evecs.middleCols(a, g);
        const Eigen::RowVectorXcd r = sub.row(drain_row);
        if (g == 1) {
            if (std::abs(r(0)) < kDarkOverlapThreshold) push(sub.col(0), evals(a));
        } else if (r.norm() < kDarkOverlapThreshold) {
            for (int j = 0; j < g; ++j) push(sub.col(j), mean_eval);
        } else {
            // Orthonormal basis of the drain-free directions inside the subspace:
            // project identity columns off u = r^dagger and Gram-Schmidt them.
            const Eigen::VectorXcd u = r.adjoint() / r.norm();
            std::vector<Eigen::VectorXcd> basis;
            for (int j = 0; j < g; ++j) {
                Eigen::VectorXcd w = Eigen::VectorXcd::Zero(g);
                w(j) = 1.0;
                w -= u * (u.dot(w));
                for (const auto& prev : basis) w -= prev * (prev.dot(w));
                if (w.norm() > 1e-6) {
                    w.normalize();
                    basis.push_back(w);
                }
            }
            for (const auto& w : basis) push(sub * w, mean_eval);
        }
        a = b;
    }

    std::sort(out.begin(), out.end(), [](const DarkState& x, const DarkState& y) {
        if (x.eigenvalue != y.eigenvalue) return x.eigenvalue < y.eigenvalue;
        return detail::lex_less(x.amplitudes, y.amplitudes);
    });
    return out;
}

// |<D|psi>| for a correlated source state against a dark state.
inline double dark_overlap(const SourceConfig& src, const DarkState& d) {
    const int n = static_cast<int>(d.amplitudes.size());
    const Eigen::VectorXcd psi = source_state(src, n);  // rejects Independent mode
    return std::abs(d.amplitudes.dot(psi));
}

// Compact human-readable ket, e.g. "|1>-|2>" or "0.58|1>+0.58|2>+0.58|3>".
// Node labels are 1-based.
inline std::string ket_string(const Eigen::VectorXcd& amps) {
    double amax = 0.0;
    for (Eigen::Index k = 0; k < amps.size(); ++k) amax = std::max(amax, std::abs(amps(k)));
    if (amax <= 0.0) return "0";
    bool integral = true;
    for (Eigen::Index k = 0; k < amps.size(); ++k) {
        const cplx s = amps(k) / amax;
        if (std::abs(s.imag()) > 1e-9) integral = false;
        const double re = std::abs(s.real());
        if (re > 1e-9 && std::abs(re - 1.0) > 1e-9) integral = false;
    }
    std::string txt;
    for (Eigen::Index k = 0; k < amps.size(); ++k) {
        const cplx a = amps(k);
        if (std::abs(a) <= 1e-9 * amax) continue;
        if (integral) {
            const bool neg = a.real() < 0.0;
            if (!txt.empty() || neg) txt += neg ? "-" : "+";
        } else {
            char buf[48];
            if (std::abs(a.imag()) > 1e-9) {
                std::snprintf(buf, sizeof buf, "+(%.3g%+.3gi)", a.real(), a.imag());
            } else {
                std::snprintf(buf, sizeof buf, "%+.3g", a.real());
            }
            txt += buf;
        }
        txt += "|" + std::to_string(k + 1) + ">";
    }
    return txt;
}

}  // namespace qsw

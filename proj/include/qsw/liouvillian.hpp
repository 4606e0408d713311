// liouvillian.hpp — Vectorized generator of the master equation
//
// Superoperators act on column-stacked density matrices: entry (r,c) of a
// d x d matrix maps to vector index c*d + r. All formulas below are written
// for that convention.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "qsw/network.hpp"

namespace qsw {

// ------------------------------ Vectorization --------------------------------

inline Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("vectorize: matrix must be square");
    }
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

inline Eigen::MatrixXcd devectorize(const Eigen::VectorXcd& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
    if (d * d != v.size()) {
        throw std::invalid_argument("devectorize: length is not a perfect square");
    }
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// ------------------------------- Domain types --------------------------------

struct JumpOperator {
    Eigen::MatrixXcd matrix;   // full-space (N+2) x (N+2)
    double rate{0.0};
};

struct GeneratorMeta {
    MixingParams mix;
    double source_rate{0.0};
    double drain_rate{0.0};
    double phase{0.0};
    SourceMode mode{SourceMode::Independent};
};

// Full vectorized generator. The drain population lives at the last vectorized
// coordinate, dims^2 - 1; its column is identically zero (absorbing state).
struct Generator {
    Eigen::MatrixXcd matrix;   // dims^2 x dims^2
    int dims{0};               // N + 2
    GeneratorMeta meta;

    Eigen::Index drain_population_index() const {
        return static_cast<Eigen::Index>(dims) * dims - 1;
    }
};

// Hermitian, unit-trace, positive-semidefinite state over {source, nodes, drain}.
class DensityMatrix {
public:
    static constexpr double kHermitianTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kMinEigenvalue = -1e-9;

    static DensityMatrix validated(Eigen::MatrixXcd m) {
        if (m.rows() != m.cols() || m.rows() == 0) {
            throw std::invalid_argument("DensityMatrix: matrix must be square");
        }
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
            throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
        }
        if (std::abs(m.trace().real() - 1.0) > kTraceTol || std::abs(m.trace().imag()) > kTraceTol) {
            throw std::invalid_argument("DensityMatrix: trace must be 1 within tolerance");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < kMinEigenvalue) {
            throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
        }
        return DensityMatrix(std::move(m));
    }

    // Excitation sitting in the source node: |0><0| on a dims-dimensional space.
    static DensityMatrix source_seed(int dims) {
        if (dims <= 0) throw std::invalid_argument("DensityMatrix: dims must be positive");
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dims, dims);
        m(0, 0) = 1.0;
        return DensityMatrix(std::move(m));
    }

    static DensityMatrix pure(const Eigen::VectorXcd& state) {
        const double nrm = state.norm();
        if (nrm <= 0.0) throw std::invalid_argument("DensityMatrix: zero state vector");
        const Eigen::VectorXcd s = state / nrm;
        return DensityMatrix(s * s.adjoint());
    }

    const Eigen::MatrixXcd& matrix() const { return m_; }
    Eigen::Index dims() const { return m_.rows(); }

private:
    explicit DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {}
    Eigen::MatrixXcd m_;
};

// ------------------------------ Superoperators -------------------------------

// rate * ( conj(L) ⊗ L  -  1/2 I ⊗ L†L  -  1/2 (L†L)ᵀ ⊗ I ); acting on vec(rho)
// this reproduces rate * ( L rho L† - 1/2 {L†L, rho} ).
inline Eigen::MatrixXcd dissipator_superop(const JumpOperator& op) {
    if (op.rate < 0.0 || !std::isfinite(op.rate)) {
        throw std::invalid_argument("dissipator_superop: rate must be >= 0");
    }
    if (op.matrix.rows() != op.matrix.cols()) {
        throw std::invalid_argument("dissipator_superop: jump operator must be square");
    }
    const Eigen::Index d = op.matrix.rows();
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(d, d);
    const Eigen::MatrixXcd ldl = op.matrix.adjoint() * op.matrix;
    return op.rate * (kron(op.matrix.conjugate(), op.matrix)
                      - 0.5 * kron(eye, ldl)
                      - 0.5 * kron(ldl.transpose(), eye));
}

// -i [H, .] as a superoperator: -i ( I ⊗ H - Hᵀ ⊗ I ).
inline Eigen::MatrixXcd commutator_superop(const Eigen::MatrixXcd& h) {
    if (h.rows() != h.cols()) {
        throw std::invalid_argument("commutator_superop: Hamiltonian must be square");
    }
    const Eigen::Index d = h.rows();
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(d, d);
    return cplx(0.0, -1.0) * (kron(eye, h) - kron(h.transpose(), eye));
}

// Full generator:
//   (1-alpha) * coherent commutator (network Hamiltonian embedded at nodes 1..N)
// + alpha     * [ incoherent hopping at the golden-rule rates
//               + global dephasing on every network node ]
// + source dissipator(s) at full rate
// + drain dissipator at full rate.
// Source and drain are not scaled by alpha: the interpolation applies to the
// network dynamics only, and the alpha = 1 endpoint then reduces to the
// classical chain with mean absorption time 4 + 1/Gamma on the canonical trimer.
inline Generator assemble_generator(const NetworkSpec& spec, const SourceConfig& src,
                                    const DrainConfig& drn, const MixingParams& mix) {
    spec.validate();
    src.validate(spec.n_nodes);
    drn.validate(spec.n_nodes);
    mix.validate();

    const int n = spec.n_nodes;
    const int dims = n + 2;
    const double alpha = mix.alpha;

    Eigen::MatrixXcd h_full = Eigen::MatrixXcd::Zero(dims, dims);
    h_full.block(1, 1, n, n) = hamiltonian(spec);
    Eigen::MatrixXcd gen = (1.0 - alpha) * commutator_superop(h_full);

    auto unit_jump = [dims](int row, int col) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dims, dims);
        m(row, col) = 1.0;
        return m;
    };

    const Eigen::MatrixXd hop = incoherent_rates(spec);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            if (k != l && hop(k, l) > 0.0) {
                gen += alpha * dissipator_superop({unit_jump(k + 1, l + 1), hop(k, l)});
            }
        }
        if (mix.dephasing > 0.0) {
            gen += alpha * dissipator_superop({unit_jump(k + 1, k + 1), mix.dephasing});
        }
    }

    if (src.rate > 0.0) {
        if (src.mode == SourceMode::Independent) {
            const double each = src.rate / static_cast<double>(src.targets.size());
            for (int t : src.targets) {
                gen += dissipator_superop({unit_jump(t, 0), each});
            }
        } else {
            const Eigen::VectorXcd psi_net = source_state(src, n);
            Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dims);
            psi.segment(1, n) = psi_net;
            Eigen::MatrixXcd jump = Eigen::MatrixXcd::Zero(dims, dims);
            jump.col(0) = psi;
            gen += dissipator_superop({std::move(jump), src.rate});
        }
    }
    if (drn.rate > 0.0) {
        gen += dissipator_superop({unit_jump(n + 1, drn.target), drn.rate});
    }

    return Generator{std::move(gen), dims,
                     GeneratorMeta{mix, src.rate, drn.rate, src.phase, src.mode}};
}

inline Generator assemble_generator(const NetworkSystem& sys, const MixingParams& mix) {
    return assemble_generator(sys.network, sys.source, sys.drain, mix);
}

}  // namespace qsw

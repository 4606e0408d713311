#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "qsw/network.hpp"

using namespace qsw;
using Catch::Matchers::WithinAbs;

TEST_CASE("trimer_paper returns the canonical instance") {
    const NetworkSystem sys = trimer_paper(0.5, 1.0);
    REQUIRE(sys.network.n_nodes == 3);
    CHECK(sys.network.site_energies.isApproxToConstant(1.0, 0.0));
    CHECK(sys.network.couplings(0, 2) == 1.0);
    CHECK(sys.network.couplings(1, 2) == 1.0);
    CHECK(sys.network.couplings(0, 1) == 0.0);
    CHECK(sys.network.env_constant == 1.0);
    CHECK(sys.source.targets == std::vector<int>{1, 2});
    CHECK(sys.source.rate == 0.5);
    CHECK(sys.drain.target == 3);
    CHECK(sys.drain.rate == 1.0);

    SECTION("zero source rate is a valid boundary") {
        const NetworkSystem idle = trimer_paper(0.0, 1.0);
        CHECK(idle.source.rate == 0.0);
        CHECK_NOTHROW(idle.source.validate(3));
    }
    SECTION("negative rates rejected") {
        CHECK_THROWS_AS(trimer_paper(-0.1, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(trimer_paper(0.5, -1.0), std::invalid_argument);
    }
}

TEST_CASE("hamiltonian matches the site/coupling layout") {
    const NetworkSystem sys = trimer_paper(0.5, 1.0);
    const Eigen::MatrixXcd h = hamiltonian(sys.network);
    Eigen::MatrixXcd expected(3, 3);
    expected << 1, 0, 1, 0, 1, 1, 1, 1, 1;
    CHECK((h - expected).cwiseAbs().maxCoeff() == 0.0);

    SECTION("the antisymmetric combination is an exact eigenvector") {
        Eigen::Vector3cd dark(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0);
        const Eigen::Vector3cd hd = h * dark;
        CHECK((hd - dark).cwiseAbs().maxCoeff() == 0.0);  // eigenvalue exactly 1
    }

    SECTION("all-zero spec gives the zero matrix") {
        NetworkSpec zero;
        zero.n_nodes = 3;
        zero.site_energies = Eigen::Vector3d::Zero();
        zero.couplings = Eigen::Matrix3d::Zero();
        zero.env_constant = 0.0;
        CHECK(hamiltonian(zero).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("random real symmetric specs are exactly Hermitian") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> dist(-2.0, 2.0);
        for (int trial = 0; trial < 20; ++trial) {
            NetworkSpec spec;
            spec.n_nodes = 5;
            spec.site_energies.resize(5);
            spec.couplings = Eigen::MatrixXd::Zero(5, 5);
            for (int k = 0; k < 5; ++k) {
                spec.site_energies(k) = dist(rng);
                for (int l = k + 1; l < 5; ++l) {
                    spec.couplings(k, l) = spec.couplings(l, k) = dist(rng);
                }
            }
            const Eigen::MatrixXcd hh = hamiltonian(spec);
            CHECK((hh - hh.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("incoherent_rates applies the golden-rule scaling") {
    NetworkSystem sys = trimer_paper(0.5, 1.0);
    const Eigen::MatrixXd rates = incoherent_rates(sys.network);
    CHECK(rates(0, 2) == 1.0);
    CHECK(rates(2, 0) == 1.0);
    CHECK(rates(1, 2) == 1.0);
    CHECK(rates(2, 1) == 1.0);
    CHECK(rates(0, 1) == 0.0);
    CHECK(rates.diagonal().cwiseAbs().maxCoeff() == 0.0);

    SECTION("zero environment constant kills all rates") {
        sys.network.env_constant = 0.0;
        CHECK(incoherent_rates(sys.network).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("direct formula check") {
        NetworkSpec spec;
        spec.n_nodes = 2;
        spec.site_energies = Eigen::Vector2d::Zero();
        spec.couplings = Eigen::Matrix2d::Zero();
        spec.couplings(0, 1) = spec.couplings(1, 0) = 2.0;
        spec.env_constant = 0.5;
        CHECK(incoherent_rates(spec)(0, 1) == 2.0);
    }
}

TEST_CASE("source_state builds the correlated superposition") {
    SourceConfig src{SourceMode::Correlated, {1, 2}, 0.5, 0.0};
    const double isq2 = 1.0 / std::sqrt(2.0);

    SECTION("phi = 0") {
        const Eigen::VectorXcd psi = source_state(src, 3);
        CHECK_THAT(std::abs(psi(0) - cplx(isq2, 0)), WithinAbs(0.0, 1e-15));
        CHECK_THAT(std::abs(psi(1) - cplx(isq2, 0)), WithinAbs(0.0, 1e-15));
        CHECK(psi(2) == cplx(0, 0));
    }
    SECTION("phi = pi gives the dark combination") {
        src.phase = kPi;
        const Eigen::VectorXcd psi = source_state(src, 3);
        CHECK_THAT(std::abs(psi(1) + cplx(isq2, 0)), WithinAbs(0.0, 1e-15));
    }
    SECTION("phi = pi/2") {
        src.phase = kPi / 2.0;
        const Eigen::VectorXcd psi = source_state(src, 3);
        CHECK_THAT(std::abs(psi(1) - cplx(0, isq2)), WithinAbs(0.0, 1e-15));
    }
    SECTION("unit norm for random phases") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> dist(0.0, 2.0 * kPi);
        for (int trial = 0; trial < 50; ++trial) {
            src.phase = dist(rng);
            CHECK_THAT(source_state(src, 3).norm(), WithinAbs(1.0, 1e-14));
        }
    }
    SECTION("independent mode rejected") {
        src.mode = SourceMode::Independent;
        CHECK_THROWS_AS(source_state(src, 3), std::invalid_argument);
    }
}

TEST_CASE("dark_states on the canonical trimer") {
    const NetworkSystem sys = trimer_paper(0.5, 1.0);
    const auto dark = dark_states(sys.network, sys.drain);
    REQUIRE(dark.size() == 1);
    CHECK_THAT(dark[0].eigenvalue, WithinAbs(1.0, 1e-12));
    CHECK(dark[0].drain_overlap < kDarkOverlapThreshold);
    const double isq2 = 1.0 / std::sqrt(2.0);
    CHECK_THAT(std::abs(dark[0].amplitudes(0) - cplx(isq2, 0)), WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(dark[0].amplitudes(1) + cplx(isq2, 0)), WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(dark[0].amplitudes(2)), WithinAbs(0.0, 1e-12));

    SECTION("eigen-residual invariant") {
        const Eigen::MatrixXcd h = hamiltonian(sys.network);
        const double resid = (h * dark[0].amplitudes - dark[0].eigenvalue * dark[0].amplitudes).norm();
        CHECK(resid <= 1e-10 * h.norm());
    }
}

TEST_CASE("detuning node 2 removes the dark state") {
    NetworkSystem sys = trimer_paper(0.5, 1.0);
    sys.network.site_energies(1) = 2.0;
    CHECK(dark_states(sys.network, sys.drain).empty());

    // Brute-force check: every eigenvector keeps weight on the drained node.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian(sys.network));
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(es.eigenvectors()(2, k)) > 0.05);
    }
}

TEST_CASE("decoupled nodes are all dark; degenerate subspaces are handled") {
    NetworkSpec spec;
    spec.n_nodes = 3;
    spec.couplings = Eigen::Matrix3d::Zero();
    spec.env_constant = 1.0;
    const DrainConfig drain{3, 1.0};

    SECTION("distinct energies") {
        spec.site_energies = Eigen::Vector3d(0.5, 1.5, 2.5);
        const auto dark = dark_states(spec, drain);
        REQUIRE(dark.size() == 2);
        CHECK(std::abs(dark[0].amplitudes(0) - cplx(1, 0)) < 1e-12);
        CHECK(std::abs(dark[1].amplitudes(1) - cplx(1, 0)) < 1e-12);
    }

    SECTION("fully degenerate energies (subspace re-diagonalization)") {
        spec.site_energies = Eigen::Vector3d::Ones();
        const auto dark = dark_states(spec, drain);
        REQUIRE(dark.size() == 2);
        for (const auto& d : dark) {
            CHECK(d.drain_overlap < kDarkOverlapThreshold);
            CHECK_THAT(d.eigenvalue, WithinAbs(1.0, 1e-12));
            CHECK_THAT(d.amplitudes.norm(), WithinAbs(1.0, 1e-13));
        }
        // Deterministic output: |1> then |2>.
        CHECK(std::abs(dark[0].amplitudes(0) - cplx(1, 0)) < 1e-12);
        CHECK(std::abs(dark[1].amplitudes(1) - cplx(1, 0)) < 1e-12);
    }

    SECTION("four-node degenerate subspace with an interior drain") {
        NetworkSpec four;
        four.n_nodes = 4;
        four.site_energies = Eigen::Vector4d::Ones();
        four.couplings = Eigen::MatrixXd::Zero(4, 4);
        four.env_constant = 1.0;
        const auto dark = dark_states(four, DrainConfig{2, 1.0});
        REQUIRE(dark.size() == 3);
        CHECK(std::abs(dark[0].amplitudes(0) - cplx(1, 0)) < 1e-12);
        CHECK(std::abs(dark[1].amplitudes(2) - cplx(1, 0)) < 1e-12);
        CHECK(std::abs(dark[2].amplitudes(3) - cplx(1, 0)) < 1e-12);
        for (const auto& d : dark) CHECK(d.drain_overlap < kDarkOverlapThreshold);
    }
}

TEST_CASE("dark_overlap closed form |1 - e^{i phi}| / 2") {
    const NetworkSystem sys = trimer_paper(0.5, 1.0);
    const auto dark = dark_states(sys.network, sys.drain);
    REQUIRE(dark.size() == 1);

    SourceConfig src{SourceMode::Correlated, {1, 2}, 0.5, 0.0};
    CHECK_THAT(dark_overlap(src, dark[0]), WithinAbs(0.0, 1e-14));
    src.phase = kPi;
    CHECK_THAT(dark_overlap(src, dark[0]), WithinAbs(1.0, 1e-14));
    src.phase = kPi / 2.0;
    CHECK_THAT(dark_overlap(src, dark[0]), WithinAbs(1.0 / std::sqrt(2.0), 1e-14));

    SECTION("whole phi grid") {
        for (int i = 0; i <= 32; ++i) {
            src.phase = 2.0 * kPi * i / 32.0;
            const double expected = std::abs(1.0 - std::polar(1.0, src.phase)) / 2.0;
            CHECK_THAT(dark_overlap(src, dark[0]), WithinAbs(expected, 1e-13));
        }
    }
    SECTION("independent mode rejected") {
        src.mode = SourceMode::Independent;
        CHECK_THROWS_AS(dark_overlap(src, dark[0]), std::invalid_argument);
    }
}

TEST_CASE("spec validation catches malformed inputs") {
    NetworkSystem sys = trimer_paper(0.5, 1.0);

    SECTION("asymmetric couplings") {
        sys.network.couplings(0, 1) = 0.5;
        CHECK_THROWS_AS(sys.network.validate(), std::invalid_argument);
    }
    SECTION("nonzero diagonal") {
        sys.network.couplings(1, 1) = 0.25;
        CHECK_THROWS_AS(sys.network.validate(), std::invalid_argument);
    }
    SECTION("negative environment constant") {
        sys.network.env_constant = -1.0;
        CHECK_THROWS_AS(sys.network.validate(), std::invalid_argument);
    }
    SECTION("duplicate source targets") {
        sys.source.targets = {1, 1};
        CHECK_THROWS_AS(sys.source.validate(3), std::invalid_argument);
    }
    SECTION("out-of-range drain") {
        sys.drain.target = 4;
        CHECK_THROWS_AS(sys.drain.validate(3), std::invalid_argument);
    }
    SECTION("mixing bounds") {
        CHECK_THROWS_AS(MixingParams{-0.1, 0.0}.validate(), std::invalid_argument);
        CHECK_THROWS_AS(MixingParams{1.1, 0.0}.validate(), std::invalid_argument);
        CHECK_THROWS_AS(MixingParams{0.5, -1.0}.validate(), std::invalid_argument);
    }
}

TEST_CASE("ket_string renders compact amplitude patterns") {
    Eigen::VectorXcd v(3);
    v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
    CHECK(ket_string(v) == "|1>-|2>");
    v << 1.0, 0.0, 0.0;
    CHECK(ket_string(v) == "|1>");
}

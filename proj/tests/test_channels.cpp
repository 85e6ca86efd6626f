// Copyright 2026 The cssmetro Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cssmetro/channels.hpp"
#include "cssmetro/error.hpp"
#include "cssmetro/metrology.hpp"
#include "cssmetro/oracle.hpp"
#include "test_support.hpp"

using namespace cssmetro;

namespace {

ComplexMatrix random_hermitian(std::mt19937_64 &rng, int n) {
    std::normal_distribution<double> g;
    const Eigen::Index d = Eigen::Index{1} << n;
    ComplexMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
    }
    return (a + a.adjoint()) / 2.0;
}

DensityMatrix random_state(std::mt19937_64 &rng, int n) {
    const ComplexMatrix h = random_hermitian(rng, n);
    ComplexMatrix rho = h * h.adjoint();
    rho /= rho.trace();
    return DensityMatrix(rho, n);
}

// u applied on every qubit in `support`, identity elsewhere.
ComplexMatrix kron_on(const ComplexMatrix &u, std::uint32_t support, int n) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < n; ++q) {
        const ComplexMatrix f = (support >> (n - 1 - q)) & 1u ? u : ComplexMatrix::Identity(2, 2);
        ComplexMatrix next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * f;
        }
        out = next;
    }
    return out;
}

// Error map written as an explicit sum over error supports.
ComplexMatrix pauli_sum_error_map(const ComplexMatrix &rho, const ComplexMatrix &u, double rate, int n) {
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (std::uint32_t e = 0; e < (1u << n); ++e) {
        const int k = std::popcount(e);
        const ComplexMatrix ue = kron_on(u, e, n);
        out += std::pow(rate, k) * std::pow(1.0 - rate, n - k) * ue * rho * ue.adjoint();
    }
    return out;
}

ComplexMatrix reference_generator(const ComplexMatrix &rho, const ChannelSpec &spec, int n) {
    const ComplexMatrix h = oracle::kron_hamiltonian(n);
    ComplexMatrix z(2, 2), x(2, 2);
    z << 1, 0, 0, -1;
    x << 0, 1, 1, 0;
    const double c = std::cos(spec.phi / 2.0), s = std::sin(spec.phi / 2.0);
    ComplexMatrix phi;
    switch (spec.kind) {
        case ChannelKind::Dephasing: phi = pauli_sum_error_map(rho, z, spec.rate(), n); break;
        case ChannelKind::BitFlip: phi = pauli_sum_error_map(rho, x, spec.rate(), n); break;
        case ChannelKind::Mixed: phi = pauli_sum_error_map(rho, c * z + s * x, spec.rate(), n); break;
        default:
            phi = c * c * pauli_sum_error_map(rho, z, spec.rate(), n) +
                  s * s * pauli_sum_error_map(rho, x, spec.rate(), n);
    }
    return Complex(0.0, -spec.theta) * (h * rho - rho * h) - rho + phi;
}

}  // namespace

TEST_CASE("channel names round trip") {
    for (ChannelKind k : {ChannelKind::Dephasing, ChannelKind::BitFlip, ChannelKind::Mixed, ChannelKind::Mixture}) {
        CHECK(parse_channel_kind(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_channel_kind("amplitude"), Error);
}

TEST_CASE("channel spec validation") {
    ChannelSpec spec;
    CHECK_NOTHROW(spec.validate(3));
    spec.p = -0.1;
    CHECK_THROWS_AS(spec.validate(3), Error);
    spec = {};
    spec.p = 10.0;
    spec.theta = 0.2;
    CHECK_THROWS_AS(spec.validate(3), Error);
    spec = {};
    spec.kind = ChannelKind::Mixed;
    spec.phi = 4.0;
    CHECK_THROWS_AS(spec.validate(3), Error);
    spec = {};
    spec.kind = ChannelKind::FixedWeightZ;
    spec.weight = 4;
    CHECK_THROWS_AS(spec.validate(3), Error);
}

TEST_CASE("generators match the explicit error-support sum") {
    std::mt19937_64 rng(5);
    for (ChannelKind kind : {ChannelKind::Dephasing, ChannelKind::BitFlip, ChannelKind::Mixed, ChannelKind::Mixture}) {
        for (int n = 1; n <= 4; ++n) {
            ChannelSpec spec{kind, 0.3, 0.7, 1.1, 0};
            const ComplexMatrix rho = random_hermitian(rng, n);
            const Lindbladian l(spec, n);
            const ComplexMatrix want = reference_generator(rho, spec, n);
            CHECK((l(rho) - want).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((l.signal(rho) + l.dissipator(rho) - want).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("named generators dispatch on the channel kind") {
    std::mt19937_64 rng(9);
    const DensityMatrix rho = random_state(rng, 3);
    ChannelSpec spec{ChannelKind::BitFlip, 0.2, 0.1, 0.0, 0};
    CHECK((bitflip_generator(rho, spec, 3) - reference_generator(rho.matrix(), spec, 3)).norm() < 1e-12);
    CHECK_THROWS_AS(dephasing_generator(rho, spec, 3), Error);
    CHECK_THROWS_AS(bitflip_generator(rho, spec, 4), Error);
    // Trace preservation.
    for (ChannelKind kind : {ChannelKind::Dephasing, ChannelKind::BitFlip, ChannelKind::Mixed, ChannelKind::Mixture}) {
        spec.kind = kind;
        spec.phi = 0.4;
        CHECK(std::abs(Lindbladian(spec, 3)(rho.matrix()).trace()) < 1e-13);
    }
}

TEST_CASE("mixed channel endpoints reduce to dephasing and bit-flip") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 4;
        const DensityMatrix rho = random_state(rng, n);
        ChannelSpec mixed{ChannelKind::Mixed, 0.05, 1e-3, 0.0, 0};
        ChannelSpec deph{ChannelKind::Dephasing, 0.05, 1e-3, 0.0, 0};
        ChannelSpec flip{ChannelKind::BitFlip, 0.05, 1e-3, 0.0, 0};
        CHECK((mixed_generator(rho, mixed, n) - dephasing_generator(rho, deph, n)).cwiseAbs().maxCoeff() <= 1e-12);
        mixed.phi = std::numbers::pi;
        CHECK((mixed_generator(rho, mixed, n) - bitflip_generator(rho, flip, n)).cwiseAbs().maxCoeff() <= 1e-12);
        ChannelSpec mixture{ChannelKind::Mixture, 0.05, 1e-3, 0.0, 0};
        CHECK((mixture_generator(rho, mixture, n) - dephasing_generator(rho, deph, n)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("fixed-weight Z map averages over supports") {
    std::mt19937_64 rng(3);
    const int n = 4;
    const DensityMatrix rho = random_state(rng, n);
    for (int w = 0; w <= n; ++w) {
        ComplexMatrix want = ComplexMatrix::Zero(16, 16);
        int count = 0;
        for (std::uint32_t s = 0; s < 16; ++s) {
            if (std::popcount(s) != w) continue;
            const ComplexMatrix z = oracle::kron_z_string(BitVector(s, n));
            want += z * rho.matrix() * z;
            ++count;
        }
        want /= count;
        CHECK((fixed_weight_z_map(rho, w).matrix() - want).norm() < 1e-12);
    }
    CHECK_THROWS_AS(fixed_weight_z_map(rho, 5), Error);
}

TEST_CASE("integrated GHZ dephasing follows the damped cosine") {
    SimulationConfig config;
    config.code = codes::repetition(3);
    config.channel = {ChannelKind::Dephasing, 0.5, 0.05, 0.0, 0};
    config.t_max = 20.0;
    config.dt = 0.01;
    config.sample_every = 10;
    const Trajectory traj = evolve(config);
    REQUIRE(traj.size() == 201);
    CHECK(traj.stats.steps == 2000);
    const double gamma = 1.0 - std::pow(1.0 - 2.0 * 0.025, 3);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        const double want = 0.5 * (std::exp(-gamma * t) * std::cos(6.0 * 0.05 * t) + 1.0);
        worst = std::max(worst, std::abs(traj.probabilities[i] - want));
    }
    CHECK(worst < 1e-9);
    CHECK(traj.stats.max_trace_drift <= 1e-12);
    CHECK(traj.stats.min_eigenvalue >= -1e-12);
    CHECK(gamma == Catch::Approx(gamma_dephasing(codes::repetition(3), 0.5, 0.05)).epsilon(1e-12));
}

TEST_CASE("evolve rejects bad configurations") {
    SimulationConfig config;
    config.code = codes::repetition(3);
    config.channel.theta = 0.5;
    config.channel.p = 1.0;
    config.t_max = 100.0;
    config.dt = 5.0;
    try {
        evolve(config);
        FAIL("large step accepted");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::StepSize);
    }
    config.dt = 0.0;
    CHECK_THROWS_AS(evolve(config), Error);
    config.dt = 0.1;
    config.sample_every = 0;
    CHECK_THROWS_AS(evolve(config), Error);
    config.sample_every = 1;
    config.channel.kind = ChannelKind::FixedWeightZ;
    CHECK_THROWS_AS(evolve(config), Error);
}

TEST_CASE("binomial resampling is seeded") {
    Trajectory traj;
    for (int i = 0; i < 50; ++i) {
        traj.times.push_back(i);
        traj.probabilities.push_back(0.3);
    }
    const Trajectory a = sample_copies(traj, 1000, 42);
    const Trajectory b = sample_copies(traj, 1000, 42);
    const Trajectory c = sample_copies(traj, 1000, 43);
    CHECK(a.probabilities == b.probabilities);
    CHECK(a.probabilities != c.probabilities);
    double mean = 0.0;
    for (double p : a.probabilities) mean += p / 50.0;
    CHECK(mean == Catch::Approx(0.3).margin(0.01));
    CHECK(sample_copies(traj, 0, 1).probabilities == traj.probabilities);
}

TEST_CASE("trajectory CSV round trip") {
    Trajectory traj;
    traj.times = {0.0, 0.5, 1.0};
    traj.probabilities = {1.0, 0.75, 0.123456789012345678};
    std::stringstream buffer;
    write_trajectory_csv(buffer, traj);
    const Trajectory back = read_trajectory_csv(buffer);
    CHECK(back.times == traj.times);
    CHECK(back.probabilities == traj.probabilities);

    std::stringstream with_model;
    const std::vector<double> model{1.0, 0.7, 0.1};
    write_trajectory_csv(with_model, traj, &model);
    const Trajectory back2 = read_trajectory_csv(with_model);
    CHECK(back2.probabilities == traj.probabilities);

    std::stringstream junk("time,probability\n0,abc\n");
    CHECK_THROWS_AS(read_trajectory_csv(junk), Error);
}

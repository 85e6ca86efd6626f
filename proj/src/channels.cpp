// Copyright 2026 The cssmetro Authors
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

#include "cssmetro/channels.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "cssmetro/error.hpp"

namespace cssmetro {

std::string_view to_string(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::Dephasing: return "dephasing";
        case ChannelKind::BitFlip: return "bitflip";
        case ChannelKind::Mixed: return "mixed";
        case ChannelKind::Mixture: return "mixture";
        case ChannelKind::FixedWeightZ: return "fixed-weight-z";
    }
    return "unknown";
}

ChannelKind parse_channel_kind(std::string_view name) {
    for (ChannelKind k : {ChannelKind::Dephasing, ChannelKind::BitFlip, ChannelKind::Mixed, ChannelKind::Mixture,
                          ChannelKind::FixedWeightZ}) {
        if (name == to_string(k)) return k;
    }
    if (name == "z") return ChannelKind::Dephasing;
    if (name == "x" || name == "bit-flip") return ChannelKind::BitFlip;
    fail(ErrorKind::InvalidArgument, "unknown channel '" + std::string(name) + "'");
}

std::string_view to_string(TrajectorySource source) {
    return source == TrajectorySource::Integrated ? "integrated" : "analytic";
}

void ChannelSpec::validate(int n) const {
    if (!std::isfinite(p) || !std::isfinite(theta) || p < 0.0 || theta < 0.0) {
        fail(ErrorKind::Domain, "p and theta must be finite and non-negative");
    }
    if (rate() >= 1.0) fail(ErrorKind::Domain, "p * theta must be below 1");
    if ((kind == ChannelKind::Mixed || kind == ChannelKind::Mixture) &&
        (!(phi >= 0.0) || phi > std::numbers::pi)) {
        fail(ErrorKind::Domain, "phi must lie in [0, pi]");
    }
    if (kind == ChannelKind::FixedWeightZ && (weight < 0 || weight > n)) {
        fail(ErrorKind::Domain, "fixed-weight channel needs 0 <= w <= N");
    }
}

void SimulationConfig::validate() const {
    check_qubits(code.length());
    channel.validate(code.length());
    if (channel.kind == ChannelKind::FixedWeightZ) {
        fail(ErrorKind::InvalidArgument, "the fixed-weight Z channel is a one-shot map and cannot be integrated");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::InvalidArgument, "dt must be positive");
    if (!(t_max >= dt) || !std::isfinite(t_max)) fail(ErrorKind::InvalidArgument, "t_max must be at least dt");
    if (sample_every < 1) fail(ErrorKind::InvalidArgument, "sample_every must be at least 1");
}

namespace {

using Real2x2 = std::array<double, 4>;  // row-major u00 u01 u10 u11

// One qubit of the product channel, in place:
// ρ -> (1-r) ρ + r U_q ρ U_q^T for a real 2x2 U on qubit q (0 = most
// significant). Works on the 2x2 blocks {x, x|m} x {y, y|m}.
void apply_qubit_channel(ComplexMatrix &rho, int n, int q, double rate, const Real2x2 &u) {
    const Eigen::Index d = rho.rows();
    const Eigen::Index m = Eigen::Index{1} << (n - 1 - q);
    const double keep = 1.0 - rate;
    Complex *data = rho.data();  // column-major: (x, y) at y * d + x
    for (Eigen::Index y = 0; y < d; ++y) {
        if (y & m) continue;
        Complex *c0 = data + y * d;
        Complex *c1 = data + (y | m) * d;
        for (Eigen::Index x = 0; x < d; ++x) {
            if (x & m) continue;
            const Complex a = c0[x], b = c1[x], c = c0[x | m], e = c1[x | m];
            const Complex t00 = u[0] * a + u[1] * c, t01 = u[0] * b + u[1] * e;
            const Complex t10 = u[2] * a + u[3] * c, t11 = u[2] * b + u[3] * e;
            c0[x] = keep * a + rate * (t00 * u[0] + t01 * u[1]);
            c1[x] = keep * b + rate * (t00 * u[2] + t01 * u[3]);
            c0[x | m] = keep * c + rate * (t10 * u[0] + t11 * u[1]);
            c1[x | m] = keep * e + rate * (t10 * u[2] + t11 * u[3]);
        }
    }
}

ComplexMatrix product_channel(const ComplexMatrix &rho, int n, double rate, const Real2x2 &u) {
    ComplexMatrix out = rho;
    for (int q = 0; q < n; ++q) apply_qubit_channel(out, n, q, rate, u);
    return out;
}

constexpr Real2x2 kPauliX{0.0, 1.0, 1.0, 0.0};

Real2x2 mixed_unitary(double phi) {
    const double c = std::cos(phi / 2.0);
    const double s = std::sin(phi / 2.0);
    return {c, s, s, -c};
}

}  // namespace

Lindbladian::Lindbladian(const ChannelSpec &spec, int n) : spec_(spec), n_(n) {
    check_qubits(n);
    spec.validate(n);
    if (spec.kind == ChannelKind::FixedWeightZ) {
        fail(ErrorKind::InvalidArgument, "the fixed-weight Z channel has no Lindbladian form");
    }
    const Eigen::Index d = Eigen::Index{1} << n;
    const double lambda = 1.0 - 2.0 * spec.rate();
    dephasing_factor_.resize(d, d);
    signal_factor_.resize(d, d);
    for (Eigen::Index y = 0; y < d; ++y) {
        const int ey = n - 2 * std::popcount(static_cast<std::uint32_t>(y));
        for (Eigen::Index x = 0; x < d; ++x) {
            const int ex = n - 2 * std::popcount(static_cast<std::uint32_t>(x));
            dephasing_factor_(x, y) = std::pow(lambda, std::popcount(static_cast<std::uint32_t>(x ^ y)));
            signal_factor_(x, y) = Complex(0.0, -spec.theta * (ex - ey));
        }
    }
    double dephasing_weight = 0.0;
    switch (spec.kind) {
        case ChannelKind::Dephasing: dephasing_weight = 1.0; break;
        case ChannelKind::BitFlip:
        case ChannelKind::Mixed: product_weight_ = 1.0; break;
        case ChannelKind::Mixture:
            dephasing_weight = std::pow(std::cos(spec.phi / 2.0), 2);
            product_weight_ = 1.0 - dephasing_weight;
            break;
        case ChannelKind::FixedWeightZ: break;
    }
    elementwise_factor_ = signal_factor_.array() + dephasing_weight * dephasing_factor_.array().cast<Complex>() - 1.0;
}

void Lindbladian::apply(const ComplexMatrix &rho, ComplexMatrix &out, ComplexMatrix &scratch) const {
    out.array() = rho.array() * elementwise_factor_.array();
    if (product_weight_ > 0.0) {
        scratch = rho;
        const Real2x2 u = spec_.kind == ChannelKind::Mixed ? mixed_unitary(spec_.phi) : kPauliX;
        for (int q = 0; q < n_; ++q) apply_qubit_channel(scratch, n_, q, spec_.rate(), u);
        out += product_weight_ * scratch;
    }
}

ComplexMatrix Lindbladian::error_map(const ComplexMatrix &rho) const {
    const double rate = spec_.rate();
    switch (spec_.kind) {
        case ChannelKind::Dephasing:
            // Z errors only rescale coherences: ρ_xy -> (1-2pθ)^{|x^y|} ρ_xy.
            return (rho.array() * dephasing_factor_.array()).matrix();
        case ChannelKind::BitFlip:
            return product_channel(rho, n_, rate, kPauliX);
        case ChannelKind::Mixed:
            return product_channel(rho, n_, rate, mixed_unitary(spec_.phi));
        case ChannelKind::Mixture: {
            const double c2 = std::pow(std::cos(spec_.phi / 2.0), 2);
            const double s2 = 1.0 - c2;
            ComplexMatrix out = c2 * (rho.array() * dephasing_factor_.array()).matrix();
            if (s2 > 0.0) out += s2 * product_channel(rho, n_, rate, kPauliX);
            return out;
        }
        case ChannelKind::FixedWeightZ: break;
    }
    fail(ErrorKind::InvalidArgument, "channel has no Lindbladian form");
}

ComplexMatrix Lindbladian::dissipator(const ComplexMatrix &rho) const { return error_map(rho) - rho; }

ComplexMatrix Lindbladian::signal(const ComplexMatrix &rho) const {
    return (rho.array() * signal_factor_.array()).matrix();
}

ComplexMatrix Lindbladian::operator()(const ComplexMatrix &rho) const {
    ComplexMatrix out(rho.rows(), rho.cols());
    ComplexMatrix scratch(rho.rows(), rho.cols());
    apply(rho, out, scratch);
    return out;
}

namespace {

ComplexMatrix generator_of_kind(const DensityMatrix &rho, const ChannelSpec &spec, int n, ChannelKind expected) {
    if (spec.kind != expected) {
        fail(ErrorKind::InvalidArgument, "generator for '" + std::string(to_string(expected)) + "' called with a '" +
                                             std::string(to_string(spec.kind)) + "' channel");
    }
    if (rho.qubits() != n) fail(ErrorKind::InvalidArgument, "state size does not match n");
    return Lindbladian(spec, n)(rho.matrix());
}

}  // namespace

ComplexMatrix dephasing_generator(const DensityMatrix &rho, const ChannelSpec &spec, int n) {
    return generator_of_kind(rho, spec, n, ChannelKind::Dephasing);
}

ComplexMatrix bitflip_generator(const DensityMatrix &rho, const ChannelSpec &spec, int n) {
    return generator_of_kind(rho, spec, n, ChannelKind::BitFlip);
}

ComplexMatrix mixed_generator(const DensityMatrix &rho, const ChannelSpec &spec, int n) {
    return generator_of_kind(rho, spec, n, ChannelKind::Mixed);
}

ComplexMatrix mixture_generator(const DensityMatrix &rho, const ChannelSpec &spec, int n) {
    return generator_of_kind(rho, spec, n, ChannelKind::Mixture);
}

ComplexMatrix rk4_step(const Lindbladian &generator, const ComplexMatrix &rho, double dt) {
    const ComplexMatrix k1 = generator(rho);
    const ComplexMatrix k2 = generator(rho + (dt / 2.0) * k1);
    const ComplexMatrix k3 = generator(rho + (dt / 2.0) * k2);
    const ComplexMatrix k4 = generator(rho + dt * k3);
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory evolve(const SimulationConfig &config) {
    config.validate();
    const int n = config.code.length();
    const Lindbladian generator(config.channel, n);
    const ComplexMatrix projector = stabilizer_projector(config.code);

    constexpr double kTraceDriftLimit = 1e-8;
    constexpr double kStepNormLimit = 0.1;

    const auto steps = static_cast<std::size_t>(std::ceil(config.t_max / config.dt - 1e-9));
    Trajectory traj;
    traj.source = TrajectorySource::Integrated;
    traj.stats.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();

    ComplexMatrix rho = probe_state(config.code).matrix();
    auto record = [&](std::size_t step) {
        DensityMatrix state(rho, n);
        if (config.check_positivity) {
            const double lo = state.min_eigenvalue();
            if (!(traj.stats.min_eigenvalue <= lo)) traj.stats.min_eigenvalue = lo;
            if (lo < -DensityMatrix::kPositivityTol) {
                fail(ErrorKind::NumericalInvariant,
                     "state lost positivity at t = " + std::to_string(step * config.dt) + " (eigenvalue " +
                         std::to_string(lo) + ")");
            }
        }
        traj.times.push_back(static_cast<double>(step) * config.dt);
        traj.probabilities.push_back(measure_plus_probability(state, projector));
    };

    // RK4 with preallocated stages; a 2^N x 2^N temporary per stage is
    // otherwise the dominant cost for N = 7.
    const Eigen::Index d = rho.rows();
    ComplexMatrix k(d, d), acc(d, d), stage(d, d), scratch(d, d), next(d, d);
    const double dt = config.dt;

    record(0);
    for (std::size_t step = 1; step <= steps; ++step) {
        generator.apply(rho, k, scratch);
        acc = k;
        stage = rho + (dt / 2.0) * k;
        generator.apply(stage, k, scratch);
        acc += 2.0 * k;
        stage = rho + (dt / 2.0) * k;
        generator.apply(stage, k, scratch);
        acc += 2.0 * k;
        stage = rho + dt * k;
        generator.apply(stage, k, scratch);
        acc += k;
        next = rho + (dt / 6.0) * acc;
        const double step_norm = (next - rho).norm();
        if (!(step_norm < kStepNormLimit)) {
            fail(ErrorKind::StepSize, "state changed by " + std::to_string(step_norm) +
                                          " in one step; reduce dt (currently " + std::to_string(config.dt) + ")");
        }
        traj.stats.max_hermiticity_defect = std::max(traj.stats.max_hermiticity_defect, hermiticity_defect(next));
        rho = 0.5 * (next + next.adjoint());  // next is a separate buffer, so no aliasing
        const double drift = std::abs(rho.trace() - Complex(1.0));
        traj.stats.max_trace_drift = std::max(traj.stats.max_trace_drift, drift);
        if (drift > kTraceDriftLimit) {
            fail(ErrorKind::StepSize, "trace drifted by " + std::to_string(drift) + " at t = " +
                                          std::to_string(step * config.dt) + "; reduce dt");
        }
        if (step % static_cast<std::size_t>(config.sample_every) == 0) record(step);
    }
    traj.stats.steps = steps;
    return traj;
}

DensityMatrix fixed_weight_z_map(const DensityMatrix &rho, int w) {
    const int n = rho.qubits();
    if (w < 0 || w > n) fail(ErrorKind::Domain, "error weight w must satisfy 0 <= w <= N");
    const std::uint32_t d = 1u << n;
    // Z^i ρ Z^i multiplies ρ_xy by (-1)^{<x^y, i>}; average that sign over
    // every support i of weight w.
    std::vector<double> phase(d, 0.0);
    std::size_t supports = 0;
    for (std::uint32_t i = 0; i < d; ++i) {
        if (std::popcount(i) != w) continue;
        ++supports;
        for (std::uint32_t delta = 0; delta < d; ++delta) phase[delta] += (std::popcount(delta & i) & 1) ? -1.0 : 1.0;
    }
    for (double &f : phase) f /= static_cast<double>(supports);

    ComplexMatrix out = rho.matrix();
    for (std::uint32_t y = 0; y < d; ++y) {
        for (std::uint32_t x = 0; x < d; ++x) out(x, y) *= phase[x ^ y];
    }
    return DensityMatrix(std::move(out), n);
}

Trajectory sample_copies(const Trajectory &trajectory, unsigned copies, std::uint64_t seed) {
    if (copies == 0) return trajectory;
    Trajectory out = trajectory;
    std::mt19937_64 rng(seed);
    for (double &p : out.probabilities) {
        std::binomial_distribution<unsigned> draw(copies, std::clamp(p, 0.0, 1.0));
        p = static_cast<double>(draw(rng)) / static_cast<double>(copies);
    }
    return out;
}

void write_trajectory_csv(std::ostream &out, const Trajectory &trajectory, const std::vector<double> *analytic) {
    if (analytic && analytic->size() != trajectory.size()) {
        fail(ErrorKind::InvalidArgument, "analytic column length does not match the trajectory");
    }
    out << "t,p_plus,source" << (analytic ? ",p_analytic" : "") << '\n';
    out << std::setprecision(17);
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        out << trajectory.times[i] << ',' << trajectory.probabilities[i] << ',' << to_string(trajectory.source);
        if (analytic) out << ',' << (*analytic)[i];
        out << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::Parse, "trajectory CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.starts_with("t,p_plus")) fail(ErrorKind::Parse, "trajectory CSV header must start with 't,p_plus'");

    Trajectory traj;
    bool have_source = false;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 2) fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected at least 2 fields");
        auto number = [&](const std::string &s) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
                fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
            }
            return v;
        };
        const double t = number(fields[0]);
        const double p = number(fields[1]);
        if (p < 0.0 || p > 1.0) fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": p_plus outside [0, 1]");
        if (!traj.times.empty() && !(t > traj.times.back())) {
            fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": times must be strictly increasing");
        }
        if (fields.size() >= 3 && !have_source) {
            if (fields[2] == "analytic") traj.source = TrajectorySource::Analytic;
            have_source = true;
        }
        traj.times.push_back(t);
        traj.probabilities.push_back(p);
    }
    return traj;
}

}  // namespace cssmetro

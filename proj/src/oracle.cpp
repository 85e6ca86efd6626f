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

#include "cssmetro/oracle.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "cssmetro/channels.hpp"
#include "cssmetro/error.hpp"
#include "cssmetro/metrology.hpp"

namespace cssmetro::oracle {

namespace {

using Mat2 = Eigen::Matrix2cd;

void check_size(int n) {
    if (n < 1 || n > kMaxOracleQubits) {
        fail(ErrorKind::Size, "oracle checks are limited to 1.." + std::to_string(kMaxOracleQubits) + " qubits");
    }
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

// Tensor product of per-qubit factors, qubit 1 leftmost.
ComplexMatrix kron_string(const BitVector &support, const Mat2 &on) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < support.size(); ++q) {
        out = kron(out, support[q] ? ComplexMatrix(on) : ComplexMatrix(Mat2::Identity()));
    }
    return out;
}

Mat2 pauli_z() {
    Mat2 z;
    z << 1, 0, 0, -1;
    return z;
}

Mat2 pauli_x() {
    Mat2 x;
    x << 0, 1, 1, 0;
    return x;
}

double relative_error(double value, double reference) {
    const double diff = std::abs(value - reference);
    return reference == 0.0 ? diff : diff / std::abs(reference);
}

std::string label_of(const BinaryCode &code, const std::string &subject) {
    if (!subject.empty()) return subject;
    return "[" + std::to_string(code.length()) + "," + std::to_string(code.dimension()) + "] code";
}

// Explicit dephasing generator as a list of Z-string conjugations.
class PauliSumDephasing {
  public:
    PauliSumDephasing(int n, double p, double theta) : theta_(theta), h_(kron_hamiltonian(n)) {
        const double pt = p * theta;
        const std::uint32_t count = 1u << n;
        for (std::uint32_t j = 0; j < count; ++j) {
            const int k = std::popcount(j);
            const double q = std::pow(1.0 - pt, n - k) * std::pow(pt, k);
            terms_.emplace_back(q, kron_z_string(BitVector(j, n)));
        }
    }

    ComplexMatrix operator()(const ComplexMatrix &rho) const {
        const Complex i(0.0, 1.0);
        ComplexMatrix out = -i * theta_ * (h_ * rho - rho * h_) - rho;
        for (const auto &[q, z] : terms_) out += q * (z * rho * z);
        return out;
    }

  private:
    double theta_;
    ComplexMatrix h_;
    std::vector<std::pair<double, ComplexMatrix>> terms_;
};

}  // namespace

ComplexMatrix kron_hamiltonian(int n) {
    check_size(n);
    const Eigen::Index d = Eigen::Index{1} << n;
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (int q = 0; q < n; ++q) h += kron_z_string(BitVector::unit(q, n));
    return h;
}

ComplexMatrix kron_z_string(const BitVector &support) { return kron_string(support, pauli_z()); }

ComplexMatrix kron_x_string(const BitVector &support) { return kron_string(support, pauli_x()); }

ComplexMatrix outer_probe(const BinaryCode &code) {
    check_size(code.length());
    const Eigen::Index d = Eigen::Index{1} << code.length();
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
    for (const BitVector &c : code.codewords()) psi(c.mask()) = 1.0;
    psi.normalize();
    return psi * psi.adjoint();
}

ComplexMatrix kron_projector(const BinaryCode &code) {
    check_size(code.length());
    const Eigen::Index d = Eigen::Index{1} << code.length();
    ComplexMatrix pi = ComplexMatrix::Zero(d, d);
    for (const BitVector &s : code.codewords()) pi += kron_x_string(s);
    return pi / static_cast<double>(code.size());
}

OracleReport verify_toy_variance(const BinaryCode &code, int w, const std::string &subject) {
    const int n = code.length();
    check_size(n);
    if (n > 6) fail(ErrorKind::Size, "toy-variance check is limited to N <= 6");
    if (w < 0 || w > n) fail(ErrorKind::Domain, "weight w must lie in [0, N]");

    const ComplexMatrix rho = outer_probe(code);
    ComplexMatrix noisy = ComplexMatrix::Zero(rho.rows(), rho.cols());
    double supports = 0.0;
    for (std::uint32_t j = 0; j < (1u << n); ++j) {
        if (std::popcount(j) != w) continue;
        const ComplexMatrix z = kron_z_string(BitVector(j, n));
        noisy += z * rho * z;
        supports += 1.0;
    }
    noisy /= supports;
    const ComplexMatrix h = kron_hamiltonian(n);
    const double mean = (noisy * h).trace().real();
    const double second = (noisy * h * h).trace().real();

    OracleReport r;
    r.claim_id = "toy_variance";
    r.subject = label_of(code, subject) + ", w=" + std::to_string(w);
    r.lhs = 4.0 * second - 4.0 * mean * mean;
    r.rhs = q_pure(code).value;
    r.abs_error = std::abs(r.lhs - r.rhs);
    r.tolerance = 1e-9;
    r.applicable = zero_coordinates(code).empty();
    r.passed = r.applicable && r.abs_error <= r.tolerance;
    if (!r.applicable) r.note = "code has an identically-zero coordinate, so <H> does not vanish";
    r.extra.emplace_back("mean_h", mean);
    return r;
}

OracleReport verify_first_order_vanishing(const BinaryCode &code, const std::string &subject) {
    check_size(code.length());
    const ComplexMatrix rho = outer_probe(code);
    const ComplexMatrix h = kron_hamiltonian(code.length());
    const Complex i(0.0, 1.0);
    const ComplexMatrix drho = -i * (h * rho - rho * h);
    const Complex value = (drho * kron_projector(code)).trace();

    OracleReport r;
    r.claim_id = "first_order_vanishing";
    r.subject = label_of(code, subject);
    r.lhs = std::abs(value);
    r.rhs = 0.0;
    r.abs_error = r.lhs;
    r.tolerance = 1e-10;
    r.passed = r.abs_error <= r.tolerance;
    r.extra.emplace_back("commutator_norm", drho.norm());
    return r;
}

ExpansionFit fit_contrast_expansion(const BinaryCode &code, double p, double theta) {
    const int n = code.length();
    check_size(n);
    if (!(p >= 0.0) || !(theta >= 0.0) || p * theta >= 1.0) fail(ErrorKind::Domain, "p * theta must lie in [0, 1)");
    const PauliSumDephasing gen(n, p, theta);
    const ComplexMatrix rho = outer_probe(code);
    const ComplexMatrix pi = kron_projector(code);

    // One RK4 step; only the increment is traced so that the constant term
    // does not swamp the small coefficients.
    constexpr int kPoints = 10;
    Eigen::MatrixXd design(kPoints, 3);
    Eigen::VectorXd y(kPoints);
    const ComplexMatrix k1 = gen(rho);
    for (int m = 0; m < kPoints; ++m) {
        const double dt = 1e-3 * (m + 1);
        const ComplexMatrix k2 = gen(rho + 0.5 * dt * k1);
        const ComplexMatrix k3 = gen(rho + 0.5 * dt * k2);
        const ComplexMatrix k4 = gen(rho + dt * k3);
        const ComplexMatrix increment = dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        y(m) = 2.0 * (increment * pi).trace().real();
        // Columns scaled to order one for conditioning.
        design(m, 0) = 1.0;
        design(m, 1) = dt / 1e-2;
        design(m, 2) = (dt / 1e-2) * (dt / 1e-2);
    }
    const Eigen::VectorXd c = design.colPivHouseholderQr().solve(y);
    // The constant 1 = 2 Tr(ρ(0) Π) - 1 was subtracted before the fit.
    return ExpansionFit{1.0 + c(0), c(1) / 1e-2, c(2) / 1e-4};
}

OracleReport verify_second_order_expansion(const BinaryCode &code, double p, double theta,
                                           const std::string &subject) {
    const ExpansionFit fit = fit_contrast_expansion(code, p, theta);
    const double gamma = gamma_dephasing(code, p, theta);
    const double q = q_pure(code).value;
    const double taylor = -theta * theta * q / 2.0 + gamma * gamma / 2.0;
    const double printed = -theta * q + gamma * gamma / 2.0;

    OracleReport r;
    r.claim_id = "second_order_expansion";
    r.subject = label_of(code, subject);
    r.lhs = fit.linear;
    r.rhs = -gamma;
    r.abs_error = std::abs(r.lhs - r.rhs);
    const double linear_rel = relative_error(fit.linear, -gamma);
    const double quad_rel = relative_error(fit.quadratic, taylor);
    r.tolerance = 1e-6;
    r.applicable = zero_coordinates(code).empty() && code.dimension() > 0;
    r.passed = r.applicable && linear_rel <= 1e-6 && quad_rel <= 1e-2;
    if (!r.applicable) r.note = "trivial or degenerate code";
    r.extra.emplace_back("linear_rel_error", linear_rel);
    r.extra.emplace_back("quadratic_fit", fit.quadratic);
    r.extra.emplace_back("quadratic_taylor", taylor);
    r.extra.emplace_back("quadratic_taylor_rel_error", quad_rel);
    r.extra.emplace_back("quadratic_printed", printed);
    r.extra.emplace_back("quadratic_printed_rel_error", relative_error(fit.quadratic, printed));
    r.extra.emplace_back("constant_fit", fit.constant);
    return r;
}

OracleReport verify_bitflip_undamped(const BinaryCode &code, double p, double theta, const std::string &subject,
                                     BitflipOptions options) {
    check_size(code.length());
    const QPure q = q_pure(code);
    if (!(theta > 0.0)) fail(ErrorKind::Domain, "theta must be positive for a fit");
    if (!(options.periods > 0.0) || !(options.dt > 0.0)) fail(ErrorKind::InvalidArgument, "bad window options");

    SimulationConfig config;
    config.code = code;
    config.channel.kind = ChannelKind::BitFlip;
    config.channel.p = p;
    config.channel.theta = theta;
    config.dt = options.dt;
    config.t_max = options.periods * 2.0 * std::numbers::pi / (std::sqrt(q.value) * theta);
    config.sample_every = std::max(1, static_cast<int>(std::lround(config.t_max / options.dt / 400.0)));
    const Trajectory traj = evolve(config);

    OracleReport r;
    r.claim_id = "bitflip_undamped";
    r.subject = label_of(code, subject);
    r.tolerance = 1e-6;
    ThetaEstimate est;
    try {
        est = estimate_theta(traj, q.value);
    } catch (const Error &e) {
        if (e.kind() != ErrorKind::EstimationFailed) throw;
        // The damped-cosine model does not describe this trajectory at all.
        r.lhs = std::numeric_limits<double>::quiet_NaN();
        r.abs_error = std::numeric_limits<double>::infinity();
        r.passed = false;
        r.note = std::string("fit failed: ") + e.what();
        r.extra.emplace_back("t_max", config.t_max);
        return r;
    }
    r.lhs = est.gamma_hat;
    r.rhs = 0.0;
    r.abs_error = std::abs(est.gamma_hat);
    r.passed = r.abs_error <= r.tolerance;
    r.extra.emplace_back("theta_hat", est.theta_hat);
    r.extra.emplace_back("frequency", std::sqrt(q.value) * est.theta_hat);
    r.extra.emplace_back("fit_residual", est.residual);
    r.extra.emplace_back("t_max", config.t_max);
    return r;
}

std::vector<OracleReport> run_fixture_suite() {
    constexpr double kP = 0.05;
    constexpr double kTheta = 1e-3;
    std::vector<OracleReport> out;
    for (int n : {3, 5}) {
        const BinaryCode ghz = codes::repetition(n);
        for (int w = 0; w <= n; ++w) out.push_back(verify_toy_variance(ghz, w, "ghz" + std::to_string(n)));
    }
    out.push_back(verify_toy_variance(codes::trivial(3), 1, "trivial3"));

    out.push_back(verify_first_order_vanishing(codes::repetition(3), "ghz3"));
    out.push_back(verify_first_order_vanishing(codes::steane_x(), "steane"));
    out.push_back(verify_first_order_vanishing(codes::trivial(3), "trivial3"));

    out.push_back(verify_second_order_expansion(codes::repetition(3), kP, kTheta, "ghz3"));
    out.push_back(verify_second_order_expansion(codes::repetition(7), kP, kTheta, "ghz7"));

    for (const char *name : {"ghz3", "ghz7", "steane"}) {
        out.push_back(verify_bitflip_undamped(codes::by_name(name), kP, kTheta, name));
    }
    return out;
}

}  // namespace cssmetro::oracle

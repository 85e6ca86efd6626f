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

#include "cssmetro/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "cssmetro/error.hpp"

namespace cssmetro {

double qfi(const DensityMatrix &rho, const ComplexMatrix &drho, double cutoff) {
    if (drho.rows() != rho.dim() || drho.cols() != rho.dim()) {
        fail(ErrorKind::InvalidArgument, "derivative dimension does not match the state");
    }
    if (hermiticity_defect(drho) > 1e-8) fail(ErrorKind::InvalidArgument, "derivative operator is not Hermitian");
    if (std::abs(drho.trace()) > 1e-8) fail(ErrorKind::InvalidArgument, "derivative operator is not traceless");
    if (cutoff < 0.0) fail(ErrorKind::InvalidArgument, "cutoff must be non-negative");

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho.matrix());
    const Eigen::VectorXd &lambda = solver.eigenvalues();
    const ComplexMatrix elements = solver.eigenvectors().adjoint() * drho * solver.eigenvectors();
    double q = 0.0;
    for (Eigen::Index l = 0; l < lambda.size(); ++l) {
        for (Eigen::Index k = 0; k < lambda.size(); ++k) {
            const double sum = lambda(k) + lambda(l);
            if (sum < cutoff || sum <= 0.0) continue;
            const double diff = lambda(k) - lambda(l);
            q += diff * diff / sum * std::norm(elements(k, l));
        }
    }
    return 2.0 * q;
}

double variance_bound(const DensityMatrix &rho, const ComplexMatrix &h) {
    if (h.rows() != rho.dim() || h.cols() != rho.dim()) {
        fail(ErrorKind::InvalidArgument, "operator dimension does not match the state");
    }
    if (hermiticity_defect(h) > 1e-10) fail(ErrorKind::InvalidArgument, "operator is not Hermitian");
    const double mean = trace_product(rho.matrix(), h).real();
    const ComplexMatrix h2 = h * h;
    const double second = trace_product(rho.matrix(), h2).real();
    return std::max(0.0, 4.0 * second - 4.0 * mean * mean);
}

QPure q_pure(const BinaryCode &code) {
    const WeightEnumerator w_dual = weight_enumerator(dual_code(code));
    QPure out;
    out.dual_weight2 = code.length() >= 2 ? w_dual[2] : 0;
    out.degenerate = w_dual[1] != 0;
    out.value = 4.0 * (2.0 * static_cast<double>(out.dual_weight2) + code.length());
    return out;
}

namespace {

double noise_rate(double p, double theta) {
    const double pt = p * theta;
    if (!std::isfinite(pt) || p < 0.0 || theta < 0.0 || pt >= 1.0) {
        fail(ErrorKind::Domain, "p * theta must lie in [0, 1)");
    }
    return pt;
}

void check_phi(double phi) {
    if (!(phi >= 0.0) || phi > std::numbers::pi) fail(ErrorKind::Domain, "phi must lie in [0, pi]");
}

// 1 - (1-pθ)^N, written as a sum of non-negative terms.
double any_error_probability(int n, double pt) {
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += binomial(n, k) * std::pow(1.0 - pt, n - k) * std::pow(pt, k);
    return s;
}

}  // namespace

double gamma_dephasing(const WeightEnumerator &w_dual, int n, double p, double theta) {
    noise_rate(p, theta);
    // 2[(1 - (1-pθ)^N) - W̃] = 2 * slack; the termwise slack keeps the
    // result exactly zero for the trivial code.
    return 2.0 * robustness_bound_slack(w_dual, p, theta, n);
}

double gamma_dephasing(const BinaryCode &code, double p, double theta) {
    return gamma_dephasing(weight_enumerator(dual_code(code)), code.length(), p, theta);
}

double gamma_mixed(const WeightEnumerator &w_dual, int n, double p, double theta, double phi) {
    const double pt = noise_rate(p, theta);
    check_phi(phi);
    const double c2 = std::pow(std::cos(phi / 2.0), 2);
    const double s2 = std::pow(std::sin(phi / 2.0), 2);
    const double bound = any_error_probability(n, pt);
    const double w_tilde = robustness(w_dual, p, theta, n);
    return bound - bound * (s2 - c2) - 2.0 * c2 * w_tilde;
}

double gamma_mixed(const BinaryCode &code, double p, double theta, double phi) {
    return gamma_mixed(weight_enumerator(dual_code(code)), code.length(), p, theta, phi);
}

double gamma_exact_mixed(const WeightEnumerator &w_dual, int n, double p, double theta, double phi) {
    const double pt = noise_rate(p, theta);
    check_phi(phi);
    if (w_dual.length() != n) fail(ErrorKind::InvalidArgument, "enumerator length does not match n");
    const double c2 = std::pow(std::cos(phi / 2.0), 2);
    const double s2 = std::pow(std::sin(phi / 2.0), 2);
    double full = 0.0;
    double w_prime = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double qk = std::pow(1.0 - pt, n - k) * std::pow(pt, k);
        for (int l = 0; l <= k; ++l) {
            const double mix = std::pow(c2, k - l) * std::pow(s2, l) * binomial(n, l);
            full += qk * mix * binomial(n, k - l);
            w_prime += qk * mix * static_cast<double>(w_dual[k - l]);
        }
    }
    return any_error_probability(n, pt) + full - 2.0 * w_prime;
}

double gamma_exact_mixed(const BinaryCode &code, double p, double theta, double phi) {
    return gamma_exact_mixed(weight_enumerator(dual_code(code)), code.length(), p, theta, phi);
}

double model_gamma(const BinaryCode &code, const ChannelSpec &channel) {
    switch (channel.kind) {
        case ChannelKind::Dephasing: return gamma_dephasing(code, channel.p, channel.theta);
        case ChannelKind::BitFlip: return 0.0;
        case ChannelKind::Mixed:
        case ChannelKind::Mixture: return gamma_mixed(code, channel.p, channel.theta, channel.phi);
        case ChannelKind::FixedWeightZ: break;
    }
    fail(ErrorKind::InvalidArgument, "no damping model for the fixed-weight channel");
}

double analytic_probability(double t, double theta, const GammaParams &params) {
    if (t < 0.0) fail(ErrorKind::Domain, "time must be non-negative");
    const double value =
        params.amplitude * std::exp(-params.gamma * t) * std::cos(std::sqrt(params.q_pure) * theta * t) + params.offset;
    return std::clamp(value, 0.0, 1.0);
}

Trajectory analytic_trajectory(std::span<const double> times, double theta, const GammaParams &params) {
    Trajectory traj;
    traj.source = TrajectorySource::Analytic;
    traj.times.assign(times.begin(), times.end());
    for (double t : times) traj.probabilities.push_back(analytic_probability(t, theta, params));
    return traj;
}

CfiResult cfi_from_samples(double p_minus, double p_center, double p_plus, double delta) {
    if (!(delta > 0.0)) fail(ErrorKind::InvalidArgument, "finite-difference step must be positive");
    CfiResult out;
    out.derivative = (p_plus - p_minus) / (2.0 * delta);
    out.probability = p_center;
    const double p = std::clamp(p_center, kProbabilityClamp, 1.0 - kProbabilityClamp);
    out.information = out.derivative * out.derivative / (p * (1.0 - p));
    out.reliable = std::min(p_center, 1.0 - p_center) > kReliableMargin;
    return out;
}

CfiResult cfi(const std::function<double(double)> &p_of_theta, double theta, double delta) {
    return cfi_from_samples(p_of_theta(theta - delta), p_of_theta(theta), p_of_theta(theta + delta), delta);
}

PrecisionCurve cramer_rao_curve(const SimulationConfig &config, double delta) {
    config.validate();
    const double theta = config.channel.theta;
    if (delta <= 0.0) delta = theta / 100.0;
    if (!(theta - delta >= 0.0)) fail(ErrorKind::Domain, "finite-difference step exceeds theta");

    auto run_at = [&config](double th) {
        SimulationConfig shifted = config;
        shifted.channel.theta = th;
        return evolve(shifted);
    };
    auto minus = std::async(std::launch::async, run_at, theta - delta);
    auto plus = std::async(std::launch::async, run_at, theta + delta);
    const Trajectory center = run_at(theta);
    const Trajectory lo = minus.get();
    const Trajectory hi = plus.get();

    PrecisionCurve curve;
    curve.label = std::string(to_string(config.channel.kind));
    for (std::size_t i = 0; i < center.size(); ++i) {
        const CfiResult f = cfi_from_samples(lo.probabilities[i], center.probabilities[i], hi.probabilities[i], delta);
        if (!(f.information > 0.0) || !std::isfinite(f.information)) continue;
        curve.times.push_back(center.times[i]);
        curve.delta_theta.push_back(1.0 / std::sqrt(f.information));
        curve.reliable.push_back(f.reliable);
        curve.probabilities.push_back(f.probability);
    }
    return curve;
}

namespace {

struct FitProblem {
    std::span<const double> t;
    std::span<const double> p;
    double root_q;
    bool free_amplitude;
};

// Parameter order: theta, gamma, [amplitude, offset].
Eigen::VectorXd residuals(const FitProblem &fp, const Eigen::VectorXd &x, Eigen::MatrixXd *jac) {
    const auto n = static_cast<Eigen::Index>(fp.t.size());
    const double amp = fp.free_amplitude ? x(2) : 0.5;
    const double off = fp.free_amplitude ? x(3) : 0.5;
    Eigen::VectorXd r(n);
    if (jac) jac->resize(n, x.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = fp.t[static_cast<std::size_t>(i)];
        const double env = std::exp(-x(1) * t);
        const double arg = fp.root_q * x(0) * t;
        const double c = std::cos(arg);
        r(i) = amp * env * c + off - fp.p[static_cast<std::size_t>(i)];
        if (jac) {
            (*jac)(i, 0) = -amp * env * std::sin(arg) * fp.root_q * t;
            (*jac)(i, 1) = -amp * t * env * c;
            if (fp.free_amplitude) {
                (*jac)(i, 2) = env * c;
                (*jac)(i, 3) = 1.0;
            }
        }
    }
    return r;
}

// Levenberg-Marquardt with γ kept non-negative.
Eigen::VectorXd levenberg_marquardt(const FitProblem &fp, Eigen::VectorXd x) {
    Eigen::MatrixXd jac;
    Eigen::VectorXd r = residuals(fp, x, &jac);
    double cost = r.squaredNorm();
    double mu = 1e-3;
    for (int iter = 0; iter < 500; ++iter) {
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        bool improved = false;
        for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
            Eigen::MatrixXd a = jtj;
            for (Eigen::Index j = 0; j < a.rows(); ++j) a(j, j) += mu * std::max(jtj(j, j), 1e-300);
            const Eigen::VectorXd step = a.ldlt().solve(-g);
            Eigen::VectorXd trial = x + step;
            trial(1) = std::max(trial(1), 0.0);
            Eigen::MatrixXd trial_jac;
            const Eigen::VectorXd trial_r = residuals(fp, trial, &trial_jac);
            const double trial_cost = trial_r.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost <= cost) {
                const bool converged = (cost - trial_cost) <= 1e-15 * std::max(cost, 1e-300) ||
                                       step.cwiseAbs().maxCoeff() <= 1e-14 * (x.cwiseAbs().maxCoeff() + 1e-300);
                x = trial;
                r = trial_r;
                jac = trial_jac;
                cost = trial_cost;
                mu = std::max(mu / 3.0, 1e-12);
                improved = true;
                if (converged) return x;
            } else {
                mu *= 4.0;
            }
        }
        if (!improved) break;
    }
    return x;
}

}  // namespace

ThetaEstimate estimate_theta(const Trajectory &trajectory, double q_pure, EstimateOptions options) {
    const std::size_t n = trajectory.size();
    const std::size_t params = options.free_amplitude ? 4 : 2;
    if (n < 20) fail(ErrorKind::EstimationFailed, "need at least 20 samples, got " + std::to_string(n));
    if (n <= params) fail(ErrorKind::EstimationFailed, "fewer samples than fit parameters");
    if (!(q_pure > 0.0)) fail(ErrorKind::InvalidArgument, "Q_pure must be positive");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(trajectory.times[i] > trajectory.times[i - 1])) {
            fail(ErrorKind::InvalidArgument, "trajectory times must be strictly increasing");
        }
    }
    const std::span<const double> t(trajectory.times);
    const std::span<const double> p(trajectory.probabilities);
    const double span = t.back() - t.front();

    // Periodogram of the mean-removed contrast.
    std::vector<double> contrast(n);
    for (std::size_t i = 0; i < n; ++i) contrast[i] = 2.0 * p[i] - 1.0;
    const double mean = std::accumulate(contrast.begin(), contrast.end(), 0.0) / static_cast<double>(n);
    double variance = 0.0;
    for (double &c : contrast) {
        c -= mean;
        variance += c * c;
    }
    if (variance <= 1e-24 * static_cast<double>(n)) {
        fail(ErrorKind::EstimationFailed, "trajectory is constant; no oscillation to fit");
    }
    const double mean_step = span / static_cast<double>(n - 1);
    const double omega_max = std::numbers::pi / mean_step;
    const double omega_min = std::numbers::pi / span;
    const double d_omega = 2.0 * std::numbers::pi / span / 16.0;
    double best_power = 0.0;
    double best_omega = 0.0;
    double power_sum = 0.0;
    std::size_t bins = 0;
    for (double w = omega_min; w <= omega_max; w += d_omega) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            re += contrast[i] * std::cos(w * t[i]);
            im -= contrast[i] * std::sin(w * t[i]);
        }
        const double power = re * re + im * im;
        power_sum += power;
        ++bins;
        if (power > best_power) {
            best_power = power;
            best_omega = w;
        }
    }
    if (bins == 0 || best_power < 10.0 * power_sum / static_cast<double>(bins)) {
        fail(ErrorKind::EstimationFailed, "no spectral peak above the noise floor");
    }
    if (best_omega * span < 2.0 * std::numbers::pi) {
        fail(ErrorKind::EstimationFailed, "trajectory spans less than one oscillation period");
    }

    const double root_q = std::sqrt(q_pure);
    FitProblem fp{t, p, root_q, options.free_amplitude};
    Eigen::VectorXd x(static_cast<Eigen::Index>(params));
    x(0) = best_omega / root_q;
    x(1) = 0.0;
    if (options.free_amplitude) {
        x(2) = 0.5;
        x(3) = 0.5;
    }
    // Seed γ by a coarse scan before the joint fit.
    double best_cost = residuals(fp, x, nullptr).squaredNorm();
    double best_gamma = 0.0;
    for (double g = 1e-3 / span; g <= 20.0 / span; g *= 1.5) {
        x(1) = g;
        const double cost = residuals(fp, x, nullptr).squaredNorm();
        if (cost < best_cost) {
            best_cost = cost;
            best_gamma = g;
        }
    }
    x(1) = best_gamma;
    x = levenberg_marquardt(fp, x);

    Eigen::MatrixXd jac;
    const Eigen::VectorXd r = residuals(fp, x, &jac);
    ThetaEstimate est;
    est.theta_initial = best_omega / root_q;
    est.theta_hat = x(0);
    est.gamma_hat = x(1);
    est.amplitude = options.free_amplitude ? x(2) : 0.5;
    est.offset = options.free_amplitude ? x(3) : 0.5;
    est.residual = std::sqrt(r.squaredNorm() / static_cast<double>(n));
    const double sigma2 = r.squaredNorm() / static_cast<double>(n - params);
    const Eigen::MatrixXd cov = (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse() * sigma2;
    est.theta_stderr = std::sqrt(std::max(0.0, cov(0, 0)));
    if (!std::isfinite(est.theta_hat) || !(est.theta_hat > 0.0)) {
        fail(ErrorKind::EstimationFailed, "fit diverged");
    }
    return est;
}

void write_precision_csv(std::ostream &out, const PrecisionCurve &curve) {
    out << "t,delta_theta,reliable\n" << std::setprecision(17);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out << curve.times[i] << ',' << curve.delta_theta[i] << ',' << (curve.reliable[i] ? 1 : 0) << '\n';
    }
}

}  // namespace cssmetro

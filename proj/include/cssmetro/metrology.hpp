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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cssmetro/channels.hpp"
#include "cssmetro/gf2.hpp"
#include "cssmetro/quantum_ops.hpp"

namespace cssmetro {

/// δθ(t) bounds from the classical Fisher information of the all-+1
/// syndrome. Samples carrying no information (F = 0, e.g. t = 0) are omitted.
struct PrecisionCurve {
    std::vector<double> times;
    std::vector<double> delta_theta;
    std::vector<bool> reliable;
    std::vector<double> probabilities;
    std::string label;

    std::size_t size() const noexcept { return times.size(); }
};

/// Parameters of p(t) = A e^{-γt} cos(sqrt(Q_pure) θ t) + B.
struct GammaParams {
    double gamma = 0.0;
    double q_pure = 0.0;
    double amplitude = 0.5;
    double offset = 0.5;
};

inline constexpr double kQfiCutoff = 1e-12;

/// 2 sum_{k,l} (λk-λl)^2/(λk+λl) |<k|O|l>|^2 over the eigenbasis of ρ, with
/// O = ∂ρ/∂θ. Pairs with λk+λl below `cutoff` are dropped.
double qfi(const DensityMatrix &rho, const ComplexMatrix &drho, double cutoff = kQfiCutoff);

/// 4 Tr(ρH²) - 4 Tr(ρH)².
double variance_bound(const DensityMatrix &rho, const ComplexMatrix &h);

struct QPure {
    double value = 0.0;
    std::uint64_t dual_weight2 = 0;
    /// True when the dual has weight-1 words, i.e. some coordinate is zero in
    /// every codeword. The formula then overstates the variance.
    bool degenerate = false;
};

/// 4 (2 W⊥_2 + N).
QPure q_pure(const BinaryCode &code);

/// Rescaled damping 2 - 2(1-pθ)^N - 2 W̃, in [0, 2].
double gamma_dephasing(const BinaryCode &code, double p, double theta);
double gamma_dephasing(const WeightEnumerator &w_dual, int n, double p, double theta);

/// Damping of the convex Z/X mixture at polar angle φ.
double gamma_mixed(const BinaryCode &code, double p, double theta, double phi);
double gamma_mixed(const WeightEnumerator &w_dual, int n, double p, double theta, double phi);

/// Damping of the coherent U(φ) channel before rescaling. φ = 0 and φ = π
/// return the limiting values.
double gamma_exact_mixed(const BinaryCode &code, double p, double theta, double phi);
double gamma_exact_mixed(const WeightEnumerator &w_dual, int n, double p, double theta, double phi);

/// Model damping used for the analytic column of a channel.
double model_gamma(const BinaryCode &code, const ChannelSpec &channel);

double analytic_probability(double t, double theta, const GammaParams &params);

Trajectory analytic_trajectory(std::span<const double> times, double theta, const GammaParams &params);

struct CfiResult {
    double information = 0.0;
    double probability = 0.0;
    double derivative = 0.0;
    bool reliable = false;
};

inline constexpr double kProbabilityClamp = 1e-12;
/// Samples with min(p, 1-p) at or below this are flagged: the outcome is
/// nearly deterministic and (∂p)²/(p(1-p)) is ill-conditioned there.
inline constexpr double kReliableMargin = 1e-6;

/// (∂p/∂θ)²/(p(1-p)) from a central difference of the three probabilities.
CfiResult cfi_from_samples(double p_minus, double p_center, double p_plus, double delta);

CfiResult cfi(const std::function<double(double)> &p_of_theta, double theta, double delta);

/// Runs evolve() at θ-δ, θ and θ+δ and converts the sampled probabilities
/// into δθ(t) = 1/sqrt(F). `delta <= 0` selects θ/100.
PrecisionCurve cramer_rao_curve(const SimulationConfig &config, double delta = 0.0);

struct EstimateOptions {
    bool free_amplitude = false;
};

struct ThetaEstimate {
    double theta_hat = 0.0;
    double gamma_hat = 0.0;
    /// RMS of the fit residuals.
    double residual = 0.0;
    double amplitude = 0.5;
    double offset = 0.5;
    /// Linearized standard error of theta_hat.
    double theta_stderr = 0.0;
    /// Initial guess from the periodogram peak.
    double theta_initial = 0.0;
};

/// Least-squares fit of the damped-cosine model over (θ, γ), seeded by the
/// periodogram peak of the contrast 2p - 1.
ThetaEstimate estimate_theta(const Trajectory &trajectory, double q_pure, EstimateOptions options = {});

void write_precision_csv(std::ostream &out, const PrecisionCurve &curve);

}  // namespace cssmetro

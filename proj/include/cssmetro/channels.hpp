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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cssmetro/gf2.hpp"
#include "cssmetro/quantum_ops.hpp"

namespace cssmetro {

enum class ChannelKind {
    Dephasing,
    BitFlip,
    /// Coherent U(φ) = cos(φ/2) Z + sin(φ/2) X on the support of each error.
    Mixed,
    /// cos²(φ/2) L(Z) + sin²(φ/2) L(X).
    Mixture,
    /// One-shot map, not a Lindbladian. Only fixed_weight_z_map accepts it.
    FixedWeightZ,
};

std::string_view to_string(ChannelKind kind);
ChannelKind parse_channel_kind(std::string_view name);

/// Noise model plus signal. The per-qubit error probability is p * theta.
struct ChannelSpec {
    ChannelKind kind = ChannelKind::Dephasing;
    double p = 0.05;
    double theta = 1e-3;
    double phi = 0.0;
    int weight = 0;

    double rate() const noexcept { return p * theta; }
    void validate(int n) const;
};

struct SimulationConfig {
    BinaryCode code;
    ChannelSpec channel;
    double t_max = 100.0;
    double dt = 0.01;
    int sample_every = 1;
    bool check_positivity = true;

    void validate() const;
};

enum class TrajectorySource { Integrated, Analytic };

std::string_view to_string(TrajectorySource source);

/// Worst-case numerical hygiene seen during one run.
struct IntegratorStats {
    std::size_t steps = 0;
    double max_trace_drift = 0.0;
    double max_hermiticity_defect = 0.0;
    /// Lowest eigenvalue over the sampled states; NaN if never checked.
    double min_eigenvalue = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> probabilities;
    TrajectorySource source = TrajectorySource::Integrated;
    IntegratorStats stats;

    std::size_t size() const noexcept { return times.size(); }
};

/// Right-hand side dρ/dt = -iθ[H,ρ] - ρ + Φ(ρ) for one channel and register
/// size, where Φ is the weighted sum of error conjugations. Φ factorizes into
/// independent single-qubit channels (1-pθ) ρ + pθ U ρ U†, which is how it is
/// applied here.
class Lindbladian {
  public:
    Lindbladian(const ChannelSpec &spec, int n);

    int qubits() const noexcept { return n_; }
    const ChannelSpec &spec() const noexcept { return spec_; }

    ComplexMatrix operator()(const ComplexMatrix &rho) const;
    /// Allocation-free form of operator(). `out` and `scratch` must already
    /// have the state's shape and must not alias `rho`.
    void apply(const ComplexMatrix &rho, ComplexMatrix &out, ComplexMatrix &scratch) const;
    /// Φ(ρ) - ρ only.
    ComplexMatrix dissipator(const ComplexMatrix &rho) const;
    /// -iθ[H, ρ] only.
    ComplexMatrix signal(const ComplexMatrix &rho) const;

  private:
    ComplexMatrix error_map(const ComplexMatrix &rho) const;

    ChannelSpec spec_;
    int n_;
    Eigen::MatrixXd dephasing_factor_;
    ComplexMatrix signal_factor_;
    // Everything that acts elementwise, folded into one factor, plus the
    // weight of the per-qubit product channel that does not.
    ComplexMatrix elementwise_factor_;
    double product_weight_ = 0.0;
};

ComplexMatrix dephasing_generator(const DensityMatrix &rho, const ChannelSpec &spec, int n);
ComplexMatrix bitflip_generator(const DensityMatrix &rho, const ChannelSpec &spec, int n);
ComplexMatrix mixed_generator(const DensityMatrix &rho, const ChannelSpec &spec, int n);
ComplexMatrix mixture_generator(const DensityMatrix &rho, const ChannelSpec &spec, int n);

/// One classical fourth-order Runge-Kutta step.
ComplexMatrix rk4_step(const Lindbladian &generator, const ComplexMatrix &rho, double dt);

/// Integrates from the code's probe state and records Tr(ρ(t) Π) every
/// `sample_every` steps, starting at t = 0.
Trajectory evolve(const SimulationConfig &config);

/// Uniform average of Z errors over all weight-w supports.
DensityMatrix fixed_weight_z_map(const DensityMatrix &rho, int w);

/// Replaces each probability by the observed fraction of +1 outcomes among
/// `copies` independent probes. copies == 0 returns the input unchanged.
Trajectory sample_copies(const Trajectory &trajectory, unsigned copies, std::uint64_t seed);

/// CSV `t,p_plus,source`, plus `p_analytic` when a model column is given.
void write_trajectory_csv(std::ostream &out, const Trajectory &trajectory,
                          const std::vector<double> *analytic = nullptr);
Trajectory read_trajectory_csv(std::istream &in);

}  // namespace cssmetro

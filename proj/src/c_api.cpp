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

#include "cssmetro/cssmetro.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cssmetro/channels.hpp"
#include "cssmetro/error.hpp"
#include "cssmetro/gf2.hpp"
#include "cssmetro/metrology.hpp"
#include "cssmetro/oracle.hpp"

struct cm_code {
    cssmetro::BinaryCode code;
};

struct cm_trajectory {
    cssmetro::Trajectory trajectory;
};

struct cm_curve {
    cssmetro::PrecisionCurve curve;
};

namespace {

using namespace cssmetro;
using json = nlohmann::json;

thread_local std::string g_last_error;

cm_status status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return CM_ERR_INVALID_ARGUMENT;
        case ErrorKind::RankDeficient: return CM_ERR_RANK_DEFICIENT;
        case ErrorKind::Domain: return CM_ERR_DOMAIN;
        case ErrorKind::Size: return CM_ERR_SIZE;
        case ErrorKind::Parse: return CM_ERR_PARSE;
        case ErrorKind::Io: return CM_ERR_IO;
        case ErrorKind::NumericalInvariant: return CM_ERR_NUMERICAL;
        case ErrorKind::StepSize: return CM_ERR_STEP_SIZE;
        case ErrorKind::EstimationFailed: return CM_ERR_ESTIMATION;
    }
    return CM_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
cm_status guarded(F &&body) {
    g_last_error.clear();
    try {
        body();
        return CM_OK;
    } catch (const Error &e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc &) {
        g_last_error = "out of memory";
    } catch (const std::exception &e) {
        g_last_error = e.what();
    } catch (...) {
        g_last_error = "unknown error";
    }
    return CM_ERR_INTERNAL;
}

template <class T>
void require(const T *ptr, const char *what) {
    if (ptr == nullptr) fail(ErrorKind::InvalidArgument, std::string(what) + " must not be NULL");
}

ChannelKind to_kind(cm_channel_kind kind) {
    switch (kind) {
        case CM_CHANNEL_DEPHASING: return ChannelKind::Dephasing;
        case CM_CHANNEL_BITFLIP: return ChannelKind::BitFlip;
        case CM_CHANNEL_MIXED: return ChannelKind::Mixed;
        case CM_CHANNEL_MIXTURE: return ChannelKind::Mixture;
    }
    fail(ErrorKind::InvalidArgument, "unknown channel kind " + std::to_string(static_cast<int>(kind)));
}

ChannelSpec to_spec(const cm_channel &channel) {
    ChannelSpec spec;
    spec.kind = to_kind(channel.kind);
    spec.p = channel.p;
    spec.theta = channel.theta;
    spec.phi = channel.phi;
    return spec;
}

SimulationConfig to_config(const cm_code *code, const cm_sim_config *config) {
    require(code, "code");
    require(config, "config");
    SimulationConfig out;
    out.code = code->code;
    out.channel = to_spec(config->channel);
    out.t_max = config->t_max;
    out.dt = config->dt;
    out.sample_every = config->sample_every;
    out.check_positivity = config->check_positivity != 0;
    out.validate();
    return out;
}

char *copy_string(const std::string &s) {
    char *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

json coefficients(const WeightEnumerator &w) {
    json arr = json::array();
    for (std::uint64_t c : w.coefficients()) arr.push_back(c);
    return arr;
}

// Writes through a sibling temporary so readers never see a partial file.
void write_atomically(const std::string &path, const std::string &contents) {
    if (path.empty()) fail(ErrorKind::Io, "empty output path");
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::Io, "cannot open '" + tmp + "' for writing");
        out << contents;
        out.flush();
        if (!out) fail(ErrorKind::Io, "write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorKind::Io, "cannot move output into place at '" + path + "'");
    }
}

std::string trajectory_csv(const cm_trajectory *trajectory, const cm_trajectory *analytic) {
    require(trajectory, "trajectory");
    if (analytic && analytic->trajectory.size() != trajectory->trajectory.size()) {
        fail(ErrorKind::InvalidArgument, "analytic column length differs from the trajectory");
    }
    std::ostringstream out;
    write_trajectory_csv(out, trajectory->trajectory, analytic ? &analytic->trajectory.probabilities : nullptr);
    return out.str();
}

json report_json(const oracle::OracleReport &r) {
    json extra = json::object();
    for (const auto &[name, value] : r.extra) extra[name] = value;
    json j = {{"claim_id", r.claim_id},   {"subject", r.subject},     {"lhs", r.lhs},
              {"rhs", r.rhs},             {"abs_error", r.abs_error}, {"tolerance", r.tolerance},
              {"passed", r.passed},       {"applicable", r.applicable}, {"extra", extra}};
    if (!r.note.empty()) j["note"] = r.note;
    // JSON has no NaN or infinity; nlohmann writes them as null.
    return j;
}

}  // namespace

extern "C" {

const char *cm_version(void) { return "0.1.0"; }

const char *cm_last_error(void) { return g_last_error.c_str(); }

const char *cm_status_name(cm_status status) {
    switch (status) {
        case CM_OK: return "ok";
        case CM_ERR_INVALID_ARGUMENT: return "invalid argument";
        case CM_ERR_RANK_DEFICIENT: return "rank deficient";
        case CM_ERR_DOMAIN: return "domain error";
        case CM_ERR_SIZE: return "size limit";
        case CM_ERR_PARSE: return "parse error";
        case CM_ERR_IO: return "i/o error";
        case CM_ERR_NUMERICAL: return "numerical invariant violated";
        case CM_ERR_STEP_SIZE: return "step size";
        case CM_ERR_ESTIMATION: return "estimation failed";
        case CM_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

void cm_string_free(char *s) { std::free(s); }

void cm_sim_config_default(cm_sim_config *config) {
    if (config == nullptr) return;
    const SimulationConfig defaults;
    config->channel.kind = CM_CHANNEL_DEPHASING;
    config->channel.p = defaults.channel.p;
    config->channel.theta = defaults.channel.theta;
    config->channel.phi = defaults.channel.phi;
    config->t_max = defaults.t_max;
    config->dt = defaults.dt;
    config->sample_every = defaults.sample_every;
    config->check_positivity = defaults.check_positivity ? 1 : 0;
}

cm_status cm_channel_parse(const char *name, cm_channel_kind *kind) {
    return guarded([&] {
        require(name, "name");
        require(kind, "kind");
        switch (parse_channel_kind(name)) {
            case ChannelKind::Dephasing: *kind = CM_CHANNEL_DEPHASING; return;
            case ChannelKind::BitFlip: *kind = CM_CHANNEL_BITFLIP; return;
            case ChannelKind::Mixed: *kind = CM_CHANNEL_MIXED; return;
            case ChannelKind::Mixture: *kind = CM_CHANNEL_MIXTURE; return;
            case ChannelKind::FixedWeightZ: break;
        }
        fail(ErrorKind::InvalidArgument, "channel '" + std::string(name) + "' cannot be simulated");
    });
}

const char *cm_channel_name(cm_channel_kind kind) {
    switch (kind) {
        case CM_CHANNEL_DEPHASING: return "dephasing";
        case CM_CHANNEL_BITFLIP: return "bitflip";
        case CM_CHANNEL_MIXED: return "mixed";
        case CM_CHANNEL_MIXTURE: return "mixture";
    }
    return "unknown";
}

cm_status cm_code_from_file(const char *path, cm_code **out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new cm_code{load_code_file(path)};
    });
}

cm_status cm_code_from_text(const char *text, cm_code **out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = new cm_code{parse_code(text)};
    });
}

cm_status cm_code_builtin(const char *name, cm_code **out) {
    return guarded([&] {
        require(name, "name");
        require(out, "out");
        *out = new cm_code{codes::by_name(name)};
    });
}

cm_status cm_code_from_rows(const char *const *rows, size_t count, int n, cm_code **out) {
    return guarded([&] {
        require(out, "out");
        if (count > 0) require(rows, "rows");
        std::vector<BitVector> generators;
        for (size_t i = 0; i < count; ++i) {
            require(rows[i], "row");
            generators.push_back(BitVector::parse(rows[i]));
        }
        *out = new cm_code{enumerate_codewords(generators, n)};
    });
}

void cm_code_free(cm_code *code) { delete code; }

int cm_code_length(const cm_code *code) { return code ? code->code.length() : -1; }

int cm_code_dimension(const cm_code *code) { return code ? code->code.dimension() : -1; }

cm_status cm_code_format(const cm_code *code, char **text_out) {
    return guarded([&] {
        require(code, "code");
        require(text_out, "text_out");
        *text_out = copy_string(format_code(code->code));
    });
}

cm_status cm_code_q_pure(const cm_code *code, double *q_pure_out, int *degenerate) {
    return guarded([&] {
        require(code, "code");
        require(q_pure_out, "q_pure");
        const QPure q = q_pure(code->code);
        *q_pure_out = q.value;
        if (degenerate) *degenerate = q.degenerate ? 1 : 0;
    });
}

cm_status cm_code_gamma(const cm_code *code, const cm_channel *channel, double *gamma) {
    return guarded([&] {
        require(code, "code");
        require(channel, "channel");
        require(gamma, "gamma");
        *gamma = model_gamma(code->code, to_spec(*channel));
    });
}

cm_status cm_analyze_json(const cm_code *code, const cm_channel *channel, char **json_out) {
    return guarded([&] {
        require(code, "code");
        require(channel, "channel");
        require(json_out, "json_out");
        const ChannelSpec spec = to_spec(*channel);
        spec.validate(code->code.length());
        const BinaryCode &c = code->code;
        const WeightEnumerator w = weight_enumerator(c);
        const WeightEnumerator w_dual = weight_enumerator(dual_code(c));
        const QPure q = q_pure(c);
        const int n = c.length();

        json report;
        report["code"] = {
            {"n", n},
            {"k", c.dimension()},
            {"size", c.size()},
            {"W_C", coefficients(w)},
            {"W_dual", coefficients(w_dual)},
            {"W2", q.dual_weight2},
            {"q_pure", q.value},
            {"degenerate", q.degenerate},
            {"zero_coordinates", zero_coordinates(c)},
        };
        report["channel"] = {{"kind", std::string(to_string(spec.kind))},
                             {"p", spec.p},
                             {"theta", spec.theta},
                             {"phi", spec.phi}};
        report["gamma"] = model_gamma(c, spec);
        report["gamma_dephasing"] = gamma_dephasing(w_dual, n, spec.p, spec.theta);
        report["robustness"] = robustness(w_dual, spec.p, spec.theta, n);
        report["bound_slack"] = robustness_bound_slack(w_dual, spec.p, spec.theta, n);
        *json_out = copy_string(report.dump(2));
    });
}

cm_status cm_simulate(const cm_code *code, const cm_sim_config *config, cm_trajectory **out) {
    return guarded([&] {
        require(out, "out");
        const SimulationConfig sim = to_config(code, config);
        *out = new cm_trajectory{evolve(sim)};
    });
}

cm_status cm_trajectory_from_arrays(const double *times, const double *probabilities, size_t count,
                                    cm_trajectory **out) {
    return guarded([&] {
        require(out, "out");
        if (count > 0) {
            require(times, "times");
            require(probabilities, "probabilities");
        }
        Trajectory traj;
        traj.times.assign(times, times + count);
        traj.probabilities.assign(probabilities, probabilities + count);
        for (size_t i = 0; i < count; ++i) {
            if (!(probabilities[i] >= 0.0 && probabilities[i] <= 1.0)) {
                fail(ErrorKind::Domain, "probability outside [0, 1] at index " + std::to_string(i));
            }
            if (i > 0 && !(times[i] > times[i - 1])) fail(ErrorKind::InvalidArgument, "times must increase");
        }
        traj.stats.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
        *out = new cm_trajectory{std::move(traj)};
    });
}

void cm_trajectory_free(cm_trajectory *trajectory) { delete trajectory; }

size_t cm_trajectory_size(const cm_trajectory *trajectory) { return trajectory ? trajectory->trajectory.size() : 0; }

double cm_trajectory_time(const cm_trajectory *trajectory, size_t index) {
    if (!trajectory || index >= trajectory->trajectory.size()) return std::numeric_limits<double>::quiet_NaN();
    return trajectory->trajectory.times[index];
}

double cm_trajectory_probability(const cm_trajectory *trajectory, size_t index) {
    if (!trajectory || index >= trajectory->trajectory.size()) return std::numeric_limits<double>::quiet_NaN();
    return trajectory->trajectory.probabilities[index];
}

int cm_trajectory_is_analytic(const cm_trajectory *trajectory) {
    return trajectory && trajectory->trajectory.source == TrajectorySource::Analytic ? 1 : 0;
}

cm_status cm_trajectory_stats(const cm_trajectory *trajectory, cm_integrator_stats *stats) {
    return guarded([&] {
        require(trajectory, "trajectory");
        require(stats, "stats");
        const IntegratorStats &s = trajectory->trajectory.stats;
        stats->steps = s.steps;
        stats->max_trace_drift = s.max_trace_drift;
        stats->max_hermiticity_defect = s.max_hermiticity_defect;
        stats->min_eigenvalue = s.min_eigenvalue;
    });
}

cm_status cm_trajectory_sample(const cm_trajectory *trajectory, unsigned copies, uint64_t seed, cm_trajectory **out) {
    return guarded([&] {
        require(trajectory, "trajectory");
        require(out, "out");
        *out = new cm_trajectory{sample_copies(trajectory->trajectory, copies, seed)};
    });
}

cm_status cm_trajectory_analytic(const cm_code *code, const cm_channel *channel, const cm_trajectory *grid,
                                 cm_trajectory **out) {
    return guarded([&] {
        require(code, "code");
        require(channel, "channel");
        require(grid, "grid");
        require(out, "out");
        const ChannelSpec spec = to_spec(*channel);
        spec.validate(code->code.length());
        GammaParams params;
        params.gamma = model_gamma(code->code, spec);
        params.q_pure = q_pure(code->code).value;
        *out = new cm_trajectory{analytic_trajectory(grid->trajectory.times, spec.theta, params)};
    });
}

cm_status cm_trajectory_write_csv(const cm_trajectory *trajectory, const cm_trajectory *analytic, const char *path) {
    return guarded([&] {
        require(path, "path");
        write_atomically(path, trajectory_csv(trajectory, analytic));
    });
}

cm_status cm_trajectory_to_csv(const cm_trajectory *trajectory, const cm_trajectory *analytic, char **csv_out) {
    return guarded([&] {
        require(csv_out, "csv_out");
        *csv_out = copy_string(trajectory_csv(trajectory, analytic));
    });
}

cm_status cm_trajectory_read_csv(const char *path, cm_trajectory **out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        std::ifstream in(path);
        if (!in) fail(ErrorKind::Io, "cannot open '" + std::string(path) + "'");
        *out = new cm_trajectory{read_trajectory_csv(in)};
    });
}

cm_status cm_crb(const cm_code *code, const cm_sim_config *config, double fd_step, cm_curve **out) {
    return guarded([&] {
        require(out, "out");
        const SimulationConfig sim = to_config(code, config);
        *out = new cm_curve{cramer_rao_curve(sim, fd_step)};
    });
}

void cm_curve_free(cm_curve *curve) { delete curve; }

size_t cm_curve_size(const cm_curve *curve) { return curve ? curve->curve.size() : 0; }

double cm_curve_time(const cm_curve *curve, size_t index) {
    if (!curve || index >= curve->curve.size()) return std::numeric_limits<double>::quiet_NaN();
    return curve->curve.times[index];
}

double cm_curve_delta_theta(const cm_curve *curve, size_t index) {
    if (!curve || index >= curve->curve.size()) return std::numeric_limits<double>::quiet_NaN();
    return curve->curve.delta_theta[index];
}

int cm_curve_reliable(const cm_curve *curve, size_t index) {
    if (!curve || index >= curve->curve.size()) return 0;
    return curve->curve.reliable[index] ? 1 : 0;
}

cm_status cm_curve_write_csv(const cm_curve *curve, const char *path) {
    return guarded([&] {
        require(curve, "curve");
        require(path, "path");
        std::ostringstream out;
        write_precision_csv(out, curve->curve);
        write_atomically(path, out.str());
    });
}

cm_status cm_curve_to_csv(const cm_curve *curve, char **csv_out) {
    return guarded([&] {
        require(curve, "curve");
        require(csv_out, "csv_out");
        std::ostringstream out;
        write_precision_csv(out, curve->curve);
        *csv_out = copy_string(out.str());
    });
}

cm_status cm_estimate(const cm_trajectory *trajectory, double q_pure_value, int free_amplitude,
                      cm_estimate_result *out) {
    return guarded([&] {
        require(trajectory, "trajectory");
        require(out, "out");
        EstimateOptions options;
        options.free_amplitude = free_amplitude != 0;
        const ThetaEstimate est = estimate_theta(trajectory->trajectory, q_pure_value, options);
        out->theta_hat = est.theta_hat;
        out->gamma_hat = est.gamma_hat;
        out->residual = est.residual;
        out->amplitude = est.amplitude;
        out->offset = est.offset;
        out->theta_stderr = est.theta_stderr;
        out->ci_low = est.theta_hat - 1.96 * est.theta_stderr;
        out->ci_high = est.theta_hat + 1.96 * est.theta_stderr;
        out->theta_initial = est.theta_initial;
    });
}

cm_status cm_oracle_json(char **json_out, int *all_passed) {
    return guarded([&] {
        require(json_out, "json_out");
        json arr = json::array();
        bool ok = true;
        for (const oracle::OracleReport &r : oracle::run_fixture_suite()) {
            // Inapplicable reports document a hypothesis failure; they are
            // not counted against the suite.
            if (r.applicable && !r.passed) ok = false;
            arr.push_back(report_json(r));
        }
        *json_out = copy_string(arr.dump(2));
        if (all_passed) *all_passed = ok ? 1 : 0;
    });
}

}  // extern "C"

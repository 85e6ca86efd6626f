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

// Command-line front end over the C API.
//
//   cssmetro analyze  --code ghz7
//   cssmetro simulate --code ghz7 --channel dephasing --out traj.csv
//   cssmetro crb      --code ghz7 --channel bitflip --out crb.csv
//   cssmetro estimate traj.csv --code ghz7
//   cssmetro oracle
//
// Exit codes: 0 ok, 2 usage or input error, 3 numerical invariant violated,
// 4 estimation failed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cssmetro/cssmetro.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitEstimation = 4;

// Thrown for anything that should end the run with a message.
struct CliError {
    int exit_code;
    std::string message;
};

int exit_code_for(cm_status status) {
    switch (status) {
        case CM_OK: return kExitOk;
        case CM_ERR_NUMERICAL:
        case CM_ERR_STEP_SIZE:
        case CM_ERR_INTERNAL: return kExitNumerical;
        case CM_ERR_ESTIMATION: return kExitEstimation;
        default: return kExitUsage;
    }
}

void check(cm_status status) {
    if (status != CM_OK) {
        throw CliError{exit_code_for(status), std::string(cm_status_name(status)) + ": " + cm_last_error()};
    }
}

[[noreturn]] void usage_error(const std::string &message) { throw CliError{kExitUsage, message}; }

struct CodeDeleter {
    void operator()(cm_code *c) const { cm_code_free(c); }
};
struct TrajectoryDeleter {
    void operator()(cm_trajectory *t) const { cm_trajectory_free(t); }
};
struct CurveDeleter {
    void operator()(cm_curve *c) const { cm_curve_free(c); }
};
struct StringDeleter {
    void operator()(char *s) const { cm_string_free(s); }
};
using CodePtr = std::unique_ptr<cm_code, CodeDeleter>;
using TrajectoryPtr = std::unique_ptr<cm_trajectory, TrajectoryDeleter>;
using CurvePtr = std::unique_ptr<cm_curve, CurveDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Everything a run depends on. Precedence: flags > config file > defaults.
struct Settings {
    std::string code = "ghz7";
    std::string code_text;  // generator rows recorded in a manifest; wins over `code`
    std::string channel = "dephasing";
    std::optional<double> phi;
    double theta = 1e-3;
    double p = 0.05;
    double t_max = 100.0;
    double dt = 0.01;
    int sample_every = 1;
    unsigned copies = 0;
    std::uint64_t seed = 1;
    double fd_step = 0.0;
    bool check_positivity = true;
    bool analytic = false;
};

json settings_json(const Settings &s) {
    json j = {{"code", s.code},         {"channel", s.channel},         {"theta", s.theta},
              {"p", s.p},               {"t_max", s.t_max},             {"dt", s.dt},
              {"sample_every", s.sample_every}, {"copies", s.copies}, {"fd_step", s.fd_step},
              {"check_positivity", s.check_positivity}, {"analytic", s.analytic}};
    if (s.phi) j["phi"] = *s.phi;
    return j;
}

void apply_config_file(const std::string &path, Settings &s) {
    std::ifstream in(path);
    if (!in) usage_error("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception &e) {
        usage_error("config file '" + path + "' is not valid JSON: " + e.what());
    }
    // A run manifest nests the settings under "config" and the seed beside it.
    const json &cfg = doc.contains("config") ? doc["config"] : doc;
    try {
        if (cfg.contains("code")) s.code = cfg["code"].get<std::string>();
        if (cfg.contains("channel")) s.channel = cfg["channel"].get<std::string>();
        if (cfg.contains("phi")) s.phi = cfg["phi"].get<double>();
        if (cfg.contains("theta")) s.theta = cfg["theta"].get<double>();
        if (cfg.contains("p")) s.p = cfg["p"].get<double>();
        if (cfg.contains("t_max")) s.t_max = cfg["t_max"].get<double>();
        if (cfg.contains("dt")) s.dt = cfg["dt"].get<double>();
        if (cfg.contains("sample_every")) s.sample_every = cfg["sample_every"].get<int>();
        if (cfg.contains("copies")) s.copies = cfg["copies"].get<unsigned>();
        if (cfg.contains("fd_step")) s.fd_step = cfg["fd_step"].get<double>();
        if (cfg.contains("analytic")) s.analytic = cfg["analytic"].get<bool>();
        if (cfg.contains("check_positivity")) s.check_positivity = cfg["check_positivity"].get<bool>();
        if (doc.contains("code_text")) s.code_text = doc["code_text"].get<std::string>();
        if (doc.contains("seed")) s.seed = doc["seed"].get<std::uint64_t>();
        if (cfg.contains("seed")) s.seed = cfg["seed"].get<std::uint64_t>();
    } catch (const json::exception &e) {
        usage_error("config file '" + path + "': " + e.what());
    }
}

// A path to an existing file wins over a built-in name.
CodePtr load_code(const std::string &spec, const std::string &text = {}) {
    cm_code *raw = nullptr;
    if (!text.empty()) {
        check(cm_code_from_text(text.c_str(), &raw));
        return CodePtr(raw);
    }
    if (std::filesystem::is_regular_file(spec)) {
        check(cm_code_from_file(spec.c_str(), &raw));
    } else {
        const cm_status st = cm_code_builtin(spec.c_str(), &raw);
        if (st != CM_OK) usage_error("'" + spec + "' is neither a code file nor a built-in code");
    }
    return CodePtr(raw);
}

cm_channel make_channel(const Settings &s) {
    cm_channel ch{};
    check(cm_channel_parse(s.channel.c_str(), &ch.kind));
    const bool angled = ch.kind == CM_CHANNEL_MIXED || ch.kind == CM_CHANNEL_MIXTURE;
    if (s.phi && !angled) usage_error("--phi only applies to the mixed and mixture channels");
    if (angled && !s.phi) usage_error("the " + s.channel + " channel needs --phi");
    ch.p = s.p;
    ch.theta = s.theta;
    ch.phi = s.phi.value_or(0.0);
    return ch;
}

cm_sim_config make_config(const Settings &s) {
    cm_sim_config cfg;
    cm_sim_config_default(&cfg);
    cfg.channel = make_channel(s);
    cfg.t_max = s.t_max;
    cfg.dt = s.dt;
    cfg.sample_every = s.sample_every;
    cfg.check_positivity = s.check_positivity ? 1 : 0;
    return cfg;
}

void write_text_atomically(const std::string &path, const std::string &text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) usage_error("cannot write '" + tmp + "'");
        out << text;
        if (!out.flush()) usage_error("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) usage_error("cannot move output into place at '" + path + "'");
}

// Written next to every output. Holds nothing time-dependent, so re-running
// it through --config reproduces the outputs byte for byte.
void write_manifest(const std::string &command, const Settings &s, const cm_code *code,
                    const std::vector<std::string> &outputs, const json &extra = json::object()) {
    if (outputs.empty()) return;
    char *text = nullptr;
    check(cm_code_format(code, &text));
    StringPtr owned(text);
    json manifest = {{"tool_version", cm_version()},
                     {"command", command},
                     {"config", settings_json(s)},
                     {"seed", s.seed},
                     {"code_text", std::string(text)},
                     {"outputs", outputs}};
    for (const auto &[k, v] : extra.items()) manifest[k] = v;
    write_text_atomically(outputs.front() + ".manifest.json", manifest.dump(2) + "\n");
}

json stats_json(const cm_trajectory *t) {
    cm_integrator_stats st{};
    check(cm_trajectory_stats(t, &st));
    json j = {{"steps", st.steps},
              {"max_trace_drift", st.max_trace_drift},
              {"max_hermiticity_defect", st.max_hermiticity_defect}};
    j["min_eigenvalue"] = std::isnan(st.min_eigenvalue) ? json(nullptr) : json(st.min_eigenvalue);
    return j;
}

void print_analysis(const json &r, std::ostream &out) {
    const json &c = r["code"];
    out << "code           [" << c["n"] << ", " << c["k"] << "]  |C| = " << c["size"] << "\n";
    out << "W_C            " << c["W_C"].dump() << "\n";
    out << "W_dual         " << c["W_dual"].dump() << "\n";
    out << "W_dual,2       " << c["W2"] << "\n";
    out << "Q_pure         " << c["q_pure"] << "\n";
    out << "channel        " << r["channel"]["kind"].get<std::string>() << "  p = " << r["channel"]["p"]
        << "  theta = " << r["channel"]["theta"] << "\n";
    out << "robustness     " << r["robustness"] << "\n";
    out << "bound slack    " << r["bound_slack"] << "\n";
    out << "gamma (model)  " << r["gamma"] << "\n";
}

int cmd_analyze(const Settings &s, const std::string &out_path, bool json_only) {
    CodePtr code = load_code(s.code, s.code_text);
    cm_channel ch = make_channel(s);
    char *text = nullptr;
    check(cm_analyze_json(code.get(), &ch, &text));
    StringPtr owned(text);
    const json report = json::parse(text);
    if (report["code"]["degenerate"].get<bool>()) {
        std::cerr << "warning: degenerate code; coordinates " << report["code"]["zero_coordinates"].dump()
                  << " are zero in every codeword, so Q_pure overstates the probe's variance\n";
    }
    if (json_only) {
        std::cout << report.dump(2) << "\n";
    } else {
        print_analysis(report, std::cout);
    }
    if (!out_path.empty()) {
        write_text_atomically(out_path, report.dump(2) + "\n");
        write_manifest("analyze", s, code.get(), {out_path});
    }
    return kExitOk;
}

int cmd_simulate(const Settings &s, const std::string &out_path) {
    CodePtr code = load_code(s.code, s.code_text);
    const cm_sim_config cfg = make_config(s);
    cm_trajectory *raw = nullptr;
    check(cm_simulate(code.get(), &cfg, &raw));
    TrajectoryPtr result(raw);
    const json stats = stats_json(result.get());
    if (s.copies > 0) {
        cm_trajectory *sampled = nullptr;
        check(cm_trajectory_sample(result.get(), s.copies, s.seed, &sampled));
        result.reset(sampled);
    }
    TrajectoryPtr model;
    if (s.analytic) {
        cm_trajectory *m = nullptr;
        check(cm_trajectory_analytic(code.get(), &cfg.channel, result.get(), &m));
        model.reset(m);
    }
    if (out_path.empty()) {
        char *csv = nullptr;
        check(cm_trajectory_to_csv(result.get(), model.get(), &csv));
        StringPtr owned(csv);
        std::cout << csv;
        return kExitOk;
    }
    check(cm_trajectory_write_csv(result.get(), model.get(), out_path.c_str()));
    write_manifest("simulate", s, code.get(), {out_path}, {{"integrator", stats}});
    std::cerr << "wrote " << cm_trajectory_size(result.get()) << " samples to " << out_path << "\n";
    return kExitOk;
}

int cmd_crb(const Settings &s, const std::string &out_path) {
    CodePtr code = load_code(s.code, s.code_text);
    const cm_sim_config cfg = make_config(s);
    cm_curve *raw = nullptr;
    check(cm_crb(code.get(), &cfg, s.fd_step, &raw));
    CurvePtr curve(raw);
    if (out_path.empty()) {
        char *csv = nullptr;
        check(cm_curve_to_csv(curve.get(), &csv));
        StringPtr owned(csv);
        std::cout << csv;
        return kExitOk;
    }
    check(cm_curve_write_csv(curve.get(), out_path.c_str()));
    write_manifest("crb", s, code.get(), {out_path});
    std::cerr << "wrote " << cm_curve_size(curve.get()) << " points to " << out_path << "\n";
    return kExitOk;
}

int cmd_estimate(const std::string &trajectory_path, std::optional<double> q_pure, const std::string &code_spec,
                 bool free_amplitude, const std::string &out_path) {
    if (!q_pure) {
        if (code_spec.empty()) usage_error("estimate needs --q-pure or --code");
        CodePtr code = load_code(code_spec);
        double q = 0.0;
        check(cm_code_q_pure(code.get(), &q, nullptr));
        q_pure = q;
    }
    cm_trajectory *raw = nullptr;
    check(cm_trajectory_read_csv(trajectory_path.c_str(), &raw));
    TrajectoryPtr traj(raw);
    cm_estimate_result est{};
    check(cm_estimate(traj.get(), *q_pure, free_amplitude ? 1 : 0, &est));
    json report = {{"theta_hat", est.theta_hat},
                   {"gamma_hat", est.gamma_hat},
                   {"residual", est.residual},
                   {"ci_heuristic", {est.ci_low, est.ci_high}},
                   {"theta_stderr", est.theta_stderr},
                   {"theta_initial", est.theta_initial},
                   {"q_pure", *q_pure}};
    if (free_amplitude) {
        report["amplitude"] = est.amplitude;
        report["offset"] = est.offset;
    }
    std::cout << report.dump(2) << "\n";
    if (!out_path.empty()) write_text_atomically(out_path, report.dump(2) + "\n");
    return kExitOk;
}

int cmd_oracle(const std::string &out_path, bool strict) {
    char *text = nullptr;
    int all_passed = 0;
    check(cm_oracle_json(&text, &all_passed));
    StringPtr owned(text);
    std::cout << text << "\n";
    if (!out_path.empty()) write_text_atomically(out_path, std::string(text) + "\n");
    if (!all_passed) std::cerr << "some oracle claims did not hold; see the \"passed\" fields\n";
    return strict && !all_passed ? kExitNumerical : kExitOk;
}

// Options shared by simulate and crb.
struct RunFlags {
    std::string config;
    Settings values;
    std::vector<CLI::Option *> options;
};

void add_run_flags(CLI::App *sub, RunFlags &f, bool sampling) {
    f.options = {
        sub->add_option("--code", f.values.code, "code file or built-in name (ghzN, repN, trivialN, steane)"),
        sub->add_option("--channel", f.values.channel, "dephasing | bitflip | mixed | mixture"),
        sub->add_option("--phi", f.values.phi, "polar angle for mixed and mixture, radians"),
        sub->add_option("--theta", f.values.theta, "signal parameter"),
        sub->add_option("--p", f.values.p, "noise slope; the error rate is p * theta"),
        sub->add_option("--t-max", f.values.t_max, "final time"),
        sub->add_option("--dt", f.values.dt, "integrator step"),
        sub->add_option("--sample-every", f.values.sample_every, "record every k-th step"),
    };
    if (sampling) {
        f.options.push_back(sub->add_option("--copies", f.values.copies, "binomial sampling with this many probes"));
        f.options.push_back(sub->add_option("--seed", f.values.seed, "seed for --copies"));
    }
    sub->add_option("--config", f.config, "JSON settings or a run manifest")->check(CLI::ExistingFile);
}

// Config file first, then every flag the user actually gave.
Settings resolve(const RunFlags &f, const std::vector<CLI::Option *> &extra = {}) {
    Settings s;
    if (!f.config.empty()) apply_config_file(f.config, s);
    auto given = [](const CLI::Option *o) { return o != nullptr && o->count() > 0; };
    const Settings &v = f.values;
    const auto &o = f.options;
    if (given(o[0])) {
        s.code = v.code;
        s.code_text.clear();
    }
    if (given(o[1])) s.channel = v.channel;
    if (given(o[2])) s.phi = v.phi;
    if (given(o[3])) s.theta = v.theta;
    if (given(o[4])) s.p = v.p;
    if (given(o[5])) s.t_max = v.t_max;
    if (given(o[6])) s.dt = v.dt;
    if (given(o[7])) s.sample_every = v.sample_every;
    if (o.size() > 8 && given(o[8])) s.copies = v.copies;
    if (o.size() > 9 && given(o[9])) s.seed = v.seed;
    if (!extra.empty() && given(extra[0])) s.fd_step = v.fd_step;
    return s;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Robust-metrology simulator for CSS-code probe states"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cm_version()));

    // analyze
    auto *analyze = app.add_subcommand("analyze", "weight enumerators, Q_pure, robustness and damping of a code");
    std::string analyze_code;
    RunFlags analyze_flags;
    bool analyze_json = false;
    std::string analyze_out;
    analyze->add_option("code_file", analyze_code, "code file or built-in name (same as --code)");
    add_run_flags(analyze, analyze_flags, false);
    analyze->add_flag("--json", analyze_json, "print the JSON report instead of the table");
    analyze->add_option("--out", analyze_out, "also write the JSON report here");

    // simulate
    auto *simulate = app.add_subcommand("simulate", "integrate the master equation and record p(+1)");
    RunFlags sim_flags;
    std::string sim_out;
    bool sim_analytic = false;
    add_run_flags(simulate, sim_flags, true);
    simulate->add_option("--out", sim_out, "CSV path (stdout when omitted)");
    simulate->add_flag("--analytic", sim_analytic, "add the damped-cosine model column");

    // crb
    auto *crb = app.add_subcommand("crb", "Cramer-Rao bound curve from the simulated probability");
    RunFlags crb_flags;
    std::string crb_out;
    add_run_flags(crb, crb_flags, false);
    auto *fd_opt = crb->add_option("--fd-step", crb_flags.values.fd_step, "finite-difference step (theta/100)");
    crb->add_option("--out", crb_out, "CSV path (stdout when omitted)");

    // estimate
    auto *estimate = app.add_subcommand("estimate", "fit theta from a trajectory CSV");
    std::string est_path;
    std::optional<double> est_q;
    std::string est_code;
    bool est_free = false;
    std::string est_out;
    estimate->add_option("trajectory", est_path, "trajectory CSV")->required()->check(CLI::ExistingFile);
    estimate->add_option("--q-pure", est_q, "Q_pure of the probe");
    estimate->add_option("--code", est_code, "derive Q_pure from this code");
    estimate->add_flag("--free-amplitude", est_free, "fit amplitude and offset too");
    estimate->add_option("--out", est_out, "also write the JSON report here");

    // oracle
    auto *oracle = app.add_subcommand("oracle", "brute-force checks of the closed forms");
    std::string oracle_out;
    bool oracle_strict = false;
    oracle->add_option("--out", oracle_out, "also write the JSON array here");
    oracle->add_flag("--strict", oracle_strict, "exit 3 when an applicable claim fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*analyze) {
            Settings s = resolve(analyze_flags);
            if (!analyze_code.empty()) s.code = analyze_code;
            return cmd_analyze(s, analyze_out, analyze_json);
        }
        if (*simulate) {
            Settings s = resolve(sim_flags);
            if (sim_analytic) s.analytic = true;
            return cmd_simulate(s, sim_out);
        }
        if (*crb) return cmd_crb(resolve(crb_flags, {fd_opt}), crb_out);
        if (*estimate) return cmd_estimate(est_path, est_q, est_code, est_free, est_out);
        if (*oracle) return cmd_oracle(oracle_out, oracle_strict);
    } catch (const CliError &e) {
        std::cerr << "error: " << e.message << "\n";
        return e.exit_code;
    }
    return kExitUsage;
}

// Copyright 2026 The cssmetro Authors
// SPDX-License-Identifier: Apache-2.0

// Exercises the shared library through its C header only.

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <string>

#include "cssmetro/cssmetro.h"

namespace {

std::string take(char *s) {
    std::string out = s ? s : "";
    cm_string_free(s);
    return out;
}

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(cm_version()) == "0.1.0");
    CHECK(std::string(cm_status_name(CM_OK)) == "ok");
    CHECK(std::string(cm_status_name(CM_ERR_ESTIMATION)).size() > 0);
    cm_channel_kind kind;
    CHECK(cm_channel_parse("bitflip", &kind) == CM_OK);
    CHECK(kind == CM_CHANNEL_BITFLIP);
    CHECK(std::string(cm_channel_name(CM_CHANNEL_MIXED)) == "mixed");
    CHECK(cm_channel_parse("nonsense", &kind) == CM_ERR_INVALID_ARGUMENT);
    CHECK(std::string(cm_last_error()).find("nonsense") != std::string::npos);
}

TEST_CASE("codes through the C API") {
    cm_code *code = nullptr;
    REQUIRE(cm_code_from_file(CSSMETRO_FIXTURE_DIR "/ghz7.txt", &code) == CM_OK);
    CHECK(cm_code_length(code) == 7);
    CHECK(cm_code_dimension(code) == 1);
    double q = 0.0;
    int degenerate = -1;
    CHECK(cm_code_q_pure(code, &q, &degenerate) == CM_OK);
    CHECK(q == 196.0);
    CHECK(degenerate == 0);

    cm_channel channel{CM_CHANNEL_DEPHASING, 0.05, 1e-3, 0.0};
    double gamma = 0.0;
    CHECK(cm_code_gamma(code, &channel, &gamma) == CM_OK);
    CHECK(gamma == Catch::Approx(1.0 - std::pow(1.0 - 1e-4, 7)).epsilon(1e-10));

    char *json = nullptr;
    REQUIRE(cm_analyze_json(code, &channel, &json) == CM_OK);
    const std::string report = take(json);
    CHECK(report.find("\"q_pure\": 196.0") != std::string::npos);
    CHECK(report.find("\"W2\": 21") != std::string::npos);

    char *text = nullptr;
    REQUIRE(cm_code_format(code, &text) == CM_OK);
    cm_code *again = nullptr;
    CHECK(cm_code_from_text(take(text).c_str(), &again) == CM_OK);
    CHECK(cm_code_length(again) == 7);
    cm_code_free(again);
    cm_code_free(code);

    const char *rows[] = {"110", "011", "101"};
    CHECK(cm_code_from_rows(rows, 3, 3, &code) == CM_ERR_RANK_DEFICIENT);
    CHECK(cm_code_from_file("/nonexistent", &code) == CM_ERR_IO);
    CHECK(cm_code_from_text("n=3\n12a\n", &code) == CM_ERR_PARSE);
    CHECK(cm_code_builtin("ghz99", &code) == CM_ERR_SIZE);
    CHECK(cm_code_q_pure(nullptr, &q, &degenerate) == CM_ERR_INVALID_ARGUMENT);

    REQUIRE(cm_code_builtin("trivial3", &code) == CM_OK);
    CHECK(cm_code_q_pure(code, &q, &degenerate) == CM_OK);
    CHECK(degenerate == 1);
    cm_code_free(code);
    cm_code_free(nullptr);
}

TEST_CASE("simulate, resample, estimate") {
    cm_code *code = nullptr;
    REQUIRE(cm_code_builtin("ghz3", &code) == CM_OK);
    cm_sim_config config;
    cm_sim_config_default(&config);
    CHECK(config.channel.p == 0.05);
    CHECK(config.channel.theta == 1e-3);
    config.t_max = 3000.0;
    config.dt = 1.0;
    config.sample_every = 10;
    config.check_positivity = 1;

    cm_trajectory *traj = nullptr;
    REQUIRE(cm_simulate(code, &config, &traj) == CM_OK);
    CHECK(cm_trajectory_size(traj) == 301);
    CHECK(cm_trajectory_time(traj, 1) == 10.0);
    CHECK(cm_trajectory_probability(traj, 0) == Catch::Approx(1.0));
    CHECK(cm_trajectory_is_analytic(traj) == 0);
    cm_integrator_stats stats;
    CHECK(cm_trajectory_stats(traj, &stats) == CM_OK);
    CHECK(stats.steps == 3000);
    CHECK(stats.max_trace_drift <= 1e-8);
    CHECK(stats.min_eigenvalue >= -1e-8);

    cm_trajectory *model = nullptr;
    REQUIRE(cm_trajectory_analytic(code, &config.channel, traj, &model) == CM_OK);
    CHECK(cm_trajectory_is_analytic(model) == 1);
    for (size_t i = 0; i < cm_trajectory_size(traj); ++i) {
        CHECK(std::abs(cm_trajectory_probability(traj, i) - cm_trajectory_probability(model, i)) < 1e-6);
    }

    cm_estimate_result est;
    REQUIRE(cm_estimate(traj, 36.0, 0, &est) == CM_OK);
    CHECK(est.theta_hat == Catch::Approx(1e-3).epsilon(1e-6));
    CHECK(est.ci_low <= est.theta_hat);
    CHECK(est.ci_high >= est.theta_hat);

    cm_trajectory *a = nullptr, *b = nullptr;
    REQUIRE(cm_trajectory_sample(traj, 500, 9, &a) == CM_OK);
    REQUIRE(cm_trajectory_sample(traj, 500, 9, &b) == CM_OK);
    char *csv_a = nullptr, *csv_b = nullptr;
    REQUIRE(cm_trajectory_to_csv(a, model, &csv_a) == CM_OK);
    REQUIRE(cm_trajectory_to_csv(b, model, &csv_b) == CM_OK);
    CHECK(take(csv_a) == take(csv_b));

    const std::string path = "c_api_roundtrip.csv";
    REQUIRE(cm_trajectory_write_csv(traj, nullptr, path.c_str()) == CM_OK);
    cm_trajectory *back = nullptr;
    REQUIRE(cm_trajectory_read_csv(path.c_str(), &back) == CM_OK);
    CHECK(cm_trajectory_size(back) == cm_trajectory_size(traj));
    CHECK(cm_trajectory_probability(back, 17) == cm_trajectory_probability(traj, 17));
    std::remove(path.c_str());

    config.dt = 0.0;
    cm_trajectory *none = nullptr;
    CHECK(cm_simulate(code, &config, &none) == CM_ERR_INVALID_ARGUMENT);
    CHECK(none == nullptr);

    for (cm_trajectory *t : {traj, model, a, b, back}) cm_trajectory_free(t);
    cm_code_free(code);
}

TEST_CASE("estimation failure and curves") {
    double times[30], probs[30];
    for (int i = 0; i < 30; ++i) {
        times[i] = i;
        probs[i] = 0.5;
    }
    cm_trajectory *flat = nullptr;
    REQUIRE(cm_trajectory_from_arrays(times, probs, 30, &flat) == CM_OK);
    cm_estimate_result est;
    CHECK(cm_estimate(flat, 196.0, 0, &est) == CM_ERR_ESTIMATION);
    cm_trajectory_free(flat);

    cm_code *code = nullptr;
    REQUIRE(cm_code_builtin("ghz3", &code) == CM_OK);
    cm_sim_config config;
    cm_sim_config_default(&config);
    config.channel.kind = CM_CHANNEL_BITFLIP;
    config.t_max = 200.0;
    config.dt = 1.0;
    config.sample_every = 20;
    cm_curve *curve = nullptr;
    REQUIRE(cm_crb(code, &config, 0.0, &curve) == CM_OK);
    REQUIRE(cm_curve_size(curve) > 0);
    for (size_t i = 0; i < cm_curve_size(curve); ++i) {
        const double t = cm_curve_time(curve, i);
        // Noiseless GHZ3: delta_theta * t = 1/6 to leading order.
        CHECK(cm_curve_delta_theta(curve, i) * t == Catch::Approx(1.0 / 6.0).epsilon(0.05));
    }
    char *csv = nullptr;
    REQUIRE(cm_curve_to_csv(curve, &csv) == CM_OK);
    CHECK(take(csv).rfind("t,delta_theta,reliable", 0) == 0);
    cm_curve_free(curve);

    config.channel.p = -1.0;
    CHECK(cm_crb(code, &config, 0.0, &curve) == CM_ERR_DOMAIN);
    cm_code_free(code);
}

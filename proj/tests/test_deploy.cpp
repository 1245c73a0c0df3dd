#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <vector>

#include "aentd3/deploy.hpp"

using namespace aentd3;

namespace {

InterpolationConfig base_config() { return InterpolationConfig{}; }

} // namespace

TEST_CASE("substep count is the rate ratio") {
    InterpolationConfig cfg = base_config();
    CHECK(cfg.substeps() == 5);

    cfg.control_rate_hz = 40.0;
    CHECK(cfg.substeps() == 10);

    cfg.policy_rate_hz = 40.0;
    cfg.control_rate_hz = 40.0;
    CHECK(cfg.substeps() == 1);
}

TEST_CASE("non-integer rate ratios are rejected") {
    InterpolationConfig cfg = base_config();
    cfg.control_rate_hz = 19.0; // 4.75 substeps
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(cfg.substeps(), ConfigError);

    cfg = base_config();
    cfg.control_rate_hz = 2.0; // slower than the policy
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = base_config();
    cfg.policy_rate_hz = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = base_config();
    cfg.max_step_delta = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("interpolation hits the affine oracle at every substep") {
    InterpolationConfig cfg = base_config();
    const std::vector<double> prev = {0.0, -0.04, 0.01, 0.02};
    const std::vector<double> next = {0.04, 0.02, -0.03, 0.02};
    const auto cmds = interpolate(prev, next, cfg);
    REQUIRE(cmds.size() == 5);
    for (std::size_t j = 1; j <= 5; ++j) {
        const auto& c = cmds[j - 1];
        REQUIRE(c.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            const double want = prev[i] + (double(j) / 5.0) * (next[i] - prev[i]);
            CHECK(c[i] == doctest::Approx(want).epsilon(1e-15));
        }
    }
    // The endpoint is exact to the bit, not merely close.
    CHECK(cmds.back() == next);
}

TEST_CASE("interpolated substep changes stay within the per-cycle limit") {
    InterpolationConfig cfg = base_config();
    // Worst case: a full-range swing of 0.04 in one policy period.
    const std::vector<double> prev = {-0.02, 0.02};
    const std::vector<double> next = {0.02, -0.02};
    const auto cmds = interpolate(prev, next, cfg);
    std::vector<double> last = prev;
    for (const auto& c : cmds) {
        for (std::size_t i = 0; i < c.size(); ++i)
            CHECK(std::abs(c[i] - last[i]) <= cfg.max_step_delta + 1e-15);
        last = c;
    }
}

TEST_CASE("safety filter acceptance is a max-norm threshold") {
    InterpolationConfig cfg = base_config();
    const std::vector<double> prev = {0.0, 0.0};
    CHECK(safety_accepts(prev, std::vector<double>{0.008, -0.008}, cfg));
    CHECK(safety_accepts(prev, std::vector<double>{0.0079, 0.0}, cfg));
    CHECK_FALSE(safety_accepts(prev, std::vector<double>{0.0081, 0.0}, cfg));
    CHECK_FALSE(safety_accepts(prev, std::vector<double>{0.0, -0.009}, cfg));
    CHECK(safety_accepts(prev, prev, cfg)); // zero change is fine
}

TEST_CASE("safety filter holds the baseline through rejection runs") {
    InterpolationConfig cfg = base_config();
    SafetyFilter f(std::vector<double>{0.0, 0.0}, cfg);

    CHECK(f.offer(std::vector<double>{0.005, 0.0}));
    CHECK(f.last_emitted() == std::vector<double>{0.005, 0.0});

    // A jump is rejected and the baseline stays.
    CHECK_FALSE(f.offer(std::vector<double>{0.05, 0.0}));
    CHECK(f.last_emitted() == std::vector<double>{0.005, 0.0});
    CHECK(f.resumes_after_rejection() == 0);

    // Still out of range relative to the held baseline: rejected again.
    CHECK_FALSE(f.offer(std::vector<double>{0.02, 0.0}));

    // Back within range: accepted, which counts as one resume.
    CHECK(f.offer(std::vector<double>{0.01, 0.0}));
    CHECK(f.resumes_after_rejection() == 1);
    CHECK(f.last_emitted() == std::vector<double>{0.01, 0.0});

    // A later ordinary accept is not a resume.
    CHECK(f.offer(std::vector<double>{0.012, 0.0}));
    CHECK(f.resumes_after_rejection() == 1);

    // A second rejection run followed by an accept bumps the counter again.
    CHECK_FALSE(f.offer(std::vector<double>{0.1, 0.0}));
    CHECK(f.offer(std::vector<double>{0.013, 0.0}));
    CHECK(f.resumes_after_rejection() == 2);
}

TEST_CASE("pipeline emits five commands per segment with exact timestamps") {
    InterpolationConfig cfg = base_config();
    const std::vector<std::vector<double>> actions = {
        {0.0, 0.0}, {0.01, -0.01}, {0.02, 0.0}};
    CommandStream out = run_pipeline(actions, cfg);
    REQUIRE(out.commands.size() == 10); // 2 segments * 5 substeps
    for (std::size_t i = 0; i < out.commands.size(); ++i) {
        CHECK(out.commands[i].timestamp ==
              doctest::Approx(double(i + 1) / 20.0).epsilon(1e-15));
        CHECK(out.commands[i].accepted);
    }
    // Segment endpoints appear verbatim.
    CHECK(out.commands[4].command == actions[1]);
    CHECK(out.commands[9].command == actions[2]);
    CHECK(out.resumes_after_rejection == 0);
}

TEST_CASE("pipeline rejects oversized jumps and resumes cleanly") {
    InterpolationConfig cfg = base_config();
    // Second action jumps far beyond what 5 substeps can cover at 0.008
    // per cycle; the third comes back near the held baseline.
    const std::vector<std::vector<double>> actions = {
        {0.0, 0.0}, {0.4, 0.0}, {0.005, 0.0}};
    CommandStream out = run_pipeline(actions, cfg);
    REQUIRE(out.commands.size() == 10);

    // Every substep toward the jump moves 0.08 > 0.008: all rejected.
    for (int i = 0; i < 5; ++i) CHECK_FALSE(out.commands[i].accepted);

    // On the way back the interpolation runs from the *policy* value 0.4
    // toward 0.01; early substeps are still far from the held baseline 0,
    // and the final ones land close enough to be accepted.
    CHECK(out.commands[9].accepted);
    CHECK(out.resumes_after_rejection >= 1);

    // The emitted trajectory never moves faster than the limit.
    std::vector<double> last = actions[0];
    for (const auto& c : out.commands) {
        if (!c.accepted) continue;
        for (std::size_t i = 0; i < c.command.size(); ++i)
            CHECK(std::abs(c.command[i] - last[i]) <= cfg.max_step_delta + 1e-15);
        last = c.command;
    }
}

TEST_CASE("pipeline handles a long designed command schedule") {
    InterpolationConfig cfg = base_config();
    // 101 policy actions = 100 segments: a smooth sweep, one spike, then a
    // return to smooth motion.
    std::vector<std::vector<double>> actions;
    for (int i = 0; i <= 100; ++i) {
        double v = 0.02 * std::sin(i * 0.2);
        if (i == 50) v = 5.0; // actuator-impossible spike
        actions.push_back({v, -v});
    }
    CommandStream out = run_pipeline(actions, cfg);
    CHECK(out.commands.size() == 500);

    std::size_t rejected = 0;
    std::vector<double> last = actions[0];
    for (const auto& c : out.commands) {
        if (!c.accepted) {
            ++rejected;
            continue;
        }
        for (std::size_t i = 0; i < c.command.size(); ++i)
            CHECK(std::abs(c.command[i] - last[i]) <= cfg.max_step_delta + 1e-15);
        last = c.command;
    }
    CHECK(rejected > 0);       // the spike had to be suppressed
    CHECK(rejected < 20);      // but the filter recovered promptly
    CHECK(out.resumes_after_rejection >= 1);

    // Without the spike nothing is rejected: the smooth schedule's substep
    // changes all sit within the limit.
    actions[50] = {0.02 * std::sin(50 * 0.2), -0.02 * std::sin(50 * 0.2)};
    CommandStream clean = run_pipeline(actions, cfg);
    for (const auto& c : clean.commands) CHECK(c.accepted);
    CHECK(clean.resumes_after_rejection == 0);
}

TEST_CASE("pipeline validates its input") {
    InterpolationConfig cfg = base_config();
    CHECK_THROWS_AS(run_pipeline({}, cfg), ConfigError);
    CHECK_THROWS_AS(run_pipeline({{0.0, 0.0}, {0.0}}, cfg), ShapeError);

    // A single action is just a baseline: nothing to emit, nothing wrong.
    CommandStream only_baseline = run_pipeline({{0.0, 0.0}}, cfg);
    CHECK(only_baseline.commands.empty());
}

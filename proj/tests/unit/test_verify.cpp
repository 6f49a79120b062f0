#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "switchbound/error.hpp"
#include "switchbound/verify.hpp"

using namespace switchbound;
using testing::vec;

TEST_SUITE("verify") {

TEST_CASE("trial delay schedule") {
    DelayKind kind{};
    CHECK(trial_delays(0, 4, 0.1, 3, &kind) == std::vector<double>(4, 0.0));
    CHECK(kind == DelayKind::Zero);
    CHECK(trial_delays(1, 4, 0.1, 3, &kind) == std::vector<double>(4, 0.1));
    CHECK(kind == DelayKind::Max);
    const auto d = trial_delays(5, 100, 0.1, 3, &kind);
    CHECK(kind == DelayKind::Uniform);
    for (double v : d) {
        CHECK(v >= 0.0);
        CHECK(v <= 0.1);
    }
    CHECK(d == trial_delays(5, 100, 0.1, 3));
    CHECK(d != trial_delays(5, 100, 0.1, 4));
}

TEST_CASE("water tank threshold controller") {
    const auto& wt = testing::watertank();
    REQUIRE(wt.controller.has_value());
    const auto bound = config_bound(wt);
    const auto plans = feedback_plan(wt.system, Box(vec({1.75}), vec({9.25})), *wt.controller, wt.tau, wt.step(), 20);
    ClosedLoopOptions opt;
    opt.trials = 12;
    opt.dt = wt.step();
    const auto report = verify_closed_loop(wt.system, wt.safe, bound.epsilon, wt.tau, wt.delta0, plans, opt);
    CHECK(report.passed());
    CHECK(report.trials.size() == 12);
    CHECK(report.trials[0].max_gap == 0.0);
    CHECK(report.worst_gap <= bound.epsilon + 1e-6);
    CHECK(report.worst_gap > 0.0);
    for (const auto& t : report.trials) {
        REQUIRE(t.per_period_gap.size() >= 1);
        for (std::size_t k = 0; k < t.per_period_gap.size() && k < bound.per_switch.size(); ++k)
            CHECK(t.per_period_gap[k] <= bound.per_switch[k] + 1e-5);
    }

    std::stringstream ss;
    write_report_json(ss, report);
    const auto j = nlohmann::json::parse(ss.str());
    CHECK(j["passed"] == true);
    CHECK(j["trials"].size() == 12);
    CHECK(j["trials"][1]["delays"] == "max");
}

TEST_CASE("zero delay bound gives identical trajectories") {
    const auto& wt = testing::watertank();
    const auto plans = feedback_plan(wt.system, Box(vec({2.0}), vec({9.0})), *wt.controller, wt.tau, wt.step(), 10);
    ClosedLoopOptions opt;
    opt.trials = 6;
    opt.dt = wt.step();
    const auto report = verify_closed_loop(wt.system, wt.safe, 0.0, wt.tau, 0.0, plans, opt);
    CHECK(report.passed());
    CHECK(report.worst_gap == 0.0);
}

TEST_CASE("a gap larger than the claimed bound is reported") {
    const auto& wt = testing::watertank();
    const auto plans = feedback_plan(wt.system, Box(vec({2.0}), vec({9.0})), *wt.controller, wt.tau, wt.step(), 10);
    ClosedLoopOptions opt;
    opt.trials = 4;
    opt.dt = wt.step();
    const auto report = verify_closed_loop(wt.system, wt.safe, 1e-4, wt.tau, wt.delta0, plans, opt);
    CHECK_FALSE(report.passed());
    CHECK(report.violations >= 1);
    CHECK(report.trials[0].passed());
}

TEST_CASE("argument validation") {
    const auto& wt = testing::watertank();
    const auto plans = feedback_plan(wt.system, wt.safe, *wt.controller, wt.tau, wt.step(), 2);
    ClosedLoopOptions opt;
    opt.dt = wt.step();
    CHECK_THROWS_AS((void)verify_closed_loop(wt.system, wt.safe, 0.1, wt.tau, wt.tau, plans, opt), ValidationError);
    opt.trials = 0;
    CHECK_THROWS_AS((void)verify_closed_loop(wt.system, wt.safe, 0.1, wt.tau, 0.1, plans, opt), ValidationError);
    const SafetyController none(wt.safe, std::vector<std::uint64_t>(3, 0));
    const SymbolicModel model(wt.safe, 4.0, wt.tau, 0.1, wt.system.modes());
    CHECK_THROWS_AS((void)symbolic_plan(none, model, 5), ValidationError);
}

TEST_CASE("symbolic controller closed loop on a scalar system") {
    const auto sys = testing::two_mode_1d();
    SymbolicOptions sopt;
    sopt.dt = 1e-3;
    const auto model = build_symbolic(sys, Box(vec({0.0}), vec({1.0})), 0.01, 0.5, sopt);
    const auto ctrl = synthesize_safety(model, Box(vec({0.2}), vec({0.8})));
    REQUIRE_FALSE(ctrl.empty());
    BoundResult b;
    b.epsilon = 0.05;
    ClosedLoopOptions opt;
    opt.trials = 8;
    opt.dt = 1e-3;
    const auto report = verify_closed_loop(sys, ctrl, model, b, 0.0, 15, opt);
    CHECK(report.worst_gap == 0.0);
    CHECK(report.trials.size() == 8);
}

}

#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "switchbound/bisim.hpp"
#include "switchbound/bound.hpp"
#include "switchbound/integrate.hpp"
#include "switchbound/transition.hpp"

using namespace switchbound;
using testing::vec;

TEST_SUITE("transition") {

TEST_CASE("switching instants") {
    const TSTiming t{0.5, 0.0005, 1e-3};
    CHECK(is_switching_time(0.0, t));
    CHECK(is_switching_time(0.5003, t));
    CHECK(is_switching_time(1.0005, t));
    CHECK_FALSE(is_switching_time(0.25, t));
    CHECK_FALSE(is_switching_time(1.001, t));
    CHECK_FALSE(is_switching_time(-0.1, t));
}

TEST_CASE("premetric follows the matching conditions") {
    const auto& dc = testing::dcdc();
    const TSTiming t{0.5, 0.0005, 1e-4};
    const TSState nominal{vec({1.5, 5.75}), 0.5, 1};
    const Vec drifted = flow_constant(dc.system, nominal.x, 1, 0.0003, 1e-4);
    const TSState delayed{drifted + vec({0.001, 0.0}), 0.5003, 1};
    CHECK(premetric(delayed, nominal, dc.system, t) == doctest::Approx(0.001).epsilon(1e-8));
    CHECK(std::isinf(premetric(TSState{delayed.x, delayed.t, 0}, nominal, dc.system, t)));
    CHECK(std::isinf(premetric(TSState{delayed.x, 0.5007, 1}, nominal, dc.system, t)));
    CHECK(std::isinf(premetric(TSState{delayed.x, 0.4999, 1}, nominal, dc.system, t)));
    CHECK(std::isinf(premetric(delayed, TSState{nominal.x, 0.6, 1}, dc.system, t)));
    // Not symmetric: the delay-free state goes second.
    CHECK(std::isinf(premetric(nominal, delayed, dc.system, t)));
    const double rv = relation_value(delayed, nominal, dc.system, dc.certificate, t);
    CHECK(rv == doctest::Approx(dc.certificate.V[0](delayed.x, drifted)).epsilon(1e-8));
}

TEST_CASE("successor integrates in the current mode") {
    const auto sys = testing::decay_1d();
    const TSState q{vec({1.0}), 0.0, 0};
    const auto next = ts_successor(sys, q, 1.0, 0, 1e-3);
    CHECK(next.t == 1.0);
    CHECK(next.x[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("premetric triangle inequality on sampled triples") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto* cfg : {&testing::dcdc(), &testing::watertank()}) {
        const TSTiming t{cfg->tau, cfg->delta0, cfg->tau / 1000};
        std::size_t finite = 0;
        auto random_state = [&](double time, Mode p) {
            Vec x(static_cast<Eigen::Index>(cfg->system.dim()));
            for (Eigen::Index i = 0; i < x.size(); ++i)
                x[i] = cfg->safe.lower()[i] + u(rng) * (cfg->safe.upper()[i] - cfg->safe.lower()[i]);
            return TSState{x, time, p};
        };
        for (int i = 0; i < 300; ++i) {
            const double k = std::floor(u(rng) * 5);
            const Mode p = rng() % 2;
            const double lag = u(rng) < 0.2 ? 0.0 : u(rng) * cfg->delta0;
            const TSState c = random_state(k * cfg->tau, p);
            const TSState b = random_state(k * cfg->tau + (u(rng) < 0.5 ? 0.0 : lag), u(rng) < 0.9 ? p : 1 - p);
            const TSState a = random_state(k * cfg->tau + lag, p);
            const double ab = premetric(a, b, cfg->system, t);
            const double bc = premetric(b, c, cfg->system, t);
            const double ac = premetric(a, c, cfg->system, t);
            if (!std::isfinite(ab) || !std::isfinite(bc) || !std::isfinite(ac)) continue;
            ++finite;
            CHECK(ac <= ab + bc + 1e-12);
        }
        CHECK(finite > 50);
    }
}

TEST_CASE("identical systems with zero delay stay at zero distance") {
    const auto& dc = testing::dcdc();
    BoundParams p{CertificateKind::Common, dc.tau, 0.0, dc.certificate.kappa, 0.41, 1.0};
    BisimulationOptions opt;
    opt.epsilon = 0.0;
    opt.samples = 20;
    opt.steps = 10;
    opt.dt = 5e-4;
    const auto r = check_bisimulation(dc.system, dc.certificate, p, dc.safe, opt);
    CHECK(r.passed());
    CHECK(r.max_premetric == 0.0);
}

TEST_CASE("DC-DC relation at the fixed point has no violations") {
    const auto& dc = testing::dcdc();
    const auto b = config_bound(dc);
    BisimulationOptions opt;
    opt.epsilon = b.epsilon;
    opt.samples = 40;
    opt.steps = 10;
    opt.dt = 5e-4;
    const auto r = check_bisimulation(dc.system, dc.certificate, b.params, dc.safe, opt);
    CHECK(r.plain_violations == 0);
    CHECK(r.incrementing_violations == 0);
    CHECK(r.max_premetric <= b.epsilon);
}

TEST_CASE("a precision far below the bound is violated under maximal delays") {
    const auto& dc = testing::dcdc();
    const auto b = config_bound(dc);
    BisimulationOptions opt;
    opt.epsilon = b.epsilon / 1000;
    opt.samples = 10;
    opt.steps = 20;
    opt.dt = 5e-4;
    opt.delays = DelayPattern::AllMax;
    const auto r = check_bisimulation(dc.system, dc.certificate, b.params, dc.safe, opt);
    CHECK(r.plain_violations > 0);
    CHECK(r.incrementing_violations == 0);
    REQUIRE_FALSE(r.recorded.empty());
    CHECK(r.recorded.front().condition == "plain");
    CHECK(r.recorded.front().step >= 1);
}

TEST_CASE("bisimulation check is deterministic for a seed") {
    const auto& wt = testing::watertank();
    const auto b = config_bound(wt);
    BisimulationOptions opt;
    opt.epsilon = b.epsilon;
    opt.samples = 12;
    opt.steps = 5;
    opt.dt = 0.05;
    opt.seed = 9;
    const auto r1 = check_bisimulation(wt.system, wt.certificate, b.params, wt.safe, opt);
    const auto r2 = check_bisimulation(wt.system, wt.certificate, b.params, wt.safe, opt);
    CHECK(r1.max_premetric == r2.max_premetric);
    CHECK(r1.worst_incrementing_excess == r2.worst_incrementing_excess);
    opt.seed = 10;
    const auto r3 = check_bisimulation(wt.system, wt.certificate, b.params, wt.safe, opt);
    CHECK(r3.max_premetric != r1.max_premetric);
}

}

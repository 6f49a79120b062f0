#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "switchbound/error.hpp"
#include "switchbound/safety.hpp"

using namespace switchbound;
using testing::vec;

namespace {

using State = SymbolicModel::State;

SymbolicModel random_model(std::mt19937_64& rng, std::size_t n, std::size_t m) {
    std::vector<std::string> names;
    for (std::size_t p = 0; p < m; ++p) names.push_back("m" + std::to_string(p));
    SymbolicModel model(Box(vec({0.0}), vec({static_cast<double>(n - 1)})), 1.0, 1.0, 0.1, names);
    std::uniform_int_distribution<std::size_t> target(0, n);
    for (std::size_t q = 0; q < n; ++q)
        for (Mode p = 0; p < m; ++p) model.set_successor(static_cast<State>(q), p, static_cast<State>(target(rng)));
    return model;
}

bool invariant(const SymbolicModel& model, std::uint32_t subset) {
    for (std::size_t q = 0; q < model.state_count(); ++q) {
        if (!((subset >> q) & 1U)) continue;
        bool ok = false;
        for (Mode p = 0; p < model.mode_count() && !ok; ++p) {
            const State t = model.successor(static_cast<State>(q), p);
            ok = t != model.sink() && ((subset >> t) & 1U);
        }
        if (!ok) return false;
    }
    return true;
}

std::uint32_t brute_force(const SymbolicModel& model, std::uint32_t initial) {
    std::uint32_t best = 0;
    for (std::uint32_t s = initial;; s = (s - 1) & initial) {
        if (invariant(model, s)) best |= s;
        if (s == 0) break;
    }
    return best;
}

std::uint32_t as_bits(const SafetyController& c) {
    std::uint32_t bits = 0;
    for (auto q : c.safe_states()) bits |= 1U << q;
    return bits;
}

}  // namespace

TEST_SUITE("safety") {

TEST_CASE("shrinking the DC-DC safe box") {
    const auto& dc = testing::dcdc();
    const Box s = shrink_box(dc.safe, 0.0294176 + 0.015);
    CHECK(s.lower()[0] == doctest::Approx(1.3444176).epsilon(1e-12));
    CHECK(s.upper()[0] == doctest::Approx(1.6555824).epsilon(1e-12));
    CHECK(s.lower()[1] == doctest::Approx(5.7444176).epsilon(1e-12));
    CHECK(s.upper()[1] == doctest::Approx(5.7555824).epsilon(1e-12));
    CHECK(shrink_box(dc.safe, 0.0) == dc.safe);
    try {
        (void)shrink_box(dc.safe, 0.06);
        FAIL("expected an empty shrunk box");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("axis 2") != std::string::npos);
    }
    CHECK_THROWS_AS((void)shrink_box(dc.safe, -1.0), ValidationError);
}

TEST_CASE("two-state example and all-to-Sink") {
    SymbolicModel m(Box(vec({0.0}), vec({1.0})), 1.0, 1.0, 0.1, {"a"});
    m.set_successor(0, 0, 0);
    m.set_successor(1, 0, m.sink());
    const auto c = synthesize_safety(m, m.box());
    CHECK(c.safe_count() == 1);
    CHECK(c.is_safe(0));
    CHECK_FALSE(c.is_safe(1));
    CHECK_FALSE(c.is_safe(m.sink()));
    CHECK(c.allowed_modes(0) == std::vector<Mode>{0});

    m.set_successor(0, 0, m.sink());
    CHECK(synthesize_safety(m, m.box()).empty());
}

TEST_CASE("fixed point matches exhaustive search on random models") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 11;
        const std::size_t m = 1 + rng() % 3;
        const auto model = random_model(rng, n, m);
        const std::uint32_t initial = static_cast<std::uint32_t>(rng() & ((1U << n) - 1));
        std::vector<bool> init(n);
        for (std::size_t q = 0; q < n; ++q) init[q] = (initial >> q) & 1U;
        const auto c = synthesize_safety(model, init, model.box());
        const std::uint32_t got = as_bits(c);
        CHECK(got == brute_force(model, initial));
        CHECK(invariant(model, got));
        for (std::size_t q = 0; q < n; ++q) {
            if ((got >> q) & 1U || !((initial >> q) & 1U)) continue;
            CHECK_FALSE(invariant(model, got | (1U << q)));
        }
        for (auto q : c.safe_states())
            for (Mode p = 0; p < m; ++p) {
                const State t = model.successor(q, p);
                const bool inside = t != model.sink() && ((got >> t) & 1U);
                CHECK(((c.allowed_mask(q) >> p) & 1U) == (inside ? 1U : 0U));
            }
    }
}

TEST_CASE("long replays stay in the safe set") {
    std::mt19937_64 rng(11);
    std::size_t replayed = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto model = random_model(rng, 12, 3);
        model.set_successor(0, 0, 0);
        const auto c = synthesize_safety(model, model.box());
        REQUIRE_FALSE(c.empty());
        for (auto q0 : c.safe_states()) {
            State q = q0;
            for (int k = 0; k < 10000; ++k) {
                const auto modes = c.allowed_modes(q);
                REQUIRE_FALSE(modes.empty());
                q = model.successor(q, modes[rng() % modes.size()]);
                REQUIRE(c.is_safe(q));
            }
            ++replayed;
        }
    }
    CHECK(replayed > 50);
}

TEST_CASE("signal extraction policies") {
    const auto sys = testing::two_mode_1d();
    SymbolicOptions opt;
    opt.dt = 1e-3;
    const auto model = build_symbolic(sys, Box(vec({0.0}), vec({1.0})), 0.01, 0.5, opt);
    const Box target(vec({0.2}), vec({0.8}));
    const auto c = synthesize_safety(model, target);
    REQUIRE_FALSE(c.empty());
    for (auto q : c.safe_states()) CHECK(target.contains(model.point(q)));

    const State q0 = model.nearest(vec({0.5}));
    REQUIRE(c.is_safe(q0));
    for (auto policy : {SignalPolicy::LeastMode, SignalPolicy::RoundRobin, SignalPolicy::SeededRandom}) {
        const auto ex = extract_signal(c, model, q0, 30, policy, 5);
        CHECK(ex.trace.size() == 31);
        CHECK(ex.modes.size() == 30);
        CHECK(ex.signal.events().size() == 30);
        for (std::size_t k = 0; k < ex.modes.size(); ++k) {
            CHECK(((c.allowed_mask(ex.trace[k]) >> ex.modes[k]) & 1U) == 1U);
            CHECK(model.successor(ex.trace[k], ex.modes[k]) == ex.trace[k + 1]);
            CHECK(c.is_safe(ex.trace[k + 1]));
        }
    }
    const auto a = extract_signal(c, model, q0, 30, SignalPolicy::SeededRandom, 9);
    const auto b = extract_signal(c, model, q0, 30, SignalPolicy::SeededRandom, 9);
    CHECK(a.modes == b.modes);

    const State outside = model.nearest(vec({0.0}));
    CHECK_THROWS_AS((void)extract_signal(c, model, outside, 5, SignalPolicy::LeastMode), ValidationError);
    CHECK_THROWS_AS((void)extract_signal(c, model, q0, 0, SignalPolicy::LeastMode), ValidationError);
}

TEST_CASE("controller JSON round trip") {
    const auto sys = testing::two_mode_1d();
    SymbolicOptions opt;
    opt.dt = 1e-3;
    const auto model = build_symbolic(sys, Box(vec({0.0}), vec({1.0})), 0.02, 0.5, opt);
    const auto c = synthesize_safety(model, Box(vec({0.2}), vec({0.8})));
    std::stringstream ss;
    save_controller(ss, c, model);
    const auto back = load_controller(ss, model);
    CHECK(back.masks() == c.masks());
    CHECK(back.target() == c.target());
    CHECK(back.safe_count() == c.safe_count());

    const auto other = build_symbolic(sys, Box(vec({0.0}), vec({1.0})), 0.05, 0.5, opt);
    std::stringstream again;
    save_controller(again, c, model);
    CHECK_THROWS_AS((void)load_controller(again, other), ValidationError);
}

}

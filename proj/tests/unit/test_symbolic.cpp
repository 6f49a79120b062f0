#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "switchbound/error.hpp"
#include "switchbound/integrate.hpp"
#include "switchbound/symbolic.hpp"

using namespace switchbound;
using testing::vec;

namespace {

LyapunovCertificate linear_cert(double kappa, double gamma) {
    LyapunovCertificate c;
    c.V = {PairFunction::expression("abs(x1-y1)", 1)};
    c.kappa = kappa;
    c.gamma = ClassK::linear(gamma);
    return c;
}

const SymbolicModel& dcdc_model() {
    static const SymbolicModel m = [] {
        const auto& dc = testing::dcdc();
        SymbolicOptions opt;
        opt.dt = dc.step();
        opt.epsilon2 = 0.015;
        return build_symbolic(dc.system, dc.safe, max_eta(dc.certificate, dc.tau, 0.015), dc.tau, opt);
    }();
    return m;
}

}  // namespace

TEST_SUITE("symbolic") {

TEST_CASE("feasible grid spacing") {
    const auto& dc = testing::dcdc();
    const double eta = max_eta(dc.certificate, dc.tau, 0.015);
    CHECK(std::abs(eta - 1.0333e-4) <= 1e-8);
    CHECK(1.0127 * eta <= (1 - std::exp(-0.014 * 0.5)) * 0.015 * (1 + 1e-12));
    CHECK(1.0127 * eta >= (1 - std::exp(-0.014 * 0.5)) * 0.015 * (1 - 1e-12));

    CHECK(max_eta(linear_cert(std::log(2.0), 1.0), 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    double prev = max_eta(dc.certificate, dc.tau, 0.1);
    for (double e2 : {0.05, 0.01, 0.001, 1e-6}) {
        const double eta_k = max_eta(dc.certificate, dc.tau, e2);
        CHECK(eta_k < prev);
        prev = eta_k;
    }
    CHECK_THROWS_AS((void)max_eta(dc.certificate, dc.tau, 0.0), ValidationError);
}

TEST_CASE("grid counts for the DC-DC safe box") {
    const auto& dc = testing::dcdc();
    const auto counts = grid_counts(dc.safe, max_eta(dc.certificate, dc.tau, 0.015));
    REQUIRE(counts.size() == 2);
    CHECK(std::abs(static_cast<double>(counts[0]) - 3872.0) <= 1.0);
    CHECK(std::abs(static_cast<double>(counts[1]) - 969.0) <= 1.0);
}

TEST_CASE("one-dimensional decay lands on the halfway grid point") {
    const auto sys = testing::decay_1d();
    const Box box(vec({0.0}), vec({1.0}));
    for (bool fast : {true, false}) {
        SymbolicOptions opt;
        opt.dt = 1e-3;
        opt.affine_fast_path = fast;
        const auto m = build_symbolic(sys, box, 0.1, std::log(2.0), opt);
        CHECK(m.state_count() == 11);
        CHECK(m.point(m.successor(10, 0))[0] == doctest::Approx(0.5));
        CHECK(m.successor(10, 0) == 5);
        CHECK(m.successor(0, 0) == 0);
        CHECK(m.successor(m.sink(), 0) == m.sink());
    }
}

TEST_CASE("nearest grid point breaks ties toward the lower index") {
    SymbolicModel m(Box(vec({0.0, 0.0}), vec({2.0, 2.0})), 0.5, 1.0, 0.1, {"a"});
    CHECK(m.counts() == std::vector<std::size_t>{5, 5});
    CHECK(m.index_tuple(m.nearest(vec({0.25, 0.75}))) == std::vector<std::size_t>{0, 1});
    CHECK(m.index_tuple(m.nearest(vec({0.26, 1.9}))) == std::vector<std::size_t>{1, 4});
    CHECK(m.nearest(vec({2.1, 1.0})) == m.sink());
    CHECK(m.state_of({3, 2}) == 17);
    CHECK(m.index_tuple(17) == std::vector<std::size_t>{3, 2});
    CHECK_THROWS_AS((void)m.state_of({5, 0}), OutOfRangeError);
}

TEST_CASE("affine period map matches RK4") {
    const auto& dc = testing::dcdc();
    for (Mode p = 0; p < 2; ++p) {
        const auto step = affine_period_map(*dc.system.field(p).affine(), dc.tau);
        const Vec x = vec({1.45, 5.77});
        CHECK((step(x) - flow_constant(dc.system, x, p, dc.tau, 1e-4)).norm() <= 1e-10);
    }
}

TEST_CASE("fast path and RK4 path agree on a DC-DC patch") {
    const auto& dc = testing::dcdc();
    const Box patch(vec({1.3, 5.7}), vec({1.7, 5.8}));
    SymbolicOptions fast, slow;
    fast.dt = slow.dt = 1e-3;
    slow.affine_fast_path = false;
    const auto a = build_symbolic(dc.system, patch, 0.004, dc.tau, fast);
    const auto b = build_symbolic(dc.system, patch, 0.004, dc.tau, slow);
    std::size_t differ = 0;
    for (std::size_t i = 0; i < a.transitions().size(); ++i)
        if (a.transitions()[i] != b.transitions()[i]) ++differ;
    CHECK(differ * 1000 <= a.transitions().size());
}

TEST_CASE("snap soundness and eps2 invariance on the DC-DC abstraction") {
    const auto& dc = testing::dcdc();
    const auto& m = dcdc_model();
    const double eta = m.eta();
    const auto& V = dc.certificate.V[0];
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> pick(0, m.state_count() - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t non_sink = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto q = static_cast<SymbolicModel::State>(pick(rng));
        const Mode p = rng() % 2;
        const auto t = m.successor(q, p);
        const Vec y = flow_constant(dc.system, m.point(q), p, dc.tau, 1e-4);
        if (t == m.sink()) {
            CHECK_FALSE(m.box().contains(y));
            continue;
        }
        ++non_sink;
        CHECK((y - m.point(t)).norm() <= std::sqrt(2.0) / 2 * eta * (1 + 1e-9));
    }
    CHECK(non_sink > 0);

    const double level = dc.certificate.alpha_lo(m.epsilon2());
    std::size_t stepped = 0;
    for (int i = 0; i < 500; ++i) {
        const Vec x = vec({1.3 + 0.4 * u(rng), 5.7 + 0.1 * u(rng)});
        const auto q = m.nearest(x);
        CHECK(V(x, m.point(q)) <= level);
        const Mode p = rng() % 2;
        const auto t = m.successor(q, p);
        if (t == m.sink()) continue;
        ++stepped;
        CHECK(V(flow_constant(dc.system, x, p, dc.tau, 1e-4), m.point(t)) <= level);
    }
    CHECK(stepped > 0);
}

TEST_CASE("halving the spacing preserves box membership of images") {
    const auto& dc = testing::dcdc();
    SymbolicOptions opt;
    opt.dt = dc.step();
    const auto coarse = build_symbolic(dc.system, dc.safe, 0.004, dc.tau, opt);
    const auto fine = build_symbolic(dc.system, dc.safe, 0.002, dc.tau, opt);
    for (std::size_t q = 0; q < coarse.state_count(); ++q) {
        auto tuple = coarse.index_tuple(static_cast<SymbolicModel::State>(q));
        for (auto& i : tuple) i *= 2;
        const auto fq = fine.state_of(tuple);
        for (Mode p = 0; p < 2; ++p)
            CHECK((coarse.successor(static_cast<SymbolicModel::State>(q), p) == coarse.sink()) ==
                  (fine.successor(fq, p) == fine.sink()));
    }
}

TEST_CASE("grid cap and warnings") {
    const auto& dc = testing::dcdc();
    SymbolicOptions opt;
    opt.dt = dc.step();
    opt.max_states = 1000;
    try {
        (void)build_symbolic(dc.system, dc.safe, 1e-3, dc.tau, opt);
        FAIL("expected the grid cap to trigger");
    } catch (const OutOfRangeError& e) {
        CHECK(std::string(e.what()).find("epsilon2") != std::string::npos);
    }
    opt.max_states = kDefaultGridCap;
    opt.eta_limit = 1e-3;
    const auto m = build_symbolic(dc.system, dc.safe, 0.01, dc.tau, opt);
    CHECK(m.warnings.size() == 1);
}

TEST_CASE("model JSON round trip is exact") {
    const auto& dc = testing::dcdc();
    SymbolicOptions opt;
    opt.dt = dc.step();
    opt.epsilon2 = 0.05;
    const auto m = build_symbolic(dc.system, dc.safe, max_eta(dc.certificate, dc.tau, 0.05), dc.tau, opt);
    std::stringstream ss;
    save_symbolic(ss, m);
    const auto back = load_symbolic(ss);
    CHECK(back.eta() == m.eta());
    CHECK(back.tau() == m.tau());
    CHECK(back.epsilon2() == m.epsilon2());
    CHECK(back.box() == m.box());
    CHECK(back.counts() == m.counts());
    CHECK(back.mode_names() == m.mode_names());
    CHECK(back.transitions() == m.transitions());
    std::stringstream broken("{\"eta\": 1}");
    CHECK_THROWS_AS((void)load_symbolic(broken), ValidationError);
}

}

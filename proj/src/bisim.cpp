#include "switchbound/bisim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "switchbound/error.hpp"
#include "switchbound/integrate.hpp"
#include "switchbound/parallel.hpp"

namespace switchbound {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

double draw_delay(std::mt19937_64& rng, DelayPattern pattern, std::size_t sample, double delta0) {
    if (pattern == DelayPattern::AllZero || (pattern == DelayPattern::Randomized && sample == 0)) return 0.0;
    if (pattern == DelayPattern::AllMax || (pattern == DelayPattern::Randomized && sample == 1)) return delta0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double coin = u(rng);
    if (coin < 0.25) return 0.0;
    if (coin < 0.5) return delta0;
    return std::min(delta0, u(rng) * delta0);
}

Mode choose_mode(const SwitchedSystem& sys, const Vec& x, const Box& region, double tau, double dt,
                 std::mt19937_64& rng) {
    std::vector<Mode> inside;
    Mode fallback = 0;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (Mode p = 0; p < sys.mode_count(); ++p) {
        const Vec next = flow_constant(sys, x, p, tau, dt);
        const double margin = region.margin(next);
        if (margin >= 0) inside.push_back(p);
        if (margin > best_margin) {
            best_margin = margin;
            fallback = p;
        }
    }
    if (inside.empty()) return fallback;
    std::uniform_int_distribution<std::size_t> pick(0, inside.size() - 1);
    return inside[pick(rng)];
}

Vec perturb_within(const PairFunction& V, const ClassK& alpha_lo, const Vec& center, double eps,
                   std::mt19937_64& rng) {
    if (eps <= 0) return center;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double level = alpha_lo(eps);
    const auto n = static_cast<double>(center.size());
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec dir(center.size());
        for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = gauss(rng);
        const double len = dir.norm();
        if (len == 0) continue;
        const Vec candidate = center + dir * (eps * std::pow(u(rng), 1.0 / n) / len);
        if (V(candidate, center) <= level) return candidate;
    }
    return center;
}

struct SampleOutcome {
    std::size_t plain = 0;
    std::size_t incrementing = 0;
    double max_premetric = 0.0;
    double worst_inc = -std::numeric_limits<double>::infinity();
    double worst_plain = -std::numeric_limits<double>::infinity();
    std::vector<BisimulationViolation> recorded;
};

}  // namespace

BisimulationReport check_bisimulation(const SwitchedSystem& sys, const LyapunovCertificate& cert,
                                      const BoundParams& params, const Box& region,
                                      const BisimulationOptions& options) {
    if (options.samples < 1) throw ValidationError("check_bisimulation needs at least one sample");
    if (!(options.epsilon >= 0)) throw ValidationError("precision must be nonnegative");
    if (!(options.dt > 0)) throw ValidationError("integration step must be positive");
    cert.validate(sys);
    const TSTiming timing{params.tau, params.delta0, options.dt};

    std::vector<SampleOutcome> outcomes(options.samples);
    parallel_for(options.samples, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            SampleOutcome& out = outcomes[s];
            std::mt19937_64 rng(derive_seed(options.seed, s));
            std::uniform_real_distribution<double> u(0.0, 1.0);

            Vec x_nominal(sys.dim());
            for (Eigen::Index i = 0; i < x_nominal.size(); ++i)
                x_nominal[i] = region.lower()[i] + u(rng) * (region.upper()[i] - region.lower()[i]);
            Mode p = choose_mode(sys, x_nominal, region, params.tau, options.dt, rng);
            const double d0 = draw_delay(rng, options.delays, s, params.delta0);
            const Vec anchor = flow_constant(sys, x_nominal, p, d0, options.dt);
            const Vec x_delayed = perturb_within(cert.for_mode(p), cert.alpha_lo, anchor, options.epsilon, rng);

            TSState q_delayed{x_delayed, d0, p};
            TSState q_nominal{x_nominal, 0.0, p};
            double eps_k = options.epsilon;

            auto check = [&](std::size_t step) {
                const double pm = premetric(q_delayed, q_nominal, sys, timing);
                const double rv = relation_value(q_delayed, q_nominal, sys, cert, timing);
                out.max_premetric = std::max(out.max_premetric, pm);
                out.worst_inc = std::max(out.worst_inc, pm - eps_k);
                out.worst_plain = std::max(out.worst_plain, pm - options.epsilon);
                auto test = [&](const char* quantity, const char* condition, double value, double bound,
                                std::size_t& counter) {
                    if (value <= bound + options.slack * std::max(1.0, bound)) return;
                    ++counter;
                    if (out.recorded.size() < options.max_recorded)
                        out.recorded.push_back({s, step, quantity, condition, value, bound});
                };
                test("premetric", "plain", pm, options.epsilon, out.plain);
                test("relation", "plain", rv, cert.alpha_lo(options.epsilon), out.plain);
                test("premetric", "incrementing", pm, eps_k, out.incrementing);
                test("relation", "incrementing", rv, cert.alpha_lo(eps_k), out.incrementing);
            };

            check(0);
            for (std::size_t k = 1; k <= options.steps; ++k) {
                const double t_nominal = static_cast<double>(k) * params.tau;
                const double t_delayed = t_nominal + draw_delay(rng, options.delays, s, params.delta0);
                TSState next_nominal{flow_constant(sys, q_nominal.x, q_nominal.p, params.tau, options.dt, q_nominal.t),
                                     t_nominal, 0};
                const Mode next = choose_mode(sys, next_nominal.x, region, params.tau, options.dt, rng);
                next_nominal.p = next;
                q_delayed = ts_successor(sys, q_delayed, t_delayed, next, options.dt);
                q_nominal = std::move(next_nominal);
                eps_k = increment(cert.alpha_lo, params, eps_k);
                check(k);
            }
        }
    });

    BisimulationReport report;
    report.samples = options.samples;
    report.steps = options.steps;
    for (auto& o : outcomes) {
        report.plain_violations += o.plain;
        report.incrementing_violations += o.incrementing;
        report.max_premetric = std::max(report.max_premetric, o.max_premetric);
        report.worst_incrementing_excess = std::max(report.worst_incrementing_excess, o.worst_inc);
        report.worst_plain_excess = std::max(report.worst_plain_excess, o.worst_plain);
        for (auto& v : o.recorded)
            if (report.recorded.size() < options.max_recorded) report.recorded.push_back(std::move(v));
    }
    return report;
}

}  // namespace switchbound

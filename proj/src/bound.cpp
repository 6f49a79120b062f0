#include "switchbound/bound.hpp"

#include <cmath>
#include <limits>

#include "switchbound/error.hpp"

namespace switchbound {

namespace {

void check_params(const BoundParams& p) {
    if (!(p.tau > 0) || !std::isfinite(p.tau)) throw ValidationError("period must be positive");
    if (!(p.delta0 >= 0) || !(p.delta0 < p.tau)) throw ValidationError("delay bound must be < period");
    if (!(p.kappa > 0) || !std::isfinite(p.kappa)) throw ValidationError("kappa must be positive");
    if (!(p.nu >= 0) || !std::isfinite(p.nu)) throw ValidationError("intermode derivative bound must be >= 0");
    if (!(p.mu >= 1) || !std::isfinite(p.mu)) throw ValidationError("mu must be >= 1");
}

BoundResult assemble(const ClassK& alpha_lo, const BoundParams& p, std::size_t len) {
    check_params(p);
    BoundResult out;
    out.params = p;
    const double r = contraction_factor(p);
    out.dwell_time_ok = r < 1.0;
    if (out.dwell_time_ok) {
        const double C = p.nu * p.delta0 / (1.0 - r);
        out.fixed_point = alpha_lo.inverse(C);
    } else {
        out.fixed_point = std::numeric_limits<double>::infinity();
    }
    out.epsilon = out.fixed_point;
    out.per_switch.reserve(len);
    double eps = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
        out.per_switch.push_back(eps);
        eps = increment(alpha_lo, p, eps);
    }
    return out;
}

}  // namespace

double contraction_factor(const BoundParams& p) { return p.mu * std::exp(-p.kappa * (p.tau - p.delta0)); }

double increment(const ClassK& alpha_lo, const BoundParams& p, double eps) {
    return alpha_lo.inverse(contraction_factor(p) * alpha_lo(eps) + p.nu * p.delta0);
}

double per_switch_closed_form(const ClassK& alpha_lo, const BoundParams& p, std::size_t k) {
    const double r = contraction_factor(p);
    const double c = p.nu * p.delta0;
    const auto kd = static_cast<double>(k);
    if (r == 1.0) return alpha_lo.inverse(kd * c);
    const double C = c / (1.0 - r);
    return alpha_lo.inverse(C - std::pow(r, kd) * C);
}

double replay_per_switch(const ClassK& alpha_lo, const BoundParams& p, double start, std::size_t k) {
    double eps = start;
    for (std::size_t i = 0; i < k; ++i) eps = increment(alpha_lo, p, eps);
    return eps;
}

BoundResult bound_common(const LyapunovCertificate& cert, double nu, double tau, double delta0,
                         std::size_t per_switch_len) {
    if (cert.kind != CertificateKind::Common) throw ValidationError("bound_common needs a common certificate");
    BoundParams p{CertificateKind::Common, tau, delta0, cert.kappa, nu, 1.0};
    return assemble(cert.alpha_lo, p, per_switch_len);
}

BoundResult bound_multiple(const LyapunovCertificate& cert, double nu_prime, double tau, double delta0,
                           std::size_t per_switch_len) {
    if (cert.kind != CertificateKind::Multiple) throw ValidationError("bound_multiple needs a multiple certificate");
    BoundParams p{CertificateKind::Multiple, tau, delta0, cert.kappa, nu_prime, cert.mu};
    return assemble(cert.alpha_lo, p, per_switch_len);
}

BoundResult compute_bound(const LyapunovCertificate& cert, double nu, double tau, double delta0,
                          std::size_t per_switch_len) {
    return cert.kind == CertificateKind::Common ? bound_common(cert, nu, tau, delta0, per_switch_len)
                                                : bound_multiple(cert, nu, tau, delta0, per_switch_len);
}

}  // namespace switchbound

#pragma once

#include <cstddef>
#include <vector>

#include "switchbound/certificate.hpp"

namespace switchbound {

/// Parameters shared by the common and multiple delay bounds.
struct BoundParams {
    CertificateKind kind = CertificateKind::Common;
    double tau = 0.0;
    double delta0 = 0.0;
    double kappa = 0.0;
    /// nu (common) or nu' (multiple).
    double nu = 0.0;
    double mu = 1.0;
};

struct BoundResult {
    /// Time-invariant bound on |x_delayed(t) - x_nominal(t)|; +inf when the dwell-time condition fails.
    double epsilon = 0.0;
    double fixed_point = 0.0;
    /// per_switch[k] = g^k(0): bound valid on [k*tau, (k+1)*tau).
    std::vector<double> per_switch;
    /// tau - delta0 > log(mu) / kappa.
    bool dwell_time_ok = true;
    BoundParams params;
};

inline constexpr std::size_t kDefaultPerSwitchLength = 64;

/// Contraction of alpha_lo(error) across one period: mu * exp(-kappa (tau - delta0)).
[[nodiscard]] double contraction_factor(const BoundParams& p);

/// One step of the error recurrence:
/// g(eps) = alpha_lo^-1(mu exp(-kappa (tau - delta0)) alpha_lo(eps) + nu delta0).
[[nodiscard]] double increment(const ClassK& alpha_lo, const BoundParams& p, double eps);

/// alpha_lo^-1(C (1 - r^k)) with r the contraction factor and C = nu delta0 / (1 - r);
/// equals k nu delta0 in alpha-space when r = 1.
[[nodiscard]] double per_switch_closed_form(const ClassK& alpha_lo, const BoundParams& p, std::size_t k);

/// Bound from a common certificate. Throws ValidationError on bad parameters.
[[nodiscard]] BoundResult bound_common(const LyapunovCertificate& cert, double nu, double tau, double delta0,
                                       std::size_t per_switch_len = kDefaultPerSwitchLength);

/// Bound from multiple certificates. A failed dwell-time condition yields an infinite
/// fixed point while the per-switch sequence is still produced.
[[nodiscard]] BoundResult bound_multiple(const LyapunovCertificate& cert, double nu_prime, double tau,
                                         double delta0, std::size_t per_switch_len = kDefaultPerSwitchLength);

/// Dispatches on cert.kind.
[[nodiscard]] BoundResult compute_bound(const LyapunovCertificate& cert, double nu, double tau, double delta0,
                                        std::size_t per_switch_len = kDefaultPerSwitchLength);

/// Lower class-K function of a bound's certificate, replayed through increment().
[[nodiscard]] double replay_per_switch(const ClassK& alpha_lo, const BoundParams& p, double start, std::size_t k);

}  // namespace switchbound

#include "switchbound/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "switchbound/error.hpp"
#include "switchbound/parallel.hpp"

namespace switchbound {

Box::Box(Vec lower, Vec upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() == 0 || lower_.size() != upper_.size()) throw ValidationError("box bounds must have equal, positive length");
    for (Eigen::Index i = 0; i < lower_.size(); ++i)
        if (!(lower_[i] < upper_[i]) || !std::isfinite(lower_[i]) || !std::isfinite(upper_[i]))
            throw ValidationError("box is degenerate on axis " + std::to_string(i + 1));
}

bool Box::contains(const Vec& x, double tol) const {
    for (Eigen::Index i = 0; i < lower_.size(); ++i)
        if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
    return true;
}

double Box::margin(const Vec& x) const {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < lower_.size(); ++i) m = std::min({m, x[i] - lower_[i], upper_[i] - x[i]});
    return m;
}

std::size_t Box::grid_size(std::size_t per_axis) const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < dim(); ++i) n *= per_axis;
    return n;
}

Vec Box::grid_point(std::size_t index, std::size_t per_axis) const {
    Vec x(lower_.size());
    for (Eigen::Index i = lower_.size() - 1; i >= 0; --i) {
        const std::size_t k = index % per_axis;
        index /= per_axis;
        const double frac = per_axis > 1 ? static_cast<double>(k) / static_cast<double>(per_axis - 1) : 0.0;
        x[i] = k + 1 == per_axis ? upper_[i] : lower_[i] + frac * (upper_[i] - lower_[i]);
    }
    return x;
}

std::vector<std::string> pair_variable_names(std::size_t dim) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
    for (std::size_t i = 1; i <= dim; ++i) names.push_back("y" + std::to_string(i));
    return names;
}

PairFunction PairFunction::quadratic(Mat M) {
    if (M.rows() == 0 || M.rows() != M.cols()) throw ValidationError("Lyapunov matrix must be square");
    if (!M.allFinite() || (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ValidationError("Lyapunov matrix must be finite and symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> eig(M);
    if (eig.eigenvalues().minCoeff() <= 0) throw ValidationError("Lyapunov matrix must be positive definite");
    PairFunction f;
    f.dim_ = static_cast<std::size_t>(M.rows());
    f.form_ = std::move(M);
    return f;
}

PairFunction PairFunction::expression(Expression e) {
    if (e.variables().size() % 2 != 0 || e.variables().empty())
        throw ValidationError("pair-function expression needs variables x1..xn, y1..yn");
    PairFunction f;
    f.dim_ = e.variables().size() / 2;
    f.form_ = std::move(e);
    return f;
}

PairFunction PairFunction::expression(const std::string& source, std::size_t dim) {
    return expression(parse_expression(source, pair_variable_names(dim)));
}

double PairFunction::operator()(const Vec& x, const Vec& y) const {
    if (const Mat* M = matrix()) {
        const Vec e = x - y;
        return std::sqrt(std::max(0.0, e.dot(*M * e)));
    }
    double buf[64];
    std::vector<double> heap;
    double* v = buf;
    if (2 * dim_ > 64) {
        heap.resize(2 * dim_);
        v = heap.data();
    }
    for (std::size_t i = 0; i < dim_; ++i) {
        v[i] = x[static_cast<Eigen::Index>(i)];
        v[dim_ + i] = y[static_cast<Eigen::Index>(i)];
    }
    return std::get<Expression>(form_).eval(std::span<const double>(v, 2 * dim_));
}

void PairFunction::gradient(const Vec& x, const Vec& y, Vec& gx, Vec& gy) const {
    gx.resize(x.size());
    gy.resize(y.size());
    if (const Mat* M = matrix()) {
        const Vec e = x - y;
        const Vec Me = *M * e;
        const double v = std::sqrt(std::max(0.0, e.dot(Me)));
        if (v == 0.0) {
            gx.setZero();
            gy.setZero();
            return;
        }
        gx = Me / v;
        gy = -gx;
        return;
    }
    std::vector<double> v(2 * dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        v[i] = x[static_cast<Eigen::Index>(i)];
        v[dim_ + i] = y[static_cast<Eigen::Index>(i)];
    }
    const Expression& e = std::get<Expression>(form_);
    for (std::size_t i = 0; i < dim_; ++i) {
        gx[static_cast<Eigen::Index>(i)] = e.partial(v, i);
        gy[static_cast<Eigen::Index>(i)] = e.partial(v, dim_ + i);
    }
}

std::optional<double> PairFunction::lipschitz_bound() const {
    if (const Mat* M = matrix()) {
        Eigen::SelfAdjointEigenSolver<Mat> eig(*M);
        return std::sqrt(eig.eigenvalues().maxCoeff());
    }
    return std::nullopt;
}

void LyapunovCertificate::validate(const SwitchedSystem& sys) const {
    if (!(kappa > 0) || !std::isfinite(kappa)) throw ValidationError("certificate kappa must be positive");
    if (kind == CertificateKind::Common) {
        if (V.size() != 1) throw ValidationError("a common certificate has exactly one function");
        if (mu != 1.0) throw ValidationError("a common certificate has mu = 1");
    } else {
        if (V.size() != sys.mode_count()) throw ValidationError("a multiple certificate needs one function per mode");
        if (!(mu >= 1.0) || !std::isfinite(mu)) throw ValidationError("certificate mu must be >= 1");
    }
    for (const auto& f : V)
        if (f.dim() != sys.dim()) throw ValidationError("certificate dimension does not match the system");
    if (nu && !(*nu >= 0)) throw ValidationError("pinned nu must be nonnegative");
}

bool CertificateReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

std::string format_point(const Vec& v) {
    std::ostringstream os;
    os.precision(10);
    os << '(';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ')';
    return os.str();
}

void record(CheckResult& c, double excess, const Vec& x, const Vec& y, const std::string& modes) {
    ++c.samples;
    if (excess > c.worst_excess) {
        c.worst_excess = excess;
        c.worst_sample = "x=" + format_point(x) + " y=" + format_point(y) + " " + modes;
    }
}

std::vector<Vec> grid_points(const Box& box, std::size_t per_axis) {
    if (per_axis < 2) throw ValidationError("grid needs at least 2 points per axis");
    std::vector<Vec> pts;
    const std::size_t n = box.grid_size(per_axis);
    pts.reserve(n);
    for (std::size_t k = 0; k < n; ++k) pts.push_back(box.grid_point(k, per_axis));
    return pts;
}

}  // namespace

CertificateReport check_certificate(const SwitchedSystem& sys, const LyapunovCertificate& cert, const Box& box,
                                    std::size_t per_axis) {
    cert.validate(sys);
    if (box.dim() != sys.dim()) throw ValidationError("box dimension does not match the system");
    const auto pts = grid_points(box, per_axis);
    const std::size_t m = sys.mode_count();
    const std::size_t funcs = cert.V.size();

    CheckResult lower, upper, decay, ratio;
    lower.name = "sandwich_lower";
    upper.name = "sandwich_upper";
    decay.name = "decay";
    ratio.name = "mode_ratio";
    std::vector<Vec> f(m * pts.size());
    for (Mode p = 0; p < m; ++p)
        for (std::size_t i = 0; i < pts.size(); ++i) f[p * pts.size() + i] = sys.field(p)(pts[i]);

    Vec gx, gy;
    std::vector<double> vals(funcs);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const Vec& x = pts[i];
            const Vec& y = pts[j];
            const double dist = (x - y).norm();
            for (std::size_t k = 0; k < funcs; ++k) vals[k] = cert.V[k](x, y);
            for (std::size_t k = 0; k < funcs; ++k) {
                const std::string tag =
                    cert.kind == CertificateKind::Common ? "V" : "V_" + sys.mode_name(k);
                record(lower, cert.alpha_lo(dist) - vals[k], x, y, tag);
                record(upper, vals[k] - cert.alpha_hi(dist), x, y, tag);
            }
            if (dist < kDiagonalExclusion) continue;
            for (Mode p = 0; p < m; ++p) {
                const PairFunction& V = cert.for_mode(p);
                V.gradient(x, y, gx, gy);
                const double lie = gx.dot(f[p * pts.size() + i]) + gy.dot(f[p * pts.size() + j]);
                const double v = cert.kind == CertificateKind::Common ? vals[0] : vals[p];
                record(decay, lie + cert.kappa * v, x, y, "mode=" + sys.mode_name(p));
            }
            if (cert.kind == CertificateKind::Multiple)
                for (std::size_t p = 0; p < funcs; ++p)
                    for (std::size_t q = 0; q < funcs; ++q)
                        if (p != q)
                            record(ratio, vals[p] - cert.mu * vals[q], x, y,
                                   "V_" + sys.mode_name(p) + " vs mu*V_" + sys.mode_name(q));
        }
    }
    CertificateReport report;
    for (CheckResult* c : {&lower, &upper, &decay, &ratio}) {
        if (c == &ratio && cert.kind != CertificateKind::Multiple) continue;
        c->passed = c->worst_excess <= kCertificateSlack;
        report.checks.push_back(*c);
    }
    return report;
}

NuEstimate estimate_nu(const SwitchedSystem& sys, const LyapunovCertificate& cert, const Box& box,
                       std::size_t per_axis, double safety_factor) {
    cert.validate(sys);
    if (box.dim() != sys.dim()) throw ValidationError("box dimension does not match the system");
    if (!(safety_factor >= 1.0)) throw ValidationError("nu safety factor must be >= 1");
    NuEstimate out;
    out.safety_factor = safety_factor;
    const std::size_t m = sys.mode_count();
    if (m < 2) return out;

    const auto pts = grid_points(box, per_axis);
    const std::size_t N = pts.size();
    std::vector<Vec> f(m * N);
    for (Mode p = 0; p < m; ++p)
        for (std::size_t i = 0; i < N; ++i) f[p * N + i] = sys.field(p)(pts[i]);

    struct Best {
        double value = -std::numeric_limits<double>::infinity();
        std::size_t i = 0, j = 0;
        Mode p = 0, q = 0;
        std::size_t samples = 0;
    };
    std::vector<Best> partial(N);
    parallel_for(N, [&](std::size_t begin, std::size_t end) {
        Vec gx, gy;
        for (std::size_t i = begin; i < end; ++i) {
            Best best;
            for (std::size_t j = 0; j < N; ++j) {
                if ((pts[i] - pts[j]).norm() < kDiagonalExclusion) continue;
                // For a common certificate the gradient does not depend on the mode pair.
                for (Mode q = 0; q < m; ++q) {
                    const PairFunction& V = cert.for_mode(q);
                    if (cert.kind == CertificateKind::Multiple || q == 0) V.gradient(pts[i], pts[j], gx, gy);
                    const double gyfq = gy.dot(f[q * N + j]);
                    for (Mode p = 0; p < m; ++p) {
                        if (p == q) continue;
                        const double v = gx.dot(f[p * N + i]) + gyfq;
                        ++best.samples;
                        if (v > best.value) best = {v, i, j, p, q, best.samples};
                    }
                }
            }
            partial[i] = best;
        }
    });
    Best best;
    for (const auto& b : partial) {
        best.samples += b.samples;
        if (b.value > best.value) {
            const auto s = best.samples;
            best = b;
            best.samples = s;
        }
    }
    out.samples = best.samples;
    out.raw_max = std::max(0.0, best.value);
    out.value = out.raw_max * safety_factor;
    out.argmax_x = pts[best.i];
    out.argmax_y = pts[best.j];
    out.from_mode = best.p;
    out.to_mode = best.q;
    return out;
}

}  // namespace switchbound

#include "bqrec/basis.hpp"

#include "bqrec/errors.hpp"
#include "bqrec/sine_integral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace bqrec {
namespace {

void require_positive_size(int K) {
    if (K < 1) {
        throw ArgumentError("basis size K must be positive, got " + std::to_string(K));
    }
}

void require_in_interval(const BasisFamily& basis, double t) {
    if (!std::isfinite(t)) {
        throw DomainError("basis evaluation at a non-finite time");
    }
    if (!basis.interval().contains(t)) {
        throw DomainError("time " + std::to_string(t) + " outside sampling interval [" +
                          std::to_string(basis.interval().lo) + ", " +
                          std::to_string(basis.interval().hi) + "]");
    }
}

}  // namespace

std::string_view to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::Monomial:
            return "monomial";
        case BasisKind::TrigPolynomial:
            return "trig";
        case BasisKind::ComplexExponential:
            return "complex_exponential";
        case BasisKind::IntegratedSinc:
            return "integrated_sinc";
    }
    return "unknown";
}

BasisKind parse_basis_kind(std::string_view name) {
    if (name == "monomial") return BasisKind::Monomial;
    if (name == "trig" || name == "trig_polynomial") return BasisKind::TrigPolynomial;
    if (name == "complex_exponential") return BasisKind::ComplexExponential;
    if (name == "integrated_sinc") return BasisKind::IntegratedSinc;
    throw ArgumentError("unknown basis kind '" + std::string(name) + "'");
}

BasisFamily::BasisFamily(BasisKind kind, int K, Interval interval)
    : kind_(kind), K_(K), interval_(interval) {
    require_positive_size(K);
    if (!std::isfinite(interval.lo) || !std::isfinite(interval.hi) || !(interval.lo < interval.hi)) {
        throw DomainError("sampling interval must be a finite, non-empty [lo, hi]");
    }
}

BasisFamily BasisFamily::monomial(int K, Interval interval) {
    BasisFamily b(BasisKind::Monomial, K, interval);
    b.degrees_.reserve(K);
    for (int k = 0; k < K; ++k) {
        b.degrees_.push_back({k});
    }
    return b;
}

BasisFamily BasisFamily::trig_polynomial(int K) {
    BasisFamily b(BasisKind::TrigPolynomial, K, {-std::numbers::pi, std::numbers::pi});
    b.degrees_.reserve(K);
    b.degrees_.push_back({0, 0});
    for (int k = 1; k < K; ++k) {
        const int m = (k + 1) / 2;
        if (k % 2 == 1) {
            b.degrees_.push_back({0, m});  // cos(m t) = T_m(X)
        } else {
            b.degrees_.push_back({1, m - 1});  // sin(m t) = Y U_{m-1}(X)
        }
    }
    return b;
}

BasisFamily BasisFamily::complex_exponential(int K) {
    BasisFamily b(BasisKind::ComplexExponential, K, {-std::numbers::pi, std::numbers::pi});
    b.degrees_.reserve(K);
    for (int k = 0; k < K; ++k) {
        b.degrees_.push_back({k});
    }
    return b;
}

BasisFamily BasisFamily::integrated_sinc(int K, double omega, double knot_offset, double lower,
                                         Interval interval) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw DomainError("integrated sinc bandwidth must be positive and finite");
    }
    if (!std::isfinite(knot_offset) || !std::isfinite(lower)) {
        throw DomainError("integrated sinc parameters must be finite");
    }
    if (lower > interval.lo) {
        throw DomainError("integrated sinc lower limit must not exceed the interval start");
    }
    BasisFamily b(BasisKind::IntegratedSinc, K, interval);
    b.omega_ = omega;
    b.knot_offset_ = knot_offset;
    b.lower_ = lower;
    return b;
}

double BasisFamily::knot(int k) const {
    if (kind_ != BasisKind::IntegratedSinc) {
        throw UnsupportedError("knots are only defined for integrated sinc bases");
    }
    return k * std::numbers::pi / omega_ + knot_offset_;
}

double sinc(double omega, double t) {
    const double x = omega * t;
    if (std::abs(x) < 1e-8) {
        return omega / std::numbers::pi * (1.0 - x * x / 6.0);
    }
    return std::sin(x) / (std::numbers::pi * t);
}

double eval_integrated_sinc(const BasisFamily& basis, double lower, double t, int k) {
    if (basis.kind() != BasisKind::IntegratedSinc) {
        throw UnsupportedError("eval_integrated_sinc requires an integrated sinc basis");
    }
    if (!std::isfinite(lower) || !std::isfinite(t)) {
        throw DomainError("eval_integrated_sinc: non-finite limits");
    }
    if (lower > t) {
        throw DomainError("eval_integrated_sinc: lower limit exceeds upper limit");
    }
    if (k < 0 || k >= basis.size()) {
        throw ArgumentError("eval_integrated_sinc: index out of range");
    }
    if (lower == t) {
        return 0.0;
    }
    const double tk = basis.knot(k);
    const double w = basis.omega();
    return (sine_integral(w * (t - tk)) - sine_integral(w * (lower - tk))) / std::numbers::pi;
}

Vector eval_basis(const BasisFamily& basis, double t) {
    require_in_interval(basis, t);
    const int K = basis.size();
    Vector f(K);
    switch (basis.kind()) {
        case BasisKind::Monomial: {
            double p = 1.0;
            for (int k = 0; k < K; ++k) {
                f[k] = p;
                p *= t;
            }
            break;
        }
        case BasisKind::TrigPolynomial: {
            f[0] = 1.0;
            for (int k = 1; k < K; ++k) {
                const int m = (k + 1) / 2;
                f[k] = (k % 2 == 1) ? std::cos(m * t) : std::sin(m * t);
            }
            break;
        }
        case BasisKind::IntegratedSinc:
            for (int k = 0; k < K; ++k) {
                f[k] = eval_integrated_sinc(basis, basis.lower_limit(), t, k);
            }
            break;
        case BasisKind::ComplexExponential:
            throw UnsupportedError("complex exponential basis has no real evaluation");
    }
    return f;
}

Eigen::VectorXcd eval_basis_complex(const BasisFamily& basis, double t) {
    if (basis.kind() != BasisKind::ComplexExponential) {
        return eval_basis(basis, t).cast<std::complex<double>>();
    }
    require_in_interval(basis, t);
    Eigen::VectorXcd f(basis.size());
    for (int k = 0; k < basis.size(); ++k) {
        f[k] = std::polar(1.0, k * t);
    }
    return f;
}

Matrix eval_basis_columns(const BasisFamily& basis, const std::vector<double>& times) {
    Matrix out(basis.size(), static_cast<Eigen::Index>(times.size()));
    for (std::size_t i = 0; i < times.size(); ++i) {
        out.col(static_cast<Eigen::Index>(i)) = eval_basis(basis, times[i]);
    }
    return out;
}

std::vector<double> sample_times(const Interval& interval, std::size_t N, std::uint64_t seed) {
    if (!std::isfinite(interval.lo) || !std::isfinite(interval.hi) || !(interval.lo < interval.hi)) {
        throw DomainError("sample_times: empty or non-finite interval");
    }
    if (N < 1) {
        throw ArgumentError("sample_times: N must be at least 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(interval.lo, interval.hi);
    std::vector<double> times;
    times.reserve(N);
    while (times.size() < N) {
        times.push_back(dist(rng));
        if (times.size() == N) {
            std::sort(times.begin(), times.end());
            const auto dup = std::adjacent_find(times.begin(), times.end());
            if (dup != times.end()) {
                times.erase(dup);  // resample
            }
        }
    }
    return times;
}

}  // namespace bqrec

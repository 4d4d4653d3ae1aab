#pragma once

#include "bqrec/types.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bqrec {

enum class BasisKind { Monomial, TrigPolynomial, ComplexExponential, IntegratedSinc };

std::string_view to_string(BasisKind kind);
/// Accepts "monomial", "trig", "trig_polynomial", "complex_exponential",
/// "integrated_sinc". Throws ArgumentError otherwise.
BasisKind parse_basis_kind(std::string_view name);

/// Closed sampling interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double t) const noexcept { return t >= lo && t <= hi; }
    double length() const noexcept { return hi - lo; }
};

/// Degree of a basis function in the polynomial ring that extends its span.
///
/// Monomial and complex-exponential bases live in a one-variable ring, so the
/// degree has a single entry. Trigonometric functions live in
/// R[X, Y]/(X^2 + Y^2 - 1) with X = cos t, Y = sin t; their degree is stored as
/// {deg_Y, deg_X} with deg_Y in {0, 1} after reduction by the relation.
using MultiDegree = std::vector<int>;

/// K linearly independent sampling functions f_0, ..., f_{K-1} on an interval.
///
/// Immutable after construction.
class BasisFamily {
public:
    /// f_k(t) = t^k.
    static BasisFamily monomial(int K, Interval interval = {-1.0, 1.0});
    /// Real Fourier basis 1, cos t, sin t, cos 2t, sin 2t, ... truncated to K
    /// functions, on [-pi, pi].
    static BasisFamily trig_polynomial(int K);
    /// f_k(t) = exp(i k t) on [-pi, pi]. Only evaluable through eval_basis_complex.
    static BasisFamily complex_exponential(int K);
    /// f_k(t) = \int_lower^t sinc_omega(u - t_k) du with knots
    /// t_k = k pi / omega + knot_offset and sinc_omega(t) = sin(omega t)/(pi t).
    static BasisFamily integrated_sinc(int K, double omega, double knot_offset, double lower,
                                       Interval interval);

    BasisKind kind() const noexcept { return kind_; }
    int size() const noexcept { return K_; }
    const Interval& interval() const noexcept { return interval_; }

    double omega() const noexcept { return omega_; }
    double knot_offset() const noexcept { return knot_offset_; }
    double lower_limit() const noexcept { return lower_; }
    double knot(int k) const;

    /// True when every function carries ring-degree metadata.
    bool has_degrees() const noexcept { return !degrees_.empty(); }
    const std::vector<MultiDegree>& degrees() const noexcept { return degrees_; }

private:
    BasisFamily(BasisKind kind, int K, Interval interval);

    BasisKind kind_;
    int K_;
    Interval interval_;
    double omega_ = 0.0;
    double knot_offset_ = 0.0;
    double lower_ = 0.0;
    std::vector<MultiDegree> degrees_;
};

/// Evaluates [f_0(t), ..., f_{K-1}(t)]. Throws DomainError when t is outside the
/// interval or not finite, UnsupportedError for ComplexExponential.
Vector eval_basis(const BasisFamily& basis, double t);

/// Complex-valued evaluation; real kinds are promoted.
Eigen::VectorXcd eval_basis_complex(const BasisFamily& basis, double t);

/// K x T matrix whose column i is eval_basis(basis, times[i]).
Matrix eval_basis_columns(const BasisFamily& basis, const std::vector<double>& times);

/// \int_lower^t sinc_omega(u - t_k) du = (Si(omega (t - t_k)) - Si(omega (lower - t_k))) / pi.
/// Requires an IntegratedSinc basis and lower <= t.
double eval_integrated_sinc(const BasisFamily& basis, double lower, double t, int k);

/// sinc_omega(t) = sin(omega t) / (pi t), with the limit omega / pi at t = 0.
double sinc(double omega, double t);

/// N distinct times drawn uniformly from the interval and sorted ascending.
/// Deterministic in seed. Throws DomainError on an empty or non-finite
/// interval and ArgumentError when N < 1.
std::vector<double> sample_times(const Interval& interval, std::size_t N, std::uint64_t seed);

}  // namespace bqrec

#pragma once

namespace bqrec {

/// Sine integral Si(x) = \int_0^x sin(u)/u du.
///
/// Values for |x| < 64 come from a cumulative table of adaptive Gauss-Kronrod
/// cell integrals (cell width 1/2, absolute tolerance 1e-12) plus a 15-point
/// Kronrod rule on the partial cell. Beyond that the asymptotic expansion in
/// the auxiliary functions f and g is used. Thread-safe; the table is built on
/// first use. Throws DomainError for non-finite input.
double sine_integral(double x);

}  // namespace bqrec

#pragma once

#include "bqrec/basis.hpp"
#include "bqrec/bilinear.hpp"
#include "bqrec/types.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace bqrec {

/// Integrate-and-fire parameters of one time encoding machine.
struct TemMachine {
    double kappa = 1.0;
    double delta = 1.0;
    double bias = 1.0;
    double start = 0.0;  ///< t_0^{(i)}; the integrator starts at -kappa delta

    double threshold() const noexcept { return 2.0 * kappa * delta; }
};

/// J signals x_j(t) = sum_k c_jk sinc_omega(t - t_k), t_k = k pi / omega + knot_offset,
/// mixed by A (I x J) and sampled by I machines up to the horizon.
struct TemConfig {
    std::size_t J = 1;
    std::size_t K = 1;
    double omega = 3.141592653589793;
    double knot_offset = 0.0;
    Matrix mixing;  ///< I x J
    std::vector<TemMachine> machines;
    double horizon = 10.0;
    /// Upper bound on max_t |y_i(t)| shared by all machines; estimated when absent.
    std::optional<double> signal_bound;

    std::size_t I() const noexcept { return machines.size(); }
};

/// Throws ArgumentError / DomainError on inconsistent shapes or parameters.
void validate(const TemConfig& cfg);

/// Integrated-sinc basis matching the configuration (lower limit = earliest start).
BasisFamily tem_basis(const TemConfig& cfg);

/// y_i(t) = a_i^T C s(t) where s_k(t) = sinc_omega(t - t_k).
double machine_signal(const TemConfig& cfg, const Matrix& C, std::size_t machine, double t);

/// \int_{start_i}^t y_i(u) du in closed form through Si.
double machine_integral(const TemConfig& cfg, const Matrix& C, std::size_t machine, double t);

/// cfg.signal_bound if set, otherwise (omega / pi) sum_k |(A C)_ik|, which
/// bounds |y_i| since |sinc_omega| <= omega / pi.
double signal_bound(const TemConfig& cfg, const Matrix& C, std::size_t machine);

struct SpikeTrain {
    std::size_t machine = 0;
    std::vector<double> times;  ///< strictly increasing, excluding the start time
    bool truncated = false;     ///< the horizon was reached before the next spike

    std::size_t count() const noexcept { return times.size(); }
};

/// Spike times of every machine: the l-th spike solves
/// \int_{start}^{t} (y_i(u) + b_i) du = 2 l kappa_i delta_i, found by bracketing in
/// steps of 2 kappa delta / (b + bound) and bisecting to 1e-12.
/// Throws ConfigurationError if a bias does not exceed the signal bound.
std::vector<SpikeTrain> simulate_spikes(const TemConfig& cfg, const Matrix& C);

/// One measurement per spike: g_n = a_i, f_n[k] = \int_{start_i}^{t_l} sinc_omega(u - t_k) du and
/// b_n = l 2 kappa_i delta_i - b_i (t_l - start_i).
BilinearMeasurementSet build_tem_system(const TemConfig& cfg, const std::vector<SpikeTrain>& trains);

struct TemConditionReport {
    bool ok = false;
    std::size_t lhs = 0;       ///< sum_i min(n_spikes_i, K)
    std::size_t required = 0;  ///< J K
};

TemConditionReport tem_condition(const std::vector<SpikeTrain>& trains, std::size_t J,
                                 std::size_t K);

/// Recovers C (J x K) from the spike trains. Throws NonUniqueSolutionError when
/// the spike condition fails or the system is rank deficient.
Matrix decode_tem(const TemConfig& cfg, const std::vector<SpikeTrain>& trains,
                  double rel_tol = kDefaultRankTolerance);

}  // namespace bqrec

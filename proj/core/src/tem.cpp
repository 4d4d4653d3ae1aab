#include "bqrec/tem.hpp"

#include "bqrec/errors.hpp"
#include "bqrec/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bqrec {
namespace {

constexpr double kTimeTolerance = 1e-12;

void require_coefficients(const TemConfig& cfg, const Matrix& C) {
    if (static_cast<std::size_t>(C.rows()) != cfg.J || static_cast<std::size_t>(C.cols()) != cfg.K) {
        throw ArgumentError("coefficient matrix must be J x K");
    }
    if (!C.allFinite()) {
        throw DomainError("coefficient matrix has non-finite entries");
    }
}

Vector machine_weights(const TemConfig& cfg, const Matrix& C, std::size_t machine) {
    return (cfg.mixing.row(static_cast<Eigen::Index>(machine)) * C).transpose();
}

double integral_with_weights(const BasisFamily& basis, const Vector& d, double lower, double t) {
    double y = 0.0;
    for (Eigen::Index k = 0; k < d.size(); ++k) {
        if (d[k] != 0.0) y += d[k] * eval_integrated_sinc(basis, lower, t, static_cast<int>(k));
    }
    return y;
}

}  // namespace

void validate(const TemConfig& cfg) {
    if (cfg.J == 0 || cfg.K == 0) {
        throw ArgumentError("TEM needs J >= 1 and K >= 1");
    }
    if (!(cfg.omega > 0.0) || !std::isfinite(cfg.omega) || !std::isfinite(cfg.knot_offset)) {
        throw DomainError("TEM bandwidth must be positive and finite");
    }
    if (cfg.machines.empty()) {
        throw ArgumentError("TEM needs at least one machine");
    }
    if (static_cast<std::size_t>(cfg.mixing.rows()) != cfg.I() ||
        static_cast<std::size_t>(cfg.mixing.cols()) != cfg.J) {
        throw ArgumentError("mixing matrix must be I x J (" + std::to_string(cfg.I()) + " x " +
                            std::to_string(cfg.J) + ")");
    }
    if (!cfg.mixing.allFinite()) {
        throw DomainError("mixing matrix has non-finite entries");
    }
    for (std::size_t i = 0; i < cfg.I(); ++i) {
        const auto& m = cfg.machines[i];
        if (!(m.kappa > 0.0) || !(m.delta > 0.0) || !std::isfinite(m.bias) ||
            !std::isfinite(m.start) || !std::isfinite(m.kappa) || !std::isfinite(m.delta)) {
            throw DomainError("machine " + std::to_string(i) +
                              " needs kappa > 0, delta > 0 and finite bias/start");
        }
        if (!(cfg.horizon > m.start)) {
            throw DomainError("horizon must lie after every machine start");
        }
    }
    if (cfg.signal_bound && !(*cfg.signal_bound >= 0.0)) {
        throw DomainError("signal bound must be non-negative");
    }
}

BasisFamily tem_basis(const TemConfig& cfg) {
    double first = cfg.machines.front().start;
    for (const auto& m : cfg.machines) first = std::min(first, m.start);
    return BasisFamily::integrated_sinc(static_cast<int>(cfg.K), cfg.omega, cfg.knot_offset, first,
                                        {first, cfg.horizon});
}

double machine_signal(const TemConfig& cfg, const Matrix& C, std::size_t machine, double t) {
    require_coefficients(cfg, C);
    const Vector d = machine_weights(cfg, C, machine);
    double y = 0.0;
    for (Eigen::Index k = 0; k < d.size(); ++k) {
        y += d[k] * sinc(cfg.omega, t - (static_cast<double>(k) * std::numbers::pi / cfg.omega +
                                         cfg.knot_offset));
    }
    return y;
}

double machine_integral(const TemConfig& cfg, const Matrix& C, std::size_t machine, double t) {
    require_coefficients(cfg, C);
    const BasisFamily basis = tem_basis(cfg);
    return integral_with_weights(basis, machine_weights(cfg, C, machine),
                                 cfg.machines.at(machine).start, t);
}

double signal_bound(const TemConfig& cfg, const Matrix& C, std::size_t machine) {
    if (cfg.signal_bound) return *cfg.signal_bound;
    return cfg.omega / std::numbers::pi * machine_weights(cfg, C, machine).cwiseAbs().sum();
}

std::vector<SpikeTrain> simulate_spikes(const TemConfig& cfg, const Matrix& C) {
    validate(cfg);
    require_coefficients(cfg, C);
    const BasisFamily basis = tem_basis(cfg);
    std::vector<SpikeTrain> trains;
    trains.reserve(cfg.I());
    for (std::size_t i = 0; i < cfg.I(); ++i) {
        const auto& m = cfg.machines[i];
        const double bound = signal_bound(cfg, C, i);
        if (!(m.bias > bound)) {
            throw ConfigurationError("machine " + std::to_string(i) + ": bias " +
                                     std::to_string(m.bias) + " does not exceed the signal bound " +
                                     std::to_string(bound));
        }
        const Vector d = machine_weights(cfg, C, i);
        const double threshold = m.threshold();
        const double step = threshold / (m.bias + bound);

        SpikeTrain train;
        train.machine = i;
        double t_prev = m.start;
        for (std::size_t ell = 1;; ++ell) {
            const double target = static_cast<double>(ell) * threshold;
            auto F = [&](double t) {
                return integral_with_weights(basis, d, m.start, t) + m.bias * (t - m.start) - target;
            };
            double lo = t_prev;
            double hi = std::min(lo + step, cfg.horizon);
            while (F(hi) < 0.0) {
                if (hi >= cfg.horizon) {
                    train.truncated = true;
                    break;
                }
                lo = hi;
                hi = std::min(hi + step, cfg.horizon);
            }
            if (train.truncated) break;
            while (hi - lo > kTimeTolerance) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                (F(mid) < 0.0 ? lo : hi) = mid;
            }
            const double spike = 0.5 * (lo + hi);
            train.times.push_back(spike);
            t_prev = spike;
        }
        trains.push_back(std::move(train));
    }
    return trains;
}

BilinearMeasurementSet build_tem_system(const TemConfig& cfg, const std::vector<SpikeTrain>& trains) {
    validate(cfg);
    const BasisFamily basis = tem_basis(cfg);
    std::vector<Vector> anchors;
    anchors.reserve(cfg.I());
    for (std::size_t i = 0; i < cfg.I(); ++i) {
        anchors.push_back(cfg.mixing.row(static_cast<Eigen::Index>(i)).transpose());
    }

    std::size_t N = 0;
    for (const auto& tr : trains) {
        if (tr.machine >= cfg.I()) {
            throw ArgumentError("spike train refers to machine " + std::to_string(tr.machine));
        }
        N += tr.count();
    }
    std::vector<std::size_t> assignment;
    std::vector<double> times;
    Matrix F(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(cfg.K));
    Vector b(static_cast<Eigen::Index>(N));
    Eigen::Index n = 0;
    for (const auto& tr : trains) {
        const auto& m = cfg.machines[tr.machine];
        double prev = m.start;
        for (std::size_t ell = 0; ell < tr.times.size(); ++ell) {
            const double t = tr.times[ell];
            if (!(t > prev) || t > cfg.horizon) {
                throw ArgumentError("spike times of machine " + std::to_string(tr.machine) +
                                    " must increase strictly after the start and stay within the horizon");
            }
            prev = t;
            for (std::size_t k = 0; k < cfg.K; ++k) {
                F(n, static_cast<Eigen::Index>(k)) =
                    eval_integrated_sinc(basis, m.start, t, static_cast<int>(k));
            }
            b[n] = static_cast<double>(ell + 1) * m.threshold() - m.bias * (t - m.start);
            assignment.push_back(tr.machine);
            times.push_back(t);
            ++n;
        }
    }
    return BilinearMeasurementSet::with_features(std::move(anchors), std::move(assignment),
                                                 std::move(times), std::move(F), basis, b);
}

TemConditionReport tem_condition(const std::vector<SpikeTrain>& trains, std::size_t J, std::size_t K) {
    TemConditionReport rep;
    rep.required = J * K;
    for (const auto& tr : trains) rep.lhs += std::min(tr.count(), K);
    rep.ok = rep.lhs >= rep.required;
    return rep;
}

Matrix decode_tem(const TemConfig& cfg, const std::vector<SpikeTrain>& trains, double rel_tol) {
    const auto cond = tem_condition(trains, cfg.J, cfg.K);
    const auto ms = build_tem_system(cfg, trains);
    if (!cond.ok) {
        throw NonUniqueSolutionError("spike condition fails: sum min(n_spikes, K) = " +
                                         std::to_string(cond.lhs) + " < " +
                                         std::to_string(cond.required),
                                     numerical_rank(assemble_gamma(ms), rel_tol),
                                     static_cast<int>(cond.required));
    }
    return solve_bilinear(ms, rel_tol).C;
}

}  // namespace bqrec

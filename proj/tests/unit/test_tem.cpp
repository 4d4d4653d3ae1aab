#include "bqrec/bilinear.hpp"
#include "bqrec/errors.hpp"
#include "bqrec/rank.hpp"
#include "bqrec/tem.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace bqrec;

namespace {

TemConfig two_machine_config() {
    TemConfig cfg;
    cfg.J = 2;
    cfg.K = 3;
    cfg.omega = std::numbers::pi;
    cfg.mixing = (Matrix(2, 2) << 1.0, 0.5, -0.4, 1.0).finished();
    cfg.machines.assign(2, TemMachine{1.0, 1.0, 1.0, -2.0});
    cfg.horizon = 4.0;
    return cfg;
}

void set_biases(TemConfig& cfg, const Matrix& C) {
    for (std::size_t i = 0; i < cfg.I(); ++i) {
        auto& m = cfg.machines[i];
        m.bias = 1.5 * signal_bound(cfg, C, i) + 0.1;
        m.delta = 0.15 * m.bias;
    }
}

// y_i(t) = sum_j A_ij sum_k c_jk sin(Omega (t - t_k)) / (pi (t - t_k)), evaluated term by term.
double oracle_signal(const TemConfig& cfg, const Matrix& C, std::size_t i, double t) {
    double y = 0.0;
    for (std::size_t j = 0; j < cfg.J; ++j)
        for (std::size_t k = 0; k < cfg.K; ++k) {
            const double tk = static_cast<double>(k) * std::numbers::pi / cfg.omega + cfg.knot_offset;
            y += cfg.mixing(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                 C(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * oracle::sinc(cfg.omega, t - tk);
        }
    return y;
}

double oracle_integral(const TemConfig& cfg, const Matrix& C, std::size_t i, double a, double b) {
    return oracle::integrate([&](double t) { return oracle_signal(cfg, C, i, t); }, a, b, 0.05);
}

}  // namespace

TEST(TemConfig, Validation) {
    auto cfg = two_machine_config();
    EXPECT_NO_THROW(validate(cfg));
    auto bad = cfg;
    bad.J = 0;
    EXPECT_THROW(validate(bad), ArgumentError);
    bad = cfg;
    bad.mixing = Matrix::Ones(3, 2);
    EXPECT_THROW(validate(bad), ArgumentError);
    bad = cfg;
    bad.omega = 0.0;
    EXPECT_THROW(validate(bad), DomainError);
    bad = cfg;
    bad.machines[1].kappa = -1.0;
    EXPECT_THROW(validate(bad), DomainError);
    bad = cfg;
    bad.horizon = -3.0;
    EXPECT_THROW(validate(bad), DomainError);
    bad = cfg;
    bad.machines.clear();
    bad.mixing = Matrix(0, 2);
    EXPECT_THROW(validate(bad), ArgumentError);
    bad = cfg;
    bad.signal_bound = -1.0;
    EXPECT_THROW(validate(bad), DomainError);
}

TEST(TemSignal, MatchesOracle) {
    auto cfg = two_machine_config();
    cfg.knot_offset = 0.3;
    std::mt19937_64 rng(1);
    const Matrix C = oracle::random_normal_matrix(2, 3, rng);
    for (std::size_t i = 0; i < 2; ++i) {
        for (double t : {-1.9, -0.5, 0.3, 1.0, 2.7, 3.9}) {
            EXPECT_NEAR(machine_signal(cfg, C, i, t), oracle_signal(cfg, C, i, t), 1e-14);
            EXPECT_NEAR(machine_integral(cfg, C, i, t), oracle_integral(cfg, C, i, -2.0, t), 1e-10);
        }
    }
    EXPECT_THROW(machine_signal(cfg, Matrix::Ones(3, 3), 0, 0.0), ArgumentError);
}

TEST(TemSignal, BoundDominatesSignal) {
    const auto cfg = two_machine_config();
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix C = oracle::random_normal_matrix(2, 3, rng);
        for (std::size_t i = 0; i < 2; ++i) {
            const double bound = signal_bound(cfg, C, i);
            for (double t = -2.0; t <= 4.0; t += 0.01) EXPECT_LE(std::abs(machine_signal(cfg, C, i, t)), bound + 1e-12);
        }
    }
    auto fixed = cfg;
    fixed.signal_bound = 7.5;
    EXPECT_EQ(signal_bound(fixed, Matrix::Ones(2, 3), 0), 7.5);
}

TEST(Spikes, ZeroSignalIsPeriodic) {
    auto cfg = two_machine_config();
    cfg.machines[0] = {0.5, 0.4, 2.0, -2.0};
    cfg.machines[1] = {1.0, 0.4, 2.0, -1.0};
    const auto trains = simulate_spikes(cfg, Matrix::Zero(2, 3));
    ASSERT_EQ(trains.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& m = cfg.machines[i];
        const double period = m.threshold() / m.bias;
        const auto expected = static_cast<std::size_t>(std::floor((cfg.horizon - m.start) / period + 1e-9));
        EXPECT_EQ(trains[i].count(), expected);
        for (std::size_t l = 0; l < trains[i].count(); ++l)
            EXPECT_NEAR(trains[i].times[l], m.start + static_cast<double>(l + 1) * period, 1e-11);
        EXPECT_TRUE(trains[i].truncated);
    }
}

TEST(Spikes, PeriodScalesWithThreshold) {
    auto cfg = two_machine_config();
    cfg.machines.assign(2, TemMachine{1.0, 0.2, 3.0, -2.0});
    const auto a = simulate_spikes(cfg, Matrix::Zero(2, 3));
    cfg.machines.assign(2, TemMachine{1.0, 0.4, 3.0, -2.0});
    const auto b = simulate_spikes(cfg, Matrix::Zero(2, 3));
    const double pa = a[0].times[1] - a[0].times[0], pb = b[0].times[1] - b[0].times[0];
    EXPECT_NEAR(pb / pa, 2.0, 1e-9);
}

TEST(Spikes, SingleMachineMatchesRootOracle) {
    TemConfig cfg;
    cfg.J = 1;
    cfg.K = 1;
    cfg.omega = 2.0;
    cfg.knot_offset = 0.5;
    cfg.mixing = Matrix::Ones(1, 1);
    cfg.machines = {TemMachine{1.0, 0.3, 2.5, -1.0}};
    cfg.horizon = 5.0;
    const Matrix C = (Matrix(1, 1) << 1.7).finished();
    const auto trains = simulate_spikes(cfg, C);
    const auto& m = cfg.machines[0];
    const double slope_min = m.bias - signal_bound(cfg, C, 0);
    ASSERT_GT(trains[0].count(), 5u);
    double prev = m.start;
    for (std::size_t l = 0; l < trains[0].count(); ++l) {
        auto F = [&](double t) { return oracle_integral(cfg, C, 0, prev, t) + m.bias * (t - prev) - m.threshold(); };
        const double root = oracle::bisect(F, prev, prev + m.threshold() / slope_min + 1e-9);
        EXPECT_NEAR(trains[0].times[l], root, 1e-8) << "spike " << l;
        prev = root;
    }
}

TEST(Spikes, ConsistencyAndTelescoping) {
    auto cfg = two_machine_config();
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix C = oracle::random_normal_matrix(2, 3, rng);
        set_biases(cfg, C);
        const auto trains = simulate_spikes(cfg, C);
        for (std::size_t i = 0; i < 2; ++i) {
            const auto& m = cfg.machines[i];
            const auto& t = trains[i].times;
            ASSERT_GE(t.size(), cfg.K);
            for (std::size_t l = 0; l < t.size(); ++l) {
                const double a = l == 0 ? m.start : t[l - 1];
                if (l > 0) {
                    EXPECT_GT(t[l], t[l - 1]);
                }
                const double area = oracle_integral(cfg, C, i, a, t[l]) + m.bias * (t[l] - a);
                EXPECT_NEAR(area / m.threshold(), 1.0, 1e-7);
            }
        }
        const auto ms = build_tem_system(cfg, trains);
        const Vector& b = *ms.measurements();
        for (std::size_t n = 0; n < ms.N(); ++n) {
            const std::size_t i = ms.assignments()[n];
            EXPECT_NEAR(b(static_cast<Eigen::Index>(n)), oracle_integral(cfg, C, i, cfg.machines[i].start, ms.times()[n]),
                        1e-7);
        }
    }
}

TEST(Spikes, BiasTooSmall) {
    auto cfg = two_machine_config();
    const Matrix C = Matrix::Ones(2, 3);
    cfg.machines[1].bias = 0.5 * signal_bound(cfg, C, 1);
    EXPECT_THROW(simulate_spikes(cfg, C), ConfigurationError);
}

TEST(Spikes, ShortHorizonTruncates) {
    auto cfg = two_machine_config();
    cfg.machines.assign(2, TemMachine{1.0, 5.0, 1.0, -2.0});
    const auto trains = simulate_spikes(cfg, Matrix::Zero(2, 3));
    for (const auto& tr : trains) {
        EXPECT_EQ(tr.count(), 0u);
        EXPECT_TRUE(tr.truncated);
    }
}

TEST(TemSystem, EmptyTrains) {
    const auto cfg = two_machine_config();
    std::vector<SpikeTrain> trains(2);
    trains[1].machine = 1;
    const auto ms = build_tem_system(cfg, trains);
    EXPECT_EQ(ms.N(), 0u);
    EXPECT_EQ(ms.J(), 2u);
    EXPECT_EQ(ms.K(), 3u);
}

TEST(TemSystem, ZeroSignalGivesZeroMeasurements) {
    auto cfg = two_machine_config();
    cfg.machines.assign(2, TemMachine{1.0, 0.3, 2.0, -2.0});
    const auto ms = build_tem_system(cfg, simulate_spikes(cfg, Matrix::Zero(2, 3)));
    ASSERT_GT(ms.N(), 0u);
    EXPECT_LT(ms.measurements()->cwiseAbs().maxCoeff(), 1e-10);
}

TEST(TemSystem, ForwardModel) {
    auto cfg = two_machine_config();
    std::mt19937_64 rng(4);
    const Matrix C = oracle::random_normal_matrix(2, 3, rng);
    set_biases(cfg, C);
    const auto ms = build_tem_system(cfg, simulate_spikes(cfg, C));
    const Vector vecC = Eigen::Map<const Vector>(C.data(), C.size());
    EXPECT_LT(((assemble_gamma(ms) * vecC) - *ms.measurements()).cwiseAbs().maxCoeff(), 1e-7);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(ms.anchors()[i], cfg.mixing.row(static_cast<Eigen::Index>(i)).transpose());
}

TEST(TemSystem, Errors) {
    const auto cfg = two_machine_config();
    std::vector<SpikeTrain> bad(1);
    bad[0].machine = 4;
    EXPECT_THROW(build_tem_system(cfg, bad), ArgumentError);
    bad[0].machine = 0;
    bad[0].times = {0.5, 0.2};
    EXPECT_THROW(build_tem_system(cfg, bad), ArgumentError);
    bad[0].times = {-3.0};
    EXPECT_THROW(build_tem_system(cfg, bad), ArgumentError);
    bad[0].times = {4.5};
    EXPECT_THROW(build_tem_system(cfg, bad), ArgumentError);
}

namespace {

std::vector<SpikeTrain> trains_with_counts(const std::vector<std::size_t>& counts) {
    std::vector<SpikeTrain> trains;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        SpikeTrain tr;
        tr.machine = i;
        tr.times.assign(counts[i], 0.0);
        trains.push_back(tr);
    }
    return trains;
}

}  // namespace

TEST(TemCondition, Examples) {
    const auto ok = tem_condition(trains_with_counts({3, 5}), 2, 3);
    EXPECT_TRUE(ok.ok);
    EXPECT_EQ(ok.lhs, 6u);
    EXPECT_EQ(ok.required, 6u);
    const auto lopsided = tem_condition(trains_with_counts({40, 0}), 2, 3);
    EXPECT_FALSE(lopsided.ok);
    EXPECT_EQ(lopsided.lhs, 3u);
    const auto three = tem_condition(trains_with_counts({4, 3, 1}), 2, 4);
    EXPECT_TRUE(three.ok);
    EXPECT_EQ(three.lhs, 8u);
}

TEST(TemCondition, ThreeMachinesFullRank) {
    TemConfig cfg;
    cfg.J = 2;
    cfg.K = 4;
    cfg.machines.assign(3, TemMachine{1.0, 1.0, 1.0, -2.0});
    cfg.horizon = 6.0;
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        cfg.mixing = oracle::random_normal_matrix(3, 2, rng);
        const Matrix C = oracle::random_normal_matrix(2, 4, rng);
        for (std::size_t i = 0; i < 3; ++i) {
            cfg.machines[i].bias = 1.5 * signal_bound(cfg, C, i) + 0.1;
            cfg.machines[i].delta = 0.6 * cfg.machines[i].bias;
        }
        auto trains = simulate_spikes(cfg, C);
        const std::size_t keep[] = {4, 3, 1};
        for (std::size_t i = 0; i < 3; ++i) {
            ASSERT_GE(trains[i].count(), keep[i]);
            trains[i].times.resize(keep[i]);
        }
        EXPECT_TRUE(tem_condition(trains, 2, 4).ok);
        EXPECT_EQ(numerical_rank(assemble_gamma(build_tem_system(cfg, trains))), 8) << seed;
    }
}

TEST(Decode, RoundTrip) {
    auto cfg = two_machine_config();
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix C = oracle::random_normal_matrix(2, 3, rng);
        set_biases(cfg, C);
        const auto trains = simulate_spikes(cfg, C);
        ASSERT_TRUE(tem_condition(trains, 2, 3).ok);
        EXPECT_LT(oracle::max_abs(decode_tem(cfg, trains) - C), 1e-6) << trial;
    }
}

TEST(Decode, ZeroCoefficients) {
    auto cfg = two_machine_config();
    cfg.machines.assign(2, TemMachine{1.0, 0.3, 2.0, -2.0});
    const Matrix C_hat = decode_tem(cfg, simulate_spikes(cfg, Matrix::Zero(2, 3)));
    EXPECT_LT(oracle::max_abs(C_hat), 1e-10);
}

TEST(Decode, TruncatedHorizonIsNonUnique) {
    auto cfg = two_machine_config();
    std::mt19937_64 rng(7);
    const Matrix C = oracle::random_normal_matrix(2, 3, rng);
    set_biases(cfg, C);
    cfg.horizon = cfg.machines[0].start + 2.5 * cfg.machines[0].threshold() / (cfg.machines[0].bias + signal_bound(cfg, C, 0));
    const auto trains = simulate_spikes(cfg, C);
    ASSERT_FALSE(tem_condition(trains, 2, 3).ok);
    EXPECT_THROW(decode_tem(cfg, trains), NonUniqueSolutionError);
}

TEST(TemBasis, Layout) {
    auto cfg = two_machine_config();
    cfg.machines[1].start = -3.0;
    cfg.knot_offset = 0.25;
    const auto basis = tem_basis(cfg);
    EXPECT_EQ(basis.kind(), BasisKind::IntegratedSinc);
    EXPECT_EQ(basis.size(), 3);
    EXPECT_EQ(basis.lower_limit(), -3.0);
    EXPECT_EQ(basis.interval().hi, 4.0);
    EXPECT_NEAR(basis.knot(2), 2.0 + 0.25, 1e-15);
}

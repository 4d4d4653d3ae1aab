#include "bqrec/basis.hpp"
#include "bqrec/bilinear.hpp"
#include "bqrec/errors.hpp"
#include "bqrec/localization.hpp"
#include "bqrec/permutations.hpp"
#include "bqrec/quadratic.hpp"
#include "bqrec/rank.hpp"
#include "bqrec/tem.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

using namespace bqrec;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::uint64_t factorial(std::uint64_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// Gamma(n, kJ + j) = g_j f_k(t_n), built directly from the definition.
Matrix gamma_by_definition(const std::vector<Vector>& g, const Matrix& features) {
    const Eigen::Index N = features.rows(), K = features.cols(), J = g.front().size();
    Matrix G(N, J * K);
    for (Eigen::Index n = 0; n < N; ++n)
        for (Eigen::Index k = 0; k < K; ++k)
            for (Eigen::Index j = 0; j < J; ++j) G(n, k * J + j) = g[static_cast<std::size_t>(n)](j) * features(n, k);
    return G;
}

Matrix monomial_features(const std::vector<double>& t, int K) {
    Matrix F(static_cast<Eigen::Index>(t.size()), K);
    for (std::size_t n = 0; n < t.size(); ++n)
        for (int k = 0; k < K; ++k) F(static_cast<Eigen::Index>(n), k) = std::pow(t[n], k);
    return F;
}

Outcome lemma1_equivalence() {
    std::mt19937_64 rng(101);
    const std::pair<std::size_t, std::size_t> shapes[] = {{2, 2}, {2, 3}, {3, 2}};
    std::size_t int_mismatch = 0, int_total = 0;
    for (const auto& [J, K] : shapes) {
        const int N = static_cast<int>(J * K);
        for (int trial = 0; trial < 500; ++trial) {
            const IntMatrix A = oracle::random_int_matrix(N, -9, 9, rng);
            if (det_by_blocks(A, J, K) != oracle::cofactor_determinant(A)) ++int_mismatch;
            ++int_total;
        }
    }
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto& [J, K] = shapes[trial % 3];
        const int N = static_cast<int>(J * K);
        const Matrix A = oracle::random_uniform_matrix(N, N, -1.0, 1.0, rng);
        const long double ref = oracle::cofactor_determinant(A);
        const double rel = static_cast<double>(std::fabs(det_by_blocks(A, J, K) - ref) / std::fabs(ref));
        worst = std::max(worst, rel);
    }
    return {int_mismatch == 0 && worst < 1e-10,
            "integer mismatches " + std::to_string(int_mismatch) + "/" + std::to_string(int_total) +
                ", worst real relative error " + fmt(worst)};
}

Outcome quotient_cardinality() {
    std::size_t checked = 0, bad = 0;
    for (std::size_t N = 1; N <= 8; ++N) {
        for (std::size_t J = 1; J <= N; ++J) {
            if (N % J) continue;
            ++checked;
            const auto classes = enumerate_classes(N, J);
            std::uint64_t per = 1;
            for (std::size_t k = 0; k < N / J; ++k) per *= factorial(J);
            auto reference = oracle::classes_by_block_sets(static_cast<int>(N), static_cast<int>(J));
            bool ok = classes.size() == factorial(N) / per && reference.size() == classes.size();
            std::set<std::vector<int>> seen;
            for (const auto& c : classes) {
                std::vector<std::vector<int>> members;
                for (const auto& p : expand_class(c)) {
                    members.push_back(p.entries());
                    ok = ok && seen.insert(p.entries()).second;
                }
                std::sort(members.begin(), members.end());
                std::vector<int> key;
                for (std::size_t k = 0; k < N / J; ++k) {
                    std::vector<int> block(c.representative.entries().begin() + static_cast<long>(k * J),
                                           c.representative.entries().begin() + static_cast<long>((k + 1) * J));
                    std::sort(block.begin(), block.end());
                    key.insert(key.end(), block.begin(), block.end());
                }
                auto it = reference.find(key);
                if (it == reference.end()) {
                    ok = false;
                    continue;
                }
                auto expected = it->second;
                std::sort(expected.begin(), expected.end());
                ok = ok && expected == members;
            }
            ok = ok && seen.size() == factorial(N);
            if (!ok) ++bad;
        }
    }
    return {bad == 0, std::to_string(checked - bad) + "/" + std::to_string(checked) + " (N, J) pairs match"};
}

Outcome determinant_identity() {
    std::mt19937_64 rng(103);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vector> g;
        for (int n = 0; n < 6; ++n) g.push_back(oracle::random_normal_vector(2, rng));
        const Matrix F = monomial_features(oracle::uniform_times(6, -1.0, 1.0, rng), 3);
        const auto coeffs = gamma_coefficients(g, 2, 3);
        const double lhs = determinant_from_coefficients(coeffs, F);
        const long double ref = oracle::cofactor_determinant(gamma_by_definition(g, F));
        worst = std::max(worst, static_cast<double>(std::fabs(lhs - ref) / std::fabs(ref)));
    }
    return {worst < 1e-9, "worst relative error " + fmt(worst) + " over 50 draws"};
}

Outcome theorem1_both_directions() {
    std::mt19937_64 rng(104);
    std::size_t a_ok = 0, a_total = 0, b_ok = 0, b_total = 0;
    const std::pair<std::size_t, std::size_t> shapes[] = {{2, 3}, {3, 3}};
    for (const auto& [J, K] : shapes) {
        const auto basis = BasisFamily::monomial(static_cast<int>(K));
        const int JK = static_cast<int>(J * K);
        std::uniform_int_distribution<std::size_t> extra(0, 2), count(0, K + 1);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t M = J + extra(rng);
            std::vector<Vector> anchors;
            for (std::size_t m = 0; m < M; ++m) anchors.push_back(oracle::random_normal_vector(static_cast<int>(J), rng));
            std::vector<std::size_t> counts(M);
            std::size_t lhs = 0;
            do {
                lhs = 0;
                for (auto& c : counts) {
                    c = count(rng);
                    lhs += std::min(c, K);
                }
            } while (lhs < J * K);
            std::vector<std::size_t> assign;
            for (std::size_t m = 0; m < M; ++m) assign.insert(assign.end(), counts[m], m);
            const auto times = oracle::uniform_times(static_cast<int>(assign.size()), -1.0, 1.0, rng);
            const BilinearMeasurementSet ms(anchors, assign, times, basis);
            ++a_total;
            if (theorem1_verdict(ms).solvable && numerical_rank(assemble_gamma(ms)) == JK) ++a_ok;
        }
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<Vector> anchors;
            for (std::size_t m = 0; m < J; ++m) anchors.push_back(oracle::random_normal_vector(static_cast<int>(J), rng));
            std::vector<std::size_t> assign(K + 1, 0);
            for (std::size_t n = K + 1; n < J * K; ++n) assign.push_back(1 + (n % (J - 1)));
            const auto times = oracle::uniform_times(static_cast<int>(assign.size()), -1.0, 1.0, rng);
            const BilinearMeasurementSet ms(anchors, assign, times, basis);
            ++b_total;
            const Matrix G = assemble_gamma(ms);
            if (!theorem1_verdict(ms).solvable && numerical_rank(G) < JK && oracle::elimination_rank(G) < JK) ++b_ok;
        }
    }
    return {a_ok == a_total && b_ok == b_total,
            "(a) " + std::to_string(a_ok) + "/" + std::to_string(a_total) + " full rank, (b) " + std::to_string(b_ok) +
                "/" + std::to_string(b_total) + " deficient"};
}

Outcome quadratic_rank() {
    std::ostringstream detail;
    bool pass = true;
    bool within_budget = true;
    std::size_t runs = 0;
    for (int which = 0; which < 2; ++which) {
        for (int K = 2; K <= 6; ++K) {
            const BasisFamily basis = which == 0 ? BasisFamily::monomial(K) : BasisFamily::trig_polynomial(K);
            const std::size_t budget = max_quadratic_rank(basis);
            const int expected = 2 * K - 1;
            int hits = 0, lo = 1 << 30, hi = 0;
            for (std::uint64_t seed = 0; seed < 100; ++seed) {
                const auto times = sample_times(basis.interval(), static_cast<std::size_t>(4 * K), 1000 + seed);
                const Matrix Q = assemble_quadratic_block(eval_basis_columns(basis, times).transpose());
                const int r = numerical_rank(Q);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
                if (r == expected) ++hits;
                if (static_cast<std::size_t>(r) > budget) within_budget = false;
                ++runs;
            }
            if (hits != 100) {
                pass = false;
                detail << (which == 0 ? "monomial" : "trig") << " K=" << K << ": rank " << lo;
                if (hi != lo) detail << ".." << hi;
                detail << " vs " << expected << "; ";
            }
        }
    }
    if (!within_budget) {
        pass = false;
        detail << "budget exceeded; ";
    }
    detail << runs << " runs, budget " << (within_budget ? "respected" : "violated");
    return {pass, detail.str()};
}

Outcome localization_round_trip() {
    std::size_t ok = 0, total = 0, deficient = 0, deficient_total = 0;
    double worst_c = 0.0, worst_l = 0.0;
    for (int K = 2; K <= 4; ++K) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            SimulationSpec spec;
            spec.D = 2;
            spec.basis = BasisFamily::monomial(K);
            spec.M = 4;
            spec.N = static_cast<std::size_t>(K * 4 - 1);
            spec.seed = seed;
            const Scenario sc = simulate_scenario(spec);
            ++total;
            const auto cond = corollary2_check(sc);
            if (cond.ok) {
                try {
                    const auto est = localize(sc);
                    const double ec = oracle::max_abs(est.C_hat - *sc.C_true());
                    const double el = oracle::max_abs(est.L_hat - est.C_hat.transpose() * est.C_hat);
                    worst_c = std::max(worst_c, ec);
                    worst_l = std::max(worst_l, el);
                    if (ec < 1e-6 && el < 1e-6) ++ok;
                } catch (const Error&) {
                }
            }

            std::vector<std::size_t> list;
            const std::size_t counts[] = {static_cast<std::size_t>(2 * K), static_cast<std::size_t>(K),
                                          static_cast<std::size_t>(K - 1), 0};
            for (std::size_t m = 0; m < 4; ++m) list.insert(list.end(), counts[m], m);
            spec.policy = AssignmentPolicy::explicit_list(list);
            spec.N = list.size();
            const Scenario bad = simulate_scenario(spec);
            ++deficient_total;
            const auto bc = corollary2_check(bad);
            if (!bc.ok && bc.lhs == static_cast<std::size_t>(3 * K - 1)) {
                try {
                    localize(bad);
                } catch (const NonUniqueSolutionError& e) {
                    if (e.rank() < e.required_rank()) ++deficient;
                }
            }
        }
    }
    return {ok == total && deficient == deficient_total,
            std::to_string(ok) + "/" + std::to_string(total) + " recovered (worst C error " + fmt(worst_c) +
                ", worst L error " + fmt(worst_l) + "), " + std::to_string(deficient) + "/" +
                std::to_string(deficient_total) + " deficiencies detected"};
}

Outcome tem_round_trip() {
    TemConfig cfg;
    cfg.J = 2;
    cfg.K = 3;
    cfg.omega = std::numbers::pi;
    cfg.mixing = (Matrix(2, 2) << 1.0, 0.5, -0.4, 1.0).finished();
    cfg.machines.assign(2, TemMachine{1.0, 1.0, 1.0, -2.0});
    cfg.horizon = 4.0;
    std::mt19937_64 rng(107);
    std::size_t ok = 0;
    double worst_int = 0.0, worst_c = 0.0;
    std::size_t min_spikes = 1u << 30;
    for (int seed = 0; seed < 100; ++seed) {
        const Matrix C = oracle::random_normal_matrix(2, 3, rng);
        for (std::size_t i = 0; i < 2; ++i) {
            auto& m = cfg.machines[i];
            m.bias = 1.5 * signal_bound(cfg, C, i) + 0.1;
            m.delta = 0.15 * m.bias;
        }
        const auto trains = simulate_spikes(cfg, C);
        bool good = true;
        for (std::size_t i = 0; i < 2; ++i) {
            const auto& m = cfg.machines[i];
            min_spikes = std::min(min_spikes, trains[i].count());
            if (trains[i].count() < cfg.K) good = false;
            auto y = [&](double t) {
                double v = m.bias;
                for (std::size_t j = 0; j < 2; ++j)
                    for (std::size_t k = 0; k < 3; ++k)
                        v += cfg.mixing(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                             C(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) *
                             oracle::sinc(cfg.omega, t - static_cast<double>(k));
                return v;
            };
            double prev = m.start;
            for (double t : trains[i].times) {
                const double rel = std::abs(oracle::integrate(y, prev, t, 0.05) / m.threshold() - 1.0);
                worst_int = std::max(worst_int, rel);
                if (!(rel < 1e-7)) good = false;
                prev = t;
            }
        }
        if (!tem_condition(trains, cfg.J, cfg.K).ok) good = false;
        try {
            const double err = oracle::max_abs(decode_tem(cfg, trains) - C);
            worst_c = std::max(worst_c, err);
            if (!(err < 1e-6)) good = false;
        } catch (const Error&) {
            good = false;
        }
        if (good) ++ok;
    }
    return {ok == 100, std::to_string(ok) + "/100 seeds (fewest spikes " + std::to_string(min_spikes) +
                           ", worst interval error " + fmt(worst_int) + ", worst C error " + fmt(worst_c) + ")"};
}

Outcome extension_chain() {
    const auto basis = BasisFamily::monomial(3);
    std::mt19937_64 rng(108);
    std::size_t ok = 0, steps = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::vector<Vector> anchors;
        for (int m = 0; m < 3; ++m) anchors.push_back(5.0 * oracle::random_normal_vector(2, rng));
        const auto rep = localization_extension_chain(basis, anchors, seed);
        bool good = rep.base_full_rank && rep.degrees.size() == 2;
        for (std::size_t s = 0; s < rep.degrees.size(); ++s) {
            good = good && rep.full_rank[s] && rep.dominating[s] && rep.degrees[s] == static_cast<int>(3 + s);
            ++steps;
        }
        if (good) ++ok;
    }
    return {ok == 100, std::to_string(ok) + "/100 seeds full rank at every step (" + std::to_string(steps) + " steps)"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"1 block determinant equals direct determinant", 30.0, lemma1_equivalence},
        {"2 quotient set cardinality and partition", 10.0, quotient_cardinality},
        {"3 class-coefficient determinant identity", 10.0, determinant_identity},
        {"4 bilinear rank in both directions", 20.0, theorem1_both_directions},
        {"5 quadratic block rank 2K-1", 20.0, quadratic_rank},
        {"6 localization round trip", 30.0, localization_round_trip},
        {"7 time encoding round trip", 60.0, tem_round_trip},
        {"8 quadratic extension chain", 20.0, extension_chain},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs < c.limit_s;
        if (!pass) ++failures;
        std::printf("%s  criterion %s: %s [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                    secs, c.limit_s);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures == 0 ? 0 : 1;
}

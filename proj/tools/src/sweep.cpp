#include "bqrec_cli/sweep.hpp"

#include "bqrec/bilinear.hpp"
#include "bqrec/errors.hpp"
#include "bqrec/localization.hpp"
#include "bqrec/quadratic.hpp"
#include "bqrec/tem.hpp"
#include "bqrec_cli/config.hpp"
#include "bqrec_cli/csv.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace bqrec::cli {

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c) M(r, c) = nd(rng);
    return M;
}

namespace {

std::size_t get_size(const YAML::Node& p, const std::string& key, std::size_t fallback) {
    const auto v = get_optional_int(p, key, "sweep.params");
    if (!v) return fallback;
    if (*v < 1) throw ConfigError("field 'sweep.params." + key + "' must be positive");
    return static_cast<std::size_t>(*v);
}

YAML::Node require_node(const YAML::Node& p, const std::string& key) {
    if (!p[key]) throw ConfigError("missing field 'sweep.params." + key + "'");
    return p[key];
}

SimulationSpec parse_localize(const YAML::Node& p) {
    SimulationSpec spec;
    spec.basis = parse_basis(require_node(p, "basis"), "sweep.params.basis");
    spec.D = get_size(p, "dimension", 2);
    spec.M = get_size(p, "num_anchors", spec.D + 2);
    const std::size_t K = static_cast<std::size_t>(spec.basis.size());
    spec.N = get_size(p, "num_measurements", spec.D * K + max_quadratic_rank(spec.basis));
    spec.policy = parse_policy(p["policy"], "sweep.params.policy");
    spec.anchor_extent = get_optional_double(p, "anchor_extent", "sweep.params").value_or(5.0);
    return spec;
}

BilinearSweepParams parse_bilinear(const YAML::Node& p) {
    BilinearSweepParams b;
    b.basis = parse_basis(require_node(p, "basis"), "sweep.params.basis");
    b.J = get_size(p, "J", 2);
    b.M = get_size(p, "num_anchors", b.J);
    b.N = get_size(p, "num_measurements", b.J * static_cast<std::size_t>(b.basis.size()));
    return b;
}

SweepRow localize_seed(const SweepSettings& s, std::uint64_t seed) {
    SimulationSpec spec = *s.localize;
    spec.seed = seed;

    SweepRow row;
    row.seed = seed;
    const Scenario sc = simulate_scenario(spec);
    try {
        const auto est = localize(sc, s.tolerance);
        row.rank = est.rank_report.rank;
        row.required = est.rank_report.required;
        row.max_abs_error = (est.C_hat - *sc.C_true()).cwiseAbs().maxCoeff();
        row.success = row.max_abs_error < s.success_threshold;
    } catch (const NonUniqueSolutionError& e) {
        row.rank = e.rank();
        row.required = e.required_rank();
        row.note = "non_unique";
    }
    return row;
}

SweepRow tem_seed(const SweepSettings& s, std::uint64_t seed) {
    TemSection section = *s.tem;
    std::mt19937_64 rng(seed);
    const Matrix C = gaussian_matrix(section.config.J, section.config.K, rng);
    resolve_tem_defaults(section, C);

    SweepRow row;
    row.seed = seed;
    row.required = static_cast<int>(section.config.J * section.config.K);
    const auto trains = simulate_spikes(section.config, C);
    const auto cond = tem_condition(trains, section.config.J, section.config.K);
    row.rank = static_cast<int>(cond.lhs);
    try {
        const Matrix C_hat = decode_tem(section.config, trains, s.tolerance);
        row.max_abs_error = (C_hat - C).cwiseAbs().maxCoeff();
        row.success = row.max_abs_error < s.success_threshold;
    } catch (const NonUniqueSolutionError& e) {
        row.rank = e.rank();
        row.note = "non_unique";
    }
    return row;
}

SweepRow bilinear_seed(const SweepSettings& s, std::uint64_t seed) {
    const auto& [basis, J, M, N] = *s.bilinear;
    const std::size_t K = static_cast<std::size_t>(basis.size());

    std::mt19937_64 rng(seed);
    const Matrix G = gaussian_matrix(M, J, rng);
    std::vector<Vector> anchors;
    for (Eigen::Index m = 0; m < G.rows(); ++m) anchors.push_back(G.row(m).transpose());
    const Matrix C = gaussian_matrix(J, K, rng);
    std::vector<std::size_t> assign(N);
    for (std::size_t n = 0; n < N; ++n) assign[n] = n % M;
    const auto times = sample_times(basis.interval(), N, seed);
    Vector b(static_cast<Eigen::Index>(N));
    for (std::size_t n = 0; n < N; ++n)
        b(static_cast<Eigen::Index>(n)) = anchors[assign[n]].dot(C * eval_basis(basis, times[n]));
    const BilinearMeasurementSet ms(anchors, assign, times, basis, b);

    SweepRow row;
    row.seed = seed;
    row.required = static_cast<int>(J * K);
    try {
        const auto sol = solve_bilinear(ms, s.tolerance);
        row.rank = sol.rank;
        row.max_abs_error = (sol.C - C).cwiseAbs().maxCoeff();
        row.success = row.max_abs_error < s.success_threshold;
    } catch (const NonUniqueSolutionError& e) {
        row.rank = e.rank();
        row.note = "non_unique";
    }
    return row;
}

}  // namespace

SweepSettings parse_sweep(const YAML::Node& node, const std::string& where) {
    if (!node || !node.IsMap()) throw ConfigError("missing mapping '" + where + "'");
    SweepSettings s;
    s.experiment = get_string(node, "experiment", where);
    if (s.experiment != "localize" && s.experiment != "tem" && s.experiment != "bilinear")
        throw ConfigError("field '" + where + ".experiment' must be localize, tem or bilinear (line " +
                          std::to_string(node["experiment"].Mark().line + 1) + ")");
    const auto seeds = get_int(node, "seeds", where);
    if (seeds < 1) throw ConfigError("field '" + where + ".seeds' must be positive");
    s.seeds = static_cast<std::size_t>(seeds);
    const auto first = get_optional_int(node, "first_seed", where).value_or(0);
    if (first < 0) throw ConfigError("field '" + where + ".first_seed' must be non-negative");
    s.first_seed = static_cast<std::uint64_t>(first);
    s.success_threshold = get_optional_double(node, "success_threshold", where).value_or(1e-6);
    const YAML::Node params = node["params"] ? node["params"] : YAML::Node(YAML::NodeType::Map);
    if (s.experiment == "localize") s.localize = parse_localize(params);
    if (s.experiment == "tem") s.tem = parse_tem(require_node(params, "tem"), "sweep.params.tem");
    if (s.experiment == "bilinear") s.bilinear = parse_bilinear(params);
    return s;
}

SweepRow run_sweep_seed(const SweepSettings& settings, std::uint64_t seed) {
    if (settings.experiment == "localize") return localize_seed(settings, seed);
    if (settings.experiment == "tem") return tem_seed(settings, seed);
    return bilinear_seed(settings, seed);
}

std::vector<SweepRow> run_sweep(const SweepSettings& settings, unsigned jobs) {
    std::vector<SweepRow> rows(settings.seeds);
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            const std::uint64_t seed = settings.first_seed + i;
            try {
                rows[i] = run_sweep_seed(settings, seed);
            } catch (const ConfigError&) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = rows.size();
            } catch (const std::exception& e) {
                rows[i] = SweepRow{};
                rows[i].seed = seed;
                rows[i].note = e.what();
            }
        }
    };
    const unsigned n = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(std::max<std::size_t>(rows.size(), 1)));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::string sweep_rows_csv(const std::vector<SweepRow>& rows) {
    std::string out = "seed,success,rank,required,max_abs_error,note\n";
    for (const auto& r : rows) {
        std::string note = r.note;
        std::replace(note.begin(), note.end(), ',', ';');
        std::replace(note.begin(), note.end(), '\n', ' ');
        out += std::to_string(r.seed) + "," + (r.success ? "1" : "0") + "," + std::to_string(r.rank) +
               "," + std::to_string(r.required) + "," + format_double(r.max_abs_error) + "," + note + "\n";
    }
    return out;
}

}  // namespace bqrec::cli

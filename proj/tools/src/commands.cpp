#include "bqrec_cli/commands.hpp"

#include "bqrec/basis.hpp"
#include "bqrec/bilinear.hpp"
#include "bqrec/errors.hpp"
#include "bqrec/localization.hpp"
#include "bqrec/permutations.hpp"
#include "bqrec/quadratic.hpp"
#include "bqrec/rank.hpp"
#include "bqrec/tem.hpp"
#include "bqrec_cli/config.hpp"
#include "bqrec_cli/csv.hpp"
#include "bqrec_cli/report.hpp"
#include "bqrec_cli/sweep.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <ostream>

namespace bqrec::cli {

namespace {

namespace fs = std::filesystem;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::string out;
    unsigned jobs = 1;
};

struct Context {
    Common opts;
    std::optional<ConfigFile> config;
    std::uint64_t seed = 0;
    double tol = kDefaultRankTolerance;
    fs::path out_dir;
    Report report;
    std::ostream* out = nullptr;

    const YAML::Node& root() const {
        if (!config) throw ConfigError("this command needs --config");
        return config->root;
    }
    fs::path resolve(const std::string& p) const {
        const fs::path path(p);
        if (path.is_absolute() || !config) return path;
        return config->path.parent_path() / path;
    }
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
    auto* opt = sub->add_option("--config", c.config, "YAML configuration file");
    if (config_required) opt->required();
    sub->add_option("--seed", c.seed, "random seed (overrides the config)");
    sub->add_option("--tol", c.tol, "relative rank tolerance (overrides the config)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, std::string("output directory (default: $") + kOutDirEnv + " or .)");
    sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
}

void prepare(Context& ctx, const std::string& command) {
    if (!ctx.opts.config.empty()) ctx.config = load_config(ctx.opts.config);
    const YAML::Node root = ctx.config ? ctx.config->root : YAML::Node(YAML::NodeType::Map);
    if (ctx.opts.seed) {
        ctx.seed = *ctx.opts.seed;
    } else if (const auto s = get_optional_int(root, "seed", "")) {
        if (*s < 0) throw ConfigError("field 'seed' must be non-negative");
        ctx.seed = static_cast<std::uint64_t>(*s);
    }
    if (ctx.opts.tol) {
        ctx.tol = *ctx.opts.tol;
    } else if (const auto t = get_optional_double(root, "tolerance", "")) {
        if (*t <= 0) throw ConfigError("field 'tolerance' must be positive");
        ctx.tol = *t;
    }
    if (!ctx.opts.out.empty()) {
        ctx.out_dir = ctx.opts.out;
    } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
        ctx.out_dir = env;
    } else {
        ctx.out_dir = ".";
    }
    ctx.report.set("command", command);
    ctx.report.set("seed", ctx.seed);
    ctx.report.set("tolerance", ctx.tol);
    ctx.report.set("config_hash", ctx.config ? content_hash(ctx.config->text) : std::string("none"));
}

std::vector<std::string> numbered(const std::string& prefix, Eigen::Index n) {
    std::vector<std::string> h;
    for (Eigen::Index i = 0; i < n; ++i) h.push_back(prefix + std::to_string(i));
    return h;
}

std::vector<std::size_t> assignments_from(const YAML::Node& root, std::size_t M) {
    if (root["assignments"]) return parse_indices(root["assignments"], "assignments");
    if (!root["counts"]) throw ConfigError("config needs either 'counts' or 'assignments'");
    const auto counts = parse_indices(root["counts"], "counts");
    if (counts.size() != M)
        throw ConfigError("field 'counts' must have one entry per anchor (" + std::to_string(M) + ")");
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < M; ++m) out.insert(out.end(), counts[m], m);
    return out;
}

std::vector<double> times_from(const YAML::Node& root, const BasisFamily& basis, std::size_t N,
                               std::uint64_t seed) {
    if (!root["times"]) return sample_times(basis.interval(), N, seed);
    const YAML::Node t = root["times"];
    if (!t.IsSequence() || t.size() != N)
        throw ConfigError("field 'times' must list one time per measurement (" + std::to_string(N) + ")");
    return parse_numbers(t, "times");
}

void write_report(const Context& ctx, const std::string& name) {
    write_file_atomic(ctx.out_dir / name, ctx.report.str());
}

int cmd_check(Context& ctx) {
    const YAML::Node& root = ctx.root();
    const BasisFamily basis = parse_basis(root["basis"]);
    const auto anchors = parse_vectors(root["anchors"], "anchors");
    const auto assign = assignments_from(root, anchors.size());
    const auto times = times_from(root, basis, assign.size(), ctx.seed);
    const BilinearMeasurementSet ms(anchors, assign, times, basis);

    const auto v = theorem1_verdict(ms, ctx.tol);
    auto& sec = ctx.report.section("verdict");
    sec.set("solvable", v.solvable);
    sec.set("lhs", v.lhs);
    sec.set("required", v.required);
    sec.set("deficit", v.deficit);
    sec.set("counts", v.counts);
    sec.set("witness", v.witness);
    const Matrix gamma = assemble_gamma(ms);
    const int rank = numerical_rank(gamma, ctx.tol);
    auto& rs = ctx.report.section("gamma");
    rs.set("rows", gamma.rows());
    rs.set("columns", gamma.cols());
    rs.set("rank", rank);
    rs.set("full_column_rank", rank == gamma.cols());
    return v.solvable && rank == gamma.cols() ? kExitOk : kExitNonUnique;
}

int cmd_solve(Context& ctx, const std::string& measurements) {
    const YAML::Node& root = ctx.root();
    const BasisFamily basis = parse_basis(root["basis"]);
    const auto anchors = parse_vectors(root["anchors"], "anchors");
    std::string path = measurements;
    if (path.empty()) path = get_string(root, "measurements", "");
    const Table t = read_table(ctx.resolve(path));
    const auto ca = t.column("anchor"), ct = t.column("time"), cv = t.column("value");
    std::vector<std::size_t> assign;
    std::vector<double> times;
    Vector b(static_cast<Eigen::Index>(t.rows.size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double a = t.rows[r][ca];
        if (a < 0 || a != std::floor(a)) throw IoError("anchor index must be a non-negative integer");
        assign.push_back(static_cast<std::size_t>(a));
        times.push_back(t.rows[r][ct]);
        b(static_cast<Eigen::Index>(r)) = t.rows[r][cv];
    }
    const BilinearMeasurementSet ms(anchors, assign, times, basis, b);
    const auto sol = solve_bilinear(ms, ctx.tol);
    write_matrix(ctx.out_dir / "C.csv", sol.C, numbered("k", sol.C.cols()));
    auto& sec = ctx.report.section("solution");
    sec.set("rank", sol.rank);
    sec.set("residual_norm", sol.residual_norm);
    sec.set("output", (ctx.out_dir / "C.csv").string());
    return kExitOk;
}

int cmd_oracle_det(Context& ctx, const std::string& matrix, std::size_t J, std::size_t K,
                   std::size_t cap) {
    const Matrix M = read_matrix(matrix);
    if (M.rows() != M.cols()) throw IoError("matrix must be square");
    if (static_cast<std::size_t>(M.rows()) != J * K)
        throw ArgumentError("matrix size " + std::to_string(M.rows()) + " does not equal J*K = " +
                            std::to_string(J * K));
    const bool integral = (M.array() == M.array().round()).all() && M.cwiseAbs().maxCoeff() < 9.0e15;
    const auto classes = enumerate_classes(J * K, J, cap);
    auto& sec = ctx.report.section("determinant");
    sec.set("N", J * K);
    sec.set("J", J);
    sec.set("K", K);
    sec.set("classes", classes.size());
    sec.set("exact_integer", integral);
    if (integral) {
        const IntMatrix Mi = M.cast<std::int64_t>();
        const auto direct = bareiss_determinant(Mi);
        const auto blocks = det_by_blocks(Mi, J, K, cap);
        sec.set("direct", direct);
        sec.set("by_blocks", blocks);
        sec.set("agree", direct == blocks);
        return kExitOk;
    }
    const double direct = lu_determinant(M);
    const double blocks = det_by_blocks(M, J, K, cap);
    const double diff = std::abs(direct - blocks);
    sec.set("direct", direct);
    sec.set("by_blocks", blocks);
    sec.set("abs_difference", diff);
    sec.set("relative_difference", diff / std::max(1.0, std::abs(direct)));
    return kExitOk;
}

int complex_quadratic_rank(const BasisFamily& basis, const std::vector<double>& times, double tol) {
    const std::size_t K = static_cast<std::size_t>(basis.size());
    Eigen::MatrixXcd Q(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(svech_size(K)));
    for (std::size_t n = 0; n < times.size(); ++n) {
        const Eigen::VectorXcd f = eval_basis_complex(basis, times[n]);
        for (std::size_t c = 0; c < K; ++c)
            for (std::size_t r = 0; r <= c; ++r)
                Q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(svech_index(r, c))) =
                    (r == c ? 1.0 : 2.0) * f(static_cast<Eigen::Index>(r)) * f(static_cast<Eigen::Index>(c));
    }
    const Eigen::BDCSVD<Eigen::MatrixXcd> svd(Q);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    return static_cast<int>((s.array() > tol * s(0)).count());
}

int cmd_rank_budget(Context& ctx, std::size_t samples) {
    const BasisFamily basis = parse_basis(ctx.root()["basis"]);
    const std::size_t K = static_cast<std::size_t>(basis.size());
    if (samples == 0) samples = 2 * svech_size(K);
    const auto times = sample_times(basis.interval(), samples, ctx.seed);
    auto& sec = ctx.report.section("quadratic");
    sec.set("basis", std::string(to_string(basis.kind())));
    sec.set("K", K);
    sec.set("svech_size", svech_size(K));
    sec.set("samples", samples);
    try {
        sec.set("budget", max_quadratic_rank(basis));
    } catch (const UnsupportedError&) {
        sec.set("budget", "unsupported");
    }
    int rank = 0;
    if (basis.kind() == BasisKind::ComplexExponential) {
        rank = complex_quadratic_rank(basis, times, ctx.tol);
    } else {
        const Matrix F = eval_basis_columns(basis, times).transpose();
        rank = numerical_rank(assemble_quadratic_block(F), ctx.tol);
    }
    sec.set("empirical_rank", rank);
    return kExitOk;
}

YAML::Node vectors_node(const std::vector<Vector>& vs) {
    YAML::Node n;
    for (const auto& v : vs) {
        YAML::Node row;
        for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v(i));
        row.SetStyle(YAML::EmitterStyle::Flow);
        n.push_back(row);
    }
    return n;
}

std::string emit(const YAML::Node& n) {
    YAML::Emitter e;
    e << n;
    return std::string(e.c_str()) + "\n";
}

void report_corollary(Report& r, const Corollary2Report& c) {
    auto& s = r.section("measurement_condition");
    s.set("ok", c.ok);
    s.set("lhs", c.lhs);
    s.set("required", c.required);
    s.set("N", c.N);
    s.set("total_required", c.total_required);
    s.set("counts", c.counts);
}

int cmd_simulate(Context& ctx) {
    const YAML::Node& root = ctx.root();
    SimulationSpec spec;
    spec.basis = parse_basis(root["basis"]);
    const auto size_field = [&](const char* key, std::size_t fallback) {
        const auto v = get_optional_int(root, key, "");
        if (v && *v < 1) throw ConfigError(std::string("field '") + key + "' must be positive");
        return v ? static_cast<std::size_t>(*v) : fallback;
    };
    spec.D = size_field("dimension", 2);
    spec.M = size_field("num_anchors", spec.D + 2);
    const std::size_t K = static_cast<std::size_t>(spec.basis.size());
    spec.N = size_field("num_measurements", spec.D * K + max_quadratic_rank(spec.basis));
    spec.policy = parse_policy(root["policy"], "policy");
    spec.anchor_extent = get_optional_double(root, "anchor_extent", "").value_or(5.0);
    if (root["anchors"]) spec.anchors = parse_vectors(root["anchors"], "anchors");
    if (root["C_true"]) spec.C_true = parse_matrix(root["C_true"], "C_true");
    spec.seed = ctx.seed;
    const Scenario sc = simulate_scenario(spec);

    std::string csv = "anchor,time,distance\n";
    for (const auto& m : sc.measurements())
        csv += std::to_string(m.anchor) + "," + format_double(m.time) + "," + format_double(m.distance) + "\n";
    write_file_atomic(ctx.out_dir / "measurements.csv", csv);
    write_matrix(ctx.out_dir / "C_true.csv", *sc.C_true(), numbered("k", sc.C_true()->cols()));

    YAML::Node scenario;
    scenario["seed"] = ctx.seed;
    scenario["basis"] = basis_to_yaml(sc.basis());
    scenario["anchors"] = vectors_node(sc.anchors());
    scenario["measurements"] = "measurements.csv";
    write_file_atomic(ctx.out_dir / "scenario.yaml", emit(scenario));

    auto& s = ctx.report.section("scenario");
    s.set("D", sc.D());
    s.set("K", sc.K());
    s.set("M", sc.M());
    s.set("N", sc.N());
    report_corollary(ctx.report, corollary2_check(sc));
    return kExitOk;
}

int cmd_localize(Context& ctx, const std::string& measurements) {
    const YAML::Node& root = ctx.root();
    const BasisFamily basis = parse_basis(root["basis"]);
    const auto anchors = parse_vectors(root["anchors"], "anchors");
    std::string path = measurements;
    if (path.empty()) path = get_string(root, "measurements", "");
    const Table t = read_table(ctx.resolve(path));
    const auto ca = t.column("anchor"), ct = t.column("time"), cd = t.column("distance");
    std::vector<RangeMeasurement> ms;
    for (const auto& row : t.rows) {
        if (row[ca] < 0 || row[ca] != std::floor(row[ca]))
            throw IoError("anchor index must be a non-negative integer");
        ms.push_back({static_cast<std::size_t>(row[ca]), row[ct], row[cd]});
    }
    const Scenario sc(basis, anchors, ms);
    report_corollary(ctx.report, corollary2_check(sc));

    const auto est = localize(sc, ctx.tol);
    auto& rr = ctx.report.section("rank");
    rr.set("stacked_rank", est.rank_report.rank);
    rr.set("required", est.rank_report.required);
    rr.set("bilinear_rank", est.rank_report.bilinear_rank);
    rr.set("rows", est.rank_report.rows);
    rr.set("columns", est.rank_report.columns);
    auto& fit = ctx.report.section("fit");
    fit.set("residual", est.residual);
    fit.set("quadratic_consistency", est.quadratic_consistency);

    std::size_t points = 101;
    if (root["grid"]) {
        const auto p = get_int(root["grid"], "points", "grid");
        if (p < 2) throw ConfigError("field 'grid.points' must be at least 2");
        points = static_cast<std::size_t>(p);
    }
    std::vector<double> grid(points);
    const Interval iv = basis.interval();
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const Matrix X = eval_trajectory(est.C_hat, basis, grid);  // D x points
    Matrix P(static_cast<Eigen::Index>(points), X.rows() + 1);
    for (std::size_t i = 0; i < points; ++i) {
        P(static_cast<Eigen::Index>(i), 0) = grid[i];
        P.row(static_cast<Eigen::Index>(i)).tail(X.rows()) = X.col(static_cast<Eigen::Index>(i)).transpose();
    }
    auto header = numbered("x", X.rows());
    header.insert(header.begin(), "time");
    write_matrix(ctx.out_dir / "C_hat.csv", est.C_hat, numbered("k", est.C_hat.cols()));
    write_matrix(ctx.out_dir / "L_hat.csv", est.L_hat, numbered("k", est.L_hat.cols()));
    write_matrix(ctx.out_dir / "positions.csv", P, header);
    return kExitOk;
}

std::string spikes_csv(const std::vector<SpikeTrain>& trains) {
    std::string csv = "machine,time\n";
    for (const auto& tr : trains)
        for (double t : tr.times) csv += std::to_string(tr.machine) + "," + format_double(t) + "\n";
    return csv;
}

std::vector<SpikeTrain> read_spikes(const fs::path& path, std::size_t I) {
    const Table t = read_table(path);
    const auto cm = t.column("machine"), ct = t.column("time");
    std::vector<SpikeTrain> trains(I);
    for (std::size_t i = 0; i < I; ++i) trains[i].machine = i;
    for (const auto& row : t.rows) {
        if (row[cm] < 0 || row[cm] != std::floor(row[cm]) || row[cm] >= static_cast<double>(I))
            throw IoError("spike machine index out of range in " + path.string());
        trains[static_cast<std::size_t>(row[cm])].times.push_back(row[ct]);
    }
    for (auto& tr : trains)
        for (std::size_t k = 1; k < tr.times.size(); ++k)
            if (!(tr.times[k] > tr.times[k - 1]))
                throw IoError("spike times must increase within each machine in " + path.string());
    return trains;
}

int cmd_tem_simulate(Context& ctx) {
    TemSection section = parse_tem(ctx.root()["tem"]);
    Matrix C;
    if (section.coefficients) {
        C = *section.coefficients;
    } else {
        std::mt19937_64 rng(ctx.seed);
        C = gaussian_matrix(section.config.J, section.config.K, rng);
    }
    resolve_tem_defaults(section, C);
    const auto trains = simulate_spikes(section.config, C);

    write_file_atomic(ctx.out_dir / "spikes.csv", spikes_csv(trains));
    write_matrix(ctx.out_dir / "C_true.csv", C, numbered("k", C.cols()));
    YAML::Node resolved;
    resolved["seed"] = ctx.seed;
    resolved["tem"] = tem_to_yaml(section.config, C);
    resolved["spikes"] = "spikes.csv";
    write_file_atomic(ctx.out_dir / "tem_resolved.yaml", emit(resolved));

    auto& s = ctx.report.section("spikes");
    std::vector<std::size_t> counts;
    std::vector<std::size_t> truncated;
    for (const auto& tr : trains) {
        counts.push_back(tr.count());
        truncated.push_back(tr.truncated ? 1 : 0);
    }
    s.set("counts", counts);
    s.set("truncated", truncated);
    const auto cond = tem_condition(trains, section.config.J, section.config.K);
    auto& c = ctx.report.section("condition");
    c.set("ok", cond.ok);
    c.set("lhs", cond.lhs);
    c.set("required", cond.required);
    return kExitOk;
}

int cmd_tem_decode(Context& ctx, const std::string& spikes) {
    const YAML::Node& root = ctx.root();
    TemSection section = parse_tem(root["tem"]);
    for (std::size_t i = 0; i < section.config.I(); ++i)
        if (section.auto_bias[i] || section.auto_delta[i])
            throw ConfigError("field 'tem.machines[" + std::to_string(i) +
                              "]' needs explicit bias and delta for decoding");
    std::string path = spikes;
    if (path.empty()) path = get_string(root, "spikes", "");
    const auto trains = read_spikes(ctx.resolve(path), section.config.I());

    const auto cond = tem_condition(trains, section.config.J, section.config.K);
    auto& c = ctx.report.section("condition");
    c.set("ok", cond.ok);
    c.set("lhs", cond.lhs);
    c.set("required", cond.required);

    const Matrix C_hat = decode_tem(section.config, trains, ctx.tol);
    write_matrix(ctx.out_dir / "C_hat.csv", C_hat, numbered("k", C_hat.cols()));
    if (section.coefficients)
        ctx.report.section("fit").set("max_abs_error", (C_hat - *section.coefficients).cwiseAbs().maxCoeff());
    return kExitOk;
}

int cmd_sweep(Context& ctx) {
    SweepSettings s = parse_sweep(ctx.root()["sweep"]);
    s.tolerance = ctx.tol;
    if (ctx.opts.seed) s.first_seed = *ctx.opts.seed;
    const auto rows = run_sweep(s, ctx.opts.jobs);
    write_file_atomic(ctx.out_dir / "sweep.csv", sweep_rows_csv(rows));
    std::size_t ok = 0;
    double worst = 0.0;
    for (const auto& r : rows) {
        ok += r.success ? 1 : 0;
        if (r.success) worst = std::max(worst, r.max_abs_error);
    }
    auto& sec = ctx.report.section("sweep");
    sec.set("experiment", s.experiment);
    sec.set("first_seed", s.first_seed);
    sec.set("seeds", s.seeds);
    sec.set("successes", ok);
    sec.set("failures", rows.size() - ok);
    sec.set("worst_success_error", worst);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Recovery of bilinear and quadratic measurement models"};
    app.name("bqrec");
    app.require_subcommand(1);

    Context ctx;
    ctx.out = &out;
    Common& c = ctx.opts;

    auto* check = app.add_subcommand("check", "test the measurement-count condition and Gamma rank");
    add_common(check, c, true);

    std::string meas;
    auto* solve = app.add_subcommand("solve", "recover C from bilinear measurements");
    add_common(solve, c, true);
    solve->add_option("--measurements", meas, "CSV with columns anchor,time,value");

    std::string matrix;
    std::size_t J = 0, K = 0, cap = kDefaultEnumerationCap;
    auto* det = app.add_subcommand("oracle-det", "determinant by equivalence-class blocks vs direct");
    add_common(det, c, false);
    det->add_option("--matrix", matrix, "CSV square matrix")->required()->check(CLI::ExistingFile);
    det->add_option("--J", J, "block height")->required()->check(CLI::PositiveNumber);
    det->add_option("--K", K, "number of blocks")->required()->check(CLI::PositiveNumber);
    det->add_option("--max-size", cap, "largest J*K accepted");

    std::size_t samples = 0;
    auto* budget = app.add_subcommand("rank-budget", "predicted and sampled rank of the quadratic block");
    add_common(budget, c, true);
    budget->add_option("--samples", samples, "number of sample times (default 2 K(K+1)/2)");

    auto* simulate = app.add_subcommand("simulate", "draw a localization scenario");
    add_common(simulate, c, true);

    auto* loc = app.add_subcommand("localize", "recover a trajectory from range measurements");
    add_common(loc, c, true);
    loc->add_option("--measurements", meas, "CSV with columns anchor,time,distance");

    auto* tem = app.add_subcommand("tem", "time encoding machines");
    tem->require_subcommand(1);
    auto* tem_sim = tem->add_subcommand("simulate", "generate spike trains");
    add_common(tem_sim, c, true);
    std::string spikes;
    auto* tem_dec = tem->add_subcommand("decode", "recover C from spike trains");
    add_common(tem_dec, c, true);
    tem_dec->add_option("--spikes", spikes, "CSV with columns machine,time");

    auto* sweep = app.add_subcommand("sweep", "repeat an experiment over many seeds");
    add_common(sweep, c, true);

    std::vector<const char*> argv{"bqrec"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    std::function<int()> action;
    std::string name;
    if (*check) name = "check", action = [&] { return cmd_check(ctx); };
    if (*solve) name = "solve", action = [&] { return cmd_solve(ctx, meas); };
    if (*det) name = "oracle-det", action = [&] { return cmd_oracle_det(ctx, matrix, J, K, cap); };
    if (*budget) name = "rank-budget", action = [&] { return cmd_rank_budget(ctx, samples); };
    if (*simulate) name = "simulate", action = [&] { return cmd_simulate(ctx); };
    if (*loc) name = "localize", action = [&] { return cmd_localize(ctx, meas); };
    if (*tem_sim) name = "tem simulate", action = [&] { return cmd_tem_simulate(ctx); };
    if (*tem_dec) name = "tem decode", action = [&] { return cmd_tem_decode(ctx, spikes); };
    if (*sweep) name = "sweep", action = [&] { return cmd_sweep(ctx); };

    const auto t0 = std::chrono::steady_clock::now();
    int code = kExitOk;
    try {
        prepare(ctx, name);
        code = action();
        write_report(ctx, "report.yaml");
    } catch (const NonUniqueSolutionError& e) {
        err << "bqrec " << name << ": " << e.what() << " (rank " << e.rank() << ", required "
            << e.required_rank() << ")\n";
        return kExitNonUnique;
    } catch (const std::exception& e) {
        err << "bqrec " << name << ": " << e.what() << "\n";
        return kExitInvalid;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ctx.report.set("exit_code", code);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", secs);
    ctx.report.set("wall_time_s", std::string(buf));
    out << ctx.report.str();
    return code;
}

}  // namespace bqrec::cli

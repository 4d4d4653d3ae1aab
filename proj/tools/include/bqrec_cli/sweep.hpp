#pragma once

#include "bqrec/localization.hpp"
#include "bqrec_cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bqrec::cli {

/// Independent N(0, 1) entries.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

/// Outcome of one seeded run.
struct SweepRow {
    std::uint64_t seed = 0;
    bool success = false;
    int rank = 0;
    int required = 0;
    double max_abs_error = 0.0;
    std::string note;
};

struct BilinearSweepParams {
    BasisFamily basis = BasisFamily::monomial(3);
    std::size_t J = 2;
    std::size_t M = 2;
    std::size_t N = 6;
};

struct SweepSettings {
    std::string experiment = "localize";  ///< localize | tem | bilinear
    std::uint64_t first_seed = 0;
    std::size_t seeds = 100;
    double tolerance = 1e-10;
    double success_threshold = 1e-6;
    // experiment parameters, parsed once; only the one matching `experiment` is set
    std::optional<SimulationSpec> localize;
    std::optional<TemSection> tem;
    std::optional<BilinearSweepParams> bilinear;
};

SweepSettings parse_sweep(const YAML::Node& node, const std::string& where = "sweep");

SweepRow run_sweep_seed(const SweepSettings& settings, std::uint64_t seed);

/// Runs every seed, spreading them over `jobs` threads. Rows come back in seed
/// order regardless of scheduling.
std::vector<SweepRow> run_sweep(const SweepSettings& settings, unsigned jobs);

std::string sweep_rows_csv(const std::vector<SweepRow>& rows);

}  // namespace bqrec::cli

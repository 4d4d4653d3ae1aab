#pragma once

#include "bqrec/basis.hpp"
#include "bqrec/errors.hpp"
#include "bqrec/localization.hpp"
#include "bqrec/tem.hpp"
#include "bqrec/types.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bqrec::cli {

/// Malformed configuration; the message names the field and the 1-based line.
class ConfigError : public bqrec::Error {
public:
    using Error::Error;
};

/// Missing or unreadable input/output files.
class IoError : public bqrec::Error {
public:
    using Error::Error;
};

/// A parsed configuration file together with its raw text (for hashing).
struct ConfigFile {
    YAML::Node root;
    std::string text;
    std::filesystem::path path;
};

ConfigFile load_config(const std::filesystem::path& path);
ConfigFile parse_config(const std::string& text, const std::filesystem::path& origin = "<string>");

/// Typed accessors that report the dotted field path and line on failure.
double get_double(const YAML::Node& parent, const std::string& key, const std::string& where);
long long get_int(const YAML::Node& parent, const std::string& key, const std::string& where);
std::string get_string(const YAML::Node& parent, const std::string& key, const std::string& where);
std::optional<double> get_optional_double(const YAML::Node& parent, const std::string& key,
                                          const std::string& where);
std::optional<long long> get_optional_int(const YAML::Node& parent, const std::string& key,
                                          const std::string& where);

/// basis: {kind, K, interval: [a, b], omega, knot_offset, lower}
BasisFamily parse_basis(const YAML::Node& node, const std::string& where = "basis");
YAML::Node basis_to_yaml(const BasisFamily& basis);

std::vector<double> parse_numbers(const YAML::Node& node, const std::string& where);

/// List of equal-length numeric vectors.
std::vector<Vector> parse_vectors(const YAML::Node& node, const std::string& where);
Matrix parse_matrix(const YAML::Node& node, const std::string& where);
std::vector<std::size_t> parse_indices(const YAML::Node& node, const std::string& where);

/// tem: {J, K, omega, knot_offset, horizon, mixing, machines: [{kappa, delta, bias, start}],
/// signal_bound}. Machines may omit bias/delta; they are then derived from C.
struct TemSection {
    TemConfig config;
    std::optional<Matrix> coefficients;
    std::vector<bool> auto_bias;
    std::vector<bool> auto_delta;
};
TemSection parse_tem(const YAML::Node& node, const std::string& where = "tem");

/// Fills in derived biases (1.5 * signal bound + 0.1) and deltas (about 4K
/// spikes per machine over its window).
void resolve_tem_defaults(TemSection& section, const Matrix& C);
YAML::Node tem_to_yaml(const TemConfig& cfg, const std::optional<Matrix>& coefficients);

AssignmentPolicy parse_policy(const YAML::Node& node, const std::string& where);

}  // namespace bqrec::cli

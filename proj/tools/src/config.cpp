#include "bqrec_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace bqrec::cli {

namespace {

std::string line_of(const YAML::Node& node) {
    if (!node.IsDefined() || node.Mark().is_null()) return "";
    return " (line " + std::to_string(node.Mark().line + 1) + ")";
}

std::string field(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& where) {
    if (!parent.IsMap()) throw ConfigError("'" + where + "' must be a mapping" + line_of(parent));
    const YAML::Node node = parent[key];
    if (!node.IsDefined() || node.IsNull())
        throw ConfigError("missing field '" + field(where, key) + "'" + line_of(parent));
    return node;
}

template <typename T>
T convert(const YAML::Node& node, const std::string& name, const char* expected) {
    if (!node.IsScalar())
        throw ConfigError("field '" + name + "' must be " + expected + line_of(node));
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("field '" + name + "' must be " + expected + ", got '" + node.Scalar() +
                          "'" + line_of(node));
    }
}

double to_double(const YAML::Node& node, const std::string& name) {
    const double v = convert<double>(node, name, "a number");
    if (!std::isfinite(v)) throw ConfigError("field '" + name + "' must be finite" + line_of(node));
    return v;
}

}  // namespace

ConfigFile parse_config(const std::string& text, const std::filesystem::path& origin) {
    ConfigFile cfg;
    cfg.text = text;
    cfg.path = origin;
    try {
        cfg.root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(origin.string() + ": YAML syntax error at line " +
                          std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    if (cfg.root.IsNull()) cfg.root = YAML::Node(YAML::NodeType::Map);
    if (!cfg.root.IsMap()) throw ConfigError(origin.string() + ": top level must be a mapping");
    return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

double get_double(const YAML::Node& parent, const std::string& key, const std::string& where) {
    return to_double(require(parent, key, where), field(where, key));
}

long long get_int(const YAML::Node& parent, const std::string& key, const std::string& where) {
    return convert<long long>(require(parent, key, where), field(where, key), "an integer");
}

std::string get_string(const YAML::Node& parent, const std::string& key, const std::string& where) {
    return convert<std::string>(require(parent, key, where), field(where, key), "a string");
}

std::optional<double> get_optional_double(const YAML::Node& parent, const std::string& key,
                                          const std::string& where) {
    if (!parent.IsMap() || !parent[key] || parent[key].IsNull()) return std::nullopt;
    return get_double(parent, key, where);
}

std::optional<long long> get_optional_int(const YAML::Node& parent, const std::string& key,
                                          const std::string& where) {
    if (!parent.IsMap() || !parent[key] || parent[key].IsNull()) return std::nullopt;
    return get_int(parent, key, where);
}

std::vector<double> parse_numbers(const YAML::Node& node, const std::string& where) {
    if (!node.IsSequence())
        throw ConfigError("field '" + where + "' must be a list of numbers" + line_of(node));
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i)
        out.push_back(to_double(node[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<Vector> parse_vectors(const YAML::Node& node, const std::string& where) {
    if (!node.IsSequence() || node.size() == 0)
        throw ConfigError("field '" + where + "' must be a non-empty list of vectors" + line_of(node));
    std::vector<Vector> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const YAML::Node row = node[i];
        const std::string name = where + "[" + std::to_string(i) + "]";
        if (!row.IsSequence() || row.size() == 0)
            throw ConfigError("field '" + name + "' must be a non-empty list of numbers" + line_of(row));
        Vector v(static_cast<Eigen::Index>(row.size()));
        for (std::size_t j = 0; j < row.size(); ++j)
            v(static_cast<Eigen::Index>(j)) = to_double(row[j], name + "[" + std::to_string(j) + "]");
        if (!out.empty() && v.size() != out.front().size())
            throw ConfigError("field '" + name + "' has length " + std::to_string(v.size()) +
                              ", expected " + std::to_string(out.front().size()) + line_of(row));
        out.push_back(std::move(v));
    }
    return out;
}

Matrix parse_matrix(const YAML::Node& node, const std::string& where) {
    const auto rows = parse_vectors(node, where);
    Matrix M(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) M.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    return M;
}

std::vector<std::size_t> parse_indices(const YAML::Node& node, const std::string& where) {
    if (!node.IsSequence())
        throw ConfigError("field '" + where + "' must be a list of indices" + line_of(node));
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const auto v = convert<long long>(node[i], where + "[" + std::to_string(i) + "]", "an integer");
        if (v < 0)
            throw ConfigError("field '" + where + "[" + std::to_string(i) + "]' must be non-negative" +
                              line_of(node[i]));
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

BasisFamily parse_basis(const YAML::Node& node, const std::string& where) {
    if (!node.IsMap()) throw ConfigError("field '" + where + "' must be a mapping" + line_of(node));
    const std::string kind_name = get_string(node, "kind", where);
    BasisKind kind;
    try {
        kind = parse_basis_kind(kind_name);
    } catch (const bqrec::Error& e) {
        throw ConfigError("field '" + where + ".kind': " + e.what() + line_of(node["kind"]));
    }
    const long long K = get_int(node, "K", where);
    if (K < 1 || K > 64)
        throw ConfigError("field '" + where + ".K' must lie in [1, 64]" + line_of(node["K"]));
    std::optional<Interval> interval;
    if (node["interval"]) {
        const YAML::Node iv = node["interval"];
        if (!iv.IsSequence() || iv.size() != 2)
            throw ConfigError("field '" + where + ".interval' must be [lo, hi]" + line_of(iv));
        interval = Interval{to_double(iv[0], where + ".interval[0]"), to_double(iv[1], where + ".interval[1]")};
        if (!(interval->lo < interval->hi))
            throw ConfigError("field '" + where + ".interval' must satisfy lo < hi" + line_of(iv));
    }
    try {
        switch (kind) {
            case BasisKind::Monomial:
                return interval ? BasisFamily::monomial(static_cast<int>(K), *interval)
                                : BasisFamily::monomial(static_cast<int>(K));
            case BasisKind::TrigPolynomial:
                return BasisFamily::trig_polynomial(static_cast<int>(K));
            case BasisKind::ComplexExponential:
                return BasisFamily::complex_exponential(static_cast<int>(K));
            case BasisKind::IntegratedSinc: {
                if (!interval)
                    throw ConfigError("field '" + where + ".interval' is required for integrated_sinc" +
                                      line_of(node));
                const double omega = get_double(node, "omega", where);
                const double offset = get_optional_double(node, "knot_offset", where).value_or(0.0);
                const double lower = get_optional_double(node, "lower", where).value_or(interval->lo);
                return BasisFamily::integrated_sinc(static_cast<int>(K), omega, offset, lower, *interval);
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const bqrec::Error& e) {
        throw ConfigError("field '" + where + "': " + e.what() + line_of(node));
    }
    throw ConfigError("field '" + where + ".kind' is not supported");
}

YAML::Node basis_to_yaml(const BasisFamily& basis) {
    YAML::Node n;
    n["kind"] = std::string(to_string(basis.kind()));
    n["K"] = basis.size();
    if (basis.kind() == BasisKind::Monomial || basis.kind() == BasisKind::IntegratedSinc) {
        YAML::Node iv;
        iv.push_back(basis.interval().lo);
        iv.push_back(basis.interval().hi);
        iv.SetStyle(YAML::EmitterStyle::Flow);
        n["interval"] = iv;
    }
    if (basis.kind() == BasisKind::IntegratedSinc) {
        n["omega"] = basis.omega();
        n["knot_offset"] = basis.knot_offset();
        n["lower"] = basis.lower_limit();
    }
    return n;
}

TemSection parse_tem(const YAML::Node& node, const std::string& where) {
    if (!node.IsMap()) throw ConfigError("field '" + where + "' must be a mapping" + line_of(node));
    TemSection s;
    TemConfig& cfg = s.config;
    const long long J = get_int(node, "J", where);
    const long long K = get_int(node, "K", where);
    if (J < 1) throw ConfigError("field '" + where + ".J' must be positive" + line_of(node["J"]));
    if (K < 1) throw ConfigError("field '" + where + ".K' must be positive" + line_of(node["K"]));
    cfg.J = static_cast<std::size_t>(J);
    cfg.K = static_cast<std::size_t>(K);
    cfg.omega = get_optional_double(node, "omega", where).value_or(std::numbers::pi);
    cfg.knot_offset = get_optional_double(node, "knot_offset", where).value_or(0.0);
    cfg.horizon = get_double(node, "horizon", where);
    cfg.mixing = parse_matrix(require(node, "mixing", where), where + ".mixing");
    cfg.signal_bound = get_optional_double(node, "signal_bound", where);

    const YAML::Node machines = require(node, "machines", where);
    if (!machines.IsSequence() || machines.size() == 0)
        throw ConfigError("field '" + where + ".machines' must be a non-empty list" + line_of(machines));
    for (std::size_t i = 0; i < machines.size(); ++i) {
        const std::string w = where + ".machines[" + std::to_string(i) + "]";
        const YAML::Node m = machines[i];
        if (!m.IsMap()) throw ConfigError("field '" + w + "' must be a mapping" + line_of(m));
        TemMachine mc;
        mc.kappa = get_optional_double(m, "kappa", w).value_or(1.0);
        mc.start = get_optional_double(m, "start", w).value_or(0.0);
        const auto bias = get_optional_double(m, "bias", w);
        const auto delta = get_optional_double(m, "delta", w);
        s.auto_bias.push_back(!bias);
        s.auto_delta.push_back(!delta);
        mc.bias = bias.value_or(1.0);
        mc.delta = delta.value_or(1.0);
        cfg.machines.push_back(mc);
    }
    if (static_cast<std::size_t>(cfg.mixing.rows()) != cfg.I() ||
        static_cast<std::size_t>(cfg.mixing.cols()) != cfg.J)
        throw ConfigError("field '" + where + ".mixing' must be " + std::to_string(cfg.I()) + " x " +
                          std::to_string(cfg.J) + line_of(node["mixing"]));
    if (node["coefficients"]) {
        s.coefficients = parse_matrix(node["coefficients"], where + ".coefficients");
        if (static_cast<std::size_t>(s.coefficients->rows()) != cfg.J ||
            static_cast<std::size_t>(s.coefficients->cols()) != cfg.K)
            throw ConfigError("field '" + where + ".coefficients' must be " + std::to_string(cfg.J) +
                              " x " + std::to_string(cfg.K) + line_of(node["coefficients"]));
    }
    return s;
}

void resolve_tem_defaults(TemSection& section, const Matrix& C) {
    TemConfig& cfg = section.config;
    for (std::size_t i = 0; i < cfg.I(); ++i) {
        TemMachine& m = cfg.machines[i];
        if (section.auto_bias[i]) {
            const double bound = cfg.signal_bound ? *cfg.signal_bound : signal_bound(cfg, C, i);
            m.bias = 1.5 * bound + 0.1;
        }
        if (section.auto_delta[i])
            m.delta = m.bias * (cfg.horizon - m.start) / (8.0 * m.kappa * static_cast<double>(cfg.K));
    }
    section.auto_bias.assign(cfg.I(), false);
    section.auto_delta.assign(cfg.I(), false);
}

namespace {

YAML::Node flow_row(const Matrix& M, Eigen::Index r) {
    YAML::Node row;
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    row.SetStyle(YAML::EmitterStyle::Flow);
    return row;
}

YAML::Node matrix_node(const Matrix& M) {
    YAML::Node n;
    for (Eigen::Index r = 0; r < M.rows(); ++r) n.push_back(flow_row(M, r));
    return n;
}

}  // namespace

YAML::Node tem_to_yaml(const TemConfig& cfg, const std::optional<Matrix>& coefficients) {
    YAML::Node n;
    n["J"] = cfg.J;
    n["K"] = cfg.K;
    n["omega"] = cfg.omega;
    n["knot_offset"] = cfg.knot_offset;
    n["horizon"] = cfg.horizon;
    if (cfg.signal_bound) n["signal_bound"] = *cfg.signal_bound;
    n["mixing"] = matrix_node(cfg.mixing);
    for (const auto& m : cfg.machines) {
        YAML::Node mn;
        mn["kappa"] = m.kappa;
        mn["delta"] = m.delta;
        mn["bias"] = m.bias;
        mn["start"] = m.start;
        mn.SetStyle(YAML::EmitterStyle::Flow);
        n["machines"].push_back(mn);
    }
    if (coefficients) n["coefficients"] = matrix_node(*coefficients);
    return n;
}

AssignmentPolicy parse_policy(const YAML::Node& node, const std::string& where) {
    if (!node || node.IsNull()) return AssignmentPolicy::round_robin();
    if (node.IsSequence()) return AssignmentPolicy::explicit_list(parse_indices(node, where));
    const std::string name = convert<std::string>(node, where, "round_robin, random or a list");
    if (name == "round_robin") return AssignmentPolicy::round_robin();
    if (name == "random") return AssignmentPolicy::random();
    throw ConfigError("field '" + where + "' must be round_robin, random or a list of anchor indices" +
                      line_of(node));
}

}  // namespace bqrec::cli

#pragma once

#include <concepts>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace bqrec::cli {

/// Ordered, nested key-value report printed as block-style YAML. Numbers use
/// 17 significant digits so reruns with the same inputs are byte-identical.
class Report {
public:
    Report& set(std::string key, std::string value);
    Report& set(std::string key, const char* value) { return set(std::move(key), std::string(value)); }
    Report& set(std::string key, bool value);
    Report& set(std::string key, double value);
    template <std::integral T>
        requires(!std::same_as<T, bool>)
    Report& set(std::string key, T value) {
        return set_raw(std::move(key), std::to_string(value));
    }
    Report& set(std::string key, const std::vector<double>& values);
    Report& set(std::string key, const std::vector<std::size_t>& values);

    /// Nested block; created on first use.
    Report& section(const std::string& key);

    /// Scalar text of a top-level key, or empty when absent.
    std::string get(std::string_view key) const;
    const Report* child(std::string_view key) const;

    std::string str() const;

private:
    struct Entry {
        std::string key;
        std::string scalar;
        std::unique_ptr<Report> child;
    };
    Report& set_raw(std::string key, std::string text);
    void write(std::string& out, int indent) const;

    std::vector<Entry> entries_;
};

/// FNV-1a 64-bit digest, hex encoded.
std::string content_hash(std::string_view bytes);

}  // namespace bqrec::cli

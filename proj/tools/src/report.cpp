#include "bqrec_cli/report.hpp"

#include "bqrec_cli/csv.hpp"

#include <cstdio>

namespace bqrec::cli {

namespace {

bool needs_quotes(const std::string& s) {
    if (s.empty()) return true;
    for (char c : s)
        if (c == ':' || c == '#' || c == '\'' || c == '"' || c == '\n' || c == '[' || c == ']' ||
            c == '{' || c == '}' || c == ',')
            return true;
    return s.front() == ' ' || s.back() == ' ' || s.front() == '-';
}

std::string quote(const std::string& s) {
    if (!needs_quotes(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + '"';
}

std::string yaml_double(double x) {
    const std::string s = format_double(x);
    if (s == "nan") return ".nan";
    if (s == "inf") return ".inf";
    if (s == "-inf") return "-.inf";
    return s;
}

}  // namespace

Report& Report::set_raw(std::string key, std::string text) {
    for (auto& e : entries_)
        if (e.key == key) {
            e.scalar = std::move(text);
            e.child.reset();
            return *this;
        }
    entries_.push_back({std::move(key), std::move(text), nullptr});
    return *this;
}

Report& Report::set(std::string key, std::string value) { return set_raw(std::move(key), quote(value)); }
Report& Report::set(std::string key, bool value) { return set_raw(std::move(key), value ? "true" : "false"); }
Report& Report::set(std::string key, double value) { return set_raw(std::move(key), yaml_double(value)); }

Report& Report::set(std::string key, const std::vector<double>& values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + yaml_double(values[i]);
    return set_raw(std::move(key), s + "]");
}

Report& Report::set(std::string key, const std::vector<std::size_t>& values) {
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + std::to_string(values[i]);
    return set_raw(std::move(key), s + "]");
}

Report& Report::section(const std::string& key) {
    for (auto& e : entries_)
        if (e.key == key) {
            if (!e.child) e.child = std::make_unique<Report>();
            return *e.child;
        }
    entries_.push_back({key, {}, std::make_unique<Report>()});
    return *entries_.back().child;
}

std::string Report::get(std::string_view key) const {
    for (const auto& e : entries_)
        if (e.key == key) return e.scalar;
    return {};
}

const Report* Report::child(std::string_view key) const {
    for (const auto& e : entries_)
        if (e.key == key) return e.child.get();
    return nullptr;
}

void Report::write(std::string& out, int indent) const {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    for (const auto& e : entries_) {
        if (e.child) {
            out += pad + quote(e.key) + ":\n";
            e.child->write(out, indent + 2);
        } else {
            out += pad + quote(e.key) + ": " + e.scalar + "\n";
        }
    }
}

std::string Report::str() const {
    std::string out;
    write(out, 0);
    return out;
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace bqrec::cli

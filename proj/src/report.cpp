#include "pfdr/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string_view>

namespace pfdr::report {

namespace {

std::string quote(std::string_view text) {
    // Reuse the library's escaping rules for strings.
    return nlohmann::json(std::string(text)).dump();
}

std::string scalar(const Document& value) {
    switch (value.type()) {
        case Document::value_t::null: return "null";
        case Document::value_t::boolean: return value.get<bool>() ? "true" : "false";
        case Document::value_t::number_integer: return std::to_string(value.get<std::int64_t>());
        case Document::value_t::number_unsigned: return std::to_string(value.get<std::uint64_t>());
        case Document::value_t::number_float: {
            const double x = value.get<double>();
            return std::isfinite(x) ? format_double(x) : "null";
        }
        case Document::value_t::string: return quote(value.get_ref<const std::string&>());
        default: return value.dump();
    }
}

void write_json(std::ostringstream& out, const Document& value, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    const char* newline = indent > 0 ? "\n" : "";
    const char* colon = indent > 0 ? ": " : ":";
    if (value.is_object()) {
        if (value.empty()) {
            out << "{}";
            return;
        }
        out << "{" << newline;
        bool first = true;
        for (auto it = value.begin(); it != value.end(); ++it) {
            if (!first) out << "," << newline;
            first = false;
            out << pad << quote(it.key()) << colon;
            write_json(out, it.value(), indent, depth + 1);
        }
        out << newline << close_pad << "}";
    } else if (value.is_array()) {
        if (value.empty()) {
            out << "[]";
            return;
        }
        out << "[" << newline;
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (i > 0) out << "," << newline;
            out << pad;
            write_json(out, value[i], indent, depth + 1);
        }
        out << newline << close_pad << "]";
    } else {
        out << scalar(value);
    }
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string escaped = "\"";
    for (char c : text) {
        if (c == '"') escaped += '"';
        escaped += c;
    }
    return escaped + "\"";
}

void flatten(const Document& value, const std::string& prefix, std::ostringstream& out) {
    if (value.is_object() || value.is_array()) {
        if (value.empty()) {
            out << csv_field(prefix) << ",\n";
            return;
        }
        if (value.is_object()) {
            for (auto it = value.begin(); it != value.end(); ++it) {
                flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
            }
        } else {
            for (std::size_t i = 0; i < value.size(); ++i) {
                flatten(value[i], prefix + "." + std::to_string(i), out);
            }
        }
        return;
    }
    std::string text = value.is_string() ? value.get<std::string>() : scalar(value);
    if (value.is_null()) text.clear();
    out << csv_field(prefix) << "," << csv_field(text) << "\n";
}

}  // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    std::string text(buffer);
    if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
    return text;
}

std::string to_json(const Document& doc, int indent) {
    std::ostringstream out;
    write_json(out, doc, indent, 0);
    out << "\n";
    return out.str();
}

std::string to_csv(const Document& doc) {
    std::ostringstream out;
    out << "key,value\n";
    flatten(doc, "", out);
    return out.str();
}

}  // namespace pfdr::report

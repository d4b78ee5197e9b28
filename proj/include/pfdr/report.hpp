#pragma once

#include <string>

#include <json.hpp>

namespace pfdr::report {

using Document = nlohmann::ordered_json;

// Top-level keys present in every report, in output order.
inline constexpr const char* kReportKeys[] = {"command", "inputs",  "outputs",     "diagnostics",
                                              "status",  "seed",    "tool_version"};

inline constexpr const char* kToolVersion = "0.1.0";

/// JSON text with every floating-point value printed to 17 significant
/// digits. Non-finite numbers become null.
std::string to_json(const Document& doc, int indent = 2);

/// Two-column "key,value" CSV; nested objects flatten to dotted keys.
std::string to_csv(const Document& doc);

/// %.17g, with a trailing ".0" when the result would read as an integer.
std::string format_double(double value);

}  // namespace pfdr::report

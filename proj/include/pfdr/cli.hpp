#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pfdr::cli {

enum class OutputFormat { Json, Csv };

// A fully resolved invocation. parameters holds every key of the command,
// defaults included, as the text that was (or would be) written for it.
struct RunConfig {
    std::string command;
    std::map<std::string, std::string> parameters;
    OutputFormat format = OutputFormat::Json;
    std::optional<std::string> output_path;
    std::optional<std::uint64_t> seed;

    bool operator==(const RunConfig&) const = default;
};

struct Invocation {
    RunConfig config;
    bool print_effective_config = false;
    bool help = false;
};

const std::vector<std::string>& commands();

/// Parses argv (without the program name). A --config file is read first and
/// flags override it. Throws UsageError naming the offending key.
Invocation parse_args(const std::vector<std::string>& args);
RunConfig parse_config(const std::vector<std::string>& args);

/// Parses config-file text. The file may carry the command itself.
RunConfig parse_config_text(const std::string& text, const std::string& command = {});

/// Config-file text that parse_config_text maps back to the same RunConfig.
std::string effective_config_text(const RunConfig& config);

std::string usage();

/// Dispatches and writes one report. Returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

int main_entry(int argc, char** argv);

}  // namespace pfdr::cli

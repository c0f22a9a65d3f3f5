#pragma once

// analyze / simulate / codebook commands and their report bundles.

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gaussdfe/config.hpp"

namespace gaussdfe {

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitSelfCheckFailed = 2 };

enum class OutputFormat { Csv, Json, Both };

/// Shortest "%.17g" rendering; "inf" / "-inf" for infinities.
std::string format_double(double v);

struct Table {
    using Cell = std::variant<std::string, double, std::int64_t>;

    std::string name; ///< file stem, e.g. "rates"
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::string to_csv() const;
    nlohmann::json to_json() const;
};

struct ReportBundle {
    std::string command;
    std::vector<Table> tables;
    nlohmann::json summary = nlohmann::json::object();

    /// Single JSON document mirroring every table plus the summary.
    nlohmann::json to_json() const;
    const Table& table(const std::string& name) const;
};

struct CommandResult {
    int exit_code = kExitOk;
    ReportBundle report;
    std::string message; ///< human-readable summary
};

CommandResult cmd_analyze(const RunConfig& cfg);

/// Needs seed and trials. Exit code 2 when a 5-standard-error check fails.
CommandResult cmd_simulate(const RunConfig& cfg);

struct CodebookParams {
    std::size_t stage = 1;
    std::size_t block_length = 8;
    double rate_bits = 0.0;
};

CommandResult cmd_codebook(const RunConfig& cfg, const CodebookParams& p);

/// Writes <table>.csv files and/or <command>.json under dir. LF line endings.
void write_report(const ReportBundle& report, const std::filesystem::path& dir, OutputFormat format);

} // namespace gaussdfe

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace clv::harness {

// Round-trip-exact decimal rendering of a double (17 significant digits,
// '.' separator, no locale). Used for all CSV numerics.
std::string format_double(double v);

// Shortest round-trip rendering, for human-facing messages.
std::string format_short(double v);

using Cell = std::variant<double, long long, std::string>;

struct Column {
    std::string name;
    std::string unit;  // empty for dimensionless
};

// A schema'd table with config-hash metadata; serializes to CSV or JSON.
class ResultTable {
public:
    explicit ResultTable(std::vector<Column> schema)
        : schema_(std::move(schema)) {}
    ResultTable() = default;

    void add_row(std::vector<Cell> row);
    const std::vector<Column>& schema() const { return schema_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }

private:
    std::vector<Column> schema_;
    std::vector<std::vector<Cell>> rows_;
};

struct Metadata {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string version;
    std::string wall_clock;  // excluded from determinism comparisons
};

void write_table(const ResultTable& table, const Metadata& meta,
                 const std::string& path, const std::string& format);

struct CliOverrides {
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
};

std::vector<std::string> experiment_names();

// Executes the experiment named in the config file, writes
// <prefix>_table.<ext> and <prefix>_series.<ext>, and prints one PASS/FAIL
// line per acceptance check. Exit code: 0 pass, 1 check failure, 2
// usage/config error.
int run(const std::string& config_path, const CliOverrides& overrides,
        std::ostream& out);

int list(std::ostream& out);

// Runs a module property suite with fixed seed 42; prints per-property
// PASS/FAIL with margins. Exit code: 0 pass, 1 failure, 2 unknown suite.
int verify(const std::string& suite, std::ostream& out);

}  // namespace clv::harness

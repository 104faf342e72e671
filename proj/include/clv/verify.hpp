#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace clv::verify {

// One named property check with the measured margin (distance to the
// tolerance; positive values pass with room to spare).
struct PropertyCheck {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    std::string detail;
};

std::vector<std::string> suite_names();

// Runs a module's invariant suite with the given seed (the CLI fixes 42).
// Throws ConfigError for unknown suite names.
std::vector<PropertyCheck> run_suite(const std::string& name,
                                     std::uint64_t seed = 42);

}  // namespace clv::verify

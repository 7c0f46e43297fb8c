#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace rwlab {

struct CheckResult {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

/// Structured result of a verification scenario. Serialized bytes depend only
/// on the scenario and the seed; wall time is reported on stderr, never in
/// the serialized output.
struct Report {
    std::string scenario;
    std::string kind;
    std::uint64_t seed = 0;
    std::string grid_meta;
    std::string conventions;
    std::vector<CheckResult> checks;
    std::vector<std::pair<double, double>> profile; // optional (r, value) rows for CSV
    double wall_ms = 0.0;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    std::string to_json() const;
    std::string to_csv() const;
};

enum class EmitFormat { json, csv };

void emit(const Report& rep, EmitFormat fmt, std::ostream& os);

} // namespace rwlab

#include "rwlab/report.hpp"

#include <ostream>
#include <sstream>

#include "json.hpp"

namespace rwlab {

std::string Report::to_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["kind"] = kind;
    j["seed"] = seed;
    j["grid"] = grid_meta;
    if (!conventions.empty()) j["conventions"] = conventions;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["value"] = c.value;
        cj["expected"] = c.expected;
        cj["tolerance"] = c.tolerance;
        cj["pass"] = c.pass;
        if (!c.note.empty()) cj["note"] = c.note;
        arr.push_back(cj);
    }
    j["checks"] = arr;
    j["pass"] = pass();
    return j.dump(2) + "\n";
}

std::string Report::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    if (!profile.empty()) {
        os << "r,value\n";
        for (const auto& [r, v] : profile) os << r << "," << v << "\n";
        return os.str();
    }
    os << "name,value,expected,tolerance,pass\n";
    for (const auto& c : checks)
        os << c.name << "," << c.value << "," << c.expected << "," << c.tolerance << ","
           << (c.pass ? 1 : 0) << "\n";
    return os.str();
}

void emit(const Report& rep, EmitFormat fmt, std::ostream& os) {
    os << (fmt == EmitFormat::json ? rep.to_json() : rep.to_csv());
}

} // namespace rwlab

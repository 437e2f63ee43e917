// Machine-readable reports (schema "lkt-report/1") and their aligned-text rendering.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "lkt/latticed.hpp"

namespace lkt::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "lkt-report/1";

Json intJson(const Int& x);
Json vecJson(const Vec& v);
Json matrixJson(const IntegerMatrix& m);
Json checksJson(const Report& r);
Json latticeJson(const FiniteLattice& L);
Json moduleJson(const LatticedKModule& X);
Json recoveryJson(const GrRecovery& g);
Json detectionJson(const Detection& d);
// lattice map by ideal names, plus one matrix per ideal and graded piece
Json witnessJson(const LatticedKModule& X, const LatticedKModule& Y, const VMorphism& f);

// One report per run. Only "generated" carries a timestamp; everything else depends on the
// inputs and flags alone.
struct Document {
    Json command = Json::object();
    Json results = Json::array();
    std::vector<std::string> presets;
    std::vector<std::string> warnings;

    void notePresets(const std::vector<std::string>& ps);  // keeps each preset once
    Json toJson(const std::string& generated) const;
};

std::string timestamp();
std::string renderJson(const Document& d, const std::string& generated);
std::string renderText(const Document& d, const std::string& generated);

}  // namespace lkt::report

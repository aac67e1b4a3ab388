#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "tuplesieve/admissible.hpp"
#include "tuplesieve/divisor_ap.hpp"
#include "tuplesieve/functionals.hpp"
#include "tuplesieve/hunt.hpp"
#include "tuplesieve/sieve.hpp"

namespace tuplesieve {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

// Wall time is left out unless asked for, so that equal manifests give
// byte-identical reports.
struct RunManifest {
    std::string subcommand;
    json parameters = json::object();
    std::uint64_t seed = 0;
    std::string table_cache;
    std::string tool_version = kToolVersion;
    std::optional<double> wall_time_s;

    json to_json() const;
    static RunManifest from_json(const json& j);
    bool operator==(const RunManifest&) const = default;
};

json make_report(const RunManifest& manifest, json result);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_report(const std::filesystem::path& path, const json& report);

json to_json(const Rational& r);
json to_json(const AdmissibleTuple& t);
json to_json(const WTrick& w);
json to_json(const APErrorReport& r);
json to_json(const TwistedErrorReport& r);
json to_json(const ModulusRow& r);
json to_json(const BVScan& s, bool with_rows = false);
json to_json(const SmoothScan& s, bool with_rows = false);
json to_json(const Estimate& e);
json to_json(const FunctionalEstimates& e);
json to_json(const RhoBound& r);
json to_json(const SieveSums& s);
json to_json(const H2PrimeDecomposition& d);
json to_json(const H2PrimeSummary& s);
json to_json(const HuntResult& r, bool with_hits = false);
json to_json(const DensityRow& r);

// Scan grids: x,q,a,E,weil_ratio,linear_ratio with E as an exact fraction.
std::string scan_csv(std::span<const APErrorReport> rows);
std::string scan_csv(std::uint64_t x, std::span<const ModulusRow> rows);
std::string hunt_csv(const HuntResult& r, const ArithTables& tables);

}  // namespace tuplesieve

#include "tuplesieve/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace tuplesieve {

json RunManifest::to_json() const {
    json j = {{"subcommand", subcommand},     {"parameters", parameters},
              {"seed", seed},                 {"table_cache", table_cache},
              {"tool_version", tool_version}};
    if (wall_time_s) j["wall_time_s"] = *wall_time_s;
    return j;
}

RunManifest RunManifest::from_json(const json& j) {
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.parameters = j.at("parameters");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.table_cache = j.at("table_cache").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    if (j.contains("wall_time_s")) m.wall_time_s = j.at("wall_time_s").get<double>();
    return m;
}

json make_report(const RunManifest& manifest, json result) {
    return {{"manifest", manifest.to_json()}, {"result", std::move(result)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

void write_report(const std::filesystem::path& path, const json& report) { write_text(path, report.dump(2) + "\n"); }

json to_json(const Rational& r) { return r.str(); }

json to_json(const AdmissibleTuple& t) {
    json w = json::array();
    for (const auto& x : t.witnesses) w.push_back({{"prime", x.prime}, {"free_class", x.free_class}});
    return {{"h", t.h}, {"k", t.k()}, {"checked_up_to", t.checked_up_to}, {"witnesses", w}};
}

json to_json(const WTrick& w) { return {{"W", w.W}, {"b", w.b}, {"primes", w.primes}}; }

json to_json(const APErrorReport& r) {
    return {{"x", r.x},
            {"q", r.q},
            {"a", r.a},
            {"ap_sum", r.ap_sum},
            {"coprime_sum", r.coprime_sum},
            {"phi_q", r.phi_q},
            {"E", to_json(r.E)},
            {"E_value", r.E.to_double()},
            {"weil_ratio", r.weil_ratio},
            {"linear_ratio", r.linear_ratio},
            {"coprime", r.coprime}};
}

json to_json(const TwistedErrorReport& r) {
    json terms = json::array();
    for (const TwistTerm& t : r.terms) {
        terms.push_back({{"d", t.d}, {"x", t.x}, {"a_d", t.a_d}, {"weight", to_json(t.weight)}, {"E", to_json(t.E.E)}});
    }
    return {{"N", r.N},         {"q", r.q},           {"a", r.a},
            {"delta", r.delta}, {"qprime", r.qprime}, {"terms", terms},
            {"Eprime", to_json(r.Eprime)}, {"Eprime_value", r.Eprime.to_double()}};
}

json to_json(const ModulusRow& r) {
    return {{"q", r.q},
            {"argmax_a", r.argmax_a},
            {"max_abs_E", to_json(r.max_abs_E)},
            {"squarefree", r.squarefree},
            {"largest_prime", r.largest_prime},
            {"statistic", r.statistic}};
}

json to_json(const BVScan& s, bool with_rows) {
    json j = {{"x", s.x},
              {"theta", s.theta},
              {"A", s.A},
              {"q_max", s.q_max},
              {"moduli", s.rows.size()},
              {"sum_max_E", s.sum_max_E},
              {"sum_max_E_squarefree", s.sum_max_E_squarefree},
              {"normalizer", s.normalizer},
              {"ratio", s.ratio},
              {"ratio_squarefree", s.ratio_squarefree}};
    if (with_rows) {
        j["rows"] = json::array();
        for (const auto& r : s.rows) j["rows"].push_back(to_json(r));
    }
    return j;
}

json to_json(const SmoothScan& s, bool with_rows) {
    json j = {{"x", s.x},
              {"theta", s.theta},
              {"eta", s.eta},
              {"delta_prime", s.delta_prime},
              {"flavor", s.flavor == SmoothFlavor::XPower ? "x" : "q"},
              {"q_max", s.q_max},
              {"moduli", s.rows.size()},
              {"empty", s.empty()},
              {"max_statistic", s.max_statistic}};
    j["argmax_q"] = s.argmax_q ? json(*s.argmax_q) : json(nullptr);
    if (with_rows) {
        j["rows"] = json::array();
        for (const auto& r : s.rows) j["rows"].push_back(to_json(r));
    }
    return j;
}

json to_json(const Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

json to_json(const FunctionalEstimates& e) {
    return {{"k", e.k},
            {"direction", e.direction},
            {"alpha", to_json(e.alpha)},
            {"beta1", to_json(e.beta1)},
            {"beta2", to_json(e.beta2)},
            {"I_F", to_json(e.I_F)},
            {"covariance", e.covariance},
            {"Upsilon", e.upsilon},
            {"mu_ratio", e.mu},
            {"samples", e.samples},
            {"seed", e.seed},
            {"method", e.method}};
}

json to_json(const RhoBound& r) { return {{"rho", r.value}, {"std_error", r.std_error}, {"c", r.c}}; }

json to_json(const SieveSums& s) {
    return {{"s1", s.s1},           {"s2_by_m", s.s2_by_m},         {"s2", s.s2},
            {"n_count", s.n_count}, {"tuples_visited", s.tuples_visited}};
}

json to_json(const H2PrimeDecomposition& d) {
    return {{"m", d.m},       {"d", d.d},   {"lhs", d.lhs},     {"terms", d.terms}, {"q", d.q},
            {"a", d.a},       {"X", d.X},   {"Xstar", d.Xstar}, {"f", d.f},         {"fstar", d.fstar},
            {"v", d.v},       {"main", d.main}, {"r", d.r}};
}

json to_json(const H2PrimeSummary& s) {
    json rows = json::array();
    for (const auto& r : s.rows) rows.push_back(to_json(r));
    return {{"m", s.m},
            {"max_product", s.max_product},
            {"tuples", s.rows.size()},
            {"mean_relative", s.mean_relative},
            {"ratio_of_means", s.ratio_of_means},
            {"max_relative", s.max_relative},
            {"rows", rows}};
}

json to_json(const HuntResult& r, bool with_hits) {
    json j = {{"h", r.h},
              {"x", r.x},
              {"rho", r.rho},
              {"bound", r.bound},
              {"hit_count", r.hits.size()},
              {"histogram", r.histogram},
              {"squarefree_count", r.squarefree_count},
              {"min_tau_sum", r.min_tau_sum},
              {"argmin", r.argmin},
              {"reference", r.reference}};
    if (with_hits) j["hits"] = r.hits;
    return j;
}

json to_json(const DensityRow& r) { return {{"x", r.x}, {"count", r.count}, {"ratio", r.ratio}}; }

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string scan_csv(std::span<const APErrorReport> rows) {
    std::string out = "x,q,a,E,weil_ratio,linear_ratio\n";
    for (const auto& r : rows) {
        out += std::to_string(r.x) + "," + std::to_string(r.q) + "," + std::to_string(r.a) + "," + r.E.str() + "," +
               fmt_double(r.weil_ratio) + "," + fmt_double(r.linear_ratio) + "\n";
    }
    return out;
}

std::string scan_csv(std::uint64_t x, std::span<const ModulusRow> rows) {
    std::string out = "x,q,a,E,weil_ratio,linear_ratio\n";
    const double xd = static_cast<double>(x);
    for (const auto& r : rows) {
        const double e = r.max_abs_E.to_double();
        const double q = static_cast<double>(r.q);
        out += std::to_string(x) + "," + std::to_string(r.q) + "," + std::to_string(r.argmax_a) + "," +
               r.max_abs_E.str() + "," + fmt_double(e * std::pow(q, 0.25) / std::sqrt(xd)) + "," +
               fmt_double(e * q / xd) + "\n";
    }
    return out;
}

std::string hunt_csv(const HuntResult& r, const ArithTables& tables) {
    std::string out = "n";
    for (std::size_t i = 0; i < r.h.size(); ++i) out += ",n_plus_h" + std::to_string(i);
    out += ",tau_sum\n";
    for (const std::uint64_t n : r.hits) {
        out += std::to_string(n);
        std::uint64_t s = 0;
        for (const std::uint64_t h : r.h) {
            out += "," + std::to_string(n + h);
            s += tables.tau(n + h);
        }
        out += "," + std::to_string(s) + "\n";
    }
    return out;
}

}  // namespace tuplesieve

#include "tuplesieve/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tuplesieve/errors.hpp"
#include "tuplesieve/report.hpp"

namespace tuplesieve::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::uint64_t to_count(double v, const char* what) {
    if (!(v >= 0) || v != std::floor(v) || v > 1.8e19) {
        throw UsageError(std::string(what) + " must be a nonnegative integer");
    }
    return static_cast<std::uint64_t>(v);
}

std::vector<std::uint64_t> parse_u64_list(const std::string& s, const char* what) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw UsageError(std::string(what) + ": empty element");
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw UsageError(std::string(what) + ": cannot parse '" + item + "'");
        }
        if (pos != item.size()) throw UsageError(std::string(what) + ": cannot parse '" + item + "'");
        out.push_back(to_count(v, what));
    }
    if (out.empty()) throw UsageError(std::string(what) + ": empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        try {
            out.push_back(std::stod(item, &pos));
        } catch (const std::exception&) {
            throw UsageError(std::string(what) + ": cannot parse '" + item + "'");
        }
        if (pos != item.size()) throw UsageError(std::string(what) + ": cannot parse '" + item + "'");
    }
    if (out.empty()) throw UsageError(std::string(what) + ": empty list");
    return out;
}

struct Common {
    std::string out_dir = "tuplesieve-out";
    int threads = 0;
    std::uint64_t seed = 0;
    std::string table_cache;
    bool record_time = false;
};

class Context {
public:
    Context(const Common& c, std::ostream& out) : c_(c), out_(out), start_(std::chrono::steady_clock::now()) {
        if (const char* env = std::getenv("TUPLESIEVE_CACHE"); env && *env) cache_dir_ = env;
        else cache_dir_ = c.table_cache;
    }

    const Common& common() const { return c_; }
    std::ostream& out() { return out_; }

    const ArithTables& tables(std::uint64_t limit) {
        TableBuildOptions opts;
        opts.threads = c_.threads;
        if (cache_dir_.empty()) {
            tables_ = std::make_unique<ArithTables>(build_tables(limit, opts));
            identity_ = "memory:" + std::to_string(limit);
        } else {
            tables_ = std::make_unique<ArithTables>(load_or_build_tables(limit, cache_dir_, opts));
            identity_ = table_cache_file("", limit).string();
        }
        return *tables_;
    }

    fs::path path(const std::string& name) const { return fs::path(c_.out_dir) / name; }

    void emit(const std::string& file, const std::string& subcommand, json params, json result) {
        RunManifest m;
        m.subcommand = subcommand;
        params["threads"] = c_.threads;
        m.parameters = std::move(params);
        m.seed = c_.seed;
        m.table_cache = identity_;
        if (c_.record_time) {
            m.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        }
        write_report(path(file), make_report(m, std::move(result)));
    }

private:
    Common c_;
    std::ostream& out_;
    std::string cache_dir_;
    std::string identity_ = "none";
    std::unique_ptr<ArithTables> tables_;
    std::chrono::steady_clock::time_point start_;
};

std::shared_ptr<const SieveFunction> make_function(const std::string& spec, std::size_t k, std::optional<double> T,
                                                   std::optional<double> d1, double d2) {
    if (spec == "paper") {
        QuadSpec qs;
        qs.abs_tol = 1e-10;
        qs.rel_tol = 1e-9;
        return std::make_shared<SmoothTestFunction>(TestFunctionParams::with_defaults(k, T, d1, d2), qs);
    }
    if (spec.rfind("poly:", 0) == 0) {
        int a = 0;
        try {
            a = std::stoi(spec.substr(5));
        } catch (const std::exception&) {
            throw UsageError("--F: cannot parse exponent in '" + spec + "'");
        }
        return std::make_shared<PolySimplexFunction>(k, a);
    }
    throw UsageError("--F must be 'paper' or 'poly:<a>'");
}

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

// ---- subcommands ----

void cmd_tables(Context& ctx, double limit_d) {
    const std::uint64_t limit = to_count(limit_d, "--limit");
    const ArithTables& t = ctx.tables(limit);
    std::uint64_t primes = 0, sum_tau = 0, sum_phi = 0;
    std::int64_t sum_mu = 0;
    for (std::uint64_t n = 1; n <= limit; ++n) {
        primes += t.is_prime(n) ? 1 : 0;
        sum_tau += t.tau(n);
        sum_mu += t.mu(n);
        sum_phi += t.phi(n);
    }
    json r = {{"limit", limit},     {"bytes", limit * ArithTables::bytes_per_entry()},
              {"prime_count", primes}, {"sum_tau", sum_tau},
              {"mertens", sum_mu},   {"sum_phi", sum_phi}};
    ctx.emit("tables.json", "tables", {{"limit", limit}}, r);
    ctx.out() << "tables: limit=" << limit << " primes=" << primes << " sum_tau=" << sum_tau << "\n";
}

void cmd_admissible_check(Context& ctx, const std::string& h_str, std::optional<double> D0) {
    const auto h = parse_u64_list(h_str, "--h");
    const AdmissibilityResult res = is_admissible(h);
    json params = {{"h", h}};
    json r;
    if (!res.admissible()) {
        r = {{"admissible", false}, {"failing_prime", res.failing_prime}};
        ctx.emit("admissible.json", "admissible check", params, r);
        ctx.out() << "not admissible at p=" << res.failing_prime << "\n";
        return;
    }
    r = {{"admissible", true}, {"tuple", to_json(*res.tuple)}};
    std::string wb;
    if (D0) {
        params["D0"] = *D0;
        const WTrick w = w_trick(res.tuple->h, *D0);
        r["w_trick"] = to_json(w);
        wb = " W=" + std::to_string(w.W) + " b=" + std::to_string(w.b);
    }
    ctx.emit("admissible.json", "admissible check", params, r);
    ctx.out() << "admissible " << format_tuple(res.tuple->h) << " (checked primes <= " << res.tuple->checked_up_to
              << ")" << wb << "\n";
}

void cmd_admissible_make(Context& ctx, std::size_t k, double cap, std::optional<double> D0) {
    const AdmissibleTuple t = greedy_admissible(k, to_count(cap, "--cap"));
    json params = {{"k", k}, {"cap", cap}};
    json r = {{"tuple", to_json(t)}};
    std::string wb;
    if (D0) {
        params["D0"] = *D0;
        const WTrick w = w_trick(t.h, *D0);
        r["w_trick"] = to_json(w);
        wb = " W=" + std::to_string(w.W) + " b=" + std::to_string(w.b);
    }
    ctx.emit("admissible.json", "admissible make", params, r);
    ctx.out() << "admissible " << format_tuple(t.h) << wb << "\n";
}

void cmd_ap_error(Context& ctx, double x, std::uint64_t q, std::optional<std::uint64_t> a, bool twisted) {
    if (!(x >= 1)) throw UsageError("--x must be >= 1");
    if (q == 0) throw UsageError("--q must be positive");
    const std::uint64_t xi = static_cast<std::uint64_t>(std::floor(x));
    const ArithTables& t = ctx.tables(std::max<std::uint64_t>(xi, 1));
    json params = {{"x", x}, {"q", q}, {"twisted", twisted}};
    std::vector<APErrorReport> rows;
    if (a) {
        if (*a >= q) throw UsageError("--a must lie in [0, q)");
        params["a"] = *a;
        rows.push_back(divisor_error(x, q, *a, t));
    } else {
        params["a"] = "all";
        rows = divisor_errors_all_residues(xi, q, t);
    }
    json r = {{"cells", json::array()}};
    for (const auto& row : rows) r["cells"].push_back(to_json(row));
    if (!a) {
        std::int64_t total = 0, direct = 0;
        for (const auto& row : rows) total += row.ap_sum;
        for (std::uint64_t n = 1; n <= xi; ++n) direct += t.tau(n);
        r["partition_sum"] = total;
        r["tau_sum"] = direct;
    }
    if (twisted) {
        if (!a) throw UsageError("--twisted needs --a");
        r["twisted"] = to_json(twisted_error(x, q, *a, t));
    }
    write_text(ctx.path("ap_error.csv"), scan_csv(rows));
    ctx.emit("ap_error.json", "ap-error", params, r);
    if (a) {
        ctx.out() << "E(" << xi << "," << q << "," << *a << ") = " << rows[0].E.str();
        if (twisted) ctx.out() << "  E' = " << r["twisted"]["Eprime"].get<std::string>();
        ctx.out() << "\n";
    } else {
        ctx.out() << "ap-error: " << rows.size() << " residues mod " << q << ", partition "
                  << (r["partition_sum"] == r["tau_sum"] ? "exact" : "MISMATCH") << "\n";
    }
}

void cmd_bv_scan(Context& ctx, double x, double theta, double A) {
    const ArithTables& t = ctx.tables(static_cast<std::uint64_t>(std::floor(std::max(x, 1.0))));
    const BVScan s = bv_scan(x, theta, A, t, ctx.common().threads);
    write_text(ctx.path("bv_scan.csv"), scan_csv(s.x, s.rows));
    ctx.emit("bv_scan.json", "bv-scan", {{"x", x}, {"theta", theta}, {"A", A}}, to_json(s));
    ctx.out() << "bv-scan: q<=" << s.q_max << " sum=" << fmt(s.sum_max_E) << " ratio=" << fmt(s.ratio)
              << " ratio_squarefree=" << fmt(s.ratio_squarefree) << "\n";
}

void cmd_smooth_scan(Context& ctx, double x, double theta, double eta, double dp, const std::string& flavor) {
    SmoothFlavor fl;
    if (flavor == "x") fl = SmoothFlavor::XPower;
    else if (flavor == "q") fl = SmoothFlavor::QPower;
    else throw UsageError("--flavor must be 'x' or 'q'");
    const ArithTables& t = ctx.tables(static_cast<std::uint64_t>(std::floor(std::max(x, 1.0))));
    const SmoothScan s = smooth_scan(x, theta, eta, dp, fl, t, ctx.common().threads);
    write_text(ctx.path("smooth_scan.csv"), scan_csv(s.x, s.rows));
    ctx.emit("smooth_scan.json", "smooth-scan",
             {{"x", x}, {"theta", theta}, {"eta", eta}, {"delta_prime", dp}, {"flavor", flavor}}, to_json(s));
    if (s.empty()) {
        ctx.out() << "smooth-scan: no moduli\n";
    } else {
        ctx.out() << "smooth-scan: " << s.rows.size() << " moduli, max statistic " << fmt(s.max_statistic)
                  << " at q=" << *s.argmax_q << "\n";
    }
}

void cmd_integrals(Context& ctx, const std::vector<double>& Ts, std::optional<int> poly_a, std::size_t k,
                   const std::string& orders) {
    json params = {{"T", Ts}};
    json r = {{"gram", json::array()}};
    for (const double T : Ts) {
        const GramIntegrals g = gram_integrals(T);
        r["gram"].push_back({{"T", T},
                             {"Upsilon", g.upsilon},
                             {"It_gprime2", g.t_gprime2},
                             {"It_g2", g.t_g2},
                             {"mu", mu_ratio(T)},
                             {"mu_simplified_display", mu_ratio_simplified_display(T)},
                             {"upsilon_lower_bound", 1 - 2 / T}});
    }
    if (poly_a) {
        std::vector<int> a;
        if (orders.empty()) a.assign(k, 1);
        else for (const auto v : parse_u64_list(orders, "--orders")) a.push_back(static_cast<int>(v));
        if (a.size() != k) throw UsageError("--orders must have k entries");
        const PolySimplexFunction G(k, *poly_a);
        params["poly_a"] = *poly_a;
        params["k"] = k;
        params["orders"] = a;
        r["c_integral"] = c_integral(G, G, a, QuadSpec{});
    }
    ctx.emit("integrals.json", "integrals", params, r);
    for (const auto& row : r["gram"]) {
        ctx.out() << "T=" << row["T"].get<double>() << " Upsilon=" << fmt(row["Upsilon"].get<double>(), 12)
                  << " mu=" << fmt(row["mu"].get<double>(), 12) << "\n";
    }
    if (poly_a) ctx.out() << "C = " << fmt(r["c_integral"].get<double>(), 12) << "\n";
}

struct FunctionalArgs {
    std::size_t k = 3;
    std::optional<double> T, delta1;
    double delta2 = 1e-2;
    double samples = 1e6;
    std::optional<std::size_t> direction;
};

SmoothTestFunction make_paper(const FunctionalArgs& f) {
    return SmoothTestFunction(TestFunctionParams::with_defaults(f.k, f.T, f.delta1, f.delta2));
}

json functional_params(const FunctionalArgs& f, std::size_t m) {
    const TestFunctionParams p = TestFunctionParams::with_defaults(f.k, f.T, f.delta1, f.delta2);
    return {{"k", p.k}, {"T", p.T}, {"delta1", p.delta1}, {"delta2", p.delta2}, {"samples", f.samples},
            {"direction", m}};
}

void cmd_functionals(Context& ctx, const FunctionalArgs& f, bool quadrature, bool bound_check) {
    const SmoothTestFunction F = make_paper(f);
    const std::size_t m = f.direction.value_or(f.k - 1);
    const FunctionalEstimates e =
        functionals_mc(F, to_count(f.samples, "--samples"), ctx.common().seed, m, ctx.common().threads);
    json params = functional_params(f, m);
    json r = {{"monte_carlo", to_json(e)}};
    if (quadrature) {
        params["quadrature"] = true;
        QuadSpec qs;
        qs.abs_tol = 1e-9;
        qs.rel_tol = 1e-8;
        r["quadrature"] = to_json(functionals_quadrature(F, m, qs));
    }
    if (bound_check) {
        params["bound_check"] = true;
        const IFBoundCheck b =
            check_I_F_bound(F.test_function(), to_count(f.samples, "--samples"), ctx.common().seed, ctx.common().threads);
        r["I_F_bound"] = {{"normalized_I_F", to_json(b.normalized_I_F)},
                          {"shell_mass", to_json(b.shell_mass)},
                          {"lower", std::isfinite(b.lower) ? json(b.lower) : json(nullptr)},
                          {"upper", b.upper},
                          {"within", b.within}};
    }
    ctx.emit("functionals.json", "functionals", params, r);
    ctx.out() << "functionals k=" << f.k << ": alpha=" << fmt(e.alpha.value) << "+-" << fmt(e.alpha.std_error, 2)
              << " beta1=" << fmt(e.beta1.value) << " beta2=" << fmt(e.beta2.value) << " I(F)=" << fmt(e.I_F.value)
              << "+-" << fmt(e.I_F.std_error, 2) << "\n";
}

void cmd_rho(Context& ctx, bool asymptotic, const FunctionalArgs& f, double varpi, double delta) {
    const Rational c = rho_asymptotic_constant();
    if (asymptotic) {
        json r = {{"exact", c.str()}, {"value", c.to_double()}, {"below_three_quarters", c < Rational(3, 4)}};
        ctx.emit("rho.json", "rho", {{"asymptotic", true}}, r);
        ctx.out() << c.str() << " = " << std::setprecision(9) << c.to_double() << "\n";
        return;
    }
    const SmoothTestFunction F = make_paper(f);
    const std::size_t m = f.direction.value_or(f.k - 1);
    const FunctionalEstimates e =
        functionals_mc(F, to_count(f.samples, "--samples"), ctx.common().seed, m, ctx.common().threads);
    const RhoBound rb = rho_bound(f.k, varpi, delta, e);
    json params = functional_params(f, m);
    params["varpi"] = varpi;
    params["delta"] = delta;
    const double k2 = static_cast<double>(f.k * f.k);
    json r = {{"estimates", to_json(e)},
              {"rho", to_json(rb)},
              {"rho_over_k2", rb.value / k2},
              {"limit_over_k2", 1.0 / (4.0 / 3.0 + 2 * varpi - 2 * delta)}};
    ctx.emit("rho.json", "rho", params, r);
    ctx.out() << "rho(k=" << f.k << ") = " << fmt(rb.value) << " +- " << fmt(rb.std_error, 2) << "\n";
}

struct SSumArgs {
    std::string H;
    std::optional<std::size_t> k;
    double N = 1e5;
    double D0 = 3;
    std::optional<double> r_exp;
    double varpi = 0.004;
    double delta = 0.001;
    double kappa = 1.0;
    std::string F = "poly:4";
    std::optional<double> T, delta1;
    double delta2 = 1e-2;
    std::string rho = "1,2,3,4,5,6,8";
    bool predict = false;
    double samples = 1e6;
    std::uint64_t h2_max = 0;
    std::size_t h2_m = 0;
};

void cmd_s_sums(Context& ctx, const SSumArgs& a) {
    const auto h = parse_u64_list(a.H, "--H");
    if (a.k && *a.k != h.size()) throw UsageError("--k does not match the size of --H");
    const AdmissibilityResult adm = is_admissible(h);
    if (!adm.admissible()) {
        throw UsageError("--H is not admissible at p=" + std::to_string(adm.failing_prime));
    }
    const auto& hs = adm.tuple->h;
    const SieveConfig cfg = SieveConfig::make(hs, a.N, a.D0, a.varpi, a.delta, a.kappa, a.r_exp);
    auto F = make_function(a.F, hs.size(), a.T, a.delta1, a.delta2);
    const WeightSystem ws(cfg, hs, F);
    const ArithTables& t = ctx.tables(ws.table_need());
    const SieveSums s = sieve_sums(ws, t, ctx.common().threads);

    json params = {{"H", hs},         {"N", a.N},         {"D0", a.D0},       {"varpi", a.varpi},
                   {"delta", a.delta}, {"kappa", a.kappa}, {"F", a.F},         {"rho", a.rho},
                   {"predict", a.predict}};
    if (a.r_exp) params["R_exp"] = *a.r_exp;
    if (a.F == "paper") {
        const auto& p = dynamic_cast<const SmoothTestFunction&>(*F).test_function().params();
        params["T"] = p.T;
        params["delta1"] = p.delta1;
        params["delta2"] = p.delta2;
    }
    json r = {{"config",
               {{"W", cfg.W}, {"b", cfg.b}, {"R", cfg.R}, {"r_exponent", cfg.r_exponent}, {"eta0", cfg.eta0}}},
              {"sums", to_json(s)},
              {"s_of_rho", json::array()}};
    for (const double rho : parse_double_list(a.rho, "--rho")) {
        r["s_of_rho"].push_back({{"rho", rho}, {"value", s_of_rho(rho, s.s1, s.s2)}});
    }
    r["break_even_rho"] = s.s1 != 0 ? json(s.s2 / s.s1) : json(nullptr);
    if (a.predict) {
        QuadSpec qs;
        qs.abs_tol = 1e-10;
        qs.rel_tol = 1e-9;
        const double p1 = predict_s1(ws, qs);
        FunctionalEstimates e;
        if (hs.size() <= 3) {
            e = functionals_quadrature(*F, hs.size() - 1, qs);
        } else {
            params["samples"] = a.samples;
            e = functionals_mc(*F, to_count(a.samples, "--samples"), ctx.common().seed, hs.size() - 1,
                               ctx.common().threads);
        }
        const double p2m = predict_s2(hs.size() - 1, ws, e);
        const double p2 = p2m * static_cast<double>(hs.size());
        r["prediction"] = {{"s1", p1},
                           {"s2_per_m", p2m},
                           {"s2", p2},
                           {"ratio_s1", s.s1 / p1},
                           {"ratio_s2", s.s2 / p2},
                           {"functionals", to_json(e)}};
    }
    if (a.h2_max > 0) {
        params["h2prime_max_product"] = a.h2_max;
        params["h2prime_m"] = a.h2_m;
        r["h2prime"] = to_json(h2prime_survey(a.h2_m, a.h2_max, ws, t, ctx.common().threads));
    }
    ctx.emit("s_sums.json", "s-sums", params, r);
    ctx.out() << "s-sums: S1=" << fmt(s.s1, 12) << " S2=" << fmt(s.s2, 12) << " break-even rho="
              << (s.s1 != 0 ? fmt(s.s2 / s.s1) : std::string("n/a"));
    if (a.predict) {
        ctx.out() << " ratios " << fmt(r["prediction"]["ratio_s1"].get<double>()) << " "
                  << fmt(r["prediction"]["ratio_s2"].get<double>());
    }
    ctx.out() << "\n";
}

void cmd_hunt(Context& ctx, const std::string& H, double x, double rho, const std::string& grid) {
    const auto h = parse_u64_list(H, "--H");
    std::vector<double> xs;
    if (!grid.empty()) xs = parse_double_list(grid, "--grid");
    double top = x;
    for (const double g : xs) top = std::max(top, g);
    const std::uint64_t need =
        static_cast<std::uint64_t>(std::floor(std::max(top, 1.0))) + *std::max_element(h.begin(), h.end());
    const ArithTables& t = ctx.tables(need);
    const HuntResult res = hunt(h, x, rho, t, ctx.common().threads);
    json params = {{"H", h}, {"x", x}, {"rho", rho}};
    json r = {{"stats", to_json(res)}};
    if (!xs.empty()) {
        params["grid"] = xs;
        std::vector<HuntResult> runs;
        for (const double g : xs) runs.push_back(hunt(h, g, rho, t, ctx.common().threads));
        r["density"] = json::array();
        for (const auto& row : density_report(runs)) r["density"].push_back(to_json(row));
    }
    write_text(ctx.path("hunt_hits.csv"), hunt_csv(res, t));
    ctx.emit("hunt.json", "hunt", params, r);
    ctx.out() << "hunt: " << res.hits.size() << " hits with sum tau <= " << res.bound << " for n <= " << x
              << ", min sum tau " << res.min_tau_sum << " at n=" << res.argmin << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Divisor sums, admissible tuples and higher-rank sieve experiments", "tuplesieve"};
    app.set_help_flag("--help", "Print this help and exit");  // frees -h/--h for tuple shifts
    app.fallthrough();
    app.require_subcommand(1);
    Common c;
    app.add_option("--out", c.out_dir, "Directory for JSON/CSV reports");
    app.add_option("--threads", c.threads, "Parallel width (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", c.seed, "Master seed for all randomness");
    app.add_option("--table-cache", c.table_cache, "Directory of cached arithmetic tables");
    app.add_flag("--record-time", c.record_time, "Store wall time in the manifest");

    auto* tables = app.add_subcommand("tables", "Build or load arithmetic tables");
    double limit = 0;
    tables->add_option("--limit", limit, "Largest n")->required();

    auto* adm = app.add_subcommand("admissible", "Admissibility of shift tuples");
    adm->require_subcommand(1);
    auto* check = adm->add_subcommand("check", "Check a tuple");
    std::string h_str;
    std::optional<double> D0;
    check->add_option("--h", h_str, "Comma-separated shifts")->required();
    check->add_option("--D0", D0, "Also compute W and b for primes below D0");
    auto* make = adm->add_subcommand("make", "Greedy admissible tuple");
    std::size_t make_k = 0;
    double cap = 100000;
    make->add_option("--k", make_k, "Tuple size")->required()->check(CLI::PositiveNumber);
    make->add_option("--cap", cap, "Largest shift to try");
    make->add_option("--D0", D0, "Also compute W and b for primes below D0");

    auto* ap = app.add_subcommand("ap-error", "Divisor-sum error in one progression or all residues");
    double x = 0;
    std::uint64_t q = 1;
    std::optional<std::uint64_t> a_opt;
    bool twisted = false;
    ap->add_option("--x", x, "Cutoff")->required();
    ap->add_option("--q", q, "Modulus")->required();
    ap->add_option("--a", a_opt, "Residue (default: all)");
    ap->add_flag("--twisted", twisted, "Also assemble E' from the gcd decomposition");

    auto* bv = app.add_subcommand("bv-scan", "Sum over q <= x^theta of max |E|");
    double theta = 0.5, A = 1.0;
    bv->add_option("--x", x, "Cutoff")->required();
    bv->add_option("--theta", theta, "Modulus exponent")->required();
    bv->add_option("--A", A, "Log power in the normalizer");

    auto* sm = app.add_subcommand("smooth-scan", "Smooth squarefree moduli probe");
    double eta = 0.15, dp = 0.05;
    std::string flavor = "x";
    sm->add_option("--x", x, "Cutoff")->required();
    sm->add_option("--theta", theta, "Modulus exponent")->required();
    sm->add_option("--eta", eta, "Smoothness exponent");
    sm->add_option("--delta-prime", dp, "Saving exponent");
    sm->add_option("--flavor", flavor, "x: primes <= x^eta, q: primes <= q^eta");

    auto* integ = app.add_subcommand("integrals", "Closed-form integrals of g and C-integrals");
    std::string Ts = "10";
    std::optional<int> poly_a;
    std::size_t ik = 1;
    std::string orders;
    integ->add_option("--T", Ts, "Comma-separated truncations");
    integ->add_option("--poly-a", poly_a, "C-integral of (1 - sum t)^a with itself");
    integ->add_option("--k", ik, "Dimension for --poly-a");
    integ->add_option("--orders", orders, "Derivative orders, default all ones");

    FunctionalArgs fa;
    auto add_functional_opts = [&fa](CLI::App* s) {
        s->add_option("--k", fa.k, "Dimension")->check(CLI::PositiveNumber);
        s->add_option("--T", fa.T, "Truncation (default k/log log k)");
        s->add_option("--delta1", fa.delta1, "h1 shell width (default sqrt(log k)/k)");
        s->add_option("--delta2", fa.delta2, "h2 ramp width");
        s->add_option("--samples", fa.samples, "Monte-Carlo samples");
        s->add_option("--direction", fa.direction, "Coordinate index m (default k-1)");
    };
    auto* fun = app.add_subcommand("functionals", "Monte-Carlo alpha, beta1, beta2, I(F)");
    add_functional_opts(fun);
    bool with_quad = false, bound_check = false;
    fun->add_flag("--quadrature", with_quad, "Also integrate by nested quadrature");
    fun->add_flag("--bound-check", bound_check, "Check the I(F) lower/upper bracket");

    auto* rho = app.add_subcommand("rho", "Threshold rho from the functionals");
    add_functional_opts(rho);
    bool asymptotic = false;
    double varpi = 0.004, delta = 0.001;
    rho->add_flag("--asymptotic", asymptotic, "Print the exact limiting constant");
    rho->add_option("--varpi", varpi, "Level-of-distribution gain");
    rho->add_option("--delta", delta, "Small loss in the R exponent");

    auto* ss = app.add_subcommand("s-sums", "Direct sieve sums S1, S2 and predictions");
    SSumArgs sa;
    ss->add_option("--H", sa.H, "Comma-separated shifts")->required();
    ss->add_option("--k", sa.k, "Tuple size (checked against --H)");
    ss->add_option("--N", sa.N, "Sum over N < n <= 2N");
    ss->add_option("--D0", sa.D0, "W = product of primes below D0");
    ss->add_option("--R-exp", sa.r_exp, "log R / log N (default (2/3 + varpi)/2 - delta)");
    ss->add_option("--varpi", sa.varpi, "Level-of-distribution gain");
    ss->add_option("--delta", sa.delta, "Small loss in the R exponent");
    ss->add_option("--kappa", sa.kappa, "Component cap d_j <= R^kappa");
    ss->add_option("--F", sa.F, "paper or poly:<a>");
    ss->add_option("--T", sa.T, "Truncation for --F paper");
    ss->add_option("--delta1", sa.delta1, "h1 shell width for --F paper");
    ss->add_option("--delta2", sa.delta2, "h2 ramp width for --F paper");
    ss->add_option("--rho", sa.rho, "Comma-separated rho grid");
    ss->add_flag("--predict", sa.predict, "Compare with the main-term predictions");
    ss->add_option("--samples", sa.samples, "Monte-Carlo samples for predictions when k > 3");
    ss->add_option("--h2prime", sa.h2_max, "Survey the H2' decomposition for prod d <= this");
    ss->add_option("--h2prime-m", sa.h2_m, "Twist index for --h2prime");

    auto* hu = app.add_subcommand("hunt", "Search n with squarefree product and small sum of tau");
    std::string H;
    double hrho = 0;
    std::string grid;
    hu->add_option("--H", H, "Comma-separated shifts")->required();
    hu->add_option("--x", x, "Search n <= x")->required();
    hu->add_option("--rho", hrho, "Bound on the sum of tau")->required();
    hu->add_option("--grid", grid, "Comma-separated x values for the density table");

    for (CLI::App* s : {tables, adm, check, make, ap, bv, sm, integ, fun, rho, ss, hu}) s->fallthrough();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        Context ctx(c, out);
        if (tables->parsed()) cmd_tables(ctx, limit);
        else if (check->parsed()) cmd_admissible_check(ctx, h_str, D0);
        else if (make->parsed()) cmd_admissible_make(ctx, make_k, cap, D0);
        else if (ap->parsed()) cmd_ap_error(ctx, x, q, a_opt, twisted);
        else if (bv->parsed()) cmd_bv_scan(ctx, x, theta, A);
        else if (sm->parsed()) cmd_smooth_scan(ctx, x, theta, eta, dp, flavor);
        else if (integ->parsed()) cmd_integrals(ctx, parse_double_list(Ts, "--T"), poly_a, ik, orders);
        else if (fun->parsed()) cmd_functionals(ctx, fa, with_quad, bound_check);
        else if (rho->parsed()) cmd_rho(ctx, asymptotic, fa, varpi, delta);
        else if (ss->parsed()) cmd_s_sums(ctx, sa);
        else if (hu->parsed()) cmd_hunt(ctx, H, x, hrho, grid);
        return kExitOk;
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const InadmissibleError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace tuplesieve::cli

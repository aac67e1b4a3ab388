#include "tuplesieve/divisor_ap.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tuplesieve/errors.hpp"
#include "tuplesieve/modular.hpp"

namespace tuplesieve {

namespace {

std::uint64_t to_cutoff(double x, const ArithTables& tables) {
    if (!(x >= 0) || !std::isfinite(x)) throw std::invalid_argument("cutoff must be finite and >= 0");
    const auto n = static_cast<std::uint64_t>(std::floor(x));
    if (n > tables.limit()) {
        throw CapacityError("cutoff " + std::to_string(n) + " exceeds table limit " +
                            std::to_string(tables.limit()));
    }
    return n;
}

// Distinct prime factors; trial division beyond the table range.
std::vector<std::uint64_t> prime_factors(std::uint64_t q, const ArithTables& tables) {
    std::vector<std::uint64_t> ps;
    if (q <= tables.limit()) {
        for (const PrimePower& pp : factorize(q, tables)) ps.push_back(pp.prime);
        return ps;
    }
    for (std::uint64_t p = 2; p * p <= q; ++p) {
        if (q % p == 0) {
            ps.push_back(p);
            while (q % p == 0) q /= p;
        }
    }
    if (q > 1) ps.push_back(q);
    return ps;
}

std::uint64_t totient(std::uint64_t q, const ArithTables& tables) {
    if (q <= tables.limit()) return tables.phi(q);
    std::uint64_t phi = q;
    for (const std::uint64_t p : prime_factors(q, tables)) phi = phi / p * (p - 1);
    return phi;
}

void fill_ratios(APErrorReport& r) {
    const double absE = r.E.abs().to_double();
    const double x = static_cast<double>(r.x);
    const double q = static_cast<double>(r.q);
    r.weil_ratio = r.x > 0 ? absE * std::pow(q, 0.25) / std::sqrt(x) : 0.0;
    r.linear_ratio = r.x > 0 ? absE * q / x : 0.0;
}

APErrorReport make_report(std::uint64_t x, std::uint64_t q, std::uint64_t a, std::int64_t ap_sum,
                          std::int64_t coprime_sum, std::uint64_t phi_q) {
    APErrorReport r;
    r.x = x;
    r.q = q;
    r.a = a;
    r.ap_sum = ap_sum;
    r.coprime_sum = coprime_sum;
    r.phi_q = phi_q;
    const auto phi = static_cast<std::int64_t>(phi_q);
    r.E = Rational(ap_sum * phi - coprime_sum, phi);
    r.coprime = std::gcd(a, q) == 1;
    fill_ratios(r);
    return r;
}

ModulusRow scan_modulus(std::uint64_t x, std::uint64_t q, const ArithTables& tables) {
    const std::vector<std::int64_t> buckets = residue_tau_sums(x, q, tables);
    const std::uint64_t phi = tables.phi(q);
    std::int64_t coprime_sum = 0;
    for (std::uint64_t a = 0; a < q; ++a) {
        if (std::gcd(a, q) == 1) coprime_sum += buckets[a];
    }
    const auto phi_s = static_cast<std::int64_t>(phi);
    std::int64_t best = -1;
    std::uint64_t best_a = 0;
    for (std::uint64_t a = 0; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        const std::int64_t num = std::abs(buckets[a] * phi_s - coprime_sum);
        if (num > best) {
            best = num;
            best_a = a;
        }
    }
    ModulusRow row;
    row.q = q;
    row.argmax_a = best_a;
    row.max_abs_E = Rational(best, phi_s);
    row.squarefree = tables.mu(q) != 0;
    row.largest_prime = largest_prime_factor(q, tables);
    return row;
}

template <typename RowFn>
std::vector<ModulusRow> scan_moduli(const std::vector<std::uint64_t>& moduli, RowFn&& row_fn, int threads) {
    std::vector<ModulusRow> rows(moduli.size());
    const auto count = static_cast<std::int64_t>(moduli.size());
    const int nt = threads > 0 ? threads : omp_get_max_threads();
    // Large q cost the same as small ones (one pass over n <= x), so dynamic
    // scheduling only absorbs the bucket-size differences.
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
    for (std::int64_t i = 0; i < count; ++i) {
        rows[static_cast<std::size_t>(i)] = row_fn(moduli[static_cast<std::size_t>(i)]);
    }
    return rows;
}

template <typename RowFn>
std::vector<ModulusRow> scan_moduli_serial(const std::vector<std::uint64_t>& moduli, RowFn&& row_fn) {
    std::vector<ModulusRow> rows;
    rows.reserve(moduli.size());
    for (const std::uint64_t q : moduli) rows.push_back(row_fn(q));
    return rows;
}

BVScan finish_bv(std::uint64_t x, double theta, double A, std::uint64_t q_max, std::vector<ModulusRow> rows) {
    std::sort(rows.begin(), rows.end(), [](const auto& l, const auto& r) { return l.q < r.q; });
    BVScan s;
    s.x = x;
    s.theta = theta;
    s.A = A;
    s.q_max = q_max;
    for (ModulusRow& row : rows) {
        const double v = row.max_abs_E.to_double();
        row.statistic = v;
        s.sum_max_E += v;
        if (row.squarefree) s.sum_max_E_squarefree += v;
    }
    const double lx = std::log(static_cast<double>(x));
    s.normalizer = static_cast<double>(x) / std::pow(lx, A);
    s.ratio = s.sum_max_E / s.normalizer;
    s.ratio_squarefree = s.sum_max_E_squarefree / s.normalizer;
    s.rows = std::move(rows);
    return s;
}

std::vector<std::uint64_t> all_moduli(std::uint64_t q_max) {
    std::vector<std::uint64_t> qs(q_max);
    std::iota(qs.begin(), qs.end(), std::uint64_t{1});
    return qs;
}

void check_scan_args(std::uint64_t x, double theta) {
    if (x < 2) throw std::invalid_argument("scan cutoff must be >= 2");
    if (!(theta > 0 && theta < 1)) throw std::invalid_argument("theta must lie in (0,1)");
}

SmoothScan finish_smooth(std::uint64_t x, double theta, double eta, double delta_prime, SmoothFlavor flavor,
                         std::uint64_t q_max, std::vector<ModulusRow> rows) {
    std::sort(rows.begin(), rows.end(), [](const auto& l, const auto& r) { return l.q < r.q; });
    SmoothScan s;
    s.x = x;
    s.theta = theta;
    s.eta = eta;
    s.delta_prime = delta_prime;
    s.flavor = flavor;
    s.q_max = q_max;
    const double scale = std::pow(static_cast<double>(x), 1.0 - delta_prime);
    for (ModulusRow& row : rows) {
        row.statistic = row.max_abs_E.to_double() * static_cast<double>(row.q) / scale;
        if (!s.argmax_q || row.statistic > s.max_statistic) {
            s.max_statistic = row.statistic;
            s.argmax_q = row.q;
        }
    }
    s.rows = std::move(rows);
    return s;
}

}  // namespace

std::uint64_t floor_power(double x, double e) {
    const double v = std::pow(x, e);
    return static_cast<std::uint64_t>(std::floor(v * (1.0 + 1e-12)));
}

std::vector<std::int64_t> residue_tau_sums(std::uint64_t x, std::uint64_t q, const ArithTables& tables) {
    if (q == 0) throw std::invalid_argument("modulus must be >= 1");
    if (x > tables.limit()) throw CapacityError("cutoff exceeds table limit");
    std::vector<std::int64_t> buckets(q, 0);
    const auto tau = tables.tau_data();
    std::uint64_t r = 1 % q;
    for (std::uint64_t n = 1; n <= x; ++n) {
        buckets[r] += tau[n];
        if (++r == q) r = 0;
    }
    return buckets;
}

APErrorReport divisor_error(double xr, std::uint64_t q, std::uint64_t a, const ArithTables& tables) {
    if (q == 0) throw std::invalid_argument("modulus must be >= 1");
    if (a >= q) throw std::invalid_argument("residue must satisfy 0 <= a < q");
    const std::uint64_t x = to_cutoff(xr, tables);
    const auto tau = tables.tau_data();
    std::int64_t ap_sum = 0;
    for (std::uint64_t n = a == 0 ? q : a; n <= x; n += q) ap_sum += tau[n];
    const std::vector<std::uint64_t> ps = prime_factors(q, tables);
    std::int64_t coprime_sum = 0;
    for (std::uint64_t n = 1; n <= x; ++n) {
        bool coprime = true;
        for (const std::uint64_t p : ps) {
            if (n % p == 0) {
                coprime = false;
                break;
            }
        }
        if (coprime) coprime_sum += tau[n];
    }
    return make_report(x, q, a, ap_sum, coprime_sum, totient(q, tables));
}

std::vector<APErrorReport> divisor_errors_all_residues(std::uint64_t x, std::uint64_t q,
                                                       const ArithTables& tables) {
    const std::vector<std::int64_t> buckets = residue_tau_sums(x, q, tables);
    std::int64_t coprime_sum = 0;
    for (std::uint64_t a = 0; a < q; ++a) {
        if (std::gcd(a, q) == 1) coprime_sum += buckets[a];
    }
    const std::uint64_t phi = totient(q, tables);
    std::vector<APErrorReport> out;
    out.reserve(q);
    for (std::uint64_t a = 0; a < q; ++a) out.push_back(make_report(x, q, a, buckets[a], coprime_sum, phi));
    return out;
}

TwistedErrorReport twisted_error(double Nr, std::uint64_t q, std::uint64_t a, const ArithTables& tables) {
    if (q == 0) throw std::invalid_argument("modulus must be >= 1");
    if (a >= q) throw std::invalid_argument("residue must satisfy 0 <= a < q");
    const std::uint64_t N = to_cutoff(Nr, tables);
    const std::vector<std::uint64_t> ps = prime_factors(q, tables);
    std::uint64_t rad = 1;
    for (const std::uint64_t p : ps) rad *= p;
    if (rad != q) throw std::invalid_argument("twisted_error: modulus " + std::to_string(q) + " is not squarefree");

    TwistedErrorReport rep;
    rep.N = N;
    rep.q = q;
    rep.a = a;
    rep.delta = std::gcd(a, q);  // gcd(0, q) = q
    rep.qprime = q / rep.delta;

    std::vector<std::uint64_t> delta_primes;
    for (const std::uint64_t p : ps) {
        if (rep.delta % p == 0) delta_primes.push_back(p);
    }
    const std::int64_t tau_delta = std::int64_t{1} << delta_primes.size();
    const std::size_t subsets = std::size_t{1} << delta_primes.size();
    rep.Eprime = Rational(0);
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        std::uint64_t d = 1;
        int omega = 0;
        for (std::size_t i = 0; i < delta_primes.size(); ++i) {
            if (mask >> i & 1) {
                d *= delta_primes[i];
                ++omega;
            }
        }
        TwistTerm term;
        term.d = d;
        const unsigned __int128 dd = static_cast<unsigned __int128>(rep.delta) * d;
        term.x = dd > N ? 0 : static_cast<std::uint64_t>(N / dd);
        const std::uint64_t dd_mod = static_cast<std::uint64_t>(dd % rep.qprime);
        const auto inv = mod_inverse(dd_mod, rep.qprime);
        if (!inv) throw std::logic_error("twisted_error: delta*d not invertible mod q'");
        term.a_d = mul_mod(a % rep.qprime, *inv, rep.qprime);
        const std::int64_t sign = omega % 2 ? -1 : 1;
        term.weight = Rational(sign * tau_delta, std::int64_t{1} << omega);
        term.E = divisor_error(static_cast<double>(term.x), rep.qprime, term.a_d, tables);
        rep.Eprime += term.weight * term.E.E;
        rep.terms.push_back(std::move(term));
    }
    std::sort(rep.terms.begin(), rep.terms.end(), [](const auto& l, const auto& r) { return l.d < r.d; });
    return rep;
}

BVScan bv_scan(double xr, double theta, double A, const ArithTables& tables, int threads) {
    const std::uint64_t x = to_cutoff(xr, tables);
    check_scan_args(x, theta);
    const std::uint64_t q_max = std::max<std::uint64_t>(1, floor_power(static_cast<double>(x), theta));
    auto rows = scan_moduli(all_moduli(q_max), [&](std::uint64_t q) { return scan_modulus(x, q, tables); },
                            threads);
    return finish_bv(x, theta, A, q_max, std::move(rows));
}

BVScan bv_scan_serial(double xr, double theta, double A, const ArithTables& tables) {
    const std::uint64_t x = to_cutoff(xr, tables);
    check_scan_args(x, theta);
    const std::uint64_t q_max = std::max<std::uint64_t>(1, floor_power(static_cast<double>(x), theta));
    auto rows = scan_moduli_serial(all_moduli(q_max), [&](std::uint64_t q) { return scan_modulus(x, q, tables); });
    return finish_bv(x, theta, A, q_max, std::move(rows));
}

std::vector<std::uint64_t> smooth_moduli(std::uint64_t x, double theta, double eta, SmoothFlavor flavor,
                                         const ArithTables& tables) {
    const std::uint64_t q_max = floor_power(static_cast<double>(x), theta);
    std::vector<std::uint64_t> qs;
    const double x_bound = std::pow(static_cast<double>(x), eta);
    // q = 1 carries E = 0 identically and is left out.
    for (std::uint64_t q = 2; q <= q_max; ++q) {
        if (tables.mu(q) == 0) continue;
        const double bound = flavor == SmoothFlavor::XPower ? x_bound : std::pow(static_cast<double>(q), eta);
        if (is_smooth(q, bound, tables)) qs.push_back(q);
    }
    return qs;
}

SmoothScan smooth_scan(double xr, double theta, double eta, double delta_prime, SmoothFlavor flavor,
                       const ArithTables& tables, int threads) {
    const std::uint64_t x = to_cutoff(xr, tables);
    check_scan_args(x, theta);
    const auto qs = smooth_moduli(x, theta, eta, flavor, tables);
    auto rows = scan_moduli(qs, [&](std::uint64_t q) { return scan_modulus(x, q, tables); }, threads);
    return finish_smooth(x, theta, eta, delta_prime, flavor, floor_power(static_cast<double>(x), theta),
                         std::move(rows));
}

SmoothScan smooth_scan_serial(double xr, double theta, double eta, double delta_prime, SmoothFlavor flavor,
                              const ArithTables& tables) {
    const std::uint64_t x = to_cutoff(xr, tables);
    check_scan_args(x, theta);
    const auto qs = smooth_moduli(x, theta, eta, flavor, tables);
    auto rows = scan_moduli_serial(qs, [&](std::uint64_t q) { return scan_modulus(x, q, tables); });
    return finish_smooth(x, theta, eta, delta_prime, flavor, floor_power(static_cast<double>(x), theta),
                         std::move(rows));
}

}  // namespace tuplesieve

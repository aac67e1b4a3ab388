#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tuplesieve/arith.hpp"
#include "tuplesieve/rational.hpp"

namespace tuplesieve {

// One (x, q, a) cell of the divisor-sum error in an arithmetic progression:
//   E = sum_{n<=x, n=a (q)} tau(n) - (1/phi(q)) sum_{n<=x, (n,q)=1} tau(n).
// a is not required to be coprime to q; `coprime` flags the cells the
// classical statements are about.
struct APErrorReport {
    std::uint64_t x = 0;
    std::uint64_t q = 1;
    std::uint64_t a = 0;
    std::int64_t ap_sum = 0;
    std::int64_t coprime_sum = 0;
    std::uint64_t phi_q = 1;
    Rational E;
    double weil_ratio = 0;    // |E| q^{1/4} x^{-1/2}
    double linear_ratio = 0;  // |E| q / x
    bool coprime = true;
};

// floor(x^e) with a relative guard of 1e-12 against pow() landing just below
// an exact integer power.
std::uint64_t floor_power(double x, double e);

// bucket[a] = sum_{n<=x, n=a (q)} tau(n) for 0 <= a < q. One pass over n.
std::vector<std::int64_t> residue_tau_sums(std::uint64_t x, std::uint64_t q, const ArithTables& tables);

APErrorReport divisor_error(double x, std::uint64_t q, std::uint64_t a, const ArithTables& tables);

// All residues of one modulus from a single bucket pass.
std::vector<APErrorReport> divisor_errors_all_residues(std::uint64_t x, std::uint64_t q,
                                                       const ArithTables& tables);

struct TwistTerm {
    std::uint64_t d;
    std::uint64_t x;     // floor(N / (delta d))
    std::uint64_t a_d;   // a * (delta d)^{-1} mod q'
    Rational weight;     // tau(delta) mu(d) / tau(d)
    APErrorReport E;
};

struct TwistedErrorReport {
    std::uint64_t N = 0;
    std::uint64_t q = 1;
    std::uint64_t a = 0;
    std::uint64_t delta = 1;
    std::uint64_t qprime = 1;
    std::vector<TwistTerm> terms;
    Rational Eprime;
};

// E'(N,q,a) = tau(delta) sum_{d|delta} mu(d)/tau(d) E(N/(delta d), q/delta, a_d),
// delta = gcd(a,q). Requires q squarefree (std::invalid_argument otherwise).
TwistedErrorReport twisted_error(double N, std::uint64_t q, std::uint64_t a, const ArithTables& tables);

// Per-modulus summary of a scan: max over coprime residues of |E|.
struct ModulusRow {
    std::uint64_t q = 1;
    std::uint64_t argmax_a = 0;
    Rational max_abs_E;
    bool squarefree = true;
    std::uint64_t largest_prime = 1;
    double statistic = 0;  // scan-specific normalisation of max |E|
};

struct BVScan {
    std::uint64_t x = 0;
    double theta = 0;
    double A = 1;
    std::uint64_t q_max = 1;
    std::vector<ModulusRow> rows;  // sorted by q
    double sum_max_E = 0;
    double sum_max_E_squarefree = 0;
    double normalizer = 0;  // x / (log x)^A
    double ratio = 0;
    double ratio_squarefree = 0;
};

// sum_{q <= x^theta} max_{(a,q)=1} |E(x,q,a)|, also restricted to squarefree q.
// Parallel over q; rows are merged sorted by q and summed in that order.
BVScan bv_scan(double x, double theta, double A, const ArithTables& tables, int threads = 0);
BVScan bv_scan_serial(double x, double theta, double A, const ArithTables& tables);

enum class SmoothFlavor {
    XPower,  // every prime factor of q <= x^eta
    QPower,  // every prime factor of q <= q^eta
};

struct SmoothScan {
    std::uint64_t x = 0;
    double theta = 0;
    double eta = 0;
    double delta_prime = 0;
    SmoothFlavor flavor = SmoothFlavor::XPower;
    std::uint64_t q_max = 1;
    std::vector<ModulusRow> rows;  // statistic = max_a |E| q / x^{1-delta'}
    std::optional<std::uint64_t> argmax_q;
    double max_statistic = 0;

    bool empty() const { return rows.empty(); }
};

// Squarefree 2 <= q <= x^theta passing the smoothness filter.
std::vector<std::uint64_t> smooth_moduli(std::uint64_t x, double theta, double eta, SmoothFlavor flavor,
                                         const ArithTables& tables);

SmoothScan smooth_scan(double x, double theta, double eta, double delta_prime, SmoothFlavor flavor,
                       const ArithTables& tables, int threads = 0);
SmoothScan smooth_scan_serial(double x, double theta, double eta, double delta_prime, SmoothFlavor flavor,
                              const ArithTables& tables);

}  // namespace tuplesieve

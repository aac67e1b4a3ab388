#include "tuplesieve/sieve.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>

#include "tuplesieve/fixed_sum.hpp"
#include "tuplesieve/modular.hpp"

namespace tuplesieve {

namespace {

constexpr std::size_t kMaxDim = 16;

std::uint64_t phi_small(std::uint64_t n) {
    std::uint64_t result = n;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            result -= result / p;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

std::vector<std::uint64_t> prime_divisors_small(std::uint64_t n) {
    std::vector<std::uint64_t> ps;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) ps.push_back(n);
    return ps;
}

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

struct Accumulators {
    FixedSum s1;
    std::vector<FixedSum> s2;
    std::uint64_t visited = 0;
    std::uint64_t n_count = 0;
};

class NKernel {
public:
    NKernel(const WeightSystem& ws, const ArithTables& tables) : ws_(ws), tables_(tables), divs_(ws.k()) {
        const double R = ws.config().R;
        bound_ = std::min<std::uint64_t>(ws.component_cap(), static_cast<std::uint64_t>(std::ceil(R)) - 1);
    }

    void run(std::uint64_t n, Accumulators& acc) {
        const std::size_t k = ws_.k();
        for (std::size_t j = 0; j < k; ++j) squarefree_divisors(n + ws_.h()[j], bound_, tables_, divs_[j]);
        inner_ = FixedSum{};
        descend(0, 1, 1, acc);
        const double v = inner_.value();
        const double sq = v * v;
        acc.s1.add(sq);
        for (std::size_t m = 0; m < k; ++m) acc.s2[m].add(static_cast<double>(tables_.tau(n + ws_.h()[m])) * sq);
        ++acc.n_count;
    }

private:
    void descend(std::size_t j, std::uint64_t prod, int mu, Accumulators& acc) {
        if (j == ws_.k()) {
            ++acc.visited;
            inner_.add(ws_.weight(std::span<const std::uint64_t>(chosen_.data(), j), mu));
            return;
        }
        const double R = ws_.config().R;
        for (const std::uint64_t d : divs_[j]) {
            if (static_cast<double>(prod * d) >= R) break;  // divisor lists are sorted
            if (std::gcd(d, prod) != 1 || std::gcd(d, ws_.config().W) != 1) continue;
            chosen_[j] = d;
            descend(j + 1, prod * d, mu * tables_.mu(d), acc);
        }
    }

    const WeightSystem& ws_;
    const ArithTables& tables_;
    std::vector<std::vector<std::uint64_t>> divs_;
    std::array<std::uint64_t, kMaxDim> chosen_{};
    std::uint64_t bound_ = 0;
    FixedSum inner_;
};

SieveSums finish(const WeightSystem& ws, const Accumulators& acc) {
    SieveSums out;
    out.s1 = acc.s1.value();
    FixedSum total;
    for (const FixedSum& s : acc.s2) {
        out.s2_by_m.push_back(s.value());
        total += s;
    }
    out.s2 = total.value();
    out.n_count = acc.n_count;
    out.tuples_visited = acc.visited;
    (void)ws;
    return out;
}

void check_tables(const WeightSystem& ws, const ArithTables& tables) {
    if (ws.table_need() > tables.limit()) {
        throw CapacityError("sieve sums need tables up to " + std::to_string(ws.table_need()) + ", have " +
                            std::to_string(tables.limit()));
    }
}

}  // namespace

WeightSystem::WeightSystem(SieveConfig config, std::vector<std::uint64_t> h, std::shared_ptr<const SieveFunction> F)
    : config_(config), h_(std::move(h)), F_(std::move(F)) {
    if (!F_) throw std::invalid_argument("WeightSystem: missing F");
    if (h_.empty() || h_.size() > kMaxDim) throw std::invalid_argument("WeightSystem: k must lie in [1, 16]");
    if (F_->dim() != h_.size() || config_.k != h_.size())
        throw std::invalid_argument("WeightSystem: dimension mismatch between tuple, config and F");
    if (!(config_.R > 1)) throw std::invalid_argument("WeightSystem: R must exceed 1");
    log_R_ = std::log(config_.R);
    const double c = std::floor(std::pow(config_.R, config_.kappa));
    cap_ = c < 1 ? 1 : static_cast<std::uint64_t>(c);
}

bool WeightSystem::in_support(std::span<const std::uint64_t> d, const ArithTables& tables) const {
    if (d.size() != k()) throw std::invalid_argument("WeightSystem: tuple length mismatch");
    std::uint64_t prod = 1;
    for (const std::uint64_t dj : d) {
        if (dj == 0 || dj > cap_) return false;
        tables.require(dj);
        if (tables.mu(dj) == 0) return false;
        if (std::gcd(dj, config_.W) != 1 || std::gcd(dj, prod) != 1) return false;
        if (static_cast<double>(prod) * static_cast<double>(dj) >= config_.R) return false;
        prod *= dj;
    }
    return static_cast<double>(prod) < config_.R;
}

double WeightSystem::weight(std::span<const std::uint64_t> d, int mu_product) const {
    std::array<double, kMaxDim> t{};
    for (std::size_t j = 0; j < d.size(); ++j) t[j] = std::log(static_cast<double>(d[j])) / log_R_;
    return static_cast<double>(mu_product) * F_->value(std::span<const double>(t.data(), d.size()));
}

double WeightSystem::lambda(std::span<const std::uint64_t> d, const ArithTables& tables) const {
    if (!in_support(d, tables)) return 0;
    int mu = 1;
    for (const std::uint64_t dj : d) mu *= tables.mu(dj);
    return weight(d, mu);
}

std::uint64_t WeightSystem::n_begin() const {
    const std::uint64_t lo = static_cast<std::uint64_t>(std::floor(config_.N)) + 1;
    const std::uint64_t W = config_.W;
    return lo + (config_.b % W + W - lo % W) % W;
}

std::uint64_t WeightSystem::n_end() const { return static_cast<std::uint64_t>(std::floor(2 * config_.N)); }

std::uint64_t WeightSystem::table_need() const { return n_end() + *std::max_element(h_.begin(), h_.end()); }

SieveSums sieve_sums(const WeightSystem& ws, const ArithTables& tables, int threads) {
    check_tables(ws, tables);
    const std::uint64_t first = ws.n_begin(), last = ws.n_end(), W = ws.config().W;
    const std::int64_t count = first > last ? 0 : static_cast<std::int64_t>((last - first) / W + 1);
    Accumulators total;
    total.s2.resize(ws.k());
    std::exception_ptr err;
#pragma omp parallel num_threads(resolve_threads(threads))
    {
        Accumulators local;
        local.s2.resize(ws.k());
        NKernel kernel(ws, tables);
#pragma omp for schedule(dynamic, 4096)
        for (std::int64_t i = 0; i < count; ++i) {
            try {
                kernel.run(first + static_cast<std::uint64_t>(i) * W, local);
            } catch (...) {
#pragma omp critical(sieve_err)
                err = std::current_exception();
            }
        }
#pragma omp critical(sieve_merge)
        {
            total.s1 += local.s1;
            for (std::size_t m = 0; m < ws.k(); ++m) total.s2[m] += local.s2[m];
            total.visited += local.visited;
            total.n_count += local.n_count;
        }
    }
    if (err) std::rethrow_exception(err);
    return finish(ws, total);
}

SieveSums sieve_sums_serial(const WeightSystem& ws, const ArithTables& tables) {
    check_tables(ws, tables);
    Accumulators acc;
    acc.s2.resize(ws.k());
    NKernel kernel(ws, tables);
    for (std::uint64_t n = ws.n_begin(); n <= ws.n_end(); n += ws.config().W) kernel.run(n, acc);
    return finish(ws, acc);
}

double s1_direct(const WeightSystem& ws, const ArithTables& tables, int threads) {
    return sieve_sums(ws, tables, threads).s1;
}

double s2_direct(const WeightSystem& ws, const ArithTables& tables, std::optional<std::size_t> m, int threads) {
    if (m && *m >= ws.k()) throw std::invalid_argument("s2_direct: index out of range");
    const SieveSums s = sieve_sums(ws, tables, threads);
    return m ? s.s2_by_m[*m] : s.s2;
}

double prediction_prefactor(const WeightSystem& ws) {
    const double W = static_cast<double>(ws.config().W);
    const double phiW = static_cast<double>(phi_small(ws.config().W));
    const double k = static_cast<double>(ws.k());
    return std::pow(W, k - 1) / std::pow(phiW, k) * ws.config().N / std::pow(ws.log_R(), k);
}

double predict_s1(const WeightSystem& ws, const QuadSpec& spec) {
    const std::vector<int> ones(ws.k(), 1);
    return prediction_prefactor(ws) * c_integral(ws.F(), ws.F(), ones, spec);
}

double predict_s2(std::size_t m, const WeightSystem& ws, const FunctionalEstimates& est) {
    if (m >= ws.k()) throw std::invalid_argument("predict_s2: index out of range");
    const double L = std::log(ws.config().N) / ws.log_R();
    return prediction_prefactor(ws) * (L * est.alpha.value - est.beta1.value - 4 * est.beta2.value);
}

H2PrimeDecomposition h2prime_decompose(std::size_t m, std::span<const std::uint64_t> d, const WeightSystem& ws,
                                       const ArithTables& tables) {
    const std::size_t k = ws.k();
    if (m >= k) throw std::invalid_argument("h2prime_decompose: index out of range");
    if (!ws.in_support(d, tables)) throw std::invalid_argument("h2prime_decompose: tuple outside the support");
    const SieveConfig& cfg = ws.config();
    std::vector<Congruence> parts{{cfg.b % cfg.W, cfg.W}};
    for (std::size_t j = 0; j < k; ++j) {
        if (d[j] > 1) parts.push_back({(d[j] - ws.h()[j] % d[j]) % d[j], d[j]});
    }
    // The support rule makes the moduli pairwise coprime, so crt cannot fail.
    const Congruence c = crt(parts);

    H2PrimeDecomposition out;
    out.m = m;
    out.d.assign(d.begin(), d.end());
    out.q = c.modulus;
    out.a = (c.residue + ws.h()[m]) % c.modulus;
    const std::uint64_t lo = static_cast<std::uint64_t>(std::floor(cfg.N)) + 1;
    std::uint64_t n = lo + (c.residue % c.modulus + c.modulus - lo % c.modulus) % c.modulus;
    if (ws.n_end() + ws.h()[m] > tables.limit()) throw CapacityError("h2prime_decompose: tables too small");
    for (; n <= ws.n_end(); n += c.modulus) {
        out.lhs += tables.tau(n + ws.h()[m]);
        ++out.terms;
    }

    const double W = static_cast<double>(cfg.W);
    const double scale = static_cast<double>(phi_small(cfg.W)) / (W * W) * cfg.N;
    double wsum = 0;
    for (const std::uint64_t p : prime_divisors_small(cfg.W)) {
        const double pd = static_cast<double>(p);
        wsum += 2 * std::log(pd) / (pd - 1);
    }
    out.X = scale * (std::log(cfg.N) + 2 * kEulerGamma - 1 + wsum);
    out.Xstar = -scale;

    const double dm = static_cast<double>(d[m]);
    double f = static_cast<double>(tables.phi(d[m])) / (dm * static_cast<double>(tables.tau(d[m])));
    double v = std::log(dm);
    for (const PrimePower& pp : factorize(d[m], tables)) {
        const double p = static_cast<double>(pp.prime);
        f *= 2 * p / (2 * p - 1);
        v -= std::log(p) / (2 * p - 1);
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double dj = static_cast<double>(d[j]);
        f *= dj * dj / static_cast<double>(tables.phi(d[j]));
        if (j == m) continue;
        for (const PrimePower& pp : factorize(d[j], tables)) {
            const double p = static_cast<double>(pp.prime);
            v -= 2 * std::log(p) / (p - 1);
        }
    }
    out.f = out.fstar = f;
    out.v = v;
    out.main = out.X / f + out.Xstar * v / f;
    out.r = static_cast<double>(out.lhs) - out.main;
    return out;
}

H2PrimeSummary h2prime_survey(std::size_t m, std::uint64_t max_product, const WeightSystem& ws,
                              const ArithTables& tables, int threads) {
    const std::size_t k = ws.k();
    std::vector<std::vector<std::uint64_t>> tuples;
    std::vector<std::uint64_t> cur(k, 1);
    auto rec = [&](auto&& self, std::size_t j, std::uint64_t prod) -> void {
        if (j == k) {
            if (ws.in_support(cur, tables)) tuples.push_back(cur);
            return;
        }
        for (std::uint64_t d = 1; prod * d <= max_product; ++d) {
            cur[j] = d;
            self(self, j + 1, prod * d);
        }
    };
    rec(rec, 0, 1);

    H2PrimeSummary out;
    out.m = m;
    out.max_product = max_product;
    out.rows.resize(tuples.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(tuples.size()); ++i) {
        try {
            out.rows[i] = h2prime_decompose(m, tuples[i], ws, tables);
        } catch (...) {
#pragma omp critical(h2_err)
            err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    if (out.rows.empty()) return out;
    double rel = 0, abs_r = 0, main = 0;
    for (const auto& row : out.rows) {
        const double x = std::fabs(row.r) / row.main;
        rel += x;
        abs_r += std::fabs(row.r);
        main += row.main;
        out.max_relative = std::max(out.max_relative, x);
    }
    const double n = static_cast<double>(out.rows.size());
    out.mean_relative = rel / n;
    out.ratio_of_means = abs_r / main;
    return out;
}

}  // namespace tuplesieve

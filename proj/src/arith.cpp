#include "tuplesieve/arith.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tuplesieve/errors.hpp"

namespace tuplesieve {

namespace {

void check_capacity(std::uint64_t limit, std::size_t cap) {
    if (limit < 1) throw std::invalid_argument("table limit must be >= 1");
    if (limit > kMaxTableLimit) {
        throw CapacityError("table limit " + std::to_string(limit) + " exceeds 32-bit entry range");
    }
    const unsigned __int128 need = static_cast<unsigned __int128>(limit + 1) * ArithTables::bytes_per_entry();
    if (need > cap) {
        throw CapacityError("tables up to " + std::to_string(limit) + " need " +
                            std::to_string(static_cast<unsigned long long>(need)) +
                            " bytes, memory cap is " + std::to_string(cap));
    }
}

std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

}  // namespace

void ArithTables::require(std::uint64_t n) const {
    if (n < 1 || n > limit_) {
        throw std::out_of_range("argument " + std::to_string(n) + " outside table range [1, " +
                                std::to_string(limit_) + "]");
    }
}

void ArithTables::allocate(std::uint64_t limit) {
    limit_ = limit;
    tau_.assign(limit + 1, 0);
    mu_.assign(limit + 1, 0);
    phi_.assign(limit + 1, 0);
    spf_.assign(limit + 1, 0);
}

ArithTables build_tables_serial(std::uint64_t limit, std::size_t memory_cap_bytes) {
    check_capacity(limit, memory_cap_bytes);
    ArithTables t;
    t.allocate(limit);
    // exponent of spf(n) in n, needed to update tau multiplicatively
    std::vector<std::uint8_t> spf_exp(limit + 1, 0);
    std::vector<std::uint32_t> primes;

    t.tau_[1] = 1;
    t.mu_[1] = 1;
    t.phi_[1] = 1;
    t.spf_[1] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (t.spf_[i] == 0) {
            t.spf_[i] = static_cast<std::uint32_t>(i);
            t.tau_[i] = 2;
            t.mu_[i] = -1;
            t.phi_[i] = static_cast<std::uint32_t>(i - 1);
            spf_exp[i] = 1;
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (const std::uint32_t p : primes) {
            const std::uint64_t m = i * p;
            if (p > t.spf_[i] || m > limit) break;
            t.spf_[m] = p;
            if (p == t.spf_[i]) {
                spf_exp[m] = static_cast<std::uint8_t>(spf_exp[i] + 1);
                t.tau_[m] = static_cast<std::uint16_t>(t.tau_[i] / (spf_exp[i] + 1) * (spf_exp[i] + 2));
                t.mu_[m] = 0;
                t.phi_[m] = t.phi_[i] * p;
            } else {
                spf_exp[m] = 1;
                t.tau_[m] = static_cast<std::uint16_t>(t.tau_[i] * 2);
                t.mu_[m] = static_cast<std::int8_t>(-t.mu_[i]);
                t.phi_[m] = t.phi_[i] * (p - 1);
            }
        }
    }
    return t;
}

ArithTables build_tables(std::uint64_t limit, const TableBuildOptions& opts) {
    check_capacity(limit, opts.memory_cap_bytes);
    if (opts.segment_size == 0) throw std::invalid_argument("segment size must be positive");
    ArithTables t;
    t.allocate(limit);
    const std::vector<std::uint32_t> base = primes_below(isqrt(limit) + 1);
    const std::uint64_t seg = opts.segment_size;
    const auto segments = static_cast<std::int64_t>((limit + seg - 1) / seg);
    const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();

#pragma omp parallel num_threads(threads)
    {
        std::vector<std::uint32_t> rem(seg);
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t s = 0; s < segments; ++s) {
            const std::uint64_t lo = 1 + static_cast<std::uint64_t>(s) * seg;
            const std::uint64_t hi = std::min(limit + 1, lo + seg);
            for (std::uint64_t n = lo; n < hi; ++n) {
                rem[n - lo] = static_cast<std::uint32_t>(n);
                t.tau_[n] = 1;
                t.mu_[n] = 1;
                t.phi_[n] = 1;
            }
            for (const std::uint32_t p : base) {
                if (static_cast<std::uint64_t>(p) * p >= hi) break;
                for (std::uint64_t m = (lo + p - 1) / p * p; m < hi; m += p) {
                    std::uint32_t r = rem[m - lo] / p;
                    std::uint32_t e = 1;
                    std::uint32_t pe = 1;  // p^(e-1)
                    while (r % p == 0) {
                        r /= p;
                        ++e;
                        pe *= p;
                    }
                    rem[m - lo] = r;
                    t.tau_[m] = static_cast<std::uint16_t>(t.tau_[m] * (e + 1));
                    t.mu_[m] = e > 1 ? std::int8_t{0} : static_cast<std::int8_t>(-t.mu_[m]);
                    t.phi_[m] *= (p - 1) * pe;
                    if (t.spf_[m] == 0) t.spf_[m] = p;
                }
            }
            for (std::uint64_t n = lo; n < hi; ++n) {
                const std::uint32_t r = rem[n - lo];
                if (r > 1) {
                    t.tau_[n] = static_cast<std::uint16_t>(t.tau_[n] * 2);
                    t.mu_[n] = static_cast<std::int8_t>(-t.mu_[n]);
                    t.phi_[n] *= r - 1;
                    if (t.spf_[n] == 0) t.spf_[n] = r;
                }
            }
        }
    }
    t.spf_[1] = 1;
    return t;
}

std::vector<std::uint32_t> primes_below(std::uint64_t hi) {
    std::vector<std::uint32_t> out;
    if (hi <= 2) return out;
    std::vector<bool> composite(hi, false);
    for (std::uint64_t i = 2; i < hi; ++i) {
        if (composite[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j < hi; j += i) composite[j] = true;
    }
    return out;
}

std::vector<PrimePower> factorize(std::uint64_t n, const ArithTables& tables) {
    tables.require(n);
    std::vector<PrimePower> out;
    while (n > 1) {
        const std::uint32_t p = tables.spf(n);
        std::uint32_t e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    return out;
}

std::uint64_t tau_k(std::uint64_t n, unsigned k, const ArithTables& tables) {
    if (k == 0) throw std::invalid_argument("tau_k: k must be >= 1");
    std::uint64_t result = 1;
    for (const PrimePower& pp : factorize(n, tables)) {
        // C(e + k - 1, k - 1) computed as C(e + k - 1, e)
        unsigned __int128 c = 1;
        for (std::uint32_t i = 1; i <= pp.exponent; ++i) {
            c = c * (k - 1 + i) / i;
        }
        const unsigned __int128 prod = static_cast<unsigned __int128>(result) * c;
        if (c > UINT64_MAX || prod > UINT64_MAX) throw std::overflow_error("tau_k overflows 64 bits");
        result = static_cast<std::uint64_t>(prod);
    }
    return result;
}

bool is_squarefree_product(std::span<const std::uint64_t> values, const ArithTables& tables) {
    for (const std::uint64_t v : values) tables.require(v);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (tables.mu(values[i]) == 0) return false;
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            if (std::gcd(values[i], values[j]) != 1) return false;
        }
    }
    return true;
}

std::uint64_t largest_prime_factor(std::uint64_t n, const ArithTables& tables) {
    tables.require(n);
    std::uint64_t largest = 1;
    while (n > 1) {
        const std::uint32_t p = tables.spf(n);
        largest = p;
        while (n % p == 0) n /= p;
    }
    return largest;
}

bool is_smooth(std::uint64_t n, double bound, const ArithTables& tables) {
    return static_cast<double>(largest_prime_factor(n, tables)) <= bound;
}

void squarefree_divisors(std::uint64_t n, std::uint64_t bound, const ArithTables& tables,
                         std::vector<std::uint64_t>& out) {
    out.clear();
    if (bound < 1) return;
    out.push_back(1);
    while (n > 1) {
        const std::uint32_t p = tables.spf(n);
        while (n % p == 0) n /= p;
        const std::size_t count = out.size();
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint64_t d = out[i] * p;
            if (d <= bound) out.push_back(d);
        }
    }
    std::sort(out.begin(), out.end());
}

// ---- cache file ----

namespace {

constexpr char kMagic[8] = {'T', 'S', 'V', 'T', 'A', 'B', 'L', 'E'};

template <typename T>
void write_le(std::ostream& os, std::span<const T> data) {
    if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
        os.write(reinterpret_cast<const char*>(data.data()),
                 static_cast<std::streamsize>(data.size_bytes()));
    } else {
        for (T v : data) {
            auto u = static_cast<std::make_unsigned_t<T>>(v);
            for (std::size_t b = 0; b < sizeof(T); ++b) os.put(static_cast<char>((u >> (8 * b)) & 0xFF));
        }
    }
}

template <typename T>
void read_le(std::istream& is, std::span<T> data) {
    is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
    if constexpr (std::endian::native != std::endian::little && sizeof(T) > 1) {
        for (T& v : data) {
            auto u = static_cast<std::make_unsigned_t<T>>(v);
            std::make_unsigned_t<T> swapped = 0;
            for (std::size_t b = 0; b < sizeof(T); ++b) swapped |= ((u >> (8 * b)) & 0xFF) << (8 * (sizeof(T) - 1 - b));
            v = static_cast<T>(swapped);
        }
    }
}

template <typename T>
void write_scalar(std::ostream& os, T v) {
    write_le<T>(os, std::span<const T>(&v, 1));
}

template <typename T>
T read_scalar(std::istream& is) {
    T v{};
    read_le<T>(is, std::span<T>(&v, 1));
    return v;
}

}  // namespace

std::filesystem::path table_cache_file(const std::filesystem::path& dir, std::uint64_t limit) {
    return dir / ("tables_" + std::to_string(limit) + ".bin");
}

void save_tables(const ArithTables& tables, const std::filesystem::path& file) {
    const auto tmp = std::filesystem::path(file.string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write table cache " + tmp.string());
        os.write(kMagic, sizeof kMagic);
        write_scalar<std::uint32_t>(os, kTableCacheVersion);
        write_scalar<std::uint32_t>(os, 0);
        write_scalar<std::uint64_t>(os, tables.limit());
        write_le(os, tables.tau_data().subspan(1));
        write_le(os, tables.mu_data().subspan(1));
        write_le(os, tables.phi_data().subspan(1));
        write_le(os, tables.spf_data().subspan(1));
        if (!os) throw std::runtime_error("short write on table cache " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

ArithTables load_tables(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open table cache " + file.string());
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || !std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
        throw std::runtime_error("bad table cache magic in " + file.string());
    }
    const auto version = read_scalar<std::uint32_t>(is);
    if (version != kTableCacheVersion) {
        throw std::runtime_error("unsupported table cache version " + std::to_string(version));
    }
    (void)read_scalar<std::uint32_t>(is);
    const auto limit = read_scalar<std::uint64_t>(is);
    if (!is || limit < 1 || limit > kMaxTableLimit) throw std::runtime_error("corrupt table cache header");

    ArithTables t;
    t.allocate(limit);
    read_le(is, std::span(t.tau_).subspan(1));
    read_le(is, std::span(t.mu_).subspan(1));
    read_le(is, std::span(t.phi_).subspan(1));
    read_le(is, std::span(t.spf_).subspan(1));
    if (!is) throw std::runtime_error("truncated table cache " + file.string());
    return t;
}

ArithTables load_or_build_tables(std::uint64_t limit, const std::filesystem::path& cache_dir,
                                 const TableBuildOptions& opts) {
    check_capacity(limit, opts.memory_cap_bytes);
    if (!cache_dir.empty()) {
        const auto file = table_cache_file(cache_dir, limit);
        if (std::filesystem::exists(file)) return load_tables(file);
    }
    ArithTables t = build_tables(limit, opts);
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        save_tables(t, table_cache_file(cache_dir, limit));
    }
    return t;
}

}  // namespace tuplesieve

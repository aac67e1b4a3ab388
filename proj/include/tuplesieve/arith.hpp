#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace tuplesieve {

inline constexpr std::uint64_t kMaxTableLimit = 0xFFFFFFFFull;
inline constexpr std::size_t kDefaultMemoryCap = std::size_t{4} << 30;

struct TableBuildOptions {
    std::size_t memory_cap_bytes = kDefaultMemoryCap;
    std::uint64_t segment_size = std::uint64_t{1} << 18;
    int threads = 0;  // 0: OpenMP default
};

// Sieved tables of tau, mu, phi and the smallest prime factor on [1, limit].
// Index 0 is unused and holds zeros. Tables are immutable once built and may
// be shared read-only between threads.
class ArithTables {
public:
    ArithTables() = default;

    std::uint64_t limit() const { return limit_; }

    // Unchecked accessors for hot loops; callers guarantee 1 <= n <= limit.
    std::uint32_t tau(std::uint64_t n) const { return tau_[n]; }
    int mu(std::uint64_t n) const { return mu_[n]; }
    std::uint32_t phi(std::uint64_t n) const { return phi_[n]; }
    std::uint32_t spf(std::uint64_t n) const { return spf_[n]; }
    bool is_prime(std::uint64_t n) const { return n >= 2 && spf_[n] == n; }

    // Throws std::out_of_range unless 1 <= n <= limit.
    void require(std::uint64_t n) const;

    std::span<const std::uint16_t> tau_data() const { return tau_; }
    std::span<const std::int8_t> mu_data() const { return mu_; }
    std::span<const std::uint32_t> phi_data() const { return phi_; }
    std::span<const std::uint32_t> spf_data() const { return spf_; }

    bool operator==(const ArithTables&) const = default;

    static std::size_t bytes_per_entry() {
        return sizeof(std::uint16_t) + sizeof(std::int8_t) + 2 * sizeof(std::uint32_t);
    }

private:
    friend ArithTables build_tables_serial(std::uint64_t, std::size_t);
    friend ArithTables build_tables(std::uint64_t, const TableBuildOptions&);
    friend ArithTables load_tables(const std::filesystem::path&);

    void allocate(std::uint64_t limit);

    std::uint64_t limit_ = 0;
    std::vector<std::uint16_t> tau_;
    std::vector<std::int8_t> mu_;
    std::vector<std::uint32_t> phi_;
    std::vector<std::uint32_t> spf_;
};

// Reference builder: one linear (spf-based) sieve pass, single threaded.
ArithTables build_tables_serial(std::uint64_t limit, std::size_t memory_cap_bytes = kDefaultMemoryCap);

// Segmented builder. Each segment is sieved by one thread by dividing out the
// primes up to sqrt(limit); segments run in parallel. Output is identical to
// build_tables_serial.
ArithTables build_tables(std::uint64_t limit, const TableBuildOptions& opts = {});

// Cache file: little-endian header {magic "TSVTABLE", u32 version, u32 reserved,
// u64 limit} followed by tau (u16), mu (i8), phi (u32) and spf (u32) for n = 1..limit.
inline constexpr std::uint32_t kTableCacheVersion = 1;
void save_tables(const ArithTables& tables, const std::filesystem::path& file);
ArithTables load_tables(const std::filesystem::path& file);
std::filesystem::path table_cache_file(const std::filesystem::path& dir, std::uint64_t limit);

// Loads the cached tables for exactly this limit from dir when present,
// otherwise builds and (when dir is non-empty) writes the cache.
ArithTables load_or_build_tables(std::uint64_t limit, const std::filesystem::path& cache_dir,
                                 const TableBuildOptions& opts = {});

struct PrimePower {
    std::uint32_t prime;
    std::uint32_t exponent;
};

std::vector<PrimePower> factorize(std::uint64_t n, const ArithTables& tables);

// tau_k(n): ordered factorizations of n into k positive factors.
std::uint64_t tau_k(std::uint64_t n, unsigned k, const ArithTables& tables);

// True iff every value is squarefree and the values are pairwise coprime.
bool is_squarefree_product(std::span<const std::uint64_t> values, const ArithTables& tables);

// True iff every prime factor of n is <= bound.
bool is_smooth(std::uint64_t n, double bound, const ArithTables& tables);

// Largest prime factor (1 for n = 1).
std::uint64_t largest_prime_factor(std::uint64_t n, const ArithTables& tables);

// Squarefree divisors of n that are <= bound, in increasing order.
void squarefree_divisors(std::uint64_t n, std::uint64_t bound, const ArithTables& tables,
                         std::vector<std::uint64_t>& out);

// Primes p with lo <= p < hi (simple sieve; for small auxiliary ranges).
std::vector<std::uint32_t> primes_below(std::uint64_t hi);

}  // namespace tuplesieve

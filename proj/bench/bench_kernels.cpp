// Serial reference vs OpenMP kernel for each parallel hot loop. The second
// argument of the parallel cases is the thread count.

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "tuplesieve/arith.hpp"
#include "tuplesieve/divisor_ap.hpp"
#include "tuplesieve/functionals.hpp"
#include "tuplesieve/hunt.hpp"
#include "tuplesieve/sieve.hpp"
#include "tuplesieve/testfn.hpp"

using namespace tuplesieve;

namespace {

const ArithTables& shared_tables() {
    static const ArithTables t = build_tables(2100000);
    return t;
}

const WeightSystem& shared_ws() {
    static const std::vector<std::uint64_t> h{0, 2, 6};
    static const WeightSystem ws(SieveConfig::make(h, 1e6, 3, 0.004, 0.001, 1.0), h,
                                 std::make_shared<PolySimplexFunction>(3, 4));
    return ws;
}

const std::vector<std::uint64_t> kHuntTuple{0, 4, 6, 10};

void BM_TablesSerial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(build_tables_serial(static_cast<std::uint64_t>(st.range(0))));
}
void BM_TablesParallel(benchmark::State& st) {
    TableBuildOptions o;
    o.threads = static_cast<int>(st.range(1));
    for (auto _ : st) benchmark::DoNotOptimize(build_tables(static_cast<std::uint64_t>(st.range(0)), o));
}

void BM_BVScanSerial(benchmark::State& st) {
    const auto& t = shared_tables();
    for (auto _ : st) benchmark::DoNotOptimize(bv_scan_serial(1e6, 0.4, 1, t));
}
void BM_BVScanParallel(benchmark::State& st) {
    const auto& t = shared_tables();
    for (auto _ : st) benchmark::DoNotOptimize(bv_scan(1e6, 0.4, 1, t, static_cast<int>(st.range(0))));
}

void BM_SmoothScanSerial(benchmark::State& st) {
    const auto& t = shared_tables();
    for (auto _ : st) benchmark::DoNotOptimize(smooth_scan_serial(1e6, 0.5, 0.3, 0.05, SmoothFlavor::XPower, t));
}
void BM_SmoothScanParallel(benchmark::State& st) {
    const auto& t = shared_tables();
    for (auto _ : st)
        benchmark::DoNotOptimize(
            smooth_scan(1e6, 0.5, 0.3, 0.05, SmoothFlavor::XPower, t, static_cast<int>(st.range(0))));
}

void BM_SieveSumsSerial(benchmark::State& st) {
    const auto& t = shared_tables();
    for (auto _ : st) benchmark::DoNotOptimize(sieve_sums_serial(shared_ws(), t));
}
void BM_SieveSumsParallel(benchmark::State& st) {
    const auto& t = shared_tables();
    for (auto _ : st) benchmark::DoNotOptimize(sieve_sums(shared_ws(), t, static_cast<int>(st.range(0))));
}

void BM_FunctionalsSerial(benchmark::State& st) {
    const SmoothTestFunction F(TestFunctionParams::with_defaults(4));
    for (auto _ : st) benchmark::DoNotOptimize(functionals_mc_serial(F, 1 << 20, 1, 3));
}
void BM_FunctionalsParallel(benchmark::State& st) {
    const SmoothTestFunction F(TestFunctionParams::with_defaults(4));
    for (auto _ : st) benchmark::DoNotOptimize(functionals_mc(F, 1 << 20, 1, 3, static_cast<int>(st.range(0))));
}

void BM_HuntSerial(benchmark::State& st) {
    const auto& t = shared_tables();
    for (auto _ : st) benchmark::DoNotOptimize(hunt_serial(kHuntTuple, 2e6, 16, t));
}
void BM_HuntParallel(benchmark::State& st) {
    const auto& t = shared_tables();
    for (auto _ : st) benchmark::DoNotOptimize(hunt(kHuntTuple, 2e6, 16, t, static_cast<int>(st.range(0))));
}

}  // namespace

BENCHMARK(BM_TablesSerial)->Arg(1 << 22)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TablesParallel)->Args({1 << 22, 1})->Args({1 << 22, 2})->Args({1 << 22, 4})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BVScanSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BVScanParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SmoothScanSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SmoothScanParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SieveSumsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SieveSumsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FunctionalsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FunctionalsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HuntSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HuntParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

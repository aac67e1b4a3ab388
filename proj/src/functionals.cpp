#include "tuplesieve/functionals.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace tuplesieve {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

template <std::size_t N>
struct Moments {
    std::array<double, N> sum{};
    std::array<std::array<double, N>, N> cross{};
};

template <std::size_t N, typename Integrand>
Moments<N> run_block(std::size_t k, double box, std::uint64_t seed, std::uint64_t block, std::uint64_t count,
                     const Integrand& f) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(block + 1)));
    std::vector<double> u(k);
    Moments<N> m;
    for (std::uint64_t s = 0; s < count; ++s) {
        double r = 0;
        for (std::size_t j = 0; j < k; ++j) {
            u[j] = box * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
            r += u[j];
        }
        if (r >= 1) continue;
        const std::array<double, N> v = f(std::span<const double>(u));
        for (std::size_t i = 0; i < N; ++i) {
            m.sum[i] += v[i];
            for (std::size_t j = i; j < N; ++j) m.cross[i][j] += v[i] * v[j];
        }
    }
    return m;
}

template <std::size_t N>
struct McOutcome {
    std::array<Estimate, N> est;
    std::array<std::array<double, N>, N> cov{};
};

template <std::size_t N, typename Integrand>
McOutcome<N> monte_carlo(std::size_t k, double box, std::uint64_t samples, std::uint64_t seed, bool parallel,
                         int threads, const Integrand& f) {
    if (samples < 1000) throw std::invalid_argument("functionals_mc: at least 1000 samples required");
    const std::uint64_t blocks = (samples + kMcBlock - 1) / kMcBlock;
    std::vector<Moments<N>> parts(blocks);
    auto count_of = [&](std::uint64_t b) { return std::min<std::uint64_t>(kMcBlock, samples - b * kMcBlock); };
    if (parallel) {
        const int nt = threads > 0 ? threads : omp_get_max_threads();
        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
            try {
                parts[b] = run_block<N>(k, box, seed, b, count_of(b), f);
            } catch (...) {
#pragma omp critical
                err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    } else {
        for (std::uint64_t b = 0; b < blocks; ++b) parts[b] = run_block<N>(k, box, seed, b, count_of(b), f);
    }
    Moments<N> total;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < N; ++i) {
            total.sum[i] += p.sum[i];
            for (std::size_t j = i; j < N; ++j) total.cross[i][j] += p.cross[i][j];
        }
    }
    const double n = static_cast<double>(samples);
    const double vol = std::pow(box, static_cast<double>(k));
    McOutcome<N> out;
    std::array<double, N> mean{};
    for (std::size_t i = 0; i < N; ++i) mean[i] = total.sum[i] / n;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = i; j < N; ++j) {
            const double c = (total.cross[i][j] / n - mean[i] * mean[j]) * vol * vol / (n - 1);
            out.cov[i][j] = out.cov[j][i] = c;
        }
    }
    for (std::size_t i = 0; i < N; ++i) out.est[i] = {mean[i] * vol, std::sqrt(std::max(0.0, out.cov[i][i]))};
    return out;
}

double sampling_box(const SieveFunction& F) { return std::min(F.box(), 1.0); }

void fill_gram(const SieveFunction& F, FunctionalEstimates& e) {
    if (const auto* p = dynamic_cast<const SmoothTestFunction*>(&F)) {
        const double T = p->test_function().T();
        e.upsilon = gram_integrals(T).upsilon;
        e.mu = mu_ratio(T);
    }
}

FunctionalEstimates mc_impl(const SieveFunction& F, std::uint64_t samples, std::uint64_t seed, std::size_t m,
                            bool parallel, int threads) {
    const std::size_t k = F.dim();
    if (m >= k) throw std::invalid_argument("functionals_mc: direction out of range");
    auto integrand = [&F, m](std::span<const double> t) {
        const double a = F.mixed_plus(t, m);
        const double b = F.mixed(t);
        const double tm = t[m];
        return std::array<double, 4>{tm * a * a, tm * tm * a * a, tm * a * b, b * b};
    };
    const McOutcome<4> r = monte_carlo<4>(k, sampling_box(F), samples, seed, parallel, threads, integrand);
    FunctionalEstimates e;
    e.k = k;
    e.direction = m;
    e.alpha = r.est[0];
    e.beta1 = r.est[1];
    e.beta2 = r.est[2];
    e.I_F = r.est[3];
    e.covariance = r.cov;
    e.samples = samples;
    e.seed = seed;
    e.method = "monte-carlo";
    fill_gram(F, e);
    return e;
}

QuadResult integrate_over_support(const SieveFunction& F, const std::function<double(std::span<const double>)>& f,
                                  double box, const QuadSpec& spec, const SieveFunction* other = nullptr) {
    SimplexBox region{std::vector<double>(F.dim(), 0.0), box, 1.0};
    auto breaks = [&](std::size_t level, std::span<const double>, double partial, std::vector<double>& out) {
        F.breakpoints(level, partial, out);
        if (other) other->breakpoints(level, partial, out);
    };
    return integrate_simplex_box(f, region, spec, breaks);
}

}  // namespace

FunctionalEstimates functionals_mc(const SieveFunction& F, std::uint64_t samples, std::uint64_t seed,
                                   std::size_t direction, int threads) {
    return mc_impl(F, samples, seed, direction, true, threads);
}

FunctionalEstimates functionals_mc_serial(const SieveFunction& F, std::uint64_t samples, std::uint64_t seed,
                                          std::size_t direction) {
    return mc_impl(F, samples, seed, direction, false, 1);
}

FunctionalEstimates functionals_quadrature(const SieveFunction& F, std::size_t m, const QuadSpec& spec) {
    if (m >= F.dim()) throw std::invalid_argument("functionals_quadrature: direction out of range");
    const double box = sampling_box(F);
    auto run = [&](auto&& f) { return integrate_over_support(F, f, box, spec); };
    const QuadResult a = run([&](std::span<const double> t) {
        const double d = F.mixed_plus(t, m);
        return t[m] * d * d;
    });
    const QuadResult b1 = run([&](std::span<const double> t) {
        const double d = F.mixed_plus(t, m);
        return t[m] * t[m] * d * d;
    });
    const QuadResult b2 = run([&](std::span<const double> t) { return t[m] * F.mixed_plus(t, m) * F.mixed(t); });
    const QuadResult i = run([&](std::span<const double> t) {
        const double d = F.mixed(t);
        return d * d;
    });
    FunctionalEstimates e;
    e.k = F.dim();
    e.direction = m;
    e.alpha = {a.value, a.error};
    e.beta1 = {b1.value, b1.error};
    e.beta2 = {b2.value, b2.error};
    e.I_F = {i.value, i.error};
    for (std::size_t j = 0; j < 4; ++j) {
        const double s = std::array<double, 4>{a.error, b1.error, b2.error, i.error}[j];
        e.covariance[j][j] = s * s;
    }
    e.method = "quadrature";
    fill_gram(F, e);
    return e;
}

double c_integral(const SieveFunction& G, const SieveFunction& H, std::span<const int> a, std::span<const int> b,
                  std::span<const int> c, const QuadSpec& spec) {
    const std::size_t k = G.dim();
    if (H.dim() != k || a.size() != k || b.size() != k || c.size() != k)
        throw std::invalid_argument("c_integral: dimension mismatch");
    int order_sum = 0;
    std::vector<double> inv_fact(k);
    for (std::size_t j = 0; j < k; ++j) {
        if (a[j] < 0 || b[j] < 0) throw std::invalid_argument("c_integral: derivative orders must be nonnegative");
        if (c[j] < 1) throw std::invalid_argument("c_integral: weight exponents must be positive");
        order_sum += a[j] + b[j];
        inv_fact[j] = 1.0 / std::tgamma(static_cast<double>(c[j]));
    }
    auto f = [&](std::span<const double> t) {
        double w = 1;
        for (std::size_t j = 0; j < k; ++j) w *= std::pow(t[j], c[j] - 1) * inv_fact[j];
        return w * G.derivative(t, a) * H.derivative(t, b);
    };
    const double box = std::min({G.box(), H.box(), 1.0});
    const double v = integrate_over_support(G, f, box, spec, &H).value;
    return order_sum % 2 == 0 ? v : -v;
}

double c_integral(const SieveFunction& G, const SieveFunction& H, std::span<const int> a, const QuadSpec& spec) {
    return c_integral(G, H, a, a, a, spec);
}

double c_star(const SieveFunction& G, const SieveFunction& H, std::span<const int> a, std::size_t j,
              const QuadSpec& spec) {
    if (j >= a.size()) throw std::invalid_argument("c_star: index out of range");
    if (a[j] < 1) throw std::invalid_argument("c_star: a_j must be positive");
    std::vector<int> plus(a.begin(), a.end()), minus(a.begin(), a.end());
    plus[j] += 1;
    minus[j] -= 1;
    return c_integral(G, H, a, a, plus, spec) - c_integral(G, H, minus, a, a, spec) -
           c_integral(G, H, a, minus, a, spec);
}

RhoBound rho_bound(std::size_t k, double varpi, double delta, const FunctionalEstimates& est) {
    const double I = est.I_F.value;
    if (!(I > 0)) throw std::invalid_argument("rho_bound: I(F) must be positive");
    const double c = 0.5 * (2.0 / 3.0 + varpi) - delta;
    if (!(c > 0)) throw std::invalid_argument("rho_bound: (2/3 + varpi)/2 - delta must be positive");
    const double kd = static_cast<double>(k);
    RhoBound r;
    r.c = c;
    r.value = kd * est.alpha.value / (c * I) - kd * est.beta1.value / I - 4 * kd * est.beta2.value / I;
    const std::array<double, 4> grad{kd / (c * I), -kd / I, -4 * kd / I, -r.value / I};
    double var = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) var += grad[i] * est.covariance[i][j] * grad[j];
    }
    r.std_error = std::sqrt(std::max(0.0, var));
    return r;
}

Rational rho_asymptotic_constant() { return Rational(1) / (Rational(4, 3) + Rational(2 * 55, 12756)); }

IFBoundCheck check_I_F_bound(const TestFunction& tf, std::uint64_t samples, std::uint64_t seed, int threads) {
    const std::size_t k = tf.k();
    const double T = tf.T();
    const double d1 = tf.params().delta1;
    auto integrand = [&tf, k, T, d1](std::span<const double> t) {
        const double f = tf.mixed(t);
        double r = 0, g = 1;
        for (const double x : t) {
            r += x;
            const double v = g_eval(static_cast<double>(k) * x, T);
            g *= v * v;
        }
        const bool shell = r > 1 - d1 && r < 1;
        return std::array<double, 2>{f * f, shell ? g : 0.0};
    };
    const double box = std::min(tf.kappa(), 1.0);
    const McOutcome<2> mc = monte_carlo<2>(k, box, samples, seed, true, threads, integrand);
    const GramIntegrals gi = gram_integrals(T);
    const double kd = static_cast<double>(k);
    const double scale = std::pow(kd, kd) / std::pow(gi.upsilon, kd - 1);
    IFBoundCheck out;
    out.normalized_I_F = {mc.est[0].value * scale, mc.est[0].std_error * scale};
    out.shell_mass = {mc.est[1].value * scale, mc.est[1].std_error * scale};
    const double gap = 1 - T / kd - mu_ratio(T);
    out.lower = gap > 0 ? (1 - T / (kd * gap * gap)) * gi.upsilon - out.shell_mass.value
                        : -std::numeric_limits<double>::infinity();
    out.upper = gi.upsilon;
    const double se = out.normalized_I_F.std_error + out.shell_mass.std_error;
    out.within = out.normalized_I_F.value >= out.lower - 3 * se && out.normalized_I_F.value <= out.upper + 3 * se;
    return out;
}

}  // namespace tuplesieve

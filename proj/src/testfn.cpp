#include "tuplesieve/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tuplesieve {

double smoothstep(double u) {
    if (u <= 0) return 0;
    if (u >= 1) return 1;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double smoothstep_derivative(double u) {
    if (u <= 0 || u >= 1) return 0;
    const double v = u * (1.0 - u);
    return 30.0 * v * v;
}

double g_eval(double t, double T) {
    if (t < 0) throw std::invalid_argument("g_eval: t must be nonnegative");
    if (t > T) return 0;
    return std::exp(-0.5 * t) * (1.0 - t / T);
}

double g_derivative(double t, double T) {
    if (t < 0) throw std::invalid_argument("g_derivative: t must be nonnegative");
    if (t > T) return 0;
    return std::exp(-0.5 * t) * (-0.5 * (1.0 - t / T) - 1.0 / T);
}

GramIntegrals gram_integrals(double T) {
    if (!(T > 0)) throw std::invalid_argument("gram_integrals: T must be positive");
    const double e = std::exp(-T);
    const double T2 = T * T;
    return {1.0 - 2.0 * (T + e - 1.0) / T2, 0.25 - (T * e + e - 1.0) / (2.0 * T2),
            1.0 + (6.0 - 4.0 * T - 2.0 * T * e - 6.0 * e) / T2};
}

double mu_ratio(double T) {
    const GramIntegrals g = gram_integrals(T);
    return g.t_g2 / g.upsilon;
}

double mu_ratio_simplified_display(double T) {
    const GramIntegrals g = gram_integrals(T);
    const double e = std::exp(-T);
    return 1.0 - (2.0 * T + 2.0 * T * e + 4.0 * e - 4.0) / g.upsilon;
}

TestFunctionParams TestFunctionParams::with_defaults(std::size_t k, std::optional<double> T,
                                                     std::optional<double> delta1, double delta2) {
    if (k == 0) throw std::invalid_argument("TestFunction: k must be positive");
    TestFunctionParams p;
    p.k = k;
    const double kd = static_cast<double>(k);
    if (T) {
        p.T = *T;
    } else {
        if (k < 3) throw std::invalid_argument("TestFunction: default T = k/log log k needs k >= 3; pass T");
        p.T = kd / std::log(std::log(kd));
    }
    if (delta1) {
        p.delta1 = *delta1;
    } else {
        if (k < 2) throw std::invalid_argument("TestFunction: default delta1 = sqrt(log k)/k needs k >= 2; pass delta1");
        p.delta1 = std::sqrt(std::log(kd)) / kd;
    }
    p.delta2 = delta2;
    return p;
}

TestFunction::TestFunction(const TestFunctionParams& p) : p_(p) {
    if (p.k == 0) throw std::invalid_argument("TestFunction: k must be positive");
    if (!(p.T > 0)) throw std::invalid_argument("TestFunction: T must be positive");
    if (!(p.delta1 > 0 && p.delta1 <= 1)) throw std::invalid_argument("TestFunction: delta1 must lie in (0, 1]");
    if (!(p.delta2 > 0 && p.delta2 < 1 && p.delta2 < p.T))
        throw std::invalid_argument("TestFunction: delta2 must lie in (0, min(1, T))");
}

double TestFunction::h1(std::span<const double> t) const {
    double r = 0;
    for (const double x : t) r += x;
    if (r >= 1) return 0;
    if (r <= 1 - p_.delta1) return 1;
    return smoothstep((1 - r) / p_.delta1);
}

double TestFunction::h1_partial(std::span<const double> t) const {
    double r = 0;
    for (const double x : t) r += x;
    if (r >= 1 || r <= 1 - p_.delta1) return 0;
    return -smoothstep_derivative((1 - r) / p_.delta1) / p_.delta1;
}

double TestFunction::h2(double t) const {
    if (t >= p_.T) return 0;
    if (t <= p_.T - p_.delta2) return 1;
    return smoothstep((p_.T - t) / p_.delta2);
}

double TestFunction::h2_derivative(double t) const {
    if (t >= p_.T || t <= p_.T - p_.delta2) return 0;
    return -smoothstep_derivative((p_.T - t) / p_.delta2) / p_.delta2;
}

double TestFunction::factor(double u) const {
    const double x = static_cast<double>(p_.k) * u;
    if (x >= p_.T) return 0;
    return h2(x) * g_eval(x, p_.T);
}

double TestFunction::factor_derivative(double u) const {
    const double kd = static_cast<double>(p_.k);
    const double x = kd * u;
    if (x >= p_.T) return 0;
    return kd * (h2_derivative(x) * g_eval(x, p_.T) + h2(x) * g_derivative(x, p_.T));
}

bool TestFunction::in_support(std::span<const double> t) const {
    double r = 0;
    for (const double x : t) {
        if (x < 0 || x >= kappa()) return false;
        r += x;
    }
    return r < 1;
}

double TestFunction::mixed(std::span<const double> t) const {
    if (t.size() != p_.k) throw std::invalid_argument("TestFunction: dimension mismatch");
    if (!in_support(t)) return 0;
    double v = h1(t);
    for (const double x : t) v *= factor(x);
    return v;
}

TestFunction::MixedPlusTerms TestFunction::mixed_plus_terms(std::span<const double> t, std::size_t m) const {
    if (t.size() != p_.k) throw std::invalid_argument("TestFunction: dimension mismatch");
    if (m >= p_.k) throw std::invalid_argument("TestFunction: direction out of range");
    if (!in_support(t)) return {0, 0, 0};
    const double kd = static_cast<double>(p_.k);
    double rest = 1;
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (j != m) rest *= factor(t[j]);
    }
    const double x = kd * t[m];
    const double h = h1(t);
    return {h1_partial(t) * factor(t[m]) * rest, h * kd * h2_derivative(x) * g_eval(x, p_.T) * rest,
            h * kd * h2(x) * g_derivative(x, p_.T) * rest};
}

void TestFunction::breakpoints(std::size_t level, double partial, std::vector<double>& out) const {
    (void)level;
    out.push_back((p_.T - p_.delta2) / static_cast<double>(p_.k));
    out.push_back(1 - p_.delta1 - partial);
}

QuadResult TestFunction::evaluate(std::span<const double> t, const QuadSpec& spec) const {
    if (t.size() != p_.k) throw std::invalid_argument("F_eval: dimension mismatch");
    for (const double x : t) {
        if (x < 0) throw std::invalid_argument("F_eval: coordinates must be nonnegative");
    }
    if (!in_support(t)) return {};
    SimplexBox region{std::vector<double>(t.begin(), t.end()), kappa(), 1.0};
    std::vector<double> tail(p_.k + 1, 0.0);
    for (std::size_t j = p_.k; j-- > 0;) tail[j] = tail[j + 1] + t[j];
    const double ramp = (p_.T - p_.delta2) / static_cast<double>(p_.k);
    auto breaks = [&](std::size_t level, std::span<const double>, double partial, std::vector<double>& out) {
        out.push_back(ramp);
        out.push_back(1 - p_.delta1 - partial - tail[level + 1]);
    };
    QuadResult r = integrate_simplex_box([this](std::span<const double> u) { return mixed(u); }, region, spec, breaks);
    if (p_.k % 2 == 1) r.value = -r.value;
    return r;
}

FEvaluator::FEvaluator(TestFunction tf, QuadSpec spec, double lattice)
    : tf_(std::move(tf)), spec_(spec), lattice_(lattice) {
    if (lattice < 0) throw std::invalid_argument("FEvaluator: lattice spacing must be nonnegative");
}

double FEvaluator::operator()(std::span<const double> t) const {
    std::vector<double> key(t.begin(), t.end());
    if (lattice_ > 0) {
        for (double& x : key) x = std::round(x / lattice_) * lattice_;
    }
    if (!tf_.in_support(key)) return 0;
    std::sort(key.begin(), key.end());
    {
        std::lock_guard lock(mu_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const double v = tf_.evaluate(key, spec_).value;
    std::lock_guard lock(mu_);
    return cache_.emplace(std::move(key), v).first->second;
}

std::size_t FEvaluator::cache_size() const {
    std::lock_guard lock(mu_);
    return cache_.size();
}

SmoothTestFunction::SmoothTestFunction(const TestFunctionParams& p, QuadSpec spec, double lattice)
    : tf_(p), eval_(std::make_shared<FEvaluator>(tf_, spec, lattice)) {}

double SmoothTestFunction::value(std::span<const double> t) const { return (*eval_)(t); }

double SmoothTestFunction::derivative(std::span<const double> t, std::span<const int> order) const {
    if (order.size() != tf_.k()) throw std::invalid_argument("SmoothTestFunction: dimension mismatch");
    int zeros = 0, ones = 0, twos = 0;
    std::size_t m = 0;
    for (std::size_t j = 0; j < order.size(); ++j) {
        if (order[j] == 0) ++zeros;
        else if (order[j] == 1) ++ones;
        else if (order[j] == 2) ++twos, m = j;
    }
    const int k = static_cast<int>(tf_.k());
    if (zeros == k) return value(t);
    if (ones == k) return tf_.mixed(t);
    if (twos == 1 && ones == k - 1) return tf_.mixed_plus(t, m);
    throw std::invalid_argument("SmoothTestFunction: only F, F^(1) and F^(1+e_m) are available");
}

void SmoothTestFunction::breakpoints(std::size_t level, double partial, std::vector<double>& out) const {
    tf_.breakpoints(level, partial, out);
}

}  // namespace tuplesieve

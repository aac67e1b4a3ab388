#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "tuplesieve/quadrature.hpp"
#include "tuplesieve/sieve_function.hpp"

namespace tuplesieve {

// Quintic smoothstep s(u) = 6u^5 - 15u^4 + 10u^3, clamped to [0, 1].
double smoothstep(double u);
double smoothstep_derivative(double u);
inline constexpr double kSmoothstepSlope = 15.0 / 8.0;  // max of s'

double g_eval(double t, double T);
double g_derivative(double t, double T);  // one-sided at the endpoints

struct GramIntegrals {
    double upsilon;   // int_0^T g^2
    double t_gprime2; // int_0^T t g'^2
    double t_g2;      // int_0^T t g^2
};

GramIntegrals gram_integrals(double T);
double mu_ratio(double T);
// The simplified expression 1 - (2T + 2Te^-T + 4e^-T - 4)/Upsilon as it is
// commonly displayed. It drops a factor T^-2 and is kept only to measure
// how far it is from mu_ratio.
double mu_ratio_simplified_display(double T);

struct TestFunctionParams {
    std::size_t k = 2;
    double T = 0;
    double delta1 = 0;
    double delta2 = 1e-2;

    // T = k / log log k and delta1 = sqrt(log k) / k unless given. The
    // default T needs k >= 3 to be positive.
    static TestFunctionParams with_defaults(std::size_t k, std::optional<double> T = std::nullopt,
                                            std::optional<double> delta1 = std::nullopt, double delta2 = 1e-2);
};

class TestFunction {
public:
    explicit TestFunction(const TestFunctionParams& p);

    const TestFunctionParams& params() const { return p_; }
    std::size_t k() const { return p_.k; }
    double T() const { return p_.T; }
    double kappa() const { return p_.T / static_cast<double>(p_.k); }

    double h1(std::span<const double> t) const;
    double h1_partial(std::span<const double> t) const;  // same for every coordinate
    double h2(double t) const;
    double h2_derivative(double t) const;
    double factor(double u) const;             // h2(ku) g(ku)
    double factor_derivative(double u) const;  // d/du of factor

    bool in_support(std::span<const double> t) const;

    double mixed(std::span<const double> t) const;  // F^(1)
    struct MixedPlusTerms {
        double i1, i2, i3;
        double sum() const { return i1 + i2 + i3; }
    };
    MixedPlusTerms mixed_plus_terms(std::span<const double> t, std::size_t m) const;
    double mixed_plus(std::span<const double> t, std::size_t m) const { return mixed_plus_terms(t, m).sum(); }

    // F(t) by nested quadrature of F^(1) over {u >= t}.
    QuadResult evaluate(std::span<const double> t, const QuadSpec& spec) const;

    void breakpoints(std::size_t level, double partial, std::vector<double>& out) const;

private:
    TestFunctionParams p_;
};

// F with a write-once cache keyed by the sorted (optionally lattice-rounded)
// coordinates. Safe to call from several threads.
class FEvaluator {
public:
    FEvaluator(TestFunction tf, QuadSpec spec, double lattice = 0.0);
    double operator()(std::span<const double> t) const;
    const TestFunction& function() const { return tf_; }
    const QuadSpec& spec() const { return spec_; }
    double lattice() const { return lattice_; }
    std::size_t cache_size() const;

private:
    TestFunction tf_;
    QuadSpec spec_;
    double lattice_;
    mutable std::mutex mu_;
    mutable std::map<std::vector<double>, double> cache_;
};

// The smooth test function F as a SieveFunction: values via FEvaluator, F^(1) and
// F^(1+e_m) in closed form. Other derivative orders are rejected.
class SmoothTestFunction final : public SieveFunction {
public:
    SmoothTestFunction(const TestFunctionParams& p, QuadSpec spec = {}, double lattice = 0.0);
    std::size_t dim() const override { return tf_.k(); }
    double box() const override { return tf_.kappa(); }
    double value(std::span<const double> t) const override;
    double derivative(std::span<const double> t, std::span<const int> order) const override;
    void breakpoints(std::size_t level, double partial, std::vector<double>& out) const override;
    std::string name() const override { return "paper"; }
    const TestFunction& test_function() const { return tf_; }

private:
    TestFunction tf_;
    std::shared_ptr<FEvaluator> eval_;
};

}  // namespace tuplesieve

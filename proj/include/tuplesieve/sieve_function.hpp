#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tuplesieve {

// A symmetric function on [0, inf)^k supported in {t_j <= box, sum t_j <= 1},
// with the partial derivatives the sieve formulas need.
class SieveFunction {
public:
    virtual ~SieveFunction() = default;
    virtual std::size_t dim() const = 0;
    virtual double box() const = 0;
    virtual double value(std::span<const double> t) const = 0;
    // Partial derivative of multi-order `order`. Throws std::invalid_argument
    // for orders the implementation does not provide.
    virtual double derivative(std::span<const double> t, std::span<const int> order) const = 0;
    // Extra breakpoints for the integral over coordinate `level` given the
    // running sum of the outer coordinates.
    virtual void breakpoints(std::size_t level, double partial, std::vector<double>& out) const {
        (void)level;
        (void)partial;
        (void)out;
    }
    virtual std::string name() const = 0;

    double mixed(std::span<const double> t) const;                 // F^(1,...,1)
    double mixed_plus(std::span<const double> t, std::size_t m) const;  // F^(1 + e_m)
};

// F(t) = c (1 - sum t_j)^a on the simplex, 0 outside.
class PolySimplexFunction final : public SieveFunction {
public:
    PolySimplexFunction(std::size_t k, int exponent, double scale = 1.0);
    std::size_t dim() const override { return k_; }
    double box() const override { return 1.0; }
    double value(std::span<const double> t) const override;
    double derivative(std::span<const double> t, std::span<const int> order) const override;
    std::string name() const override;
    int exponent() const { return a_; }
    double scale() const { return scale_; }

private:
    std::size_t k_;
    int a_;
    double scale_;
};

// Identically zero, for the degenerate sieve cases.
class ZeroFunction final : public SieveFunction {
public:
    explicit ZeroFunction(std::size_t k) : k_(k) {}
    std::size_t dim() const override { return k_; }
    double box() const override { return 1.0; }
    double value(std::span<const double>) const override { return 0; }
    double derivative(std::span<const double>, std::span<const int>) const override { return 0; }
    std::string name() const override { return "zero"; }

private:
    std::size_t k_;
};

}  // namespace tuplesieve

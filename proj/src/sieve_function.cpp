#include "tuplesieve/sieve_function.hpp"

#include <cmath>
#include <stdexcept>

namespace tuplesieve {

double SieveFunction::mixed(std::span<const double> t) const {
    std::vector<int> order(dim(), 1);
    return derivative(t, order);
}

double SieveFunction::mixed_plus(std::span<const double> t, std::size_t m) const {
    if (m >= dim()) throw std::invalid_argument("mixed_plus: direction out of range");
    std::vector<int> order(dim(), 1);
    order[m] = 2;
    return derivative(t, order);
}

PolySimplexFunction::PolySimplexFunction(std::size_t k, int exponent, double scale)
    : k_(k), a_(exponent), scale_(scale) {
    if (k == 0) throw std::invalid_argument("PolySimplexFunction: k must be positive");
    if (exponent < 0) throw std::invalid_argument("PolySimplexFunction: exponent must be nonnegative");
}

double PolySimplexFunction::value(std::span<const double> t) const {
    double r = 0;
    for (const double x : t) r += x;
    if (r >= 1.0) return 0.0;
    return scale_ * std::pow(1.0 - r, a_);
}

double PolySimplexFunction::derivative(std::span<const double> t, std::span<const int> order) const {
    if (order.size() != k_ || t.size() != k_) throw std::invalid_argument("PolySimplexFunction: dimension mismatch");
    int total = 0;
    for (const int o : order) {
        if (o < 0) throw std::invalid_argument("PolySimplexFunction: negative derivative order");
        total += o;
    }
    // Only the classical derivative; the jump across sum t = 1 is ignored.
    if (total > a_) return 0.0;
    double r = 0;
    for (const double x : t) r += x;
    if (r >= 1.0) return 0.0;
    double coef = scale_;
    for (int i = 0; i < total; ++i) coef *= -(a_ - i);
    return coef * std::pow(1.0 - r, a_ - total);
}

std::string PolySimplexFunction::name() const { return "poly:" + std::to_string(a_); }

}  // namespace tuplesieve

#include "bqrec/sine_integral.hpp"

#include "bqrec/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace bqrec {
namespace {

constexpr double kCellWidth = 0.5;
constexpr double kTableLimit = 64.0;
constexpr int kCells = static_cast<int>(kTableLimit / kCellWidth);

double sin_over_u(double u) {
    if (std::abs(u) < 1e-8) {
        return 1.0 - u * u / 6.0;
    }
    return std::sin(u) / u;
}

// table[i] = Si(i * kCellWidth)
const std::vector<double>& cumulative_table() {
    static const std::vector<double> table = [] {
        using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
        std::vector<double> t(kCells + 1, 0.0);
        for (int i = 0; i < kCells; ++i) {
            const double a = i * kCellWidth;
            const double b = a + kCellWidth;
            t[i + 1] = t[i] + Rule::integrate(sin_over_u, a, b, 15, 1e-13);
        }
        return t;
    }();
    return table;
}

double asymptotic(double x) {
    // Si(x) = pi/2 - f(x) cos x - g(x) sin x for large x.
    const double inv2 = 1.0 / (x * x);
    double f = 1.0;
    double g = 1.0;
    double term_f = 1.0;
    double term_g = 1.0;
    for (int n = 1; n <= 7; ++n) {
        term_f *= -static_cast<double>((2 * n) * (2 * n - 1)) * inv2;
        term_g *= -static_cast<double>((2 * n + 1) * (2 * n)) * inv2;
        f += term_f;
        g += term_g;
    }
    f /= x;
    g *= inv2;
    return std::numbers::pi / 2.0 - f * std::cos(x) - g * std::sin(x);
}

}  // namespace

double sine_integral(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("sine_integral: non-finite argument");
    }
    const double ax = std::abs(x);
    double value = 0.0;
    if (ax >= kTableLimit) {
        value = asymptotic(ax);
    } else {
        const auto& table = cumulative_table();
        const int cell = static_cast<int>(ax / kCellWidth);
        const double a = cell * kCellWidth;
        value = table[cell];
        if (ax > a) {
            value += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(sin_over_u, a, ax,
                                                                                  0);
        }
    }
    return x < 0.0 ? -value : value;
}

}  // namespace bqrec

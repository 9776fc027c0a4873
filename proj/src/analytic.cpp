#include "twincensus/analytic.hpp"

#include "twincensus/sieve.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twincensus {

void CompensatedSum::add(double v) {
    double t = primary + v;
    if (std::abs(primary) >= std::abs(v))
        compensation += (primary - t) + v;
    else
        compensation += (v - t) + primary;
    primary = t;
}

TwinConstant twin_constant(std::uint64_t prime_limit) {
    if (prime_limit < 3)
        throw std::invalid_argument("twin_constant: prime_limit must be >= 3, got " + std::to_string(prime_limit));
    long double prod = 1.0L;
    stream_primes(prime_limit, StreamConfig{}, [&](std::uint64_t p) {
        long double q = static_cast<long double>(p) - 1.0L;
        prod *= 1.0L - 1.0L / (q * q);
    });
    TwinConstant c;
    c.prime_limit = prime_limit;
    c.value = static_cast<double>(2.0L * prod);
    // Omitted factors multiply the product by prod_{p>P}(1 - 1/(p-1)^2), and
    // sum_{n>P} 2/(n-1)^2 < 2/(P-1) bounds |log| of that, so the distance to
    // the full product is below value * (exp(2/(P-1)) - 1).
    c.tail_bound = c.value * std::expm1(2.0 / (static_cast<double>(prime_limit) - 1.0));
    return c;
}

TwinConstant census_constant() {
    // twin_constant(30000000000), frozen so a census does not pay half a
    // minute of sieving at startup. Reproduce: constant --prime-limit 3e10.
    TwinConstant c;
    c.value = 1.3203236316979741;
    c.prime_limit = 30000000000ull;
    c.tail_bound = 8.8021575452399703e-11;
    return c;
}

namespace {

inline double integrand(double u) {
    double l = std::log(u);
    return 1.0 / (l * l);
}

// 10-point Gauss-Legendre nodes (positive half) and weights.
const double kNode[5] = {0.14887433898163121, 0.43339539412924719, 0.67940956829902441,
                         0.86506336668898451, 0.97390652851717172};
const double kWeight[5] = {0.29552422471475287, 0.26926671930999635, 0.21908636251598204,
                           0.14945134915058059, 0.066671344308688138};

double gauss10_panel(double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0.0;
    for (int i = 0; i < 5; ++i)
        s += kWeight[i] * (integrand(c - h * kNode[i]) + integrand(c + h * kNode[i]));
    return s * h;
}

// Panels no longer than the distance to the u = 1 singularity keep the
// Bernstein ellipse parameter >= 3 + sqrt(8), so each panel is converged to
// machine precision; the 1e6 cap just bounds panel count on huge intervals.
double li2_gauss(double lo, double hi) {
    double total = 0.0, a = lo;
    while (a < hi) {
        double b = std::min(hi, a + std::min(1e6, a - 1.0));
        total += gauss10_panel(a, b);
        a = b;
    }
    return total;
}

// Closed 8-point Newton-Cotes on [a, b].
double nc8_panel(double a, double b) {
    static const double w[8] = {751, 3577, 1323, 2989, 2989, 1323, 3577, 751};
    double h = (b - a) / 7.0, s = 0.0;
    for (int i = 0; i < 8; ++i) s += w[i] * integrand(a + h * i);
    return s * (b - a) / 17280.0;
}

constexpr int kMaxDepth = 40;

double nc8_adaptive(double a, double b, double whole, double rel_tol, int depth) {
    if (depth > kMaxDepth)
        throw std::runtime_error("li2_interval: adaptive bisection exceeded depth " +
                                 std::to_string(kMaxDepth) + " on [" + std::to_string(a) + ", " +
                                 std::to_string(b) + "] without reaching tolerance");
    double m = 0.5 * (a + b);
    double left = nc8_panel(a, m), right = nc8_panel(m, b);
    if (std::abs(whole - (left + right)) <= rel_tol * std::abs(whole)) return left + right;
    return nc8_adaptive(a, m, left, rel_tol, depth + 1) +
           nc8_adaptive(m, b, right, rel_tol, depth + 1);
}

}  // namespace

double li2_interval(double lo, double hi, const QuadratureMethod& method) {
    if (!(lo >= 2.0) || !(hi >= lo))
        throw std::invalid_argument("li2_interval: requires 2 <= lo <= hi, got [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if (lo == hi) return 0.0;
    switch (method.kind) {
        case QuadKind::Gauss10:
            return li2_gauss(lo, hi);
        case QuadKind::NewtonCotes8Adaptive: {
            if (!(method.tolerance > 0.0))
                throw std::invalid_argument("li2_interval: adaptive tolerance must be positive");
            return nc8_adaptive(lo, hi, nc8_panel(lo, hi), method.tolerance, 0);
        }
    }
    throw std::logic_error("li2_interval: unknown quadrature kind");
}

double li2_offset(int a, const QuadratureMethod& method) {
    if (a != 2 && a != 5)
        throw std::invalid_argument("li2_offset: lower limit must be 2 or 5, got " + std::to_string(a));
    return a == 2 ? 0.0 : li2_interval(2.0, static_cast<double>(a), method);
}

}  // namespace twincensus

#pragma once

#include <cstdint>

namespace twincensus {

enum class QuadKind { Gauss10, NewtonCotes8Adaptive };

struct QuadratureMethod {
    QuadKind kind = QuadKind::Gauss10;
    double tolerance = 1e-12;  // relative, per panel; adaptive kind only
};

// Neumaier-compensated accumulator. Millions of small quadrature increments
// must not wash out the O(1) oscillation the census watches, so the lost
// low-order bits are carried in `compensation`.
struct CompensatedSum {
    double primary = 0.0;
    double compensation = 0.0;

    void add(double v);
    double value() const { return primary + compensation; }
};

struct TwinConstant {
    double value = 0.0;
    double tail_bound = 0.0;  // rigorous bound on the omitted factors
    std::uint64_t prime_limit = 0;
};

// 2 * prod_{2 < p <= prime_limit} (1 - 1/(p-1)^2), accumulated in long
// double. tail_bound = value * expm1(2/(prime_limit-1)) bounds the distance
// to the full product. Requires prime_limit >= 3.
TwinConstant twin_constant(std::uint64_t prime_limit);

// The constant the census trackers run with: twin_constant(3e10), computed
// once by this module and frozen because a census must not pay a minute of
// sieving at startup. Reproduce with `constant --prime-limit 3e10`. Its
// tail bound satisfies run_census's < 1e-10 requirement; the 1e8 default of
// the constant subcommand does not (tail ~2.6e-8).
TwinConstant census_constant();

// integral_{lo}^{hi} du / log^2 u. Requires 2 <= lo <= hi. Gauss10 splits
// into panels of length <= min(1e6, lo_panel - 1) so the u = 1 singularity
// stays well off each panel's Bernstein ellipse; the adaptive Newton-Cotes
// rule bisects until each split agrees with its parent to `tolerance`
// relative, and throws past depth 40 rather than return a silent wrong value.
double li2_interval(double lo, double hi, const QuadratureMethod& method);

// integral_2^a du / log^2 u under the same method; the a = 2 tracker uses 0.
double li2_offset(int a, const QuadratureMethod& method);

}  // namespace twincensus

#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "ifslab/circle.hpp"
#include "ifslab/errors.hpp"

namespace ifslab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// A word over the symbol alphabet {0,...,k-1}; the empty word is the identity.
// The first symbol is applied first: word (i1,...,in) acts as g_in o ... o g_i1.
using Word = std::vector<std::uint32_t>;

struct ValidationReport {
    bool pass = false;
    double monotonicity_margin = 0.0;  // min lift increment between grid neighbours
    double degree_error = 0.0;         // max |F(t+1) - F(t) - 1| over the grid
    int grid_n = 0;
};

// Orientation-preserving circle homeomorphism represented by a monotone
// degree-1 lift F (F strictly increasing, F(t+1) = F(t) + 1).
//
// Families:
//   Rotation(theta)        F(t) = t + theta
//   Arnold(theta, eps)     F(t) = t + theta + (eps/2pi) sin(2 pi t), |eps| < 1
//   Pwl(points)            monotone piecewise-linear interpolation of circle
//                          pairs (a_i, b_i)
//
// `inverted` marks the formal inverse of the stored map; Rotation and Pwl
// inverses are rewritten in closed form instead.
struct Homeo {
    enum class Kind { Rotation, Arnold, Pwl };

    Kind kind = Kind::Rotation;
    double theta = 0.0;
    double eps = 0.0;
    std::vector<double> px;  // Pwl: breakpoint inputs, strictly increasing in [0,1)
    std::vector<double> py;  // Pwl: unwrapped outputs, strictly increasing, py[0] in [0,1)
    bool inverted = false;

    static Homeo rotation(double theta);
    static Homeo arnold(double theta, double eps);
    // Circle pairs (input, output); throws ValidationError if they do not
    // define a strictly monotone degree-1 lift.
    static Homeo pwl(std::vector<std::pair<double, double>> points);

    // The lift of the forward (non-inverted) map.
    double lift(double t) const;

    double lift_derivative_bound_low(double a, double b, int grid) const;  // min F' proxy on [a,b]
};

namespace detail {

double pwl_lift01(const Homeo& h, double t);      // F on [0,1)
double pwl_inverse01(const Homeo& h, double y);   // F^{-1}(y) for y in [py0, py0+1)
double arnold_inverse(const Homeo& h, double y);  // monotone bisection on the lift

inline double forward_pos(const Homeo& h, double x) {
    switch (h.kind) {
        case Homeo::Kind::Rotation:
            return wrap01(x + h.theta);
        case Homeo::Kind::Arnold:
            return wrap01(x + h.theta + h.eps * (1.0 / kTwoPi) * std::sin(kTwoPi * x));
        case Homeo::Kind::Pwl:
            return wrap01(pwl_lift01(h, x));
    }
    return x;
}

inline double inverse_pos(const Homeo& h, double y) {
    switch (h.kind) {
        case Homeo::Kind::Rotation:
            return wrap01(y - h.theta);
        case Homeo::Kind::Arnold:
            return arnold_inverse(h, y);
        case Homeo::Kind::Pwl:
            return wrap01(pwl_inverse01(h, wrap01(y - h.py.front()) + h.py.front()));
    }
    return y;
}

}  // namespace detail

inline double apply_pos(const Homeo& h, double x) {
    return h.inverted ? detail::inverse_pos(h, x) : detail::forward_pos(h, x);
}

inline CirclePoint apply(const Homeo& h, CirclePoint x) {
    return CirclePoint(apply_pos(h, x.value));
}

// Unique x with apply(h, x) = y. Closed form for Rotation and Pwl; monotone
// bisection (tolerance 1e-13, budget 200 iterations) for Arnold.
inline CirclePoint apply_inverse(const Homeo& h, CirclePoint y) {
    return CirclePoint(h.inverted ? detail::forward_pos(h, y.value)
                                  : detail::inverse_pos(h, y.value));
}

// Formal inverse; closed form where the family permits it.
Homeo inverse(const Homeo& h);

// Image of a closed arc; orientation preservation maps [s,e] to [h(s), h(e)].
inline Arc image_arc(const Homeo& h, const Arc& a) {
    return Arc{apply(h, a.start), apply(h, a.end)};
}

// Grid check of strict monotonicity and the degree-1 identity of the lift.
ValidationReport validate_homeo(const Homeo& h, int grid_n);

}  // namespace ifslab

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "ifslab/circle.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/homeo.hpp"

namespace ifslab {

// Real observable on the circle with a declared Lipschitz constant and an
// optional centering offset: the evaluated function is phi - offset.
//
// Families:
//   Harmonic   phi(x) = sum_j a_j cos(2 pi j x) + b_j sin(2 pi j x), j = 1..J
//   PwlFn      circular piecewise-linear interpolation of (position, value)
struct Observable {
    enum class Kind { Harmonic, PwlFn };

    Kind kind = Kind::Harmonic;
    std::vector<double> cos_coef;  // a_j, j = 1..J
    std::vector<double> sin_coef;  // b_j, j = 1..J
    std::vector<double> fx;        // PwlFn: breakpoint positions, sorted in [0,1)
    std::vector<double> fy;        // PwlFn: values at the breakpoints
    double lipschitz = 0.0;
    double offset = 0.0;

    static Observable harmonic(std::vector<double> cos_coef, std::vector<double> sin_coef,
                               double declared_lipschitz = -1.0);
    static Observable pwl_fn(std::vector<std::pair<double, double>> points,
                             double declared_lipschitz = -1.0);
    static Observable zero() { return harmonic({0.0}, {0.0}); }

    double operator()(CirclePoint x) const { return eval_raw(x.value) - offset; }
    double eval_raw(double x) const;

    // Numeric sup of |phi - offset|: grid maximum padded by the Lipschitz
    // slack of half a grid step, so the result upper-bounds the true norm.
    double sup_norm(int grid_n = 1 << 14) const;

    // Largest |phi(x)-phi(y)| / dist(x,y) observed on a grid of point pairs;
    // validation requires this to stay within the declared constant.
    double lipschitz_ratio(int grid_n = 4096) const;

    Observable centered(double c) const {
        Observable r = *this;
        r.offset += c;
        return r;
    }

    Observable scaled(double s) const;  // s * (phi - offset), Lipschitz scaled too
};

}  // namespace ifslab

#include "ifslab/homeo.hpp"

#include <algorithm>
#include <cmath>

namespace ifslab {

Homeo Homeo::rotation(double theta) {
    Homeo h;
    h.kind = Kind::Rotation;
    h.theta = wrap01(theta);
    return h;
}

Homeo Homeo::arnold(double theta, double eps) {
    Homeo h;
    h.kind = Kind::Arnold;
    h.theta = wrap01(theta);
    h.eps = eps;
    return h;
}

Homeo Homeo::pwl(std::vector<std::pair<double, double>> points) {
    if (points.empty()) throw ValidationError("pwl map needs at least one breakpoint");
    for (auto& [a, b] : points) {
        a = wrap01(a);
        b = wrap01(b);
    }
    std::sort(points.begin(), points.end());
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].first == points[i - 1].first)
            throw ValidationError("pwl map has duplicate input breakpoints");

    Homeo h;
    h.kind = Kind::Pwl;
    h.px.reserve(points.size());
    h.py.reserve(points.size());
    // Unwrap outputs into a monotone lift; the wrapped increments must use up
    // exactly one turn or the data does not describe a degree-1 homeomorphism.
    double acc = points.front().second;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0) {
            double d = wrap01(points[i].second - points[i - 1].second);
            if (d <= 0.0) throw ValidationError("pwl outputs collide; lift not strictly monotone");
            acc += d;
        }
        h.px.push_back(points[i].first);
        h.py.push_back(acc);
    }
    double closing = wrap01(points.front().second - points.back().second);
    if (points.size() > 1 && closing <= 0.0)
        throw ValidationError("pwl outputs collide across the wrap segment");
    double total = (points.size() > 1) ? (acc + closing - points.front().second) : 1.0;
    if (std::abs(total - 1.0) > 1e-9)
        throw ValidationError("pwl outputs wind around more than once; degree != 1");
    return h;
}

namespace detail {

double pwl_lift01(const Homeo& h, double t) {
    t = wrap01(t);
    const auto& px = h.px;
    const auto& py = h.py;
    std::size_t n = px.size();
    if (n == 1) return t + wrap01(py[0] - px[0]);
    // Segments [px[i], px[i+1]) plus the wrap segment [px[n-1], px[0]+1);
    // a point before px[0] is evaluated at t+1 and shifted back by one turn.
    double tt = t;
    std::size_t i;
    if (t < px[0]) {
        tt = t + 1.0;
        i = n - 1;
    } else {
        i = std::size_t(std::upper_bound(px.begin(), px.end(), t) - px.begin()) - 1;
    }
    double a0 = px[i];
    double b0 = py[i];
    double a1 = (i + 1 < n) ? px[i + 1] : px[0] + 1.0;
    double b1 = (i + 1 < n) ? py[i + 1] : py[0] + 1.0;
    double val = b0 + (tt - a0) / (a1 - a0) * (b1 - b0);
    return (tt > t) ? val - 1.0 : val;
}

double pwl_inverse01(const Homeo& h, double y) {
    // pre: y in [py[0], py[0]+1)
    const auto& px = h.px;
    const auto& py = h.py;
    std::size_t n = px.size();
    if (n == 1) return px[0] + (y - py[0]);
    std::size_t i = std::size_t(std::upper_bound(py.begin(), py.end(), y) - py.begin()) - 1;
    double a0 = px[i];
    double b0 = py[i];
    double a1 = (i + 1 < n) ? px[i + 1] : px[0] + 1.0;
    double b1 = (i + 1 < n) ? py[i + 1] : py[0] + 1.0;
    return a0 + (y - b0) / (b1 - b0) * (a1 - a0);
}

double arnold_inverse(const Homeo& h, double y) {
    // F(t) - t lies in [theta - |eps|/2pi, theta + |eps|/2pi]; bracket t there.
    double slack = std::abs(h.eps) * (1.0 / kTwoPi) + 1e-9;
    double lo = y - h.theta - slack;
    double hi = y - h.theta + slack;
    auto lift = [&](double t) { return t + h.theta + h.eps * (1.0 / kTwoPi) * std::sin(kTwoPi * t); };
    double flo = lift(lo) - y;
    double fhi = lift(hi) - y;
    if (flo > 0.0 || fhi < 0.0)
        throw ConvergenceFailure("arnold inverse: bracket does not straddle target (invalid lift?)");
    int budget = 200;
    while (hi - lo > 1e-13) {
        if (--budget < 0) throw ConvergenceFailure("arnold inverse: bisection budget exhausted");
        double mid = 0.5 * (lo + hi);
        if (lift(mid) - y <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return wrap01(0.5 * (lo + hi));
}

}  // namespace detail

double Homeo::lift(double t) const {
    switch (kind) {
        case Kind::Rotation:
            return t + theta;
        case Kind::Arnold:
            return t + theta + eps * (1.0 / kTwoPi) * std::sin(kTwoPi * t);
        case Kind::Pwl: {
            double n = std::floor(t);
            return detail::pwl_lift01(*this, t - n) + n;
        }
    }
    return t;
}

double Homeo::lift_derivative_bound_low(double a, double b, int grid) const {
    double lo = 1e300;
    for (int i = 0; i + 1 <= grid; ++i) {
        double t0 = a + (b - a) * i / grid;
        double t1 = a + (b - a) * (i + 1) / grid;
        lo = std::min(lo, (lift(t1) - lift(t0)) / (t1 - t0));
    }
    return lo;
}

Homeo inverse(const Homeo& h) {
    switch (h.kind) {
        case Homeo::Kind::Rotation:
            return Homeo::rotation(-h.theta);
        case Homeo::Kind::Pwl: {
            std::vector<std::pair<double, double>> swapped;
            swapped.reserve(h.px.size());
            for (std::size_t i = 0; i < h.px.size(); ++i)
                swapped.emplace_back(wrap01(h.py[i]), h.px[i]);
            return Homeo::pwl(std::move(swapped));
        }
        case Homeo::Kind::Arnold: {
            Homeo inv = h;
            inv.inverted = !inv.inverted;
            return inv;
        }
    }
    return h;
}

ValidationReport validate_homeo(const Homeo& h, int grid_n) {
    ValidationReport r;
    r.grid_n = grid_n;
    if (grid_n < 2) return r;
    const Homeo& fwd = h;  // validation always inspects the stored lift
    double margin = 1e300;
    double degree_err = 0.0;
    double prev = fwd.lift(0.0);
    for (int i = 1; i <= grid_n; ++i) {
        double t = double(i) / grid_n;
        double v = fwd.lift(t);
        margin = std::min(margin, v - prev);
        prev = v;
    }
    for (int i = 0; i < grid_n; ++i) {
        double t = double(i) / grid_n;
        degree_err = std::max(degree_err, std::abs(fwd.lift(t + 1.0) - fwd.lift(t) - 1.0));
    }
    r.monotonicity_margin = margin;
    r.degree_error = degree_err;
    r.pass = margin > 0.0 && degree_err < 1e-9;
    return r;
}

}  // namespace ifslab

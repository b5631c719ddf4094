#include "ifslab/observable.hpp"

#include <algorithm>
#include <cmath>

namespace ifslab {

Observable Observable::harmonic(std::vector<double> cos_coef, std::vector<double> sin_coef,
                                double declared_lipschitz) {
    Observable f;
    f.kind = Kind::Harmonic;
    f.cos_coef = std::move(cos_coef);
    f.sin_coef = std::move(sin_coef);
    if (f.cos_coef.size() < f.sin_coef.size()) f.cos_coef.resize(f.sin_coef.size(), 0.0);
    if (f.sin_coef.size() < f.cos_coef.size()) f.sin_coef.resize(f.cos_coef.size(), 0.0);
    if (declared_lipschitz >= 0.0) {
        f.lipschitz = declared_lipschitz;
    } else {
        // |phi'| <= sum_j 2 pi j (|a_j| + |b_j|)
        double l = 0.0;
        for (std::size_t j = 0; j < f.cos_coef.size(); ++j)
            l += kTwoPi * double(j + 1) * (std::abs(f.cos_coef[j]) + std::abs(f.sin_coef[j]));
        f.lipschitz = l;
    }
    return f;
}

Observable Observable::pwl_fn(std::vector<std::pair<double, double>> points,
                              double declared_lipschitz) {
    if (points.empty()) throw ValidationError("pwl observable needs at least one breakpoint");
    for (auto& [a, b] : points) a = wrap01(a);
    std::sort(points.begin(), points.end());
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].first == points[i - 1].first)
            throw ValidationError("pwl observable has duplicate breakpoints");
    Observable f;
    f.kind = Kind::PwlFn;
    for (auto& [a, b] : points) {
        f.fx.push_back(a);
        f.fy.push_back(b);
    }
    if (declared_lipschitz >= 0.0) {
        f.lipschitz = declared_lipschitz;
    } else {
        double l = 0.0;
        std::size_t n = f.fx.size();
        for (std::size_t i = 0; i < n && n > 1; ++i) {
            double dx = (i + 1 < n) ? f.fx[i + 1] - f.fx[i] : f.fx[0] + 1.0 - f.fx[i];
            double dy = (i + 1 < n) ? f.fy[i + 1] - f.fy[i] : f.fy[0] - f.fy[i];
            if (dx > 0.0) l = std::max(l, std::abs(dy) / dx);
        }
        f.lipschitz = l;
    }
    return f;
}

double Observable::eval_raw(double x) const {
    if (kind == Kind::Harmonic) {
        double s = 0.0;
        for (std::size_t j = 0; j < cos_coef.size(); ++j) {
            double w = kTwoPi * double(j + 1) * x;
            if (cos_coef[j] != 0.0) s += cos_coef[j] * std::cos(w);
            if (sin_coef[j] != 0.0) s += sin_coef[j] * std::sin(w);
        }
        return s;
    }
    // PwlFn
    x = wrap01(x);
    std::size_t n = fx.size();
    if (n == 1) return fy[0];
    double tt = x;
    std::size_t i;
    if (x < fx[0]) {
        tt = x + 1.0;
        i = n - 1;
    } else {
        i = std::size_t(std::upper_bound(fx.begin(), fx.end(), x) - fx.begin()) - 1;
    }
    double a0 = fx[i];
    double b0 = fy[i];
    double a1 = (i + 1 < n) ? fx[i + 1] : fx[0] + 1.0;
    double b1 = (i + 1 < n) ? fy[i + 1] : fy[0];
    return b0 + (tt - a0) / (a1 - a0) * (b1 - b0);
}

double Observable::sup_norm(int grid_n) const {
    if (kind == Kind::PwlFn) {
        double m = 0.0;
        for (double v : fy) m = std::max(m, std::abs(v - offset));
        return m;
    }
    double m = 0.0;
    for (int i = 0; i < grid_n; ++i) m = std::max(m, std::abs(eval_raw(double(i) / grid_n) - offset));
    return m + lipschitz * 0.5 / grid_n;
}

double Observable::lipschitz_ratio(int grid_n) const {
    double worst = 0.0;
    for (int i = 0; i < grid_n; ++i) {
        CirclePoint a(double(i) / grid_n);
        CirclePoint b(double(i + 1) / grid_n);
        double d = circ_dist(a, b);
        if (d > 0.0) worst = std::max(worst, std::abs((*this)(a) - (*this)(b)) / d);
    }
    return worst;
}

Observable Observable::scaled(double s) const {
    Observable r = *this;
    if (kind == Kind::Harmonic) {
        for (auto& c : r.cos_coef) c *= s;
        for (auto& c : r.sin_coef) c *= s;
    } else {
        for (auto& v : r.fy) v *= s;
    }
    r.offset *= s;
    r.lipschitz *= std::abs(s);
    return r;
}

}  // namespace ifslab

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace ifslab {

inline double mean_of(std::span<const double> v) {
    long double s = 0.0L;
    for (double x : v) s += x;
    return double(s / (v.empty() ? 1 : v.size()));
}

inline double variance_of(std::span<const double> v) {  // unbiased
    if (v.size() < 2) return 0.0;
    long double m = mean_of(v);
    long double s = 0.0L;
    for (double x : v) s += ((long double)x - m) * ((long double)x - m);
    return double(s / (v.size() - 1));
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

// Wilson score interval for a binomial proportion.
struct WilsonInterval {
    double low;
    double high;
};

inline WilsonInterval wilson_interval(long successes, long trials, double z = 1.959963985) {
    if (trials <= 0) return {0.0, 1.0};
    double p = double(successes) / double(trials);
    double n = double(trials);
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// Survival function of the Kolmogorov distribution, Q(lambda) = P(K > lambda),
// with the small-lambda theta-series branch for accuracy near zero.
inline double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        double y = std::exp(-1.23370055013616983 / (lambda * lambda));  // exp(-pi^2/(8 lambda^2))
        double cdf = 2.50662827463100050 / lambda * (y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49));
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= 64; ++k) {
        double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

// One-sample KS statistic of `samples` against a caller-supplied CDF.
template <class Cdf>
double ks_statistic(std::span<const double> samples, const Cdf& cdf) {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    double n = double(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double c = cdf(sorted[i]);
        d = std::max(d, std::max((double(i) + 1.0) / n - c, c - double(i) / n));
    }
    return d;
}

// Upper tail of chi-square via the Wilson-Hilferty cube-root normal mapping.
inline double chi2_survival(double x, double dof) {
    if (x <= 0.0) return 1.0;
    double t = std::cbrt(x / dof);
    double mu = 1.0 - 2.0 / (9.0 * dof);
    double sd = std::sqrt(2.0 / (9.0 * dof));
    return 1.0 - normal_cdf((t - mu) / sd);
}

// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
    double mx = mean_of(x), my = mean_of(y);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace ifslab

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ifslab/diagnostics.hpp"
#include "ifslab/ifs.hpp"

namespace ifslab {

// Centers f by its mean under the supplied stationary estimate.
Observable center_observable(const Observable& f, const EmpiricalMeasure& mu_star_hat);

// Drift of the centering constant between two independent stationary
// estimates; reported next to every CLT result.
double centering_error(const Observable& f, const EmpiricalMeasure& a, const EmpiricalMeasure& b);

// One replicate of the Birkhoff sum along a seeded symbol path, starting at
// the first image: sum_{l=1..n} f(X_l), X_0 = x.
double birkhoff_sum(const Ifs& ifs, const Observable& f, CirclePoint x, int n, std::uint64_t seed);

enum class StartMode { Stationary, Fixed };

// Independent replicates of S_n/sqrt(n). Stationary mode draws each start
// from a fresh burn-in segment; fixed mode starts every replicate at x.
std::vector<double> sn_star_samples(const Ifs& ifs, const Observable& f, int n, int replicates,
                                    int burn_in, StartMode mode, CirclePoint x, std::uint64_t seed,
                                    int workers = 1);

struct Sigma2 {
    double raw = 0.0;       // second moment (mean taken as zero)
    double centered = 0.0;  // unbiased variance with the sample mean removed
};

// Throws DegenerateSample when the spread is below resolution.
Sigma2 sigma2_estimate(std::span<const double> samples);

struct MWReport {
    std::vector<int> n_values;
    std::vector<double> a_n;            // estimates of ||sum_{k<=n} U^k f||_{L2}
    double beta_growth_hat = 0.0;       // log-log slope over the upper half of n
    std::vector<double> partial_series; // partial sums of n^{-3/2} a_n
    int x_sample_count = 0;
    DualMode mode = DualMode::Exact;
    std::uint64_t seed = 0;
};

// Summability statistic of the dual partial sums: a_n is the empirical
// L2(mu_star_hat) norm of h_n(x) = sum_{k<=n} U^k f(x), evaluated exactly per
// sampled x (or by Monte Carlo in mc mode with the documented extra noise).
MWReport mw_statistic(const Ifs& ifs, const Observable& f, std::span<const int> n_list,
                      int x_count, std::uint64_t seed, DualMode mode,
                      const EmpiricalMeasure& mu_star_hat,
                      std::uint64_t node_budget = kDefaultNodeBudget, int mc_samples = 20000,
                      int workers = 1);

// Exact pointwise partial-sum gap |sum_{k<=n} (U^k f(x) - U^k f(y))| from one
// shared tree, per n.
std::vector<std::pair<int, double>> uniform_sum_gap(const Ifs& ifs, const Observable& f,
                                                    CirclePoint x, CirclePoint y,
                                                    std::span<const int> n_list,
                                                    std::uint64_t node_budget = kDefaultNodeBudget);

struct KsResult {
    double ks_stat = 0.0;
    double p_value = 0.0;
};

// One-sample Kolmogorov-Smirnov test against N(0, sigma2), asymptotic p-value.
KsResult normality_test(std::span<const double> samples, double sigma2);

struct CharfnGapTable {
    std::vector<int> n_values;
    std::vector<double> t_values;
    std::vector<std::vector<double>> gap;  // [n][t]
};

// |E exp(it S_n*) fixed-start - E exp(it S_n*) stationary-start| from two
// replicate sets sharing paths across the n checkpoints.
CharfnGapTable charfn_gap(const Ifs& ifs, const Observable& f, CirclePoint x,
                          std::span<const int> n_list, std::span<const double> t_list,
                          int replicates, int burn_in, std::uint64_t seed, int workers = 1);

struct CLTReport {
    int n = 0;
    int replicates = 0;
    double sigma2_hat = 0.0;
    double ks_stat = 0.0;
    double p_value = 0.0;
    double centering_error = 0.0;
    StartMode start_mode = StartMode::Stationary;
    CirclePoint start_x;
};

}  // namespace ifslab

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ifslab/ifs.hpp"

namespace ifslab {

enum class DualMode { Exact, MonteCarlo };

struct ProfileRow {
    double delta = 0.0;
    double sup_gap = 0.0;          // sup over n <= n_max
    std::vector<double> per_n;     // gap at each n = 1..n_max
};

struct EquicontinuityProfile {
    std::vector<ProfileRow> rows;
    DualMode mode = DualMode::Exact;
    bool cesaro = false;
    int n_max = 0;
};

// Equicontinuity profile of the dual iterates at x: for each delta the
// largest |U^n f(y) - U^n f(x)| over n <= n_max and y = x +- delta. Exact
// mode shares one word tree between the compared points; Monte Carlo mode
// couples them through common symbol streams.
EquicontinuityProfile e_property_profile(const Ifs& ifs, const Observable& f, CirclePoint x,
                                         std::span<const double> deltas, int n_max, DualMode mode,
                                         int samples, std::uint64_t seed,
                                         std::uint64_t node_budget = kDefaultNodeBudget,
                                         int workers = 1);

// Same comparison for the Cesaro averages (1/n) sum_{k<=n} U^k f.
EquicontinuityProfile cesaro_profile(const Ifs& ifs, const Observable& f, CirclePoint x,
                                     std::span<const double> deltas, int n_max, DualMode mode,
                                     int samples, std::uint64_t seed,
                                     std::uint64_t node_budget = kDefaultNodeBudget,
                                     int workers = 1);

// Evidence that arc images contract geometrically along random words:
// q_hat estimates the per-step rate on contracting paths, mass_hat the
// probability of staying below the absolute envelope q_hat^n for the whole
// depth (the tail event the synchronization argument needs).
struct ContractionCertificate {
    Arc I;
    double q_hat = 1.0;
    double q_ci_high = 1.0;     // 95% upper bound on exp(mean slope)
    int depth = 0;
    double mass_hat = 0.0;      // fraction of paths inside the envelope
    double mass_ci_low = 0.0;   // 95% Wilson lower bound
    double mass_ci_high = 0.0;
    int contracting_paths = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    int m = -1;                 // filled by hitting_parameters when requested
    double hit_mass_hat = 0.0;
};

ContractionCertificate contraction_certificate(const Ifs& ifs, std::span<const Arc> candidates,
                                               int depth, int trials, std::uint64_t seed,
                                               int workers = 1);

// Arcs of the given length centered on a uniform grid.
std::vector<Arc> default_candidate_arcs(int count = 16, double length = 0.1);

struct HittingResult {
    int m = 0;
    double hit_mass_hat = 0.0;  // min over grid points of the length-m hit mass
    bool exact = true;
};

// Smallest m <= m_max with positive length-m hitting mass of I from every
// grid point; exact word enumeration while k^m fits the budget, Monte Carlo
// afterwards.
HittingResult hitting_parameters(const Ifs& ifs, const Arc& I, int m_max, int x_grid,
                                 std::uint64_t seed, std::uint64_t node_budget = kDefaultNodeBudget,
                                 int mc_samples = 4096, int workers = 1);

struct MinimalityEvidence {
    double max_gap = 1.0;
    bool verdict = false;
    std::size_t orbit_points = 0;
    bool exact = true;
};

// Orbit of x0 under words of length <= depth (exact while affordable, random
// words otherwise); the verdict is evidence, not proof.
MinimalityEvidence minimality_evidence(const Ifs& ifs, CirclePoint x0, int depth, double eps,
                                       std::uint64_t node_budget = kDefaultNodeBudget,
                                       std::uint64_t seed = 0);

// W1 between the empirical laws of X_n^x and X_n^y over common symbol
// streams, per n; decay is the asymptotic-stability signature.
std::vector<std::pair<int, double>> stability_gap(const Ifs& ifs, CirclePoint x, CirclePoint y,
                                                  std::span<const int> n_list, int samples,
                                                  std::uint64_t seed, int workers = 1);

// Max pairwise W1 of single-trajectory occupation measures from the given
// starts (burn-in n/10 dropped).
double uniqueness_evidence(const Ifs& ifs, std::span<const CirclePoint> starts, long n,
                           std::uint64_t seed, int workers = 1);

}  // namespace ifslab

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ifslab/circle.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/homeo.hpp"
#include "ifslab/measure.hpp"
#include "ifslab/observable.hpp"
#include "ifslab/rng.hpp"

namespace ifslab {

inline constexpr std::uint64_t kDefaultNodeBudget = std::uint64_t(1) << 24;
inline constexpr std::size_t kDefaultAtomCap = 1'000'000;

// Finite family of circle homeomorphisms with a strictly positive probability
// vector. Owns the Markov operator P (markov_push) and its dual U (dual_*).
struct Ifs {
    std::vector<Homeo> maps;
    std::vector<double> probs;

    static Ifs make(std::vector<Homeo> maps, std::vector<double> probs);
    std::size_t k() const { return maps.size(); }
    bool equal_weights() const;

    std::uint32_t draw_symbol(RngStream& g) const {
        double u = g.next_double();
        double c = 0.0;
        for (std::uint32_t i = 0; i + 1 < probs.size(); ++i) {
            c += probs[i];
            if (u < c) return i;
        }
        return std::uint32_t(probs.size() - 1);
    }
};

// Applies the word left to right: first symbol first.
CirclePoint compose_word(const Ifs& ifs, const Word& w, CirclePoint x);

// P mu = sum_i p_i (mu o g_i^{-1}); every atom splits into k images.
EmpiricalMeasure markov_push(const Ifs& ifs, const EmpiricalMeasure& mu,
                             std::size_t atom_cap = kDefaultAtomCap);

// U^d f(x) for d = 0..n by one full traversal of the depth-n word tree.
// Throws NodeBudgetExceeded when k^n exceeds the budget.
std::vector<double> dual_levels(const Ifs& ifs, const Observable& f, CirclePoint x, int n,
                                std::uint64_t node_budget = kDefaultNodeBudget);

// Same traversal tracking many start points through identical words;
// result[d][i] = U^d f(x_i).
std::vector<std::vector<double>> dual_levels_multi(const Ifs& ifs, const Observable& f,
                                                   std::span<const CirclePoint> xs, int n,
                                                   std::uint64_t node_budget = kDefaultNodeBudget,
                                                   int workers = 1);

// Per-level difference U^d f(x) - U^d f(y) accumulated node-by-node over the
// shared tree (the difference carries no statistical or cancellation noise).
std::vector<double> dual_levels_diff(const Ifs& ifs, const Observable& f, CirclePoint x,
                                     CirclePoint y, int n,
                                     std::uint64_t node_budget = kDefaultNodeBudget);

double dual_exact(const Ifs& ifs, const Observable& f, CirclePoint x, int n,
                  std::uint64_t node_budget = kDefaultNodeBudget);

// Partial sums sum_{d=1..m} U^d f(x) for m = 1..n from one traversal.
std::vector<double> dual_sum_exact(const Ifs& ifs, const Observable& f, CirclePoint x, int n,
                                   std::uint64_t node_budget = kDefaultNodeBudget);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Monte Carlo estimate of U^n f(x) over independent symbol paths.
McEstimate dual_mc(const Ifs& ifs, const Observable& f, CirclePoint x, int n, int samples,
                   std::uint64_t seed, int workers = 1);

// X_0 = x0, X_{t+1} = g_{i_t}(X_t); returns n+1 states.
std::vector<CirclePoint> simulate_chain(const Ifs& ifs, CirclePoint x0, int n, std::uint64_t seed);

// Occupation sample of the chain after burn-in, every thinning-th state.
EmpiricalMeasure stationary_sample(const Ifs& ifs, int burn_in, int count, int thinning,
                                   std::uint64_t seed, CirclePoint x0 = CirclePoint(0.0));

// Long-run occupation measure accumulated into equal-width bins. Averaging
// over every state of a length-`steps` run drives the statistical error of
// chain averages down with the full run length, which per-sample thinning
// cannot; the binning keeps the atom count bounded.
EmpiricalMeasure occupation_measure(const Ifs& ifs, long burn_in, long steps, int bins,
                                    std::uint64_t seed, CirclePoint x0 = CirclePoint(0.0));

// Same probability vector, each map replaced by its inverse.
Ifs inverse_system(const Ifs& ifs);

// Replaces rational probabilities m_i/n by m_i copies of the map at weight
// 1/n each; candidate denominators are tried in order.
Ifs uniformize(const Ifs& ifs, std::span<const int> denominators);

// One application of the support multifunction: {g_i(x) : x in A, i <= k},
// deduplicated within 1e-12.
std::vector<CirclePoint> support_step(const Ifs& ifs, std::span<const CirclePoint> A);

}  // namespace ifslab

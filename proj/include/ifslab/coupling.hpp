#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ifslab/ifs.hpp"

namespace ifslab {

// One block of the pairing construction: a length-m word pair (success means
// the drawn word steered the x-chain into I and its rank partner steered the
// y-chain into I), followed by a shared tail that both chains ride while the
// image of I stays under the geometric envelope q^t.
struct CouplingBlock {
    Word w;
    Word w_prime;
    bool success = false;
    int tail_len = 0;
    bool tail_survived = false;
};

struct CouplingTranscript {
    CirclePoint x, y;
    Arc I;
    int m = 0;
    double q = 0.0;
    int tail_horizon = 0;
    std::vector<CouplingBlock> blocks;
    int level = 0;               // blocks started; the index in the gap bound
    Word omega, omega_prime;     // equal length, >= requested n when coupled
    bool coupled = false;
    int coupled_at_block = -1;   // 1-based block index, -1 when never coupled
    std::uint64_t seed = 0;

    double gamma() const { return 1.0 / (1.0 - q); }
};

// All length-m words steering x into I, in lexicographic order (first symbol
// most significant). Requires an equal-weight system.
std::vector<Word> success_words(const Ifs& ifs, CirclePoint x, const Arc& I, int m,
                                std::uint64_t word_budget = std::uint64_t(1) << 20);

// Block-by-block construction of the paired words (omega, omega_prime): the
// drawn word keeps its uniform law; its partner follows the rank bijection on
// the truncated success sets (complement ranks pair the failure words).
CouplingTranscript pairing_sampler(const Ifs& ifs, CirclePoint x, CirclePoint y, const Arc& I,
                                   int m, int n, double q, int tail_horizon, std::uint64_t seed,
                                   std::uint64_t word_budget = std::uint64_t(1) << 20);

struct P3Result {
    bool ok = true;
    double worst_ratio = 0.0;  // max over prefixes of |gap| / bound
    int violations = 0;
};

// Checks |S_n f(omega, x) - S_n f(omega', y)| <= level(n) (2(m+1)||f||_inf + gamma)
// at every prefix; f is rescaled to Lipschitz constant <= 1 first.
P3Result verify_p3(const CouplingTranscript& t, const Ifs& ifs, const Observable& f);

struct SurvivalRow {
    int l = 0;
    double empirical = 0.0;  // fraction not coupled within the first l blocks
    double envelope = 0.0;   // (1 - alpha_hat)^l
};

std::vector<SurvivalRow> block_tail_stats(std::span<const CouplingTranscript> transcripts,
                                          double alpha_hat, int l_max = 20);

struct PairedGapRow {
    int n = 0;
    double mean_abs = 0.0;
    double mean_signed = 0.0;
    double stderr_abs = 0.0;
    double stderr_signed = 0.0;
};

// Monte Carlo over pairing transcripts of the Birkhoff-sum gap between the
// paired words; the signed mean estimates the exact dual partial-sum gap.
std::vector<PairedGapRow> paired_sum_gap(const Ifs& ifs, const Observable& f, CirclePoint x,
                                         CirclePoint y, std::span<const int> n_list, int replicates,
                                         const Arc& I, int m, double q, int tail_horizon,
                                         std::uint64_t seed, int workers = 1);

}  // namespace ifslab

#include "ifslab/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "ifslab/parallel.hpp"
#include "ifslab/stats.hpp"

namespace ifslab {

namespace {

std::uint64_t lex_index(const Word& w, std::size_t k) {
    std::uint64_t idx = 0;
    for (std::uint32_t s : w) idx = idx * k + s;
    return idx;
}

Word word_from_index(std::uint64_t idx, std::size_t k, int m) {
    Word w(static_cast<std::size_t>(m));
    for (int i = m - 1; i >= 0; --i) {
        w[std::size_t(i)] = std::uint32_t(idx % k);
        idx /= k;
    }
    return w;
}

// Index of w within the lex-sorted complement of `members` (member indices
// sorted ascending).
std::uint64_t complement_rank(std::uint64_t widx, const std::vector<std::uint64_t>& members) {
    std::uint64_t below =
        std::uint64_t(std::upper_bound(members.begin(), members.end(), widx) - members.begin());
    return widx - below;
}

// The rank-th word (0-based, lex order) outside `members`.
std::uint64_t complement_pick(std::uint64_t rank, const std::vector<std::uint64_t>& members) {
    std::uint64_t target = rank;
    for (std::uint64_t mdx : members) {
        if (mdx <= target)
            ++target;
        else
            break;
    }
    return target;
}

}  // namespace

std::vector<Word> success_words(const Ifs& ifs, CirclePoint x, const Arc& I, int m,
                                std::uint64_t word_budget) {
    if (!ifs.equal_weights())
        throw ValidationError("success_words needs an equal-weight system; uniformize first");
    double total = std::pow(double(ifs.k()), double(m));
    if (total > double(word_budget))
        throw NodeBudgetExceeded("k^m exceeds the word budget");
    std::vector<Word> out;
    std::uint64_t count = std::uint64_t(total);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        Word w = word_from_index(idx, ifs.k(), m);
        if (arc_contains(I, compose_word(ifs, w, x))) out.push_back(std::move(w));
    }
    if (out.empty()) throw EmptySuccessSet("no length-m word steers the point into the arc");
    return out;
}

CouplingTranscript pairing_sampler(const Ifs& ifs, CirclePoint x, CirclePoint y, const Arc& I,
                                   int m, int n, double q, int tail_horizon, std::uint64_t seed,
                                   std::uint64_t word_budget) {
    if (!ifs.equal_weights())
        throw ValidationError("pairing_sampler needs an equal-weight system; uniformize first");
    if (!(arc_length(I) > 0.0)) throw ValidationError("pairing arc must have positive length");
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("pairing needs q in (0,1)");

    CouplingTranscript t;
    t.x = x;
    t.y = y;
    t.I = I;
    t.m = m;
    t.q = q;
    t.tail_horizon = tail_horizon;
    t.seed = seed;

    RngStream g(salt_seed(seed, 0x70616972ull /* "pair" */), 0);
    std::uint32_t k = std::uint32_t(ifs.k());
    CirclePoint px = x, py = y;

    while (int(t.omega.size()) < n && !t.coupled) {
        auto gx = success_words(ifs, px, I, m, word_budget);
        auto gy = success_words(ifs, py, I, m, word_budget);
        std::size_t common = std::min(gx.size(), gy.size());
        if (common == 0)
            throw NonPositiveCommonCardinality("truncated success sets are empty");
        std::vector<std::uint64_t> gx_idx(common), gy_idx(common);
        for (std::size_t i = 0; i < common; ++i) {
            gx_idx[i] = lex_index(gx[i], k);
            gy_idx[i] = lex_index(gy[i], k);
        }

        CouplingBlock blk;
        blk.w.resize(std::size_t(m));
        for (int i = 0; i < m; ++i) blk.w[std::size_t(i)] = g.next_below(k);
        std::uint64_t widx = lex_index(blk.w, k);
        auto pos = std::lower_bound(gx_idx.begin(), gx_idx.end(), widx);
        blk.success = pos != gx_idx.end() && *pos == widx;
        if (blk.success) {
            blk.w_prime = word_from_index(gy_idx[std::size_t(pos - gx_idx.begin())], k, m);
        } else {
            std::uint64_t rank = complement_rank(widx, gx_idx);
            blk.w_prime = word_from_index(complement_pick(rank, gy_idx), k, m);
        }
        t.omega.insert(t.omega.end(), blk.w.begin(), blk.w.end());
        t.omega_prime.insert(t.omega_prime.end(), blk.w_prime.begin(), blk.w_prime.end());
        px = compose_word(ifs, blk.w, px);
        py = compose_word(ifs, blk.w_prime, py);
        ++t.level;

        if (blk.success) {
            // Both chains sit inside I; ride identical symbols while the
            // image of I stays under the envelope q^t.
            Arc a = I;
            double env = 1.0;
            bool broken = false;
            while (blk.tail_len < tail_horizon && int(t.omega.size()) < n) {
                std::uint32_t s = g.next_below(k);
                t.omega.push_back(s);
                t.omega_prime.push_back(s);
                const Homeo& gmap = ifs.maps[s];
                px = apply(gmap, px);
                py = apply(gmap, py);
                a = image_arc(gmap, a);
                ++blk.tail_len;
                env *= q;
                if (arc_length(a) > env) {
                    broken = true;  // the cylinder closes; a new block begins
                    break;
                }
            }
            if (!broken) {
                blk.tail_survived = true;
                t.coupled = true;
                t.coupled_at_block = t.level;
            }
        }
        t.blocks.push_back(std::move(blk));
    }
    // Identical symbols after coupling.
    while (int(t.omega.size()) < n) {
        std::uint32_t s = g.next_below(k);
        t.omega.push_back(s);
        t.omega_prime.push_back(s);
    }
    return t;
}

P3Result verify_p3(const CouplingTranscript& t, const Ifs& ifs, const Observable& f) {
    Observable phi = (f.lipschitz > 1.0) ? f.scaled(1.0 / f.lipschitz) : f;
    double bound_unit = 2.0 * (t.m + 1) * phi.sup_norm() + t.gamma();

    // Level at each position: the index of the block covering it; positions
    // past the last block keep the final level.
    std::size_t len = t.omega.size();
    std::vector<int> level(len, t.level);
    std::size_t pos = 0;
    for (std::size_t b = 0; b < t.blocks.size(); ++b) {
        std::size_t blen = t.blocks[b].w.size() + std::size_t(t.blocks[b].tail_len);
        for (std::size_t i = 0; i < blen && pos < len; ++i, ++pos) level[pos] = int(b) + 1;
    }

    P3Result r;
    double sx = 0.0, sy = 0.0;
    CirclePoint cx = t.x, cy = t.y;
    for (std::size_t i = 0; i < len; ++i) {
        cx = apply(ifs.maps[t.omega[i]], cx);
        cy = apply(ifs.maps[t.omega_prime[i]], cy);
        sx += phi(cx);
        sy += phi(cy);
        double gap = std::abs(sx - sy);
        double bound = level[i] * bound_unit;
        double ratio = gap / bound;
        r.worst_ratio = std::max(r.worst_ratio, ratio);
        if (gap > bound * (1.0 + 1e-12) + 1e-12) {
            r.ok = false;
            ++r.violations;
        }
    }
    return r;
}

std::vector<SurvivalRow> block_tail_stats(std::span<const CouplingTranscript> transcripts,
                                          double alpha_hat, int l_max) {
    if (transcripts.size() < 100)
        throw ValidationError("block_tail_stats needs at least 100 transcripts");
    std::vector<SurvivalRow> rows;
    double T = double(transcripts.size());
    for (int l = 1; l <= l_max; ++l) {
        long coupled_by_l = 0;
        for (const auto& t : transcripts)
            if (t.coupled && t.coupled_at_block <= l) ++coupled_by_l;
        SurvivalRow row;
        row.l = l;
        row.empirical = 1.0 - double(coupled_by_l) / T;
        row.envelope = std::pow(1.0 - alpha_hat, l);
        rows.push_back(row);
    }
    return rows;
}

std::vector<PairedGapRow> paired_sum_gap(const Ifs& ifs, const Observable& f, CirclePoint x,
                                         CirclePoint y, std::span<const int> n_list, int replicates,
                                         const Arc& I, int m, double q, int tail_horizon,
                                         std::uint64_t seed, int workers) {
    std::vector<int> ns(n_list.begin(), n_list.end());
    std::sort(ns.begin(), ns.end());
    int n_max = ns.back();
    std::uint64_t op_seed = salt_seed(seed, 0x70676170ull /* "pgap" */);

    std::vector<std::vector<double>> gaps(static_cast<std::size_t>(replicates));
    parallel_for(std::size_t(replicates), workers, [&](std::size_t r) {
        auto t = pairing_sampler(ifs, x, y, I, m, n_max, q, tail_horizon, op_seed + r);
        gaps[r].assign(ns.size(), 0.0);
        double sx = 0.0, sy = 0.0;
        CirclePoint cx = x, cy = y;
        std::size_t next = 0;
        for (int l = 1; l <= n_max; ++l) {
            cx = apply(ifs.maps[t.omega[std::size_t(l - 1)]], cx);
            cy = apply(ifs.maps[t.omega_prime[std::size_t(l - 1)]], cy);
            sx += f(cx);
            sy += f(cy);
            while (next < ns.size() && ns[next] == l) gaps[r][next++] = sx - sy;
        }
    });

    std::vector<PairedGapRow> rows;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        std::vector<double> signed_v(static_cast<std::size_t>(replicates)), abs_v(static_cast<std::size_t>(replicates));
        for (int r = 0; r < replicates; ++r) {
            signed_v[std::size_t(r)] = gaps[std::size_t(r)][i];
            abs_v[std::size_t(r)] = std::abs(gaps[std::size_t(r)][i]);
        }
        PairedGapRow row;
        row.n = ns[i];
        row.mean_signed = mean_of(signed_v);
        row.mean_abs = mean_of(abs_v);
        row.stderr_signed = std::sqrt(variance_of(signed_v) / replicates);
        row.stderr_abs = std::sqrt(variance_of(abs_v) / replicates);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ifslab

#include "ifslab/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ifslab/parallel.hpp"

namespace ifslab {

Ifs Ifs::make(std::vector<Homeo> maps, std::vector<double> probs) {
    if (maps.empty()) throw ValidationError("ifs needs at least one map");
    if (maps.size() != probs.size())
        throw ValidationError("ifs map and probability counts differ");
    double total = 0.0;
    for (double p : probs) {
        if (!(p > 0.0)) throw ValidationError("ifs probabilities must be strictly positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError("ifs probabilities must sum to 1");
    Ifs s;
    s.maps = std::move(maps);
    s.probs = std::move(probs);
    return s;
}

bool Ifs::equal_weights() const {
    for (double p : probs)
        if (std::abs(p - 1.0 / double(probs.size())) > 1e-12) return false;
    return true;
}

CirclePoint compose_word(const Ifs& ifs, const Word& w, CirclePoint x) {
    double pos = x.value;
    for (std::uint32_t s : w) {
        if (s >= ifs.k()) throw SymbolOutOfRange("word symbol out of range");
        pos = apply_pos(ifs.maps[s], pos);
    }
    return CirclePoint(pos);
}

EmpiricalMeasure markov_push(const Ifs& ifs, const EmpiricalMeasure& mu, std::size_t atom_cap) {
    std::size_t out_n = mu.size() * ifs.k();
    if (out_n > atom_cap)
        throw AtomBudgetExceeded("markov_push result would exceed the atom cap");
    std::vector<Atom> out;
    out.reserve(out_n);
    for (std::size_t i = 0; i < ifs.k(); ++i) {
        const Homeo& g = ifs.maps[i];
        double p = ifs.probs[i];
        for (const Atom& a : mu.atoms()) out.push_back({apply_pos(g, a.pos), p * a.w});
    }
    return EmpiricalMeasure::from_atoms(std::move(out), false);
}

namespace {

void check_budget(const Ifs& ifs, int n, std::uint64_t node_budget) {
    if (n < 0) throw ValidationError("tree depth must be nonnegative");
    double leaves = std::pow(double(ifs.k()), double(n));
    if (leaves > double(node_budget))
        throw NodeBudgetExceeded("k^n exceeds the node budget; use the Monte Carlo path");
}

// Depth-first traversal of the word tree tracking P start points through
// identical words. acc[d][j] accumulates prob-weighted f over depth-d nodes.
struct MultiTraversal {
    const Ifs& ifs;
    const Observable& f;
    int depth;
    std::size_t P;
    std::vector<double> scratch;           // (depth+1) x P current positions
    std::vector<std::vector<long double>> acc;  // [d][j]

    MultiTraversal(const Ifs& s, const Observable& fn, int n, std::span<const CirclePoint> xs)
        : ifs(s), f(fn), depth(n), P(xs.size()) {
        scratch.assign(std::size_t(depth + 1) * P, 0.0);
        for (std::size_t j = 0; j < P; ++j) scratch[j] = xs[j].value;
        acc.assign(std::size_t(depth + 1), std::vector<long double>(P, 0.0L));
        for (std::size_t j = 0; j < P; ++j) acc[0][j] = f(CirclePoint(scratch[j]));
        if (depth > 0) recurse(0, 1.0);
    }

    void recurse(int d, double prob) {
        const double* cur = scratch.data() + std::size_t(d) * P;
        double* nxt = scratch.data() + std::size_t(d + 1) * P;
        for (std::size_t i = 0; i < ifs.k(); ++i) {
            const Homeo& g = ifs.maps[i];
            double p = prob * ifs.probs[i];
            auto& level = acc[std::size_t(d + 1)];
            for (std::size_t j = 0; j < P; ++j) {
                nxt[j] = apply_pos(g, cur[j]);
                level[j] += (long double)(p * f(CirclePoint(nxt[j])));
            }
            if (d + 1 < depth) recurse(d + 1, p);
        }
    }
};

}  // namespace

std::vector<double> dual_levels(const Ifs& ifs, const Observable& f, CirclePoint x, int n,
                                std::uint64_t node_budget) {
    check_budget(ifs, n, node_budget);
    CirclePoint pts[1] = {x};
    MultiTraversal t(ifs, f, n, std::span<const CirclePoint>(pts, 1));
    std::vector<double> out(static_cast<std::size_t>(n + 1));
    for (int d = 0; d <= n; ++d) out[std::size_t(d)] = double(t.acc[std::size_t(d)][0]);
    return out;
}

std::vector<std::vector<double>> dual_levels_multi(const Ifs& ifs, const Observable& f,
                                                   std::span<const CirclePoint> xs, int n,
                                                   std::uint64_t node_budget, int workers) {
    check_budget(ifs, n, node_budget);
    std::vector<std::vector<double>> out(std::size_t(n + 1),
                                         std::vector<double>(xs.size(), 0.0));
    // Parallel over start points; each index traverses its own tree.
    std::vector<std::vector<double>> per_point(xs.size());
    parallel_for(xs.size(), workers, [&](std::size_t i) {
        per_point[i] = dual_levels(ifs, f, xs[i], n, node_budget);
    });
    for (int d = 0; d <= n; ++d)
        for (std::size_t i = 0; i < xs.size(); ++i) out[std::size_t(d)][i] = per_point[i][std::size_t(d)];
    return out;
}

std::vector<double> dual_levels_diff(const Ifs& ifs, const Observable& f, CirclePoint x,
                                     CirclePoint y, int n, std::uint64_t node_budget) {
    check_budget(ifs, n, node_budget);
    std::vector<long double> acc(std::size_t(n + 1), 0.0L);
    acc[0] = f(x) - f(y);
    struct Rec {
        const Ifs& ifs;
        const Observable& f;
        int depth;
        std::vector<long double>& acc;
        void operator()(int d, double prob, double px, double py) const {
            for (std::size_t i = 0; i < ifs.k(); ++i) {
                double p = prob * ifs.probs[i];
                double nx = apply_pos(ifs.maps[i], px);
                double ny = apply_pos(ifs.maps[i], py);
                acc[std::size_t(d + 1)] += (long double)(p * (f(CirclePoint(nx)) - f(CirclePoint(ny))));
                if (d + 1 < depth) (*this)(d + 1, p, nx, ny);
            }
        }
    };
    if (n > 0) Rec{ifs, f, n, acc}(0, 1.0, x.value, y.value);
    std::vector<double> out(static_cast<std::size_t>(n + 1));
    for (int d = 0; d <= n; ++d) out[std::size_t(d)] = double(acc[std::size_t(d)]);
    return out;
}

double dual_exact(const Ifs& ifs, const Observable& f, CirclePoint x, int n,
                  std::uint64_t node_budget) {
    return dual_levels(ifs, f, x, n, node_budget).back();
}

std::vector<double> dual_sum_exact(const Ifs& ifs, const Observable& f, CirclePoint x, int n,
                                   std::uint64_t node_budget) {
    auto levels = dual_levels(ifs, f, x, n, node_budget);
    std::vector<double> sums(static_cast<std::size_t>(n));
    long double acc = 0.0L;
    for (int m = 1; m <= n; ++m) {
        acc += levels[std::size_t(m)];
        sums[std::size_t(m - 1)] = double(acc);
    }
    return sums;
}

McEstimate dual_mc(const Ifs& ifs, const Observable& f, CirclePoint x, int n, int samples,
                   std::uint64_t seed, int workers) {
    if (samples < 2) throw ValidationError("dual_mc needs at least two samples");
    std::uint64_t op_seed = salt_seed(seed, 0x6d63'6475'616cull);  // "mcdual"
    std::vector<double> vals(static_cast<std::size_t>(samples));
    parallel_for(std::size_t(samples), workers, [&](std::size_t i) {
        RngStream g(op_seed, i);
        double pos = x.value;
        for (int t = 0; t < n; ++t) pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
        vals[i] = f(CirclePoint(pos));
    });
    long double s = 0.0L, s2 = 0.0L;
    for (double v : vals) {
        s += v;
        s2 += (long double)v * v;
    }
    double mean = double(s / samples);
    double var = std::max(0.0, double((s2 - s * s / samples) / (samples - 1)));
    return {mean, std::sqrt(var / samples)};
}

std::vector<CirclePoint> simulate_chain(const Ifs& ifs, CirclePoint x0, int n, std::uint64_t seed) {
    RngStream g(salt_seed(seed, 0x636861696eull /* "chain" */), 0);
    std::vector<CirclePoint> traj;
    traj.reserve(std::size_t(n + 1));
    traj.push_back(x0);
    double pos = x0.value;
    for (int t = 0; t < n; ++t) {
        pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
        traj.push_back(CirclePoint(pos));
    }
    return traj;
}

EmpiricalMeasure stationary_sample(const Ifs& ifs, int burn_in, int count, int thinning,
                                   std::uint64_t seed, CirclePoint x0) {
    if (count < 1) throw ValidationError("stationary_sample needs count >= 1");
    if (thinning < 1) thinning = 1;
    RngStream g(salt_seed(seed, 0x73746174'696f6eull /* "station" */), 0);
    double pos = x0.value;
    for (int t = 0; t < burn_in; ++t) pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
    std::vector<CirclePoint> pts;
    pts.reserve(std::size_t(count));
    for (int c = 0; c < count; ++c) {
        for (int t = 0; t < thinning; ++t) pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
        pts.push_back(CirclePoint(pos));
    }
    return EmpiricalMeasure::from_points(pts);
}

EmpiricalMeasure occupation_measure(const Ifs& ifs, long burn_in, long steps, int bins,
                                    std::uint64_t seed, CirclePoint x0) {
    if (steps < 1 || bins < 1) throw ValidationError("occupation_measure needs steps, bins >= 1");
    RngStream g(salt_seed(seed, 0x6f636375'7079ull /* "occupy" */), 0);
    double pos = x0.value;
    for (long t = 0; t < burn_in; ++t) pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
    std::vector<double> mass(std::size_t(bins), 0.0);
    for (long t = 0; t < steps; ++t) {
        pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
        std::size_t b = std::size_t(pos * bins);
        if (b >= std::size_t(bins)) b = std::size_t(bins) - 1;
        mass[b] += 1.0;
    }
    std::vector<Atom> atoms;
    for (int b = 0; b < bins; ++b)
        if (mass[std::size_t(b)] > 0.0)
            atoms.push_back({(b + 0.5) / double(bins), mass[std::size_t(b)] / double(steps)});
    return EmpiricalMeasure::from_atoms(std::move(atoms), false);
}

Ifs inverse_system(const Ifs& ifs) {
    std::vector<Homeo> inv;
    inv.reserve(ifs.k());
    for (const Homeo& g : ifs.maps) inv.push_back(inverse(g));
    return Ifs::make(std::move(inv), ifs.probs);
}

Ifs uniformize(const Ifs& ifs, std::span<const int> denominators) {
    for (int n : denominators) {
        if (n < 1) continue;
        std::vector<int> m(ifs.k());
        bool ok = true;
        long total = 0;
        for (std::size_t i = 0; i < ifs.k(); ++i) {
            m[i] = int(std::lround(ifs.probs[i] * n));
            if (m[i] < 1 || std::abs(ifs.probs[i] - double(m[i]) / n) >= 1e-12) {
                ok = false;
                break;
            }
            total += m[i];
        }
        if (!ok || total != n) continue;
        std::vector<Homeo> maps;
        std::vector<double> probs;
        maps.reserve(std::size_t(n));
        probs.reserve(std::size_t(n));
        for (std::size_t i = 0; i < ifs.k(); ++i)
            for (int c = 0; c < m[i]; ++c) {
                maps.push_back(ifs.maps[i]);
                probs.push_back(1.0 / double(n));
            }
        return Ifs::make(std::move(maps), std::move(probs));
    }
    throw NotRational("no candidate denominator certifies the probability vector as rational");
}

std::vector<CirclePoint> support_step(const Ifs& ifs, std::span<const CirclePoint> A) {
    std::vector<double> pts;
    pts.reserve(A.size() * ifs.k());
    for (CirclePoint x : A)
        for (const Homeo& g : ifs.maps) pts.push_back(apply_pos(g, x.value));
    std::sort(pts.begin(), pts.end());
    std::vector<CirclePoint> out;
    constexpr double tol = 1e-12;
    for (double p : pts) {
        if (!out.empty() && p - out.back().value < tol) continue;
        out.push_back(CirclePoint(p));
    }
    // Endpoints within tolerance across the wrap collapse onto the first point.
    if (out.size() > 1 && (1.0 - out.back().value) + out.front().value < tol) out.pop_back();
    return out;
}

}  // namespace ifslab

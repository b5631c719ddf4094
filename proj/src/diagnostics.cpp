#include "ifslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "ifslab/parallel.hpp"
#include "ifslab/stats.hpp"

namespace ifslab {

namespace {

// Gap tables for x against y = x + delta and y = x - delta, one tree pass in
// exact mode (all points ride the same words), common symbol streams in MC
// mode. Returns per-(delta, n) absolute gaps, max over the two sides.
std::vector<std::vector<double>> pairwise_gaps(const Ifs& ifs, const Observable& f, CirclePoint x,
                                               std::span<const double> deltas, int n_max,
                                               DualMode mode, int samples, std::uint64_t seed,
                                               std::uint64_t node_budget, int workers) {
    std::size_t D = deltas.size();
    std::vector<std::vector<double>> gaps(D, std::vector<double>(std::size_t(n_max), 0.0));
    if (mode == DualMode::Exact) {
        std::vector<CirclePoint> pts;
        pts.push_back(x);
        for (double d : deltas) {
            pts.push_back(CirclePoint(x.value + d));
            pts.push_back(CirclePoint(x.value - d));
        }
        auto levels = dual_levels_multi(ifs, f, pts, n_max, node_budget, workers);
        for (std::size_t di = 0; di < D; ++di)
            for (int n = 1; n <= n_max; ++n) {
                double base = levels[std::size_t(n)][0];
                double gp = std::abs(levels[std::size_t(n)][1 + 2 * di] - base);
                double gm = std::abs(levels[std::size_t(n)][2 + 2 * di] - base);
                gaps[di][std::size_t(n - 1)] = std::max(gp, gm);
            }
        return gaps;
    }
    // Monte Carlo with common random numbers: one symbol stream drives x and
    // both displaced copies; the per-n gap is the mean coupled difference.
    std::uint64_t op_seed = salt_seed(seed, 0x6570726f70ull /* "eprop" */);
    std::size_t P = 1 + 2 * D;
    std::vector<std::vector<long double>> acc(std::size_t(n_max) + 1,
                                              std::vector<long double>(P, 0.0L));
    std::vector<std::vector<std::vector<double>>> per(static_cast<std::size_t>(samples));
    parallel_for(std::size_t(samples), workers, [&](std::size_t s) {
        RngStream g(op_seed, s);
        std::vector<double> pos(P);
        pos[0] = x.value;
        for (std::size_t di = 0; di < D; ++di) {
            pos[1 + 2 * di] = wrap01(x.value + deltas[di]);
            pos[2 + 2 * di] = wrap01(x.value - deltas[di]);
        }
        per[s].assign(std::size_t(n_max), std::vector<double>(P));
        for (int n = 1; n <= n_max; ++n) {
            const Homeo& gmap = ifs.maps[ifs.draw_symbol(g)];
            for (std::size_t j = 0; j < P; ++j) pos[j] = apply_pos(gmap, pos[j]);
            for (std::size_t j = 0; j < P; ++j) per[s][std::size_t(n - 1)][j] = f(CirclePoint(pos[j]));
        }
    });
    for (std::size_t s = 0; s < std::size_t(samples); ++s)
        for (int n = 1; n <= n_max; ++n)
            for (std::size_t j = 0; j < P; ++j) acc[std::size_t(n)][j] += per[s][std::size_t(n - 1)][j];
    for (std::size_t di = 0; di < D; ++di)
        for (int n = 1; n <= n_max; ++n) {
            double base = double(acc[std::size_t(n)][0] / samples);
            double gp = std::abs(double(acc[std::size_t(n)][1 + 2 * di] / samples) - base);
            double gm = std::abs(double(acc[std::size_t(n)][2 + 2 * di] / samples) - base);
            gaps[di][std::size_t(n - 1)] = std::max(gp, gm);
        }
    return gaps;
}

}  // namespace

EquicontinuityProfile e_property_profile(const Ifs& ifs, const Observable& f, CirclePoint x,
                                         std::span<const double> deltas, int n_max, DualMode mode,
                                         int samples, std::uint64_t seed,
                                         std::uint64_t node_budget, int workers) {
    for (double d : deltas)
        if (!(d > 0.0) || d > 0.25)
            throw ValidationError("profile deltas must lie in (0, 1/4]");
    auto gaps = pairwise_gaps(ifs, f, x, deltas, n_max, mode, samples, seed, node_budget, workers);
    EquicontinuityProfile prof;
    prof.mode = mode;
    prof.n_max = n_max;
    for (std::size_t di = 0; di < deltas.size(); ++di) {
        ProfileRow row;
        row.delta = deltas[di];
        row.per_n = gaps[di];
        for (double v : row.per_n) row.sup_gap = std::max(row.sup_gap, v);
        prof.rows.push_back(std::move(row));
    }
    return prof;
}

EquicontinuityProfile cesaro_profile(const Ifs& ifs, const Observable& f, CirclePoint x,
                                     std::span<const double> deltas, int n_max, DualMode mode,
                                     int samples, std::uint64_t seed, std::uint64_t node_budget,
                                     int workers) {
    // sup_n |(1/n) sum_{k<=n} (U^k f(y) - U^k f(x))| needs the signed
    // per-level differences; exact mode reuses the shared-tree machinery.
    for (double d : deltas)
        if (!(d > 0.0) || d > 0.25)
            throw ValidationError("profile deltas must lie in (0, 1/4]");
    EquicontinuityProfile prof;
    prof.mode = mode;
    prof.cesaro = true;
    prof.n_max = n_max;
    for (double delta : deltas) {
        ProfileRow row;
        row.delta = delta;
        row.per_n.assign(std::size_t(n_max), 0.0);
        for (double side : {delta, -delta}) {
            CirclePoint y(x.value + side);
            std::vector<double> diff;
            if (mode == DualMode::Exact) {
                diff = dual_levels_diff(ifs, f, y, x, n_max, node_budget);
            } else {
                std::uint64_t op_seed = salt_seed(seed, 0x6365736172ull /* "cesar" */);
                std::vector<std::vector<double>> per(static_cast<std::size_t>(samples));
                parallel_for(std::size_t(samples), workers, [&](std::size_t s) {
                    RngStream g(op_seed, s);
                    double px = x.value, py = y.value;
                    per[s].assign(std::size_t(n_max) + 1, 0.0);
                    for (int n = 1; n <= n_max; ++n) {
                        const Homeo& gmap = ifs.maps[ifs.draw_symbol(g)];
                        px = apply_pos(gmap, px);
                        py = apply_pos(gmap, py);
                        per[s][std::size_t(n)] = f(CirclePoint(py)) - f(CirclePoint(px));
                    }
                });
                diff.assign(std::size_t(n_max) + 1, 0.0);
                for (int n = 1; n <= n_max; ++n) {
                    long double acc = 0.0L;
                    for (std::size_t s = 0; s < std::size_t(samples); ++s) acc += per[s][std::size_t(n)];
                    diff[std::size_t(n)] = double(acc / samples);
                }
            }
            long double partial = 0.0L;
            for (int n = 1; n <= n_max; ++n) {
                partial += diff[std::size_t(n)];
                double v = std::abs(double(partial)) / n;
                auto& cell = row.per_n[std::size_t(n - 1)];
                cell = std::max(cell, v);
            }
        }
        for (double v : row.per_n) row.sup_gap = std::max(row.sup_gap, v);
        prof.rows.push_back(std::move(row));
    }
    return prof;
}

std::vector<Arc> default_candidate_arcs(int count, double length) {
    std::vector<Arc> arcs;
    arcs.reserve(std::size_t(count));
    for (int i = 0; i < count; ++i) {
        double c = double(i) / count;
        arcs.push_back(Arc{CirclePoint(c - length / 2), CirclePoint(c + length / 2)});
    }
    return arcs;
}

ContractionCertificate contraction_certificate(const Ifs& ifs, std::span<const Arc> candidates,
                                               int depth, int trials, std::uint64_t seed,
                                               int workers) {
    if (depth < 8) throw ValidationError("contraction certificate needs depth >= 8");
    if (trials < 100) throw ValidationError("contraction certificate needs trials >= 100");
    std::uint64_t op_seed = salt_seed(seed, 0x73796e63ull /* "sync" */);
    constexpr double kSlopeTol = 1e-6;
    // Arc lengths saturate near machine resolution once the endpoints
    // collide; the slope fit stops there and sub-floor arcs count as
    // contracted in the envelope test.
    constexpr double kLenFloor = 1e-12;

    ContractionCertificate best;
    best.depth = depth;
    best.trials = trials;
    best.seed = seed;

    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const Arc& I = candidates[ci];
        double len0 = arc_length(I);
        if (!(len0 > 0.0)) continue;
        // Per path: the arc-length sequence of word images of I.
        std::vector<std::vector<double>> lens(static_cast<std::size_t>(trials));
        parallel_for(std::size_t(trials), workers, [&](std::size_t t) {
            RngStream g(op_seed, ci * std::size_t(trials) + t);
            Arc a = I;
            auto& l = lens[t];
            l.reserve(std::size_t(depth));
            for (int n = 0; n < depth; ++n) {
                a = image_arc(ifs.maps[ifs.draw_symbol(g)], a);
                l.push_back(arc_length(a));
            }
        });
        std::vector<double> slopes;
        for (const auto& l : lens) {
            int T = depth;
            double lt = l.back();
            for (int n = 0; n < depth; ++n)
                if (l[std::size_t(n)] < kLenFloor) {
                    T = n + 1;
                    lt = kLenFloor;
                    break;
                }
            double s = std::log(std::max(lt, kLenFloor) / len0) / T;
            if (s < -kSlopeTol) slopes.push_back(s);
        }
        if (slopes.empty()) continue;
        double mslope = mean_of(slopes);
        double q_hat = std::exp(mslope);
        if (q_hat >= 1.0 - 1e-9) continue;
        long inside = 0;
        for (const auto& l : lens) {
            bool ok = true;
            double env = 1.0;
            for (int n = 0; n < depth && ok; ++n) {
                env *= q_hat;
                if (l[std::size_t(n)] > std::max(env, kLenFloor)) ok = false;
            }
            inside += ok;
        }
        double mass = double(inside) / trials;
        if (mass <= 0.0) continue;
        if (mass > best.mass_hat) {
            best.I = I;
            best.q_hat = q_hat;
            double sd = std::sqrt(variance_of(slopes));
            best.q_ci_high = std::exp(mslope + 1.959963985 * sd / std::sqrt(double(slopes.size())));
            best.mass_hat = mass;
            auto wi = wilson_interval(inside, trials);
            best.mass_ci_low = wi.low;
            best.mass_ci_high = wi.high;
            best.contracting_paths = int(slopes.size());
        }
    }
    if (best.mass_hat <= 0.0)
        throw NoContractionFound(
            "no candidate arc contracts along sampled words; the family may share an invariant measure");
    return best;
}

namespace {

// Exact infimum over every x of the length-m hitting mass of I: each word w
// contributes the preimage arc g_w^{-1}(I) at its path weight, and the
// infimum is the minimum stabbing weight of those arcs over the circle. Arcs
// are shrunk by a hair so that points certified covered stay covered under
// the forward membership test.
double min_hitting_mass_exact(const Ifs& ifs, const Arc& I, int m) {
    constexpr double kEdge = 1e-9;
    struct Ev {
        double pos;
        double w;
    };
    std::vector<Ev> events;
    struct Rec {
        const Ifs& ifs;
        std::vector<Ev>& events;
        int m;
        void go(int depth, double prob, const Arc& a) {
            if (depth == m) {
                double s = a.start.value + kEdge;
                double e = a.start.value + arc_length(a) - kEdge;
                if (e <= s) return;  // degenerate after shrinking
                if (e < 1.0) {
                    events.push_back({s, prob});
                    events.push_back({e, -prob});
                } else {
                    events.push_back({s, prob});
                    events.push_back({1.0, -prob});
                    events.push_back({0.0, prob});
                    events.push_back({e - 1.0, -prob});
                }
                return;
            }
            // Preimage under the word grows from the inside out: the last
            // symbol is inverted first.
            for (std::size_t i = 0; i < ifs.k(); ++i) {
                Arc pre{apply_inverse(ifs.maps[i], a.start), apply_inverse(ifs.maps[i], a.end)};
                go(depth + 1, prob * ifs.probs[i], pre);
            }
        }
    };
    Rec{ifs, events, m}.go(0, 1.0, I);
    if (events.empty()) return 0.0;
    std::sort(events.begin(), events.end(), [](const Ev& a, const Ev& b) { return a.pos < b.pos; });
    // Sweep [0,1): the minimum running weight over any open segment.
    double cur = 0.0, lo = 1e300;
    std::size_t i = 0;
    double prev = 0.0;
    while (i < events.size()) {
        double p = events[i].pos;
        if (p > prev) lo = std::min(lo, cur);
        while (i < events.size() && events[i].pos == p) cur += events[i++].w;
        prev = p;
    }
    if (prev < 1.0) lo = std::min(lo, cur);
    return std::max(0.0, lo);
}

}  // namespace

HittingResult hitting_parameters(const Ifs& ifs, const Arc& I, int m_max, int x_grid,
                                 std::uint64_t seed, std::uint64_t node_budget, int mc_samples,
                                 int workers) {
    if (!(arc_length(I) > 0.0)) throw ValidationError("hitting arc must have positive length");
    std::uint64_t op_seed = salt_seed(seed, 0x686974ull /* "hit" */);

    for (int m = 0; m <= m_max; ++m) {
        double leaves = std::pow(double(ifs.k()), double(m));
        bool exact = leaves <= double(node_budget);
        double lo;
        if (exact) {
            lo = min_hitting_mass_exact(ifs, I, m);
        } else {
            // Monte Carlo fallback on a grid of starting points.
            std::vector<double> hit(std::size_t(x_grid), 0.0);
            parallel_for(std::size_t(x_grid), workers, [&](std::size_t gi) {
                RngStream g(op_seed, std::uint64_t(m) * std::uint64_t(x_grid) + gi);
                long c = 0;
                for (int s = 0; s < mc_samples; ++s) {
                    double pos = double(gi) / x_grid;
                    for (int t = 0; t < m; ++t) pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
                    c += arc_contains(I, CirclePoint(pos));
                }
                hit[gi] = double(c) / mc_samples;
            });
            lo = *std::min_element(hit.begin(), hit.end());
        }
        if (lo > 0.0) return {m, lo, exact};
    }
    throw NotReached("no m <= m_max reaches the arc from every starting point");
}

MinimalityEvidence minimality_evidence(const Ifs& ifs, CirclePoint x0, int depth, double eps,
                                       std::uint64_t node_budget, std::uint64_t seed) {
    MinimalityEvidence ev;
    double total = 0.0;
    for (int d = 1, leaves = 1; d <= depth; ++d) {
        leaves = int(std::min<double>(double(leaves) * double(ifs.k()), 2e9));
        total += double(leaves);
        if (total > double(node_budget)) break;
    }
    std::vector<CirclePoint> orbit{x0};
    if (total <= double(node_budget)) {
        // Exact level-by-level expansion with per-level dedup.
        std::vector<CirclePoint> level{x0};
        for (int d = 0; d < depth; ++d) {
            level = support_step(ifs, level);
            orbit.insert(orbit.end(), level.begin(), level.end());
        }
    } else {
        ev.exact = false;
        RngStream g(salt_seed(seed, 0x6d696e696dull /* "minim" */), 0);
        std::size_t budget_pts = std::size_t(node_budget / std::max(1, depth));
        for (std::size_t s = 0; s < budget_pts; ++s) {
            double pos = x0.value;
            int len = 1 + int(g.next_below(std::uint32_t(depth)));
            for (int t = 0; t < len; ++t) pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
            orbit.push_back(CirclePoint(pos));
        }
    }
    ev.orbit_points = orbit.size();
    ev.max_gap = max_gap(EmpiricalMeasure::from_points(orbit)).length;
    ev.verdict = ev.max_gap < eps;
    return ev;
}

std::vector<std::pair<int, double>> stability_gap(const Ifs& ifs, CirclePoint x, CirclePoint y,
                                                  std::span<const int> n_list, int samples,
                                                  std::uint64_t seed, int workers) {
    if (samples < 2) throw ValidationError("stability_gap needs samples >= 2");
    std::uint64_t op_seed = salt_seed(seed, 0x73746162ull /* "stab" */);
    int n_max = *std::max_element(n_list.begin(), n_list.end());
    std::vector<std::vector<double>> snap_x(n_list.size(), std::vector<double>(std::size_t(samples)));
    std::vector<std::vector<double>> snap_y(n_list.size(), std::vector<double>(std::size_t(samples)));
    std::vector<std::size_t> idx(n_list.size());
    for (std::size_t i = 0; i < n_list.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return n_list[a] < n_list[b]; });
    parallel_for(std::size_t(samples), workers, [&](std::size_t s) {
        RngStream g(op_seed, s);  // common random numbers for both starts
        double px = x.value, py = y.value;
        std::size_t next = 0;
        for (int t = 0; t <= n_max; ++t) {
            while (next < idx.size() && n_list[idx[next]] == t) {
                snap_x[idx[next]][s] = px;
                snap_y[idx[next]][s] = py;
                ++next;
            }
            if (t == n_max) break;
            const Homeo& gmap = ifs.maps[ifs.draw_symbol(g)];
            px = apply_pos(gmap, px);
            py = apply_pos(gmap, py);
        }
    });
    std::vector<std::pair<int, double>> out;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        std::vector<CirclePoint> ax, ay;
        ax.reserve(std::size_t(samples));
        ay.reserve(std::size_t(samples));
        for (int s = 0; s < samples; ++s) {
            ax.push_back(CirclePoint(snap_x[i][std::size_t(s)]));
            ay.push_back(CirclePoint(snap_y[i][std::size_t(s)]));
        }
        out.emplace_back(n_list[i], w1_circle(EmpiricalMeasure::from_points(ax),
                                              EmpiricalMeasure::from_points(ay)));
    }
    return out;
}

double uniqueness_evidence(const Ifs& ifs, std::span<const CirclePoint> starts, long n,
                           std::uint64_t seed, int workers) {
    if (starts.size() < 2) throw ValidationError("uniqueness_evidence needs at least two starts");
    std::uint64_t op_seed = salt_seed(seed, 0x756e6971ull /* "uniq" */);
    long burn = n / 10;
    std::vector<EmpiricalMeasure> occ(starts.size());
    parallel_for(starts.size(), workers, [&](std::size_t i) {
        RngStream g(op_seed, i);
        double pos = starts[i].value;
        std::vector<CirclePoint> pts;
        pts.reserve(std::size_t(n - burn));
        for (long t = 0; t < n; ++t) {
            pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
            if (t >= burn) pts.push_back(CirclePoint(pos));
        }
        occ[i] = EmpiricalMeasure::from_points(pts);
    });
    double worst = 0.0;
    for (std::size_t i = 0; i < occ.size(); ++i)
        for (std::size_t j = i + 1; j < occ.size(); ++j)
            worst = std::max(worst, w1_circle(occ[i], occ[j]));
    return worst;
}

}  // namespace ifslab

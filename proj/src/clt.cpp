#include "ifslab/clt.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ifslab/parallel.hpp"
#include "ifslab/stats.hpp"

namespace ifslab {

Observable center_observable(const Observable& f, const EmpiricalMeasure& mu_star_hat) {
    double c = mu_star_hat.integrate(f);
    return f.centered(c);
}

double centering_error(const Observable& f, const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    return std::abs(a.integrate(f) - b.integrate(f));
}

double birkhoff_sum(const Ifs& ifs, const Observable& f, CirclePoint x, int n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("birkhoff_sum needs n >= 1");
    RngStream g(salt_seed(seed, 0x6269726bull /* "birk" */), 0);
    double pos = x.value;
    long double s = 0.0L;
    for (int l = 0; l < n; ++l) {
        pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
        s += f(CirclePoint(pos));
    }
    return double(s);
}

std::vector<double> sn_star_samples(const Ifs& ifs, const Observable& f, int n, int replicates,
                                    int burn_in, StartMode mode, CirclePoint x, std::uint64_t seed,
                                    int workers) {
    if (replicates < 100) throw ValidationError("sn_star_samples needs replicates >= 100");
    std::uint64_t op_seed =
        salt_seed(seed, mode == StartMode::Stationary ? 0x736e2d7374ull : 0x736e2d6678ull);
    std::vector<double> out(static_cast<std::size_t>(replicates));
    parallel_for(std::size_t(replicates), workers, [&](std::size_t r) {
        RngStream g(op_seed, r);
        double pos = x.value;
        if (mode == StartMode::Stationary)
            for (int t = 0; t < burn_in; ++t) pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
        long double s = 0.0L;
        for (int l = 0; l < n; ++l) {
            pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
            s += f(CirclePoint(pos));
        }
        out[r] = double(s) / std::sqrt(double(n));
    });
    return out;
}

Sigma2 sigma2_estimate(std::span<const double> samples) {
    if (samples.size() < 2) throw ValidationError("sigma2_estimate needs at least two samples");
    long double s = 0.0L, s2 = 0.0L;
    for (double v : samples) {
        s += v;
        s2 += (long double)v * v;
    }
    double n = double(samples.size());
    Sigma2 r;
    r.raw = double(s2 / (n - 1.0));
    r.centered = std::max(0.0, double((s2 - s * s / n) / (n - 1.0)));
    if (r.centered < 1e-12)
        throw DegenerateSample("sample variance below resolution; sigma^2 = 0 or constant f");
    return r;
}

MWReport mw_statistic(const Ifs& ifs, const Observable& f, std::span<const int> n_list,
                      int x_count, std::uint64_t seed, DualMode mode,
                      const EmpiricalMeasure& mu_star_hat, std::uint64_t node_budget,
                      int mc_samples, int workers) {
    MWReport rep;
    rep.n_values.assign(n_list.begin(), n_list.end());
    std::sort(rep.n_values.begin(), rep.n_values.end());
    rep.x_sample_count = x_count;
    rep.mode = mode;
    rep.seed = seed;
    int n_max = rep.n_values.back();

    RngStream gx(salt_seed(seed, 0x6d772d78ull /* "mw-x" */), 0);
    std::vector<CirclePoint> xs;
    xs.reserve(std::size_t(x_count));
    for (int i = 0; i < x_count; ++i) xs.push_back(mu_star_hat.sample(gx));

    // h_n(x) = sum_{k<=n} U^k f(x) per sampled x.
    std::vector<std::vector<double>> h(static_cast<std::size_t>(x_count));
    if (mode == DualMode::Exact) {
        parallel_for(std::size_t(x_count), workers, [&](std::size_t i) {
            h[i] = dual_sum_exact(ifs, f, xs[i], n_max, node_budget);
        });
    } else {
        parallel_for(std::size_t(x_count), workers, [&](std::size_t i) {
            h[i].assign(std::size_t(n_max), 0.0);
            long double acc = 0.0L;
            for (int k = 1; k <= n_max; ++k) {
                acc += dual_mc(ifs, f, xs[i], k, mc_samples, salt_seed(seed, std::uint64_t(i) * 131 + k), 1)
                           .estimate;
                h[i][std::size_t(k - 1)] = double(acc);
            }
        });
    }

    for (int n : rep.n_values) {
        long double s2 = 0.0L;
        for (int i = 0; i < x_count; ++i) {
            double v = h[std::size_t(i)][std::size_t(n - 1)];
            s2 += (long double)v * v;
        }
        rep.a_n.push_back(std::sqrt(double(s2 / x_count)));
    }

    // Growth exponent from the upper half of the n range (small-n transients
    // bias the fit).
    std::vector<double> lx, ly;
    for (std::size_t i = rep.n_values.size() / 2; i < rep.n_values.size(); ++i) {
        if (rep.a_n[i] <= 0.0) continue;
        lx.push_back(std::log(double(rep.n_values[i])));
        ly.push_back(std::log(rep.a_n[i]));
    }
    rep.beta_growth_hat = (lx.size() >= 2) ? ls_slope(lx, ly) : 0.0;

    long double series = 0.0L;
    for (std::size_t i = 0; i < rep.n_values.size(); ++i) {
        series += rep.a_n[i] * std::pow(double(rep.n_values[i]), -1.5);
        rep.partial_series.push_back(double(series));
    }
    return rep;
}

std::vector<std::pair<int, double>> uniform_sum_gap(const Ifs& ifs, const Observable& f,
                                                    CirclePoint x, CirclePoint y,
                                                    std::span<const int> n_list,
                                                    std::uint64_t node_budget) {
    std::vector<int> ns(n_list.begin(), n_list.end());
    std::sort(ns.begin(), ns.end());
    int n_max = ns.back();
    auto diff = dual_levels_diff(ifs, f, x, y, n_max, node_budget);
    std::vector<std::pair<int, double>> out;
    long double acc = 0.0L;
    std::size_t next = 0;
    for (int n = 1; n <= n_max; ++n) {
        acc += diff[std::size_t(n)];
        while (next < ns.size() && ns[next] == n) {
            out.emplace_back(n, std::abs(double(acc)));
            ++next;
        }
    }
    return out;
}

KsResult normality_test(std::span<const double> samples, double sigma2) {
    if (samples.size() < 100) throw ValidationError("normality_test needs at least 100 samples");
    if (!(sigma2 > 0.0)) throw DegenerateSample("normality_test needs sigma2 > 0");
    double sd = std::sqrt(sigma2);
    double d = ks_statistic(samples, [&](double v) { return normal_cdf(v / sd); });
    double lambda = std::sqrt(double(samples.size())) * d;
    return {d, kolmogorov_survival(lambda)};
}

CharfnGapTable charfn_gap(const Ifs& ifs, const Observable& f, CirclePoint x,
                          std::span<const int> n_list, std::span<const double> t_list,
                          int replicates, int burn_in, std::uint64_t seed, int workers) {
    if (replicates < 1000) throw ValidationError("charfn_gap needs replicates >= 1000");
    CharfnGapTable table;
    table.n_values.assign(n_list.begin(), n_list.end());
    std::sort(table.n_values.begin(), table.n_values.end());
    table.t_values.assign(t_list.begin(), t_list.end());
    int n_max = table.n_values.back();

    // One path per replicate and start mode, snapshotting S_n at checkpoints.
    auto collect = [&](StartMode mode, std::uint64_t salt) {
        std::vector<std::vector<double>> sn(table.n_values.size(),
                                            std::vector<double>(std::size_t(replicates)));
        std::uint64_t op_seed = salt_seed(seed, salt);
        parallel_for(std::size_t(replicates), workers, [&](std::size_t r) {
            RngStream g(op_seed, r);
            double pos = x.value;
            if (mode == StartMode::Stationary)
                for (int t = 0; t < burn_in; ++t) pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
            long double s = 0.0L;
            std::size_t next = 0;
            for (int l = 1; l <= n_max; ++l) {
                pos = apply_pos(ifs.maps[ifs.draw_symbol(g)], pos);
                s += f(CirclePoint(pos));
                while (next < table.n_values.size() && table.n_values[next] == l) {
                    sn[next][r] = double(s) / std::sqrt(double(l));
                    ++next;
                }
            }
        });
        return sn;
    };
    auto sn_fixed = collect(StartMode::Fixed, 0x63662d6678ull);
    auto sn_stat = collect(StartMode::Stationary, 0x63662d7374ull);

    table.gap.assign(table.n_values.size(), std::vector<double>(table.t_values.size(), 0.0));
    for (std::size_t ni = 0; ni < table.n_values.size(); ++ni)
        for (std::size_t ti = 0; ti < table.t_values.size(); ++ti) {
            double t = table.t_values[ti];
            std::complex<long double> ef = 0.0L, es = 0.0L;
            for (int r = 0; r < replicates; ++r) {
                ef += std::complex<long double>(std::cos(t * sn_fixed[ni][std::size_t(r)]),
                                                std::sin(t * sn_fixed[ni][std::size_t(r)]));
                es += std::complex<long double>(std::cos(t * sn_stat[ni][std::size_t(r)]),
                                                std::sin(t * sn_stat[ni][std::size_t(r)]));
            }
            table.gap[ni][ti] = double(std::abs(ef / (long double)replicates - es / (long double)replicates));
        }
    return table;
}

}  // namespace ifslab

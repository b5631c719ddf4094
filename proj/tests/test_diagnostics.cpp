#include <cmath>

#include "doctest.h"

#include "ifslab/diagnostics.hpp"
#include "oracles.hpp"

using namespace ifslab;

namespace {

Ifs rotation_pair() {
    return Ifs::make({Homeo::rotation(0.41421356237309515), Homeo::rotation(0.73205080756887729)},
                     {0.5, 0.5});
}

Ifs demo_like() {
    return Ifs::make({Homeo::arnold(0.05, 0.8), Homeo::arnold(0.37, 0.5)}, {0.5, 0.5});
}

}  // namespace

TEST_CASE("e-property profile is Lipschitz-bounded exactly for isometries") {
    auto ifs = rotation_pair();
    auto f = Observable::harmonic({1.0}, {});  // Lipschitz 2*pi
    std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
    auto prof = e_property_profile(ifs, f, CirclePoint(0.2), deltas, 12, DualMode::Exact, 0, 1);
    for (const auto& row : prof.rows)
        CHECK(row.sup_gap <= f.lipschitz * row.delta * (1.0 + 1e-9) + 1e-11);
}

TEST_CASE("e-property profile of a constant observable vanishes") {
    auto constant = Observable::harmonic({0.0}, {}).centered(-2.0);
    std::vector<double> deltas{0.1, 0.001};
    auto prof = e_property_profile(demo_like(), constant, CirclePoint(0.3), deltas, 8,
                                   DualMode::Exact, 0, 1);
    for (const auto& row : prof.rows) CHECK(row.sup_gap == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("exact mode ignores the sample count") {
    auto f = Observable::harmonic({0.7}, {0.3});
    std::vector<double> deltas{0.05};
    auto a = e_property_profile(demo_like(), f, CirclePoint(0.1), deltas, 10, DualMode::Exact, 10, 1);
    auto b = e_property_profile(demo_like(), f, CirclePoint(0.1), deltas, 10, DualMode::Exact,
                                100000, 99);
    CHECK(a.rows[0].sup_gap == b.rows[0].sup_gap);
}

TEST_CASE("profile shrinks with delta on the demo system") {
    auto f = Observable::harmonic({1.0}, {});
    std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
    auto prof = e_property_profile(demo_like(), f, CirclePoint(0.2), deltas, 12, DualMode::Exact, 0, 1);
    // Equicontinuity evidence: gap at 1e-4 far below gap at 1e-1.
    CHECK(prof.rows[3].sup_gap < prof.rows[0].sup_gap);
    CHECK(prof.rows[3].sup_gap < 0.05);
    // Monte Carlo mode with common random numbers agrees within noise.
    auto mc = e_property_profile(demo_like(), f, CirclePoint(0.2), deltas, 12, DualMode::MonteCarlo,
                                 20000, 7);
    CHECK(std::abs(mc.rows[0].sup_gap - prof.rows[0].sup_gap) < 0.05);
}

TEST_CASE("cesaro profile is dominated by the e-property profile") {
    auto f = Observable::harmonic({1.0}, {});
    std::vector<double> deltas{1e-1, 1e-2, 1e-3};
    auto ep = e_property_profile(demo_like(), f, CirclePoint(0.2), deltas, 10, DualMode::Exact, 0, 1);
    auto cp = cesaro_profile(demo_like(), f, CirclePoint(0.2), deltas, 10, DualMode::Exact, 0, 1);
    for (std::size_t d = 0; d < deltas.size(); ++d)
        CHECK(cp.rows[d].sup_gap <= ep.rows[d].sup_gap + 1e-12);

    auto constant = Observable::harmonic({0.0}, {}).centered(1.0);
    auto cz = cesaro_profile(demo_like(), constant, CirclePoint(0.2), deltas, 6, DualMode::Exact, 0, 1);
    for (const auto& row : cz.rows) CHECK(row.sup_gap == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("contraction certificate rejects isometric systems") {
    auto arcs = default_candidate_arcs();
    CHECK_THROWS_AS((void)contraction_certificate(rotation_pair(), arcs, 24, 200, 1), NoContractionFound);
}

TEST_CASE("single contracting map: rate bracketed by the derivative range") {
    // Attracting fixed point of F(t) = t + 0.05 + (0.8/2pi) sin(2pi t).
    auto h = Homeo::arnold(0.05, 0.8);
    auto sys = Ifs::make({h}, {1.0});
    // Fixed point t*: 0.05 + (0.8/2pi) sin(2pi t*) = 0, attracting branch.
    double tstar = 0.5 + std::asin(0.05 * kTwoPi / 0.8) / kTwoPi;
    Arc I{CirclePoint(tstar - 0.05), CirclePoint(tstar + 0.05)};
    REQUIRE(arc_contains(image_arc(h, I), CirclePoint(tstar)));
    std::vector<Arc> cand{I};
    auto cert = contraction_certificate(sys, cand, 40, 100, 1);
    CHECK(cert.q_hat < 1.0);
    CHECK(cert.mass_hat > 0.5);
    // Derivative oracle: every per-step ratio lies between min and max of F'
    // on the (invariant) arc, so the geometric-mean rate does too.
    double flo = 1e300, fhi = 0.0;
    for (int i = 0; i <= 400; ++i) {
        double t = tstar - 0.05 + 0.1 * i / 400.0;
        double fp = 1.0 + 0.8 * std::cos(kTwoPi * t);
        flo = std::min(flo, fp);
        fhi = std::max(fhi, fp);
    }
    CHECK(cert.q_hat >= flo - 0.02);
    CHECK(cert.q_hat <= fhi + 0.02);
}

TEST_CASE("demo system yields a certificate with tight confidence") {
    auto cert = contraction_certificate(demo_like(), default_candidate_arcs(), 24, 2000, 1, 2);
    CHECK(cert.q_hat < 1.0);
    CHECK(cert.q_ci_high < 1.0);
    CHECK(cert.mass_hat > 0.0);
    CHECK(cert.mass_ci_low > 0.0);
}

TEST_CASE("hitting parameters") {
    auto demo = demo_like();
    // A closed arc is never the whole circle, so the exact infimum needs at
    // least one map application; a near-full arc resolves at m <= 1 with
    // large mass.
    auto full = hitting_parameters(demo, {CirclePoint(0.0), CirclePoint(0.9999)}, 4, 16, 1);
    CHECK(full.m <= 1);
    CHECK(full.hit_mass_hat >= 0.5);

    // Periodic rotation never reaches the arc from the whole grid.
    auto quarter = Ifs::make({Homeo::rotation(0.25)}, {1.0});
    CHECK_THROWS_AS((void)hitting_parameters(quarter, {CirclePoint(0.0), CirclePoint(0.1)}, 12, 4, 1),
                    NotReached);

    // Demo arc from the certificate: finite m, positive mass.
    auto cert = contraction_certificate(demo, default_candidate_arcs(), 24, 500, 1);
    auto hit = hitting_parameters(demo, cert.I, 12, 32, 1);
    CHECK(hit.m <= 12);
    CHECK(hit.hit_mass_hat > 0.0);

    // Monotone in the arc: enlarging the target cannot increase m.
    Arc small{CirclePoint(0.5), CirclePoint(0.55)};
    Arc mid{CirclePoint(0.48), CirclePoint(0.6)};
    Arc large{CirclePoint(0.45), CirclePoint(0.7)};
    auto hs = hitting_parameters(demo, small, 12, 16, 1);
    auto hm = hitting_parameters(demo, mid, 12, 16, 1);
    auto hl = hitting_parameters(demo, large, 12, 16, 1);
    CHECK(hm.m <= hs.m);
    CHECK(hl.m <= hm.m);
}

TEST_CASE("minimality evidence") {
    auto quarter = Ifs::make({Homeo::rotation(0.25)}, {1.0});
    auto ev = minimality_evidence(quarter, CirclePoint(0.0), 64, 0.01);
    CHECK(ev.max_gap == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(!ev.verdict);

    // Single irrational rotation: orbit gaps match the direct enumeration.
    double theta = 0.41421356237309515;
    auto irr = Ifs::make({Homeo::rotation(theta)}, {1.0});
    int depth = 1024;
    auto ev2 = minimality_evidence(irr, CirclePoint(0.0), depth, 0.01);
    std::vector<CirclePoint> pts;
    for (int j = 0; j <= depth; ++j) pts.push_back(CirclePoint(j * theta));
    double expect = max_gap(EmpiricalMeasure::from_points(pts)).length;
    CHECK(ev2.max_gap == doctest::Approx(expect).epsilon(1e-9));
    CHECK(ev2.verdict);

    auto ev3 = minimality_evidence(demo_like(), CirclePoint(0.3), 14, 0.01);
    CHECK(ev3.verdict);
}

TEST_CASE("stability gap") {
    auto demo = demo_like();
    std::vector<int> ns{1, 10, 50, 200};
    // Same start: identical seeded paths, so the gap is exactly zero.
    auto same = stability_gap(demo, CirclePoint(0.4), CirclePoint(0.4), ns, 500, 3);
    for (auto [n, w] : same) CHECK(w == doctest::Approx(0.0).epsilon(1e-15));

    // Rotation control: the exact laws are rigid translates; compare the
    // Monte Carlo gap against the exact binomial-law gap at n = 200.
    auto rots = rotation_pair();
    CirclePoint x(0.0), y(0.022727272727272728);
    auto table = stability_gap(rots, x, y, ns, 4000, 3);
    auto lawx = oracles::binomial_law(0.41421356237309515, 0.73205080756887729, 0.5, x, 200);
    auto lawy = oracles::binomial_law(0.41421356237309515, 0.73205080756887729, 0.5, y, 200);
    double exact200 = w1_circle(lawx, lawy);
    CHECK(std::abs(table.back().second - exact200) < 0.02);
    CHECK(table.back().second > 0.5 * table.front().second - 0.02);

    // Demo system synchronizes: the n = 200 gap sits below twice the noise
    // floor, the W1 between two independent empirical laws from the same x.
    auto gap = stability_gap(demo, CirclePoint(0.1), CirclePoint(0.6), ns, 4000, 3);
    auto law_at = [&](CirclePoint x0, std::uint64_t seed) {
        std::vector<CirclePoint> pts;
        for (int s = 0; s < 4000; ++s)
            pts.push_back(simulate_chain(demo, x0, 200, seed * 100000 + std::uint64_t(s)).back());
        return EmpiricalMeasure::from_points(pts);
    };
    double noise = w1_circle(law_at(CirclePoint(0.1), 5), law_at(CirclePoint(0.1), 6));
    CHECK(gap.back().second < gap.front().second);
    CHECK(gap.back().second < 2.0 * noise);
}

TEST_CASE("uniqueness evidence") {
    auto idsys = Ifs::make({Homeo::rotation(0.0)}, {1.0});
    std::vector<CirclePoint> starts{CirclePoint(0.1), CirclePoint(0.4)};
    double w = uniqueness_evidence(idsys, starts, 1000, 3);
    CHECK(w == doctest::Approx(circ_dist(starts[0], starts[1])).epsilon(1e-9));

    auto demo = demo_like();
    std::vector<CirclePoint> five{CirclePoint(0.0), CirclePoint(0.2), CirclePoint(0.4),
                                  CirclePoint(0.6), CirclePoint(0.8)};
    CHECK(uniqueness_evidence(demo, five, 100000, 3) < 0.03);

    // Determinism.
    CHECK(uniqueness_evidence(demo, five, 10000, 3) == uniqueness_evidence(demo, five, 10000, 3));
}

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ifslab/circle.hpp"
#include "ifslab/errors.hpp"
#include "ifslab/rng.hpp"

namespace ifslab {

struct Atom {
    double pos;  // in [0,1)
    double w;    // > 0
};

// Weighted atoms on the circle, sorted by position, weights summing to 1.
// Coincident atoms may stay unmerged.
class EmpiricalMeasure {
public:
    EmpiricalMeasure() = default;

    static EmpiricalMeasure from_atoms(std::vector<Atom> atoms, bool renormalize = true);
    static EmpiricalMeasure from_points(const std::vector<CirclePoint>& pts);
    static EmpiricalMeasure dirac(CirclePoint x) { return from_atoms({{x.value, 1.0}}); }
    static EmpiricalMeasure uniform_grid(int n);

    std::span<const Atom> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    // Mass of the closed arc [start, end], endpoints inclusive.
    double arc_mass(const Arc& a) const;

    // Inner product <f, mu> for any evaluable f(CirclePoint)->double.
    template <class F>
    double integrate(const F& f) const {
        double s = 0.0;
        for (const Atom& a : atoms_) s += a.w * f(CirclePoint(a.pos));
        return s;
    }

    CirclePoint sample(RngStream& g) const;

private:
    std::vector<Atom> atoms_;
    std::vector<double> cum_;  // cum_[i] = total weight of atoms_[0..i]
};

// Exact Wasserstein-1 on the circle: min over a rotation offset s of the
// integrated |F_mu - F_nu - s|, with s a weighted median of the piecewise
// constant CDF difference.
double w1_circle(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

struct MaxGap {
    double length = 0.0;
    Arc arc;  // [atom, next atom] bracketing the widest atom-free stretch
};

// Longest atom-free arc; a single-atom measure reports length 1.
MaxGap max_gap(const EmpiricalMeasure& mu);

// Local maxima of sliding-window mass exceeding the threshold; an empty
// result is the no-empirical-atom verdict.
std::vector<Atom> atom_scan(const EmpiricalMeasure& mu, double window, double threshold);

// chi(x,y) = min(base[x,y], base[y,x]) for an empirical base measure,
// intended as the invariant measure of the inverse system.
class ChiMetric {
public:
    explicit ChiMetric(EmpiricalMeasure base) : base_(std::move(base)) {}
    double operator()(CirclePoint x, CirclePoint y) const {
        if (x.value == y.value) return 0.0;
        return std::min(base_.arc_mass(Arc{x, y}), base_.arc_mass(Arc{y, x}));
    }
    const EmpiricalMeasure& base() const { return base_; }

private:
    EmpiricalMeasure base_;
};

// chi-Lipschitz probe with constant 1: f(x) = chi(x, z0).
struct ChiProbe {
    const ChiMetric* chi;
    CirclePoint z0;
    double operator()(CirclePoint x) const { return (*chi)(x, z0); }
};

// CSV columns: position,weight. JSON: array of [position, weight] pairs.
void save_measure_csv(const EmpiricalMeasure& mu, const std::filesystem::path& path);
EmpiricalMeasure load_measure_csv(const std::filesystem::path& path);
std::string measure_to_json(const EmpiricalMeasure& mu);
EmpiricalMeasure measure_from_json(const std::string& text);

}  // namespace ifslab

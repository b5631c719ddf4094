#include "ifslab/measure.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace ifslab {

EmpiricalMeasure EmpiricalMeasure::from_atoms(std::vector<Atom> atoms, bool renormalize) {
    if (atoms.empty()) throw ValidationError("empirical measure needs at least one atom");
    double total = 0.0;
    for (auto& a : atoms) {
        if (!(a.w > 0.0)) throw ValidationError("empirical measure atom weights must be positive");
        a.pos = wrap01(a.pos);
        total += a.w;
    }
    if (renormalize) {
        for (auto& a : atoms) a.w /= total;
    } else if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("empirical measure weights do not sum to 1");
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.pos < b.pos; });
    EmpiricalMeasure m;
    m.atoms_ = std::move(atoms);
    m.cum_.resize(m.atoms_.size());
    double c = 0.0;
    for (std::size_t i = 0; i < m.atoms_.size(); ++i) {
        c += m.atoms_[i].w;
        m.cum_[i] = c;
    }
    return m;
}

EmpiricalMeasure EmpiricalMeasure::from_points(const std::vector<CirclePoint>& pts) {
    std::vector<Atom> atoms;
    atoms.reserve(pts.size());
    double w = 1.0 / double(pts.size());
    for (CirclePoint p : pts) atoms.push_back({p.value, w});
    return from_atoms(std::move(atoms), false);
}

EmpiricalMeasure EmpiricalMeasure::uniform_grid(int n) {
    std::vector<Atom> atoms;
    atoms.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i) atoms.push_back({double(i) / n, 1.0 / n});
    return from_atoms(std::move(atoms), false);
}

double EmpiricalMeasure::arc_mass(const Arc& a) const {
    double s = a.start.value;
    double e = a.end.value;
    auto lo = [&](double v) {
        return std::size_t(std::lower_bound(atoms_.begin(), atoms_.end(), v,
                                            [](const Atom& at, double x) { return at.pos < x; }) -
                           atoms_.begin());
    };
    auto hi = [&](double v) {
        return std::size_t(std::upper_bound(atoms_.begin(), atoms_.end(), v,
                                            [](double x, const Atom& at) { return x < at.pos; }) -
                           atoms_.begin());
    };
    auto range_mass = [&](std::size_t i, std::size_t j) {  // atoms_[i..j)
        if (j <= i) return 0.0;
        return cum_[j - 1] - (i > 0 ? cum_[i - 1] : 0.0);
    };
    if (s <= e) return range_mass(lo(s), hi(e));
    return range_mass(lo(s), atoms_.size()) + range_mass(0, hi(e));
}

CirclePoint EmpiricalMeasure::sample(RngStream& g) const {
    double u = g.next_double();
    std::size_t i = std::size_t(std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
    if (i >= atoms_.size()) i = atoms_.size() - 1;
    return CirclePoint(atoms_[i].pos);
}

double w1_circle(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    // Merge atom positions into breakpoints of H = F_mu - F_nu, collect the
    // piecewise-constant segment values weighted by segment lengths, take the
    // weighted median and integrate |H - median|.
    struct Ev {
        double pos;
        double jump;
    };
    std::vector<Ev> ev;
    ev.reserve(mu.size() + nu.size());
    for (const Atom& a : mu.atoms()) ev.push_back({a.pos, a.w});
    for (const Atom& a : nu.atoms()) ev.push_back({a.pos, -a.w});
    std::sort(ev.begin(), ev.end(), [](const Ev& a, const Ev& b) { return a.pos < b.pos; });

    struct Seg {
        double value;
        double len;
    };
    std::vector<Seg> segs;
    segs.reserve(ev.size() + 1);
    double h = 0.0;
    // Segment before the first breakpoint joins the wrap segment after the last.
    double first = ev.front().pos;
    std::size_t i = 0;
    while (i < ev.size()) {
        double p = ev[i].pos;
        while (i < ev.size() && ev[i].pos == p) h += ev[i++].jump;
        double next = (i < ev.size()) ? ev[i].pos : first + 1.0;
        if (next > p) segs.push_back({h, next - p});
    }

    std::vector<std::size_t> order(segs.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return segs[a].value < segs[b].value; });
    double acc = 0.0;
    double median = segs[order.back()].value;
    for (std::size_t j : order) {
        acc += segs[j].len;
        if (acc >= 0.5) {
            median = segs[j].value;
            break;
        }
    }
    double w = 0.0;
    for (const Seg& s : segs) w += s.len * std::abs(s.value - median);
    return w;
}

MaxGap max_gap(const EmpiricalMeasure& mu) {
    auto atoms = mu.atoms();
    MaxGap best;
    std::size_t n = atoms.size();
    bool single = true;
    for (std::size_t i = 1; i < n; ++i)
        if (atoms[i].pos != atoms[0].pos) single = false;
    if (single) {
        best.length = 1.0;
        best.arc = Arc{CirclePoint(atoms[0].pos), CirclePoint(atoms[0].pos)};
        return best;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double a = atoms[i].pos;
        double b = (i + 1 < n) ? atoms[i + 1].pos : atoms[0].pos + 1.0;
        double len = b - a;
        if (len > best.length) {
            best.length = len;
            best.arc = Arc{CirclePoint(a), CirclePoint(b)};
        }
    }
    return best;
}

std::vector<Atom> atom_scan(const EmpiricalMeasure& mu, double window, double threshold) {
    auto atoms = mu.atoms();
    std::size_t n = atoms.size();
    std::vector<double> wmass(n, 0.0);
    // Two-pointer sweep: mass of [pos_i, pos_i + window] with wraparound.
    std::size_t j = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (j < i) {
            j = i;
            acc = 0.0;
        }
        while (j < i + n) {
            double p = (j < n) ? atoms[j].pos : atoms[j - n].pos + 1.0;
            if (p - atoms[i].pos > window) break;
            acc += (j < n) ? atoms[j].w : atoms[j - n].w;
            ++j;
        }
        wmass[i] = acc;
        acc -= atoms[i].w;
    }
    std::vector<Atom> hits;
    for (std::size_t i = 0; i < n; ++i) {
        if (wmass[i] <= threshold) continue;
        bool local_max = true;
        // Suppress neighbours within one window of a stronger start.
        for (std::size_t d = 1; d < n && local_max; ++d) {
            std::size_t l = (i + n - d) % n;
            double dist = wrap01(atoms[i].pos - atoms[l].pos);
            if (dist > window) break;
            if (wmass[l] > wmass[i]) local_max = false;
        }
        for (std::size_t d = 1; d < n && local_max; ++d) {
            std::size_t r = (i + d) % n;
            double dist = wrap01(atoms[r].pos - atoms[i].pos);
            if (dist > window) break;
            if (wmass[r] >= wmass[i] && r != i) local_max = false;
        }
        if (local_max) hits.push_back({atoms[i].pos, wmass[i]});
    }
    return hits;
}

void save_measure_csv(const EmpiricalMeasure& mu, const std::filesystem::path& path) {
    std::ofstream out(path);
    out << "position,weight\n";
    char buf[64];
    for (const Atom& a : mu.atoms()) {
        auto r1 = std::to_chars(buf, buf + sizeof buf, a.pos);
        out.write(buf, r1.ptr - buf);
        out.put(',');
        auto r2 = std::to_chars(buf, buf + sizeof buf, a.w);
        out.write(buf, r2.ptr - buf);
        out.put('\n');
    }
}

EmpiricalMeasure load_measure_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open measure file: " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<Atom> atoms;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("bad measure row: " + line);
        Atom a{};
        auto r1 = std::from_chars(line.data(), line.data() + comma, a.pos);
        auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), a.w);
        if (r1.ec != std::errc{} || r2.ec != std::errc{})
            throw ParseError("bad measure row: " + line);
        atoms.push_back(a);
    }
    return EmpiricalMeasure::from_atoms(std::move(atoms));
}

std::string measure_to_json(const EmpiricalMeasure& mu) {
    nlohmann::json j = nlohmann::json::array();
    for (const Atom& a : mu.atoms()) j.push_back({a.pos, a.w});
    return j.dump();
}

EmpiricalMeasure measure_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::vector<Atom> atoms;
    for (const auto& e : j) atoms.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    return EmpiricalMeasure::from_atoms(std::move(atoms));
}

}  // namespace ifslab

#include "ifslab/config.hpp"

#include <fstream>
#include <sstream>

namespace ifslab {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

Homeo homeo_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "rotation") return Homeo::rotation(j.at("theta").get<double>());
    if (type == "arnold") return Homeo::arnold(j.at("theta").get<double>(), j.at("eps").get<double>());
    if (type == "pwl") {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : j.at("points"))
            pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        return Homeo::pwl(std::move(pts));
    }
    throw ValidationError("unknown map type: " + type);
}

json homeo_to_json(const Homeo& h) {
    switch (h.kind) {
        case Homeo::Kind::Rotation:
            return {{"type", "rotation"}, {"theta", h.theta}};
        case Homeo::Kind::Arnold:
            return {{"type", "arnold"}, {"theta", h.theta}, {"eps", h.eps}};
        case Homeo::Kind::Pwl: {
            json pts = json::array();
            for (std::size_t i = 0; i < h.px.size(); ++i)
                pts.push_back({h.px[i], wrap01(h.py[i])});
            return {{"type", "pwl"}, {"points", pts}};
        }
    }
    throw ValidationError("unserializable map");
}

Observable observable_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    double lip = j.value("lipschitz", -1.0);
    if (type == "harmonic") {
        auto cos_c = j.value("cos", std::vector<double>{});
        auto sin_c = j.value("sin", std::vector<double>{});
        return Observable::harmonic(cos_c, sin_c, lip);
    }
    if (type == "pwl") {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : j.at("points"))
            pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        return Observable::pwl_fn(std::move(pts), lip);
    }
    throw ValidationError("unknown observable type: " + type);
}

json observable_to_json(const Observable& f) {
    if (f.kind == Observable::Kind::Harmonic)
        return {{"type", "harmonic"}, {"cos", f.cos_coef}, {"sin", f.sin_coef},
                {"lipschitz", f.lipschitz}};
    json pts = json::array();
    for (std::size_t i = 0; i < f.fx.size(); ++i) pts.push_back({f.fx[i], f.fy[i]});
    return {{"type", "pwl"}, {"points", pts}, {"lipschitz", f.lipschitz}};
}

const Observable& SystemSpec::observable(std::size_t i) const {
    if (i >= observables.size()) throw ValidationError("observable index out of range");
    return observables[i];
}

namespace {

json defaults_for(const json& in) {
    json d = in;
    d["schema_version"] = kSchemaVersion;
    if (!d.contains("observables") || d["observables"].empty())
        d["observables"] = json::array({{{"type", "harmonic"}, {"cos", {1.0}}, {"sin", json::array()}}});
    json& b = d["budgets"];
    if (!b.is_object()) b = json::object();
    if (!b.contains("node_budget")) b["node_budget"] = kDefaultNodeBudget;
    if (!b.contains("atom_cap")) b["atom_cap"] = kDefaultAtomCap;
    if (!b.contains("word_budget")) b["word_budget"] = std::uint64_t(1) << 20;

    auto fill = [&](const char* sub, json defaults) {
        json& s = d[sub];
        if (!s.is_object()) s = json::object();
        for (auto& [key, val] : defaults.items())
            if (!s.contains(key)) s[key] = val;
    };
    fill("validate", {{"grid_n", 1024}});
    fill("simulate", {{"x0", 0.0}, {"steps", 1000}});
    fill("stationary", {{"x0", 0.0}, {"burn_in", 1000}, {"count", 100000}, {"thinning", 1}});
    fill("dual", {{"x", 0.1}, {"n", 10}, {"mode", "exact"}, {"samples", 20000}});
    fill("eprop", {{"x", 0.2},
                   {"deltas", {0.1, 0.01, 0.001, 0.0001}},
                   {"n_max", 14},
                   {"mode", "exact"},
                   {"samples", 2000}});
    fill("sync", {{"arc_count", 16},
                  {"arc_length", 0.1},
                  {"depth", 24},
                  {"trials", 2000},
                  {"m_max", 12},
                  {"x_grid", 64}});
    fill("stability",
         {{"x", 0.1}, {"y", 0.6}, {"n_list", {1, 5, 25, 100, 200}}, {"samples", 4000}});
    fill("unique", {{"starts", {0.0, 0.2, 0.4, 0.6, 0.8}}, {"n", 1000000}});
    fill("mw", {{"n_list", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18}},
                {"x_count", 64},
                {"mode", "exact"},
                {"mc_samples", 20000}});
    fill("clt", {{"n", 10000},
                 {"n2", 40000},
                 {"replicates", 2000},
                 {"burn_in", 1000},
                 {"x", 0.0},
                 {"t_list", {0.5, 1.0, 2.0}},
                 {"charfn_n_list", {100, 1000, 10000}},
                 {"observable", 0},
                 {"center_steps", 20000000},
                 {"center_bins", 65536}});
    fill("couple", {{"transcripts", 1000},
                    {"n", 200},
                    {"x", 0.1},
                    {"y", 0.6},
                    {"tail_horizon", 64},
                    {"m", -1},
                    {"q", -1.0},
                    {"arc", json::array()},
                    {"n_list", {10, 25, 50, 100, 200}},
                    {"gap_replicates", 400},
                    {"dump_transcripts", 3}});
    return d;
}

}  // namespace

SystemSpec parse_config(const std::string& text) {
    json in;
    try {
        in = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config parse failed: ") + e.what());
    }
    if (!in.contains("maps") || !in["maps"].is_array() || in["maps"].empty())
        throw ValidationError("config needs a non-empty 'maps' array");
    if (!in.contains("probs") || !in["probs"].is_array())
        throw ValidationError("config needs a 'probs' array");

    SystemSpec spec;
    try {
        for (const auto& m : in["maps"]) spec.maps.push_back(homeo_from_json(m));
        spec.probs = in["probs"].get<std::vector<double>>();
        json d = defaults_for(in);
        for (const auto& o : d["observables"]) spec.observables.push_back(observable_from_json(o));
        spec.node_budget = d["budgets"]["node_budget"].get<std::uint64_t>();
        spec.atom_cap = d["budgets"]["atom_cap"].get<std::size_t>();
        spec.word_budget = d["budgets"]["word_budget"].get<std::uint64_t>();
        spec.normalized = d;
    } catch (const json::exception& e) {
        throw ParseError(std::string("config field error: ") + e.what());
    }

    // Invariant checks: the ifs must be well formed and every lift valid.
    Ifs::make(spec.maps, spec.probs);
    int grid = spec.normalized["validate"]["grid_n"].get<int>();
    for (std::size_t i = 0; i < spec.maps.size(); ++i) {
        auto rep = validate_homeo(spec.maps[i], grid);
        if (!rep.pass) {
            std::ostringstream os;
            os << "map " << i << " fails lift validation (monotonicity margin "
               << rep.monotonicity_margin << ", degree error " << rep.degree_error << ")";
            throw ValidationError(os.str());
        }
    }
    for (std::size_t i = 0; i < spec.observables.size(); ++i) {
        const Observable& f = spec.observables[i];
        if (f.lipschitz_ratio() > f.lipschitz * (1.0 + 1e-6) + 1e-9) {
            std::ostringstream os;
            os << "observable " << i << " exceeds its declared Lipschitz constant";
            throw ValidationError(os.str());
        }
    }
    spec.config_hash = fnv1a_hex(text);
    return spec;
}

SystemSpec load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

nlohmann::json emit(const SystemSpec& spec) {
    json d = spec.normalized;
    d["maps"] = json::array();
    for (const Homeo& h : spec.maps) d["maps"].push_back(homeo_to_json(h));
    d["probs"] = spec.probs;
    d["observables"] = json::array();
    for (const Observable& f : spec.observables) d["observables"].push_back(observable_to_json(f));
    return d;
}

}  // namespace ifslab

#include "ifslab/runner.hpp"

#include <charconv>
#include <fstream>

#include "ifslab/clt.hpp"
#include "ifslab/coupling.hpp"
#include "ifslab/diagnostics.hpp"
#include "ifslab/parallel.hpp"
#include "ifslab/stats.hpp"

namespace ifslab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

json report_header(const SystemSpec& spec, const RunOptions& opt) {
    return {{"schema_version", kSchemaVersion},
            {"tool_version", kToolVersion},
            {"config_hash", spec.config_hash},
            {"master_seed", opt.master_seed},
            {"subcommand", opt.subcommand},
            {"workers_independent", true}};
}

std::string csv_header(const SystemSpec& spec, const RunOptions& opt) {
    std::string s;
    s += "# tool_version=" + std::string(kToolVersion) + "\n";
    s += "# config_hash=" + spec.config_hash + "\n";
    s += "# master_seed=" + std::to_string(opt.master_seed) + "\n";
    s += "# subcommand=" + opt.subcommand + "\n";
    return s;
}

void write_report(const SystemSpec& spec, const RunOptions& opt, const json& body,
                  const std::string& csv_table = "") {
    json rep = report_header(spec, opt);
    rep["report"] = body;
    write_text(opt.out_dir / (opt.subcommand + ".json"), rep.dump(2) + "\n");
    if (opt.format == "csv" && !csv_table.empty())
        write_text(opt.out_dir / (opt.subcommand + ".csv"), csv_header(spec, opt) + csv_table);
}

DualMode mode_of(const json& j) {
    std::string m = j.get<std::string>();
    if (m == "exact") return DualMode::Exact;
    if (m == "mc") return DualMode::MonteCarlo;
    throw ValidationError("mode must be 'exact' or 'mc'");
}

Arc arc_of(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ValidationError("arc must be [start, end]");
    return Arc{CirclePoint(j.at(0).get<double>()), CirclePoint(j.at(1).get<double>())};
}

// Contraction certificate plus hitting parameters; shared by sync and couple.
ContractionCertificate certified_sync(const SystemSpec& spec, const RunOptions& opt) {
    const json& sj = spec.normalized["sync"];
    Ifs sys = spec.ifs();
    auto arcs = default_candidate_arcs(sj["arc_count"].get<int>(), sj["arc_length"].get<double>());
    auto cert = contraction_certificate(sys, arcs, sj["depth"].get<int>(), sj["trials"].get<int>(),
                                        opt.master_seed, opt.workers);
    auto hit = hitting_parameters(sys, cert.I, sj["m_max"].get<int>(), sj["x_grid"].get<int>(),
                                  opt.master_seed, spec.node_budget, 4096, opt.workers);
    cert.m = hit.m;
    cert.hit_mass_hat = hit.hit_mass_hat;
    return cert;
}

json cert_json(const ContractionCertificate& c) {
    return {{"arc", {c.I.start.value, c.I.end.value}},
            {"q_hat", c.q_hat},
            {"q_ci_high", c.q_ci_high},
            {"depth", c.depth},
            {"mass_hat", c.mass_hat},
            {"mass_ci_low", c.mass_ci_low},
            {"mass_ci_high", c.mass_ci_high},
            {"contracting_paths", c.contracting_paths},
            {"trials", c.trials},
            {"m", c.m},
            {"hit_mass_hat", c.hit_mass_hat},
            {"alpha_hat", c.hit_mass_hat * c.mass_hat}};
}

int run_validate(const SystemSpec& spec, const RunOptions& opt) {
    int grid = spec.normalized["validate"]["grid_n"].get<int>();
    json rows = json::array();
    for (std::size_t i = 0; i < spec.maps.size(); ++i) {
        auto rep = validate_homeo(spec.maps[i], grid);
        rows.push_back({{"map", i},
                        {"pass", rep.pass},
                        {"monotonicity_margin", rep.monotonicity_margin},
                        {"degree_error", rep.degree_error},
                        {"grid_n", rep.grid_n}});
    }
    json obs = json::array();
    for (std::size_t i = 0; i < spec.observables.size(); ++i)
        obs.push_back({{"observable", i},
                       {"lipschitz", spec.observables[i].lipschitz},
                       {"worst_ratio", spec.observables[i].lipschitz_ratio()},
                       {"sup_norm", spec.observables[i].sup_norm()}});
    write_report(spec, opt, {{"maps", rows}, {"observables", obs}});
    return 0;
}

int run_simulate(const SystemSpec& spec, const RunOptions& opt) {
    const json& sj = spec.normalized["simulate"];
    auto traj = simulate_chain(spec.ifs(), CirclePoint(sj["x0"].get<double>()),
                               sj["steps"].get<int>(), opt.master_seed);
    json body = {{"steps", sj["steps"]}, {"x0", sj["x0"]}};
    std::string csv = "t,x\n";
    json jtraj = json::array();
    for (std::size_t t = 0; t < traj.size(); ++t) {
        jtraj.push_back(traj[t].value);
        csv += std::to_string(t) + "," + fmt(traj[t].value) + "\n";
    }
    body["trajectory"] = jtraj;
    write_report(spec, opt, body, csv);
    return 0;
}

int run_stationary(const SystemSpec& spec, const RunOptions& opt) {
    const json& sj = spec.normalized["stationary"];
    auto mu = stationary_sample(spec.ifs(), sj["burn_in"].get<int>(), sj["count"].get<int>(),
                                sj["thinning"].get<int>(), opt.master_seed,
                                CirclePoint(sj["x0"].get<double>()));
    auto gap = max_gap(mu);
    auto atoms = atom_scan(mu, 1e-4, 1e-2);
    json jatoms = json::array();
    for (const Atom& a : atoms) jatoms.push_back({a.pos, a.w});
    save_measure_csv(mu, opt.out_dir / "stationary_measure.csv");
    write_report(spec, opt,
                 {{"count", sj["count"]},
                  {"burn_in", sj["burn_in"]},
                  {"max_gap", gap.length},
                  {"max_gap_arc", {gap.arc.start.value, gap.arc.end.value}},
                  {"atom_hits", jatoms},
                  {"measure_file", "stationary_measure.csv"}});
    return 0;
}

int run_dual(const SystemSpec& spec, const RunOptions& opt) {
    const json& sj = spec.normalized["dual"];
    Ifs sys = spec.ifs();
    const Observable& f = spec.observable();
    CirclePoint x(sj["x"].get<double>());
    int n = sj["n"].get<int>();
    json body = {{"x", x.value}, {"n", n}};
    std::string csv = "m,partial_sum\n";
    if (mode_of(sj["mode"]) == DualMode::Exact) {
        auto sums = dual_sum_exact(sys, f, x, n, spec.node_budget);
        body["exact"] = dual_exact(sys, f, x, n, spec.node_budget);
        json js = json::array();
        for (std::size_t i = 0; i < sums.size(); ++i) {
            js.push_back(sums[i]);
            csv += std::to_string(i + 1) + "," + fmt(sums[i]) + "\n";
        }
        body["partial_sums"] = js;
    }
    auto mc = dual_mc(sys, f, x, n, sj["samples"].get<int>(), opt.master_seed, opt.workers);
    body["mc_estimate"] = mc.estimate;
    body["mc_std_error"] = mc.std_error;
    write_report(spec, opt, body, csv);
    return 0;
}

int run_eprop(const SystemSpec& spec, const RunOptions& opt) {
    const json& sj = spec.normalized["eprop"];
    Ifs sys = spec.ifs();
    const Observable& f = spec.observable();
    CirclePoint x(sj["x"].get<double>());
    std::vector<double> deltas = sj["deltas"].get<std::vector<double>>();
    int n_max = sj["n_max"].get<int>();
    DualMode mode = mode_of(sj["mode"]);
    int samples = sj["samples"].get<int>();
    auto ep = e_property_profile(sys, f, x, deltas, n_max, mode, samples, opt.master_seed,
                                 spec.node_budget, opt.workers);
    auto cp = cesaro_profile(sys, f, x, deltas, n_max, mode, samples, opt.master_seed,
                             spec.node_budget, opt.workers);
    json rows = json::array();
    std::string csv = "delta,n,gap,cesaro_gap\n";
    for (std::size_t d = 0; d < deltas.size(); ++d) {
        rows.push_back({{"delta", deltas[d]},
                        {"sup_gap", ep.rows[d].sup_gap},
                        {"cesaro_sup_gap", cp.rows[d].sup_gap},
                        {"per_n", ep.rows[d].per_n},
                        {"cesaro_per_n", cp.rows[d].per_n}});
        for (int n = 1; n <= n_max; ++n)
            csv += fmt(deltas[d]) + "," + std::to_string(n) + "," +
                   fmt(ep.rows[d].per_n[std::size_t(n - 1)]) + "," +
                   fmt(cp.rows[d].per_n[std::size_t(n - 1)]) + "\n";
    }
    write_report(spec, opt, {{"x", x.value}, {"n_max", n_max}, {"rows", rows}}, csv);
    return 0;
}

int run_sync(const SystemSpec& spec, const RunOptions& opt) {
    try {
        auto cert = certified_sync(spec, opt);
        write_report(spec, opt, {{"found", true}, {"certificate", cert_json(cert)}});
        return 0;
    } catch (const NoContractionFound& e) {
        write_report(spec, opt, {{"found", false}, {"error", e.what()}});
        return 2;
    }
}

int run_stability(const SystemSpec& spec, const RunOptions& opt) {
    const json& sj = spec.normalized["stability"];
    auto table = stability_gap(spec.ifs(), CirclePoint(sj["x"].get<double>()),
                               CirclePoint(sj["y"].get<double>()),
                               sj["n_list"].get<std::vector<int>>(), sj["samples"].get<int>(),
                               opt.master_seed, opt.workers);
    json rows = json::array();
    std::string csv = "n,w1\n";
    for (auto [n, w] : table) {
        rows.push_back({{"n", n}, {"w1", w}});
        csv += std::to_string(n) + "," + fmt(w) + "\n";
    }
    write_report(spec, opt, {{"rows", rows}}, csv);
    return 0;
}

int run_unique(const SystemSpec& spec, const RunOptions& opt) {
    const json& sj = spec.normalized["unique"];
    std::vector<CirclePoint> starts;
    for (double s : sj["starts"].get<std::vector<double>>()) starts.push_back(CirclePoint(s));
    double worst = uniqueness_evidence(spec.ifs(), starts, sj["n"].get<long>(), opt.master_seed,
                                       opt.workers);
    write_report(spec, opt, {{"starts", sj["starts"]}, {"n", sj["n"]}, {"max_pairwise_w1", worst}});
    return 0;
}

int run_mw(const SystemSpec& spec, const RunOptions& opt) {
    const json& sj = spec.normalized["mw"];
    const json& cj = spec.normalized["clt"];
    Ifs sys = spec.ifs();
    auto mu = occupation_measure(sys, 2000, cj["center_steps"].get<long>(),
                                 cj["center_bins"].get<int>(), opt.master_seed);
    Observable f = center_observable(spec.observable(), mu);
    auto rep = mw_statistic(sys, f, sj["n_list"].get<std::vector<int>>(), sj["x_count"].get<int>(),
                            opt.master_seed, mode_of(sj["mode"]), mu, spec.node_budget,
                            sj["mc_samples"].get<int>(), opt.workers);
    json rows = json::array();
    std::string csv = "n,a_n,partial_series\n";
    for (std::size_t i = 0; i < rep.n_values.size(); ++i) {
        rows.push_back({{"n", rep.n_values[i]}, {"a_n", rep.a_n[i]},
                        {"partial_series", rep.partial_series[i]}});
        csv += std::to_string(rep.n_values[i]) + "," + fmt(rep.a_n[i]) + "," +
               fmt(rep.partial_series[i]) + "\n";
    }
    write_report(spec, opt,
                 {{"rows", rows},
                  {"beta_growth_hat", rep.beta_growth_hat},
                  {"x_sample_count", rep.x_sample_count},
                  {"mode", sj["mode"]},
                  {"centering_offset", f.offset}},
                 csv);
    return 0;
}

int run_clt(const SystemSpec& spec, const RunOptions& opt) {
    const json& sj = spec.normalized["clt"];
    Ifs sys = spec.ifs();
    auto mu_a = occupation_measure(sys, 2000, sj["center_steps"].get<long>(),
                                   sj["center_bins"].get<int>(), opt.master_seed);
    auto mu_b = occupation_measure(sys, 2000, sj["center_steps"].get<long>(),
                                   sj["center_bins"].get<int>(), opt.master_seed + 1);
    Observable f =
        center_observable(spec.observable(std::size_t(sj["observable"].get<int>())), mu_a);
    double cerr = centering_error(spec.observable(std::size_t(sj["observable"].get<int>())), mu_a, mu_b);

    int replicates = sj["replicates"].get<int>();
    int burn = sj["burn_in"].get<int>();
    CirclePoint x(sj["x"].get<double>());
    json modes = json::array();
    std::string csv = "start_mode,n,sigma2_raw,sigma2_centered,ks_stat,p_value\n";
    for (StartMode mode : {StartMode::Stationary, StartMode::Fixed}) {
        const char* mname = (mode == StartMode::Stationary) ? "stationary" : "fixed";
        for (int n : {sj["n"].get<int>(), sj["n2"].get<int>()}) {
            auto samples = sn_star_samples(sys, f, n, replicates, burn, mode, x,
                                           opt.master_seed + (mode == StartMode::Fixed ? 7 : 0) + n,
                                           opt.workers);
            CLTReport rep;
            rep.n = n;
            rep.replicates = replicates;
            rep.centering_error = cerr;
            rep.start_mode = mode;
            rep.start_x = x;
            json entry = {{"start_mode", mname}, {"n", rep.n}, {"replicates", rep.replicates}};
            try {
                auto s2 = sigma2_estimate(samples);
                auto ks = normality_test(samples, s2.centered);
                rep.sigma2_hat = s2.centered;
                rep.ks_stat = ks.ks_stat;
                rep.p_value = ks.p_value;
                entry["sigma2_raw"] = s2.raw;
                entry["sigma2_centered"] = rep.sigma2_hat;
                entry["ks_stat"] = rep.ks_stat;
                entry["p_value"] = rep.p_value;
                csv += std::string(mname) + "," + std::to_string(n) + "," + fmt(s2.raw) + "," +
                       fmt(rep.sigma2_hat) + "," + fmt(rep.ks_stat) + "," + fmt(rep.p_value) + "\n";
            } catch (const DegenerateSample& e) {
                entry["degenerate"] = e.what();
            }
            modes.push_back(entry);
        }
    }
    auto cf = charfn_gap(sys, f, x, sj["charfn_n_list"].get<std::vector<int>>(),
                         sj["t_list"].get<std::vector<double>>(), replicates, burn,
                         opt.master_seed, opt.workers);
    json cfj = json::array();
    for (std::size_t ni = 0; ni < cf.n_values.size(); ++ni)
        for (std::size_t ti = 0; ti < cf.t_values.size(); ++ti)
            cfj.push_back({{"n", cf.n_values[ni]}, {"t", cf.t_values[ti]}, {"gap", cf.gap[ni][ti]}});
    write_report(spec, opt,
                 {{"results", modes}, {"charfn_gap", cfj}, {"centering_error", cerr},
                  {"centering_offset", f.offset}},
                 csv);
    return 0;
}

int run_couple(const SystemSpec& spec, const RunOptions& opt) {
    const json& sj = spec.normalized["couple"];
    Ifs sys = spec.ifs();
    if (!sys.equal_weights()) {
        std::vector<int> denoms;
        for (int d = 1; d <= 64; ++d) denoms.push_back(d);
        sys = uniformize(sys, denoms);
    }

    Arc I;
    int m = sj["m"].get<int>();
    double q = sj["q"].get<double>();
    double alpha_hat;
    json cert_info;
    if (sj["arc"].is_array() && sj["arc"].size() == 2 && m > 0 && q > 0.0) {
        I = arc_of(sj["arc"]);
        alpha_hat = sj.value("alpha_hat", 0.05);
        cert_info = {{"source", "config"}};
    } else {
        auto cert = certified_sync(spec, opt);
        I = cert.I;
        m = cert.m > 0 ? cert.m : 1;
        q = cert.q_hat;
        alpha_hat = cert.hit_mass_hat * cert.mass_hat;
        cert_info = cert_json(cert);
    }

    int transcripts_n = sj["transcripts"].get<int>();
    int n = sj["n"].get<int>();
    int horizon = sj["tail_horizon"].get<int>();
    CirclePoint x(sj["x"].get<double>());
    CirclePoint y(sj["y"].get<double>());

    std::uint64_t op_seed = salt_seed(opt.master_seed, 0x636f7570ull /* "coup" */);
    std::vector<CouplingTranscript> ts(static_cast<std::size_t>(transcripts_n));
    parallel_for(std::size_t(transcripts_n), opt.workers, [&](std::size_t i) {
        ts[i] = pairing_sampler(sys, x, y, I, m, n, q, horizon, op_seed + i, spec.word_budget);
    });

    const Observable& f = spec.observable();
    long violations = 0;
    double worst_ratio = 0.0;
    long coupled = 0;
    for (const auto& t : ts) {
        auto p3 = verify_p3(t, sys, f);
        violations += p3.violations;
        worst_ratio = std::max(worst_ratio, p3.worst_ratio);
        coupled += t.coupled;
    }
    auto survival = block_tail_stats(ts, alpha_hat);
    json surv = json::array();
    std::string csv = "l,empirical_survival,envelope\n";
    for (const auto& row : survival) {
        surv.push_back({{"l", row.l}, {"empirical", row.empirical}, {"envelope", row.envelope}});
        csv += std::to_string(row.l) + "," + fmt(row.empirical) + "," + fmt(row.envelope) + "\n";
    }

    auto gap_rows = paired_sum_gap(sys, f, x, y, sj["n_list"].get<std::vector<int>>(),
                                   sj.value("gap_replicates", 400), I, m, q,
                                   horizon, opt.master_seed, opt.workers);
    json jgaps = json::array();
    for (const auto& r : gap_rows)
        jgaps.push_back({{"n", r.n}, {"mean_abs", r.mean_abs}, {"mean_signed", r.mean_signed},
                         {"stderr_abs", r.stderr_abs}, {"stderr_signed", r.stderr_signed}});

    int dump = std::min<int>(sj["dump_transcripts"].get<int>(), transcripts_n);
    json jts = json::array();
    for (int i = 0; i < dump; ++i) {
        const auto& t = ts[std::size_t(i)];
        json jb = json::array();
        for (const auto& b : t.blocks)
            jb.push_back({{"w", b.w}, {"w_prime", b.w_prime}, {"success", b.success},
                          {"tail_len", b.tail_len}, {"tail_survived", b.tail_survived}});
        jts.push_back({{"x", t.x.value}, {"y", t.y.value},
                       {"arc", {t.I.start.value, t.I.end.value}},
                       {"m", t.m}, {"q", t.q}, {"gamma", t.gamma()},
                       {"tail_horizon", t.tail_horizon},
                       {"level", t.level}, {"coupled", t.coupled},
                       {"coupled_at_block", t.coupled_at_block},
                       {"omega", t.omega}, {"omega_prime", t.omega_prime},
                       {"blocks", jb}});
    }

    write_report(spec, opt,
                 {{"certificate", cert_info},
                  {"arc", {I.start.value, I.end.value}},
                  {"m", m}, {"q", q}, {"alpha_hat", alpha_hat},
                  {"transcripts", transcripts_n},
                  {"n", n},
                  {"coupled_fraction", double(coupled) / transcripts_n},
                  {"p3_violations", violations},
                  {"p3_worst_ratio", worst_ratio},
                  {"survival", surv},
                  {"paired_gap", jgaps},
                  {"transcript_dump", jts}},
                 csv);
    return 0;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {"validate",  "simulate", "stationary", "dual",
                                                   "eprop",     "sync",     "stability",  "unique",
                                                   "mw",        "clt",      "couple"};
    return names;
}

int run_subcommand(const SystemSpec& spec, const RunOptions& opt) {
    fs::create_directories(opt.out_dir);
    const std::string& s = opt.subcommand;
    if (s == "validate") return run_validate(spec, opt);
    if (s == "simulate") return run_simulate(spec, opt);
    if (s == "stationary") return run_stationary(spec, opt);
    if (s == "dual") return run_dual(spec, opt);
    if (s == "eprop") return run_eprop(spec, opt);
    if (s == "sync") return run_sync(spec, opt);
    if (s == "stability") return run_stability(spec, opt);
    if (s == "unique") return run_unique(spec, opt);
    if (s == "mw") return run_mw(spec, opt);
    if (s == "clt") return run_clt(spec, opt);
    if (s == "couple") return run_couple(spec, opt);
    throw ValidationError("unknown subcommand: " + s);
}

}  // namespace ifslab

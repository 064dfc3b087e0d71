#include "expwalk/runner.hpp"

#include "expwalk/dioph.hpp"
#include "expwalk/error.hpp"
#include "expwalk/expansion.hpp"
#include "expwalk/fractal.hpp"
#include "expwalk/kau.hpp"
#include "expwalk/lattices.hpp"
#include "expwalk/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace expwalk {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw DomainError("cli", "run", what); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) bad("config must be a JSON object");
    ExperimentConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") {
            c.kind = value.get<std::string>();
        } else if (key == "params") {
            if (!value.is_object()) bad("params must be an object");
            c.params = value;
        } else if (key == "seed") {
            c.seed = value.get<std::uint64_t>();
        } else if (key == "output") {
            c.output = value.get<std::string>();
        } else {
            bad("unknown config key '" + key + "'");
        }
    }
    return c;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return from_json(json::parse(text));
    json top = json::object(), params = json::object();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) bad("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string raw = trim(line.substr(eq + 1));
        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded()) value = raw;
        if (key == "kind" || key == "seed" || key == "output") {
            top[key] = value;
        } else {
            params[key] = value;
        }
    }
    top["params"] = params;
    return from_json(top);
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

json ExperimentConfig::to_json() const {
    return {{"kind", kind}, {"params", params}, {"seed", seed}, {"output", output}};
}

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds{"expand-cert", "cone",   "walk",        "height",     "recur",
                                                "kau",         "sponge", "dioph-brute", "dioph-flow", "dioph-fractal"};
    return kinds;
}

json default_params(const std::string& kind) {
    if (kind == "expand-cert")
        return {{"measure", nullptr},   {"rep", "std"},           {"N", 1},         {"scan", false},
                {"force_monte_carlo", false}, {"sphere_samples", 1000}, {"mc_words", 20000},
                {"confidence", 0.95},   {"cap", 1000000},         {"sweep_k", 0}};
    if (kind == "cone") return {{"blocks", nullptr}, {"logs", nullptr}, {"k", 0}};
    if (kind == "walk")
        return {{"measure", nullptr}, {"x0", nullptr}, {"steps", 1000}, {"observables", {"siegel:1"}},
                {"eps", 0.1},         {"delta", 0.3},  {"columns", json::array()}};
    if (kind == "height")
        return {{"measure", nullptr}, {"eps", 0.1},      {"delta", 0.3},    {"m_max", 8},    {"n_points", 200},
                {"max_burst", 20},    {"log_spread", 2.0}, {"mc_trials", 200}, {"cusp_level", 1.0}};
    if (kind == "recur")
        return {{"measure", nullptr}, {"eps", 0.1},        {"delta_height", 0.3}, {"delta", 0.1},
                {"x0", nullptr},      {"n_grid", {10, 20, 40, 80, 160}},         {"mc_trials", 200},
                {"m_max", 8},         {"n_points", 200},   {"max_burst", 20},      {"log_spread", 2.0}};
    if (kind == "kau")
        return {{"measure", nullptr}, {"ifs", nullptr}, {"profile", nullptr}, {"len", 20},
                {"tol", 1e-12},       {"n_max", 100000}};
    if (kind == "sponge")
        return {{"bases", nullptr}, {"pattern", nullptr}, {"mode", "corollary"}, {"symbol_weights", json::array()}};
    if (kind == "dioph-brute")
        return {{"M", nullptr}, {"weights", nullptr}, {"T_max", 1000.0}, {"T_min", -1.0}, {"T_values", json::array()}};
    if (kind == "dioph-flow")
        return {{"M", nullptr},     {"weights", nullptr},    {"t_max", 30.0},     {"dt", 0.05},
                {"siegel_R", 1.0},  {"record_siegel", false}, {"classify", false},
                {"eps_grid", {0.05, 0.1, 0.2}}, {"badly_threshold", 0.1}};
    if (kind == "dioph-fractal")
        return {{"ifs", nullptr},      {"bases", nullptr},      {"pattern", nullptr},  {"weights", nullptr},
                {"n_points", 100},     {"t_max", 20.0},         {"t_max_list", json::array()},
                {"dt", 0.05},          {"brute_T", 1000.0},     {"thresholds", {0.1, 0.15, 0.2, 0.3}},
                {"eps_grid", {0.05, 0.1, 0.2}}, {"badly_threshold", 0.1}, {"siegel_R", 1.0}};
    bad("unknown experiment kind '" + kind + "'");
}

json resolve_params(const std::string& kind, const json& params) {
    json out = default_params(kind);
    for (const auto& [key, value] : params.items()) {
        if (!out.contains(key)) bad("unknown parameter '" + key + "' for kind " + kind);
        out[key] = value;
    }
    static const std::map<std::string, std::vector<std::string>> required{
        {"expand-cert", {"measure"}}, {"cone", {"blocks", "logs"}}, {"walk", {"measure"}},
        {"height", {"measure"}},      {"recur", {"measure"}},       {"sponge", {"bases", "pattern"}},
        {"dioph-brute", {"M"}},       {"dioph-flow", {"M"}}};
    if (auto it = required.find(kind); it != required.end())
        for (const auto& key : it->second)
            if (out[key].is_null()) bad("missing required parameter '" + key + "' for kind " + kind);
    return out;
}

namespace {

Mat mat2(double a, double b, double c, double d) {
    Mat g(2, 2);
    g << a, b, c, d;
    return g;
}

Mat embed(const Mat& block, int d) {
    Mat g = Mat::Identity(d, d);
    g.topLeftCorner(block.rows(), block.cols()) = block;
    return g;
}

AffineIFS preset_ifs(const std::string& name) {
    if (name == "cantor") return sponge_builder({3}, {{0}, {2}});
    if (name == "carpet23") return sponge_builder({2, 3}, {{0, 0}, {1, 1}, {0, 2}});
    bad("unknown IFS preset '" + name + "'");
}

AffineIFS ifs_param(const json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "cantor" || s == "carpet23") return preset_ifs(s);
        return load_ifs(s);
    }
    return ifs_from_json(v);
}

/// Named measures used throughout the examples.
GroupMeasure preset_measure(const std::string& name) {
    if (name == "positive-pair") return GroupMeasure::uniform({mat2(2, 1, 1, 1), mat2(1, 1, 1, 2)});
    if (name == "sl4-five") {
        Mat u23 = Mat::Identity(4, 4), u34 = Mat::Identity(4, 4);
        u23(1, 2) = 1;
        u34(2, 3) = 1;
        Mat diag = Mat::Zero(4, 4);
        diag.diagonal() << 2, 2, 1, 0.25;
        return GroupMeasure::uniform({diag, embed(mat2(2, 1, 1, 1), 4), embed(mat2(1, 1, 1, 2), 4), u23, u34});
    }
    if (name == "diag3") return GroupMeasure::dirac(mat2(3, 0, 0, 1.0 / 3));
    if (name == "identity2") return GroupMeasure::dirac(Mat::Identity(2, 2));
    if (name == "cantor" || name == "carpet23") return ifs_to_measure(preset_ifs(name));
    bad("unknown measure preset '" + name + "'");
}

GroupMeasure measure_param(const json& v, std::uint64_t seed) {
    GroupMeasure mu;
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        static const std::vector<std::string> presets{"positive-pair", "sl4-five", "diag3", "identity2", "cantor", "carpet23"};
        mu = std::find(presets.begin(), presets.end(), s) != presets.end() ? preset_measure(s) : load_measure(s);
    } else {
        mu = measure_from_json(v);
    }
    GroupMeasure out(mu.atoms(), seed);
    if (mu.profile()) out.set_profile(*mu.profile());
    return out;
}

WeightPair weights_param(const json& v, int m, int n) {
    if (v.is_null()) return WeightPair::uniform(m, n);
    return WeightPair(v.at("r").get<std::vector<double>>(), v.at("s").get<std::vector<double>>());
}

HpMatrix hp_matrix_param(const json& v) {
    if (v.is_string() && v.get<std::string>() == "golden") {
        HpMatrix M(1, 1);
        M(0, 0) = (sqrt(hp_real(5)) - 1) / 2;
        return M;
    }
    json rows = v;
    if (rows.is_array() && !rows.empty() && !rows[0].is_array()) rows = json::array({rows});
    if (!rows.is_array() || rows.empty()) bad("M must be a matrix (array of rows)");
    const int r = static_cast<int>(rows.size()), c = static_cast<int>(rows[0].size());
    HpMatrix M(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c) bad("M rows have unequal length");
        for (int j = 0; j < c; ++j) {
            const auto& e = rows[i][j];
            M(i, j) = e.is_string() ? hp_real(e.get<std::string>()) : hp_real(e.get<double>());
        }
    }
    return M;
}

UnimodularLattice lattice_param(const json& v, int d) {
    if (v.is_null()) return UnimodularLattice::standard(d);
    const Mat b = matrix_from_json(v);
    if (b.rows() != d || b.cols() != d) bad("x0 must be a d x d basis matching the measure");
    return lll_reduce(b);
}

Observable observable_param(const std::string& s, const HeightSpec& h) {
    Observable o;
    auto param = [&](const std::string& prefix) {
        try {
            return std::stod(s.substr(prefix.size()));
        } catch (const std::exception&) {
            bad("bad observable '" + s + "'");
        }
    };
    if (s == "height") {
        o.kind = Observable::Kind::Height;
        o.height = h;
    } else if (s.rfind("mahler:", 0) == 0) {
        o.kind = Observable::Kind::Mahler;
        o.param = param("mahler:");
    } else if (s.rfind("siegel:", 0) == 0) {
        o.kind = Observable::Kind::Siegel;
        o.param = param("siegel:");
    } else if (s == "shortest_sup") {
        o.kind = Observable::Kind::ShortestSup;
    } else if (s == "shortest_euclid") {
        o.kind = Observable::Kind::ShortestEuclid;
    } else {
        bad("unknown observable '" + s + "' (height, mahler:EPS, siegel:R, shortest_sup, shortest_euclid)");
    }
    return o;
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json cert_json(const ExpansionCertificate& c) {
    return {{"N", c.N},
            {"C_lower", c.C_lower},
            {"C_estimate", c.C_estimate},
            {"mode", c.mode == CertMode::Exact ? "exact" : "monte_carlo"},
            {"confidence", c.confidence},
            {"sphere_samples", c.sphere_samples},
            {"words", c.words},
            {"rep_dim", c.rep_dim},
            {"witness", vec_json(c.witness)},
            {"pass", c.pass()},
            {"verdict", c.verdict()}};
}

json fit_json(const ContractionFit& f) {
    return {{"m", f.m},           {"a_hat", f.a_hat},        {"b_hat", f.b_hat},
            {"violations", f.violations}, {"cusp_points", f.cusp_points}, {"exact", f.exact},
            {"success", f.success}};
}

std::vector<double> dvec(const json& v) { return v.get<std::vector<double>>(); }

void run_expand_cert(const json& p, std::uint64_t seed, RunArtifacts& art) {
    const auto mu = measure_param(p["measure"], seed);
    CertificateOptions opts;
    opts.force_monte_carlo = p["force_monte_carlo"].get<bool>();
    opts.sphere_samples = p["sphere_samples"].get<long>();
    opts.mc_words = p["mc_words"].get<long>();
    opts.confidence = p["confidence"].get<double>();
    opts.cap = p["cap"].get<std::size_t>();
    opts.seed = seed;
    const int N = p["N"].get<int>();
    const int sweep = p["sweep_k"].get<int>();
    art.data.header = {"index", "N", "C_lower", "C_estimate", "mode", "pass"};
    auto row = [&](int index, const ExpansionCertificate& c) {
        art.data.add_row({std::to_string(index), std::to_string(c.N), csv_number(c.C_lower), csv_number(c.C_estimate),
                          c.mode == CertMode::Exact ? "exact" : "monte_carlo", c.pass() ? "1" : "0"});
    };
    if (sweep > 0) {
        SweepOptions so;
        so.cert = opts;
        so.N = N;
        const auto certs = relative_expansion_sweep(mu, sweep, so);
        json list = json::array();
        bool all = true;
        for (std::size_t k = 0; k < certs.size(); ++k) {
            row(static_cast<int>(k + 1), certs[k]);
            list.push_back(cert_json(certs[k]));
            all = all && certs[k].pass();
        }
        art.summary["sweep"] = list;
        art.summary["all_pass"] = all;
        return;
    }
    const auto rep = Representation::parse(p["rep"].get<std::string>());
    art.summary["rep"] = rep.name();
    json list = json::array();
    int first_pass = -1;
    for (int n = p["scan"].get<bool>() ? 1 : N; n <= N; ++n) {
        const auto c = expansion_certificate(mu, rep, n, opts);
        row(n, c);
        list.push_back(cert_json(c));
        if (c.pass() && first_pass < 0) first_pass = n;
        art.summary["certificate"] = cert_json(c);
    }
    art.summary["certificates"] = list;
    art.summary["first_pass_N"] = first_pass;
}

void run_cone(const json& p, RunArtifacts& art) {
    const ConeSpec spec(p["blocks"].get<std::vector<int>>());
    const CartanVector a(dvec(p["logs"]));
    if (a.dim() != spec.d) bad("logs length must equal the sum of the block sizes");
    const auto res = expanding_cone_membership(spec, a);
    art.data.header = {"i", "j", "coefficient"};
    json coeffs = json::array();
    for (const auto& [i, j, t] : res.coefficients) {
        art.data.add_row({std::to_string(i), std::to_string(j), csv_number(t)});
        coeffs.push_back({i, j, t});
    }
    art.summary["inside"] = res.inside;
    art.summary["tau"] = std::isfinite(res.tau) ? json(res.tau) : json(nullptr);
    art.summary["separator"] = vec_json(res.separator);
    art.summary["coefficients"] = coeffs;
    if (const int k = p["k"].get<int>(); k > 0) art.summary["a_expanding"] = a_expanding_check(spec, a, k);
}

void run_walk(const json& p, std::uint64_t seed, RunArtifacts& art) {
    const auto mu = measure_param(p["measure"], seed);
    const int d = mu.dim();
    const auto h = HeightSpec::standard(d, p["eps"].get<double>(), p["delta"].get<double>());
    std::vector<Observable> obs;
    for (const auto& s : p["observables"]) obs.push_back(observable_param(s.get<std::string>(), h));
    const auto cols = p["columns"].get<std::vector<std::string>>();
    art.data = emit_plotdata(TrajectoryRecord{}, cols);
    const auto rec = walk_simulate(mu, lattice_param(p["x0"], d), p["steps"].get<long>(), obs, seed);
    art.data = emit_plotdata(rec, cols);
    json fin = json::object();
    for (std::size_t o = 0; o < rec.names.size(); ++o)
        fin[rec.names[o]] = rec.running[o].empty() ? json(nullptr) : json(rec.running[o].back());
    art.summary["running_average_final"] = fin;
    art.summary["steps"] = rec.steps.size();
}

ContractionFit fit_for(const GroupMeasure& mu, const HeightSpec& h, const json& p, std::uint64_t seed,
                       std::vector<UnimodularLattice>* pts_out = nullptr) {
    const auto pts = sample_walk_points(mu, p["n_points"].get<int>(), p["max_burst"].get<int>(),
                                        p["log_spread"].get<double>(), subseed(seed, 1));
    ContractionOptions co;
    if (p.contains("cusp_level")) co.cusp_level = p["cusp_level"].get<double>();
    auto fit = contraction_search(mu, h, p["m_max"].get<int>(), pts, p["mc_trials"].get<int>(), subseed(seed, 2), co);
    if (pts_out) *pts_out = pts;
    return fit;
}

void run_height(const json& p, std::uint64_t seed, RunArtifacts& art) {
    const auto mu = measure_param(p["measure"], seed);
    const auto h = HeightSpec::standard(mu.dim(), p["eps"].get<double>(), p["delta"].get<double>());
    art.data.header = {"point", "beta", "a_beta", "ratio"};
    const auto fit = fit_for(mu, h, p, seed);
    for (std::size_t i = 0; i < fit.beta.size(); ++i)
        art.data.add_row({std::to_string(i), csv_number(fit.beta[i]), csv_number(fit.a_beta[i]),
                          csv_number(fit.a_beta[i] / fit.beta[i])});
    art.summary["fit"] = fit_json(fit);
    art.summary["kappa"] = h.kappa();
}

void run_recur(const json& p, std::uint64_t seed, RunArtifacts& art) {
    const auto mu = measure_param(p["measure"], seed);
    const auto h = HeightSpec::standard(mu.dim(), p["eps"].get<double>(), p["delta_height"].get<double>());
    art.data.header = {"n", "mass"};
    const auto fit = fit_for(mu, h, p, seed);
    art.summary["fit"] = fit_json(fit);
    if (!fit.success)
        throw ConvergenceError("cli", "recur", "no contraction fit found up to m_max; recurrence level undefined");
    const auto res = recurrence_experiment(mu, h, p["delta"].get<double>(), lattice_param(p["x0"], mu.dim()),
                                           p["n_grid"].get<std::vector<long>>(), p["mc_trials"].get<int>(),
                                           subseed(seed, 3), fit);
    for (std::size_t i = 0; i < res.n.size(); ++i)
        art.data.add_row({std::to_string(res.n[i]), csv_number(res.mass[i])});
    art.summary["level"] = res.level;
    art.summary["burn_in"] = res.burn_in;
    art.summary["beta_x0"] = res.beta_x0;
}

ParabolicProfile profile_param(const json& v) {
    const int m = v.at("m").get<int>(), n = v.at("n").get<int>();
    WeightPair w(v.at("r").get<std::vector<double>>(), v.at("s").get<std::vector<double>>());
    if (w.m() != m || w.n() != n) bad("profile weights do not match (m, n)");
    return ParabolicProfile(std::move(w));
}

void run_kau(const json& p, std::uint64_t seed, RunArtifacts& art) {
    GroupMeasure mu;
    if (!p["ifs"].is_null()) {
        mu = GroupMeasure(ifs_to_measure(ifs_param(p["ifs"])));
        const auto prof = mu.profile();
        mu = GroupMeasure(mu.atoms(), seed);
        if (prof) mu.set_profile(*prof);
    } else if (!p["measure"].is_null()) {
        mu = measure_param(p["measure"], seed);
    } else {
        bad("kau needs a measure or an ifs");
    }
    if (!p["profile"].is_null()) mu.set_profile(profile_param(p["profile"]));
    if (!mu.profile()) bad("kau needs a parabolic profile (profile parameter or measure profile)");
    const auto& prof = *mu.profile();
    const int len = p["len"].get<int>();
    const auto word = sample_word(mu, len, seed);
    const auto fac = word_factors(word, prof);
    art.data.header = {"step", "t"};
    for (int i = 0; i < prof.m; ++i)
        for (int j = 0; j < prof.n; ++j) art.data.header.push_back("M_" + std::to_string(i) + "_" + std::to_string(j));
    for (std::size_t s = 0; s < fac.size(); ++s) {
        std::vector<std::string> row{std::to_string(s + 1), csv_number(fac[s].t)};
        for (int i = 0; i < prof.m; ++i)
            for (int j = 0; j < prof.n; ++j) row.push_back(csv_number(fac[s].M(i, j)));
        art.data.add_row(std::move(row));
    }
    art.summary["lambda_total"] = fac.empty() ? 0.0 : fac.back().t;
    art.summary["lambda_average"] = lambda_average(mu, prof);
    art.summary["equivariance_residual"] = equivariance_residual(word, prof);
    try {
        const auto lim = u_limit(mu, seed, prof, p["tol"].get<double>(), p["n_max"].get<long>());
        art.summary["u_limit"] = {{"M", matrix_to_json(lim.M)}, {"n_used", lim.n_used}, {"converged", true}};
    } catch (const LimitConvergenceError& e) {
        art.summary["u_limit"] = {{"M", matrix_to_json(e.partial_M)}, {"n_used", e.steps_used}, {"converged", false}};
        throw;
    }
}

json ifs_summary(const AffineIFS& ifs) {
    json j = ifs_to_json(ifs);
    const auto irr = irreducibility_check(ifs);
    const auto val = ifs_validate(ifs, 4);
    return {{"ifs", j},
            {"irreducibility", to_string(irr.verdict)},
            {"irreducibility_detail", irr.detail},
            {"contracting_on_average", val.contracting_on_average},
            {"expected_log_norm", val.values}};
}

void run_sponge(const json& p, RunArtifacts& art) {
    const auto bases = p["bases"].get<std::vector<int>>();
    const auto pattern = p["pattern"].get<std::vector<std::vector<int>>>();
    const auto mode_s = p["mode"].get<std::string>();
    if (mode_s != "corollary" && mode_s != "custom") bad("mode must be corollary or custom");
    const auto adm = admissibility(bases);
    art.summary["admissible"] = adm.ok;
    art.summary["r_formula"] = adm.r;
    if (!adm.ok) art.summary["failing_inequality"] = adm.failing;
    art.data.header = {"symbol", "weight", "t"};
    const auto ifs = sponge_builder(bases, pattern, mode_s == "corollary" ? WeightsMode::Corollary : WeightsMode::Custom,
                                    dvec(p["symbol_weights"]));
    for (std::size_t i = 0; i < ifs.size(); ++i) {
        const double t = ifs.weightpair ? sponge_check(ifs.symbols[i], *ifs.weightpair).t : std::nan("");
        art.data.add_row({std::to_string(i), csv_number(ifs.weights[i]), csv_number(t)});
    }
    if (ifs.weightpair) art.summary["weights"] = {{"r", ifs.weightpair->r}, {"s", ifs.weightpair->s}};
    art.summary.update(ifs_summary(ifs));
}

void run_dioph_brute(const json& p, RunArtifacts& art) {
    const auto M = hp_matrix_param(p["M"]);
    const auto w = weights_param(p["weights"], M.rows, M.cols);
    auto Ts = dvec(p["T_values"]);
    if (Ts.empty()) Ts.push_back(p["T_max"].get<double>());
    art.data.header = {"T_max", "quality", "q", "p"};
    auto join = [](const std::vector<long>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
        return s;
    };
    json list = json::array();
    for (double T : Ts) {
        const auto b = brute_force_quality(M, w, T, p["T_min"].get<double>());
        art.data.add_row({csv_number(T), csv_number(b.quality), join(b.q), join(b.p)});
        list.push_back({{"T_max", T}, {"quality", b.quality}, {"q", b.q}, {"p", b.p}});
    }
    art.summary["results"] = list;
    art.summary["quality"] = list.back()["quality"];
}

json report_json(const ClassifyReport& r) {
    return {{"badly_approx_proxy", r.badly_approx_proxy}, {"badly_evidence", r.badly_evidence},
            {"dirichlet_proxy", r.dirichlet_proxy},       {"dirichlet_evidence", r.dirichlet_evidence},
            {"generic_proxy", r.generic_proxy},           {"generic_evidence", r.generic_evidence},
            {"siegel_average", r.siegel_average},         {"occupation_drift", r.occupation_drift}};
}

ClassifyOptions classify_opts(const json& p) {
    ClassifyOptions c;
    c.dt = p["dt"].get<double>();
    c.badly_threshold = p["badly_threshold"].get<double>();
    c.siegel_R = p["siegel_R"].get<double>();
    return c;
}

void run_dioph_flow(const json& p, RunArtifacts& art) {
    const auto M = hp_matrix_param(p["M"]);
    const auto w = weights_param(p["weights"], M.rows, M.cols);
    FlowOptions fo;
    fo.record_siegel = p["record_siegel"].get<bool>();
    fo.siegel_R = p["siegel_R"].get<double>();
    const double t_max = p["t_max"].get<double>();
    const auto tr = flow_trace(M, w, t_max, p["dt"].get<double>(), fo);
    art.data = emit_plotdata(tr, fo.record_siegel ? std::vector<std::string>{"t", "minima", "siegel"}
                                                  : std::vector<std::string>{"t", "minima"});
    art.summary["inf_minima"] = tr.inf_minima();
    art.summary["inf_minima_second_half"] = tr.inf_minima(t_max / 2);
    art.summary["grid_points"] = tr.t.size();
    if (p["classify"].get<bool>()) art.summary["classification"] = report_json(classify_point(M, w, t_max, dvec(p["eps_grid"]), classify_opts(p)));
}

std::string flags_of(const ClassifyReport& r) {
    std::string s;
    auto add = [&](bool on, const char* name) {
        if (on) s += (s.empty() ? "" : ";") + std::string(name);
    };
    add(r.badly_evidence, "badly");
    add(r.dirichlet_evidence, "dirichlet");
    add(r.generic_evidence, "generic");
    return s.empty() ? "none" : s;
}

void run_dioph_fractal(const json& p, std::uint64_t seed, RunArtifacts& art) {
    AffineIFS ifs;
    if (!p["ifs"].is_null()) {
        ifs = ifs_param(p["ifs"]);
    } else if (!p["bases"].is_null() && !p["pattern"].is_null()) {
        ifs = sponge_builder(p["bases"].get<std::vector<int>>(), p["pattern"].get<std::vector<std::vector<int>>>());
    } else {
        bad("dioph-fractal needs an ifs or bases + pattern");
    }
    WeightPair w;
    if (!p["weights"].is_null()) {
        w = weights_param(p["weights"], ifs.m(), ifs.n());
    } else if (ifs.weightpair) {
        w = *ifs.weightpair;
    } else {
        bad("the IFS carries no weight pair; pass weights");
    }
    FractalOptions fo;
    fo.classify = classify_opts(p);
    fo.eps_grid = dvec(p["eps_grid"]);
    fo.thresholds = dvec(p["thresholds"]);
    fo.brute_T = p["brute_T"].get<double>();
    auto t_list = dvec(p["t_max_list"]);
    if (t_list.empty()) t_list.push_back(p["t_max"].get<double>());
    const long n_points = p["n_points"].get<long>();

    art.data.header = {"point_id", "t_max", "quality", "inf_minima", "generic_score", "flags"};
    json runs = json::array();
    for (double t_max : t_list) {
        const auto s = fractal_experiment(ifs, w, n_points, t_max, seed, fo);
        for (const auto& pt : s.points)
            art.data.add_row({std::to_string(pt.id), csv_number(t_max), csv_number(pt.quality), csv_number(pt.inf_minima),
                              csv_number(pt.report.generic_proxy), flags_of(pt.report)});
        json table = json::array();
        for (std::size_t i = 0; i < s.thresholds.size(); ++i)
            table.push_back({{"threshold", s.thresholds[i]}, {"fraction_badly", s.fraction_badly[i]}});
        runs.push_back({{"t_max", t_max},
                        {"fraction_badly", table},
                        {"median_generic", s.median_generic},
                        {"quality_quantiles", s.quality_quantiles},
                        {"irreducibility", s.irreducibility}});
    }
    art.summary["weights"] = {{"r", w.r}, {"s", w.s}};
    art.summary["n_points"] = n_points;
    art.summary["runs"] = runs;
    art.summary["note"] = "finite-horizon evidence, not a verdict";
}

void dispatch(const ExperimentConfig& cfg, const json& p, RunArtifacts& art) {
    const auto& k = cfg.kind;
    if (k == "expand-cert") return run_expand_cert(p, cfg.seed, art);
    if (k == "cone") return run_cone(p, art);
    if (k == "walk") return run_walk(p, cfg.seed, art);
    if (k == "height") return run_height(p, cfg.seed, art);
    if (k == "recur") return run_recur(p, cfg.seed, art);
    if (k == "kau") return run_kau(p, cfg.seed, art);
    if (k == "sponge") return run_sponge(p, art);
    if (k == "dioph-brute") return run_dioph_brute(p, art);
    if (k == "dioph-flow") return run_dioph_flow(p, art);
    if (k == "dioph-fractal") return run_dioph_fractal(p, cfg.seed, art);
    bad("unknown experiment kind '" + k + "'");
}

void record_error(RunArtifacts& art, int status, const std::string& module, const std::string& op,
                  const std::string& message, const std::string& partial = {}) {
    art.status = status;
    json e = {{"kind", status == 2 ? "validation" : "numerical"}, {"module", module}, {"op", op}, {"message", message}};
    if (!partial.empty()) e["partial"] = partial;
    art.summary["error"] = e;
}

}  // namespace

RunArtifacts run_in_memory(const ExperimentConfig& cfg) {
    RunArtifacts art;
    art.config = cfg.to_json();
    try {
        art.config["params"] = resolve_params(cfg.kind, cfg.params);
        dispatch(cfg, art.config["params"], art);
        art.summary["status"] = "ok";
    } catch (const ConvergenceError& e) {
        record_error(art, 3, e.module(), e.op(), e.what(), e.partial());
    } catch (const Error& e) {
        record_error(art, e.kind() == ErrorKind::Validation ? 2 : 3, e.module(), e.op(), e.what());
    } catch (const json::exception& e) {
        record_error(art, 2, "cli", "run", std::string("bad parameter value: ") + e.what());
    } catch (const std::invalid_argument& e) {
        record_error(art, 2, "cli", "run", e.what());
    }
    if (art.status != 0) art.summary["status"] = "error";
    art.summary["kind"] = cfg.kind;
    art.summary["seed"] = cfg.seed;
    art.summary["config"] = art.config;
    return art;
}

int run(const ExperimentConfig& cfg, std::ostream* log) {
    auto write = [&](const std::string& suffix, const std::string& body) {
        const std::string path = cfg.output + suffix;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DomainError("cli", "run", "cannot write '" + path + "'");
        out << body;
    };
    {
        json early = cfg.to_json();
        write(".config.json", early.dump(2) + "\n");
    }
    const auto art = run_in_memory(cfg);
    write(".config.json", art.config.dump(2) + "\n");
    write(".summary.json", art.summary.dump(2) + "\n");
    write(".data.csv", art.data.str());
    if (log) {
        if (art.status == 0)
            *log << cfg.kind << ": ok, wrote " << cfg.output << ".{summary.json,data.csv,config.json}\n";
        else
            *log << cfg.kind << ": " << art.summary["error"]["message"].get<std::string>() << "\n";
    }
    return art.status;
}

}  // namespace expwalk

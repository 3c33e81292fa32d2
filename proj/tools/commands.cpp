#include "commands.hpp"

#include "arfrd/dm.hpp"
#include "arfrd/errors.hpp"
#include "arfrd/rkd.hpp"
#include "arfrd/simulate.hpp"
#include "arfrd/smoothness.hpp"
#include "arfrd/svg.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace arfrd::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
        throw NumericError("SHA-256 digest failed");
    std::ostringstream ss;
    ss << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i)
        ss << std::setw(2) << int(md[i]);
    return "sha256:" + ss.str();
}

//! Finite numbers as-is; infinities as null, which the schema documents as unbounded.
json num(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json srd_json(const SrdCi& c)
{
    return {{"estimate", c.estimate}, {"lower", c.lower},          {"upper", c.upper},
            {"sd", c.sd},             {"bias_bound", c.bias_bound}, {"cv", c.cv},
            {"h", c.h},               {"floor_flagged", c.floor_flagged}};
}

std::string fmt(double v, int prec = 6)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::ostringstream ss;
    ss << std::setprecision(prec) << v;
    return ss.str();
}

std::string endpoints_text(const ConfidenceSet& cs)
{
    std::string out;
    for (std::size_t i = 0; i < cs.endpoints.size(); ++i)
        out += (i ? ";" : "") + fmt(cs.endpoints[i]);
    return out;
}

void finish(Manifest& m, Clock::time_point t0, const std::string& path)
{
    if (path.empty())
        return;
    m.wall_seconds = seconds_since(t0);
    m.outputs.push_back(path);
    write_text(path, manifest_json(m).dump(2) + "\n");
}

void emit(const std::string& text, const std::string& out, Manifest& m)
{
    if (out.empty()) {
        std::cout << text;
    } else {
        write_text(out, text);
        m.outputs.push_back(out);
    }
}

std::string b_label(double b)
{
    std::string s = fmt(b, 10);
    for (char& ch : s)
        if (ch == '.')
            ch = 'p';
    return s;
}

} // namespace

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text))
        throw DataError("cannot write '" + path + "'");
}

LoadedInput load_input(const InputOptions& in)
{
    LoadedInput r;
    std::string text = read_file(in.data);
    r.digest = sha256_hex(text);
    Sample s = parse_sample(text, in.cols, in.cutoff);
    if (!in.donut.empty()) {
        std::vector<double> shifted;
        for (double d : in.donut)
            shifted.push_back(d - in.cutoff);
        auto dr = apply_donut(s, shifted);
        s = std::move(dr.sample);
        r.donut_removed = dr.removed;
    }
    validate(s);
    r.sample = std::move(s);
    return r;
}

AnalysisConfig make_config(const InferenceOptions& o)
{
    AnalysisConfig cfg;
    cfg.alpha = o.alpha;
    cfg.eta = o.eta;
    cfg.r_neighbors = o.neighbors;
    cfg.bounds.b_y = o.by;
    cfg.bounds.b_t = o.bt;
    cfg.bounds.b_y_plus = o.by_plus;
    cfg.bounds.b_y_minus = o.by_minus;
    cfg.bounds.b_t_plus = o.bt_plus;
    cfg.bounds.b_t_minus = o.bt_minus;
    cfg.fit.kernel = parse_kernel(o.kernel);
    if (!o.c_range.empty()) {
        if (o.c_range.size() != 2 || !(o.c_range[0] < o.c_range[1]))
            throw Error(ErrorKind::usage, "--c-range needs two increasing values lo,hi");
        cfg.c_grid = CGrid{o.c_range[0], o.c_range[1], o.grid};
    } else if (o.grid != 100) {
        throw Error(ErrorKind::usage, "--grid needs --c-range");
    }
    cfg.fixed_bandwidth = o.fixed_h;
    cfg.threads = o.threads;
    validate(cfg);
    return cfg;
}

json config_json(const InputOptions& in, const InferenceOptions& o)
{
    json j = {{"data", in.data},
              {"columns", {{"x", in.cols.x}, {"y", in.cols.y}, {"t", in.cols.t}}},
              {"cutoff", in.cutoff},
              {"donut", in.donut},
              {"b_y", o.by},
              {"b_t", o.bt},
              {"alpha", o.alpha},
              {"eta", o.eta},
              {"neighbors", o.neighbors},
              {"kernel", o.kernel},
              {"grid", o.grid}};
    auto opt = [&](const char* k, const std::optional<double>& v) {
        j[k] = v ? json(*v) : json(nullptr);
    };
    opt("b_y_plus", o.by_plus);
    opt("b_y_minus", o.by_minus);
    opt("b_t_plus", o.bt_plus);
    opt("b_t_minus", o.bt_minus);
    opt("fixed_h", o.fixed_h);
    j["c_range"] = o.c_range.empty() ? json(nullptr) : json(o.c_range);
    return j;
}

json cs_json(const ConfidenceSet& cs)
{
    json pieces = json::array();
    for (const auto& p : cs.pieces)
        pieces.push_back({num(p.lo), num(p.hi)});
    json at = json::array();
    for (const auto& a : cs.diagnostics)
        at.push_back({{"c", a.c},
                      {"tau_hat", a.tau_hat},
                      {"sd", a.sd},
                      {"bias_bound", a.bias_bound},
                      {"h", a.h_used},
                      {"p_value", a.p_value}});
    return {{"schema_version", schema_version},
            {"shape", shape_name(cs.shape)},
            {"endpoints", cs.endpoints},
            {"alpha", cs.alpha},
            {"diagnostics",
             {{"pieces", pieces},
              {"tau_t_ci", srd_json(cs.tau_t_ci)},
              {"c_grid", {{"low", cs.c_low}, {"high", cs.c_high}, {"points", cs.j_points}}},
              {"expansions", cs.expansions},
              {"fixed_h", cs.fixed_h},
              {"at_endpoints", at}}}};
}

json manifest_json(const Manifest& m)
{
    return {{"command", m.command},
            {"config", m.config},
            {"input_digest", m.input_digest},
            {"version", ARFRD_VERSION},
            {"seed", m.seed ? json(*m.seed) : json(nullptr)},
            {"wall_seconds", m.wall_seconds},
            {"outputs", m.outputs}};
}

int cmd_frd(const FrdOptions& o, const std::string& argv)
{
    auto t0 = Clock::now();
    AnalysisConfig cfg = make_config(o.inf);
    LoadedInput in = load_input(o.in);
    ArProblem prob(in.sample, cfg);
    json j = cs_json(prob.compute());
    j["diagnostics"]["n"] = in.sample.n();
    j["diagnostics"]["donut_removed"] = in.donut_removed;
    if (o.with_dm) {
        try {
            DmInference d = dm_ci_bias_aware(in.sample, cfg, prob.nn());
            j["delta_method"] = {{"estimate", d.theta_hat}, {"lower", d.lower},
                                 {"upper", d.upper},        {"h", d.h},
                                 {"sd", d.sd_u},            {"bias_bound", d.bias_bound_u}};
        } catch (const Error& e) {
            j["delta_method"] = {{"error", e.what()}};
        }
    }
    Manifest m{argv, config_json(o.in, o.inf), in.digest, std::nullopt, 0.0, {}};
    emit(j.dump(2) + "\n", o.out, m);
    finish(m, t0, o.manifest);
    return 0;
}

int cmd_sensitivity(const SensitivityOptions& o, const std::string& argv)
{
    auto t0 = Clock::now();
    if (o.by_grid.empty() || o.bt_grid.empty())
        throw Error(ErrorKind::usage, "--by-grid and --bt-grid must be nonempty");
    if (o.format != "md" && o.format != "csv")
        throw Error(ErrorKind::usage, "--format must be md or csv");
    AnalysisConfig base = make_config(o.inf);
    LoadedInput in = load_input(o.in);
    // Bounds only enter through the evaluation, so variances and the path are shared.
    ArProblem shared(in.sample, base);
    auto path = shared.path_ptr();

    const bool md = o.format == "md";
    std::ostringstream t;
    if (md)
        t << "| B_Y | B_T | shape | endpoints | tau_T lower | tau_T upper |\n"
          << "|---|---|---|---|---|---|\n";
    else
        t << "b_y,b_t,shape,endpoints,tau_t_lower,tau_t_upper\n";
    for (double by : o.by_grid)
        for (double bt : o.bt_grid) {
            std::vector<std::string> cells{fmt(by), fmt(bt)};
            try {
                AnalysisConfig cfg = base;
                cfg.bounds.b_y = by;
                cfg.bounds.b_t = bt;
                validate(cfg);
                ArProblem prob(cfg, shared.nn(), path, shared.fixed());
                ConfidenceSet cs = prob.compute();
                cells.push_back(shape_name(cs.shape));
                cells.push_back(endpoints_text(cs));
                cells.push_back(fmt(cs.tau_t_ci.lower));
                cells.push_back(fmt(cs.tau_t_ci.upper));
            } catch (const std::exception& e) {
                std::cerr << "cell B_Y=" << by << " B_T=" << bt << ": " << e.what() << '\n';
                cells.insert(cells.end(), {"error", "", "", ""});
            }
            for (std::size_t k = 0; k < cells.size(); ++k)
                t << (md ? (k ? " | " : "| ") : (k ? "," : "")) << cells[k];
            t << (md ? " |\n" : "\n");
        }
    json cfg = config_json(o.in, o.inf);
    cfg["by_grid"] = o.by_grid;
    cfg["bt_grid"] = o.bt_grid;
    Manifest m{argv, cfg, in.digest, std::nullopt, 0.0, {}};
    emit(t.str(), o.out, m);
    finish(m, t0, o.manifest);
    return 0;
}

int cmd_rot(const RotOptions& o, const std::string& argv)
{
    auto t0 = Clock::now();
    LoadedInput in = load_input(o.in);
    json j = {{"schema_version", schema_version}};
    for (Dep d : {Dep::y, Dep::t}) {
        RotResult r1 = rot1(in.sample, d), r2 = rot2(in.sample, d);
        j[d == Dep::y ? "y" : "t"] = {
            {"rot1", r1.value},
            {"rot1_sup_location", r1.sup_location},
            {"rot1_r2", {{"plus", r1.r2_plus}, {"minus", r1.r2_minus}}},
            {"rot1_coef", {{"plus", r1.coef_plus}, {"minus", r1.coef_minus}}},
            {"rot2", r2.value},
            {"rot2_r2", {{"plus", r2.r2_plus}, {"minus", r2.r2_minus}}},
            {"rot2_coef", {{"plus", r2.coef_plus}, {"minus", r2.coef_minus}}}};
    }
    j["lower_bound"] = "unavailable";
    json cfg = {{"data", o.in.data}, {"cutoff", o.in.cutoff}, {"donut", o.in.donut}};
    Manifest m{argv, cfg, in.digest, std::nullopt, 0.0, {}};
    emit(j.dump(2) + "\n", o.out, m);
    finish(m, t0, o.manifest);
    return 0;
}

int cmd_viz_bounds(const VizOptions& o, const std::string& argv)
{
    auto t0 = Clock::now();
    if (o.b_list.empty())
        throw Error(ErrorKind::usage, "--b-list must be nonempty");
    if (o.dep != "y" && o.dep != "t")
        throw Error(ErrorKind::usage, "--dep must be y or t");
    const Dep dep = o.dep == "y" ? Dep::y : Dep::t;
    LoadedInput in = load_input(o.in);
    std::filesystem::create_directories(o.out_dir);
    json cfg = {{"data", o.in.data}, {"cutoff", o.in.cutoff}, {"dep", o.dep},
                {"b_list", o.b_list}, {"x0", o.x0},           {"knots", o.knots}};
    Manifest m{argv, cfg, in.digest, std::nullopt, 0.0, {}};
    const auto& d = dep == Dep::y ? in.sample.y : in.sample.t;
    json summary = json::array();
    for (double b : o.b_list) {
        ExtremeFunction ef = extreme_function(in.sample, dep, b, o.x0, o.knots, o.eval_points);
        std::string stem = (std::filesystem::path(o.out_dir) / ("bounds_" + o.dep + "_B" + b_label(b))).string();
        write_evaluations_csv(stem + ".csv", ef);
        PlotSeries data{"data", in.sample.x, d, true, "#7f7f7f", false};
        PlotSeries fit{"fit", {}, {}, false, "#d62728", true};
        for (const auto& [x, v] : ef.evaluations) {
            fit.x.push_back(x);
            fit.y.push_back(v);
        }
        write_svg_plot(stem + ".svg", "B = " + fmt(b), "x", o.dep, {data, fit}, 0.0);
        m.outputs.push_back(stem + ".csv");
        m.outputs.push_back(stem + ".svg");
        summary.push_back({{"b", b}, {"rss", ef.rss}, {"csv", stem + ".csv"}, {"svg", stem + ".svg"}});
    }
    std::cout << json{{"schema_version", schema_version}, {"panels", summary}}.dump(2) << '\n';
    finish(m, t0, o.manifest);
    return 0;
}

int cmd_rkd(const RkdOptions& o, const std::string& argv)
{
    auto t0 = Clock::now();
    AnalysisConfig cfg = make_config(o.frd.inf);
    LoadedInput in = load_input(o.frd.in);
    RkdSpec spec;
    spec.v = o.v;
    spec.p = o.p;
    spec.bounds = cfg.bounds;
    ConfidenceSet cs = cfg.fixed_bandwidth
                           ? rkd_cs_fixed_h(in.sample, cfg, spec, *cfg.fixed_bandwidth)
                           : rkd_cs(in.sample, cfg, spec);
    json j = cs_json(cs);
    j["diagnostics"]["n"] = in.sample.n();
    j["diagnostics"]["v"] = o.v;
    j["diagnostics"]["p"] = o.p;
    json c = config_json(o.frd.in, o.frd.inf);
    c["v"] = o.v;
    c["p"] = o.p;
    Manifest m{argv, c, in.digest, std::nullopt, 0.0, {}};
    emit(j.dump(2) + "\n", o.frd.out, m);
    finish(m, t0, o.frd.manifest);
    return 0;
}

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> out;
    if (text.empty())
        return out;
    try {
        if (text.find(':') != std::string::npos) {
            std::vector<double> v;
            std::stringstream ss(text);
            std::string part;
            while (std::getline(ss, part, ':'))
                v.push_back(std::stod(part));
            if (v.size() != 3 || !(v[2] > 0.0) || v[1] < v[0])
                throw Error(ErrorKind::usage, "grid range must be lo:hi:step with step > 0");
            std::size_t k = std::size_t(std::floor((v[1] - v[0]) / v[2] + 1e-9));
            for (std::size_t i = 0; i <= k; ++i)
                out.push_back(v[0] + double(i) * v[2]);
            return out;
        }
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ','))
            out.push_back(std::stod(part));
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::usage, "cannot parse grid '" + text + "'");
    }
    return out;
}

int cmd_simulate(const SimulateOptions& o, const std::string& argv)
{
    auto t0 = Clock::now();
    DgpSpec spec;
    std::string label;
    if (!o.preset.empty()) {
        const std::string pre = "table1-row";
        if (o.preset.rfind(pre, 0) != 0)
            throw Error(ErrorKind::usage, "--preset must look like table1-rowN");
        int row = 0;
        try {
            row = std::stoi(o.preset.substr(pre.size()));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::usage, "--preset must look like table1-rowN");
        }
        spec = table1_preset(row);
        spec.n = o.n;
        label = o.preset;
    } else {
        if (o.runvar == "continuous")
            spec.runvar = RunVar::continuous_uniform;
        else if (o.runvar == "discrete")
            spec.runvar = RunVar::discrete_uniform_15;
        else
            throw Error(ErrorKind::usage, "--runvar must be continuous or discrete");
        spec.tau_y = o.tau_y;
        spec.tau_t = o.tau_t;
        spec.b_y = o.by;
        spec.b_t = o.bt;
        spec.n = o.n;
        label = "custom";
    }
    if (o.reps < 100)
        throw Error(ErrorKind::usage, "--reps must be at least 100");
    std::vector<Method> methods;
    for (const auto& name : o.methods)
        methods.push_back(parse_method(name));
    if (methods.empty())
        methods = all_methods();
    StudyOptions so;
    so.alpha = o.alpha;
    so.eta = o.eta;
    so.r_neighbors = o.neighbors;
    so.lengths = o.lengths;
    so.threads = o.threads;
    CoverageReport rep = coverage_study(spec, methods, o.reps, o.theta_grid, o.seed, so);

    json cfg = {{"label", label},
                {"runvar", spec.runvar == RunVar::continuous_uniform ? "continuous" : "discrete"},
                {"tau_y", spec.tau_y},
                {"tau_t", spec.tau_t},
                {"b_y", spec.b_y},
                {"b_t", spec.b_t},
                {"n", spec.n},
                {"reps", o.reps},
                {"alpha", o.alpha},
                {"eta", o.eta},
                {"neighbors", o.neighbors},
                {"lengths", o.lengths},
                {"theta_grid", o.theta_grid}};
    json names = json::array();
    for (Method me : methods)
        names.push_back(method_name(me));
    cfg["methods"] = names;
    Manifest m{argv, cfg, "", o.seed, 0.0, {}};
    write_report_csv(o.out, rep, label);
    m.outputs.push_back(o.out);
    if (!o.power_out.empty()) {
        if (o.theta_grid.empty())
            throw Error(ErrorKind::usage, "--power-out needs --theta-grid");
        write_power_csv(o.power_out, rep);
        m.outputs.push_back(o.power_out);
    }
    if (!o.json_out.empty()) {
        write_text(o.json_out, report_json(rep, label) + "\n");
        m.outputs.push_back(o.json_out);
    }
    for (const auto& ms : rep.methods)
        std::cout << std::left << std::setw(10) << method_name(ms.method) << " coverage "
                  << fmt(100.0 * ms.coverage, 4) << "% (se " << fmt(100.0 * ms.mc_se, 2)
                  << ", failures " << ms.failures << ")\n";
    finish(m, t0, o.manifest);
    return 0;
}

} // namespace arfrd::cli

#include "arfrd/simulate.hpp"
#include "arfrd/bandwidth.hpp"
#include "arfrd/dm.hpp"
#include "arfrd/errors.hpp"
#include "arfrd/folded_normal.hpp"
#include "arfrd/inversion.hpp"
#include "arfrd/parallel.hpp"
#include "arfrd/smoothness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace arfrd {

double dgp_f(double x)
{
    double a = std::abs(x);
    double k1 = std::max(0.0, a - 0.1), k2 = std::max(0.0, a - 0.6);
    return x * x - 1.5 * k1 * k1 + 1.25 * k2 * k2;
}

Sample draw_dgp(const DgpSpec& spec, std::uint64_t seed, std::uint64_t rep)
{
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(rep),
                      std::uint32_t(rep >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    std::uniform_int_distribution<int> id(0, 29);
    Sample s;
    s.x.resize(spec.n);
    s.y.resize(spec.n);
    s.t.resize(spec.n);
    const double cr = std::sqrt(1.0 - spec.rho * spec.rho);
    for (std::size_t i = 0; i < spec.n; ++i) {
        double x;
        if (spec.runvar == RunVar::continuous_uniform) {
            x = ud(rng);
        } else {
            int k = id(rng);
            x = k < 15 ? -(k + 1) / 15.0 : (k - 14) / 15.0;
        }
        double e1 = nd(rng);
        double e2 = spec.rho * e1 + cr * nd(rng);
        double sg = x >= 0.0 ? 1.0 : -1.0, z = x >= 0.0 ? 1.0 : 0.0;
        double f = dgp_f(x);
        s.x[i] = x;
        s.y[i] = 0.5 * spec.b_y * sg * f + z * spec.tau_y + spec.sigma_y * e1;
        s.t[i] = (-0.5 * spec.b_t * sg * f + z * spec.tau_t + 0.3 >= norm_cdf(e2)) ? 1.0 : 0.0;
    }
    return s;
}

DgpSpec table1_preset(int row)
{
    if (row < 1 || row > 24)
        throw Error(ErrorKind::usage, "table1 presets are rows 1-24");
    int k = row - 1;
    DgpSpec d;
    d.runvar = k < 12 ? RunVar::continuous_uniform : RunVar::discrete_uniform_15;
    k %= 12;
    d.tau_t = k < 6 ? 0.5 : 0.1;
    k %= 6;
    d.b_y = k / 2 == 0 ? 1.0 : (k / 2 == 1 ? 10.0 : 100.0);
    d.b_t = k % 2 == 0 ? 0.2 : 1.0;
    d.tau_y = 2.0 * d.tau_t;
    return d;
}

std::string method_name(Method m)
{
    switch (m) {
    case Method::ar_tc: return "ar_tc";
    case Method::ar_tc2: return "ar_tc2";
    case Method::ar_tc05: return "ar_tc05";
    case Method::ar_rot1: return "ar_rot1";
    case Method::ar_rot2: return "ar_rot2";
    case Method::ar_naive: return "ar_naive";
    case Method::dm_tc: return "dm_tc";
    case Method::dm_naive: return "dm_naive";
    case Method::dm_us: return "dm_us";
    }
    return "?";
}

std::vector<Method> all_methods()
{
    return {Method::ar_tc,   Method::ar_tc2,   Method::ar_tc05,  Method::ar_rot1, Method::ar_rot2,
            Method::ar_naive, Method::dm_tc, Method::dm_naive, Method::dm_us};
}

Method parse_method(const std::string& name)
{
    for (Method m : all_methods())
        if (method_name(m) == name)
            return m;
    throw Error(ErrorKind::usage, "unknown method '" + name + "'");
}

const MethodSummary& CoverageReport::get(Method m) const
{
    for (const auto& s : methods)
        if (s.method == m)
            return s;
    throw Error(ErrorKind::usage, "method " + method_name(m) + " not in report");
}

NaiveRule naive_rule(const Sample& s)
{
    auto qy = rot2(s, Dep::y), qt = rot2(s, Dep::t);
    return NaiveRule{2.0 * qy.coef_plus[2], 2.0 * qy.coef_minus[2], 2.0 * qt.coef_plus[2],
                     2.0 * qt.coef_minus[2]};
}

namespace {

// MSE-minimising bandwidth for a_y*tau_Y + a_t*tau_T.
std::size_t naive_index(const BandwidthPath& path, const NaiveRule& rule)
{
    const double k = rule.curvature(1.0, 0.0);
    std::size_t best = 0;
    double best_mse = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < path.size(); ++j) {
        const auto& c = path.candidates()[j];
        double b = k * c.g.g_sym;
        double mse = b * b + c.a_y;
        if (mse <= best_mse * (1.0 + 1e-12)) {
            best_mse = std::min(mse, best_mse);
            best = j;
        }
    }
    return best;
}

} // namespace

double naive_bandwidth(const Sample& s, int r_neighbors)
{
    auto nv = nn_variances(s, r_neighbors);
    BandwidthPath path(s, nv, FitSpec{});
    return path.candidates()[naive_index(path, naive_rule(s))].h;
}

std::vector<RepOutcome> run_replication(const DgpSpec& spec, const std::vector<Method>& methods,
                                        const std::vector<double>& theta_grid,
                                        const StudyOptions& opt, std::uint64_t seed,
                                        std::uint64_t rep)
{
    const double theta = spec.tau_y / spec.tau_t;
    std::vector<RepOutcome> out(methods.size());
    Sample s = draw_dgp(spec, seed, rep);
    NnVarianceComponents nv;
    std::shared_ptr<const BandwidthPath> path;
    try {
        validate(s);
        nv = nn_variances(s, opt.r_neighbors);
        path = std::make_shared<const BandwidthPath>(s, nv, FitSpec{});
    } catch (const std::exception& e) {
        for (auto& o : out) {
            o.failed = true;
            o.error = e.what();
        }
        return out;
    }
    AnalysisConfig base;
    base.alpha = opt.alpha;
    base.eta = opt.eta;
    base.r_neighbors = opt.r_neighbors;
    base.bounds.b_y = spec.b_y;
    base.bounds.b_t = spec.b_t;

    std::optional<NaiveRule> naive;
    auto get_naive = [&]() -> const NaiveRule& {
        if (!naive)
            naive = naive_rule(s);
        return *naive;
    };
    std::optional<DmInference> dm_tc;
    auto get_dm_tc = [&]() -> const DmInference& {
        if (!dm_tc)
            dm_tc = dm_ci_on_path(s, base, *path, false);
        return *dm_tc;
    };

    for (std::size_t m = 0; m < methods.size(); ++m) {
        RepOutcome& o = out[m];
        try {
            Method me = methods[m];
            if (me == Method::dm_tc || me == Method::dm_naive || me == Method::dm_us) {
                DmInference d;
                if (me == Method::dm_tc)
                    d = get_dm_tc();
                else {
                    double h = me == Method::dm_naive
                                   ? path->candidates()[naive_index(*path, get_naive())].h
                                   : get_dm_tc().h * std::pow(double(spec.n), -0.05);
                    d = dm_ci_naive(s, nv, opt.alpha, h);
                }
                o.covered = d.lower <= theta && theta <= d.upper;
                o.length = d.upper - d.lower;
                o.h = d.h;
                for (double th : theta_grid)
                    o.grid_covered.push_back(d.lower <= th && th <= d.upper);
                continue;
            }
            AnalysisConfig cfg = base;
            switch (me) {
            case Method::ar_tc2:
                cfg.bounds.b_y *= 2.0;
                cfg.bounds.b_t *= 2.0;
                break;
            case Method::ar_tc05:
                cfg.bounds.b_y *= 0.5;
                cfg.bounds.b_t *= 0.5;
                break;
            case Method::ar_rot1:
                cfg.bounds.b_y = rot1(s, Dep::y).value;
                cfg.bounds.b_t = rot1(s, Dep::t).value;
                break;
            case Method::ar_rot2:
                cfg.bounds.b_y = rot2(s, Dep::y).value;
                cfg.bounds.b_t = rot2(s, Dep::t).value;
                break;
            case Method::ar_naive:
                cfg.bounds = SmoothnessBounds{};
                break;
            default:
                break;
            }
            ArProblem prob(cfg, nv, path, false);
            if (me == Method::ar_naive)
                prob.set_naive(get_naive());
            auto a = prob.p_hat(theta);
            o.covered = a.p_value >= 0.0;
            o.h = a.h_used;
            for (double th : theta_grid)
                o.grid_covered.push_back(prob.p_hat(th).p_value >= 0.0);
            if (opt.lengths)
                o.length = prob.compute().length();
        } catch (const std::exception& e) {
            o = RepOutcome{};
            o.failed = true;
            o.error = e.what();
        }
    }
    return out;
}

CoverageReport coverage_study(const DgpSpec& spec, const std::vector<Method>& methods,
                              std::size_t reps, const std::vector<double>& theta_grid,
                              std::uint64_t seed, const StudyOptions& opt)
{
    std::vector<std::vector<RepOutcome>> all(reps);
    parallel_for(
        reps,
        [&](std::size_t r) { all[r] = run_replication(spec, methods, theta_grid, opt, seed, r); },
        opt.threads);
    CoverageReport rep;
    rep.spec = spec;
    rep.theta = spec.tau_y / spec.tau_t;
    rep.reps = reps;
    rep.seed = seed;
    rep.theta_grid = theta_grid;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        MethodSummary ms;
        ms.method = methods[m];
        ms.reps = reps;
        std::size_t cov = 0, ok = 0;
        std::vector<double> lens;
        std::vector<std::size_t> gcov(theta_grid.size(), 0);
        for (std::size_t r = 0; r < reps; ++r) {
            const RepOutcome& o = all[r][m];
            if (o.failed) {
                ++ms.failures;
                continue;
            }
            ++ok;
            cov += o.covered;
            lens.push_back(o.length);
            for (std::size_t g = 0; g < theta_grid.size(); ++g)
                gcov[g] += o.grid_covered[g];
        }
        ms.coverage = ok ? double(cov) / ok : std::numeric_limits<double>::quiet_NaN();
        ms.mc_se = ok ? std::sqrt(ms.coverage * (1.0 - ms.coverage) / ok) : ms.coverage;
        bool have_len = opt.lengths || methods[m] == Method::dm_tc ||
                        methods[m] == Method::dm_naive || methods[m] == Method::dm_us;
        if (have_len && !lens.empty()) {
            std::sort(lens.begin(), lens.end());
            std::size_t k = lens.size();
            ms.median_length = k % 2 ? lens[k / 2] : 0.5 * (lens[k / 2 - 1] + lens[k / 2]);
        } else {
            ms.median_length = std::numeric_limits<double>::quiet_NaN();
        }
        for (std::size_t g = 0; g < theta_grid.size(); ++g)
            ms.power.push_back(ok ? double(gcov[g]) / ok : std::numeric_limits<double>::quiet_NaN());
        rep.methods.push_back(ms);
    }
    return rep;
}

void write_report_csv(const std::string& path, const CoverageReport& r, const std::string& label)
{
    std::ofstream f(path);
    if (!f)
        throw DataError("cannot write '" + path + "'");
    f << "dgp,runvar,tau_t,b_y,b_t,n,method,reps,failures,coverage,mc_se,median_length\n";
    f << std::setprecision(10);
    for (const auto& m : r.methods)
        f << label << ','
          << (r.spec.runvar == RunVar::continuous_uniform ? "continuous" : "discrete") << ','
          << r.spec.tau_t << ',' << r.spec.b_y << ',' << r.spec.b_t << ',' << r.spec.n << ','
          << method_name(m.method) << ',' << m.reps << ',' << m.failures << ',' << m.coverage
          << ',' << m.mc_se << ',' << m.median_length << '\n';
}

void write_power_csv(const std::string& path, const CoverageReport& r)
{
    std::ofstream f(path);
    if (!f)
        throw DataError("cannot write '" + path + "'");
    f << "theta,method,coverage\n" << std::setprecision(10);
    for (const auto& m : r.methods)
        for (std::size_t g = 0; g < r.theta_grid.size(); ++g)
            f << r.theta_grid[g] << ',' << method_name(m.method) << ',' << m.power[g] << '\n';
}

std::string report_json(const CoverageReport& r, const std::string& label)
{
    using nlohmann::json;
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["dgp"] = label;
    j["spec"] = {{"runvar", r.spec.runvar == RunVar::continuous_uniform ? "continuous" : "discrete"},
                 {"tau_y", r.spec.tau_y},
                 {"tau_t", r.spec.tau_t},
                 {"b_y", r.spec.b_y},
                 {"b_t", r.spec.b_t},
                 {"n", r.spec.n},
                 {"rho", r.spec.rho},
                 {"sigma_y", r.spec.sigma_y}};
    j["theta"] = r.theta;
    j["reps"] = r.reps;
    j["seed"] = r.seed;
    j["theta_grid"] = r.theta_grid;
    json ms = json::array();
    for (const auto& m : r.methods) {
        json pw = json::array();
        for (double v : m.power)
            pw.push_back(num(v));
        ms.push_back({{"method", method_name(m.method)},
                      {"failures", m.failures},
                      {"coverage", num(m.coverage)},
                      {"mc_se", num(m.mc_se)},
                      {"median_length", num(m.median_length)},
                      {"power", pw}});
    }
    j["methods"] = ms;
    return j.dump(2);
}

} // namespace arfrd

#include "commands.hpp"

#include "arfrd/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace arfrd;
using namespace arfrd::cli;

namespace {

void add_input(CLI::App* c, InputOptions& in)
{
    c->add_option("--data", in.data, "CSV or TSV file with a header row")->required();
    c->add_option("--x", in.cols.x, "running variable column")->capture_default_str();
    c->add_option("--y", in.cols.y, "outcome column")->capture_default_str();
    c->add_option("--t", in.cols.t, "treatment column")->capture_default_str();
    c->add_option("--cutoff", in.cutoff, "threshold subtracted from x")->capture_default_str();
    c->add_option("--donut", in.donut, "x values to exclude exactly (before the cutoff shift)")
        ->delimiter(',');
}

void add_inference(CLI::App* c, InferenceOptions& o, bool bounds_required)
{
    auto* by = c->add_option("--by", o.by, "bound on |mu_Y''|");
    auto* bt = c->add_option("--bt", o.bt, "bound on |mu_T''|");
    if (bounds_required) {
        by->required();
        bt->required();
    }
    c->add_option("--by-plus", o.by_plus, "right-side bound on |mu_Y''|");
    c->add_option("--by-minus", o.by_minus, "left-side bound on |mu_Y''|");
    c->add_option("--bt-plus", o.bt_plus, "right-side bound on |mu_T''|");
    c->add_option("--bt-minus", o.bt_minus, "left-side bound on |mu_T''|");
    c->add_option("--alpha", o.alpha, "significance level")->capture_default_str();
    c->add_option("--eta", o.eta, "weight concentration cap")->capture_default_str();
    c->add_option("--neighbors", o.neighbors, "nearest neighbours for variances")
        ->capture_default_str();
    c->add_option("--c-range", o.c_range, "initial grid lo,hi (default: chosen from data)")
        ->delimiter(',');
    c->add_option("--grid", o.grid, "grid intervals over --c-range")->capture_default_str();
    c->add_option("--fixed-h", o.fixed_h, "use this bandwidth for every statistic");
    c->add_option("--kernel", o.kernel, "triangular, epanechnikov or uniform")
        ->capture_default_str();
    c->add_option("--threads", o.threads, "worker threads (0: ARFRD_NUM_THREADS or all cores)")
        ->capture_default_str();
}

void add_outputs(CLI::App* c, std::string& out, std::string& manifest)
{
    c->add_option("--out", out, "write the result here instead of stdout");
    c->add_option("--manifest", manifest, "write a run manifest (JSON)");
}

std::string joined(int argc, char** argv)
{
    std::string s;
    for (int i = 0; i < argc; ++i)
        s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bias-aware confidence sets for fuzzy regression discontinuity designs"};
    app.set_version_flag("--version", std::string(ARFRD_VERSION));
    app.require_subcommand(1);

    FrdOptions frd;
    auto* c_frd = app.add_subcommand("frd", "confidence set for the fuzzy RD ratio");
    add_input(c_frd, frd.in);
    add_inference(c_frd, frd.inf, true);
    add_outputs(c_frd, frd.out, frd.manifest);
    c_frd->add_flag("--with-dm", frd.with_dm, "also report the bias-aware delta-method interval");

    SensitivityOptions sens;
    auto* c_sens = app.add_subcommand("sensitivity", "confidence sets over a grid of bounds");
    add_input(c_sens, sens.in);
    add_inference(c_sens, sens.inf, false);
    add_outputs(c_sens, sens.out, sens.manifest);
    c_sens->add_option("--by-grid", sens.by_grid, "values of B_Y")->delimiter(',')->required();
    c_sens->add_option("--bt-grid", sens.bt_grid, "values of B_T")->delimiter(',')->required();
    c_sens->add_option("--format", sens.format, "md or csv")->capture_default_str();

    RotOptions rot;
    auto* c_rot = app.add_subcommand("rot", "rule-of-thumb curvature bounds");
    add_input(c_rot, rot.in);
    add_outputs(c_rot, rot.out, rot.manifest);

    VizOptions viz;
    auto* c_viz = app.add_subcommand("viz-bounds", "most curved fits consistent with each bound");
    add_input(c_viz, viz.in);
    c_viz->add_option("--b-list", viz.b_list, "bounds to fit")->delimiter(',')->required();
    c_viz->add_option("--dep", viz.dep, "y or t")->capture_default_str();
    c_viz->add_option("--x0", viz.x0, "distance from the cutoff where |g''| = B")
        ->capture_default_str();
    c_viz->add_option("--knots", viz.knots, "knots per side")->capture_default_str();
    c_viz->add_option("--points", viz.eval_points, "evaluation points")->capture_default_str();
    c_viz->add_option("--out-dir", viz.out_dir, "directory for CSV and SVG files")
        ->capture_default_str();
    c_viz->add_option("--manifest", viz.manifest, "write a run manifest (JSON)");

    RkdOptions rkd;
    auto* c_rkd = app.add_subcommand("rkd", "confidence set for a ratio of derivative jumps");
    add_input(c_rkd, rkd.frd.in);
    add_inference(c_rkd, rkd.frd.inf, true);
    add_outputs(c_rkd, rkd.frd.out, rkd.frd.manifest);
    c_rkd->add_option("--v", rkd.v, "derivative order")->capture_default_str();
    c_rkd->add_option("--p", rkd.p, "polynomial order")->capture_default_str();

    SimulateOptions sim;
    std::string theta_grid;
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo coverage study");
    c_sim->add_option("--preset", sim.preset, "table1-rowN, N in 1..24");
    c_sim->add_option("--runvar", sim.runvar, "continuous or discrete")->capture_default_str();
    c_sim->add_option("--tau-y", sim.tau_y)->capture_default_str();
    c_sim->add_option("--tau-t", sim.tau_t)->capture_default_str();
    c_sim->add_option("--by", sim.by)->capture_default_str();
    c_sim->add_option("--bt", sim.bt)->capture_default_str();
    c_sim->add_option("--n", sim.n, "sample size")->capture_default_str();
    c_sim->add_option("--reps", sim.reps)->capture_default_str();
    c_sim->add_option("--seed", sim.seed)->capture_default_str();
    c_sim->add_option("--methods", sim.methods, "comma separated (default: all)")->delimiter(',');
    c_sim->add_option("--theta-grid", theta_grid, "lo:hi:step or a list");
    c_sim->add_flag("--lengths", sim.lengths, "compute full sets to report median lengths");
    c_sim->add_option("--alpha", sim.alpha)->capture_default_str();
    c_sim->add_option("--eta", sim.eta)->capture_default_str();
    c_sim->add_option("--neighbors", sim.neighbors)->capture_default_str();
    c_sim->add_option("--threads", sim.threads)->capture_default_str();
    c_sim->add_option("--out", sim.out, "coverage CSV")->capture_default_str();
    c_sim->add_option("--power-out", sim.power_out, "power CSV (needs --theta-grid)");
    c_sim->add_option("--json", sim.json_out, "report JSON");
    c_sim->add_option("--manifest", sim.manifest, "write a run manifest (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code(ErrorKind::usage);
    }

    const std::string cmd = joined(argc, argv);
    try {
        if (*c_frd)
            return cmd_frd(frd, cmd);
        if (*c_sens)
            return cmd_sensitivity(sens, cmd);
        if (*c_rot)
            return cmd_rot(rot, cmd);
        if (*c_viz)
            return cmd_viz_bounds(viz, cmd);
        if (*c_rkd)
            return cmd_rkd(rkd, cmd);
        sim.theta_grid = parse_grid(theta_grid);
        return cmd_simulate(sim, cmd);
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what();
        if (e.row() > 0)
            std::cerr << " (data row " << e.row() << ")";
        std::cerr << '\n';
        return exit_code(e.kind());
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(ErrorKind::data);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(ErrorKind::numeric);
    }
}

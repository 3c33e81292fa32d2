#pragma once

#include "arfrd/data.hpp"
#include "arfrd/inversion.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace arfrd {

enum class RunVar { continuous_uniform, discrete_uniform_15 };

struct DgpSpec {
    RunVar runvar = RunVar::continuous_uniform;
    double tau_y = 1.0;
    double tau_t = 0.5;
    double b_y = 1.0;
    double b_t = 0.2;
    std::size_t n = 1000;
    double rho = 0.5;
    double sigma_y = 0.1;
};

//! Piecewise quadratic shape: x^2 - 1.5 max(0,|x|-.1)^2 + 1.25 max(0,|x|-.6)^2.
double dgp_f(double x);

//! One draw; the (seed, rep) pair fully determines the sample.
Sample draw_dgp(const DgpSpec& spec, std::uint64_t seed, std::uint64_t rep = 0);

//! Preset designs: rows 1-24 (continuous rows 1-12, discrete 13-24), theta = 2.
DgpSpec table1_preset(int row);

enum class Method {
    ar_tc,
    ar_tc2,
    ar_tc05,
    ar_rot1,
    ar_rot2,
    ar_naive,
    dm_tc,
    dm_naive,
    dm_us
};
std::string method_name(Method m);
Method parse_method(const std::string& name);
std::vector<Method> all_methods();

struct StudyOptions {
    double alpha = 0.05;
    double eta = 0.075;
    int r_neighbors = 5;
    //! Also compute each set in full to report its length (AR needs a root search).
    bool lengths = false;
    int threads = 0;
};

struct MethodSummary {
    Method method;
    std::size_t reps = 0;
    std::size_t failures = 0;
    double coverage = 0.0; //!< at the true theta, over successful replications
    double mc_se = 0.0;
    double median_length = 0.0; //!< NaN when lengths were not computed
    std::vector<double> power; //!< coverage at each theta_grid value
};

struct CoverageReport {
    DgpSpec spec;
    double theta = 2.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::vector<double> theta_grid;
    std::vector<MethodSummary> methods;
    const MethodSummary& get(Method m) const;
};

//! Per-replication outcome for one method.
struct RepOutcome {
    bool failed = false;
    bool covered = false;
    double length = 0.0;
    double h = 0.0;
    std::vector<bool> grid_covered;
    std::string error;
};

//! Runs every requested method on draw (seed, rep).
std::vector<RepOutcome> run_replication(const DgpSpec& spec, const std::vector<Method>& methods,
                                        const std::vector<double>& theta_grid,
                                        const StudyOptions& opt, std::uint64_t seed,
                                        std::uint64_t rep);

CoverageReport coverage_study(const DgpSpec& spec, const std::vector<Method>& methods,
                              std::size_t reps, const std::vector<double>& theta_grid,
                              std::uint64_t seed, const StudyOptions& opt = {});

void write_report_csv(const std::string& path, const CoverageReport& r, const std::string& label);
void write_power_csv(const std::string& path, const CoverageReport& r);
std::string report_json(const CoverageReport& r, const std::string& label);

//! Per-side curvature of mu_Y and mu_T from global quadratic fits on each side.
NaiveRule naive_rule(const Sample& s);

//! Naive bandwidth: minimises estimated MSE of tau_Y using per-side quadratic curvature.
double naive_bandwidth(const Sample& s, int r_neighbors = 5);

} // namespace arfrd

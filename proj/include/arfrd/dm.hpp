#pragma once

#include "arfrd/data.hpp"
#include "arfrd/moments.hpp"

#include <optional>
#include <vector>

namespace arfrd {

struct DmInference {
    double theta_hat = 0.0;
    std::vector<double> u_hat;
    double bias_bound_u = 0.0;
    double sd_u = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double h = 0.0;
    double tau_y_pre = 0.0;
    double tau_t_pre = 0.0;
    double half_length() const { return 0.5 * (upper - lower); }
};

struct DmOptions {
    //! Bandwidth for the preliminary tau_Y and tau_T; unset uses each one's bias-aware
    //! optimal bandwidth.
    std::optional<double> prelim_h;
    //! Minimum |tau_T| (preliminary and final) before the ratio is deemed unidentified.
    double weak_floor = 1e-3;
};

//! Bias-aware delta-method interval for tau_Y / tau_T. The bandwidth minimises the
//! half-length unless cfg.fixed_bandwidth is set.
DmInference dm_ci_bias_aware(const Sample& s, const AnalysisConfig& cfg,
                             const DmOptions& opt = {});
DmInference dm_ci_bias_aware(const Sample& s, const AnalysisConfig& cfg,
                             const NnVarianceComponents& nv, const DmOptions& opt = {});

class BandwidthPath;
//! Same, on a precomputed path; `fixed` uses its single bandwidth without search.
DmInference dm_ci_on_path(const Sample& s, const AnalysisConfig& cfg, const BandwidthPath& path,
                          bool fixed, const DmOptions& opt = {});

//! theta_hat(h) +- z_{1-alpha/2} s_U(h), ignoring bias; preliminary estimates at h itself.
DmInference dm_ci_naive(const Sample& s, double alpha, double h, const FitSpec& fit = {},
                        int r_neighbors = 5, double weak_floor = 1e-3);
DmInference dm_ci_naive(const Sample& s, const NnVarianceComponents& nv, double alpha, double h,
                        const FitSpec& fit = {}, double weak_floor = 1e-3);

} // namespace arfrd

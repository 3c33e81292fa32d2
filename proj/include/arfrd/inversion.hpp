#pragma once

#include "arfrd/bandwidth.hpp"
#include "arfrd/data.hpp"
#include "arfrd/moments.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace arfrd {

struct AuxInference {
    double c = 0.0;
    double tau_hat = 0.0;
    double sd = 0.0;
    double bias_bound = 0.0;
    double ratio = 0.0;
    double h_used = 0.0;
    double p_value = 0.0; //!< 1 - alpha - F(|tau/sd|, ratio); c is in the set iff >= 0
};

enum class Shape {
    interval,
    complement_of_interval,
    real_line,
    half_line_left,
    half_line_right,
    union_of_intervals
};
std::string shape_name(Shape s);

//! Closed piece [lo, hi]; infinite ends are +-inf.
struct Piece {
    double lo;
    double hi;
};

enum class Dep { y, t };

struct SrdCi {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double sd = 0.0;
    double bias_bound = 0.0;
    double ratio = 0.0;
    double cv = 0.0;
    double h = 0.0;
    bool floor_flagged = false;
    double half_length() const { return cv * sd; }
};

struct ConfidenceSet {
    Shape shape = Shape::real_line;
    std::vector<double> endpoints;
    std::vector<Piece> pieces;
    double alpha = 0.05;
    std::vector<AuxInference> diagnostics;
    SrdCi tau_t_ci;
    double c_low = 0.0;
    double c_high = 0.0;
    int j_points = 0;
    int expansions = 0;
    bool fixed_h = false;

    bool contains(double c) const;
    //! Total length; infinite for unbounded sets.
    double length() const;
};

//! Curvature estimates (second derivatives) of mu_Y and mu_T on each side, used by the
//! bias-ignoring comparison mode.
struct NaiveRule {
    double y_plus = 0.0;
    double y_minus = 0.0;
    double t_plus = 0.0;
    double t_minus = 0.0;
    //! Curvature of mu_Y - c mu_T, largest over the two sides.
    double curvature(double a_y, double a_t) const;
};

//! Precomputed test-inversion problem for one sample: nearest-neighbour variances and the
//! bandwidth path are built once, so each p_hat(c) is cheap.
class ArProblem {
public:
    ArProblem(const Sample& s, const AnalysisConfig& cfg);
    //! Reuses precomputed variances.
    ArProblem(const Sample& s, const AnalysisConfig& cfg, NnVarianceComponents nv);
    //! Fixed bandwidth h for every c (also used for the tau_T interval).
    ArProblem(const Sample& s, const AnalysisConfig& cfg, double h);
    //! Shares an existing path (built with cfg.fit); `fixed` treats it as a fixed bandwidth.
    ArProblem(const AnalysisConfig& cfg, NnVarianceComponents nv,
              std::shared_ptr<const BandwidthPath> path, bool fixed);

    //! Switches to the bias-ignoring mode: for each c the bandwidth minimises the estimated
    //! MSE of tau_M(c) with curvature from `rule`, and the critical value is cv(alpha, 0).
    void set_naive(const NaiveRule& rule) { naive_ = rule; }

    AuxInference p_hat(double c) const;
    SrdCi srd_ci(Dep dep) const;
    //! Data-driven c range used when the config carries none.
    CGrid auto_c_range() const;
    ConfidenceSet compute() const;

    const NnVarianceComponents& nn() const { return nv_; }
    const BandwidthPath& path() const { return *path_; }
    std::shared_ptr<const BandwidthPath> path_ptr() const { return path_; }
    const AnalysisConfig& config() const { return cfg_; }
    bool fixed() const { return fixed_; }

private:
    void init(const Sample& s, std::optional<double> h);
    AnalysisConfig cfg_;
    NnVarianceComponents nv_;
    std::shared_ptr<const BandwidthPath> path_;
    bool fixed_ = false;
    std::optional<NaiveRule> naive_;
    std::size_t pick(double a_y, double a_t) const;
};

AuxInference p_hat(const Sample& s, const NnVarianceComponents& nv, const AnalysisConfig& cfg,
                   double c);
ConfidenceSet compute_cs(const Sample& s, const AnalysisConfig& cfg);
ConfidenceSet compute_cs_fixed_h(const Sample& s, const AnalysisConfig& cfg, double h);
//! Bias-aware interval for tau_Y or tau_T at its own length-minimising (floored) bandwidth,
//! or at cfg.fixed_bandwidth when set.
SrdCi srd_ci(const Sample& s, Dep dep, const AnalysisConfig& cfg);

} // namespace arfrd

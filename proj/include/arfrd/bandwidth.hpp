#pragma once

#include "arfrd/data.hpp"
#include "arfrd/local_poly.hpp"
#include "arfrd/moments.hpp"

#include <vector>

namespace arfrd {

//! Summary of the local polynomial fit at one candidate bandwidth. Everything an
//! estimate of a_y*tau_Y + a_t*tau_T needs (estimate, variance, worst-case bias) is here.
struct Candidate {
    double h = 0.0;
    double tau_y = 0.0;
    double tau_t = 0.0;
    double a_y = 0.0;  //!< sum w^2 sig2_y
    double a_t = 0.0;  //!< sum w^2 sig2_t
    double a_yt = 0.0; //!< sum w^2 sig_yt
    BiasLoadings g;
    double w_ratio = 0.0;
};

//! Estimate, spread and critical value of a linear combination a_y*Y + a_t*T at one h.
struct CandidateEval {
    double h = 0.0;
    double tau = 0.0;
    double sd = 0.0;
    double bias = 0.0;
    double ratio = 0.0;
    double cv = 0.0;
    double objective = 0.0; //!< cv * sd, the CI half-length
};

//! Sorted candidate bandwidths: distinct |x| plus `refine` evenly spaced interior points
//! between neighbours (refine = 1 gives midpoints), keeping only h where both sides have
//! p+1 distinct points with positive kernel weight.
std::vector<double> candidate_set(const Sample& s, const FitSpec& fit, int refine = 1);

class BandwidthPath {
public:
    //! Precomputes every candidate of candidate_set(s, fit, refine).
    BandwidthPath(const Sample& s, const NnVarianceComponents& nv, const FitSpec& fit,
                  int refine = 1);
    //! Uses the given bandwidths only; each must admit weights.
    BandwidthPath(const Sample& s, const NnVarianceComponents& nv, const FitSpec& fit,
                  const std::vector<double>& hs);

    const std::vector<Candidate>& candidates() const { return cands_; }
    std::size_t size() const { return cands_.size(); }

    CandidateEval evaluate(std::size_t k, double a_y, double a_t, const SmoothnessBounds& b,
                           double alpha) const;
    //! Minimiser of cv*sd over candidates from index `from` on (ties go to the larger h);
    //! size() if none is finite.
    std::size_t argmin(double a_y, double a_t, const SmoothnessBounds& b, double alpha,
                       std::size_t from = 0) const;
    //! Index of the smallest h with w_ratio < eta; the last index with flagged=true if none.
    std::size_t floor_index(double eta, bool* flagged) const;

private:
    void build(const Sample& s, const NnVarianceComponents& nv, const std::vector<double>& hs,
               bool skip_invalid);
    FitSpec fit_;
    std::vector<Candidate> cands_;
};

struct FloorResult {
    double h = 0.0;
    bool flagged = false; //!< no candidate met the cap; h is the largest candidate
};

FloorResult h_floor(const Sample& s, const FitSpec& spec, double eta);

struct BandwidthResult {
    double h_star = 0.0; //!< unconstrained minimiser
    double h_min = 0.0;
    double h_used = 0.0;
    double objective = 0.0;
    std::size_t index = 0; //!< position of h_used on the path
    bool floor_bound = false;   //!< h_star < h_min
    bool floor_flagged = false; //!< the Lindeberg cap could not be met
};

//! Bandwidth for a_y*Y + a_t*T on a precomputed path: the minimiser of cv*sd over
//! h >= h_min. This is max(h*, h_min) whenever the objective is quasi-convex, and it
//! ignores spurious minima below the floor. Fixed-h paths skip the search.
BandwidthResult choose_bandwidth(const BandwidthPath& path, double a_y, double a_t,
                                 const SmoothnessBounds& b, double alpha, double eta,
                                 bool fixed = false);

//! Length-minimising bandwidth for tau_M(c) = tau_Y - c tau_T with the Lindeberg floor.
BandwidthResult optimize_bandwidth(const Sample& s, const NnVarianceComponents& nv,
                                   const AnalysisConfig& cfg, double c);

} // namespace arfrd

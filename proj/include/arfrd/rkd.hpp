#pragma once

#include "arfrd/data.hpp"
#include "arfrd/inversion.hpp"

#include <vector>

namespace arfrd {

struct RkdSpec {
    int v = 1;
    int p = 2;
    SmoothnessBounds bounds; //!< bounds on the (p+1)-th derivatives
};

//! Confidence set for the ratio of v-th derivative jumps, using order-p fits.
ConfidenceSet rkd_cs(const Sample& s, const AnalysisConfig& cfg, const RkdSpec& spec);
ConfidenceSet rkd_cs_fixed_h(const Sample& s, const AnalysisConfig& cfg, const RkdSpec& spec,
                             double h);

//! Coefficient on x^v/v! from the kernel-weighted regression of 1{x >= t}(x - t)^p on
//! (1, x, ..., x^p/p!) over the points chi in [0, h).
double beta_vp(double t, const std::vector<double>& chi, int v, int p, double h = 1.0,
               Kernel k = Kernel::triangular);

} // namespace arfrd

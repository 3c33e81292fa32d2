#pragma once

#include "arfrd/data.hpp"
#include "arfrd/local_poly.hpp"

#include <vector>

namespace arfrd {

struct NnVarianceComponents {
    std::vector<double> sig2_y;
    std::vector<double> sig2_t;
    std::vector<double> sig_yt;
    std::vector<int> r_used;
    std::vector<double> h_leverage;

    //! sigma^2_{M,i}(c), clipped at zero.
    double sig2_m(std::size_t i, double c) const;
};

struct BiasSdBundle {
    double tau_hat = 0.0;
    double bias_bound = 0.0;
    double sd = 0.0;
    double ratio = 0.0;
    double h = 0.0;
    double c = 0.0;
};

//! Worst-case bias of sum_i w_i (y_i - c t_i) for the local linear (v=0, p=1) fit.
double bias_bound(const WeightVector& wv, const SmoothnessBounds& bounds, double c);

//! Worst-case bias for general (v, p) weights with bounds on the (p+1)-th derivative.
double bias_bound_vp(const WeightVector& wv, const SmoothnessBounds& bounds, double c, int p,
                     int v);

//! Signed per-side curvature loadings (-1)^{p-v}/(p+1)! * sum_i w_{i,+-} x_i^{p+1}; with the
//! bounds they give the bias as |(B_Y+ + |c| B_T+) g_plus + (B_Y- + |c| B_T-) g_minus|.
struct BiasLoadings {
    double g_plus = 0.0;
    double g_minus = 0.0;
    double g_sym = 0.0; //!< (-1)^{p-v}/(p+1)! * sum_i w_i x_i^{p+1} sign(x_i)
    double bias(const SmoothnessBounds& b, double c) const;
};
BiasLoadings bias_loadings(const WeightVector& wv, int p, int v);

//! Scaled residuals e_i / sqrt(1 + H_i) of the nearest-neighbour projection of dep.
struct NnResiduals {
    std::vector<double> e;
    std::vector<int> r_used;
    std::vector<double> h_leverage;
};
NnResiduals nn_residuals(const std::vector<double>& x, const std::vector<double>& dep,
                         int r_neighbors);

NnVarianceComponents nn_variances(const Sample& s, int r_neighbors);

BiasSdBundle aux_bundle(const Sample& s, const WeightVector& wv, const NnVarianceComponents& nv,
                        const SmoothnessBounds& bounds, double c);

} // namespace arfrd

#pragma once

#include "arfrd/data.hpp"

#include <vector>

namespace arfrd {

//! w = w_plus - w_minus; entries are zero outside the kernel window.
struct WeightVector {
    std::vector<double> x;
    std::vector<double> w;
    std::vector<double> w_plus;
    std::vector<double> w_minus;
    double h_plus = 0.0;
    double h_minus = 0.0;
    int p = 1;
    int v = 0;
    std::size_t effective_n_plus = 0;
    std::size_t effective_n_minus = 0;
};

//! Indices of each side sorted by |x| (x = 0 belongs to the right side).
struct SideOrder {
    std::vector<std::size_t> right;
    std::vector<std::size_t> left;
};

SideOrder side_order(const std::vector<double>& x);

//! Number of leading entries of `order` with positive kernel weight at bandwidth h.
std::size_t window_size(const std::vector<double>& x, const std::vector<std::size_t>& order,
                        double h, Kernel k);

//! Count of distinct x among the first m entries of `order`.
std::size_t distinct_count(const std::vector<double>& x, const std::vector<std::size_t>& order,
                           std::size_t m);

//! Local polynomial selector weights for one side over the first m points of `order`,
//! written to out[0..m). Basis (1, x, ..., x^p/p!), coefficient v.
void side_weights(const std::vector<double>& x, const std::vector<std::size_t>& order,
                  std::size_t m, double h, Kernel k, int p, int v, double* out);

//! Throws InsufficientSupport when either side lacks p+1 distinct in-window points.
WeightVector weights(const Sample& s, const FitSpec& spec);

double srd_estimate(const WeightVector& wv, const std::vector<double>& dep);
double srd_estimate(const Sample& s, const std::vector<double>& dep, const FitSpec& spec);

//! max_j w_j^2 / sum_i w_i^2.
double w_ratio(const WeightVector& wv);
double w_ratio(const std::vector<double>& w);

} // namespace arfrd

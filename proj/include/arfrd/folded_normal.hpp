#pragma once

namespace arfrd {

//! Standard normal CDF.
double norm_cdf(double x);
double norm_pdf(double x);
//! Standard normal quantile.
double norm_quantile(double p);

//! CDF of |N(r, 1)| at x >= 0.
double folded_cdf(double x, double r);

//! (1 - alpha) quantile of |N(r, 1)|, absolute accuracy 1e-8.
double cv(double alpha, double r);

} // namespace arfrd

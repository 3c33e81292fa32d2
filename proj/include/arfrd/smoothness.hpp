#pragma once

#include "arfrd/data.hpp"
#include "arfrd/inversion.hpp"

#include <string>
#include <vector>

namespace arfrd {

struct RotResult {
    double value = 0.0;
    int order = 4;
    std::vector<double> coef_plus;  //!< raw-x polynomial coefficients, right side
    std::vector<double> coef_minus; //!< left side
    double sup_location = 0.0;
    double r2_plus = 0.0;
    double r2_minus = 0.0;
};

//! Sup over each side's observed range of |second derivative| of a per-side OLS quartic.
RotResult rot1(const Sample& s, Dep dep);
//! Twice the largest |second derivative| of per-side OLS quadratics.
RotResult rot2(const Sample& s, Dep dep);

//! One side of the constrained fit, in u = |x|: g(u) = a + b u + sum_m s_m phi_m(u) with
//! g'' = s_m on piece m.
struct SplineSide {
    std::vector<double> knots;
    double a = 0.0;
    double b = 0.0;
    std::vector<double> second; //!< g'' per piece
    int forced_piece = 0;
    double rss = 0.0;
};

struct ExtremeFunction {
    SplineSide plus;
    SplineSide minus;
    double bound = 0.0;
    double x0 = 0.1;
    double rss = 0.0;
    std::vector<std::pair<double, double>> evaluations;

    double value(double x) const;
    double second_derivative(double x) const;
};

//! Least squares fit of dep on per-side order-2 splines with |g''| <= B everywhere and
//! |g''(+-x0)| = B, each side's sign chosen by the smaller residual sum of squares.
//! B = 0 gives per-side linear fits.
ExtremeFunction extreme_function(const Sample& s, Dep dep, double B, double x0 = 0.1,
                                 int knots = 50, int eval_points = 201);

void write_evaluations_csv(const std::string& path, const ExtremeFunction& ef);

} // namespace arfrd

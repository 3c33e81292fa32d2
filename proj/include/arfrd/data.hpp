#pragma once

#include <optional>
#include <string>
#include <vector>

namespace arfrd {

//! Running variable x (cutoff at 0), outcome y, treatment t in [0, 1].
struct Sample {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> t;

    std::size_t n() const { return x.size(); }
};

enum class Kernel { triangular, epanechnikov, uniform };

Kernel parse_kernel(const std::string& name);
std::string kernel_name(Kernel k);
//! K(u), zero outside the support. Triangular and Epanechnikov vanish at |u| = 1.
double kernel_value(Kernel k, double u);

struct FitSpec {
    Kernel kernel = Kernel::triangular;
    int p = 1;
    int v = 0;
    double h_plus = 0.0;
    double h_minus = 0.0;

    FitSpec& bandwidth(double h) {
        h_plus = h_minus = h;
        return *this;
    }
};

struct SmoothnessBounds {
    double b_y = 0.0;
    double b_t = 0.0;
    std::optional<double> b_y_plus, b_y_minus, b_t_plus, b_t_minus;

    double y_plus() const { return b_y_plus.value_or(b_y); }
    double y_minus() const { return b_y_minus.value_or(b_y); }
    double t_plus() const { return b_t_plus.value_or(b_t); }
    double t_minus() const { return b_t_minus.value_or(b_t); }
    bool symmetric() const {
        return y_plus() == y_minus() && t_plus() == t_minus();
    }
};

struct CGrid {
    double c_low = -10.0;
    double c_high = 10.0;
    int j_points = 100;
};

struct AnalysisConfig {
    double alpha = 0.05;
    SmoothnessBounds bounds;
    FitSpec fit;
    double eta = 0.075;
    int r_neighbors = 5;
    //! Unset means the range is chosen from the data (see auto_c_range).
    std::optional<CGrid> c_grid;
    std::optional<double> fixed_bandwidth;
    std::vector<double> donut;
    int max_expansions = 3;
    //! Workers for grid evaluation; 0 picks default_threads().
    int threads = 1;
};

//! Throws DataError when a field is out of range.
void validate(const AnalysisConfig& cfg);

struct ColumnMap {
    std::string x = "x";
    std::string y = "y";
    std::string t = "t";
};

//! Reads comma or tab delimited text with a header row and shifts x by -cutoff.
Sample load_sample(const std::string& path, const ColumnMap& cols, double cutoff = 0.0);
Sample parse_sample(const std::string& text, const ColumnMap& cols, double cutoff = 0.0);
//! Writes x, y, t columns with 17 significant digits.
void write_sample(const std::string& path, const Sample& s, const ColumnMap& cols = {});

//! Checks lengths, finiteness, t in [0,1] and that both sides of 0 are populated.
void validate(const Sample& s);

struct DonutResult {
    Sample sample;
    std::size_t removed = 0;
};

//! Drops rows whose x equals one of the excluded values exactly.
DonutResult apply_donut(const Sample& s, const std::vector<double>& excluded);

} // namespace arfrd

#include "arfrd/data.hpp"
#include "arfrd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace arfrd {

Kernel parse_kernel(const std::string& name)
{
    if (name == "triangular" || name == "tri")
        return Kernel::triangular;
    if (name == "epanechnikov" || name == "epa")
        return Kernel::epanechnikov;
    if (name == "uniform" || name == "uni")
        return Kernel::uniform;
    throw Error(ErrorKind::usage, "unknown kernel '" + name + "'");
}

std::string kernel_name(Kernel k)
{
    switch (k) {
    case Kernel::triangular: return "triangular";
    case Kernel::epanechnikov: return "epanechnikov";
    case Kernel::uniform: return "uniform";
    }
    return "?";
}

double kernel_value(Kernel k, double u)
{
    double a = std::abs(u);
    switch (k) {
    case Kernel::triangular: return a < 1.0 ? 1.0 - a : 0.0;
    case Kernel::epanechnikov: return a < 1.0 ? 0.75 * (1.0 - a * a) : 0.0;
    case Kernel::uniform: return a <= 1.0 ? 0.5 : 0.0;
    }
    return 0.0;
}

void validate(const AnalysisConfig& cfg)
{
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw DataError("alpha must lie in (0, 1)");
    if (!(cfg.eta > 0.0 && cfg.eta <= 1.0))
        throw DataError("eta must lie in (0, 1]");
    if (cfg.r_neighbors < 2)
        throw DataError("r_neighbors must be at least 2");
    const auto& b = cfg.bounds;
    for (double v : {b.y_plus(), b.y_minus(), b.t_plus(), b.t_minus()})
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DataError("smoothness bounds must be finite and nonnegative");
    if (cfg.fit.p < 1 || cfg.fit.v < 0 || cfg.fit.v > cfg.fit.p)
        throw DataError("need p >= 1 and 0 <= v <= p");
    if (cfg.c_grid) {
        if (!(cfg.c_grid->c_low < cfg.c_grid->c_high))
            throw DataError("c grid needs c_low < c_high");
        if (cfg.c_grid->j_points < 2)
            throw DataError("c grid needs at least 2 points");
    }
    if (cfg.fixed_bandwidth && !(*cfg.fixed_bandwidth > 0.0))
        throw DataError("fixed bandwidth must be positive");
}

void validate(const Sample& s)
{
    if (s.y.size() != s.x.size() || s.t.size() != s.x.size())
        throw DataError("x, y and t must have equal length");
    if (s.x.empty())
        throw DataError("sample is empty");
    bool left = false, right = false;
    for (std::size_t i = 0; i < s.n(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || !std::isfinite(s.t[i]))
            throw DataError("non-finite value in row " + std::to_string(i + 1), long(i + 1));
        if (s.t[i] < 0.0 || s.t[i] > 1.0)
            throw DataError("treatment outside [0,1] in row " + std::to_string(i + 1), long(i + 1));
        (s.x[i] >= 0.0 ? right : left) = true;
    }
    if (!left || !right)
        throw DataError("all observations lie on one side of the cutoff");
}

namespace {

std::vector<std::string> split(const std::string& line, char delim)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, delim)) {
        auto b = cell.find_first_not_of(" \t\r\"");
        auto e = cell.find_last_not_of(" \t\r\"");
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == delim)
        out.emplace_back();
    return out;
}

double parse_cell(const std::string& cell, long row, const std::string& col)
{
    if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan")
        throw DataError("missing value in column '" + col + "' at row " + std::to_string(row), row);
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != cell.size())
        throw DataError("non-numeric value '" + cell + "' in column '" + col + "' at row " +
                            std::to_string(row),
                        row);
    if (!std::isfinite(v))
        throw DataError("non-finite value in column '" + col + "' at row " + std::to_string(row), row);
    return v;
}

} // namespace

Sample parse_sample(const std::string& text, const ColumnMap& cols, double cutoff)
{
    std::istringstream in(text);
    std::string header;
    while (std::getline(in, header) && header.find_first_not_of(" \t\r") == std::string::npos) {
    }
    if (header.empty())
        throw DataError("input is empty");
    char delim = header.find('\t') != std::string::npos && header.find(',') == std::string::npos
                     ? '\t'
                     : ',';
    auto names = split(header, delim);
    auto index_of = [&](const std::string& name) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end())
            throw DataError("missing column '" + name + "'");
        return std::size_t(it - names.begin());
    };
    std::size_t ix = index_of(cols.x), iy = index_of(cols.y), it = index_of(cols.t);

    Sample s;
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        ++row;
        auto cells = split(line, delim);
        if (cells.size() < names.size())
            cells.resize(names.size());
        s.x.push_back(parse_cell(cells[ix], row, cols.x) - cutoff);
        s.y.push_back(parse_cell(cells[iy], row, cols.y));
        s.t.push_back(parse_cell(cells[it], row, cols.t));
    }
    if (s.x.empty())
        throw DataError("input has a header but no data rows");
    validate(s);
    return s;
}

Sample load_sample(const std::string& path, const ColumnMap& cols, double cutoff)
{
    std::ifstream f(path);
    if (!f)
        throw DataError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_sample(buf.str(), cols, cutoff);
}

void write_sample(const std::string& path, const Sample& s, const ColumnMap& cols)
{
    std::ofstream f(path);
    if (!f)
        throw DataError("cannot write '" + path + "'");
    f << cols.x << ',' << cols.y << ',' << cols.t << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < s.n(); ++i)
        f << s.x[i] << ',' << s.y[i] << ',' << s.t[i] << '\n';
}

DonutResult apply_donut(const Sample& s, const std::vector<double>& excluded)
{
    DonutResult r;
    for (std::size_t i = 0; i < s.n(); ++i) {
        if (std::find(excluded.begin(), excluded.end(), s.x[i]) != excluded.end()) {
            ++r.removed;
            continue;
        }
        r.sample.x.push_back(s.x[i]);
        r.sample.y.push_back(s.y[i]);
        r.sample.t.push_back(s.t[i]);
    }
    bool left = false, right = false;
    for (double x : r.sample.x)
        (x >= 0.0 ? right : left) = true;
    if (!left || !right)
        throw DataError("donut exclusion leaves one side of the cutoff empty");
    return r;
}

} // namespace arfrd

#pragma once

#include "arfrd/data.hpp"
#include "arfrd/inversion.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace arfrd::cli {

using json = nlohmann::ordered_json;

//! Version of the JSON result layout.
constexpr int schema_version = 1;

struct InputOptions {
    std::string data;
    ColumnMap cols;
    double cutoff = 0.0;
    std::vector<double> donut;
};

struct InferenceOptions {
    double by = 0.0;
    double bt = 0.0;
    std::optional<double> by_plus, by_minus, bt_plus, bt_minus;
    double alpha = 0.05;
    double eta = 0.075;
    int neighbors = 5;
    std::vector<double> c_range;
    int grid = 100;
    std::optional<double> fixed_h;
    std::string kernel = "triangular";
    int threads = 0;
};

//! Sample read from disk plus the SHA-256 of the file bytes.
struct LoadedInput {
    Sample sample;
    std::string digest;
    std::size_t donut_removed = 0;
};

struct Manifest {
    std::string command;
    json config;
    std::string input_digest;
    std::optional<unsigned long long> seed;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;
};

LoadedInput load_input(const InputOptions& in);
AnalysisConfig make_config(const InferenceOptions& o);
json config_json(const InputOptions& in, const InferenceOptions& o);
json cs_json(const ConfidenceSet& cs);
json manifest_json(const Manifest& m);
void write_text(const std::string& path, const std::string& text);
//! "lo:hi:step" or a comma separated list.
std::vector<double> parse_grid(const std::string& text);

struct FrdOptions {
    InputOptions in;
    InferenceOptions inf;
    bool with_dm = false;
    std::string out;
    std::string manifest;
};
int cmd_frd(const FrdOptions& o, const std::string& argv);

struct SensitivityOptions {
    InputOptions in;
    InferenceOptions inf;
    std::vector<double> by_grid;
    std::vector<double> bt_grid;
    std::string format = "md";
    std::string out;
    std::string manifest;
};
int cmd_sensitivity(const SensitivityOptions& o, const std::string& argv);

struct RotOptions {
    InputOptions in;
    std::string out;
    std::string manifest;
};
int cmd_rot(const RotOptions& o, const std::string& argv);

struct VizOptions {
    InputOptions in;
    std::string dep = "y";
    std::vector<double> b_list;
    double x0 = 0.1;
    int knots = 50;
    int eval_points = 201;
    std::string out_dir = ".";
    std::string manifest;
};
int cmd_viz_bounds(const VizOptions& o, const std::string& argv);

struct RkdOptions {
    FrdOptions frd;
    int v = 1;
    int p = 2;
};
int cmd_rkd(const RkdOptions& o, const std::string& argv);

struct SimulateOptions {
    std::string preset;
    std::string runvar = "continuous";
    double tau_y = 1.0;
    double tau_t = 0.5;
    double by = 1.0;
    double bt = 0.2;
    std::size_t n = 1000;
    std::size_t reps = 2000;
    unsigned long long seed = 20240101;
    std::vector<std::string> methods;
    std::vector<double> theta_grid;
    bool lengths = false;
    double alpha = 0.05;
    double eta = 0.075;
    int neighbors = 5;
    int threads = 0;
    std::string out = "coverage.csv";
    std::string power_out;
    std::string json_out;
    std::string manifest;
};
int cmd_simulate(const SimulateOptions& o, const std::string& argv);

} // namespace arfrd::cli

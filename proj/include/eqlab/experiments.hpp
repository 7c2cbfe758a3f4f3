#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eqlab {

inline constexpr const char* kVersion = "0.1.0";

// One experiment. JSON field names equal the CLI flag names.
struct ExperimentConfig {
    std::string experiment;  // equilibria, flow, events, random-mesh, flock-scaling, rate-profile, caustic-sweep
    std::string shape = "ellipse:2,1.5";
    std::string mesh;
    std::vector<double> o;  // reference point; empty means the centroid
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string out = ".";

    // equilibria
    int n = 400;
    double offset = 0.13;
    bool perturb_offset = false;  // retry a nongeneric partition once at offset + 1e-6

    // flow
    std::string kind = "csf";
    double dt = 0.0;
    int steps = 200;
    int mesh_n = 0;
    double c = 1.0;
    int stop_N = 4;

    // events: o moves linearly from o_from to o_to over `samples` grid points
    std::vector<double> o_from;
    std::vector<double> o_to;
    int samples = 2001;

    // random-mesh
    double kappa_rho = -0.5;
    int points = 5;
    double delta = 1e-3;
    std::int64_t trials = 1000000;

    // flock-scaling
    std::string configuration = "k3";  // k3 or k4
    int rungs = 8;
    int offsets = 200;
    double delta0 = 0.0;
    double ratio = 2.0;

    // rate-profile
    std::string rate_case = "i";
    double t_min = 1e-5;
    double t_max = 1e-3;
    int t_count = 9;

    // caustic-sweep
    std::string dir = "1,0,0";  // or "umbilic"
    double tmin = 0.0;
    double tmax = 1.0;
    int grid_n = 400;
    int margin = 5;
    double peak_factor = 3.0;
};

// Validates field names and types; throws DomainError naming the offending field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

// Runs the experiment, writes its artifacts and manifest.json into c.out and a
// one-line summary to log. Returns the process exit status.
int run(const ExperimentConfig& c, std::ostream& log);

std::vector<double> parse_list(const std::string& s);

}  // namespace eqlab

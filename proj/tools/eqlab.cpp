// Command-line front end: one experiment per invocation.
#include "eqlab/common.hpp"
#include "eqlab/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <set>

namespace {

using nlohmann::json;

const std::set<std::string> kStringFields{"experiment", "shape", "mesh",      "out", "kind", "configuration",
                                          "rate_case",  "dir",   "o",         "o_from", "o_to"};

const std::map<std::string, std::vector<std::string>> kFlags{
    {"equilibria", {"shape", "mesh", "o", "n", "offset"}},
    {"flow", {"shape", "kind", "n", "c", "dt", "steps", "mesh_n", "stop_N"}},
    {"events", {"shape", "o_from", "o_to", "samples"}},
    {"random-mesh", {"kappa_rho", "points", "delta", "trials"}},
    {"flock-scaling", {"shape", "configuration", "o", "offset", "rungs", "offsets", "delta0", "ratio"}},
    {"rate-profile", {"rate_case", "t_min", "t_max", "t_count"}},
    {"caustic-sweep", {"mesh", "dir", "tmin", "tmax", "steps", "grid_n", "margin", "peak_factor"}},
};

const std::map<std::string, std::string> kHelp{
    {"equilibria", "smooth and discrete equilibria of a curve or mesh"},
    {"flow", "curve-shortening or Eikonal flow with N and N^Delta series"},
    {"events", "evolute crossings along a straight reference path"},
    {"random-mesh", "Monte Carlo mean of edge equilibria on random local meshes"},
    {"flock-scaling", "flock count and diameter against the mesh size"},
    {"rate-profile", "growth of the flock near an evolute contact"},
    {"caustic-sweep", "mesh equilibria along a ray from the centroid"},
};

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Equilibria of convex bodies and their discretizations"};
    app.require_subcommand(1);
    std::string config_path;
    std::map<std::string, std::string> given;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration; flags override its fields");
        for (const char* f : {"seed", "threads", "out"})
            sub->add_option(std::string("--") + f, given[f]);
    };
    auto* runner = app.add_subcommand("run", "run the experiment named in --config");
    common(runner);
    for (const auto& [name, flags] : kFlags) {
        auto* sub = app.add_subcommand(name, kHelp.at(name));
        common(sub);
        for (const auto& f : flags) sub->add_option("--" + f, given[f]);
        if (name == "equilibria")
            sub->add_flag_callback("--perturb_offset,--perturb-offset", [&] { given["perturb_offset"] = "true"; },
                                   "retry a nongeneric partition at offset + 1e-6");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        json j = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw eqlab::DomainError("cannot open config '" + config_path + "'");
            j = json::parse(in);
        }
        const std::string name = app.get_subcommands().front()->get_name();
        if (name != "run") j["experiment"] = name;
        else if (!j.contains("experiment")) throw eqlab::DomainError("field 'experiment' is missing");
        for (const auto& [field, text] : given) {
            if (text.empty()) continue;
            if (kStringFields.count(field)) {
                j[field] = text;
            } else {
                try {
                    j[field] = json::parse(text);
                } catch (const json::exception&) {
                    throw eqlab::DomainError("field '" + field + "': '" + text + "' is not a number");
                }
            }
        }
        return eqlab::run(eqlab::config_from_json(j), std::cout);
    } catch (const eqlab::DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

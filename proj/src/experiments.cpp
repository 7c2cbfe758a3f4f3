#include "eqlab/experiments.hpp"

#include "eqlab/curve_io.hpp"
#include "eqlab/discretize.hpp"
#include "eqlab/events.hpp"
#include "eqlab/flock_analysis.hpp"
#include "eqlab/flows.hpp"
#include "eqlab/format.hpp"
#include "eqlab/surface.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace eqlab {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        v.push_back(std::stod(item, &used));
        if (item.find_first_not_of(" \t", used) != std::string::npos) throw DomainError("bad number '" + item + "'");
    }
    return v;
}

namespace {

using Setter = std::function<void(ExperimentConfig&, const json&)>;

template <typename T> Setter set(T ExperimentConfig::*m)
{
    return [m](ExperimentConfig& c, const json& v) { c.*m = v.get<T>(); };
}

Setter set_point(std::vector<double> ExperimentConfig::*m)
{
    return [m](ExperimentConfig& c, const json& v) {
        c.*m = v.is_string() ? parse_list(v.get<std::string>()) : v.get<std::vector<double>>();
    };
}

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table{
        {"experiment", set(&ExperimentConfig::experiment)},
        {"shape", set(&ExperimentConfig::shape)},
        {"mesh", set(&ExperimentConfig::mesh)},
        {"o", set_point(&ExperimentConfig::o)},
        {"seed", [](ExperimentConfig& c, const json& v) { c.seed = v.get<std::uint64_t>(); }},
        {"threads", set(&ExperimentConfig::threads)},
        {"out", set(&ExperimentConfig::out)},
        {"n", set(&ExperimentConfig::n)},
        {"offset", set(&ExperimentConfig::offset)},
        {"perturb_offset", set(&ExperimentConfig::perturb_offset)},
        {"kind", set(&ExperimentConfig::kind)},
        {"dt", set(&ExperimentConfig::dt)},
        {"steps", set(&ExperimentConfig::steps)},
        {"mesh_n", set(&ExperimentConfig::mesh_n)},
        {"c", set(&ExperimentConfig::c)},
        {"stop_N", set(&ExperimentConfig::stop_N)},
        {"o_from", set_point(&ExperimentConfig::o_from)},
        {"o_to", set_point(&ExperimentConfig::o_to)},
        {"samples", set(&ExperimentConfig::samples)},
        {"kappa_rho", set(&ExperimentConfig::kappa_rho)},
        {"points", set(&ExperimentConfig::points)},
        {"delta", set(&ExperimentConfig::delta)},
        {"trials", set(&ExperimentConfig::trials)},
        {"configuration", set(&ExperimentConfig::configuration)},
        {"rungs", set(&ExperimentConfig::rungs)},
        {"offsets", set(&ExperimentConfig::offsets)},
        {"delta0", set(&ExperimentConfig::delta0)},
        {"ratio", set(&ExperimentConfig::ratio)},
        {"rate_case", set(&ExperimentConfig::rate_case)},
        {"t_min", set(&ExperimentConfig::t_min)},
        {"t_max", set(&ExperimentConfig::t_max)},
        {"t_count", set(&ExperimentConfig::t_count)},
        {"dir", set(&ExperimentConfig::dir)},
        {"tmin", set(&ExperimentConfig::tmin)},
        {"tmax", set(&ExperimentConfig::tmax)},
        {"grid_n", set(&ExperimentConfig::grid_n)},
        {"margin", set(&ExperimentConfig::margin)},
        {"peak_factor", set(&ExperimentConfig::peak_factor)},
    };
    return table;
}

const std::vector<std::string> kKinds{"equilibria",    "flow",         "events",       "random-mesh",
                                      "flock-scaling", "rate-profile", "caustic-sweep"};

void write_json(const fs::path& p, const json& j)
{
    std::ofstream os(p);
    if (!os) throw DomainError("cannot write '" + p.string() + "'");
    os << j.dump(2) << '\n';
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream os(p);
    if (!os) throw DomainError("cannot write '" + p.string() + "'");
    return os;
}

Vec2 point2(const std::vector<double>& v, const char* field)
{
    if (v.size() != 2) throw DomainError(std::string("field '") + field + "' needs 2 coordinates");
    return {v[0], v[1]};
}

Vec2 reference_2d(const ExperimentConfig& c, const SmoothCurve& curve)
{
    if (!c.o.empty()) return point2(c.o, "o");
    return lamina_centroid(partition(curve, 8192, 0.0).vertices);
}

std::uint64_t need_seed(const ExperimentConfig& c)
{
    if (!c.seed) throw DomainError("field 'seed' is required for experiment '" + c.experiment + "'");
    return *c.seed;
}

json run_equilibria(const ExperimentConfig& c, const fs::path& out)
{
    json s;
    if (!c.mesh.empty()) {
        const TriMesh mesh = parse_mesh(c.mesh);
        Vec3 o = mesh.centroid();
        if (!c.o.empty()) {
            if (c.o.size() != 3) throw DomainError("field 'o' needs 3 coordinates for a mesh");
            o = Vec3(c.o[0], c.o[1], c.o[2]);
        }
        if (!mesh.contains(o)) throw DomainError("reference point is not inside the mesh");
        const auto eq = classify_equilibria(mesh, o, c.threads);
        auto os = open_out(out / "equilibria3d.csv");
        os << "type,id,x,y,z\n";
        auto row = [&](const char* t, int id, const Vec3& p) {
            os << t << ',' << id << ',' << fmt17(p.x()) << ',' << fmt17(p.y()) << ',' << fmt17(p.z()) << '\n';
        };
        for (std::size_t k = 0; k < eq.stable_faces.size(); ++k) row("stable_face", eq.stable_faces[k], eq.face_feet[k]);
        for (std::size_t k = 0; k < eq.saddle_edges.size(); ++k) row("saddle_edge", eq.saddle_edges[k], eq.edge_feet[k]);
        for (int v : eq.unstable_vertices) row("unstable_vertex", v, mesh.vertices().col(v));
        s = {{"V", mesh.num_vertices()}, {"E", mesh.num_edges()},  {"F", mesh.num_faces()},
             {"S_delta", eq.S()},        {"H_delta", eq.H()},      {"U_delta", eq.U()},
             {"euler", eq.euler()},      {"o", {o.x(), o.y(), o.z()}}};
        return s;
    }
    const SmoothCurve curve = parse_shape(c.shape);
    const Vec2 o = reference_2d(c, curve);
    Polygonization poly = partition(curve, c.n, c.offset);
    LocalEquilibriumSet eq;
    try {
        eq = count_local(poly, o);
    } catch (const NongenericError& e) {
        if (!c.perturb_offset) throw DomainError(std::string(e.what()) + "; rerun with --perturb_offset");
        poly = partition(curve, c.n, std::fmod(c.offset + 1e-6, 1.0));
        eq = count_local(poly, o);
    }
    const auto fl = flocks(eq, poly);
    auto os = open_out(out / "equilibria.csv");
    write_local_csv(os, eq, poly);
    int S = 0, U = 0;
    for (const auto& e : global_equilibria(curve, o)) (e.stability == Stability::Stable ? S : U) += 1;
    json flock_list = json::array();
    for (const auto& f : fl) flock_list.push_back({{"S", f.S()}, {"U", f.U()}});
    s = {{"S_delta", eq.S()}, {"U_delta", eq.U()},        {"flocks", fl.size()}, {"flock_counts", flock_list},
         {"S", S},            {"U", U},                   {"o", {o.x(), o.y()}}};
    return s;
}

json run_flow_experiment(const ExperimentConfig& c, const fs::path& out)
{
    FlowParams p;
    if (c.kind == "csf") p.kind = FlowKind::CSF;
    else if (c.kind == "eikonal") p.kind = FlowKind::Eikonal;
    else throw DomainError("field 'kind' must be csf or eikonal");
    p.n = c.n;
    p.c = c.c;
    p.dt = c.dt;
    p.steps = c.steps;
    p.mesh_n = c.mesh_n;
    p.stop_N = c.stop_N;
    const auto series = run_flow(parse_shape(c.shape), p);
    auto os = open_out(out / "series.csv");
    write_series_csv(os, series);
    json spikes = json::array();
    for (const auto& r : annihilation_spikes(series))
        spikes.push_back({{"t_event", r.t_event}, {"peak", r.peak}, {"median", r.median}, {"ratio", r.ratio}});
    return {{"annihilations", series.annihilations},
            {"creations", series.creations},
            {"reached_stop", series.reached_stop},
            {"rows", series.rows.size()},
            {"spikes", spikes},
            {"max_spike_ratio", max_spike_ratio(series)}};
}

json run_events(const ExperimentConfig& c, const fs::path& out)
{
    const SmoothCurve curve = parse_shape(c.shape);
    const Vec2 a = point2(c.o_from, "o_from"), b = point2(c.o_to, "o_to");
    if (c.samples < 2) throw DomainError("field 'samples' must be at least 2");
    std::vector<double> grid(static_cast<std::size_t>(c.samples));
    for (int i = 0; i < c.samples; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (c.samples - 1);
    const auto events = detect_crossings([&](double) { return curve; },
                                         [&](double t) { return Vec2(a + t * (b - a)); }, grid);
    auto os = open_out(out / "events.jsonl");
    write_event_log(os, events);
    const int n0 = count_equilibria(curve, a);
    const StepFunction N = reconstruct_N(n0, events);
    int A = 0, C = 0;
    for (const auto& e : events) {
        if (e.kind == EventKind::Annihilation) ++A;
        if (e.kind == EventKind::Creation) ++C;
    }
    return {{"events", events.size()}, {"annihilations", A}, {"creations", C},
            {"N_start", n0},           {"N_end", N.N.back()}, {"N_end_direct", count_equilibria(curve, b)}};
}

json run_random_mesh(const ExperimentConfig& c, const fs::path&)
{
    const std::uint64_t seed = need_seed(c);
    const SmoothCurve curve = SmoothCurve::parabola(1.0, c.kappa_rho, 1.0);
    const auto idx = imaginary_index(c.kappa_rho, 1.0);
    const auto mc = monte_carlo_random_mesh(curve, Vec2::Zero(), c.points, c.delta, c.trials, seed, c.threads);
    const double e1 = random_mesh_expectation(idx.lambda, c.points, MeshExponent::NMinusOne);
    const double e2 = random_mesh_expectation(idx.lambda, c.points, MeshExponent::N);
    const double z1 = std::abs(mc.mean - e1) / mc.stderr_, z2 = std::abs(mc.mean - e2) / mc.stderr_;
    return {{"mean", mc.mean},        {"stderr", mc.stderr_},  {"trials", mc.trials},
            {"lambda", idx.lambda},   {"expected_n_minus_1", e1}, {"expected_n", e2},
            {"z_n_minus_1", z1},      {"z_n", z2},             {"matches", z1 <= z2 ? "n-1" : "n"}};
}

json run_flock_scaling(const ExperimentConfig& c, const fs::path& out)
{
    ScalingOptions opt;
    opt.seed = need_seed(c);
    opt.rungs = c.rungs;
    opt.offsets = c.offsets;
    opt.delta0 = c.delta0;
    opt.ratio = c.ratio;
    opt.threads = c.threads;
    const SmoothCurve curve = parse_shape(c.shape);
    Vec2 o;
    double tau0 = 0.0;
    if (!c.o.empty()) {
        o = point2(c.o, "o");
        tau0 = c.offset;
    } else if (c.configuration == "k3") {
        tau0 = 0.7;
        o = evolute(curve, tau0);
    } else if (c.configuration == "k4") {
        tau0 = 0.0;
        o = evolute(curve, tau0);
    } else {
        throw DomainError("field 'configuration' must be k3 or k4");
    }
    const auto rep = flock_scaling(curve, o, tau0, opt);
    auto os = open_out(out / "scaling.csv");
    os << "delta,count,diameter\n";
    for (std::size_t i = 0; i < rep.deltas.size(); ++i)
        os << fmt17(rep.deltas[i]) << ',' << fmt17(rep.counts[i]) << ',' << fmt17(rep.diameters[i]) << '\n';
    auto fit = [](const LineFit& f) {
        return json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"slope_ci95", f.slope_ci95}};
    };
    return {{"k", rep.k},
            {"o", {o.x(), o.y()}},
            {"tau0", tau0},
            {"deltas", rep.deltas},
            {"counts", rep.counts},
            {"diameters", rep.diameters},
            {"count_fit", fit(rep.count_fit)},
            {"diameter_fit", fit(rep.diameter_fit)},
            {"warnings", rep.warnings}};
}

json run_rate_profile(const ExperimentConfig& c, const fs::path& out)
{
    static const std::map<std::string, RateCase> cases{{"i", RateCase::TransverseConvexToConcave},
                                                       {"ii", RateCase::TangentLocallyConvex},
                                                       {"iii", RateCase::TransverseAtCusp},
                                                       {"iv", RateCase::TangentAtCusp}};
    const auto it = cases.find(c.rate_case);
    if (it == cases.end()) throw DomainError("field 'rate_case' must be one of i, ii, iii, iv");
    if (c.t_count < 2 || !(c.t_min > 0) || !(c.t_max > c.t_min)) throw DomainError("invalid t ladder");
    std::vector<double> ladder;
    for (int i = 0; i < c.t_count; ++i)
        ladder.push_back(c.t_min * std::pow(c.t_max / c.t_min, static_cast<double>(i) / (c.t_count - 1)));
    const RateSetup setup = make_rate_case(it->second);
    const auto rp = rate_profile(setup.curve, Vec2::Zero(), setup.tau_star, setup.direction, it->second, ladder);
    auto os = open_out(out / "rate.csv");
    os << "t,n0_plus,n0_minus\n";
    for (std::size_t i = 0; i < rp.t.size(); ++i)
        os << fmt17(rp.t[i]) << ',' << fmt17(rp.n0_plus[i]) << ',' << fmt17(rp.n0_minus[i]) << '\n';
    return {{"case", rate_case_name(rp.rate_case)},
            {"k", rp.k},
            {"slope", rp.fit.slope},
            {"r2", rp.fit.r2},
            {"expected", rp.expected},
            {"matched", rp.matched},
            {"diverging_side", rp.diverging_side},
            {"capped", rp.capped}};
}

json run_caustic_sweep(const ExperimentConfig& c, const fs::path& out)
{
    const std::string spec = c.mesh.empty() ? "ellipsoid:2,1.5,1" : c.mesh;
    const TriMesh mesh = parse_mesh(spec);
    std::optional<Ellipsoid> smooth;
    if (spec.rfind("ellipsoid:", 0) == 0) {
        const auto v = parse_list(spec.substr(10));
        smooth = Ellipsoid{v[0], v[1], v[2]};
    }
    Vec3 dir;
    if (c.dir == "umbilic") {
        if (!smooth) throw DomainError("field 'dir' = umbilic needs an ellipsoid mesh");
        dir = ellipsoid_umbilic_caustic(*smooth);
    } else {
        const auto v = parse_list(c.dir);
        if (v.size() != 3) throw DomainError("field 'dir' needs 3 components");
        dir = Vec3(v[0], v[1], v[2]);
    }
    SweepOptions opt;
    opt.steps = c.steps;
    opt.tmin = c.tmin;
    opt.tmax = c.tmax;
    opt.grid_n = c.grid_n;
    opt.margin = c.margin;
    opt.peak_factor = c.peak_factor;
    opt.threads = c.threads;
    const auto res = caustic_sweep(mesh, dir, opt, smooth);
    auto os = open_out(out / "sweep.csv");
    write_sweep_csv(os, res);
    json peaks = json::array();
    for (std::size_t k = 0; k < res.peaks.size(); ++k) {
        const auto& p = res.peaks[k];
        auto obj = open_out(out / ("flock_" + std::to_string(k) + ".obj"));
        write_flock_obj(obj, p.flock);
        auto js = open_out(out / ("flock_" + std::to_string(k) + ".json"));
        write_flock_json(js, p.flock);
        peaks.push_back({{"t", res.rows[p.index].t},
                         {"N_delta", p.N_delta},
                         {"t_first", res.rows[p.first].t},
                         {"t_last", res.rows[p.last].t},
                         {"N_before", p.N_before},
                         {"N_after", p.N_after},
                         {"flock_size", p.flock.points.size()},
                         {"centroid", {p.flock.centroid.x(), p.flock.centroid.y(), p.flock.centroid.z()}},
                         {"principal", {p.flock.principal.x(), p.flock.principal.y(), p.flock.principal.z()}}});
    }
    const Vec3 d = dir.normalized();
    return {{"V", mesh.num_vertices()}, {"F", mesh.num_faces()}, {"direction", {d.x(), d.y(), d.z()}},
            {"baseline", res.baseline}, {"peaks", peaks}};
}

}  // namespace

ExperimentConfig config_from_json(const json& j)
{
    if (!j.is_object()) throw DomainError("configuration must be a JSON object");
    ExperimentConfig c;
    for (const auto& [key, value] : j.items()) {
        const auto it = setters().find(key);
        if (it == setters().end()) throw DomainError("unknown field '" + key + "'");
        try {
            it->second(c, value);
        } catch (const json::exception& e) {
            throw DomainError("field '" + key + "': " + e.what());
        } catch (const std::invalid_argument&) {
            throw DomainError("field '" + key + "': not a number list");
        }
    }
    if (std::find(kKinds.begin(), kKinds.end(), c.experiment) == kKinds.end())
        throw DomainError("field 'experiment' must be one of equilibria, flow, events, random-mesh, flock-scaling, "
                          "rate-profile, caustic-sweep");
    return c;
}

json config_to_json(const ExperimentConfig& c)
{
    json j = {{"experiment", c.experiment},
              {"shape", c.shape},
              {"mesh", c.mesh},
              {"o", c.o},
              {"threads", c.threads},
              {"out", c.out},
              {"n", c.n},
              {"offset", c.offset},
              {"perturb_offset", c.perturb_offset},
              {"kind", c.kind},
              {"dt", c.dt},
              {"steps", c.steps},
              {"mesh_n", c.mesh_n},
              {"c", c.c},
              {"stop_N", c.stop_N},
              {"o_from", c.o_from},
              {"o_to", c.o_to},
              {"samples", c.samples},
              {"kappa_rho", c.kappa_rho},
              {"points", c.points},
              {"delta", c.delta},
              {"trials", c.trials},
              {"configuration", c.configuration},
              {"rungs", c.rungs},
              {"offsets", c.offsets},
              {"delta0", c.delta0},
              {"ratio", c.ratio},
              {"rate_case", c.rate_case},
              {"t_min", c.t_min},
              {"t_max", c.t_max},
              {"t_count", c.t_count},
              {"dir", c.dir},
              {"tmin", c.tmin},
              {"tmax", c.tmax},
              {"grid_n", c.grid_n},
              {"margin", c.margin},
              {"peak_factor", c.peak_factor}};
    if (c.seed) j["seed"] = *c.seed;
    return j;
}

int run(const ExperimentConfig& c, std::ostream& log)
{
    const auto start = std::chrono::steady_clock::now();
    const fs::path out(c.out);
    fs::create_directories(out);
    json summary;
    if (c.experiment == "equilibria") summary = run_equilibria(c, out);
    else if (c.experiment == "flow") summary = run_flow_experiment(c, out);
    else if (c.experiment == "events") summary = run_events(c, out);
    else if (c.experiment == "random-mesh") summary = run_random_mesh(c, out);
    else if (c.experiment == "flock-scaling") summary = run_flock_scaling(c, out);
    else if (c.experiment == "rate-profile") summary = run_rate_profile(c, out);
    else if (c.experiment == "caustic-sweep") summary = run_caustic_sweep(c, out);
    else throw DomainError("unknown experiment '" + c.experiment + "'");
    write_json(out / "summary.json", summary);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(out / "manifest.json", {{"config", config_to_json(c)}, {"version", kVersion}, {"wall_time", wall}});
    log << summary.dump() << '\n';
    return 0;
}

}  // namespace eqlab

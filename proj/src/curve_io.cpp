#include "eqlab/curve_io.hpp"

#include <fstream>
#include <sstream>

namespace eqlab {

using nlohmann::json;

namespace {

std::vector<double> split_numbers(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw DomainError("bad number '" + item + "' in shape spec");
        }
    }
    return out;
}

}  // namespace

PolarFourier fig4_shape()
{
    PolarFourier pf;
    pf.c0 = 1.0;
    pf.cos = {0.0, 0.02, 0.002, 0.001, 0.0012, 0.0, 0.008};
    pf.sin = {0.0, 0.0, 0.003, -0.0015, 0.0007, 0.0, 0.0};
    return pf;
}

PolarFourier fig6_shape()
{
    PolarFourier pf;
    pf.c0 = 1.0;
    pf.cos = {0.0, 0.08, 0.003, 0.03, 0.001};
    pf.sin = {0.0, 0.0, 0.002, 0.0, -0.002};
    return pf;
}

SmoothCurve curve_from_json(const json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ellipse") return SmoothCurve::ellipse(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "polar_fourier") {
        PolarFourier pf;
        pf.c0 = j.value("c0", 1.0);
        if (j.contains("cos")) pf.cos = j.at("cos").get<std::vector<double>>();
        if (j.contains("sin")) pf.sin = j.at("sin").get<std::vector<double>>();
        return SmoothCurve::polar_fourier(std::move(pf));
    }
    if (kind == "spline") {
        const auto& pts = j.at("points");
        Eigen::Matrix2Xd m(2, pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            m(0, i) = pts[i].at(0).get<double>();
            m(1, i) = pts[i].at(1).get<double>();
        }
        return SmoothCurve::spline(m);
    }
    throw DomainError("unknown curve kind '" + kind + "'");
}

json curve_to_json(const SmoothCurve& curve)
{
    const auto& k = curve.kind();
    if (const auto* e = std::get_if<Ellipse>(&k)) return {{"kind", "ellipse"}, {"a", e->a}, {"b", e->b}};
    if (const auto* p = std::get_if<PolarFourier>(&k))
        return {{"kind", "polar_fourier"}, {"c0", p->c0}, {"cos", p->cos}, {"sin", p->sin}};
    if (const auto* s = std::get_if<PeriodicSpline>(&k)) {
        json pts = json::array();
        for (Eigen::Index i = 0; i < s->size(); ++i) pts.push_back({s->points()(0, i), s->points()(1, i)});
        return {{"kind", "spline"}, {"points", pts}};
    }
    const auto& g = std::get<GraphCurve>(k);
    return {{"kind", "graph"}, {"c", g.c}, {"half_width", g.half_width}};
}

SmoothCurve parse_shape(const std::string& spec)
{
    if (spec == "fig4") return SmoothCurve::polar_fourier(fig4_shape());
    if (spec == "fig6") return SmoothCurve::polar_fourier(fig6_shape());
    if (spec.rfind("ellipse:", 0) == 0) {
        const auto v = split_numbers(spec.substr(8));
        if (v.size() != 2) throw DomainError("ellipse:a,b expects two numbers");
        return SmoothCurve::ellipse(v[0], v[1]);
    }
    if (spec.rfind("circle:", 0) == 0) {
        const auto v = split_numbers(spec.substr(7));
        if (v.size() != 1) throw DomainError("circle:R expects one number");
        PolarFourier pf;
        pf.c0 = v[0];
        return SmoothCurve::polar_fourier(pf);
    }
    if (!spec.empty() && spec.front() == '{') return curve_from_json(json::parse(spec));
    std::ifstream in(spec);
    if (!in) throw DomainError("cannot open shape file '" + spec + "'");
    return curve_from_json(json::parse(in));
}

}  // namespace eqlab

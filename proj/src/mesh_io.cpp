#include "eqlab/mesh.hpp"

#include "eqlab/format.hpp"

#include <fstream>
#include <sstream>

namespace eqlab {

namespace {

TriMesh build(const std::vector<Vec3>& pts, const std::vector<std::vector<int>>& polys)
{
    Eigen::Matrix3Xd V(3, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) V.col(static_cast<Eigen::Index>(i)) = pts[i];
    std::vector<Eigen::Vector3i> tris;
    for (std::size_t p = 0; p < polys.size(); ++p) {
        const auto& poly = polys[p];
        if (poly.size() < 3) throw MeshError("polygon " + std::to_string(p) + " has fewer than 3 vertices");
        for (std::size_t k = 1; k + 1 < poly.size(); ++k) tris.emplace_back(poly[0], poly[k], poly[k + 1]);
    }
    Eigen::Matrix3Xi F(3, static_cast<Eigen::Index>(tris.size()));
    for (std::size_t i = 0; i < tris.size(); ++i) F.col(static_cast<Eigen::Index>(i)) = tris[i];
    return TriMesh(std::move(V), std::move(F));
}

// Next non-empty, non-comment line.
bool next_line(std::istream& in, std::string& line)
{
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

}  // namespace

TriMesh read_off(std::istream& in)
{
    std::string line;
    if (!next_line(in, line)) throw MeshError("empty OFF file");
    std::istringstream head(line);
    std::string magic;
    head >> magic;
    if (magic.rfind("OFF", 0) != 0) throw MeshError("missing OFF header");
    long nv = -1, nf = -1, ne = 0;
    if (!(head >> nv >> nf >> ne)) {
        if (!next_line(in, line)) throw MeshError("OFF file lacks counts");
        std::istringstream counts(line);
        if (!(counts >> nv >> nf)) throw MeshError("bad OFF counts line");
    }
    if (nv < 0 || nf < 0) throw MeshError("negative OFF counts");
    std::vector<Vec3> pts;
    for (long i = 0; i < nv; ++i) {
        if (!next_line(in, line)) throw MeshError("OFF file ends inside vertex list");
        std::istringstream ss(line);
        Vec3 p;
        if (!(ss >> p.x() >> p.y() >> p.z())) throw MeshError("bad OFF vertex " + std::to_string(i));
        pts.push_back(p);
    }
    std::vector<std::vector<int>> polys;
    for (long i = 0; i < nf; ++i) {
        if (!next_line(in, line)) throw MeshError("OFF file ends inside face list");
        std::istringstream ss(line);
        int k = 0;
        ss >> k;
        std::vector<int> poly(static_cast<std::size_t>(std::max(k, 0)));
        for (auto& v : poly)
            if (!(ss >> v)) throw MeshError("bad OFF face " + std::to_string(i));
        polys.push_back(std::move(poly));
    }
    return build(pts, polys);
}

TriMesh read_obj(std::istream& in)
{
    std::vector<Vec3> pts;
    std::vector<std::vector<int>> polys;
    std::string line;
    while (next_line(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 p;
            if (!(ss >> p.x() >> p.y() >> p.z())) throw MeshError("bad OBJ vertex line: " + line);
            pts.push_back(p);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (ss >> tok) {
                const int idx = std::stoi(tok.substr(0, tok.find('/')));
                poly.push_back(idx < 0 ? static_cast<int>(pts.size()) + idx : idx - 1);
            }
            polys.push_back(std::move(poly));
        }
    }
    return build(pts, polys);
}

TriMesh load_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file '" + path + "'");
    const auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ext == "off") return read_off(in);
    if (ext == "obj") return read_obj(in);
    throw MeshError("unknown mesh extension '" + ext + "' (expected .off or .obj)");
}

void write_off(std::ostream& os, const TriMesh& m)
{
    os << "OFF\n" << m.num_vertices() << ' ' << m.num_faces() << ' ' << m.num_edges() << '\n';
    for (Eigen::Index i = 0; i < m.num_vertices(); ++i)
        os << fmt17(m.vertices()(0, i)) << ' ' << fmt17(m.vertices()(1, i)) << ' ' << fmt17(m.vertices()(2, i)) << '\n';
    for (Eigen::Index f = 0; f < m.num_faces(); ++f)
        os << "3 " << m.faces()(0, f) << ' ' << m.faces()(1, f) << ' ' << m.faces()(2, f) << '\n';
}

void write_obj(std::ostream& os, const TriMesh& m)
{
    for (Eigen::Index i = 0; i < m.num_vertices(); ++i)
        os << "v " << fmt17(m.vertices()(0, i)) << ' ' << fmt17(m.vertices()(1, i)) << ' '
           << fmt17(m.vertices()(2, i)) << '\n';
    for (Eigen::Index f = 0; f < m.num_faces(); ++f)
        os << "f " << m.faces()(0, f) + 1 << ' ' << m.faces()(1, f) + 1 << ' ' << m.faces()(2, f) + 1 << '\n';
}

}  // namespace eqlab

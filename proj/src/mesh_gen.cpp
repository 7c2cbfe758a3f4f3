#include "eqlab/mesh.hpp"

#include <array>
#include <cmath>
#include <map>
#include <sstream>

namespace eqlab {

Eigen::Matrix3d generic_rotation()
{
    return Eigen::AngleAxisd(0.3, Vec3(1.0, 2.0, 3.0).normalized()).toRotationMatrix();
}

TriMesh icosphere(int m, const Eigen::Matrix3d& rotation)
{
    if (m < 1) throw DomainError("icosphere frequency must be positive");
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const std::array<Vec3, 12> base{Vec3(-1, phi, 0), Vec3(1, phi, 0),  Vec3(-1, -phi, 0), Vec3(1, -phi, 0),
                                    Vec3(0, -1, phi), Vec3(0, 1, phi),  Vec3(0, -1, -phi), Vec3(0, 1, -phi),
                                    Vec3(phi, 0, -1), Vec3(phi, 0, 1),  Vec3(-phi, 0, -1), Vec3(-phi, 0, 1)};
    const int tri[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
                            {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
                            {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

    std::map<std::array<long long, 3>, int> index;
    std::vector<Vec3> pts;
    auto vertex = [&](const Vec3& p) {
        const Vec3 u = p.normalized();
        const std::array<long long, 3> key{std::llround(u.x() * 1e9), std::llround(u.y() * 1e9),
                                           std::llround(u.z() * 1e9)};
        auto [it, fresh] = index.emplace(key, static_cast<int>(pts.size()));
        if (fresh) pts.push_back(u);
        return it->second;
    };

    std::vector<Eigen::Vector3i> faces;
    for (const auto& t : tri) {
        const Vec3 A = base[t[0]], B = base[t[1]], C = base[t[2]];
        std::vector<std::vector<int>> id(static_cast<std::size_t>(m + 1));
        for (int i = 0; i <= m; ++i)
            for (int j = 0; i + j <= m; ++j)
                id[static_cast<std::size_t>(i)].push_back(
                    vertex(A + (B - A) * (static_cast<double>(i) / m) + (C - A) * (static_cast<double>(j) / m)));
        for (int i = 0; i < m; ++i)
            for (int j = 0; i + j < m; ++j) {
                const auto ii = static_cast<std::size_t>(i), jj = static_cast<std::size_t>(j);
                faces.emplace_back(id[ii][jj], id[ii + 1][jj], id[ii][jj + 1]);
                if (i + j + 1 < m) faces.emplace_back(id[ii + 1][jj], id[ii + 1][jj + 1], id[ii][jj + 1]);
            }
    }

    Eigen::Matrix3Xd V(3, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) V.col(static_cast<Eigen::Index>(i)) = rotation * pts[i];
    Eigen::Matrix3Xi F(3, static_cast<Eigen::Index>(faces.size()));
    for (std::size_t i = 0; i < faces.size(); ++i) F.col(static_cast<Eigen::Index>(i)) = faces[i];
    return TriMesh(std::move(V), std::move(F));
}

int icosphere_frequency_for(int faces)
{
    return std::max(1, static_cast<int>(std::lround(std::sqrt(faces / 20.0))));
}

TriMesh ellipsoid_mesh(double a, double b, double c, int m)
{
    if (!(a > 0 && b > 0 && c > 0)) throw DomainError("ellipsoid semi-axes must be positive");
    const TriMesh s = icosphere(m, generic_rotation());
    const Eigen::Matrix3Xd V = Vec3(a, b, c).asDiagonal() * s.vertices();
    return TriMesh(V, s.faces());
}

TriMesh cube_mesh(double half, const Vec3& center)
{
    Eigen::Matrix3Xd V(3, 8);
    for (int i = 0; i < 8; ++i)
        V.col(i) = center + half * Vec3((i & 1) ? 1 : -1, (i & 2) ? 1 : -1, (i & 4) ? 1 : -1);
    const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
    Eigen::Matrix3Xi F(3, 12);
    for (int q = 0; q < 6; ++q) {
        F.col(2 * q) << quads[q][0], quads[q][1], quads[q][2];
        F.col(2 * q + 1) << quads[q][0], quads[q][2], quads[q][3];
    }
    return TriMesh(V, F);
}

TriMesh tetrahedron_mesh(double circumradius)
{
    Eigen::Matrix3Xd V(3, 4);
    V << 1, 1, -1, -1, 1, -1, 1, -1, 1, -1, -1, 1;
    V *= circumradius / std::sqrt(3.0);
    Eigen::Matrix3Xi F(3, 4);
    F << 0, 0, 0, 1, 1, 2, 3, 2, 2, 3, 1, 3;
    return TriMesh(V, F);
}

TriMesh octahedron_mesh(double r)
{
    Eigen::Matrix3Xd V(3, 6);
    V << r, -r, 0, 0, 0, 0, 0, 0, r, -r, 0, 0, 0, 0, 0, 0, r, -r;
    Eigen::Matrix3Xi F(3, 8);
    int f = 0;
    for (int x : {0, 1})
        for (int y : {2, 3})
            for (int z : {4, 5}) F.col(f++) << x, y, z;
    return TriMesh(V, F);
}

TriMesh parse_mesh(const std::string& spec)
{
    if (spec == "cube") return cube_mesh();
    if (spec == "tetrahedron") return tetrahedron_mesh();
    if (spec == "octahedron") return octahedron_mesh();
    if (spec.rfind("ellipsoid:", 0) == 0) {
        std::vector<double> v;
        std::stringstream ss(spec.substr(10));
        std::string item;
        while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
        if (v.size() != 3 && v.size() != 4) throw DomainError("ellipsoid:a,b,c[,faces] expects 3 or 4 numbers");
        const int faces = v.size() == 4 ? static_cast<int>(v[3]) : 51108;
        return ellipsoid_mesh(v[0], v[1], v[2], icosphere_frequency_for(faces));
    }
    return load_mesh(spec);
}

}  // namespace eqlab

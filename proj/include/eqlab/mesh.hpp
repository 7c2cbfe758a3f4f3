#pragma once

#include "eqlab/common.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace eqlab {

// Closed convex triangulated surface with outward orientation.
class TriMesh {
public:
    // Validates manifoldness, Euler characteristic and convexity; flips faces to a
    // consistent outward orientation. Throws MeshError naming the offending feature.
    TriMesh(Eigen::Matrix3Xd V, Eigen::Matrix3Xi F);

    const Eigen::Matrix3Xd& vertices() const { return V_; }
    const Eigen::Matrix3Xi& faces() const { return F_; }
    const Eigen::Matrix2Xi& edges() const { return E_; }
    // Faces on either side of each edge.
    const Eigen::Matrix2Xi& edge_faces() const { return EF_; }
    const Eigen::Matrix3Xd& face_normals() const { return N_; }
    std::span<const int> neighbors(int v) const
    {
        return {adj_.data() + adj_off_[static_cast<std::size_t>(v)],
                static_cast<std::size_t>(adj_off_[static_cast<std::size_t>(v) + 1] - adj_off_[static_cast<std::size_t>(v)])};
    }

    Eigen::Index num_vertices() const { return V_.cols(); }
    Eigen::Index num_edges() const { return E_.cols(); }
    Eigen::Index num_faces() const { return F_.cols(); }
    const Vec3& centroid() const { return centroid_; }
    double volume() const { return volume_; }
    double scale() const { return scale_; }
    double mean_edge_length() const { return mean_edge_; }

    // Strictly inside every face plane by more than margin * scale.
    bool contains(const Vec3& p, double margin = 1e-9) const;

private:
    Eigen::Matrix3Xd V_;
    Eigen::Matrix3Xi F_;
    Eigen::Matrix2Xi E_;
    Eigen::Matrix2Xi EF_;
    Eigen::Matrix3Xd N_;
    std::vector<int> adj_;
    std::vector<int> adj_off_;
    Vec3 centroid_ = Vec3::Zero();
    double volume_ = 0.0;
    double scale_ = 1.0;
    double mean_edge_ = 0.0;
};

// Uniform-density solid centroid from signed tetrahedra against the first vertex.
Vec3 solid_centroid(const Eigen::Matrix3Xd& V, const Eigen::Matrix3Xi& F);
double signed_volume(const Eigen::Matrix3Xd& V, const Eigen::Matrix3Xi& F);

// OFF or OBJ chosen by extension; polygons are fan-triangulated.
TriMesh load_mesh(const std::string& path);
TriMesh read_off(std::istream& in);
TriMesh read_obj(std::istream& in);
void write_off(std::ostream& os, const TriMesh& m);
void write_obj(std::ostream& os, const TriMesh& m);

Eigen::Matrix3d generic_rotation();
// Geodesic sphere of frequency m: 20 m^2 faces, 10 m^2 + 2 vertices.
TriMesh icosphere(int m, const Eigen::Matrix3d& rotation = Eigen::Matrix3d::Identity());
// Affine stretch of a rotated icosphere, so convexity is exact.
TriMesh ellipsoid_mesh(double a, double b, double c, int m);
// Frequency giving a face count closest to `faces`.
int icosphere_frequency_for(int faces);
TriMesh cube_mesh(double half = 1.0, const Vec3& center = Vec3::Zero());
TriMesh tetrahedron_mesh(double circumradius = 1.0);
TriMesh octahedron_mesh(double r = 1.0);
// Parses "ellipsoid:a,b,c[,faces]", "cube", "tetrahedron", "octahedron" or a file path.
TriMesh parse_mesh(const std::string& spec);

}  // namespace eqlab

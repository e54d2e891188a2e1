/// @file trimesh.hpp
/// @brief Intrinsic (edge-length) triangle meshes for closed surfaces.
///
/// PURPOSE: the smoothed Croke surface is a doubled flat region with three
/// rotationally symmetric caps — it has no convenient global embedding, but
/// its simplicial geometry is determined exactly by geodesic edge lengths.
/// Carrying the metric as lengths (never coordinates) keeps angle defects,
/// areas, the cotangent Laplacian, and intrinsic polyline shortening exact
/// up to rounding, so Gauss–Bonnet style certificates hold at 1e-12 scale.

#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace horizon {

/// A closed triangulated surface with per-edge lengths as the only geometry.
/// Build with add_vertex / add_face / set_edge_length, then finalize(), which
/// validates closedness (every edge in exactly two faces), length coverage,
/// and strict triangle inequalities, and caches angles, areas, and adjacency.
class TriMesh {
  public:
    int add_vertex();
    /// Faces are oriented (a,b,c); the two faces of an edge must traverse it
    /// in opposite directions for the surface to be orientable.
    void add_face(int a, int b, int c);
    /// Assigns the geodesic length of edge {a,b}.  Re-assignment must agree
    /// within 1e-9 relative (used to cross-check zone formulas at seams).
    void set_edge_length(int a, int b, double length);
    bool has_edge(int a, int b) const;
    void finalize();

    int vertex_count() const { return n_vertices_; }
    int face_count() const { return static_cast<int>(faces_.size()); }
    int edge_count() const { return static_cast<int>(edge_lengths_.size()); }
    int euler_characteristic() const;

    const std::array<int, 3>& face(int f) const { return faces_[f]; }
    double edge_length(int a, int b) const;
    double max_edge_length() const { return max_edge_length_; }
    double min_edge_length() const { return min_edge_length_; }

    double face_area(int f) const { return areas_[f]; }
    /// Interior angle of face f at its c-th corner (c in {0,1,2}).
    double corner_angle(int f, int c) const { return angles_[f][c]; }

    double total_area() const;
    double angle_defect(int v) const { return defects_[v]; }
    double total_angle_defect() const;
    double min_angle_defect() const;

    /// Neighbors of v as (vertex, edge length) pairs, sorted by vertex id.
    const std::vector<std::pair<int, double>>& neighbors(int v) const {
        return adjacency_[v];
    }
    /// Faces incident to v in cyclic fan order around v.
    const std::vector<int>& vertex_fan(int v) const { return fans_[v]; }
    /// The face on the other side of edge {a,b} from face f (-1 if none).
    int opposite_face(int f, int a, int b) const;

    /// First Dirichlet eigenvalue of the Laplace–Beltrami operator on the
    /// closed surface above the constant mode: the smallest positive λ with
    /// L u = λ M u for the cotangent stiffness L and lumped mass M, found by
    /// shift-inverted power iteration with constants deflated exactly.
    /// Throws numeric_error if the inner conjugate-gradient solves stall.
    double fem_lambda1() const;

    /// Uniform positive rescale of the metric: lengths *= s (areas *= s^2).
    void scale_lengths(double s);

  private:
    double raw_length(uint64_t key) const;
    void build_fans();

    int n_vertices_ = 0;
    bool finalized_ = false;
    std::vector<std::array<int, 3>> faces_;
    std::unordered_map<uint64_t, double> edge_lengths_;
    std::vector<std::array<double, 3>> angles_;           // per face corner
    std::vector<double> areas_;                           // per face
    std::vector<double> defects_;                         // per vertex
    std::vector<std::vector<std::pair<int, double>>> adjacency_;
    std::vector<std::vector<int>> fans_;          // faces around each vertex
    std::vector<std::array<int, 3>> face_nbrs_;   // across edge opposite c
    double max_edge_length_ = 0.0;
    double min_edge_length_ = 0.0;

    friend class MeshLayout;
};

/// Geodesic sphere approximation of the unit round sphere: an icosahedron
/// subdivided `subdivisions` times with vertices projected to the sphere and
/// chord edge lengths.  A convex-polyhedron oracle: every angle defect is
/// positive and the total is exactly 4π.
TriMesh icosphere(int subdivisions);

/// Flat torus C/(Z w1 + Z w2) triangulated by an n x n lattice grid; edge
/// lengths are exact straight-line lengths, so every defect is exactly zero.
TriMesh flat_torus_mesh(double w1x, double w1y, double w2x, double w2y, int n);

} // namespace horizon

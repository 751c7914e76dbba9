#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "tev/params.hpp"

namespace tev {

// Conforming triangulation with an explicit boundary-edge list and the
// interior/boundary node partition. Immutable after construction.
struct Mesh {
    // Curved domains re-project new boundary vertices on refinement.
    enum class BoundaryGeometry { Polygonal, UnitCircle };

    std::vector<Eigen::Vector2d> vertices;
    std::vector<std::array<int, 3>> triangles;        // counterclockwise
    std::vector<std::array<int, 2>> boundary_edges;   // normalized (lo, hi) pairs
    std::vector<int> interior_nodes;                  // ascending
    std::vector<int> boundary_nodes;                  // ascending
    BoundaryGeometry geometry = BoundaryGeometry::Polygonal;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    int num_edges() const;

    double total_area() const;
    double boundary_length() const;
    double max_edge_length() const;

    // Checks positive areas, conformity (every edge in exactly 2 triangles or
    // listed as a boundary edge in exactly 1), and the node partition.
    // ValidationError on violation.
    void validate() const;
};

// Builds the catalog domains:
//   UnitSquare: crossed-diagonal grid, 4*2^r cells per side on (-1/2,1/2)^2
//   LShape:     the same grid minus the closed quadrant [0,1/2]^2
//   UnitDisk:   16-triangle fan refined r times, boundary projected to the circle
// ConfigError on unknown kind; ExternalMesh loads from DomainSpec::path.
Mesh generate(const DomainSpec& domain);

// Uniform red refinement (each triangle into 4). Disk meshes re-project new
// boundary midpoints onto the unit circle.
Mesh refine(const Mesh& mesh);

// ASCII mesh format (carries no curved-geometry tag, so loaded meshes refine
// as polygonal):
//   tevmesh 1
//   vertices N       followed by N lines "x y"
//   triangles T      followed by T lines "i j k" (0-based, CCW)
//   boundary_edges B followed by B lines "i j"
// Lines starting with '#' are ignored. ParseError carries the line number;
// ValidationError when the loaded mesh breaks conformity.
Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);

}  // namespace tev

// Polygonal meshes of planar domains.
//
// A mesh is built from a vertex list and one counter-clockwise vertex loop
// per cell. Faces (edges) are derived by matching the integer vertex ids of
// consecutive loop entries, so no floating-point face identification is
// needed. Derived geometry (measures, centroids, normals, diameters) is
// computed once at construction and the mesh is immutable afterwards.

#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hho {

using Point = Eigen::Vector2d;
using Vector2 = Eigen::Vector2d;

/// Raised on invalid connectivity or geometry.
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Face {
    std::array<std::size_t, 2> vertices{};  // oriented as seen from cells[0]
    double measure = 0.0;                   // h_F
    Point midpoint = Point::Zero();
    Vector2 normal = Vector2::Zero();       // unit, outward for cells[0]
    std::vector<std::size_t> cells;         // 1 (boundary) or 2 (interior)
    bool is_boundary = false;
};

struct Cell {
    std::vector<std::size_t> vertices;  // counter-clockwise loop
    Point centroid = Point::Zero();
    double diameter = 0.0;  // h_T, max pairwise vertex distance
    double measure = 0.0;
    std::vector<std::size_t> faces;     // faces[i] joins vertices[i] and vertices[i+1]
    std::vector<int> orientations;      // +1 if the face normal is outward for this cell
    std::vector<Vector2> normals;       // outward unit normals, one per face
};

class Mesh {
public:
    Mesh() = default;

    /// Builds faces and geometry. Throws MeshError when a loop is not
    /// counter-clockwise, not simple, references an unknown vertex, or when
    /// an edge is shared by more than two cells.
    Mesh(std::vector<Point> vertices, std::vector<std::vector<std::size_t>> cell_loops);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Face>& faces() const { return faces_; }
    const std::vector<std::size_t>& boundary_faces() const { return boundary_faces_; }

    const Point& vertex(std::size_t i) const { return vertices_[i]; }
    const Cell& cell(std::size_t i) const { return cells_[i]; }
    const Face& face(std::size_t i) const { return faces_[i]; }

    std::size_t n_vertices() const { return vertices_.size(); }
    std::size_t n_cells() const { return cells_.size(); }
    std::size_t n_faces() const { return faces_.size(); }

    /// Mesh size h = max_T h_T.
    double h() const { return h_; }

    /// Sum of cell measures.
    double measure() const;

    /// Vertex positions of a cell loop.
    std::vector<Point> cell_polygon(std::size_t cell) const;

private:
    void build();

    std::vector<Point> vertices_;
    std::vector<Cell> cells_;
    std::vector<Face> faces_;
    std::vector<std::size_t> boundary_faces_;
    double h_ = 0.0;
};

// Polygon helpers shared by the generators and quadrature.
double signed_area(const std::vector<Point>& polygon);
Point polygon_centroid(const std::vector<Point>& polygon);
double polygon_diameter(const std::vector<Point>& polygon);
bool is_simple_polygon(const std::vector<Point>& polygon);

}  // namespace hho

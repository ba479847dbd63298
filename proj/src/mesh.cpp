#include "hho/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace hho {

double signed_area(const std::vector<Point>& polygon)
{
    double a = 0.0;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = polygon[i];
        const Point& q = polygon[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

Point polygon_centroid(const std::vector<Point>& polygon)
{
    // Shoelace moments relative to the first vertex to limit cancellation.
    const Point origin = polygon.front();
    double a = 0.0;
    Point c = Point::Zero();
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = polygon[i] - origin;
        const Point q = polygon[(i + 1) % n] - origin;
        const double cross = p.x() * q.y() - q.x() * p.y();
        a += cross;
        c += cross * (p + q);
    }
    return origin + c / (3.0 * a);
}

double polygon_diameter(const std::vector<Point>& polygon)
{
    double d = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i)
        for (std::size_t j = i + 1; j < polygon.size(); ++j)
            d = std::max(d, (polygon[i] - polygon[j]).norm());
    return d;
}

namespace {

double orient(const Point& a, const Point& b, const Point& c)
{
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool on_segment(const Point& a, const Point& b, const Point& p)
{
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x())
        && std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d)
{
    const double o1 = orient(a, b, c);
    const double o2 = orient(a, b, d);
    const double o3 = orient(c, d, a);
    const double o4 = orient(c, d, b);
    if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
        return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

}  // namespace

bool is_simple_polygon(const std::vector<Point>& polygon)
{
    const std::size_t n = polygon.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::vector<std::size_t>> cell_loops)
    : vertices_(std::move(vertices))
{
    cells_.resize(cell_loops.size());
    for (std::size_t c = 0; c < cell_loops.size(); ++c)
        cells_[c].vertices = std::move(cell_loops[c]);
    build();
}

void Mesh::build()
{
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_to_face;

    for (std::size_t c = 0; c < cells_.size(); ++c) {
        Cell& cell = cells_[c];
        const std::size_t n = cell.vertices.size();
        if (n < 3)
            throw MeshError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        for (std::size_t v : cell.vertices)
            if (v >= vertices_.size())
                throw MeshError("cell " + std::to_string(c) + " references unknown vertex " + std::to_string(v));

        const auto poly = cell_polygon(c);
        if (!is_simple_polygon(poly))
            throw MeshError("cell " + std::to_string(c) + " is not a simple polygon");
        cell.measure = signed_area(poly);
        if (!(cell.measure > 0.0))
            throw MeshError("cell " + std::to_string(c) + " is not counter-clockwise");
        cell.centroid = polygon_centroid(poly);
        cell.diameter = polygon_diameter(poly);

        cell.faces.resize(n);
        cell.orientations.resize(n);
        cell.normals.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = cell.vertices[i];
            const std::size_t b = cell.vertices[(i + 1) % n];
            const auto key = std::minmax(a, b);
            auto it = edge_to_face.find(key);
            const Vector2 t = vertices_[b] - vertices_[a];
            const Vector2 outward = Vector2(t.y(), -t.x()).normalized();
            if (it == edge_to_face.end()) {
                Face f;
                f.vertices = {a, b};
                f.measure = t.norm();
                f.midpoint = 0.5 * (vertices_[a] + vertices_[b]);
                f.normal = outward;
                f.cells.push_back(c);
                edge_to_face.emplace(key, faces_.size());
                cell.faces[i] = faces_.size();
                cell.orientations[i] = 1;
                faces_.push_back(f);
            } else {
                Face& f = faces_[it->second];
                if (f.cells.size() != 1 || f.vertices[0] != b || f.vertices[1] != a)
                    throw MeshError("edge (" + std::to_string(a) + ", " + std::to_string(b)
                                    + ") is shared inconsistently by cell " + std::to_string(c));
                f.cells.push_back(c);
                cell.faces[i] = it->second;
                cell.orientations[i] = -1;
            }
            cell.normals[i] = outward;
        }
        h_ = std::max(h_, cell.diameter);
    }

    for (std::size_t f = 0; f < faces_.size(); ++f) {
        faces_[f].is_boundary = faces_[f].cells.size() == 1;
        if (faces_[f].is_boundary) boundary_faces_.push_back(f);
    }
}

double Mesh::measure() const
{
    double m = 0.0;
    for (const auto& c : cells_) m += c.measure;
    return m;
}

std::vector<Point> Mesh::cell_polygon(std::size_t cell) const
{
    std::vector<Point> poly;
    poly.reserve(cells_[cell].vertices.size());
    for (std::size_t v : cells_[cell].vertices) poly.push_back(vertices_[v]);
    return poly;
}

}  // namespace hho

// Quadrature rules on segments, triangles and polygonal cells.

#pragma once

#include <vector>

#include "hho/mesh.hpp"

namespace hho {

struct Quadrature {
    std::vector<Point> nodes;
    std::vector<double> weights;
    int exactness = 0;  // polynomials of total degree <= exactness are integrated exactly

    std::size_t size() const { return weights.size(); }
    double total_weight() const;
};

/// One-dimensional rule on [-1, 1] for the weight (1-x)^alpha (1+x)^beta.
struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Jacobi rule (Golub-Welsch); alpha = beta = 0 gives Gauss-Legendre.
Rule1D gauss_jacobi(std::size_t n, double alpha, double beta);
inline Rule1D gauss_legendre(std::size_t n) { return gauss_jacobi(n, 0.0, 0.0); }

/// Gauss-Legendre on the segment [a, b] with ceil((exactness+1)/2) points.
Quadrature segment_quadrature(const Point& a, const Point& b, int exactness);

/// Collapsed Gauss rule on a triangle (any orientation; weights use |area|).
Quadrature triangle_quadrature(const Point& a, const Point& b, const Point& c, int exactness);

/// Sub-triangulates a simple counter-clockwise polygon: a fan from `center`
/// when every fan triangle has positive area, ear clipping otherwise.
std::vector<std::array<Point, 3>> polygon_triangles(const std::vector<Point>& polygon, const Point& center);

Quadrature polygon_quadrature(const std::vector<Point>& polygon, const Point& center, int exactness);

Quadrature cell_quadrature(const Mesh& mesh, std::size_t cell, int exactness);
Quadrature face_quadrature(const Mesh& mesh, std::size_t face, int exactness);

}  // namespace hho

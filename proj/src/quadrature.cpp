#include "hho/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hho {

double Quadrature::total_weight() const
{
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

Rule1D gauss_jacobi(std::size_t n, double alpha, double beta)
{
    if (n == 0) throw std::invalid_argument("gauss_jacobi: need at least one point");
    const double ab = alpha + beta;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double k = double(i);
        const double denom = (2 * k + ab) * (2 * k + ab + 2);
        J(Eigen::Index(i), Eigen::Index(i)) = (denom == 0.0) ? (beta - alpha) / (ab + 2) : (beta * beta - alpha * alpha) / denom;
        if (i + 1 < n) {
            const double m = k + 1;
            const double s = 2 * m + ab;
            const double b2 = 4 * m * (m + alpha) * (m + beta) * (m + ab) / (s * s * (s + 1) * (s - 1));
            J(Eigen::Index(i), Eigen::Index(i + 1)) = J(Eigen::Index(i + 1), Eigen::Index(i)) = std::sqrt(b2);
        }
    }
    const double mu0 = std::pow(2.0, ab + 1) * std::tgamma(alpha + 1) * std::tgamma(beta + 1) / std::tgamma(ab + 2);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
    Rule1D r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        r.nodes[i] = eig.eigenvalues()(Eigen::Index(i));
        const double v0 = eig.eigenvectors()(0, Eigen::Index(i));
        r.weights[i] = mu0 * v0 * v0;
    }
    return r;
}

namespace {

std::size_t points_for(int exactness)
{
    return std::size_t(std::max(1, (exactness + 2) / 2));  // ceil((e+1)/2)
}

}  // namespace

Quadrature segment_quadrature(const Point& a, const Point& b, int exactness)
{
    const auto rule = gauss_legendre(points_for(exactness));
    const double len = (b - a).norm();
    Quadrature q;
    q.exactness = exactness;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = 0.5 * (rule.nodes[i] + 1.0);
        q.nodes.push_back(a + t * (b - a));
        q.weights.push_back(0.5 * len * rule.weights[i]);
    }
    return q;
}

Quadrature triangle_quadrature(const Point& a, const Point& b, const Point& c, int exactness)
{
    // Collapsed coordinates: p = a + s (b - a) + t (c - a) with s = xi (1 - eta), t = eta.
    // The Jacobian factor (1 - eta) is absorbed by a Gauss-Jacobi(1, 0) rule.
    const std::size_t n = points_for(exactness);
    const auto gx = gauss_legendre(n);
    const auto gy = gauss_jacobi(n, 1.0, 0.0);
    const double area2 = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());

    Quadrature q;
    q.exactness = exactness;
    q.nodes.reserve(n * n);
    q.weights.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        const double eta = 0.5 * (gy.nodes[j] + 1.0);
        const double wy = 0.25 * gy.weights[j];  // int_0^1 g (1-eta) d eta
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = 0.5 * (gx.nodes[i] + 1.0);
            const double wx = 0.5 * gx.weights[i];
            const double s = xi * (1.0 - eta);
            q.nodes.push_back(a + s * (b - a) + eta * (c - a));
            q.weights.push_back(area2 * wx * wy);
        }
    }
    return q;
}

std::vector<std::array<Point, 3>> polygon_triangles(const std::vector<Point>& polygon, const Point& center)
{
    const std::size_t n = polygon.size();
    std::vector<std::array<Point, 3>> tris;
    bool fan_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        const std::array<Point, 3> t{center, polygon[i], polygon[(i + 1) % n]};
        if (signed_area({t[0], t[1], t[2]}) <= 0.0) {
            fan_ok = false;
            break;
        }
        tris.push_back(t);
    }
    if (fan_ok) return tris;

    // Ear clipping.
    tris.clear();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    auto inside = [](const Point& p, const Point& a, const Point& b, const Point& c) {
        const double d1 = signed_area({a, b, p});
        const double d2 = signed_area({b, c, p});
        const double d3 = signed_area({c, a, p});
        return d1 >= 0 && d2 >= 0 && d3 >= 0;
    };
    std::size_t guard = 0;
    while (idx.size() > 3) {
        bool clipped = false;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const Point& a = polygon[idx[(k + idx.size() - 1) % idx.size()]];
            const Point& b = polygon[idx[k]];
            const Point& c = polygon[idx[(k + 1) % idx.size()]];
            if (signed_area({a, b, c}) <= 0.0) continue;
            bool ear = true;
            for (std::size_t m = 0; m < idx.size() && ear; ++m) {
                const std::size_t v = idx[m];
                if (v == idx[k] || v == idx[(k + 1) % idx.size()] || v == idx[(k + idx.size() - 1) % idx.size()])
                    continue;
                if (inside(polygon[v], a, b, c)) ear = false;
            }
            if (!ear) continue;
            tris.push_back({a, b, c});
            idx.erase(idx.begin() + long(k));
            clipped = true;
            break;
        }
        if (!clipped || ++guard > 4 * n) throw MeshError("polygon triangulation failed");
    }
    tris.push_back({polygon[idx[0]], polygon[idx[1]], polygon[idx[2]]});
    return tris;
}

Quadrature polygon_quadrature(const std::vector<Point>& polygon, const Point& center, int exactness)
{
    Quadrature q;
    q.exactness = exactness;
    for (const auto& t : polygon_triangles(polygon, center)) {
        auto qt = triangle_quadrature(t[0], t[1], t[2], exactness);
        q.nodes.insert(q.nodes.end(), qt.nodes.begin(), qt.nodes.end());
        q.weights.insert(q.weights.end(), qt.weights.begin(), qt.weights.end());
    }
    return q;
}

Quadrature cell_quadrature(const Mesh& mesh, std::size_t cell, int exactness)
{
    return polygon_quadrature(mesh.cell_polygon(cell), mesh.cell(cell).centroid, exactness);
}

Quadrature face_quadrature(const Mesh& mesh, std::size_t face, int exactness)
{
    const auto& f = mesh.face(face);
    return segment_quadrature(mesh.vertex(f.vertices[0]), mesh.vertex(f.vertices[1]), exactness);
}

}  // namespace hho

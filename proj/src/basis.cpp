#include "hho/basis.hpp"

#include <cmath>

namespace hho {

Eigen::MatrixXd mass_matrix(const Eigen::MatrixXd& table, const Quadrature& q)
{
    const Eigen::Map<const Eigen::VectorXd> w(q.weights.data(), Eigen::Index(q.size()));
    return table.transpose() * w.asDiagonal() * table;
}

CellBasis::CellBasis(const Mesh& mesh, std::size_t cell, int degree, BasisMode mode)
    : degree_(degree), mode_(mode), center_(mesh.cell(cell).centroid), scale_(mesh.cell(cell).diameter)
{
    const auto n = Eigen::Index(size());
    coeffs_ = Eigen::MatrixXd::Identity(n, n);
    if (mode_ == BasisMode::orthonormal) {
        const auto q = cell_quadrature(mesh, cell, 2 * degree_);
        Eigen::MatrixXd table(Eigen::Index(q.size()), n);
        for (std::size_t i = 0; i < q.size(); ++i) table.row(Eigen::Index(i)) = monomials(q.nodes[i]).transpose();
        const Eigen::MatrixXd gram = mass_matrix(table, q);
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success) throw std::runtime_error("cell basis: singular Gram matrix");
        const Eigen::MatrixXd L = llt.matrixL();
        coeffs_ = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
    }
}

Eigen::VectorXd CellBasis::monomials(const Point& p) const
{
    const double x = (p.x() - center_.x()) / scale_;
    const double y = (p.y() - center_.y()) / scale_;
    Eigen::VectorXd m(static_cast<Eigen::Index>(size()));
    Eigen::Index k = 0;
    for (int d = 0; d <= degree_; ++d)
        for (int j = 0; j <= d; ++j) m(k++) = std::pow(x, d - j) * std::pow(y, j);
    return m;
}

GradientTable CellBasis::monomial_grads(const Point& p) const
{
    const double x = (p.x() - center_.x()) / scale_;
    const double y = (p.y() - center_.y()) / scale_;
    GradientTable g(Eigen::Index(size()), 2);
    Eigen::Index k = 0;
    for (int d = 0; d <= degree_; ++d)
        for (int j = 0; j <= d; ++j) {
            const int a = d - j;
            g(k, 0) = a > 0 ? a * std::pow(x, a - 1) * std::pow(y, j) / scale_ : 0.0;
            g(k, 1) = j > 0 ? j * std::pow(x, a) * std::pow(y, j - 1) / scale_ : 0.0;
            ++k;
        }
    return g;
}

Eigen::VectorXd CellBasis::eval(const Point& p) const
{
    if (mode_ == BasisMode::scaled_monomial) return monomials(p);
    return coeffs_.triangularView<Eigen::Lower>() * monomials(p);
}

GradientTable CellBasis::eval_grad(const Point& p) const
{
    if (mode_ == BasisMode::scaled_monomial) return monomial_grads(p);
    return coeffs_.triangularView<Eigen::Lower>() * monomial_grads(p);
}

Eigen::MatrixXd CellBasis::eval(const std::vector<Point>& points) const
{
    Eigen::MatrixXd t(Eigen::Index(points.size()), Eigen::Index(size()));
    for (std::size_t i = 0; i < points.size(); ++i) t.row(Eigen::Index(i)) = eval(points[i]).transpose();
    return t;
}

FaceBasis::FaceBasis(const Mesh& mesh, std::size_t face, int degree) : degree_(degree)
{
    const auto& f = mesh.face(face);
    const Point& a = mesh.vertex(f.vertices[0]);
    const Point& b = mesh.vertex(f.vertices[1]);
    midpoint_ = f.midpoint;
    tangent_ = (b - a).normalized();
    half_length_ = 0.5 * f.measure;
}

double FaceBasis::parameter(const Point& p) const
{
    return (p - midpoint_).dot(tangent_) / half_length_;
}

Eigen::VectorXd FaceBasis::eval(const Point& p) const
{
    const double s = parameter(p);
    Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
    double pw = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = pw;
        pw *= s;
    }
    return v;
}

Eigen::MatrixXd FaceBasis::eval(const std::vector<Point>& points) const
{
    Eigen::MatrixXd t(Eigen::Index(points.size()), Eigen::Index(size()));
    for (std::size_t i = 0; i < points.size(); ++i) t.row(Eigen::Index(i)) = eval(points[i]).transpose();
    return t;
}

}  // namespace hho

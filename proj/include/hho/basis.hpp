// Polynomial bases on cells and faces.
//
// Cell bases are scaled monomials ((x - x_T)/h_T)^a ((y - y_T)/h_T)^b in
// graded order, optionally orthonormalized with respect to the cell L2 inner
// product (Cholesky of the Gram matrix). The graded order makes both variants
// hierarchical: the first dim P_l functions span P_l for every l <= degree.

#pragma once

#include <Eigen/Dense>

#include "hho/mesh.hpp"
#include "hho/quadrature.hpp"

namespace hho {

enum class BasisMode { scaled_monomial, orthonormal };

/// Number of bivariate polynomials of total degree <= degree.
constexpr std::size_t cell_basis_size(int degree)
{
    return degree < 0 ? 0 : std::size_t((degree + 1) * (degree + 2) / 2);
}

constexpr std::size_t face_basis_size(int degree)
{
    return degree < 0 ? 0 : std::size_t(degree + 1);
}

using GradientTable = Eigen::Matrix<double, Eigen::Dynamic, 2>;

class CellBasis {
public:
    CellBasis() = default;
    CellBasis(const Mesh& mesh, std::size_t cell, int degree, BasisMode mode);

    int degree() const { return degree_; }
    std::size_t size() const { return cell_basis_size(degree_); }
    BasisMode mode() const { return mode_; }
    const Point& center() const { return center_; }
    double scale() const { return scale_; }

    /// Values of all basis functions at p.
    Eigen::VectorXd eval(const Point& p) const;
    /// Row i holds the gradient of function i at p.
    GradientTable eval_grad(const Point& p) const;

    /// n_points x size() table.
    Eigen::MatrixXd eval(const std::vector<Point>& points) const;

    /// Monomial coefficients: basis_i = sum_j coefficients()(i, j) m_j.
    const Eigen::MatrixXd& coefficients() const { return coeffs_; }

private:
    Eigen::VectorXd monomials(const Point& p) const;
    GradientTable monomial_grads(const Point& p) const;

    int degree_ = 0;
    BasisMode mode_ = BasisMode::scaled_monomial;
    Point center_ = Point::Zero();
    double scale_ = 1.0;
    Eigen::MatrixXd coeffs_;  // lower triangular
};

/// Monomials in s = (2 t - h_F) / h_F in [-1, 1], t the arclength from the
/// face's first vertex. The parameterization only depends on the face, so
/// both adjacent cells see the same basis.
class FaceBasis {
public:
    FaceBasis() = default;
    FaceBasis(const Mesh& mesh, std::size_t face, int degree);

    int degree() const { return degree_; }
    std::size_t size() const { return face_basis_size(degree_); }

    double parameter(const Point& p) const;
    Eigen::VectorXd eval(const Point& p) const;
    Eigen::MatrixXd eval(const std::vector<Point>& points) const;

private:
    int degree_ = 0;
    Point midpoint_ = Point::Zero();
    Vector2 tangent_ = Vector2::UnitX();
    double half_length_ = 1.0;
};

/// Default basis variant for a given face degree: orthonormalized for k >= 2.
inline BasisMode default_basis_mode(int face_degree)
{
    return face_degree >= 2 ? BasisMode::orthonormal : BasisMode::scaled_monomial;
}

/// Mass matrix (phi_i, phi_j) of a set of functions tabulated at quadrature nodes.
Eigen::MatrixXd mass_matrix(const Eigen::MatrixXd& table, const Quadrature& q);

}  // namespace hho

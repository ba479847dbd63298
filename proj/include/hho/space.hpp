// HHO spaces: a polynomial of degree l on every cell and a polynomial of
// degree k on every face. l = k gives the equal-order space, l = k + 1 the
// mixed-order one. With `dirichlet` set, boundary-face unknowns are fixed to
// zero (the homogeneous subspace) and excluded from linear solves.

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hho/basis.hpp"
#include "hho/mesh.hpp"
#include "hho/quadrature.hpp"

namespace hho {

using ScalarFunction = std::function<double(const Point&)>;

class HhoSpace {
public:
    HhoSpace(const Mesh& mesh, int cell_degree, int face_degree, bool dirichlet,
             std::optional<BasisMode> mode = std::nullopt);

    const Mesh& mesh() const { return *mesh_; }
    int cell_degree() const { return cell_degree_; }
    int face_degree() const { return face_degree_; }
    int reconstruction_degree() const { return face_degree_ + 1; }
    bool dirichlet() const { return dirichlet_; }
    BasisMode basis_mode() const { return mode_; }

    std::size_t cell_dofs() const { return cell_basis_size(cell_degree_); }
    std::size_t face_dofs() const { return face_basis_size(face_degree_); }
    std::size_t reconstruction_dofs() const { return cell_basis_size(reconstruction_degree()); }
    std::size_t n_cell_unknowns() const { return mesh_->n_cells() * cell_dofs(); }
    std::size_t n_dofs() const { return n_cell_unknowns() + mesh_->n_faces() * face_dofs(); }

    std::size_t cell_offset(std::size_t cell) const { return cell * cell_dofs(); }
    std::size_t face_offset(std::size_t face) const { return n_cell_unknowns() + face * face_dofs(); }

    /// Global indices of the local unknowns of a cell: cell block, then the
    /// face blocks in the cell's face order.
    std::vector<std::size_t> local_dofs(std::size_t cell) const;
    std::size_t n_local_dofs(std::size_t cell) const;

    bool is_fixed_face(std::size_t face) const { return dirichlet_ && mesh_->face(face).is_boundary; }
    /// One flag per global unknown; true for unknowns eliminated by the Dirichlet condition.
    std::vector<bool> fixed_mask() const;

    /// Hierarchical cell basis of degree max(l, k+1); its first cell_dofs()
    /// functions span P_l and its first reconstruction_dofs() span P_{k+1}.
    const CellBasis& cell_basis(std::size_t cell) const { return cell_bases_[cell]; }
    const FaceBasis& face_basis(std::size_t face) const { return face_bases_[face]; }

    /// Exactness of the cached rules: 2 (k + 2).
    int quadrature_exactness() const { return exactness_; }
    const Quadrature& cell_quadrature(std::size_t cell) const { return cell_quads_[cell]; }
    const Quadrature& face_quadrature(std::size_t face) const { return face_quads_[face]; }

private:
    const Mesh* mesh_;
    int cell_degree_;
    int face_degree_;
    bool dirichlet_;
    BasisMode mode_;
    int exactness_;
    std::vector<CellBasis> cell_bases_;
    std::vector<FaceBasis> face_bases_;
    std::vector<Quadrature> cell_quads_;
    std::vector<Quadrature> face_quads_;
};

/// Coefficient vector of an element of an HhoSpace.
class HhoVector {
public:
    explicit HhoVector(const HhoSpace& space);
    HhoVector(const HhoSpace& space, Eigen::VectorXd values);

    const HhoSpace& space() const { return *space_; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::VectorXd& values() { return values_; }

    Eigen::VectorXd cell_block(std::size_t cell) const;
    Eigen::VectorXd face_block(std::size_t face) const;
    /// Local unknowns of a cell in local_dofs() order.
    Eigen::VectorXd local(std::size_t cell) const;

    /// Cell polynomial v_T evaluated at p.
    double eval_cell(std::size_t cell, const Point& p) const;

private:
    const HhoSpace* space_;
    Eigen::VectorXd values_;
};

/// L2 projection onto P_degree(T) in the space's cell basis.
Eigen::VectorXd l2_project_cell(const HhoSpace& space, std::size_t cell, int degree, const ScalarFunction& f);
/// L2 projection onto P_degree(F) in the face basis.
Eigen::VectorXd l2_project_face(const HhoSpace& space, std::size_t face, int degree, const ScalarFunction& f);

/// Global reduction: cell projections at the cell degree, face projections
/// at the face degree, on every cell and face (boundary faces included).
HhoVector reduce(const HhoSpace& space, const ScalarFunction& f);

/// Local reduction of f on one cell, in local_dofs() order.
Eigen::VectorXd reduce_local(const HhoSpace& space, std::size_t cell, const ScalarFunction& f);

/// Evaluate a polynomial given by coefficients in the cell basis (leading entries).
double eval_cell_polynomial(const HhoSpace& space, std::size_t cell, const Eigen::VectorXd& coeffs, const Point& p);
Vector2 eval_cell_polynomial_grad(const HhoSpace& space, std::size_t cell, const Eigen::VectorXd& coeffs,
                                  const Point& p);

}  // namespace hho

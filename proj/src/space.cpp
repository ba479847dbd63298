#include "hho/space.hpp"

#include <stdexcept>

namespace hho {

HhoSpace::HhoSpace(const Mesh& mesh, int cell_degree, int face_degree, bool dirichlet,
                   std::optional<BasisMode> mode)
    : mesh_(&mesh), cell_degree_(cell_degree), face_degree_(face_degree), dirichlet_(dirichlet),
      mode_(mode.value_or(default_basis_mode(face_degree))), exactness_(2 * (face_degree + 2))
{
    if (face_degree < 0 || cell_degree < 0) throw std::invalid_argument("HhoSpace: negative degree");
    if (cell_degree > face_degree + 1)
        throw std::invalid_argument("HhoSpace: cell degree must not exceed face degree + 1");

    const int basis_degree = std::max(cell_degree, face_degree + 1);
    cell_bases_.reserve(mesh.n_cells());
    cell_quads_.reserve(mesh.n_cells());
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        cell_bases_.emplace_back(mesh, c, basis_degree, mode_);
        cell_quads_.push_back(hho::cell_quadrature(mesh, c, exactness_));
    }
    face_bases_.reserve(mesh.n_faces());
    face_quads_.reserve(mesh.n_faces());
    for (std::size_t f = 0; f < mesh.n_faces(); ++f) {
        face_bases_.emplace_back(mesh, f, face_degree);
        face_quads_.push_back(hho::face_quadrature(mesh, f, exactness_));
    }
}

std::vector<std::size_t> HhoSpace::local_dofs(std::size_t cell) const
{
    std::vector<std::size_t> dofs;
    dofs.reserve(n_local_dofs(cell));
    for (std::size_t i = 0; i < cell_dofs(); ++i) dofs.push_back(cell_offset(cell) + i);
    for (std::size_t f : mesh_->cell(cell).faces)
        for (std::size_t i = 0; i < face_dofs(); ++i) dofs.push_back(face_offset(f) + i);
    return dofs;
}

std::size_t HhoSpace::n_local_dofs(std::size_t cell) const
{
    return cell_dofs() + mesh_->cell(cell).faces.size() * face_dofs();
}

std::vector<bool> HhoSpace::fixed_mask() const
{
    std::vector<bool> mask(n_dofs(), false);
    if (!dirichlet_) return mask;
    for (std::size_t f : mesh_->boundary_faces())
        for (std::size_t i = 0; i < face_dofs(); ++i) mask[face_offset(f) + i] = true;
    return mask;
}

HhoVector::HhoVector(const HhoSpace& space)
    : space_(&space), values_(Eigen::VectorXd::Zero(Eigen::Index(space.n_dofs())))
{
}

HhoVector::HhoVector(const HhoSpace& space, Eigen::VectorXd values) : space_(&space), values_(std::move(values))
{
    if (std::size_t(values_.size()) != space.n_dofs()) throw std::invalid_argument("HhoVector: size mismatch");
}

Eigen::VectorXd HhoVector::cell_block(std::size_t cell) const
{
    return values_.segment(Eigen::Index(space_->cell_offset(cell)), Eigen::Index(space_->cell_dofs()));
}

Eigen::VectorXd HhoVector::face_block(std::size_t face) const
{
    return values_.segment(Eigen::Index(space_->face_offset(face)), Eigen::Index(space_->face_dofs()));
}

Eigen::VectorXd HhoVector::local(std::size_t cell) const
{
    const auto dofs = space_->local_dofs(cell);
    Eigen::VectorXd v(Eigen::Index(dofs.size()));
    for (std::size_t i = 0; i < dofs.size(); ++i) v(Eigen::Index(i)) = values_(Eigen::Index(dofs[i]));
    return v;
}

double HhoVector::eval_cell(std::size_t cell, const Point& p) const
{
    return eval_cell_polynomial(*space_, cell, cell_block(cell), p);
}

double eval_cell_polynomial(const HhoSpace& space, std::size_t cell, const Eigen::VectorXd& coeffs, const Point& p)
{
    const Eigen::VectorXd phi = space.cell_basis(cell).eval(p);
    return phi.head(coeffs.size()).dot(coeffs);
}

Vector2 eval_cell_polynomial_grad(const HhoSpace& space, std::size_t cell, const Eigen::VectorXd& coeffs,
                                  const Point& p)
{
    const GradientTable g = space.cell_basis(cell).eval_grad(p);
    return g.topRows(coeffs.size()).transpose() * coeffs;
}

Eigen::VectorXd l2_project_cell(const HhoSpace& space, std::size_t cell, int degree, const ScalarFunction& f)
{
    const auto& basis = space.cell_basis(cell);
    if (degree > basis.degree()) throw std::invalid_argument("l2_project_cell: degree exceeds basis degree");
    const auto n = Eigen::Index(cell_basis_size(degree));
    const auto& q = space.cell_quadrature(cell);
    const Eigen::MatrixXd table = basis.eval(q.nodes).leftCols(n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < q.size(); ++i) rhs += q.weights[i] * f(q.nodes[i]) * table.row(Eigen::Index(i)).transpose();
    const Eigen::MatrixXd mass = mass_matrix(table, q);
    Eigen::LLT<Eigen::MatrixXd> llt(mass);
    if (llt.info() != Eigen::Success) throw std::runtime_error("l2_project_cell: singular mass matrix");
    return llt.solve(rhs);
}

Eigen::VectorXd l2_project_face(const HhoSpace& space, std::size_t face, int degree, const ScalarFunction& f)
{
    const auto& basis = space.face_basis(face);
    if (degree > basis.degree()) throw std::invalid_argument("l2_project_face: degree exceeds basis degree");
    const auto n = Eigen::Index(face_basis_size(degree));
    const auto& q = space.face_quadrature(face);
    const Eigen::MatrixXd table = basis.eval(q.nodes).leftCols(n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < q.size(); ++i) rhs += q.weights[i] * f(q.nodes[i]) * table.row(Eigen::Index(i)).transpose();
    const Eigen::MatrixXd mass = mass_matrix(table, q);
    Eigen::LLT<Eigen::MatrixXd> llt(mass);
    if (llt.info() != Eigen::Success) throw std::runtime_error("l2_project_face: singular mass matrix");
    return llt.solve(rhs);
}

HhoVector reduce(const HhoSpace& space, const ScalarFunction& f)
{
    HhoVector v(space);
    const auto& mesh = space.mesh();
    for (std::size_t c = 0; c < mesh.n_cells(); ++c)
        v.values().segment(Eigen::Index(space.cell_offset(c)), Eigen::Index(space.cell_dofs()))
            = l2_project_cell(space, c, space.cell_degree(), f);
    for (std::size_t fc = 0; fc < mesh.n_faces(); ++fc)
        v.values().segment(Eigen::Index(space.face_offset(fc)), Eigen::Index(space.face_dofs()))
            = l2_project_face(space, fc, space.face_degree(), f);
    return v;
}

Eigen::VectorXd reduce_local(const HhoSpace& space, std::size_t cell, const ScalarFunction& f)
{
    const auto& c = space.mesh().cell(cell);
    Eigen::VectorXd v(Eigen::Index(space.n_local_dofs(cell)));
    const auto cd = Eigen::Index(space.cell_dofs());
    const auto fd = Eigen::Index(space.face_dofs());
    v.head(cd) = l2_project_cell(space, cell, space.cell_degree(), f);
    for (std::size_t i = 0; i < c.faces.size(); ++i)
        v.segment(cd + Eigen::Index(i) * fd, fd) = l2_project_face(space, c.faces[i], space.face_degree(), f);
    return v;
}

}  // namespace hho

#include "hho/local_operators.hpp"

#include <stdexcept>

namespace hho {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

LocalOperators build_local_operators(const HhoSpace& space, std::size_t cell)
{
    const Mesh& mesh = space.mesh();
    const Cell& T = mesh.cell(cell);
    const CellBasis& basis = space.cell_basis(cell);

    const auto nb = Index(basis.size());
    const auto nl = Index(space.cell_dofs());
    const auto nr = Index(space.reconstruction_dofs());
    const auto nf = Index(space.face_dofs());
    const auto nloc = Index(space.n_local_dofs(cell));

    LocalOperators ops;
    ops.cell = cell;

    // Cell integrals.
    const Quadrature& qc = space.cell_quadrature(cell);
    MatrixXd mass = MatrixXd::Zero(nb, nb);
    MatrixXd stiff = MatrixXd::Zero(nb, nb);
    VectorXd integrals = VectorXd::Zero(nb);
    for (std::size_t q = 0; q < qc.size(); ++q) {
        const VectorXd phi = basis.eval(qc.nodes[q]);
        const GradientTable dphi = basis.eval_grad(qc.nodes[q]);
        const double w = qc.weights[q];
        mass.noalias() += w * phi * phi.transpose();
        stiff.noalias() += w * dphi * dphi.transpose();
        integrals += w * phi;
    }
    ops.cell_mass = mass.topLeftCorner(nl, nl);
    ops.reconstruction_mass = mass.topLeftCorner(nr, nr);
    ops.gradient_stiffness = stiff.topLeftCorner(nr, nr);

    // Right-hand side of the reconstruction problem.
    MatrixXd rhs = MatrixXd::Zero(nr, nloc);
    rhs.leftCols(nl) = stiff.topLeftCorner(nr, nl);

    std::vector<MatrixXd> traces;  // (chi_i, phi_j)_F, nf x nb
    traces.reserve(T.faces.size());
    ops.face_mass.reserve(T.faces.size());
    for (std::size_t i = 0; i < T.faces.size(); ++i) {
        const std::size_t f = T.faces[i];
        const Vector2& n = T.normals[i];
        const FaceBasis& fb = space.face_basis(f);
        const Quadrature& qf = space.face_quadrature(f);
        const Index off = nl + Index(i) * nf;

        MatrixXd trace = MatrixXd::Zero(nf, nb);
        MatrixXd fmass = MatrixXd::Zero(nf, nf);
        for (std::size_t q = 0; q < qf.size(); ++q) {
            const VectorXd chi = fb.eval(qf.nodes[q]);
            const VectorXd phi = basis.eval(qf.nodes[q]);
            const VectorXd dn = basis.eval_grad(qf.nodes[q]).topRows(nr) * n;
            const double w = qf.weights[q];
            rhs.block(0, off, nr, nf).noalias() += w * dn * chi.transpose();
            rhs.leftCols(nl).noalias() -= w * dn * phi.head(nl).transpose();
            trace.noalias() += w * chi * phi.transpose();
            fmass.noalias() += w * chi * chi.transpose();
        }
        traces.push_back(std::move(trace));
        ops.face_mass.push_back(std::move(fmass));
    }

    // Gradient part on the non-constant functions, then the mean constraint.
    MatrixXd G = MatrixXd::Zero(nr, nloc);
    if (nr > 1) {
        Eigen::LDLT<MatrixXd> ldlt(stiff.block(1, 1, nr - 1, nr - 1));
        if (ldlt.info() != Eigen::Success) throw std::runtime_error("reconstruction: singular Neumann system");
        G.bottomRows(nr - 1) = ldlt.solve(rhs.bottomRows(nr - 1));
    }
    G.row(0).setZero();
    G.row(0).head(nl) = integrals.head(nl).transpose();
    for (Index i = 1; i < nr; ++i) G.row(0) -= integrals(i) * G.row(i);
    G.row(0) /= integrals(0);
    ops.reconstruction = G;

    // (I - Pi_T^l) R_T as coefficients over the full basis.
    MatrixXd cell_part = MatrixXd::Zero(nb, nloc);
    cell_part.topLeftCorner(nl, nl).setIdentity();
    cell_part.topRows(nr) += G;
    {
        Eigen::LLT<MatrixXd> llt(mass.topLeftCorner(nl, nl));
        const MatrixXd proj = llt.solve(mass.topLeftCorner(nl, nr));  // Pi_T^l of the first nr functions
        cell_part.topRows(nl) -= proj * G;
    }

    ops.stabilization = MatrixXd::Zero(nloc, nloc);
    ops.face_stabilization.reserve(T.faces.size());
    for (std::size_t i = 0; i < T.faces.size(); ++i) {
        const MatrixXd& fmass = ops.face_mass[i];
        Eigen::LLT<MatrixXd> llt(fmass);
        MatrixXd SF = llt.solve(traces[i] * cell_part);
        SF.block(0, nl + Index(i) * nf, nf, nf) -= MatrixXd::Identity(nf, nf);
        ops.stabilization.noalias() += SF.transpose() * fmass * SF;
        ops.face_stabilization.push_back(std::move(SF));
    }
    ops.stabilization /= T.diameter;

    MatrixXd A = G.transpose() * ops.gradient_stiffness * G + ops.stabilization;
    ops.stiffness = 0.5 * (A + A.transpose());
    ops.stabilization = 0.5 * (ops.stabilization + ops.stabilization.transpose()).eval();
    return ops;
}

VectorXd reconstruct(const LocalOperators& ops, const VectorXd& local)
{
    return ops.reconstruction * local;
}

StabilizationValue stabilize(const LocalOperators& ops, const VectorXd& local)
{
    StabilizationValue s;
    for (const auto& SF : ops.face_stabilization) s.face_residuals.push_back(SF * local);
    s.value = local.dot(ops.stabilization * local);
    return s;
}

VectorXd elliptic_project(const HhoSpace& space, const LocalOperators& ops, const ScalarFunction& f)
{
    return ops.reconstruction * reduce_local(space, ops.cell, f);
}

Discretization::Discretization(const HhoSpace& space) : space_(&space)
{
    ops_.reserve(space.mesh().n_cells());
    for (std::size_t c = 0; c < space.mesh().n_cells(); ++c) ops_.push_back(build_local_operators(space, c));
}

VectorXd Discretization::reconstruct(const HhoVector& v, std::size_t cell) const
{
    return ops_[cell].reconstruction * v.local(cell);
}

}  // namespace hho

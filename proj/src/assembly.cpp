#include "hho/assembly.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

namespace hho {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

SparseMatrix from_triplets(std::size_t n, const Triplets& t)
{
    SparseMatrix K(static_cast<Index>(n), static_cast<Index>(n));
    K.setFromTriplets(t.begin(), t.end());
    return K;
}

void scatter(Triplets& t, const std::vector<std::size_t>& dofs, const MatrixXd& local)
{
    for (std::size_t i = 0; i < dofs.size(); ++i)
        for (std::size_t j = 0; j < dofs.size(); ++j) {
            const double v = local(Index(i), Index(j));
            if (v != 0.0) t.emplace_back(Index(dofs[i]), Index(dofs[j]), v);
        }
}

}  // namespace

SparseMatrix assemble_stiffness(const Discretization& disc)
{
    const HhoSpace& space = disc.space();
    Triplets t;
    for (std::size_t c = 0; c < disc.mesh().n_cells(); ++c) scatter(t, space.local_dofs(c), disc.ops(c).stiffness);
    return from_triplets(space.n_dofs(), t);
}

SparseMatrix assemble_cell_mass(const Discretization& disc)
{
    const HhoSpace& space = disc.space();
    Triplets t;
    for (std::size_t c = 0; c < disc.mesh().n_cells(); ++c) {
        std::vector<std::size_t> dofs(space.cell_dofs());
        for (std::size_t i = 0; i < dofs.size(); ++i) dofs[i] = space.cell_offset(c) + i;
        scatter(t, dofs, disc.ops(c).cell_mass);
    }
    return from_triplets(space.n_dofs(), t);
}

SparseMatrix assemble_reconstruction_mass(const Discretization& disc)
{
    const HhoSpace& space = disc.space();
    Triplets t;
    for (std::size_t c = 0; c < disc.mesh().n_cells(); ++c) {
        const auto& ops = disc.ops(c);
        const MatrixXd local = ops.reconstruction.transpose() * ops.reconstruction_mass * ops.reconstruction;
        scatter(t, space.local_dofs(c), 0.5 * (local + local.transpose()));
    }
    return from_triplets(space.n_dofs(), t);
}

VectorXd cell_load(const HhoSpace& space, const ScalarFunction& f)
{
    VectorXd b = VectorXd::Zero(Index(space.n_dofs()));
    const auto nl = Index(space.cell_dofs());
    for (std::size_t c = 0; c < space.mesh().n_cells(); ++c) {
        const auto& q = space.cell_quadrature(c);
        const auto& basis = space.cell_basis(c);
        VectorXd local = VectorXd::Zero(nl);
        for (std::size_t i = 0; i < q.size(); ++i) local += q.weights[i] * f(q.nodes[i]) * basis.eval(q.nodes[i]).head(nl);
        b.segment(Index(space.cell_offset(c)), nl) = local;
    }
    return b;
}

VectorXd reconstruction_load(const Discretization& disc, const ScalarFunction& f)
{
    const HhoSpace& space = disc.space();
    VectorXd b = VectorXd::Zero(Index(space.n_dofs()));
    const auto nr = Index(space.reconstruction_dofs());
    for (std::size_t c = 0; c < space.mesh().n_cells(); ++c) {
        const auto& q = space.cell_quadrature(c);
        const auto& basis = space.cell_basis(c);
        VectorXd moments = VectorXd::Zero(nr);
        for (std::size_t i = 0; i < q.size(); ++i)
            moments += q.weights[i] * f(q.nodes[i]) * basis.eval(q.nodes[i]).head(nr);
        const VectorXd local = disc.ops(c).reconstruction.transpose() * moments;
        const auto dofs = space.local_dofs(c);
        for (std::size_t i = 0; i < dofs.size(); ++i) b(Index(dofs[i])) += local(Index(i));
    }
    return b;
}

VectorXd LoadFunctional::evaluate(const Discretization& disc) const
{
    switch (kind_) {
    case Kind::cell_tested: return cell_load(disc.space(), f_);
    case Kind::reconstruction_tested: return reconstruction_load(disc, f_);
    case Kind::raw:
        if (std::size_t(raw_.size()) != disc.space().n_dofs())
            throw std::invalid_argument("raw load has wrong length");
        return raw_;
    }
    return {};
}

DofPartition::DofPartition(const std::vector<bool>& fixed) : free_index_(fixed.size(), -1)
{
    for (std::size_t i = 0; i < fixed.size(); ++i)
        if (!fixed[i]) {
            free_index_[i] = long(free_.size());
            free_.push_back(i);
        }
}

void DofPartition::restrict(const SparseMatrix& K, const VectorXd& b, const VectorXd& fixed_values,
                            SparseMatrix& K_free, VectorXd& b_free) const
{
    b_free = restrict_vector(b);
    Triplets t;
    t.reserve(std::size_t(K.nonZeros()));
    for (Index col = 0; col < K.outerSize(); ++col) {
        const long jc = free_index_[std::size_t(col)];
        for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
            const long ir = free_index_[std::size_t(it.row())];
            if (ir < 0) continue;
            if (jc >= 0) t.emplace_back(Index(ir), Index(jc), it.value());
            else b_free(ir) -= it.value() * fixed_values(col);
        }
    }
    K_free.resize(Index(n_free()), Index(n_free()));
    K_free.setFromTriplets(t.begin(), t.end());
}

VectorXd DofPartition::restrict_vector(const VectorXd& full) const
{
    VectorXd r(static_cast<Index>(n_free()));
    for (std::size_t i = 0; i < free_.size(); ++i) r(Index(i)) = full(Index(free_[i]));
    return r;
}

VectorXd DofPartition::expand(const VectorXd& free_values, const VectorXd& fixed_values) const
{
    VectorXd full(static_cast<Index>(n_total()));
    for (std::size_t i = 0; i < n_total(); ++i)
        full(Index(i)) = free_index_[i] >= 0 ? free_values(free_index_[i]) : fixed_values(Index(i));
    return full;
}

VectorXd dirichlet_values(const HhoSpace& space, const ScalarFunction* g)
{
    VectorXd v = VectorXd::Zero(Index(space.n_dofs()));
    if (!g || !space.dirichlet()) return v;
    for (std::size_t f : space.mesh().boundary_faces())
        v.segment(Index(space.face_offset(f)), Index(space.face_dofs()))
            = l2_project_face(space, f, space.face_degree(), *g);
    return v;
}

GlobalSystem assemble(const Discretization& disc, const LoadFunctional& load, const VectorXd& fixed_values)
{
    GlobalSystem sys;
    sys.dofs = DofPartition(disc.space().fixed_mask());
    sys.fixed_values = fixed_values;
    sys.dofs.restrict(assemble_stiffness(disc), load.evaluate(disc), fixed_values, sys.matrix, sys.rhs);
    return sys;
}

CondensedSystem condense(const Discretization& disc, const LoadFunctional& load, const VectorXd& fixed_values)
{
    const HhoSpace& space = disc.space();
    const Mesh& mesh = space.mesh();
    const auto ncu = space.n_cell_unknowns();
    const VectorXd b = load.evaluate(disc);
    const auto nl = Index(space.cell_dofs());

    CondensedSystem sys;
    {
        const auto mask = space.fixed_mask();
        sys.face_dofs = DofPartition(std::vector<bool>(mask.begin() + long(ncu), mask.end()));
    }
    sys.fixed_values = fixed_values;
    sys.rhs = VectorXd::Zero(Index(sys.face_dofs.n_free()));
    sys.cells.reserve(mesh.n_cells());

    Triplets t;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const MatrixXd& A = disc.ops(c).stiffness;
        const auto dofs = space.local_dofs(c);
        const Index nfl = Index(dofs.size()) - nl;

        CondensedSystem::CellCache cache;
        cache.cell_block.compute(A.topLeftCorner(nl, nl));
        if (cache.cell_block.info() != Eigen::Success)
            throw std::runtime_error("condensation: cell block of cell " + std::to_string(c) + " is not SPD");
        cache.coupling = A.topRightCorner(nl, nfl);
        cache.cell_rhs = b.segment(Index(space.cell_offset(c)), nl);

        const MatrixXd AccInvAcf = cache.cell_block.solve(cache.coupling);
        const MatrixXd schur = A.bottomRightCorner(nfl, nfl) - cache.coupling.transpose() * AccInvAcf;
        const VectorXd AccInvbc = cache.cell_block.solve(cache.cell_rhs);
        VectorXd local_rhs = -cache.coupling.transpose() * AccInvbc;
        for (Index i = 0; i < nfl; ++i) local_rhs(i) += b(Index(dofs[std::size_t(nl + i)]));

        for (Index i = 0; i < nfl; ++i) {
            const std::size_t gi = dofs[std::size_t(nl + i)] - ncu;
            const long ri = sys.face_dofs.free_index(gi);
            if (ri < 0) continue;
            sys.rhs(ri) += local_rhs(i);
            for (Index j = 0; j < nfl; ++j) {
                const std::size_t gj = dofs[std::size_t(nl + j)];
                const long rj = sys.face_dofs.free_index(gj - ncu);
                if (rj >= 0) t.emplace_back(Index(ri), Index(rj), schur(i, j));
                else sys.rhs(ri) -= schur(i, j) * fixed_values(Index(gj));
            }
        }
        sys.cells.push_back(std::move(cache));
    }
    sys.matrix.resize(Index(sys.face_dofs.n_free()), Index(sys.face_dofs.n_free()));
    sys.matrix.setFromTriplets(t.begin(), t.end());
    return sys;
}

VectorXd recover(const Discretization& disc, const CondensedSystem& sys, const VectorXd& face_solution)
{
    const HhoSpace& space = disc.space();
    const auto ncu = Index(space.n_cell_unknowns());
    const auto nl = Index(space.cell_dofs());
    VectorXd full(Index(space.n_dofs()));
    full.tail(Index(space.n_dofs()) - ncu) = sys.face_dofs.expand(face_solution, sys.fixed_values.tail(full.size() - ncu));
    for (std::size_t c = 0; c < disc.mesh().n_cells(); ++c) {
        const auto dofs = space.local_dofs(c);
        VectorXd xf(Index(dofs.size()) - nl);
        for (Index i = 0; i < xf.size(); ++i) xf(i) = full(Index(dofs[std::size_t(nl + i)]));
        const auto& cache = sys.cells[c];
        full.segment(Index(space.cell_offset(c)), nl) = cache.cell_block.solve(cache.cell_rhs - cache.coupling * xf);
    }
    return full;
}

double relative_residual(const SparseMatrix& K, const VectorXd& x, const VectorXd& b)
{
    const double r = (K * x - b).norm();
    const double nb = b.norm();
    return nb > 0.0 ? r / nb : r;
}

VectorXd solve_spd(const SparseMatrix& K, const VectorXd& b, const SolverOptions& options)
{
    if (K.rows() == 0) return VectorXd();
    VectorXd x;
    if (options.solver == LinearSolver::direct) {
        Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
        if (ldlt.info() != Eigen::Success) throw SolverError("sparse LDLT factorization failed", NAN);
        if ((ldlt.vectorD().array() <= 0.0).any()) throw SolverError("matrix is not positive definite", NAN);
        x = ldlt.solve(b);
    } else {
        Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg(K);
        cg.setTolerance(options.cg_tolerance);
        cg.setMaxIterations(options.cg_max_iterations);
        x = cg.solve(b);
        if (cg.info() != Eigen::Success)
            throw SolverError("conjugate gradients did not converge", relative_residual(K, x, b));
    }
    const double res = relative_residual(K, x, b);
    if (!(res <= options.residual_tolerance)) throw SolverError("linear solve inaccurate", res);
    return x;
}

void write_coordinate(std::ostream& out, const SparseMatrix& K)
{
    out.precision(17);
    for (Index col = 0; col < K.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(K, col); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace hho

#include "hho/unconstrained.hpp"

#include <algorithm>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace hho {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(Scheme s)
{
    switch (s) {
    case Scheme::uc1: return "uc1";
    case Scheme::uc2: return "uc2";
    case Scheme::uc31: return "uc31";
    case Scheme::uc32: return "uc32";
    case Scheme::wc1: return "wc1";
    case Scheme::wc2: return "wc2";
    }
    return "?";
}

Scheme parse_scheme(const std::string& name)
{
    for (Scheme s : {Scheme::uc1, Scheme::uc2, Scheme::uc31, Scheme::uc32, Scheme::wc1, Scheme::wc2})
        if (to_string(s) == name) return s;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected uc1, uc2, uc31, uc32, wc1 or wc2)");
}

namespace {

void append_block(Triplets& t, const SparseMatrix& B, Index row0, Index col0, double scale)
{
    for (Index col = 0; col < B.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(B, col); it; ++it)
            t.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
}

std::vector<bool> stacked_mask(const HhoSpace& space, std::size_t extra = 0)
{
    std::vector<bool> mask = space.fixed_mask();
    const std::vector<bool> one = mask;
    mask.insert(mask.end(), one.begin(), one.end());
    mask.insert(mask.end(), extra, false);
    return mask;
}

// [A, c M; -M, A] (y; phi) = (F; -Yd) with y fixed on the boundary to g.
KktSystem two_field(const Discretization& disc, const ControlProblem& prob, const SparseMatrix& M,
                    const VectorXd& F, const VectorXd& Yd)
{
    const HhoSpace& space = disc.space();
    const auto n = Index(space.n_dofs());
    const SparseMatrix A = assemble_stiffness(disc);

    Triplets t;
    append_block(t, A, 0, 0, 1.0);
    append_block(t, M, 0, n, 1.0 / prob.lambda);
    append_block(t, M, n, 0, -1.0);
    append_block(t, A, n, n, 1.0);
    SparseMatrix K(2 * n, 2 * n);
    K.setFromTriplets(t.begin(), t.end());

    VectorXd b(2 * n);
    b << F, -Yd;

    KktSystem sys;
    sys.n_state = std::size_t(n);
    sys.dofs = DofPartition(stacked_mask(space));
    sys.fixed_values = VectorXd::Zero(2 * n);
    sys.fixed_values.head(n) = dirichlet_values(space, prob.boundary());
    sys.dofs.restrict(K, b, sys.fixed_values, sys.matrix, sys.rhs);
    return sys;
}

void require_dirichlet(const HhoSpace& space, const char* who)
{
    if (!space.dirichlet()) throw std::invalid_argument(std::string(who) + ": state space must carry the Dirichlet condition");
}

void require_unconstrained(const ControlProblem& prob, const char* who)
{
    prob.validate();
    if (prob.bounds) throw std::invalid_argument(std::string(who) + ": bounds are not supported by unconstrained schemes");
}

std::vector<VectorXd> cell_blocks(const HhoVector& v, double scale)
{
    std::vector<VectorXd> out;
    out.reserve(v.space().mesh().n_cells());
    for (std::size_t c = 0; c < v.space().mesh().n_cells(); ++c) out.push_back(scale * v.cell_block(c));
    return out;
}

}  // namespace

KktSystem uc1_system(const Discretization& disc, const ControlProblem& prob)
{
    const HhoSpace& space = disc.space();
    return two_field(disc, prob, assemble_cell_mass(disc), cell_load(space, prob.f), cell_load(space, prob.y_d));
}

KktSystem uc31_system(const Discretization& disc, const ControlProblem& prob)
{
    return two_field(disc, prob, assemble_reconstruction_mass(disc), reconstruction_load(disc, prob.f),
                     reconstruction_load(disc, prob.y_d));
}

VectorXd solve_kkt(const KktSystem& sys, double* residual, double tolerance)
{
    VectorXd x_free = VectorXd::Zero(sys.rhs.size());
    if (sys.rhs.size() > 0 && sys.rhs.norm() > 0.0) {
        SparseMatrix K = sys.matrix;
        if (sys.shift.size() > 0) K += SparseMatrix(sys.shift.asDiagonal());
        K.makeCompressed();
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(K);
        if (lu.info() != Eigen::Success) throw SolverError("sparse LU of the optimality system failed: " + lu.lastErrorMessage(), NAN);
        x_free = lu.solve(sys.rhs);
        if (sys.shift.size() > 0) {
            // iterated Tikhonov: x <- x + (K + D)^{-1} (b - K x)
            double res = relative_residual(sys.matrix, x_free, sys.rhs);
            // a fixed number of steps also damps directions the residual barely sees
            for (int it = 0; it < 20; ++it) {
                const VectorXd next = x_free + lu.solve(VectorXd(sys.rhs - sys.matrix * x_free));
                const double r = relative_residual(sys.matrix, next, sys.rhs);
                if (!(r < 10.0 * res)) break;
                x_free = next;
                res = std::min(res, r);
            }
        }
    }
    const double res = relative_residual(sys.matrix, x_free, sys.rhs);
    if (residual) *residual = res;
    if (!(res <= tolerance)) throw SolverError("optimality system solve inaccurate", res);
    return sys.dofs.expand(x_free, sys.fixed_values);
}

OptimalitySolution solve_uc1(const Discretization& disc, const ControlProblem& prob)
{
    require_unconstrained(prob, "solve_uc1");
    const HhoSpace& space = disc.space();
    require_dirichlet(space, "solve_uc1");
    const KktSystem sys = uc1_system(disc, prob);

    OptimalitySolution s{Scheme::uc1, HhoVector(space), HhoVector(space), {}, nullptr, nullptr, std::nullopt, 0.0};
    const VectorXd x = solve_kkt(sys, &s.residual);
    const auto n = Index(sys.n_state);
    s.y = HhoVector(space, x.head(n));
    s.phi = HhoVector(space, x.tail(n));
    s.control = cell_blocks(s.phi, -1.0 / prob.lambda);
    return s;
}

OptimalitySolution solve_uc2(const Discretization& disc, const ControlProblem& prob)
{
    require_unconstrained(prob, "solve_uc2");
    OptimalitySolution s = solve_uc1(disc, prob);
    s.scheme = Scheme::uc2;
    return s;
}

OptimalitySolution solve_uc31(const Discretization& disc, const ControlProblem& prob)
{
    require_unconstrained(prob, "solve_uc31");
    const HhoSpace& space = disc.space();
    require_dirichlet(space, "solve_uc31");
    if (space.face_degree() > 1 || space.cell_degree() != space.face_degree())
        throw std::invalid_argument("uc31 requires the equal-order space with k in {0, 1}");
    const KktSystem sys = uc31_system(disc, prob);

    OptimalitySolution s{Scheme::uc31, HhoVector(space), HhoVector(space), {}, nullptr, nullptr, std::nullopt, 0.0};
    const VectorXd x = solve_kkt(sys, &s.residual);
    const auto n = Index(sys.n_state);
    s.y = HhoVector(space, x.head(n));
    s.phi = HhoVector(space, x.tail(n));
    s.u_hat = HhoVector(space, -s.phi.values() / prob.lambda);
    for (std::size_t c = 0; c < space.mesh().n_cells(); ++c) s.control.push_back(disc.reconstruct(*s.u_hat, c));
    return s;
}

SparseMatrix global_reconstruction(const Discretization& control)
{
    const HhoSpace& space = control.space();
    const auto nr = space.reconstruction_dofs();
    Triplets t;
    for (std::size_t c = 0; c < space.mesh().n_cells(); ++c) {
        const MatrixXd& G = control.ops(c).reconstruction;
        const auto dofs = space.local_dofs(c);
        for (Index i = 0; i < G.rows(); ++i)
            for (Index j = 0; j < G.cols(); ++j)
                if (G(i, j) != 0.0) t.emplace_back(Index(c * nr) + i, Index(dofs[std::size_t(j)]), G(i, j));
    }
    SparseMatrix R(Index(space.mesh().n_cells() * nr), Index(space.n_dofs()));
    R.setFromTriplets(t.begin(), t.end());
    return R;
}

KktSystem uc32_system(const Discretization& state, const Discretization& control, const ControlProblem& prob)
{
    const HhoSpace& space = state.space();
    const HhoSpace& cspace = control.space();
    if (space.cell_degree() != space.face_degree() + 1 || cspace.face_degree() != space.face_degree() ||
        cspace.cell_degree() != cspace.face_degree())
        throw std::invalid_argument("uc32 expects a mixed-order state space and an equal-order control space");

    const auto n = Index(space.n_dofs());
    const SparseMatrix B = global_reconstruction(control);
    const auto m = B.cols();
    const auto nl = Index(space.cell_dofs());
    const auto nr = Index(cspace.reconstruction_dofs());
    if (nl != nr) throw std::logic_error("uc32: state cell degree differs from the reconstruction degree");

    // Block-diagonal P^{k+1} mass in the shared cell basis, embedded in the state cell rows.
    SparseMatrix Mcells(n, B.rows());
    SparseMatrix Mr(B.rows(), B.rows());
    {
        Triplets te, tr;
        for (std::size_t c = 0; c < space.mesh().n_cells(); ++c) {
            const MatrixXd& Mc = state.ops(c).cell_mass;
            const MatrixXd& Mrc = control.ops(c).reconstruction_mass;
            for (Index i = 0; i < nl; ++i)
                for (Index j = 0; j < nl; ++j) {
                    te.emplace_back(Index(space.cell_offset(c)) + i, Index(c) * nr + j, Mc(i, j));
                    tr.emplace_back(Index(c) * nr + i, Index(c) * nr + j, Mrc(i, j));
                }
        }
        Mcells.setFromTriplets(te.begin(), te.end());
        Mr.setFromTriplets(tr.begin(), tr.end());
    }
    const SparseMatrix E = (Mcells * B).pruned();
    const SparseMatrix Et = SparseMatrix(E.transpose());
    const SparseMatrix C = SparseMatrix(B.transpose() * Mr * B).pruned();
    const SparseMatrix A = assemble_stiffness(state);
    const SparseMatrix M = assemble_cell_mass(state);

    Triplets t;
    append_block(t, A, 0, 0, 1.0);
    append_block(t, E, 0, 2 * n, -1.0);
    append_block(t, M, n, 0, -1.0);
    append_block(t, A, n, n, 1.0);
    append_block(t, Et, 2 * n, n, 1.0);
    append_block(t, C, 2 * n, 2 * n, prob.lambda);
    SparseMatrix K(2 * n + m, 2 * n + m);
    K.setFromTriplets(t.begin(), t.end());

    VectorXd b = VectorXd::Zero(2 * n + m);
    b.head(n) = cell_load(space, prob.f);
    b.segment(n, n) = -cell_load(space, prob.y_d);

    KktSystem sys;
    sys.n_state = std::size_t(n);
    sys.dofs = DofPartition(stacked_mask(space, std::size_t(m)));
    sys.fixed_values = VectorXd::Zero(2 * n + m);
    sys.fixed_values.head(n) = dirichlet_values(space, prob.boundary());
    sys.dofs.restrict(K, b, sys.fixed_values, sys.matrix, sys.rhs);

    // The control block is singular on ker R_h but the system is consistent.
    double scale = 0.0;
    for (Index j = 0; j < m; ++j) scale = std::max(scale, C.coeff(j, j));
    sys.shift = VectorXd::Zero(sys.rhs.size());
    sys.shift.tail(m).setConstant(1e-12 * prob.lambda * scale);
    return sys;
}

OptimalitySolution solve_uc32(const Discretization& disc, const ControlProblem& prob)
{
    require_unconstrained(prob, "solve_uc32");
    const HhoSpace& space = disc.space();
    require_dirichlet(space, "solve_uc32");
    const int k = space.face_degree();
    if (k < 2) throw std::invalid_argument("uc32 requires k >= 2");

    auto cspace = std::make_shared<const HhoSpace>(space.mesh(), k, k, false, space.basis_mode());
    auto cdisc = std::make_shared<const Discretization>(*cspace);
    const KktSystem sys = uc32_system(disc, *cdisc, prob);

    OptimalitySolution s{Scheme::uc32, HhoVector(space), HhoVector(space), {}, cspace, cdisc, std::nullopt, 0.0};
    const VectorXd x = solve_kkt(sys, &s.residual);
    const auto n = Index(sys.n_state);
    s.y = HhoVector(space, x.head(n));
    s.phi = HhoVector(space, x.segment(n, n));
    s.u_hat = HhoVector(*cspace, x.tail(Index(cspace->n_dofs())));
    for (std::size_t c = 0; c < space.mesh().n_cells(); ++c) s.control.push_back(cdisc->reconstruct(*s.u_hat, c));
    return s;
}

double discrete_cost(const HhoSpace& space, const HhoVector& y, const std::vector<VectorXd>& control,
                     const ControlProblem& prob)
{
    double misfit = 0.0, reg = 0.0;
    for (std::size_t c = 0; c < space.mesh().n_cells(); ++c) {
        const auto& q = space.cell_quadrature(c);
        const VectorXd yc = y.cell_block(c);
        for (std::size_t i = 0; i < q.size(); ++i) {
            const VectorXd phi = space.cell_basis(c).eval(q.nodes[i]);
            const double d = phi.head(yc.size()).dot(yc) - prob.y_d(q.nodes[i]);
            const double u = phi.head(control[c].size()).dot(control[c]);
            misfit += q.weights[i] * d * d;
            reg += q.weights[i] * u * u;
        }
    }
    return 0.5 * misfit + 0.5 * prob.lambda * reg;
}

}  // namespace hho

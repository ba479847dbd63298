#include "hho/constrained.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

namespace hho {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct CellTables {
    MatrixXd values;  // nodes x cell_dofs
    VectorXd weights;
};

class FixedPoint {
public:
    FixedPoint(const Discretization& disc, const ControlProblem& prob)
        : disc_(disc), space_(disc.space()), prob_(prob), dofs_(space_.fixed_mask())
    {
        const SparseMatrix A = assemble_stiffness(disc);
        fixed_y_ = dirichlet_values(space_, prob.boundary());
        VectorXd zero = VectorXd::Zero(Index(space_.n_dofs()));
        dofs_.restrict(A, zero, fixed_y_, A_free_, lift_);
        ldlt_.compute(A_free_);
        if (ldlt_.info() != Eigen::Success || (ldlt_.vectorD().array() <= 0.0).any())
            throw SolverError("state operator is not positive definite", NAN);
        F_ = cell_load(space_, prob.f);
        Yd_ = cell_load(space_, prob.y_d);
        M_ = assemble_cell_mass(disc);

        const auto nl = Index(space_.cell_dofs());
        for (std::size_t c = 0; c < space_.mesh().n_cells(); ++c) {
            const auto& q = space_.cell_quadrature(c);
            CellTables t;
            t.values = space_.cell_basis(c).eval(q.nodes).leftCols(nl);
            t.weights = Eigen::Map<const VectorXd>(q.weights.data(), Index(q.size()));
            tables_.push_back(std::move(t));
        }
    }

    const CellTables& table(std::size_t c) const { return tables_[c]; }

    VectorXd solve(const VectorXd& rhs_full, bool state) const
    {
        VectorXd b = dofs_.restrict_vector(rhs_full);
        if (state) b += lift_;
        VectorXd x = ldlt_.solve(b);
        const double res = relative_residual(A_free_, x, b);
        if (!(res <= 1e-10)) throw SolverError("state/adjoint solve inaccurate", res);
        return dofs_.expand(x, state ? fixed_y_ : VectorXd::Zero(fixed_y_.size()));
    }

    // u given at cell quadrature nodes.
    VectorXd control_load(const std::vector<VectorXd>& u) const
    {
        VectorXd b = VectorXd::Zero(Index(space_.n_dofs()));
        const auto nl = Index(space_.cell_dofs());
        for (std::size_t c = 0; c < u.size(); ++c)
            b.segment(Index(space_.cell_offset(c)), nl) = tables_[c].values.transpose() * tables_[c].weights.cwiseProduct(u[c]);
        return b;
    }

    VectorXd state(const std::vector<VectorXd>& u) const { return solve(F_ + control_load(u), true); }
    VectorXd adjoint(const VectorXd& y) const { return solve(M_ * y - Yd_, false); }

    double cost(const VectorXd& y, const std::vector<VectorXd>& u) const
    {
        double misfit = 0.0, reg = 0.0;
        const auto nl = Index(space_.cell_dofs());
        for (std::size_t c = 0; c < u.size(); ++c) {
            const auto& q = space_.cell_quadrature(c);
            const VectorXd yc = tables_[c].values * y.segment(Index(space_.cell_offset(c)), nl);
            for (std::size_t i = 0; i < q.size(); ++i) {
                const double d = yc(Index(i)) - prob_.y_d(q.nodes[i]);
                misfit += q.weights[i] * d * d;
            }
            reg += tables_[c].weights.dot(u[c].cwiseAbs2());
        }
        return 0.5 * misfit + 0.5 * prob_.lambda * reg;
    }

    // phi_T at the nodes of each cell.
    std::vector<VectorXd> adjoint_at_nodes(const VectorXd& phi) const
    {
        std::vector<VectorXd> out;
        const auto nl = Index(space_.cell_dofs());
        for (std::size_t c = 0; c < tables_.size(); ++c)
            out.push_back(tables_[c].values * phi.segment(Index(space_.cell_offset(c)), nl));
        return out;
    }

private:
    const Discretization& disc_;
    const HhoSpace& space_;
    const ControlProblem& prob_;
    DofPartition dofs_;
    SparseMatrix A_free_;
    VectorXd lift_;
    VectorXd fixed_y_;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
    VectorXd F_, Yd_;
    SparseMatrix M_;
    std::vector<CellTables> tables_;
};

ConstrainedSolution run(const Discretization& disc, const ControlProblem& prob, const PgdConfig& cfg, Scheme scheme)
{
    prob.validate();
    cfg.validate();
    if (!prob.bounds) throw std::invalid_argument("bounds required for constrained schemes");
    const AdmissibleBox box = *prob.bounds;
    const HhoSpace& space = disc.space();
    if (!space.dirichlet()) throw std::invalid_argument("constrained schemes need a Dirichlet state space");
    const bool cellwise = scheme == Scheme::wc1;

    const FixedPoint fp(disc, prob);
    const std::size_t nc = space.mesh().n_cells();

    std::vector<VectorXd> u(nc);
    for (std::size_t c = 0; c < nc; ++c) u[c] = VectorXd::Constant(fp.table(c).weights.size(), box.project(0.0));

    ConstrainedSolution s{scheme, HhoVector(space), HhoVector(space), {}, 0, 0.0, {}, {}};
    VectorXd y = fp.state(u);
    VectorXd phi = fp.adjoint(y);
    s.cost_history.push_back(fp.cost(y, u));

    for (int it = 1; it <= cfg.max_iters; ++it) {
        const std::vector<VectorXd> phi_nodes = fp.adjoint_at_nodes(phi);
        double inc2 = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            const VectorXd& w = fp.table(c).weights;
            VectorXd target(w.size());
            if (cellwise) {
                const double mean = w.dot(phi_nodes[c]) / w.sum();
                target.setConstant(box.project(-mean / prob.lambda));
            } else {
                for (Index i = 0; i < w.size(); ++i) target(i) = box.project(-phi_nodes[c](i) / prob.lambda);
            }
            VectorXd next = (1.0 - cfg.theta) * u[c] + cfg.theta * target;
            for (Index i = 0; i < next.size(); ++i) next(i) = box.project(next(i));
            inc2 += w.dot((next - u[c]).cwiseAbs2());
            u[c] = std::move(next);
        }
        const double inc = std::sqrt(inc2);
        s.increments.push_back(inc);
        y = fp.state(u);
        phi = fp.adjoint(y);
        s.cost_history.push_back(fp.cost(y, u));
        s.iterations = it;
        s.final_increment = inc;
        if (inc <= cfg.tol) break;
        if (it == cfg.max_iters) throw IterationError(it, inc);
    }

    s.y = HhoVector(space, y);
    s.phi = HhoVector(space, phi);
    for (std::size_t c = 0; c < nc; ++c) {
        if (cellwise) s.control.push_back({u[c](0)});
        else s.control.emplace_back(u[c].data(), u[c].data() + u[c].size());
    }
    return s;
}

}  // namespace

ConstrainedSolution solve_wc1(const Discretization& disc, const ControlProblem& prob, const PgdConfig& cfg)
{
    const HhoSpace& space = disc.space();
    if (space.cell_degree() != 0 || space.face_degree() != 0)
        throw std::invalid_argument("wc1 requires the lowest-order space (cell and face degree 0)");
    return run(disc, prob, cfg, Scheme::wc1);
}

ConstrainedSolution solve_wc2(const Discretization& disc, const ControlProblem& prob, const PgdConfig& cfg)
{
    const HhoSpace& space = disc.space();
    if (space.cell_degree() != 2 || space.face_degree() != 1)
        throw std::invalid_argument("wc2 requires the mixed-order space with cell degree 2 and face degree 1");
    return run(disc, prob, cfg, Scheme::wc2);
}

std::vector<double> control_at_nodes(const ConstrainedSolution& s, std::size_t cell)
{
    const std::size_t n = s.y.space().cell_quadrature(cell).size();
    if (s.scheme == Scheme::wc1) return std::vector<double>(n, s.control[cell].at(0));
    return s.control[cell];
}

double variational_inequality_residual(const Discretization& disc, const ConstrainedSolution& s,
                                       const ControlProblem& prob)
{
    if (!prob.bounds) throw std::invalid_argument("bounds required for constrained schemes");
    const HhoSpace& space = disc.space();
    double worst = INFINITY;
    for (std::size_t c = 0; c < space.mesh().n_cells(); ++c) {
        const auto& q = space.cell_quadrature(c);
        const std::vector<double> u = control_at_nodes(s, c);
        const VectorXd phi = s.phi.cell_block(c);
        double ga = 0.0, gb = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double g = eval_cell_polynomial(space, c, phi, q.nodes[i]) + prob.lambda * u[i];
            ga += q.weights[i] * g * (prob.bounds->lower - u[i]);
            gb += q.weights[i] * g * (prob.bounds->upper - u[i]);
        }
        worst = std::min({worst, ga, gb});
    }
    return worst;
}

}  // namespace hho

#include "hho/poisson.hpp"

namespace hho {

HhoVector solve_poisson(const Discretization& disc, const ScalarFunction& f, const ScalarFunction* g,
                        const SolverOptions& options)
{
    return solve_poisson(disc, LoadFunctional::cell_tested(f), g, options);
}

HhoVector solve_poisson(const Discretization& disc, const LoadFunctional& load, const ScalarFunction* g,
                        const SolverOptions& options)
{
    const HhoSpace& space = disc.space();
    if (!space.dirichlet()) throw std::invalid_argument("solve_poisson: space without Dirichlet condition");
    const Eigen::VectorXd fixed = dirichlet_values(space, g);

    if (options.condense.value_or(space.face_degree() >= 1)) {
        const CondensedSystem sys = condense(disc, load, fixed);
        return HhoVector(space, recover(disc, sys, solve_spd(sys.matrix, sys.rhs, options)));
    }
    const GlobalSystem sys = assemble(disc, load, fixed);
    return HhoVector(space, sys.dofs.expand(solve_spd(sys.matrix, sys.rhs, options), fixed));
}

}  // namespace hho

// HHO discretization of -Δy = f with Dirichlet data.

#pragma once

#include "hho/assembly.hpp"

namespace hho {

/// Solves a_h(y, w) = (f, w_T) over the homogeneous subspace. Boundary face
/// unknowns are set to Pi_F g when g is given, zero otherwise. Cell unknowns
/// are eliminated first when condensation is enabled.
HhoVector solve_poisson(const Discretization& disc, const ScalarFunction& f, const ScalarFunction* g = nullptr,
                        const SolverOptions& options = {});

/// Same with an arbitrary load functional.
HhoVector solve_poisson(const Discretization& disc, const LoadFunctional& load, const ScalarFunction* g = nullptr,
                        const SolverOptions& options = {});

}  // namespace hho

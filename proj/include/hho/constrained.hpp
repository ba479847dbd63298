// Box-constrained schemes solved by a damped projected fixed point
//
//   u^{n+1} = (1 - theta) u^n + theta P_Uad(-phi_T(u^n) / lambda)
//
// wc1: V_{h,0}^0, piecewise constant control, P_Uad applied to the cell mean.
// wc2: V_{h,0}^{1+}, control kept as its samples at the cell quadrature nodes.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hho/unconstrained.hpp"

namespace hho {

struct PgdConfig {
    int max_iters = 500;
    double tol = 1e-10;   // L2 distance between successive controls
    double theta = 0.5;   // relaxation factor in (0, 1]

    void validate() const
    {
        if (max_iters < 1) throw std::invalid_argument("pgd max_iters must be >= 1");
        if (!(tol > 0.0)) throw std::invalid_argument("pgd tol must be positive");
        if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("pgd theta must lie in (0, 1]");
    }
};

class IterationError : public std::runtime_error {
public:
    IterationError(int iterations, double last_increment)
        : std::runtime_error("projected fixed point did not converge in " + std::to_string(iterations) +
                             " iterations (last increment " + std::to_string(last_increment) + ")"),
          iterations_(iterations), last_increment_(last_increment)
    {
    }
    int iterations() const { return iterations_; }
    double last_increment() const { return last_increment_; }

private:
    int iterations_;
    double last_increment_;
};

struct ConstrainedSolution {
    Scheme scheme = Scheme::wc1;
    HhoVector y;
    HhoVector phi;
    /// Control values per cell: one entry for wc1, one per cell quadrature node for wc2.
    std::vector<std::vector<double>> control;
    int iterations = 0;
    double final_increment = 0.0;
    /// Discrete cost at every iterate, starting with the initial control.
    std::vector<double> cost_history;
    std::vector<double> increments;
};

ConstrainedSolution solve_wc1(const Discretization& disc, const ControlProblem& prob, const PgdConfig& cfg = {});
ConstrainedSolution solve_wc2(const Discretization& disc, const ControlProblem& prob, const PgdConfig& cfg = {});

/// Control values at the nodes of the cell quadrature (wc1 values are repeated).
std::vector<double> control_at_nodes(const ConstrainedSolution& s, std::size_t cell);

/// min over cells T and v in {u_a, u_b} on T (u_h elsewhere) of
/// (phi_T + lambda u_h, v - u_h). Non-negative at an exact solution.
double variational_inequality_residual(const Discretization& disc, const ConstrainedSolution& s,
                                       const ControlProblem& prob);

}  // namespace hho

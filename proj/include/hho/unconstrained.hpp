// Discrete optimality systems of the unconstrained schemes.
//
//   uc1   V_{h,0}^k, control in P^k(T_h), u_h = -phi_T / lambda
//   uc2   same system, control never discretized
//   uc31  V_{h,0}^k (k = 0, 1), loads and couplings tested against R_h,
//         u_h = R_h u with u = -phi / lambda
//   uc32  state/adjoint in V_{h,0}^{k+} (k >= 2), control R_h u with u in
//         V_h^k, imposed by (lambda R_h u + phi_T, R_h w) = 0 for all w.
//         R_h has a kernel, so u is only determined up to it; the solve
//         returns one representative and R_h u is unique.
//
// After eliminating the control the first three lead to
//
//   [  A     M / lambda ] [ y   ]   [  F  ]
//   [ -M     A          ] [ phi ] = [ -Yd ]
//
// with M the cell mass (uc1, uc2) or the reconstruction mass (uc31). uc32
// keeps the control as a third field. Systems are solved monolithically.

#pragma once

#include <memory>
#include <string>

#include "hho/assembly.hpp"
#include "hho/problem.hpp"

namespace hho {

enum class Scheme { uc1, uc2, uc31, uc32, wc1, wc2 };

std::string to_string(Scheme s);
/// Throws std::invalid_argument for unknown names.
Scheme parse_scheme(const std::string& name);

struct OptimalitySolution {
    Scheme scheme = Scheme::uc1;
    HhoVector y;
    HhoVector phi;
    /// Control per cell, as coefficients in the state space cell basis
    /// (degree k for uc1/uc2, k + 1 for uc31/uc32).
    std::vector<Eigen::VectorXd> control;
    /// Control unknowns for uc31 and uc32 (u_h = R_h u_hat).
    std::shared_ptr<const HhoSpace> control_space;
    std::shared_ptr<const Discretization> control_disc;
    std::optional<HhoVector> u_hat;
    /// Relative residual of the solved linear system.
    double residual = 0.0;
};

/// Block system over the free unknowns, with the partition used to expand it.
struct KktSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    DofPartition dofs;
    Eigen::VectorXd fixed_values;  // over all stacked unknowns
    std::size_t n_state = 0;       // unknowns per field (y and phi), before restriction
    /// Diagonal shift over the free unknowns for singular but consistent
    /// systems (uc32 control block); empty otherwise. The shifted matrix is
    /// only used as a preconditioner for iterative refinement on `matrix`.
    Eigen::VectorXd shift;
};

KktSystem uc1_system(const Discretization& disc, const ControlProblem& prob);
KktSystem uc31_system(const Discretization& disc, const ControlProblem& prob);

/// Reconstruction matrix of the whole control space: rows are the P^{k+1}
/// coefficients cell by cell, columns the control unknowns.
SparseMatrix global_reconstruction(const Discretization& control);
/// Three-field uc32 system over (y, phi, u), u ranging over all control unknowns.
KktSystem uc32_system(const Discretization& state, const Discretization& control, const ControlProblem& prob);

/// Stacked solution of a KktSystem (all unknowns, fixed ones included).
/// Sparse LU, followed by refinement steps when the system carries a shift.
Eigen::VectorXd solve_kkt(const KktSystem& sys, double* residual = nullptr, double tolerance = 1e-9);

OptimalitySolution solve_uc1(const Discretization& disc, const ControlProblem& prob);
OptimalitySolution solve_uc2(const Discretization& disc, const ControlProblem& prob);
OptimalitySolution solve_uc31(const Discretization& disc, const ControlProblem& prob);
/// `disc` is the mixed-order state discretization of face degree k >= 2.
OptimalitySolution solve_uc32(const Discretization& disc, const ControlProblem& prob);

/// Discrete reduced cost 1/2 |y_T - y_d|^2 + lambda/2 |u|^2 with the control
/// given per cell in the state space cell basis.
double discrete_cost(const HhoSpace& space, const HhoVector& y, const std::vector<Eigen::VectorXd>& control,
                     const ControlProblem& prob);

}  // namespace hho

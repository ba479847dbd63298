// Per-cell HHO operators.
//
// For a cell T with local unknowns v = (v_T, (v_F)_F), the reconstruction
// R_T v in P_{k+1}(T) solves
//
//   (grad R_T v, grad w)_T = (grad v_T, grad w)_T + sum_F (v_F - v_T, grad w . n_TF)_F
//   (R_T v, 1)_T = (v_T, 1)_T
//
// for all w in P_{k+1}(T). The gradient system is solved on the non-constant
// basis functions and the constant coefficient is fixed by the mean value.
// The face residuals are
//
//   S_F(v) = Pi_F^k (v_T - v_F + (I - Pi_T^l) R_T v)|_F
//
// and S_T(v, w) = h_T^{-1} sum_F (S_F v, S_F w)_F. The local stiffness is
// A_T = R^T K R + S_T with K the P_{k+1} gradient stiffness.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hho/space.hpp"

namespace hho {

struct LocalOperators {
    std::size_t cell = 0;
    /// reconstruction_dofs x n_local: coefficients of R_T v in the cell basis.
    Eigen::MatrixXd reconstruction;
    /// (grad phi_i, grad phi_j)_T on P_{k+1}(T).
    Eigen::MatrixXd gradient_stiffness;
    /// One face_dofs x n_local matrix per face, mapping v to the coefficients of S_F(v).
    std::vector<Eigen::MatrixXd> face_stabilization;
    Eigen::MatrixXd stabilization;  // S_T
    Eigen::MatrixXd stiffness;      // A_T
    Eigen::MatrixXd cell_mass;            // P_l(T)
    Eigen::MatrixXd reconstruction_mass;  // P_{k+1}(T)
    std::vector<Eigen::MatrixXd> face_mass;
};

LocalOperators build_local_operators(const HhoSpace& space, std::size_t cell);

/// Coefficients of R_T v in the cell basis.
Eigen::VectorXd reconstruct(const LocalOperators& ops, const Eigen::VectorXd& local);

struct StabilizationValue {
    std::vector<Eigen::VectorXd> face_residuals;  // S_F(v) per face
    double value = 0.0;                           // S_T(v, v)
};

StabilizationValue stabilize(const LocalOperators& ops, const Eigen::VectorXd& local);

/// E_T^{k+1} f = R_T(I_T f), coefficients in the cell basis.
Eigen::VectorXd elliptic_project(const HhoSpace& space, const LocalOperators& ops, const ScalarFunction& f);

/// A space together with the local operators of all its cells.
class Discretization {
public:
    explicit Discretization(const HhoSpace& space);

    const HhoSpace& space() const { return *space_; }
    const Mesh& mesh() const { return space_->mesh(); }
    const LocalOperators& ops(std::size_t cell) const { return ops_[cell]; }

    /// Coefficients of R_h v on one cell.
    Eigen::VectorXd reconstruct(const HhoVector& v, std::size_t cell) const;

private:
    const HhoSpace* space_;
    std::vector<LocalOperators> ops_;
};

}  // namespace hho

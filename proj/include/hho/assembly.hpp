// Global assembly of HHO bilinear forms and loads, Dirichlet elimination,
// static condensation and the symmetric positive-definite solve.

#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>

#include "hho/local_operators.hpp"

namespace hho {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// a_h over all unknowns (boundary faces included).
SparseMatrix assemble_stiffness(const Discretization& disc);
/// (v_T, w_T) over all unknowns; only cell-cell blocks are non-zero.
SparseMatrix assemble_cell_mass(const Discretization& disc);
/// (R_h v, R_h w) over all unknowns.
SparseMatrix assemble_reconstruction_mass(const Discretization& disc);

/// Load vectors over all unknowns.
Eigen::VectorXd cell_load(const HhoSpace& space, const ScalarFunction& f);               // (f, w_T)
Eigen::VectorXd reconstruction_load(const Discretization& disc, const ScalarFunction& f);  // (f, R_T w)

/// A linear form on the space: tested against cell polynomials, against
/// reconstructions, or given directly as a coefficient vector.
class LoadFunctional {
public:
    enum class Kind { cell_tested, reconstruction_tested, raw };

    static LoadFunctional cell_tested(ScalarFunction f) { return {Kind::cell_tested, std::move(f), {}}; }
    static LoadFunctional reconstruction_tested(ScalarFunction f)
    {
        return {Kind::reconstruction_tested, std::move(f), {}};
    }
    static LoadFunctional raw(Eigen::VectorXd v) { return {Kind::raw, {}, std::move(v)}; }

    Kind kind() const { return kind_; }
    Eigen::VectorXd evaluate(const Discretization& disc) const;

private:
    LoadFunctional(Kind k, ScalarFunction f, Eigen::VectorXd v) : kind_(k), f_(std::move(f)), raw_(std::move(v)) {}
    Kind kind_;
    ScalarFunction f_;
    Eigen::VectorXd raw_;
};

/// Splits unknowns into free (solved for) and fixed (prescribed) sets.
class DofPartition {
public:
    DofPartition() = default;
    explicit DofPartition(const std::vector<bool>& fixed);

    std::size_t n_total() const { return free_index_.size(); }
    std::size_t n_free() const { return free_.size(); }
    bool is_fixed(std::size_t dof) const { return free_index_[dof] < 0; }
    /// Position among the free unknowns, -1 for fixed ones.
    long free_index(std::size_t dof) const { return free_index_[dof]; }
    const std::vector<std::size_t>& free_dofs() const { return free_; }

    /// Restricts K x = b to the free rows/columns; fixed values move to the right-hand side.
    void restrict(const SparseMatrix& K, const Eigen::VectorXd& b, const Eigen::VectorXd& fixed_values,
                  SparseMatrix& K_free, Eigen::VectorXd& b_free) const;
    Eigen::VectorXd restrict_vector(const Eigen::VectorXd& full) const;
    Eigen::VectorXd expand(const Eigen::VectorXd& free_values, const Eigen::VectorXd& fixed_values) const;

private:
    std::vector<long> free_index_;
    std::vector<std::size_t> free_;
};

/// Boundary face values Pi_F g for every fixed face unknown, zero elsewhere.
Eigen::VectorXd dirichlet_values(const HhoSpace& space, const ScalarFunction* g);

struct GlobalSystem {
    SparseMatrix matrix;  // free unknowns only
    Eigen::VectorXd rhs;
    DofPartition dofs;
    Eigen::VectorXd fixed_values;  // full length; only fixed entries are used
};

GlobalSystem assemble(const Discretization& disc, const LoadFunctional& load,
                      const Eigen::VectorXd& fixed_values);

/// Face-only Schur complement obtained by eliminating cell unknowns cell by cell.
struct CondensedSystem {
    struct CellCache {
        Eigen::LLT<Eigen::MatrixXd> cell_block;  // A_cc
        Eigen::MatrixXd coupling;                // A_cf
        Eigen::VectorXd cell_rhs;                // b_c
    };
    SparseMatrix matrix;  // free face unknowns
    Eigen::VectorXd rhs;
    DofPartition face_dofs;  // over face unknowns (index = global dof - n_cell_unknowns)
    Eigen::VectorXd fixed_values;
    std::vector<CellCache> cells;
};

CondensedSystem condense(const Discretization& disc, const LoadFunctional& load, const Eigen::VectorXd& fixed_values);
/// Full solution vector from the free face solution of a condensed system.
Eigen::VectorXd recover(const Discretization& disc, const CondensedSystem& sys, const Eigen::VectorXd& face_solution);

enum class LinearSolver { direct, conjugate_gradient };

struct SolverOptions {
    LinearSolver solver = LinearSolver::direct;
    double cg_tolerance = 1e-12;
    int cg_max_iterations = 10000;
    /// Static condensation; defaults to on for face degree >= 1.
    std::optional<bool> condense;
    double residual_tolerance = 1e-10;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what + " (relative residual " + std::to_string(residual) + ")"), residual_(residual)
    {
    }
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Solves a symmetric positive-definite system; throws SolverError when the
/// factorization fails or the relative residual exceeds the tolerance.
Eigen::VectorXd solve_spd(const SparseMatrix& K, const Eigen::VectorXd& b, const SolverOptions& options = {});

double relative_residual(const SparseMatrix& K, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// One "row col value" triplet per line, 0-based.
void write_coordinate(std::ostream& out, const SparseMatrix& K);

}  // namespace hho

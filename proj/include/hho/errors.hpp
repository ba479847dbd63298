// Error functionals and experimental orders of convergence.

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "hho/constrained.hpp"

namespace hho {

/// |w|_{1,h}^2 = sum_T ( |grad w_T|_T^2 + h_T^{-1} sum_F |w_T - w_F|_F^2 ).
double hho_norm(const HhoVector& w);

/// |I_h v - v_h|_{1,h}.
double energy_error(const HhoVector& v_h, const ScalarFunction& v);

/// |v - v_T| over all cells.
double l2_error_cells(const HhoVector& v_h, const ScalarFunction& v);
/// |v - R_h v_h| over all cells.
double l2_error_reconstruction(const Discretization& disc, const HhoVector& v_h, const ScalarFunction& v);
/// |v - p| for a piecewise polynomial given by coefficients in the space's cell basis.
double l2_error_cell_polynomials(const HhoSpace& space, const std::vector<Eigen::VectorXd>& coeffs,
                                 const ScalarFunction& v);

/// |u - u_h| for the unconstrained schemes.
double l2_error_control(const OptimalitySolution& s, const ScalarFunction& u);
/// |u - u_h| for the constrained schemes. For wc2 u_h = P(-phi_T / lambda) is
/// evaluated pointwise and cells where u or u_h change activity are
/// integrated at four times the default exactness.
double l2_error_control(const ConstrainedSolution& s, const ControlProblem& prob);

/// Rate log(e_i / e_{i+1}) / log(h_i / h_{i+1}) per consecutive pair. A zero
/// error gives +infinity, a NaN error (absent quantity) gives NaN.
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs);

struct ErrorRecord {
    int level = 0;
    double h = 0.0;
    std::size_t n_cells = 0;
    double err_u_l2 = NAN;
    double err_y_energy = NAN;
    double err_phi_energy = NAN;
    double err_y_l2_recon = NAN;
    double err_phi_l2_recon = NAN;
    std::optional<int> iters;
};

enum class Quantity { u_l2, y_energy, phi_energy, y_l2_recon, phi_l2_recon };
constexpr std::array<Quantity, 5> all_quantities{Quantity::u_l2, Quantity::y_energy, Quantity::phi_energy,
                                                 Quantity::y_l2_recon, Quantity::phi_l2_recon};
const char* quantity_name(Quantity q);
double error_of(const ErrorRecord& r, Quantity q);

struct ConvergenceReport {
    std::vector<ErrorRecord> records;

    std::vector<double> hs() const;
    std::vector<double> errors(Quantity q) const;
    /// records.size() - 1 rates (empty for fewer than two records).
    std::vector<double> rates(Quantity q) const;
    /// Rate between the two finest levels; NaN when unavailable.
    double finest_rate(Quantity q) const;
};

}  // namespace hho

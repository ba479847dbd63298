// Manufactured solutions. Given exact state y and adjoint phi, the control is
// u = -phi/lambda (or its projection onto the box) and the data are
//
//   f = -Δy - u,    y_d = y + Δphi,
//
// so that -Δy = f + u and -Δphi = y - y_d hold exactly.

#pragma once

#include <string>
#include <vector>

#include "hho/expression.hpp"
#include "hho/problem.hpp"

namespace hho {

struct Preset {
    std::string id;
    std::string description;
    Expression y;
    Expression phi;
    double lambda = 1.0;
    /// Box used by the reference experiment; informational only.
    std::optional<AdmissibleBox> reference_bounds;
};

const std::vector<Preset>& builtin_presets();
/// Throws std::invalid_argument for unknown ids.
const Preset& find_preset(const std::string& id);

Preset custom_preset(const std::string& exact_y, const std::string& exact_phi, double lambda);

/// Builds the control problem with derived data and checks both state and
/// adjoint identities at sample points.
ControlProblem make_problem(const Preset& preset, double lambda, const std::optional<AdmissibleBox>& bounds);

/// Largest relative defect of -Δy = f + u and -Δphi = y - y_d over sample
/// points, with Δ evaluated by central differences.
double identity_defect(const ControlProblem& problem, double step = 1e-4, std::size_t samples = 32,
                       unsigned seed = 7);

}  // namespace hho

// Distributed optimal control of the Poisson equation:
//
//   min 1/2 |y - y_d|^2 + lambda/2 |u|^2   s.t.  -Δy = f + u,
//
// optionally with the box constraint u_a <= u <= u_b.

#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "hho/space.hpp"

namespace hho {

struct AdmissibleBox {
    double lower = 0.0;  // u_a
    double upper = 0.0;  // u_b

    void validate() const
    {
        if (!(lower < upper)) throw std::invalid_argument("admissible box requires u_a < u_b");
    }
    double project(double w) const { return std::min(upper, std::max(lower, w)); }
    bool contains(double w) const { return lower <= w && w <= upper; }
};

/// P_Uad(w) = min(u_b, max(u_a, w)).
inline double project_box(double w, const AdmissibleBox& box) { return box.project(w); }

struct ControlProblem {
    ScalarFunction f;
    ScalarFunction y_d;
    double lambda = 1.0;
    std::optional<AdmissibleBox> bounds;

    /// Dirichlet data of the state; homogeneous when empty.
    ScalarFunction state_boundary;

    // Exact solution, when known.
    ScalarFunction exact_y;
    ScalarFunction exact_phi;
    ScalarFunction exact_u;

    void validate() const
    {
        if (!f || !y_d) throw std::invalid_argument("control problem requires f and y_d");
        if (!(lambda > 0.0)) throw std::invalid_argument("control problem requires lambda > 0");
        if (bounds) bounds->validate();
    }
    const ScalarFunction* boundary() const { return state_boundary ? &state_boundary : nullptr; }
};

}  // namespace hho

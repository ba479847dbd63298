#include "hho/presets.hpp"

#include <cmath>
#include <random>

namespace hho {

namespace {

Preset make(std::string id, std::string description, const char* y, const char* phi, double lambda,
            std::optional<AdmissibleBox> bounds = std::nullopt)
{
    return {std::move(id), std::move(description), Expression::parse(y), Expression::parse(phi), lambda, bounds};
}

}  // namespace

const std::vector<Preset>& builtin_presets()
{
    static const std::vector<Preset> presets = {
        make("uc1-default", "y = 100 exp(x+y), phi = exp(x+y) sin(pi x) sin(pi y), lambda = 1e-2",
             "100*exp(x+y)", "exp(x+y)*sin(pi*x)*sin(pi*y)", 1e-2),
        make("uc31-default", "y = 20 sin(2 pi x) sin(2 pi y), phi = 5 exp(x+y) sin(pi x) sin(pi y), lambda = 1e-1",
             "20*sin(2*pi*x)*sin(2*pi*y)", "5*exp(x+y)*sin(pi*x)*sin(pi*y)", 1e-1),
        make("uc32-default", "y = sin(2 pi x) sin(2 pi y), phi = exp(x+y) sin(pi x) sin(pi y), lambda = 1e-2",
             "sin(2*pi*x)*sin(2*pi*y)", "exp(x+y)*sin(pi*x)*sin(pi*y)", 1e-2),
        make("wc-default",
             "y = sin(2 pi x) sin(2 pi y), phi = exp(x+y) sin(pi x) sin(pi y), lambda = 1e-2, box (-250, -10)",
             "sin(2*pi*x)*sin(2*pi*y)", "exp(x+y)*sin(pi*x)*sin(pi*y)", 1e-2, AdmissibleBox{-250.0, -10.0}),
    };
    return presets;
}

const Preset& find_preset(const std::string& id)
{
    for (const auto& p : builtin_presets())
        if (p.id == id) return p;
    throw std::invalid_argument("unknown preset '" + id + "'");
}

Preset custom_preset(const std::string& exact_y, const std::string& exact_phi, double lambda)
{
    return {"custom", "y = " + exact_y + ", phi = " + exact_phi, Expression::parse(exact_y),
            Expression::parse(exact_phi), lambda, std::nullopt};
}

ControlProblem make_problem(const Preset& preset, double lambda, const std::optional<AdmissibleBox>& bounds)
{
    const Expression minus_lap_y = -preset.y.laplacian();
    const Expression yd = preset.y + preset.phi.laplacian();
    const ScalarFunction phi = preset.phi.function();

    ControlProblem p;
    p.lambda = lambda;
    p.bounds = bounds;
    p.exact_y = preset.y.function();
    p.exact_phi = phi;
    if (bounds) {
        const AdmissibleBox box = *bounds;
        p.exact_u = [phi, lambda, box](const Point& x) { return box.project(-phi(x) / lambda); };
    } else {
        p.exact_u = [phi, lambda](const Point& x) { return -phi(x) / lambda; };
    }
    p.f = [g = minus_lap_y.function(), u = p.exact_u](const Point& x) { return g(x) - u(x); };
    p.y_d = yd.function();
    p.state_boundary = p.exact_y;
    p.validate();

    const double defect = identity_defect(p);
    if (!(defect < 1e-5))
        throw std::runtime_error("preset '" + preset.id + "' fails its identity check (defect " +
                                 std::to_string(defect) + ")");
    return p;
}

double identity_defect(const ControlProblem& p, double step, std::size_t samples, unsigned seed)
{
    if (!p.exact_y || !p.exact_phi || !p.exact_u) throw std::invalid_argument("identity_defect needs exact y, phi, u");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.1, 0.9);
    auto lap = [step](const ScalarFunction& g, const Point& x) {
        const Point ex(step, 0.0), ey(0.0, step);
        return (g(x + ex) + g(x - ex) + g(x + ey) + g(x - ey) - 4.0 * g(x)) / (step * step);
    };
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const Point x(unif(rng), unif(rng));
        const double ly = lap(p.exact_y, x);
        const double lp = lap(p.exact_phi, x);
        const double s1 = std::max({1.0, std::abs(ly), std::abs(p.f(x)), std::abs(p.exact_u(x))});
        const double s2 = std::max({1.0, std::abs(lp), std::abs(p.exact_y(x)), std::abs(p.y_d(x))});
        worst = std::max(worst, std::abs(-ly - p.f(x) - p.exact_u(x)) / s1);
        worst = std::max(worst, std::abs(-lp - p.exact_y(x) + p.y_d(x)) / s2);
    }
    return worst;
}

}  // namespace hho

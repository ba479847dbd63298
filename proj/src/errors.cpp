#include "hho/errors.hpp"

#include <stdexcept>

namespace hho {

using Eigen::Index;
using Eigen::VectorXd;

double hho_norm(const HhoVector& w)
{
    const HhoSpace& space = w.space();
    const Mesh& mesh = space.mesh();
    const auto nl = Index(space.cell_dofs());
    double total = 0.0;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const Cell& T = mesh.cell(c);
        const auto& basis = space.cell_basis(c);
        const VectorXd wc = w.cell_block(c);
        const auto& qc = space.cell_quadrature(c);
        double cell = 0.0;
        for (std::size_t i = 0; i < qc.size(); ++i) {
            const Vector2 g = basis.eval_grad(qc.nodes[i]).topRows(nl).transpose() * wc;
            cell += qc.weights[i] * g.squaredNorm();
        }
        double faces = 0.0;
        for (std::size_t f : T.faces) {
            const auto& qf = space.face_quadrature(f);
            const VectorXd wf = w.face_block(f);
            for (std::size_t i = 0; i < qf.size(); ++i) {
                const double d = basis.eval(qf.nodes[i]).head(nl).dot(wc) - space.face_basis(f).eval(qf.nodes[i]).dot(wf);
                faces += qf.weights[i] * d * d;
            }
        }
        total += cell + faces / T.diameter;
    }
    return std::sqrt(total);
}

double energy_error(const HhoVector& v_h, const ScalarFunction& v)
{
    HhoVector d = reduce(v_h.space(), v);
    d.values() -= v_h.values();
    return hho_norm(d);
}

double l2_error_cell_polynomials(const HhoSpace& space, const std::vector<VectorXd>& coeffs, const ScalarFunction& v)
{
    double total = 0.0;
    for (std::size_t c = 0; c < space.mesh().n_cells(); ++c) {
        const auto& q = space.cell_quadrature(c);
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double d = v(q.nodes[i]) - eval_cell_polynomial(space, c, coeffs[c], q.nodes[i]);
            total += q.weights[i] * d * d;
        }
    }
    return std::sqrt(total);
}

double l2_error_cells(const HhoVector& v_h, const ScalarFunction& v)
{
    std::vector<VectorXd> coeffs;
    for (std::size_t c = 0; c < v_h.space().mesh().n_cells(); ++c) coeffs.push_back(v_h.cell_block(c));
    return l2_error_cell_polynomials(v_h.space(), coeffs, v);
}

double l2_error_reconstruction(const Discretization& disc, const HhoVector& v_h, const ScalarFunction& v)
{
    std::vector<VectorXd> coeffs;
    for (std::size_t c = 0; c < disc.mesh().n_cells(); ++c) coeffs.push_back(disc.reconstruct(v_h, c));
    return l2_error_cell_polynomials(disc.space(), coeffs, v);
}

double l2_error_control(const OptimalitySolution& s, const ScalarFunction& u)
{
    return l2_error_cell_polynomials(s.y.space(), s.control, u);
}

namespace {

int activity(double w, const AdmissibleBox& box)
{
    return w < box.lower ? -1 : (w > box.upper ? 1 : 0);
}

}  // namespace

double l2_error_control(const ConstrainedSolution& s, const ControlProblem& prob)
{
    if (!prob.bounds || !prob.exact_phi) throw std::invalid_argument("control error needs bounds and the exact adjoint");
    const AdmissibleBox box = *prob.bounds;
    const HhoSpace& space = s.y.space();
    const Mesh& mesh = space.mesh();
    const ScalarFunction& phi = prob.exact_phi;
    double total = 0.0;

    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const VectorXd phi_c = s.phi.cell_block(c);
        auto discrete = [&](const Point& x) { return -eval_cell_polynomial(space, c, phi_c, x) / prob.lambda; };
        auto exact = [&](const Point& x) { return -phi(x) / prob.lambda; };

        if (s.scheme == Scheme::wc1) {
            const auto& q = space.cell_quadrature(c);
            bool kink = false;
            const int a0 = activity(exact(q.nodes[0]), box);
            for (const Point& x : q.nodes) kink = kink || activity(exact(x), box) != a0;
            for (std::size_t v : mesh.cell(c).vertices) kink = kink || activity(exact(mesh.vertex(v)), box) != a0;
            const Quadrature fine = kink ? cell_quadrature(mesh, c, 4 * space.quadrature_exactness()) : q;
            for (std::size_t i = 0; i < fine.size(); ++i) {
                const double d = box.project(exact(fine.nodes[i])) - s.control[c][0];
                total += fine.weights[i] * d * d;
            }
            continue;
        }

        const auto& q = space.cell_quadrature(c);
        bool kink = false;
        const int a0 = activity(exact(q.nodes[0]), box);
        const int b0 = activity(discrete(q.nodes[0]), box);
        for (const Point& x : q.nodes) kink = kink || activity(exact(x), box) != a0 || activity(discrete(x), box) != b0;
        for (std::size_t v : mesh.cell(c).vertices) {
            const Point& x = mesh.vertex(v);
            kink = kink || activity(exact(x), box) != a0 || activity(discrete(x), box) != b0;
        }
        const Quadrature fine = kink ? cell_quadrature(mesh, c, 4 * space.quadrature_exactness()) : q;
        for (std::size_t i = 0; i < fine.size(); ++i) {
            const double d = box.project(exact(fine.nodes[i])) - box.project(discrete(fine.nodes[i]));
            total += fine.weights[i] * d * d;
        }
    }
    return std::sqrt(total);
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& hs)
{
    if (errors.size() != hs.size()) throw std::invalid_argument("eoc: errors and mesh sizes differ in length");
    std::vector<double> rates;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        if (!(hs[i + 1] < hs[i])) throw std::invalid_argument("eoc: mesh sizes must be strictly decreasing");
        const double e0 = errors[i], e1 = errors[i + 1];
        if (std::isnan(e0) || std::isnan(e1)) rates.push_back(NAN);
        else if (e0 == 0.0 || e1 == 0.0) rates.push_back(INFINITY);
        else rates.push_back(std::log(e0 / e1) / std::log(hs[i] / hs[i + 1]));
    }
    return rates;
}

const char* quantity_name(Quantity q)
{
    switch (q) {
    case Quantity::u_l2: return "u";
    case Quantity::y_energy: return "y";
    case Quantity::phi_energy: return "phi";
    case Quantity::y_l2_recon: return "y_recon";
    case Quantity::phi_l2_recon: return "phi_recon";
    }
    return "?";
}

double error_of(const ErrorRecord& r, Quantity q)
{
    switch (q) {
    case Quantity::u_l2: return r.err_u_l2;
    case Quantity::y_energy: return r.err_y_energy;
    case Quantity::phi_energy: return r.err_phi_energy;
    case Quantity::y_l2_recon: return r.err_y_l2_recon;
    case Quantity::phi_l2_recon: return r.err_phi_l2_recon;
    }
    return NAN;
}

std::vector<double> ConvergenceReport::hs() const
{
    std::vector<double> out;
    for (const auto& r : records) out.push_back(r.h);
    return out;
}

std::vector<double> ConvergenceReport::errors(Quantity q) const
{
    std::vector<double> out;
    for (const auto& r : records) out.push_back(error_of(r, q));
    return out;
}

std::vector<double> ConvergenceReport::rates(Quantity q) const { return eoc(errors(q), hs()); }

double ConvergenceReport::finest_rate(Quantity q) const
{
    const auto r = rates(q);
    return r.empty() ? NAN : r.back();
}

}  // namespace hho

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hho/assembly.hpp"
#include "hho/errors.hpp"
#include "hho/mesh_generators.hpp"
#include "hho/poisson.hpp"

using namespace hho;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Random polynomial of total degree <= d in plain monomials.
struct Poly {
    int degree = 0;
    std::vector<double> c;  // c[a*(d+1)+b] for x^a y^b
    double operator()(const Point& p) const
    {
        double s = 0.0;
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b) s += c[std::size_t(a * (degree + 1) + b)] * std::pow(p.x(), a) * std::pow(p.y(), b);
        return s;
    }
};

Poly random_poly(int degree, std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Poly p;
    p.degree = degree;
    p.c.resize(std::size_t((degree + 1) * (degree + 1)));
    for (double& v : p.c) v = u(rng);
    return p;
}

std::vector<Mesh> sample_meshes()
{
    std::vector<Mesh> out;
    out.push_back(make_cartesian(4));
    out.push_back(make_voronoi(16, 42, 40));
    return out;
}

double max_abs(const MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

MatrixXd dense_stiffness(const Discretization& disc)
{
    const HhoSpace& space = disc.space();
    MatrixXd K = MatrixXd::Zero(Eigen::Index(space.n_dofs()), Eigen::Index(space.n_dofs()));
    for (std::size_t c = 0; c < space.mesh().n_cells(); ++c) {
        const auto dofs = space.local_dofs(c);
        const MatrixXd& A = disc.ops(c).stiffness;
        for (std::size_t i = 0; i < dofs.size(); ++i)
            for (std::size_t j = 0; j < dofs.size(); ++j)
                K(Eigen::Index(dofs[i]), Eigen::Index(dofs[j])) += A(Eigen::Index(i), Eigen::Index(j));
    }
    return K;
}

}  // namespace

TEST_CASE("cell and face projections")
{
    const Mesh m = make_cartesian(1);
    const HhoSpace space(m, 1, 1, false);
    const VectorXd p0 = l2_project_cell(space, 0, 0, [](const Point& x) { return x.x() * x.x(); });
    CHECK(p0(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    std::mt19937 rng(1);
    const Mesh v = make_voronoi(16, 42, 40);
    const HhoSpace sv(v, 2, 2, false);
    const Poly p = random_poly(2, rng);
    for (std::size_t c = 0; c < v.n_cells(); ++c) {
        const VectorXd coeffs = l2_project_cell(sv, c, 2, p);
        for (const Point& x : sv.cell_quadrature(c).nodes)
            CHECK(std::abs(eval_cell_polynomial(sv, c, coeffs, x) - p(x)) < 1e-11);
    }
    for (std::size_t f = 0; f < v.n_faces(); ++f) {
        const VectorXd coeffs = l2_project_face(sv, f, 2, p);
        for (const Point& x : sv.face_quadrature(f).nodes)
            CHECK(std::abs(sv.face_basis(f).eval(x).dot(coeffs) - p(x)) < 1e-11);
    }

    // projection error of sin(pi x) decreases with the degree
    double prev = 1e300;
    auto s = [](const Point& x) { return std::sin(M_PI * x.x()); };
    for (int d = 0; d <= 3; ++d) {
        const HhoSpace sd(m, d, d, false);
        const VectorXd c = l2_project_cell(sd, 0, d, s);
        const double err = l2_error_cell_polynomials(sd, {c}, s);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("reduction keeps boundary faces")
{
    const Mesh m = make_cartesian(2);
    const HhoSpace space(m, 0, 0, true);
    const HhoVector v = reduce(space, [](const Point&) { return 3.0; });
    CHECK((v.values().array() - 3.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("reconstruction matches a constrained least-squares oracle")
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const Mesh& m : sample_meshes())
        for (int k = 0; k <= 2; ++k)
            for (int l : {k, k + 1}) {
                const HhoSpace space(m, l, k, false);
                for (std::size_t c = 0; c < m.n_cells(); c += 3) {
                    const LocalOperators ops = build_local_operators(space, c);
                    const Cell& T = m.cell(c);
                    VectorXd local(Eigen::Index(space.n_local_dofs(c)));
                    for (Eigen::Index i = 0; i < local.size(); ++i) local(i) = u(rng);

                    const auto nl = Eigen::Index(space.cell_dofs());
                    const auto nf = Eigen::Index(space.face_dofs());
                    const CellBasis& cb = space.cell_basis(c);
                    auto vT = [&](const Point& x) { return cb.eval(x).head(nl).dot(local.head(nl)); };
                    auto gradT = [&](const Point& x) -> Vector2 {
                        return cb.eval_grad(x).topRows(nl).transpose() * local.head(nl);
                    };

                    // plain monomials centred at the centroid
                    const int d = k + 1;
                    std::vector<std::pair<int, int>> exps;
                    for (int s = 0; s <= d; ++s)
                        for (int b = 0; b <= s; ++b) exps.emplace_back(s - b, b);
                    const auto n = Eigen::Index(exps.size());
                    auto mono = [&](std::size_t i, const Point& x) {
                        const Point z = x - T.centroid;
                        return std::pow(z.x(), exps[i].first) * std::pow(z.y(), exps[i].second);
                    };
                    auto mgrad = [&](std::size_t i, const Point& x) -> Vector2 {
                        const Point z = x - T.centroid;
                        const auto [a, b] = exps[i];
                        return {a ? a * std::pow(z.x(), a - 1) * std::pow(z.y(), b) : 0.0,
                                b ? b * std::pow(z.x(), a) * std::pow(z.y(), b - 1) : 0.0};
                    };

                    const Quadrature qc = cell_quadrature(m, c, 2 * (d + 2));
                    MatrixXd B = MatrixXd::Zero(n + 1, n + 1);
                    VectorXd rhs = VectorXd::Zero(n + 1);
                    for (std::size_t q = 0; q < qc.size(); ++q) {
                        const Point& x = qc.nodes[q];
                        for (Eigen::Index i = 0; i < n; ++i) {
                            for (Eigen::Index j = 0; j < n; ++j)
                                B(i, j) += qc.weights[q] * mgrad(std::size_t(i), x).dot(mgrad(std::size_t(j), x));
                            rhs(i) += qc.weights[q] * gradT(x).dot(mgrad(std::size_t(i), x));
                            B(i, n) += qc.weights[q] * mono(std::size_t(i), x);
                        }
                        rhs(n) += qc.weights[q] * vT(x);
                    }
                    for (std::size_t i = 0; i < T.faces.size(); ++i) {
                        const std::size_t f = T.faces[i];
                        const Quadrature qf = face_quadrature(m, f, 2 * (d + 2));
                        const VectorXd vf = local.segment(nl + Eigen::Index(i) * nf, nf);
                        for (std::size_t q = 0; q < qf.size(); ++q) {
                            const Point& x = qf.nodes[q];
                            const double jump = space.face_basis(f).eval(x).dot(vf) - vT(x);
                            for (Eigen::Index j = 0; j < n; ++j)
                                rhs(j) += qf.weights[q] * jump * mgrad(std::size_t(j), x).dot(T.normals[i]);
                        }
                    }
                    B.row(n) = B.col(n).transpose();
                    const VectorXd sol = B.fullPivLu().solve(rhs);

                    const VectorXd R = reconstruct(ops, local);
                    for (const Point& x : qc.nodes) {
                        double oracle = 0.0;
                        for (Eigen::Index i = 0; i < n; ++i) oracle += sol(i) * mono(std::size_t(i), x);
                        CHECK(std::abs(eval_cell_polynomial(space, c, R, x) - oracle) < 1e-10);
                    }
                }
            }
}

TEST_CASE("stabilization matches the face residual formula")
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const Mesh& m : sample_meshes())
        for (int k = 0; k <= 2; ++k)
            for (int l : {k, k + 1}) {
                const HhoSpace space(m, l, k, false);
                for (std::size_t c = 1; c < m.n_cells(); c += 4) {
                    const LocalOperators ops = build_local_operators(space, c);
                    const Cell& T = m.cell(c);
                    VectorXd local(Eigen::Index(space.n_local_dofs(c)));
                    for (Eigen::Index i = 0; i < local.size(); ++i) local(i) = u(rng);
                    const auto nl = Eigen::Index(space.cell_dofs());
                    const auto nf = Eigen::Index(space.face_dofs());

                    const VectorXd R = reconstruct(ops, local);
                    auto Rfun = [&](const Point& x) { return eval_cell_polynomial(space, c, R, x); };
                    const VectorXd PR = l2_project_cell(space, c, l, Rfun);
                    const VectorXd vT = local.head(nl);

                    double total = 0.0;
                    for (std::size_t i = 0; i < T.faces.size(); ++i) {
                        const std::size_t f = T.faces[i];
                        const FaceBasis& fb = space.face_basis(f);
                        const Quadrature qf = face_quadrature(m, f, 4 * (k + 2));
                        const VectorXd vf = local.segment(nl + Eigen::Index(i) * nf, nf);
                        MatrixXd G = MatrixXd::Zero(nf, nf);
                        VectorXd b = VectorXd::Zero(nf);
                        for (std::size_t q = 0; q < qf.size(); ++q) {
                            const Point& x = qf.nodes[q];
                            const double r = eval_cell_polynomial(space, c, vT, x) - fb.eval(x).dot(vf) + Rfun(x) -
                                             eval_cell_polynomial(space, c, PR, x);
                            G += qf.weights[q] * fb.eval(x) * fb.eval(x).transpose();
                            b += qf.weights[q] * r * fb.eval(x);
                        }
                        const VectorXd proj = G.llt().solve(b);
                        CHECK(max_abs(proj - ops.face_stabilization[i] * local) < 1e-10);
                        total += proj.dot(G * proj);
                    }
                    CHECK(stabilize(ops, local).value == doctest::Approx(total / T.diameter).epsilon(1e-10));
                }
            }
}

TEST_CASE("unit square closed forms")
{
    const Mesh m = make_cartesian(1);
    const HhoSpace space(m, 0, 0, false);
    const Discretization disc(space);
    const LocalOperators& ops = disc.ops(0);

    // interpolate x: energy |grad x|^2 = 1, stabilization vanishes
    const VectorXd ix = reduce_local(space, 0, [](const Point& p) { return p.x(); });
    CHECK(ix.dot(ops.stiffness * ix) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(stabilize(ops, ix).value) < 1e-15);

    // unit value on the right face only: R = x - 1/2, two faces carry residual -1/2
    VectorXd e = VectorXd::Zero(5);
    for (std::size_t i = 0; i < 4; ++i)
        if (m.face(m.cell(0).faces[i]).midpoint.x() > 0.99) e(1 + Eigen::Index(i)) = 1.0;
    CHECK(e.sum() == 1.0);
    const double expected = 1.0 + 0.5 / std::sqrt(2.0);
    CHECK(e.dot(ops.stiffness * e) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("polynomial consistency and kernel")
{
    std::mt19937 rng(11);
    for (const Mesh& m : sample_meshes())
        for (int k = 0; k <= 3; ++k)
            for (int l : {k, k + 1}) {
                const HhoSpace space(m, l, k, false);
                const Discretization disc(space);
                const Poly p = random_poly(k + 1, rng);
                for (std::size_t c = 0; c < m.n_cells(); ++c) {
                    const LocalOperators& ops = disc.ops(c);
                    const VectorXd ip = reduce_local(space, c, p);
                    const VectorXd R = reconstruct(ops, ip);
                    for (const Point& x : space.cell_quadrature(c).nodes)
                        CHECK(std::abs(eval_cell_polynomial(space, c, R, x) - p(x)) < 1e-11);
                    for (const VectorXd& s : stabilize(ops, ip).face_residuals) CHECK(max_abs(s) < 1e-11);

                    const MatrixXd& A = ops.stiffness;
                    CHECK(max_abs(A - A.transpose()) == 0.0);
                    const VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixXd>(A).eigenvalues();
                    CHECK(std::abs(ev(0)) < 1e-12 * ev(ev.size() - 1));
                    CHECK(ev(1) > 1e-8 * ev(ev.size() - 1));
                    const VectorXd one = reduce_local(space, c, [](const Point&) { return 1.0; });
                    CHECK(max_abs(A * one) < 1e-12 * ev(ev.size() - 1));
                }
            }
}

TEST_CASE("elliptic projection")
{
    const Mesh m = make_voronoi(16, 42, 40);
    auto f = [](const Point& p) { return std::exp(p.x() + p.y()); };
    std::mt19937 rng(2);
    for (int k = 0; k <= 2; ++k) {
        const HhoSpace space(m, k, k, false);
        const Discretization disc(space);
        const Poly p = random_poly(k + 1, rng);
        for (std::size_t c = 0; c < m.n_cells(); ++c) {
            const VectorXd ep = elliptic_project(space, disc.ops(c), p);
            for (const Point& x : space.cell_quadrature(c).nodes)
                CHECK(std::abs(eval_cell_polynomial(space, c, ep, x) - p(x)) < 1e-11);

            // grad(f - E f) is orthogonal to grad P_{k+1}, and the means agree
            const VectorXd ef = elliptic_project(space, disc.ops(c), f);
            const Quadrature q = cell_quadrature(m, c, 20);
            const auto nr = Eigen::Index(space.reconstruction_dofs());
            VectorXd ortho = VectorXd::Zero(nr);
            double mean = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
                const Point& x = q.nodes[i];
                const Vector2 g = Vector2(f(x), f(x)) - eval_cell_polynomial_grad(space, c, ef, x);
                ortho += q.weights[i] * space.cell_basis(c).eval_grad(x).topRows(nr) * g;
                mean += q.weights[i] * (f(x) - eval_cell_polynomial(space, c, ef, x));
            }
            // limited by the default rule exactness applied to exp
            CHECK(max_abs(ortho) < 1e-8);
            CHECK(std::abs(mean) < 1e-10);
        }
    }
}

TEST_CASE("sparse assembly matches dense assembly")
{
    for (const Mesh& m : {make_cartesian(2), make_voronoi(16, 42, 40)})
        for (int k = 0; k <= 1; ++k) {
            const HhoSpace space(m, k, k, true);
            const Discretization disc(space);
            const MatrixXd dense = dense_stiffness(disc);
            const MatrixXd sparse = MatrixXd(assemble_stiffness(disc));
            CHECK(max_abs(dense - sparse) < 1e-12 * max_abs(dense));

            // cell mass: (v_T, w_T) by direct quadrature
            const MatrixXd M = MatrixXd(assemble_cell_mass(disc));
            for (std::size_t c = 0; c < m.n_cells(); ++c) {
                const auto off = Eigen::Index(space.cell_offset(c));
                const auto nl = Eigen::Index(space.cell_dofs());
                const Quadrature& q = space.cell_quadrature(c);
                const MatrixXd local = mass_matrix(space.cell_basis(c).eval(q.nodes).leftCols(nl), q);
                CHECK(max_abs(M.block(off, off, nl, nl) - local) < 1e-14);
            }
        }
}

TEST_CASE("condensed and full solves agree")
{
    auto f = [](const Point& p) { return 2 * M_PI * M_PI * std::sin(M_PI * p.x()) * std::sin(M_PI * p.y()); };
    for (const Mesh& m : {make_cartesian(4), make_voronoi(16, 42, 40)})
        for (int k = 0; k <= 2; ++k) {
            const HhoSpace space(m, k, k, true);
            const Discretization disc(space);
            SolverOptions full, cond, cg;
            full.condense = false;
            cond.condense = true;
            cg.condense = true;
            cg.solver = LinearSolver::conjugate_gradient;
            const HhoVector a = solve_poisson(disc, f, nullptr, full);
            const HhoVector b = solve_poisson(disc, f, nullptr, cond);
            const HhoVector c = solve_poisson(disc, f, nullptr, cg);
            CHECK(max_abs(a.values() - b.values()) < 1e-11);
            CHECK(max_abs(a.values() - c.values()) < 1e-9);

            const CondensedSystem sys = condense(disc, LoadFunctional::cell_tested(f), VectorXd::Zero(Eigen::Index(space.n_dofs())));
            CHECK(Eigen::LLT<MatrixXd>(MatrixXd(sys.matrix)).info() == Eigen::Success);
        }
}

TEST_CASE("polynomial solutions are reproduced")
{
    // y = x^2 + 2 y^2 + x, -Δy = -6, nonhomogeneous Dirichlet data
    auto y = [](const Point& p) { return p.x() * p.x() + 2 * p.y() * p.y() + p.x(); };
    auto f = [](const Point&) { return -6.0; };
    for (const Mesh& m : {make_cartesian(3), make_voronoi(16, 42, 40)})
        for (int k = 1; k <= 2; ++k) {
            const HhoSpace space(m, k, k, true);
            const Discretization disc(space);
            const ScalarFunction g = y;
            const HhoVector sol = solve_poisson(disc, f, &g);
            CHECK(energy_error(sol, y) < 1e-10);
            CHECK(l2_error_reconstruction(disc, sol, y) < 1e-11);
        }
    auto lin = [](const Point& p) { return 1.0 + 2 * p.x() - p.y(); };
    const Mesh m = make_voronoi(16, 42, 40);
    const HhoSpace space(m, 0, 0, true);
    const Discretization disc(space);
    const ScalarFunction g = lin;
    CHECK(energy_error(solve_poisson(disc, [](const Point&) { return 0.0; }, &g), lin) < 1e-11);
}

TEST_CASE("zero load gives zero solution")
{
    const Mesh m = make_cartesian(4);
    const HhoSpace space(m, 1, 1, true);
    const Discretization disc(space);
    CHECK(max_abs(solve_poisson(disc, [](const Point&) { return 0.0; }).values()) == 0.0);
}

TEST_CASE("hho norm is a norm on the homogeneous subspace")
{
    const Mesh m = make_voronoi(16, 42, 40);
    const HhoSpace free_space(m, 1, 1, false);
    CHECK(hho_norm(reduce(free_space, [](const Point&) { return 2.5; })) < 1e-13);

    const HhoSpace space(m, 1, 1, true);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    HhoVector v(space);
    const auto mask = space.fixed_mask();
    for (Eigen::Index i = 0; i < v.values().size(); ++i) v.values()(i) = mask[std::size_t(i)] ? 0.0 : u(rng);
    CHECK(hho_norm(v) > 0.0);
    HhoVector w(space, 3.0 * v.values());
    CHECK(hho_norm(w) == doctest::Approx(3.0 * hho_norm(v)).epsilon(1e-14));
}

TEST_CASE("poisson energy rate at k = 0")
{
    auto y = [](const Point& p) { return std::sin(M_PI * p.x()) * std::sin(M_PI * p.y()); };
    auto f = [&](const Point& p) { return 2 * M_PI * M_PI * y(p); };
    std::vector<double> errs, hs;
    for (std::size_t n : {8u, 16u}) {
        const Mesh m = make_cartesian(n);
        const HhoSpace space(m, 0, 0, true);
        const Discretization disc(space);
        errs.push_back(energy_error(solve_poisson(disc, f), y));
        hs.push_back(m.h());
    }
    const double rate = eoc(errs, hs)[0];
    CHECK(rate > 0.8);
    CHECK(rate < 1.3);
}

TEST_CASE("coordinate export")
{
    Triplets t{{0, 0, 2.0}, {1, 0, -1.5}, {1, 1, 0.25}};
    SparseMatrix K(2, 2);
    K.setFromTriplets(t.begin(), t.end());
    std::ostringstream out;
    write_coordinate(out, K);
    CHECK(out.str() == "0 0 2\n1 0 -1.5\n1 1 0.25\n");
}

TEST_CASE("solve_spd rejects indefinite systems")
{
    SparseMatrix K(2, 2);
    Triplets t{{0, 0, 1.0}, {1, 1, -1.0}};
    K.setFromTriplets(t.begin(), t.end());
    CHECK_THROWS_AS(solve_spd(K, VectorXd::Ones(2)), SolverError);
}

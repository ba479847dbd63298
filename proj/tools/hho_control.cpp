// hho-control: convergence studies for HHO discretizations of optimal
// control problems.
//
//   hho-control run --config study.cfg
//   hho-control run --scheme uc1 --degree 1 --mesh cartesian --levels 4,8,16,32 --preset uc1-default --out dir
//   hho-control presets
//   hho-control mesh --family voronoi --cells 64 --seed 42 --out mesh.txt

#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hho/experiment.hpp"
#include "hho/mesh_generators.hpp"
#include "hho/mesh_io.hpp"

namespace {

struct RunArgs {
    std::string config;
    std::string scheme;
    std::optional<int> degree;
    std::string mesh;
    std::string levels;
    std::string preset;
    std::string exact_y;
    std::string exact_phi;
    std::optional<double> lambda;
    std::vector<double> bounds;
    std::optional<int> pgd_max_iters;
    std::optional<double> pgd_tol;
    std::optional<double> pgd_theta;
    std::optional<std::size_t> lloyd_iters;
    std::optional<std::uint64_t> seed;
    std::string out;
};

std::string real(double v)
{
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

hho::ExperimentConfig config_from_flags(const RunArgs& a)
{
    std::ostringstream doc;
    doc << "scheme = " << a.scheme << '\n';
    if (a.degree) doc << "degree = " << *a.degree << '\n';
    if (!a.mesh.empty()) doc << "mesh = " << a.mesh << '\n';
    if (!a.levels.empty()) doc << "levels = " << a.levels << '\n';
    if (!a.preset.empty()) doc << "preset = " << a.preset << '\n';
    if (!a.exact_y.empty()) doc << "exact_y = " << a.exact_y << '\n';
    if (!a.exact_phi.empty()) doc << "exact_phi = " << a.exact_phi << '\n';
    if (a.lambda) doc << "lambda = " << real(*a.lambda) << '\n';
    if (!a.bounds.empty()) doc << "bounds = " << real(a.bounds[0]) << ", " << real(a.bounds[1]) << '\n';
    if (a.pgd_max_iters) doc << "pgd_max_iters = " << *a.pgd_max_iters << '\n';
    if (a.pgd_tol) doc << "pgd_tol = " << real(*a.pgd_tol) << '\n';
    if (a.pgd_theta) doc << "pgd_theta = " << real(*a.pgd_theta) << '\n';
    if (a.lloyd_iters) doc << "lloyd_iters = " << *a.lloyd_iters << '\n';
    if (a.seed) doc << "rng_seed = " << *a.seed << '\n';
    if (!a.out.empty()) doc << "output_dir = " << a.out << '\n';
    return hho::validate_config(doc.str());
}

int run(const RunArgs& a)
{
    const hho::ExperimentConfig cfg = a.config.empty() ? config_from_flags(a) : hho::read_config_file(a.config);
    const hho::ConvergenceReport report = hho::run_experiment(cfg, &std::cerr);
    std::cout << hho::report_markdown(cfg, report);
    std::cout << "\nwrote " << cfg.output_dir << "/report.csv\n";
    return 0;
}

int list_presets()
{
    for (const auto& p : hho::builtin_presets()) std::cout << p.id << "\t" << p.description << '\n';
    std::cout << "custom\texact_y and exact_phi given as expressions, lambda required\n";
    return 0;
}

int mesh(const std::string& family, std::size_t cells, std::uint64_t seed, std::size_t lloyd, const std::string& out)
{
    hho::Mesh m;
    if (family == "cartesian") {
        const auto n = std::size_t(std::llround(std::sqrt(double(cells))));
        if (n * n != cells) throw std::invalid_argument("cartesian meshes need a square number of cells");
        m = hho::make_cartesian(n);
    } else if (family == "voronoi") {
        m = hho::make_voronoi(cells, seed, lloyd);
    } else {
        throw std::invalid_argument("unknown mesh family '" + family + "'");
    }
    if (out.empty() || out == "-") std::cout << hho::write_mesh(m);
    else hho::write_mesh_file(m, out);
    std::cerr << m.n_cells() << " cells, " << m.n_faces() << " faces, h = " << m.h() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"HHO discretizations of distributed optimal control problems"};
    app.require_subcommand(1);

    RunArgs ra;
    auto* run_cmd = app.add_subcommand("run", "run a convergence study");
    auto* cfg_opt = run_cmd->add_option("--config", ra.config, "configuration file")->check(CLI::ExistingFile);
    auto* scheme_opt = run_cmd->add_option("--scheme", ra.scheme, "uc1, uc2, uc31, uc32, wc1 or wc2");
    run_cmd->add_option("--degree", ra.degree, "face degree k");
    run_cmd->add_option("--mesh", ra.mesh, "cartesian or voronoi");
    run_cmd->add_option("--levels", ra.levels, "comma separated resolutions");
    run_cmd->add_option("--preset", ra.preset, "preset id or custom");
    run_cmd->add_option("--exact-y", ra.exact_y, "exact state (custom preset)");
    run_cmd->add_option("--exact-phi", ra.exact_phi, "exact adjoint (custom preset)");
    run_cmd->add_option("--lambda", ra.lambda, "regularization weight");
    run_cmd->add_option("--bounds", ra.bounds, "u_a u_b")->expected(2);
    run_cmd->add_option("--pgd-max-iters", ra.pgd_max_iters);
    run_cmd->add_option("--pgd-tol", ra.pgd_tol);
    run_cmd->add_option("--pgd-theta", ra.pgd_theta);
    run_cmd->add_option("--lloyd-iters", ra.lloyd_iters);
    run_cmd->add_option("--seed", ra.seed, "Voronoi seed");
    run_cmd->add_option("--out", ra.out, "output directory");
    cfg_opt->excludes(scheme_opt);
    run_cmd->callback([&] {
        if (ra.config.empty() && ra.scheme.empty()) throw CLI::ValidationError("run", "either --config or --scheme is required");
    });

    auto* presets_cmd = app.add_subcommand("presets", "list problem presets");

    std::string family = "voronoi", out;
    std::size_t cells = 64, lloyd = 40;
    std::uint64_t seed = 42;
    auto* mesh_cmd = app.add_subcommand("mesh", "write a generated mesh");
    mesh_cmd->add_option("--family", family, "cartesian or voronoi");
    mesh_cmd->add_option("--cells", cells, "number of cells (Voronoi seeds)");
    mesh_cmd->add_option("--seed", seed);
    mesh_cmd->add_option("--lloyd-iters", lloyd);
    mesh_cmd->add_option("--out", out, "output file, - for stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run(ra);
        if (*presets_cmd) return list_presets();
        if (*mesh_cmd) return mesh(family, cells, seed, lloyd, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

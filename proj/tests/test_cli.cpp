#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hho/experiment.hpp"
#include "hho/mesh_io.hpp"

using namespace hho;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto c = line.find(',', start);
        out.push_back(line.substr(start, c - start));
        if (c == std::string::npos) return out;
        start = c + 1;
    }
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("hho-cli-test-" + name);
    fs::remove_all(p);
    return p;
}

std::string config_error(const std::string& text)
{
    try {
        (void)validate_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

struct Process {
    int status;
    std::string out;
};

Process run_tool(const std::string& args)
{
    const std::string cmd = std::string(HHO_CONTROL_EXE) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {status, out};
}

}  // namespace

TEST_CASE("minimal configuration gets defaults")
{
    const ExperimentConfig c = validate_config("scheme = uc1\n");
    CHECK(c.scheme == Scheme::uc1);
    CHECK(c.degree == 0);
    CHECK(c.mesh_family == MeshFamily::cartesian);
    CHECK(c.levels == std::vector<int>{4, 8, 16, 32});
    CHECK(c.preset == "uc1-default");
    CHECK(c.lambda == 1e-2);
    CHECK_FALSE(c.bounds.has_value());
    CHECK(c.pgd.tol == 1e-10);
    CHECK(c.pgd.theta == 0.5);
    CHECK(c.pgd.max_iters == 500);
    CHECK(c.rng_seed == 42);

    const ExperimentConfig u32 = validate_config("# comment\n\nscheme = uc32\n");
    CHECK(u32.degree == 2);
    CHECK(u32.levels == std::vector<int>{4, 8, 16});
    CHECK(u32.preset == "uc32-default");

    const ExperimentConfig u31 = validate_config("scheme = uc31\n");
    CHECK(u31.lambda == 1e-1);

    const ExperimentConfig w2 = validate_config("scheme = wc2\nbounds = -250, -10\n");
    CHECK(w2.degree == 1);
    CHECK(w2.preset == "wc-default");
    REQUIRE(w2.bounds.has_value());
    CHECK(w2.bounds->lower == -250.0);
    CHECK(w2.bounds->upper == -10.0);
}

TEST_CASE("full configuration")
{
    const ExperimentConfig c = validate_config(
        "scheme = wc1\n degree = 0\nmesh = voronoi\nlevels = 2, 3,5\npreset = custom\n"
        "exact_y = sin(pi*x)*sin(pi*y)\nexact_phi = x*(1-x)*y*(1-y)\nlambda = 0.5\nbounds = -1, 1\n"
        "pgd_max_iters = 30\npgd_tol = 1e-8\npgd_theta = 0.75\nlloyd_iters = 3\nrng_seed = 9\noutput_dir = out\n");
    CHECK(c.mesh_family == MeshFamily::voronoi);
    CHECK(c.levels == std::vector<int>{2, 3, 5});
    CHECK(c.preset == "custom");
    CHECK(c.lambda == 0.5);
    CHECK(c.pgd.max_iters == 30);
    CHECK(c.pgd.tol == 1e-8);
    CHECK(c.pgd.theta == 0.75);
    CHECK(c.lloyd_iters == 3);
    CHECK(c.rng_seed == 9);
    CHECK(c.output_dir == "out");
}

TEST_CASE("configuration errors")
{
    CHECK(config_error("scheme = wc1\n") == "bounds required for constrained schemes");
    CHECK(config_error("scheme = uc31\ndegree = 2\n").find("uc31 requires degree k in {0, 1}") != std::string::npos);
    CHECK(config_error("scheme = uc32\ndegree = 1\n").find("k >= 2") != std::string::npos);
    CHECK(config_error("scheme = wc1\ndegree = 1\nbounds = 0, 1\n").find("wc1") != std::string::npos);
    CHECK(config_error("scheme = wc2\ndegree = 2\nbounds = 0, 1\n").find("wc2") != std::string::npos);
    CHECK(config_error("scheme = uc1\nbounds = 0, 1\n").find("bounds") != std::string::npos);
    CHECK(config_error("scheme = wc1\nbounds = 1, 0\n").find("u_a < u_b") != std::string::npos);
    CHECK(config_error("scheme = wc1\nbounds = 1\n").find("two values") != std::string::npos);
    CHECK(config_error("scheme = uc5\n").find("unknown scheme") != std::string::npos);
    CHECK(config_error("degree = 1\n") == "missing required field 'scheme'");
    CHECK(config_error("scheme = uc1\n\nsolver = lu\n") == "line 3: unknown field 'solver'");
    CHECK(config_error("scheme = uc1\nlambda = 1\nlambda = 2\n") == "line 3: duplicate key 'lambda'");
    CHECK(config_error("scheme = uc1\njunk\n") == "line 2: expected 'key = value'");
    CHECK(config_error("scheme = uc1\nlambda = 1e-2x\n").find("invalid value") != std::string::npos);
    CHECK(config_error("scheme = uc1\nlambda = -1\n").find("lambda") != std::string::npos);
    CHECK(config_error("scheme = uc1\nlevels = 8, 4\n").find("increasing") != std::string::npos);
    CHECK(config_error("scheme = uc1\nlevels = 0, 4\n").find("positive") != std::string::npos);
    CHECK(config_error("scheme = uc1\nmesh = hex\n").find("mesh family") != std::string::npos);
    CHECK(config_error("scheme = uc1\npreset = nope\n").find("nope") != std::string::npos);
    CHECK(config_error("scheme = uc1\npreset = custom\nexact_y = x\nexact_phi = y\n").find("lambda") != std::string::npos);
    CHECK(config_error("scheme = uc1\nexact_y = x\nlambda = 1\n").find("exact_phi") != std::string::npos);
    CHECK(config_error("scheme = uc1\nexact_y = x +\nexact_phi = y\nlambda = 1\n").find("invalid expression") !=
          std::string::npos);
    CHECK(config_error("scheme = wc1\nbounds = 0, 1\npgd_theta = 1.5\n").find("theta") != std::string::npos);
    CHECK(config_error("scheme = wc1\nbounds = 0, 1\npgd_max_iters = 0\n").find("max_iters") != std::string::npos);
    CHECK_THROWS_AS(read_config_file("/nonexistent/hho.cfg"), ConfigError);
}

TEST_CASE("expressions")
{
    const Expression e = Expression::parse("x^2*y + sin(pi*x) - exp(x2)/2");
    const double x = 0.3, y = 0.7;
    CHECK(e.eval(x, y) == doctest::Approx(x * x * y + std::sin(M_PI * x) - std::exp(y) / 2).epsilon(1e-15));
    CHECK(e.derivative(0).eval(x, y) == doctest::Approx(2 * x * y + M_PI * std::cos(M_PI * x)).epsilon(1e-14));
    CHECK(e.derivative(1).eval(x, y) == doctest::Approx(x * x - std::exp(y) / 2).epsilon(1e-14));
    CHECK(e.laplacian().eval(x, y) ==
          doctest::Approx(2 * y - M_PI * M_PI * std::sin(M_PI * x) - std::exp(y) / 2).epsilon(1e-14));
    CHECK(Expression::parse("x1 * 2").eval(1.5, 0.0) == 3.0);
    CHECK(Expression::parse("-(-x)").eval(2.0, 0.0) == 2.0);
    CHECK(Expression::parse("2^3").eval(0.0, 0.0) == 8.0);
    CHECK(Expression::parse(" 4 ").is_constant());
    CHECK(Expression::parse("cos(y)").derivative(0).is_constant());
    try {
        (void)Expression::parse("x + * y");
        FAIL("expected ExpressionError");
    } catch (const ExpressionError& err) {
        CHECK(err.position() == 4);
    }
    CHECK_THROWS_AS(Expression::parse("tan(x)"), ExpressionError);
    CHECK_THROWS_AS(Expression::parse("(x"), ExpressionError);
    CHECK_THROWS_AS(Expression::parse("x y"), ExpressionError);
    CHECK_THROWS_AS(Expression::parse(""), ExpressionError);
    // round trip through str()
    CHECK(Expression::parse(e.str()).eval(x, y) == doctest::Approx(e.eval(x, y)).epsilon(1e-14));
}

TEST_CASE("format_real")
{
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(1.0 / 3.0) == "0.3333333333333333");
    CHECK(format_real(-2.5e-12) == "-2.5e-12");
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(NAN) == "");
    CHECK(format_real(INFINITY) == "inf");
}

TEST_CASE("report files")
{
    const fs::path dir = scratch("report");
    ExperimentConfig cfg = validate_config("scheme = uc1\nlevels = 2, 4, 8\noutput_dir = " + dir.string() + "\n");
    const ConvergenceReport r = run_experiment(cfg);
    REQUIRE(r.records.size() == 3);

    const auto csv = lines(slurp(dir / "report.csv"));
    REQUIRE(csv.size() == 4);
    CHECK(csv[0] == report_csv_header);
    CHECK(csv[0] == "level,h,n_cells,err_u_l2,rate_u,err_y_energy,rate_y,err_phi_energy,rate_phi,err_y_l2_recon,"
                    "rate_y_recon,err_phi_l2_recon,rate_phi_recon,iters");
    for (std::size_t i = 1; i < csv.size(); ++i) {
        const auto f = fields(csv[i]);
        REQUIRE(f.size() == 14);
        CHECK(f[0] == std::to_string(i - 1));
        CHECK(std::stod(f[1]) == doctest::Approx(std::sqrt(2.0) / (1 << i)));
        CHECK(f[2] == std::to_string(1 << (2 * i)));
        for (int q = 0; q < 5; ++q) {
            CHECK_FALSE(f[std::size_t(3 + 2 * q)].empty());
            CHECK(f[std::size_t(4 + 2 * q)].empty() == (i == 1));
        }
        CHECK(f[13].empty());
    }
    for (const char* name : {"report.md", "plotdata.tsv", "plot_u.tsv", "plot_y.tsv", "plot_phi.tsv",
                             "plot_y_recon.tsv", "plot_phi_recon.tsv"})
        CHECK(fs::exists(dir / name));
    const auto plot = lines(slurp(dir / "plot_u.tsv"));
    REQUIRE(plot.size() == 4);
    CHECK(plot[0] == "h\tu");
    CHECK(plot[1] == format_real(r.records[0].h) + "\t" + format_real(r.records[0].err_u_l2));
    CHECK(slurp(dir / "report.md").find("| level | h | cells |") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("constrained reports carry iteration counts")
{
    const ExperimentConfig cfg = validate_config("scheme = wc1\nbounds = -250, -10\nlevels = 2, 4\n");
    const std::string csv = report_csv(run_study(cfg));
    for (std::size_t i = 1; i < 3; ++i) {
        const auto f = fields(lines(csv)[i]);
        REQUIRE(f.size() == 14);
        CHECK(std::stoi(f[13]) > 0);
    }
}

TEST_CASE("identical configurations give identical bytes")
{
    const std::string base = "scheme = uc2\ndegree = 1\nmesh = voronoi\nlevels = 3, 5\nrng_seed = 5\noutput_dir = ";
    const fs::path a = scratch("det-a"), b = scratch("det-b");
    run_experiment(validate_config(base + a.string() + "\n"));
    run_experiment(validate_config(base + b.string() + "\n"));
    CHECK(slurp(a / "report.csv") == slurp(b / "report.csv"));
    CHECK(slurp(a / "plotdata.tsv") == slurp(b / "plotdata.tsv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("failed runs leave a partial report")
{
    const fs::path dir = scratch("partial");
    const ExperimentConfig cfg = validate_config("scheme = wc1\nbounds = -250, -10\nlevels = 2, 4\npgd_max_iters = 1\n"
                                                 "output_dir = " + dir.string() + "\n");
    CHECK_THROWS_AS(run_experiment(cfg), IterationError);
    const auto csv = lines(slurp(dir / "report.csv"));
    REQUIRE(csv.size() == 2);
    CHECK(csv[0] == report_csv_header);
    CHECK(csv[1] == "# INCOMPLETE");
    fs::remove_all(dir);
}

TEST_CASE("command line tool")
{
    const Process presets = run_tool("presets");
    CHECK(presets.status == 0);
    for (const char* id : {"uc1-default", "uc31-default", "uc32-default", "wc-default", "custom"})
        CHECK(presets.out.find(id) != std::string::npos);

    const Process mesh = run_tool("mesh --family cartesian --cells 16 --out -");
    CHECK(mesh.status == 0);
    const Mesh m = read_mesh(mesh.out);
    CHECK(m.n_cells() == 16);

    const Process v1 = run_tool("mesh --family voronoi --cells 20 --seed 3");
    const Process v2 = run_tool("mesh --family voronoi --cells 20 --seed 3");
    CHECK(v1.status == 0);
    CHECK(v1.out == v2.out);
    CHECK(read_mesh(v1.out).measure() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(run_tool("mesh --family cartesian --cells 15").status != 0);
    CHECK(run_tool("run --scheme wc1").status != 0);
    CHECK(run_tool("run").status != 0);
    CHECK(run_tool("bogus").status != 0);

    const fs::path dir = scratch("tool");
    const Process run = run_tool("run --scheme uc1 --degree 1 --mesh cartesian --levels 2,4 --preset uc1-default --out " +
                                 dir.string());
    CHECK(run.status == 0);
    CHECK(run.out.find("# Convergence study") != std::string::npos);
    CHECK(lines(slurp(dir / "report.csv")).size() == 3);

    const fs::path cfgfile = dir / "study.cfg";
    std::ofstream(cfgfile) << "scheme = uc1\ndegree = 1\nlevels = 2, 4\noutput_dir = " << (dir / "again").string() << "\n";
    CHECK(run_tool("run --config " + cfgfile.string()).status == 0);
    CHECK(slurp(dir / "report.csv") == slurp(dir / "again" / "report.csv"));
    fs::remove_all(dir);
}

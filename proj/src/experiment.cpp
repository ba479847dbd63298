#include "hho/experiment.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hho/mesh_generators.hpp"

namespace hho {

const char* const report_csv_header =
    "level,h,n_cells,err_u_l2,rate_u,err_y_energy,rate_y,err_phi_energy,rate_phi,err_y_l2_recon,rate_y_recon,"
    "err_phi_l2_recon,rate_phi_recon,iters";

std::string to_string(MeshFamily f) { return f == MeshFamily::cartesian ? "cartesian" : "voronoi"; }

MeshFamily parse_mesh_family(const std::string& name)
{
    if (name == "cartesian") return MeshFamily::cartesian;
    if (name == "voronoi") return MeshFamily::voronoi;
    throw ConfigError("unknown mesh family '" + name + "' (expected cartesian or voronoi)");
}

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        out.push_back(trim(std::string_view(s).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& s)
{
    T v{};
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty())
        throw ConfigError("invalid value '" + s + "' for " + key);
    return v;
}

int default_degree(Scheme s)
{
    switch (s) {
    case Scheme::uc32: return 2;
    case Scheme::wc2: return 1;
    default: return 0;
    }
}

std::string default_preset(Scheme s)
{
    switch (s) {
    case Scheme::uc31: return "uc31-default";
    case Scheme::uc32: return "uc32-default";
    case Scheme::wc1:
    case Scheme::wc2: return "wc-default";
    default: return "uc1-default";
    }
}

bool is_constrained(Scheme s) { return s == Scheme::wc1 || s == Scheme::wc2; }

}  // namespace

void ExperimentConfig::validate() const
{
    switch (scheme) {
    case Scheme::uc1:
    case Scheme::uc2:
        if (degree < 0) throw ConfigError("degree must be non-negative");
        break;
    case Scheme::uc31:
        if (degree != 0 && degree != 1) throw ConfigError("scheme uc31 requires degree k in {0, 1}");
        break;
    case Scheme::uc32:
        if (degree < 2) throw ConfigError("scheme uc32 requires degree k >= 2");
        break;
    case Scheme::wc1:
        if (degree != 0) throw ConfigError("scheme wc1 requires degree k = 0");
        break;
    case Scheme::wc2:
        if (degree != 1) throw ConfigError("scheme wc2 requires degree k = 1 (cell degree 2, face degree 1)");
        break;
    }
    if (is_constrained(scheme) && !bounds) throw ConfigError("bounds required for constrained schemes");
    if (!is_constrained(scheme) && bounds) throw ConfigError("bounds are only valid for constrained schemes");
    if (bounds && !(bounds->lower < bounds->upper)) throw ConfigError("bounds require u_a < u_b");
    if (levels.empty()) throw ConfigError("at least one level is required");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1) throw ConfigError("levels must be positive");
        if (i > 0 && levels[i] <= levels[i - 1]) throw ConfigError("levels must be strictly increasing");
    }
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (preset == "custom" && (exact_y.empty() || exact_phi.empty()))
        throw ConfigError("preset custom requires exact_y and exact_phi");
    if (preset != "custom" && (!exact_y.empty() || !exact_phi.empty()))
        throw ConfigError("exact_y and exact_phi require preset = custom");
    try {
        pgd.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

ExperimentConfig with_defaults(ExperimentConfig cfg, bool degree_given, bool levels_given, bool preset_given,
                               bool lambda_given)
{
    if (!degree_given) cfg.degree = default_degree(cfg.scheme);
    if (!levels_given) cfg.levels = cfg.degree >= 2 ? std::vector<int>{4, 8, 16} : std::vector<int>{4, 8, 16, 32};
    if (!preset_given) cfg.preset = (cfg.exact_y.empty() && cfg.exact_phi.empty()) ? default_preset(cfg.scheme) : "custom";
    if (!lambda_given) {
        if (cfg.preset == "custom") throw ConfigError("preset custom requires lambda");
        try {
            cfg.lambda = find_preset(cfg.preset).lambda;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (cfg.preset != "custom") {
        try {
            (void)find_preset(cfg.preset);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig validate_config(std::string_view text)
{
    std::map<std::string, std::pair<std::string, std::size_t>> entries;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string line = trim(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
        ++lineno;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!entries.emplace(key, std::make_pair(value, lineno)).second)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    static const char* const known[] = {"scheme",    "degree", "mesh",   "levels",        "preset",
                                        "exact_y",   "exact_phi", "lambda", "bounds",     "pgd_max_iters",
                                        "pgd_tol",   "pgd_theta", "lloyd_iters", "rng_seed", "output_dir"};
    for (const auto& [key, v] : entries) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("line " + std::to_string(v.second) + ": unknown field '" + key + "'");
    }

    auto get = [&](const char* key) -> const std::string* {
        auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second.first;
    };

    ExperimentConfig cfg;
    const std::string* scheme = get("scheme");
    if (!scheme) throw ConfigError("missing required field 'scheme'");
    try {
        cfg.scheme = parse_scheme(*scheme);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (auto v = get("degree")) cfg.degree = parse_number<int>("degree", *v);
    if (auto v = get("mesh")) cfg.mesh_family = parse_mesh_family(*v);
    if (auto v = get("levels"))
        for (const auto& item : split_list(*v)) cfg.levels.push_back(parse_number<int>("levels", item));
    if (auto v = get("preset")) cfg.preset = *v;
    if (auto v = get("exact_y")) cfg.exact_y = *v;
    if (auto v = get("exact_phi")) cfg.exact_phi = *v;
    if (auto v = get("lambda")) cfg.lambda = parse_number<double>("lambda", *v);
    if (auto v = get("bounds")) {
        const auto items = split_list(*v);
        if (items.size() != 2) throw ConfigError("bounds expects two values 'u_a, u_b'");
        cfg.bounds = AdmissibleBox{parse_number<double>("bounds", items[0]), parse_number<double>("bounds", items[1])};
    }
    if (auto v = get("pgd_max_iters")) cfg.pgd.max_iters = parse_number<int>("pgd_max_iters", *v);
    if (auto v = get("pgd_tol")) cfg.pgd.tol = parse_number<double>("pgd_tol", *v);
    if (auto v = get("pgd_theta")) cfg.pgd.theta = parse_number<double>("pgd_theta", *v);
    if (auto v = get("lloyd_iters")) cfg.lloyd_iters = parse_number<std::size_t>("lloyd_iters", *v);
    if (auto v = get("rng_seed")) cfg.rng_seed = parse_number<std::uint64_t>("rng_seed", *v);
    if (auto v = get("output_dir")) cfg.output_dir = *v;

    if (!cfg.exact_y.empty() && !cfg.exact_phi.empty()) {
        try {
            (void)Expression::parse(cfg.exact_y);
            (void)Expression::parse(cfg.exact_phi);
        } catch (const ExpressionError& e) {
            throw ConfigError(std::string("invalid expression: ") + e.what());
        }
    }
    return with_defaults(std::move(cfg), get("degree"), get("levels"), get("preset"), get("lambda"));
}

ExperimentConfig read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return validate_config(ss.str());
}

Mesh build_mesh(const ExperimentConfig& cfg, int level)
{
    if (cfg.mesh_family == MeshFamily::cartesian) return make_cartesian(std::size_t(level));
    VoronoiOptions opt;
    opt.n_seeds = std::size_t(level) * std::size_t(level);
    opt.rng_seed = cfg.rng_seed;
    opt.lloyd_iters = cfg.lloyd_iters;
    return make_voronoi(opt);
}

Preset config_preset(const ExperimentConfig& cfg)
{
    if (cfg.preset == "custom") return custom_preset(cfg.exact_y, cfg.exact_phi, cfg.lambda);
    return find_preset(cfg.preset);
}

ControlProblem config_problem(const ExperimentConfig& cfg)
{
    return make_problem(config_preset(cfg), cfg.lambda, cfg.bounds);
}

ErrorRecord run_level(const ExperimentConfig& cfg, const ControlProblem& prob, std::size_t index)
{
    const Mesh mesh = build_mesh(cfg, cfg.levels.at(index));
    const int k = cfg.degree;
    const int l = (cfg.scheme == Scheme::uc32 || cfg.scheme == Scheme::wc2) ? k + 1 : k;
    const HhoSpace space(mesh, l, k, true);
    const Discretization disc(space);

    ErrorRecord r;
    r.level = int(index);
    r.h = mesh.h();
    r.n_cells = mesh.n_cells();

    auto state_errors = [&](const HhoVector& y, const HhoVector& phi) {
        r.err_y_energy = energy_error(y, prob.exact_y);
        r.err_phi_energy = energy_error(phi, prob.exact_phi);
        r.err_y_l2_recon = l2_error_reconstruction(disc, y, prob.exact_y);
        r.err_phi_l2_recon = l2_error_reconstruction(disc, phi, prob.exact_phi);
    };

    switch (cfg.scheme) {
    case Scheme::uc1:
    case Scheme::uc2:
    case Scheme::uc31:
    case Scheme::uc32: {
        const OptimalitySolution s = cfg.scheme == Scheme::uc1    ? solve_uc1(disc, prob)
                                     : cfg.scheme == Scheme::uc2  ? solve_uc2(disc, prob)
                                     : cfg.scheme == Scheme::uc31 ? solve_uc31(disc, prob)
                                                                  : solve_uc32(disc, prob);
        r.err_u_l2 = l2_error_control(s, prob.exact_u);
        state_errors(s.y, s.phi);
        break;
    }
    case Scheme::wc1:
    case Scheme::wc2: {
        const ConstrainedSolution s =
            cfg.scheme == Scheme::wc1 ? solve_wc1(disc, prob, cfg.pgd) : solve_wc2(disc, prob, cfg.pgd);
        r.err_u_l2 = l2_error_control(s, prob);
        state_errors(s.y, s.phi);
        r.iters = s.iterations;
        break;
    }
    }
    return r;
}

namespace {

ConvergenceReport run_levels(const ExperimentConfig& cfg, std::ostream* log,
                             const std::function<void(const ConvergenceReport&)>& after_level)
{
    cfg.validate();
    const ControlProblem prob = config_problem(cfg);
    ConvergenceReport report;
    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
        report.records.push_back(run_level(cfg, prob, i));
        if (log) {
            const auto& r = report.records.back();
            *log << "level " << i << ": n = " << cfg.levels[i] << ", cells = " << r.n_cells
                 << ", h = " << format_real(r.h) << ", err_u = " << format_real(r.err_u_l2) << '\n';
        }
        if (after_level) after_level(report);
    }
    return report;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

}  // namespace

ConvergenceReport run_study(const ExperimentConfig& cfg, std::ostream* log) { return run_levels(cfg, log, {}); }

ConvergenceReport run_experiment(const ExperimentConfig& cfg, std::ostream* log)
{
    cfg.validate();
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    ConvergenceReport partial;
    try {
        ConvergenceReport report = run_levels(cfg, log, [&](const ConvergenceReport& r) {
            partial = r;
            write_file(dir / "report.csv", report_csv(r));
        });
        write_file(dir / "report.csv", report_csv(report));
        write_file(dir / "report.md", report_markdown(cfg, report));
        write_file(dir / "plotdata.tsv", plot_data(report));
        for (Quantity q : all_quantities)
            write_file(dir / (std::string("plot_") + quantity_name(q) + ".tsv"), plot_data(report, q));
        return report;
    } catch (...) {
        write_file(dir / "report.csv", report_csv(partial) + "# INCOMPLETE\n");
        throw;
    }
}

std::string format_real(double v)
{
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 16);
    (void)ec;
    return std::string(buf, end);
}

std::string report_csv(const ConvergenceReport& report)
{
    std::string out = std::string(report_csv_header) + "\n";
    std::array<std::vector<double>, 5> rates;
    for (std::size_t i = 0; i < all_quantities.size(); ++i) rates[i] = report.rates(all_quantities[i]);
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        const ErrorRecord& r = report.records[i];
        out += std::to_string(r.level) + ',' + format_real(r.h) + ',' + std::to_string(r.n_cells);
        for (std::size_t q = 0; q < all_quantities.size(); ++q) {
            out += ',' + format_real(error_of(r, all_quantities[q]));
            out += ',' + (i == 0 ? std::string() : format_real(rates[q][i - 1]));
        }
        out += ',' + (r.iters ? std::to_string(*r.iters) : std::string());
        out += '\n';
    }
    return out;
}

std::string report_markdown(const ExperimentConfig& cfg, const ConvergenceReport& report)
{
    std::ostringstream out;
    out << "# Convergence study\n\n";
    out << "- scheme: " << to_string(cfg.scheme) << "\n- degree: " << cfg.degree << "\n- mesh: "
        << to_string(cfg.mesh_family) << "\n- preset: " << cfg.preset << "\n- lambda: " << format_real(cfg.lambda)
        << '\n';
    if (cfg.bounds)
        out << "- bounds: [" << format_real(cfg.bounds->lower) << ", " << format_real(cfg.bounds->upper) << "]\n";
    out << "\n| level | h | cells |";
    for (Quantity q : all_quantities) out << " err " << quantity_name(q) << " | rate |";
    out << " iters |\n|---|---|---|";
    for (std::size_t i = 0; i < all_quantities.size(); ++i) out << "---|---|";
    out << "---|\n";
    std::array<std::vector<double>, 5> rates;
    for (std::size_t i = 0; i < all_quantities.size(); ++i) rates[i] = report.rates(all_quantities[i]);
    for (std::size_t i = 0; i < report.records.size(); ++i) {
        const ErrorRecord& r = report.records[i];
        char h[32], e[32];
        std::snprintf(h, sizeof h, "%.4e", r.h);
        out << "| " << r.level << " | " << h << " | " << r.n_cells << " |";
        for (std::size_t q = 0; q < all_quantities.size(); ++q) {
            const double err = error_of(r, all_quantities[q]);
            if (std::isnan(err)) out << " | |";
            else {
                std::snprintf(e, sizeof e, "%.4e", err);
                out << ' ' << e << " |";
                if (i == 0 || std::isnan(rates[q][i - 1])) out << " |";
                else {
                    std::snprintf(e, sizeof e, "%.2f", rates[q][i - 1]);
                    out << ' ' << e << " |";
                }
            }
        }
        out << ' ' << (r.iters ? std::to_string(*r.iters) : std::string()) << " |\n";
    }
    return out.str();
}

std::string plot_data(const ConvergenceReport& report, Quantity q)
{
    std::string out = std::string("h\t") + quantity_name(q) + "\n";
    for (const auto& r : report.records) {
        const double e = error_of(r, q);
        if (std::isnan(e)) continue;
        out += format_real(r.h) + '\t' + format_real(e) + '\n';
    }
    return out;
}

std::string plot_data(const ConvergenceReport& report)
{
    std::string out = "h";
    for (Quantity q : all_quantities) out += std::string("\t") + quantity_name(q);
    out += '\n';
    for (const auto& r : report.records) {
        out += format_real(r.h);
        for (Quantity q : all_quantities) out += '\t' + format_real(error_of(r, q));
        out += '\n';
    }
    return out;
}

}  // namespace hho

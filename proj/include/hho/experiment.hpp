// Convergence studies: configuration, per-level solves and report files.
//
// Configuration documents hold one `key = value` per line; `#` starts a
// comment line and lists are comma separated. Keys:
//
//   scheme        uc1 | uc2 | uc31 | uc32 | wc1 | wc2        (required)
//   degree        face degree k
//   mesh          cartesian | voronoi
//   levels        resolutions n: n x n squares, or n^2 Voronoi seeds
//   preset        preset id, or `custom` with exact_y and exact_phi
//   exact_y, exact_phi   closed-form expressions in x, y
//   lambda        regularization weight (defaults to the preset's)
//   bounds        u_a, u_b (constrained schemes only, then required)
//   pgd_max_iters, pgd_tol, pgd_theta
//   lloyd_iters   Voronoi relaxation steps
//   rng_seed      Voronoi seed
//   output_dir    directory for report.csv, report.md and plot data

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hho/errors.hpp"
#include "hho/presets.hpp"

namespace hho {

enum class MeshFamily { cartesian, voronoi };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    Scheme scheme = Scheme::uc1;
    int degree = 0;
    MeshFamily mesh_family = MeshFamily::cartesian;
    std::vector<int> levels;
    std::string preset = "uc1-default";
    std::string exact_y;  // custom preset only
    std::string exact_phi;
    double lambda = 1e-2;
    std::optional<AdmissibleBox> bounds;
    PgdConfig pgd;
    std::size_t lloyd_iters = 40;
    std::uint64_t rng_seed = 42;
    std::string output_dir = "hho-results";

    /// Enforces the scheme/degree rules and the bounds requirement.
    void validate() const;
};

/// Parses and validates a configuration document, filling defaults.
ExperimentConfig validate_config(std::string_view text);
ExperimentConfig read_config_file(const std::string& path);

/// Fills defaults that depend on the scheme (degree, levels, preset, lambda).
ExperimentConfig with_defaults(ExperimentConfig cfg, bool degree_given, bool levels_given, bool preset_given,
                               bool lambda_given);

std::string to_string(MeshFamily f);
MeshFamily parse_mesh_family(const std::string& name);

Mesh build_mesh(const ExperimentConfig& cfg, int level);
Preset config_preset(const ExperimentConfig& cfg);
ControlProblem config_problem(const ExperimentConfig& cfg);

/// Solves one level and evaluates all error quantities.
ErrorRecord run_level(const ExperimentConfig& cfg, const ControlProblem& prob, std::size_t index);

/// All levels, without writing files. Progress lines go to `log` when given.
ConvergenceReport run_study(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// run_study plus report.csv, report.md, plotdata.tsv and one plot_<quantity>.tsv
/// per quantity in cfg.output_dir. On failure the rows computed so far are
/// kept, followed by a `# INCOMPLETE` line, and the error is rethrown.
ConvergenceReport run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// Report serializers (16 significant digits, no locale).
std::string format_real(double v);
std::string report_csv(const ConvergenceReport& report);
std::string report_markdown(const ExperimentConfig& cfg, const ConvergenceReport& report);
std::string plot_data(const ConvergenceReport& report);
std::string plot_data(const ConvergenceReport& report, Quantity q);

extern const char* const report_csv_header;

}  // namespace hho

#pragma once

#include <optional>

#include "roughw/lifts.hpp"
#include "roughw/wentzell.hpp"

namespace roughw::scenarios {

// Driver presets used by the CLI and the test corpus:
//   pwl-circle   piecewise-linear unit circle (weak geometric)
//   pwl-line     piecewise-linear diagonal line (weak geometric)
//   smooth-tt2   quadrature lift of t -> (t, t^2, ...) (weak geometric)
//   pure-area    zero path with constant-rate area
//   brownian     Brownian lift, Ito normalization (alias brownian-ito)
//   brownian-geo the same lift geometrized (weak geometric)
lifts::LiftSpec named_lift_spec(const std::string& name, std::size_t dim, std::size_t n,
                                std::uint64_t seed, double alpha, double horizon = 1.0);
RoughPath named_driver(const std::string& name, std::size_t dim, std::size_t n,
                       std::uint64_t seed, double alpha, double horizon = 1.0);
std::vector<std::string> driver_names();

// A ready-to-verify configuration: coefficient family, evolved field, moving
// state. Scenarios with use_substitution set verify the substitution form with
// the stored (a, b, z0) instead of an explicit state path. The driver handed
// to make_wentzell_scenario must outlive the scenario.
//   h_zero_quadratic  h = 0, g0 = x^2, Z = first driver coordinate; the
//                     expansion telescopes x^2 exactly on any driver
//   h_linear          h(t, x) = x in every direction, g0 = 0, Z = first
//                     coordinate; also exactly telescoping
//   h_sin             h(t, x) = sin(x) * (1, 1/2, ...), g0 = x^2,
//                     Z = sin(first coordinate); genuinely rough terms
//   kz_drift          h_sin's fields with state built from a = (1, ...) and a
//                     constant bracket drift b
struct WentzellScenario {
    std::string name;
    wentzell::FieldFamily fields;
    wentzell::GField g;
    std::optional<ControlledPath> z;
    bool use_substitution = false;
    std::optional<RowControlledPath> a;
    std::vector<Mat> b;
    double z0 = 0.0;
};

WentzellScenario make_wentzell_scenario(const std::string& name, const RoughPath& p);
std::vector<std::string> wentzell_scenario_names();

// Run the scenario's verification on one driver.
wentzell::WentzellReport run_wentzell_scenario(const WentzellScenario& scenario,
                                               const RoughPath& p);

// Stride-restriction ladder of the scenario residual over `levels` meshes of
// the master driver, slope fitted on log2 N with target -(3 alpha - 1).
// Residuals below 1e-12 * scale report as exact (the telescoping scenarios).
struct ScenarioLadder {
    ConvergenceReport ladder;
    std::vector<wentzell::WentzellReport> reports;
};

ScenarioLadder wentzell_scenario_ladder(const std::string& name, const RoughPath& master,
                                        std::size_t levels);

}  // namespace roughw::scenarios

#pragma once

// Named curve families rendered to CSV: speed and density versus the MAC
// probability, end-to-end delay and speed versus distance with and without
// ambient noise, speed versus external interferer intensity for the two field
// geometries, and the grid-stabilized speed versus grid spacing. Grids are
// fixed per name; the base config supplies every other parameter, so the same
// name re-rendered with the same config and seed is byte-identical.

#include <optional>
#include <string>

#include "alohar/config.hpp"

namespace alohar {

enum class FigureName { speed1, varM, varMW, varWM, chlambda, ppl, grw };

// Name <-> string, as accepted by the CLI; parse returns nullopt on unknown.
std::optional<FigureName> parse_figure_name(const std::string& name);
std::string figure_name_string(FigureName name);

// All figure names, CLI help and enumeration order.
const std::vector<FigureName>& all_figure_names();

// Renders one figure to CSV. with_mc adds Monte Carlo companion columns where
// the figure has an estimator (seeded from cfg.seed, so re-runs match).
std::string render_figure(FigureName name, const RunConfig& cfg, bool with_mc);

}  // namespace alohar

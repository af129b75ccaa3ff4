#pragma once

// Flat key=value run configuration shared by the CLI and the library tools,
// plus a small CSV table writer. The text format round-trips exactly:
// parse(render(parse(text))) == parse(text).

#include <cstdint>
#include <string>
#include <vector>

#include "alohar/analytic.hpp"
#include "alohar/mc.hpp"
#include "alohar/model.hpp"

namespace alohar {

enum class RouteKind { poisson, lattice };

// Every tunable of a run. Model parameters mirror the model structs; the rest
// selects quantities of interest (hop length, end-to-end distance), Monte
// Carlo budget and windows, and lattice bookkeeping.
struct RunConfig {
  RouteKind route_kind = RouteKind::poisson;
  double lambda = 0.01;
  double delta = 500.0;
  MacConfig mac;
  ChannelConfig ch;
  InterfererSpec ifs;
  double e2e_m = 1000.0;
  double hop_r = 100.0;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
  bool seed_from_file = false;  // true when the parsed text spelled out mc.seed
  mc::CaptureMode mode = mc::CaptureMode::semi_analytic;
  mc::SimWindow window;
  LatticeTermMode lattice_terms = LatticeTermMode::uniform;
  LatticeSpeedNorm lattice_norm = LatticeSpeedNorm::combined;

  PoissonRouteConfig route() const { return {lambda, mac, ch}; }
  LatticeRouteConfig lattice() const { return {{lambda, mac, ch}, delta}; }

  // seed_from_file is parse provenance, not configuration, so it is excluded:
  // a config that spells out the default seed equals one that omits it.
  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.route_kind == b.route_kind && a.lambda == b.lambda && a.delta == b.delta &&
           a.mac == b.mac && a.ch == b.ch && a.ifs == b.ifs && a.e2e_m == b.e2e_m &&
           a.hop_r == b.hop_r && a.samples == b.samples && a.seed == b.seed &&
           a.mode == b.mode && a.window == b.window && a.lattice_terms == b.lattice_terms &&
           a.lattice_norm == b.lattice_norm;
  }
};

// Parses the text form: one key=value per line, '#' starts a comment, blank
// lines ignored, later assignments win. Unknown keys and malformed values
// throw std::invalid_argument naming the offender.
RunConfig parse_config(const std::string& text);

// Applies one "key=value" assignment in place; same validation as parsing.
void apply_override(RunConfig& cfg, const std::string& assignment);

// Full text form with every key spelled out; doubles are rendered losslessly.
std::string render_config(const RunConfig& cfg);

// Lossless double formatting used across config and CSV output; infinities
// render as "inf"/"-inf".
std::string format_double(double v);

// Strict double parsing that accepts the same spellings format_double emits.
double parse_double(const std::string& text);

// Spelling used by the config format and CSV output for an interferer kind.
const char* interferer_kind_string(InterfererKind kind);

// Rows of preformatted cells under '#'-prefixed comment lines and one header
// row. render() emits comments, the comma-joined header, then the rows.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string render() const;
};

}  // namespace alohar

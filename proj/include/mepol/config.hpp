#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mepol/field_assembly.hpp"
#include "mepol/medium.hpp"
#include "mepol/spectral_grid.hpp"

namespace mepol {

// config.hpp — run configuration: parse, validate, echo.
//
// The configuration is JSON with nested sections.  Parsing fills every
// default explicitly, rejects unknown keys, and validates physical
// parameters with path-qualified messages; the echoed form re-parses to an
// identical configuration.

struct CellsCfg {
  bool all = false;
  int axis = 0;
  int from = 0;  // half-open cell range [from, to) along axis
  int to = 0;
};

struct RegionCfg {
  std::string name;
  CellsCfg cells;
  std::vector<Band> bands;
  bool hermitian_from_quadrature = false;
};

struct CheckTolerances {
  double kk = 1e-3;
  double onsager = 1e-10;
  double time_reversal = 1e-10;
  double causality = 1e-3;
  double passivity = 1e-12;     // margin may not drop below -passivity
  double cross_bound = 1e-10;
};

struct ValidateCfg {
  std::vector<std::string> checks = {"kk",        "onsager",    "time_reversal",
                                     "causality", "passivity",  "cross_bound"};
  CheckTolerances tolerances;
};

struct FactorizeCfg {
  OmegaGrid omega{GridKind::log_spaced, 1e-2, 1e2, 64};
  double rank_tolerance = 1e-10;
  int region = 0;
};

struct ModesCfg {
  std::vector<double> omega_values = {1.0};
  double beta_tolerance = 1e-12;
  double residual_tolerance = 1e-8;
};

struct SumruleCfg {
  Vector3r k{0.0, 0.0, 1.0};
  std::vector<std::pair<int, int>> pairs = {{0, 1}};
  OmegaGrid omega{GridKind::log_spaced, 1e-2, 1e2, 512};
  std::vector<int> refine = {1, 2, 4};
  double tolerance_frac = 0.02;  // of hbar c |k|
  int region = 0;
};

struct SpectraCfg {
  std::vector<double> omega_values = {1.0};
};

struct PacketCfg {
  int axis = 0;
  int m_center = 5;
  double m_sigma = 1.5;
  Vector3r pol{0.0, 1.0, 0.0};
  double amplitude = 1.0;
};

struct SynthCfg {
  PacketCfg packet;
  OmegaGrid bins{GridKind::linear, 0.02, 4.0, 500};
  double t_max = 160.0;
  double dt = 0.05;
  int enclosure_from = -1;  // cell range around the lossy region; -1 = auto
  int enclosure_to = -1;
  double balance_tolerance = 0.02;
  bool write_trace = true;
  int trace_stride = 20;
};

struct RunConfig {
  UnitSystem units;
  GridSpec grid_spec{{1.0, 1.0, 1.0}, {1, 1, 1}};
  OmegaGrid omega;  // working/quadrature grid
  std::vector<RegionCfg> regions;
  Corruption corruption = Corruption::none;
  ValidateCfg validate;
  FactorizeCfg factorize;
  ModesCfg modes;
  SumruleCfg sumrule;
  SpectraCfg spectra;
  SynthCfg synth;
  std::uint64_t seed = 20240811;
  int workers = 1;
  double tolerance_scale = 1.0;

  MediumModel build_model() const;
  SpectralGrid build_grid() const;
  MediumMap build_map() const;  // throws on uncovered or doubly covered cells

  nlohmann::json echo() const;  // fully-defaulted canonical form
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace mepol

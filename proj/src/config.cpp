#include "mepol/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mepol/errors.hpp"

namespace mepol {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail_input("config: " + path + ": " + what);
}

void expect_keys(const json& j, const std::string& path,
                 const std::set<std::string>& known) {
  if (!j.is_object()) bad(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) bad(path + "." + it.key(), "unknown key");
  }
}

double get_num(const json& j, const std::string& path, const char* key,
               double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) bad(path + "." + key, "expected a number");
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const char* key,
            int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) bad(path + "." + key, "expected an integer");
  return j[key].get<int>();
}

bool get_bool(const json& j, const std::string& path, const char* key,
              bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) bad(path + "." + key, "expected a boolean");
  return j[key].get<bool>();
}

std::string get_str(const json& j, const std::string& path, const char* key,
                    const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) bad(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

OmegaGrid parse_omega(const json& j, const std::string& path,
                      const OmegaGrid& fallback) {
  if (j.is_null()) return fallback;
  expect_keys(j, path, {"kind", "min", "max", "count"});
  OmegaGrid g = fallback;
  const std::string kind = get_str(j, path, "kind",
                                   fallback.kind == GridKind::log_spaced
                                       ? "log"
                                       : "linear");
  if (kind == "log") {
    g.kind = GridKind::log_spaced;
  } else if (kind == "linear") {
    g.kind = GridKind::linear;
  } else {
    bad(path + ".kind", "must be \"log\" or \"linear\"");
  }
  g.omega_min = get_num(j, path, "min", fallback.omega_min);
  g.omega_max = get_num(j, path, "max", fallback.omega_max);
  g.count = get_int(j, path, "count", fallback.count);
  if (!(g.omega_min > 0.0) || !(g.omega_max > g.omega_min)) {
    bad(path, "requires 0 < min < max");
  }
  if (g.count < 3) bad(path + ".count", "must be >= 3");
  return g;
}

Vector3r parse_vec3(const json& j, const std::string& path,
                    const Vector3r& fallback) {
  if (j.is_null()) return fallback;
  if (!j.is_array() || j.size() != 3) bad(path, "expected an array of 3");
  Vector3r v;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<size_t>(i)].is_number()) bad(path, "expected numbers");
    v(i) = j[static_cast<size_t>(i)].get<double>();
  }
  return v;
}

Band parse_band(const json& j, const std::string& path) {
  expect_keys(j, path,
              {"kind", "strength_e", "strength_m", "omega0", "gamma", "sign",
               "orientation"});
  Band b;
  const std::string kind = get_str(j, path, "kind", "electric");
  if (kind == "electric") {
    b.kind = BandKind::electric;
  } else if (kind == "magnetic") {
    b.kind = BandKind::magnetic;
  } else if (kind == "cross") {
    b.kind = BandKind::cross;
  } else {
    bad(path + ".kind", "must be electric, magnetic or cross");
  }
  b.strength_e = get_num(j, path, "strength_e", 0.0);
  b.strength_m = get_num(j, path, "strength_m", 0.0);
  b.omega0 = get_num(j, path, "omega0", 1.0);
  b.gamma = get_num(j, path, "gamma", 0.1);
  b.sign = get_int(j, path, "sign", 1);
  if (b.strength_e < 0.0) bad(path + ".strength_e", "must be >= 0");
  if (b.strength_m < 0.0) bad(path + ".strength_m", "must be >= 0");
  if (b.gamma <= 0.0) {
    bad(path + ".gamma",
        "must be > 0 (a dissipationless band breaks the dispersion checks)");
  }
  if (b.omega0 <= 0.0) bad(path + ".omega0", "must be > 0");
  if (b.sign != 1 && b.sign != -1) bad(path + ".sign", "must be +1 or -1");
  if (j.contains("orientation") && !j["orientation"].is_null()) {
    const json& o = j["orientation"];
    if (!o.is_array() || o.size() != 3) {
      bad(path + ".orientation", "expected a 3x3 array");
    }
    for (int r = 0; r < 3; ++r) {
      const json& row = o[static_cast<size_t>(r)];
      if (!row.is_array() || row.size() != 3) {
        bad(path + ".orientation", "expected a 3x3 array");
      }
      for (int c = 0; c < 3; ++c) {
        if (!row[static_cast<size_t>(c)].is_number()) {
          bad(path + ".orientation", "expected numbers");
        }
        b.orientation(r, c) = row[static_cast<size_t>(c)].get<double>();
      }
    }
  }
  try {
    b.validate();
  } catch (const Error& e) {
    bad(path, e.what());
  }
  return b;
}

json band_to_json(const Band& b) {
  json j;
  j["kind"] = b.kind == BandKind::electric
                  ? "electric"
                  : (b.kind == BandKind::magnetic ? "magnetic" : "cross");
  j["strength_e"] = b.strength_e;
  j["strength_m"] = b.strength_m;
  j["omega0"] = b.omega0;
  j["gamma"] = b.gamma;
  j["sign"] = b.sign;
  json o = json::array();
  for (int r = 0; r < 3; ++r) {
    json row = json::array();
    for (int c = 0; c < 3; ++c) row.push_back(b.orientation(r, c));
    o.push_back(row);
  }
  j["orientation"] = o;
  return j;
}

json omega_to_json(const OmegaGrid& g) {
  json j;
  j["kind"] = g.kind == GridKind::log_spaced ? "log" : "linear";
  j["min"] = g.omega_min;
  j["max"] = g.omega_max;
  j["count"] = g.count;
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const std::exception& e) {
    fail_input(std::string("config: malformed JSON: ") + e.what());
  }
  expect_keys(root, "$",
              {"units", "grid", "medium", "validate", "factorize", "modes",
               "sumrule", "spectra", "synth", "seed", "workers",
               "tolerance_scale"});
  RunConfig cfg;

  if (root.contains("units")) {
    expect_keys(root["units"], "units", {"hbar", "c"});
    cfg.units.hbar = get_num(root["units"], "units", "hbar", 1.0);
    cfg.units.c = get_num(root["units"], "units", "c", 1.0);
    if (cfg.units.hbar <= 0.0 || cfg.units.c <= 0.0) {
      bad("units", "hbar and c must be positive");
    }
  }

  if (root.contains("grid")) {
    const json& g = root["grid"];
    expect_keys(g, "grid", {"box", "points", "omega"});
    if (g.contains("box")) {
      if (!g["box"].is_array() || g["box"].size() != 3) {
        bad("grid.box", "expected an array of 3 lengths");
      }
      for (int i = 0; i < 3; ++i) {
        cfg.grid_spec.box[static_cast<size_t>(i)] =
            g["box"][static_cast<size_t>(i)].get<double>();
        if (cfg.grid_spec.box[static_cast<size_t>(i)] <= 0.0) {
          bad("grid.box", "lengths must be positive");
        }
      }
    }
    if (g.contains("points")) {
      if (!g["points"].is_array() || g["points"].size() != 3) {
        bad("grid.points", "expected an array of 3 counts");
      }
      for (int i = 0; i < 3; ++i) {
        cfg.grid_spec.points[static_cast<size_t>(i)] =
            g["points"][static_cast<size_t>(i)].get<int>();
        if (cfg.grid_spec.points[static_cast<size_t>(i)] < 1) {
          bad("grid.points", "counts must be >= 1");
        }
      }
    }
    if (g.contains("omega")) {
      cfg.omega = parse_omega(g["omega"], "grid.omega", cfg.omega);
    }
  }

  if (root.contains("medium")) {
    const json& m = root["medium"];
    expect_keys(m, "medium", {"regions", "corruption"});
    const std::string corr = get_str(m, "medium", "corruption", "none");
    if (corr == "none") {
      cfg.corruption = Corruption::none;
    } else if (corr == "flip_me_sign") {
      cfg.corruption = Corruption::flip_me_sign;
    } else {
      bad("medium.corruption", "must be \"none\" or \"flip_me_sign\"");
    }
    if (!m.contains("regions") || !m["regions"].is_array() ||
        m["regions"].empty()) {
      bad("medium.regions", "at least one region is required");
    }
    int idx = 0;
    for (const json& r : m["regions"]) {
      const std::string path = "medium.regions[" + std::to_string(idx) + "]";
      expect_keys(r, path, {"name", "cells", "bands",
                            "hermitian_from_quadrature"});
      RegionCfg rc;
      rc.name = get_str(r, path, "name", "region" + std::to_string(idx));
      rc.hermitian_from_quadrature =
          get_bool(r, path, "hermitian_from_quadrature", false);
      if (r.contains("cells")) {
        const json& c = r["cells"];
        expect_keys(c, path + ".cells", {"all", "axis", "from", "to"});
        rc.cells.all = get_bool(c, path + ".cells", "all", false);
        rc.cells.axis = get_int(c, path + ".cells", "axis", 0);
        rc.cells.from = get_int(c, path + ".cells", "from", 0);
        rc.cells.to = get_int(c, path + ".cells", "to", 0);
        if (rc.cells.axis < 0 || rc.cells.axis > 2) {
          bad(path + ".cells.axis", "must be 0, 1 or 2");
        }
        if (!rc.cells.all && rc.cells.to <= rc.cells.from) {
          bad(path + ".cells", "empty cell range");
        }
      } else {
        rc.cells.all = true;
      }
      if (r.contains("bands")) {
        if (!r["bands"].is_array()) bad(path + ".bands", "expected an array");
        int bidx = 0;
        for (const json& bj : r["bands"]) {
          rc.bands.push_back(
              parse_band(bj, path + ".bands[" + std::to_string(bidx) + "]"));
          ++bidx;
        }
      }
      cfg.regions.push_back(std::move(rc));
      ++idx;
    }
  } else {
    RegionCfg vac;
    vac.name = "vacuum";
    vac.cells.all = true;
    cfg.regions.push_back(vac);
  }

  if (root.contains("validate")) {
    const json& v = root["validate"];
    expect_keys(v, "validate", {"checks", "tolerances"});
    if (v.contains("checks")) {
      if (!v["checks"].is_array()) bad("validate.checks", "expected an array");
      cfg.validate.checks.clear();
      const std::set<std::string> known = {"kk",        "onsager",
                                           "time_reversal", "causality",
                                           "passivity", "cross_bound"};
      for (const json& c : v["checks"]) {
        if (!c.is_string() || !known.count(c.get<std::string>())) {
          bad("validate.checks", "unknown check name");
        }
        cfg.validate.checks.push_back(c.get<std::string>());
      }
    }
    if (v.contains("tolerances")) {
      const json& t = v["tolerances"];
      expect_keys(t, "validate.tolerances",
                  {"kk", "onsager", "time_reversal", "causality", "passivity",
                   "cross_bound"});
      auto& tol = cfg.validate.tolerances;
      tol.kk = get_num(t, "validate.tolerances", "kk", tol.kk);
      tol.onsager = get_num(t, "validate.tolerances", "onsager", tol.onsager);
      tol.time_reversal =
          get_num(t, "validate.tolerances", "time_reversal", tol.time_reversal);
      tol.causality =
          get_num(t, "validate.tolerances", "causality", tol.causality);
      tol.passivity =
          get_num(t, "validate.tolerances", "passivity", tol.passivity);
      tol.cross_bound =
          get_num(t, "validate.tolerances", "cross_bound", tol.cross_bound);
    }
  }

  if (root.contains("factorize")) {
    const json& f = root["factorize"];
    expect_keys(f, "factorize", {"omega", "rank_tolerance", "region"});
    if (f.contains("omega")) {
      cfg.factorize.omega =
          parse_omega(f["omega"], "factorize.omega", cfg.factorize.omega);
    }
    cfg.factorize.rank_tolerance =
        get_num(f, "factorize", "rank_tolerance", cfg.factorize.rank_tolerance);
    cfg.factorize.region = get_int(f, "factorize", "region", 0);
  }

  if (root.contains("modes")) {
    const json& m = root["modes"];
    expect_keys(m, "modes",
                {"omega_values", "beta_tolerance", "residual_tolerance"});
    if (m.contains("omega_values")) {
      if (!m["omega_values"].is_array() || m["omega_values"].empty()) {
        bad("modes.omega_values", "expected a nonempty array");
      }
      cfg.modes.omega_values.clear();
      for (const json& w : m["omega_values"]) {
        const double v = w.get<double>();
        if (!(v > 0.0)) bad("modes.omega_values", "frequencies must be > 0");
        cfg.modes.omega_values.push_back(v);
      }
    }
    cfg.modes.beta_tolerance =
        get_num(m, "modes", "beta_tolerance", cfg.modes.beta_tolerance);
    cfg.modes.residual_tolerance = get_num(m, "modes", "residual_tolerance",
                                           cfg.modes.residual_tolerance);
  }

  if (root.contains("sumrule")) {
    const json& s = root["sumrule"];
    expect_keys(s, "sumrule",
                {"k", "pairs", "omega", "refine", "tolerance_frac", "region"});
    cfg.sumrule.k = parse_vec3(s.contains("k") ? s["k"] : json(), "sumrule.k",
                               cfg.sumrule.k);
    if (s.contains("pairs")) {
      if (!s["pairs"].is_array()) bad("sumrule.pairs", "expected an array");
      cfg.sumrule.pairs.clear();
      for (const json& p : s["pairs"]) {
        if (!p.is_array() || p.size() != 2) {
          bad("sumrule.pairs", "each pair is [i, j]");
        }
        const int i = p[0].get<int>();
        const int j = p[1].get<int>();
        if (i < 0 || i > 2 || j < 0 || j > 2) {
          bad("sumrule.pairs", "components must be 0..2");
        }
        cfg.sumrule.pairs.emplace_back(i, j);
      }
    }
    if (s.contains("omega")) {
      cfg.sumrule.omega =
          parse_omega(s["omega"], "sumrule.omega", cfg.sumrule.omega);
    }
    if (s.contains("refine")) {
      if (!s["refine"].is_array()) bad("sumrule.refine", "expected an array");
      cfg.sumrule.refine.clear();
      for (const json& f : s["refine"]) {
        const int v = f.get<int>();
        if (v < 1) bad("sumrule.refine", "factors must be >= 1");
        cfg.sumrule.refine.push_back(v);
      }
    }
    cfg.sumrule.tolerance_frac =
        get_num(s, "sumrule", "tolerance_frac", cfg.sumrule.tolerance_frac);
    cfg.sumrule.region = get_int(s, "sumrule", "region", 0);
  }

  if (root.contains("spectra")) {
    const json& s = root["spectra"];
    expect_keys(s, "spectra", {"omega_values"});
    if (s.contains("omega_values")) {
      cfg.spectra.omega_values.clear();
      for (const json& w : s["omega_values"]) {
        cfg.spectra.omega_values.push_back(w.get<double>());
      }
    }
  }

  if (root.contains("synth")) {
    const json& s = root["synth"];
    expect_keys(s, "synth",
                {"packet", "bins", "t_max", "dt", "enclosure_from",
                 "enclosure_to", "balance_tolerance", "write_trace",
                 "trace_stride"});
    if (s.contains("packet")) {
      const json& p = s["packet"];
      expect_keys(p, "synth.packet",
                  {"axis", "m_center", "m_sigma", "pol", "amplitude"});
      cfg.synth.packet.axis = get_int(p, "synth.packet", "axis", 0);
      cfg.synth.packet.m_center = get_int(p, "synth.packet", "m_center", 5);
      cfg.synth.packet.m_sigma =
          get_num(p, "synth.packet", "m_sigma", 1.5);
      cfg.synth.packet.pol = parse_vec3(
          p.contains("pol") ? p["pol"] : json(), "synth.packet.pol",
          cfg.synth.packet.pol);
      cfg.synth.packet.amplitude =
          get_num(p, "synth.packet", "amplitude", 1.0);
      if (cfg.synth.packet.m_center < 1) {
        bad("synth.packet.m_center", "must be >= 1");
      }
      if (cfg.synth.packet.m_sigma <= 0.0) {
        bad("synth.packet.m_sigma", "must be > 0");
      }
    }
    if (s.contains("bins")) {
      cfg.synth.bins = parse_omega(s["bins"], "synth.bins", cfg.synth.bins);
    }
    cfg.synth.t_max = get_num(s, "synth", "t_max", cfg.synth.t_max);
    cfg.synth.dt = get_num(s, "synth", "dt", cfg.synth.dt);
    if (cfg.synth.dt <= 0.0 || cfg.synth.t_max <= cfg.synth.dt) {
      bad("synth", "requires 0 < dt < t_max");
    }
    cfg.synth.enclosure_from =
        get_int(s, "synth", "enclosure_from", cfg.synth.enclosure_from);
    cfg.synth.enclosure_to =
        get_int(s, "synth", "enclosure_to", cfg.synth.enclosure_to);
    cfg.synth.balance_tolerance =
        get_num(s, "synth", "balance_tolerance", cfg.synth.balance_tolerance);
    cfg.synth.write_trace =
        get_bool(s, "synth", "write_trace", cfg.synth.write_trace);
    cfg.synth.trace_stride =
        get_int(s, "synth", "trace_stride", cfg.synth.trace_stride);
  }

  if (root.contains("seed")) {
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("workers")) {
    cfg.workers = root["workers"].get<int>();
    if (cfg.workers < 1) bad("workers", "must be >= 1");
  }
  if (root.contains("tolerance_scale")) {
    cfg.tolerance_scale = root["tolerance_scale"].get<double>();
    if (cfg.tolerance_scale <= 0.0) bad("tolerance_scale", "must be > 0");
  }

  // cross-section sanity
  cfg.build_map();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_input("config: cannot open file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

MediumModel RunConfig::build_model() const {
  std::vector<Region> regions;
  regions.reserve(this->regions.size());
  for (const RegionCfg& rc : this->regions) {
    Region r;
    r.name = rc.name;
    r.bands = rc.bands;
    r.hermitian_from_quadrature = rc.hermitian_from_quadrature;
    regions.push_back(std::move(r));
  }
  return MediumModel(std::move(regions), omega, corruption);
}

SpectralGrid RunConfig::build_grid() const { return SpectralGrid(grid_spec); }

MediumMap RunConfig::build_map() const {
  const int nx = grid_spec.points[0];
  const int ny = grid_spec.points[1];
  const int nz = grid_spec.points[2];
  const int n = nx * ny * nz;
  MediumMap map;
  map.region_of_cell.assign(static_cast<size_t>(n), -1);
  for (size_t r = 0; r < regions.size(); ++r) {
    const CellsCfg& cells = regions[r].cells;
    for (int c = 0; c < n; ++c) {
      const int ix = c % nx;
      const int iy = (c / nx) % ny;
      const int iz = c / (nx * ny);
      const int along = cells.axis == 0 ? ix : (cells.axis == 1 ? iy : iz);
      const bool inside =
          cells.all || (along >= cells.from && along < cells.to);
      if (!inside) continue;
      if (map.region_of_cell[static_cast<size_t>(c)] >= 0 &&
          map.region_of_cell[static_cast<size_t>(c)] != static_cast<int>(r)) {
        fail_input("config: medium.regions: cell " + std::to_string(c) +
                   " covered by regions " +
                   std::to_string(map.region_of_cell[static_cast<size_t>(c)]) +
                   " and " + std::to_string(r));
      }
      map.region_of_cell[static_cast<size_t>(c)] = static_cast<int>(r);
    }
  }
  for (int c = 0; c < n; ++c) {
    if (map.region_of_cell[static_cast<size_t>(c)] < 0) {
      fail_input("config: medium.regions: cell " + std::to_string(c) +
                 " not covered by any region");
    }
  }
  return map;
}

nlohmann::json RunConfig::echo() const {
  json j;
  j["units"] = {{"hbar", units.hbar}, {"c", units.c}};
  j["grid"]["box"] = {grid_spec.box[0], grid_spec.box[1], grid_spec.box[2]};
  j["grid"]["points"] = {grid_spec.points[0], grid_spec.points[1],
                         grid_spec.points[2]};
  j["grid"]["omega"] = omega_to_json(omega);
  json regs = json::array();
  for (const RegionCfg& rc : regions) {
    json r;
    r["name"] = rc.name;
    r["hermitian_from_quadrature"] = rc.hermitian_from_quadrature;
    if (rc.cells.all) {
      r["cells"] = {{"all", true}, {"axis", rc.cells.axis},
                    {"from", rc.cells.from}, {"to", rc.cells.to}};
    } else {
      r["cells"] = {{"all", false}, {"axis", rc.cells.axis},
                    {"from", rc.cells.from}, {"to", rc.cells.to}};
    }
    json bands = json::array();
    for (const Band& b : rc.bands) bands.push_back(band_to_json(b));
    r["bands"] = bands;
    regs.push_back(r);
  }
  j["medium"]["regions"] = regs;
  j["medium"]["corruption"] =
      corruption == Corruption::none ? "none" : "flip_me_sign";
  j["validate"]["checks"] = validate.checks;
  j["validate"]["tolerances"] = {{"kk", validate.tolerances.kk},
                                 {"onsager", validate.tolerances.onsager},
                                 {"time_reversal", validate.tolerances.time_reversal},
                                 {"causality", validate.tolerances.causality},
                                 {"passivity", validate.tolerances.passivity},
                                 {"cross_bound", validate.tolerances.cross_bound}};
  j["factorize"] = {{"omega", omega_to_json(factorize.omega)},
                    {"rank_tolerance", factorize.rank_tolerance},
                    {"region", factorize.region}};
  j["modes"] = {{"omega_values", modes.omega_values},
                {"beta_tolerance", modes.beta_tolerance},
                {"residual_tolerance", modes.residual_tolerance}};
  json pairs = json::array();
  for (const auto& p : sumrule.pairs) pairs.push_back({p.first, p.second});
  j["sumrule"] = {{"k", {sumrule.k(0), sumrule.k(1), sumrule.k(2)}},
                  {"pairs", pairs},
                  {"omega", omega_to_json(sumrule.omega)},
                  {"refine", sumrule.refine},
                  {"tolerance_frac", sumrule.tolerance_frac},
                  {"region", sumrule.region}};
  j["spectra"] = {{"omega_values", spectra.omega_values}};
  j["synth"] = {{"packet",
                 {{"axis", synth.packet.axis},
                  {"m_center", synth.packet.m_center},
                  {"m_sigma", synth.packet.m_sigma},
                  {"pol", {synth.packet.pol(0), synth.packet.pol(1),
                           synth.packet.pol(2)}},
                  {"amplitude", synth.packet.amplitude}}},
                {"bins", omega_to_json(synth.bins)},
                {"t_max", synth.t_max},
                {"dt", synth.dt},
                {"enclosure_from", synth.enclosure_from},
                {"enclosure_to", synth.enclosure_to},
                {"balance_tolerance", synth.balance_tolerance},
                {"write_trace", synth.write_trace},
                {"trace_stride", synth.trace_stride}};
  j["seed"] = seed;
  j["workers"] = workers;
  j["tolerance_scale"] = tolerance_scale;
  return j;
}

}  // namespace mepol

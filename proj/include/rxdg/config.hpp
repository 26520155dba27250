#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "rxdg/chemistry.hpp"
#include "rxdg/driver.hpp"
#include "rxdg/mesh.hpp"

namespace rxdg::cli {

struct InitRegion {
  enum class Kind { halfspace, circle, all };
  Kind kind = Kind::all;
  int axis = 0;
  bool less = true;
  Real bound = 0;
  Real cx = 0, cy = 0, radius = 0;
  Real T = 300, P = 101325;
  std::array<Real, 2> v{0, 0};
  std::vector<std::pair<std::string, Real>> mole_ratios;

  bool contains(const Real* x, int dim) const;
};

struct RunConfig {
  std::string mesh;       // .msh path or generator descriptor
  std::string mechanism;  // mechanism file path; empty = inert
  int p = 1;
  Real cfl = 0.1;
  Real t_end = 0;
  driver::LimiterMode limiter = driver::LimiterMode::entropy_local;
  bool av = false;
  Real c_av = 0.5;
  dg::FluxInterp flux_interp = dg::FluxInterp::standard;
  int vol_order = -1, face_order = -1;
  Real eps = 1e-10;
  driver::TimeScheme scheme = driver::TimeScheme::ssprk2;
  int threads = 1;

  Real output_interval = 0;
  std::string output_dir;
  std::vector<std::string> fields{"X_OH", "T", "P", "Pstar"};

  std::vector<std::pair<std::string, std::string>> periodic;  // tag-name pairs
  std::vector<InitRegion> regions;

  chem::ReactionStepConfig reaction;
};

/// `key = value` lines in bracketed sections, # comments, unknown keys
/// rejected. Throws ParseError / ValidationError (naming the key).
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& in, const std::string& origin);

struct LoadedMechanism {
  thermo::GasModel gas;
  chem::ReactionMechanism mech;
};

/// Line-oriented mechanism file: [elements], repeated [species] blocks with
/// per-range internal-energy polynomial coefficients, [reactions] with
/// mass-action Arrhenius parameters in SI units (kmol, m^3, s, J/kmol).
LoadedMechanism load_mechanism(const std::string& path);
LoadedMechanism parse_mechanism(std::istream& in, const std::string& origin);

/// A .msh file path, or an inline generator descriptor:
///   line: n=64,x0=0,x1=1
///   tri-rect: nx=80,ny=12,x0=0,x1=0.45,y0=0,y1=0.06,jitter=0.15,seed=7
///   quad-rect: same keys as tri-rect (plus geom=2, curve=0.05, curve_from=..)
mesh::Mesh load_mesh(const std::string& spec);

/// Nodal interpolation of the piecewise-region initial state; regions are
/// tested in order, first match wins. Throws RegionOverlapAmbiguity when a
/// point matches no region (add a final `default` region).
dg::Field initialize_case(const RunConfig& cfg, const mesh::Mesh& msh,
                          const thermo::GasModel& gm, int p);

/// Bundled preset text (written next to the binary on demand by tests).
std::string detonation_preset_text();

} // namespace rxdg::cli

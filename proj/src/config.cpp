#include "rxdg/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rxdg/errors.hpp"
#include "rxdg/gmsh_io.hpp"
#include "rxdg/mesh_gen.hpp"

namespace rxdg::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

Real to_real(const std::string& s, const std::string& key, const std::string& origin,
             int line) {
  try {
    size_t pos = 0;
    const Real v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (...) {
    std::ostringstream os;
    os << origin << ":" << line << ": key `" << key << "`: not a number: " << s;
    throw ParseError(os.str());
  }
}

int to_int(const std::string& s, const std::string& key, const std::string& origin,
           int line) {
  const Real v = to_real(s, key, origin, line);
  return static_cast<int>(v);
}

struct KeyLine {
  std::string section, key, value;
  int line = 0;
};

std::vector<KeyLine> read_keyed_lines(std::istream& in, const std::string& origin) {
  std::vector<KeyLine> out;
  std::string section, ln;
  int no = 0;
  while (std::getline(in, ln)) {
    ++no;
    const auto hash = ln.find('#');
    if (hash != std::string::npos) ln = ln.substr(0, hash);
    ln = trim(ln);
    if (ln.empty()) continue;
    if (ln.front() == '[') {
      if (ln.back() != ']')
        throw ParseError(origin + ":" + std::to_string(no) + ": malformed section header");
      section = trim(ln.substr(1, ln.size() - 2));
      out.push_back({section, "", "", no});
      continue;
    }
    const auto eq = ln.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ":" + std::to_string(no) + ": expected key = value");
    out.push_back({section, trim(ln.substr(0, eq)), trim(ln.substr(eq + 1)), no});
  }
  return out;
}

[[noreturn]] void bad_key(const KeyLine& kl, const std::string& origin) {
  std::ostringstream os;
  os << origin << ":" << kl.line << ": unknown key `" << kl.key << "` in section ["
     << kl.section << "]";
  throw ValidationError(os.str());
}

InitRegion parse_region(const std::string& value, const std::string& origin, int line) {
  InitRegion r;
  const auto parts = split(value, ';');
  if (parts.empty()) throw ParseError(origin + ": empty region spec");
  {
    std::istringstream is(parts[0]);
    std::string kind;
    is >> kind;
    if (kind == "default") {
      r.kind = InitRegion::Kind::all;
    } else if (kind == "halfspace") {
      std::string axis, op;
      if (!(is >> axis >> op >> r.bound))
        throw ParseError(origin + ":" + std::to_string(line) +
                         ": halfspace syntax: halfspace x1 < 0.015");
      if (axis == "x1" || axis == "x") r.axis = 0;
      else if (axis == "x2" || axis == "y") r.axis = 1;
      else throw ParseError(origin + ": unknown axis " + axis);
      if (op == "<") r.less = true;
      else if (op == ">") r.less = false;
      else throw ParseError(origin + ": halfspace comparator must be < or >");
      r.kind = InitRegion::Kind::halfspace;
    } else if (kind == "circle") {
      if (!(is >> r.cx >> r.cy >> r.radius))
        throw ParseError(origin + ":" + std::to_string(line) +
                         ": circle syntax: circle cx cy radius");
      r.kind = InitRegion::Kind::circle;
    } else {
      throw ParseError(origin + ": unknown region kind " + kind);
    }
  }
  for (size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ": region parameter needs key = value");
    const std::string key = trim(parts[i].substr(0, eq));
    const std::string val = trim(parts[i].substr(eq + 1));
    if (key == "T") r.T = to_real(val, key, origin, line);
    else if (key == "P") r.P = to_real(val, key, origin, line);
    else if (key == "v") {
      const auto comps = split(val, ',');
      for (size_t k = 0; k < comps.size() && k < 2; ++k)
        r.v[k] = to_real(comps[k], key, origin, line);
    } else if (key == "X") {
      for (const auto& term : split(val, ',')) {
        const auto colon = term.find(':');
        if (colon == std::string::npos)
          throw ParseError(origin + ": mole ratios as SPECIES:value");
        r.mole_ratios.emplace_back(trim(term.substr(0, colon)),
                                   to_real(trim(term.substr(colon + 1)), key, origin, line));
      }
    } else {
      throw ValidationError(origin + ":" + std::to_string(line) +
                            ": unknown region parameter `" + key + "`");
    }
  }
  return r;
}

} // namespace

bool InitRegion::contains(const Real* x, int dim) const {
  switch (kind) {
    case Kind::all:
      return true;
    case Kind::halfspace: {
      const Real c = axis < dim ? x[axis] : 0.0;
      return less ? c < bound : c > bound;
    }
    case Kind::circle: {
      const Real dx = x[0] - cx;
      const Real dy = (dim > 1 ? x[1] : 0.0) - cy;
      return std::sqrt(dx * dx + dy * dy) < radius;
    }
  }
  return false;
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  for (const KeyLine& kl : read_keyed_lines(in, origin)) {
    if (kl.key.empty()) {
      if (kl.section != "run" && kl.section != "output" && kl.section != "boundary" &&
          kl.section != "init" && kl.section != "reaction")
        throw ValidationError(origin + ":" + std::to_string(kl.line) +
                              ": unknown section [" + kl.section + "]");
      continue;
    }
    const std::string& k = kl.key;
    const std::string& v = kl.value;
    if (kl.section == "run") {
      if (k == "mesh") cfg.mesh = v;
      else if (k == "mechanism") cfg.mechanism = v;
      else if (k == "p") cfg.p = to_int(v, k, origin, kl.line);
      else if (k == "cfl") cfg.cfl = to_real(v, k, origin, kl.line);
      else if (k == "t_end") cfg.t_end = to_real(v, k, origin, kl.line);
      else if (k == "eps") cfg.eps = to_real(v, k, origin, kl.line);
      else if (k == "threads") cfg.threads = to_int(v, k, origin, kl.line);
      else if (k == "vol_order") cfg.vol_order = to_int(v, k, origin, kl.line);
      else if (k == "face_order") cfg.face_order = to_int(v, k, origin, kl.line);
      else if (k == "limiter") {
        if (v == "entropy-local") cfg.limiter = driver::LimiterMode::entropy_local;
        else if (v == "entropy-global") cfg.limiter = driver::LimiterMode::entropy_global;
        else if (v == "positivity-only") cfg.limiter = driver::LimiterMode::positivity_only;
        else if (v == "clipping") cfg.limiter = driver::LimiterMode::clipping;
        else throw ValidationError(origin + ": limiter must be entropy-local, "
                                            "entropy-global, positivity-only or clipping");
      } else if (k == "av") {
        cfg.av = v == "on" || v == "true" || v == "1";
      } else if (k == "c_av") {
        cfg.c_av = to_real(v, k, origin, kl.line);
      } else if (k == "flux_interp") {
        if (v == "standard") cfg.flux_interp = dg::FluxInterp::standard;
        else if (v == "modified") cfg.flux_interp = dg::FluxInterp::modified;
        else throw ValidationError(origin + ": flux_interp must be standard or modified");
      } else if (k == "scheme") {
        if (v == "ssprk2") cfg.scheme = driver::TimeScheme::ssprk2;
        else if (v == "ssprk3") cfg.scheme = driver::TimeScheme::ssprk3;
        else throw ValidationError(origin + ": scheme must be ssprk2 or ssprk3");
      } else {
        bad_key(kl, origin);
      }
    } else if (kl.section == "output") {
      if (k == "interval") cfg.output_interval = to_real(v, k, origin, kl.line);
      else if (k == "directory") cfg.output_dir = v;
      else if (k == "fields") cfg.fields = split(v, ',');
      else bad_key(kl, origin);
    } else if (kl.section == "boundary") {
      if (k == "periodic") {
        const auto pair = split(v, ':');
        if (pair.size() != 2)
          throw ParseError(origin + ": periodic syntax: tagA:tagB");
        cfg.periodic.emplace_back(pair[0], pair[1]);
      } else if (k == "default") {
        if (v != "wall")
          throw ValidationError(origin + ": only wall boundaries are supported");
      } else {
        bad_key(kl, origin);
      }
    } else if (kl.section == "init") {
      if (k == "region") cfg.regions.push_back(parse_region(v, origin, kl.line));
      else bad_key(kl, origin);
    } else if (kl.section == "reaction") {
      if (k == "integrator") {
        if (v == "implicit-midpoint")
          cfg.reaction.integrator = chem::ReactionStepConfig::Integrator::implicit_midpoint;
        else if (v == "backward-euler")
          cfg.reaction.integrator = chem::ReactionStepConfig::Integrator::backward_euler;
        else throw ValidationError(origin + ": integrator must be implicit-midpoint or backward-euler");
      } else if (k == "newton_tol") {
        cfg.reaction.newton_tol = to_real(v, k, origin, kl.line);
      } else if (k == "max_substeps") {
        cfg.reaction.max_substeps = to_int(v, k, origin, kl.line);
      } else if (k == "p_hat") {
        cfg.reaction.p_hat = to_int(v, k, origin, kl.line);
      } else {
        bad_key(kl, origin);
      }
    } else {
      bad_key(kl, origin);
    }
  }

  if (cfg.p < 0) throw ValidationError(origin + ": key `p`: must be >= 0");
  if (!(cfg.cfl > 0)) throw ValidationError(origin + ": key `cfl`: must be positive");
  if (cfg.t_end < 0) throw ValidationError(origin + ": key `t_end`: must be nonnegative");
  if (!(cfg.eps > 0)) throw ValidationError(origin + ": key `eps`: must be positive");
  if (!(cfg.reaction.newton_tol > 0))
    throw ValidationError(origin + ": key `newton_tol`: must be positive");
  if (cfg.reaction.max_substeps < 1)
    throw ValidationError(origin + ": key `max_substeps`: must be >= 1");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse_config(in, path);
}

namespace {

struct SpeciesBuild {
  thermo::SpeciesThermo sp;
  std::vector<std::pair<std::string, Real>> atoms;
};

std::vector<std::pair<int, Real>> parse_stoich_side(
    const std::string& side, const thermo::GasModel& gm, bool& third_body,
    const std::string& origin, int line);

} // namespace

LoadedMechanism parse_mechanism(std::istream& in, const std::string& origin) {
  LoadedMechanism out;
  std::vector<std::pair<std::string, Real>> elements;  // name, atomic mass
  std::vector<SpeciesBuild> builds;
  struct RawReaction {
    std::string stoich;
    Real A = 0, beta = 0, Ea = 0;
    bool irreversible = false;
    std::vector<std::pair<std::string, Real>> tb;
    bool has_tb_list = false;
    int line = 0;
  };
  std::vector<RawReaction> raw_rx;

  for (const KeyLine& kl : read_keyed_lines(in, origin)) {
    if (kl.key.empty()) {
      if (kl.section == "species") builds.push_back({});
      else if (kl.section != "elements" && kl.section != "reactions")
        throw ValidationError(origin + ":" + std::to_string(kl.line) +
                              ": unknown section [" + kl.section + "]");
      continue;
    }
    if (kl.section == "elements") {
      elements.emplace_back(kl.key, to_real(kl.value, kl.key, origin, kl.line));
    } else if (kl.section == "species") {
      if (builds.empty()) throw ParseError(origin + ": species key outside a [species] block");
      SpeciesBuild& b = builds.back();
      if (kl.key == "name") b.sp.name = kl.value;
      else if (kl.key == "W") b.sp.W = to_real(kl.value, kl.key, origin, kl.line);
      else if (kl.key == "atoms") {
        for (const auto& term : split(kl.value, ',')) {
          const auto colon = term.find(':');
          if (colon == std::string::npos)
            throw ParseError(origin + ": atoms as ELEMENT:count");
          b.atoms.emplace_back(trim(term.substr(0, colon)),
                               to_real(trim(term.substr(colon + 1)), kl.key, origin, kl.line));
        }
      } else if (kl.key == "range") {
        thermo::CaloricRange r;
        std::istringstream is(kl.value);
        if (!(is >> r.T_lo >> r.T_hi))
          throw ParseError(origin + ":" + std::to_string(kl.line) + ": range = T_lo T_hi");
        b.sp.ranges.push_back(r);
      } else if (kl.key == "b") {
        if (b.sp.ranges.empty())
          throw ParseError(origin + ": b coefficients before any range");
        std::istringstream is(kl.value);
        Real c;
        while (is >> c) b.sp.ranges.back().b.push_back(c);
      } else if (kl.key == "s_const") {
        if (b.sp.ranges.empty()) throw ParseError(origin + ": s_const before any range");
        b.sp.ranges.back().s_const = to_real(kl.value, kl.key, origin, kl.line);
      } else if (kl.key == "h_const") {
        if (b.sp.ranges.empty()) throw ParseError(origin + ": h_const before any range");
        b.sp.ranges.back().h_const = to_real(kl.value, kl.key, origin, kl.line);
      } else {
        bad_key(kl, origin);
      }
    } else if (kl.section == "reactions") {
      if (kl.key != "reaction") bad_key(kl, origin);
      const auto parts = split(kl.value, ';');
      RawReaction rx;
      rx.line = kl.line;
      rx.stoich = parts[0];
      for (size_t i = 1; i < parts.size(); ++i) {
        if (parts[i] == "irreversible") {
          rx.irreversible = true;
          continue;
        }
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos)
          throw ParseError(origin + ":" + std::to_string(kl.line) +
                           ": reaction parameter needs key = value");
        const std::string key = trim(parts[i].substr(0, eq));
        const std::string val = trim(parts[i].substr(eq + 1));
        if (key == "A") rx.A = to_real(val, key, origin, kl.line);
        else if (key == "beta") rx.beta = to_real(val, key, origin, kl.line);
        else if (key == "Ea") rx.Ea = to_real(val, key, origin, kl.line);
        else if (key == "M") {
          rx.has_tb_list = true;
          for (const auto& term : split(val, ',')) {
            const auto colon = term.find(':');
            if (colon == std::string::npos)
              throw ParseError(origin + ": third bodies as SPECIES:efficiency");
            rx.tb.emplace_back(trim(term.substr(0, colon)),
                               to_real(trim(term.substr(colon + 1)), key, origin, kl.line));
          }
        } else {
          throw ValidationError(origin + ":" + std::to_string(kl.line) +
                                ": unknown reaction parameter `" + key + "`");
        }
      }
      raw_rx.push_back(std::move(rx));
    } else {
      bad_key(kl, origin);
    }
  }

  for (auto& b : builds) {
    if (b.sp.name.empty()) throw ValidationError(origin + ": species without a name");
    if (!b.sp.ranges.empty()) b.sp.u0 = b.sp.ranges.front().b.empty() ? 0 : b.sp.ranges.front().b[0];
    out.gas.species.push_back(b.sp);
  }
  out.gas.validate();

  out.mech.element_names.clear();
  for (const auto& [en, em] : elements) out.mech.element_names.push_back(en);
  out.mech.atom_matrix.assign(elements.size(),
                              std::vector<Real>(out.gas.n_species(), 0.0));
  for (size_t bi = 0; bi < builds.size(); ++bi)
    for (const auto& [en, count] : builds[bi].atoms) {
      const auto it = std::find(out.mech.element_names.begin(),
                                out.mech.element_names.end(), en);
      if (it == out.mech.element_names.end())
        throw ValidationError(origin + ": species " + builds[bi].sp.name +
                              " references unknown element " + en);
      out.mech.atom_matrix[it - out.mech.element_names.begin()][bi] = count;
    }

  for (const RawReaction& rr : raw_rx) {
    chem::Reaction rx;
    rx.A = rr.A;
    rx.beta = rr.beta;
    rx.Ea = rr.Ea;
    // split stoichiometry at = or =>
    std::string lhs, rhs;
    const auto arrow = rr.stoich.find("=>");
    if (arrow != std::string::npos) {
      lhs = rr.stoich.substr(0, arrow);
      rhs = rr.stoich.substr(arrow + 2);
      rx.reversible = false;
    } else {
      const auto eq = rr.stoich.find('=');
      if (eq == std::string::npos)
        throw ParseError(origin + ":" + std::to_string(rr.line) +
                         ": reaction needs = or =>");
      lhs = rr.stoich.substr(0, eq);
      rhs = rr.stoich.substr(eq + 1);
      rx.reversible = !rr.irreversible;
    }
    if (rr.irreversible) rx.reversible = false;

    bool tb_l = false, tb_r = false;
    rx.reactants = parse_stoich_side(lhs, out.gas, tb_l, origin, rr.line);
    rx.products = parse_stoich_side(rhs, out.gas, tb_r, origin, rr.line);
    if (tb_l != tb_r)
      throw ParseError(origin + ":" + std::to_string(rr.line) +
                       ": third body M must appear on both sides");
    rx.third_body = tb_l;
    if (rx.third_body) {
      rx.tb_eff.assign(out.gas.n_species(), 1.0);
      for (const auto& [name, eff] : rr.tb) {
        const int i = out.gas.index(name);
        if (i < 0)
          throw ValidationError(origin + ": third body references unknown species " + name);
        rx.tb_eff[i] = eff;
      }
    } else if (rr.has_tb_list) {
      throw ParseError(origin + ":" + std::to_string(rr.line) +
                       ": M efficiencies given but no M in the stoichiometry");
    }
    out.mech.reactions.push_back(std::move(rx));
  }
  out.mech.validate(out.gas);
  return out;
}

namespace {

std::vector<std::pair<int, Real>> parse_stoich_side(
    const std::string& side, const thermo::GasModel& gm, bool& third_body,
    const std::string& origin, int line) {
  std::vector<std::pair<int, Real>> out;
  for (const auto& raw : split(side, '+')) {
    std::string term = trim(raw);
    if (term.empty())
      throw ParseError(origin + ":" + std::to_string(line) + ": empty stoichiometry term");
    if (term == "M") {
      third_body = true;
      continue;
    }
    Real mult = 1;
    const auto star = term.find('*');
    if (star != std::string::npos) {
      mult = to_real(trim(term.substr(0, star)), "stoich", origin, line);
      term = trim(term.substr(star + 1));
    }
    const int i = gm.index(term);
    if (i < 0)
      throw ValidationError(origin + ":" + std::to_string(line) +
                            ": unknown species in reaction: " + term);
    bool merged = false;
    for (auto& [j, nu] : out)
      if (j == i) {
        nu += mult;
        merged = true;
      }
    if (!merged) out.emplace_back(i, mult);
  }
  return out;
}

} // namespace

LoadedMechanism load_mechanism(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mechanism file: " + path);
  return parse_mechanism(in, path);
}

namespace {

std::map<std::string, std::string> parse_descriptor(const std::string& body) {
  std::map<std::string, std::string> kv;
  for (const auto& term : split(body, ',')) {
    if (term.empty()) continue;
    const auto eq = term.find('=');
    if (eq == std::string::npos)
      throw ParseError("mesh descriptor terms need key=value: " + term);
    kv[trim(term.substr(0, eq))] = trim(term.substr(eq + 1));
  }
  return kv;
}

Real kv_real(const std::map<std::string, std::string>& kv, const std::string& k,
             Real def) {
  const auto it = kv.find(k);
  return it == kv.end() ? def : std::stod(it->second);
}

} // namespace

mesh::Mesh load_mesh(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = colon == std::string::npos ? "" : spec.substr(0, colon);
  if (head == "line") {
    const auto kv = parse_descriptor(spec.substr(colon + 1));
    return mesh::generate_line_mesh(kv_real(kv, "x0", 0), kv_real(kv, "x1", 1),
                                    static_cast<int>(kv_real(kv, "n", 16)));
  }
  if (head == "tri-rect" || head == "quad-rect") {
    const auto kv = parse_descriptor(spec.substr(colon + 1));
    mesh::RectOptions opt;
    opt.x0 = kv_real(kv, "x0", 0);
    opt.x1 = kv_real(kv, "x1", 1);
    opt.y0 = kv_real(kv, "y0", 0);
    opt.y1 = kv_real(kv, "y1", 1);
    opt.nx = static_cast<int>(kv_real(kv, "nx", 8));
    opt.ny = static_cast<int>(kv_real(kv, "ny", 8));
    opt.jitter = kv_real(kv, "jitter", 0);
    opt.seed = static_cast<unsigned>(kv_real(kv, "seed", 1));
    opt.geom_degree = static_cast<int>(kv_real(kv, "geom", 1));
    opt.curve_amp = kv_real(kv, "curve", 0);
    opt.curve_from = kv_real(kv, "curve_from", -1e300);
    return head == "tri-rect" ? mesh::generate_tri_rect(opt)
                              : mesh::generate_quad_rect(opt);
  }
  return mesh::read_gmsh_file(spec);
}

dg::Field initialize_case(const RunConfig& cfg, const mesh::Mesh& msh,
                          const thermo::GasModel& gm, int p) {
  StateLayout lay{msh.dim, gm.n_species()};
  dg::Field f(&msh, lay, p);

  // resolve species indices once
  std::vector<std::vector<std::pair<int, Real>>> ratios(cfg.regions.size());
  for (size_t r = 0; r < cfg.regions.size(); ++r)
    for (const auto& [name, x] : cfg.regions[r].mole_ratios) {
      const int i = gm.index(name);
      if (i < 0) throw ValidationError("init region references unknown species " + name);
      ratios[r].emplace_back(i, x);
    }

  for (int e = 0; e < msh.n_elements(); ++e) {
    const auto& el = msh.elements[e];
    const basis::NodalBasis gb = basis::NodalBasis::geometry(el.shape, el.geom_degree);
    const auto& sb = f.elem_basis(e);
    const std::vector<Real> gn = msh.element_geom_nodes(e);
    std::vector<Real> phi(gb.n_basis());
    for (int j = 0; j < sb.n_basis(); ++j) {
      Real xi[2] = {0, 0};
      for (int k = 0; k < msh.dim; ++k) xi[k] = sb.node(j, k);
      gb.eval(xi, phi.data());
      Real x[2] = {0, 0};
      for (int mnode = 0; mnode < gb.n_basis(); ++mnode)
        for (int k = 0; k < msh.dim; ++k) x[k] += gn[mnode * msh.dim + k] * phi[mnode];

      const InitRegion* match = nullptr;
      size_t ridx = 0;
      for (size_t r = 0; r < cfg.regions.size(); ++r)
        if (cfg.regions[r].contains(x, msh.dim)) {
          match = &cfg.regions[r];
          ridx = r;
          break;
        }
      if (!match) {
        std::ostringstream os;
        os << "initialize_case: no region matches point (" << x[0] << ", " << x[1]
           << "); add a final `default` region";
        throw RegionOverlapAmbiguity(os.str());
      }

      // concentrations from mole ratios at (T, P)
      Real Xsum = 0;
      for (const auto& [i, xr] : ratios[ridx]) Xsum += xr;
      if (!(Xsum > 0))
        throw ValidationError("initialize_case: region has no positive mole ratios");
      const Real Csum = match->P / (gm.R0 * match->T);
      std::vector<Real> C(gm.n_species(), 0.0);
      for (const auto& [i, xr] : ratios[ridx]) C[i] = xr / Xsum * Csum;
      const Real vv[2] = {match->v[0], match->v[1]};
      const MixtureState y = thermo::state_from_primitive(
          gm, lay, C, std::span<const Real>(vv, msh.dim), match->T);
      f.set_state(e, j, y);
    }
  }
  return f;
}

std::string detonation_preset_text() {
  return R"(# Two-dimensional H2-O2-Ar detonation, desk-scale coarse mesh.
# Domain (0, 0.45) x (0, 0.06) m, walls everywhere. Two hot circular
# kernels perturb the planar initiation region.

[run]
mesh = tri-rect:nx=80,ny=12,x0=0,x1=0.45,y0=0,y1=0.06,jitter=0.12,seed=7
mechanism = mech/h2o2_ar_9sp.mech
p = 2
cfl = 0.1
t_end = 2.0e-5
limiter = entropy-local
flux_interp = modified
av = on
c_av = 0.5

[output]
interval = 2.0e-7
directory = out/detonation2d_64h
fields = X_OH,T,P,Pstar

[init]
region = halfspace x1 < 0.015 ; T = 3500 ; P = 5.50e5 ; X = AR:8,H2O:2,OH:0.1
region = circle 0.021 0.015 0.0025 ; T = 3500 ; P = 5.50e5 ; X = AR:8,H2O:2,OH:0.1
region = circle 0.022 0.044 0.0025 ; T = 3500 ; P = 5.50e5 ; X = AR:8,H2O:2,OH:0.1
region = default ; T = 300 ; P = 6.67e3 ; X = AR:7,O2:1,H2:2
)";
}

} // namespace rxdg::cli

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rxdg/config.hpp"
#include "rxdg/errors.hpp"
#include "rxdg/gmsh_io.hpp"
#include "rxdg/output.hpp"
#include "rxdg/suites.hpp"

namespace {

using namespace rxdg;

int run_solve(const std::string& config_path) {
  const cli::RunConfig cfg = cli::load_config(config_path);
  if (cfg.mesh.empty()) throw ValidationError("config: key `mesh` is required");
  if (cfg.regions.empty())
    throw ValidationError("config: at least one [init] region is required");

  // Resolve inputs relative to the config file location.
  const std::filesystem::path base = std::filesystem::path(config_path).parent_path();
  auto resolve = [&](const std::string& p) {
    if (p.find(':') != std::string::npos) return p;  // descriptor
    std::filesystem::path fp(p);
    if (fp.is_relative() && !std::filesystem::exists(fp) &&
        std::filesystem::exists(base / fp))
      return (base / fp).string();
    return p;
  };

  mesh::Mesh msh = cli::load_mesh(resolve(cfg.mesh));
  for (const auto& [a, b] : cfg.periodic) {
    auto tag_of = [&](const std::string& name) {
      for (const auto& [tag, nm] : msh.tag_names)
        if (nm == name) return tag;
      return std::atoi(name.c_str());
    };
    msh.make_periodic(tag_of(a), tag_of(b));
  }

  cli::LoadedMechanism lm;
  const chem::ReactionMechanism* mech = nullptr;
  if (!cfg.mechanism.empty()) {
    lm = cli::load_mechanism(resolve(cfg.mechanism));
    mech = &lm.mech;
  } else {
    throw ValidationError("config: key `mechanism` is required (thermodynamic data)");
  }

  dg::TransportOptions topt;
  topt.interp = cfg.flux_interp;
  topt.vol_order = cfg.vol_order;
  topt.face_order = cfg.face_order;
  topt.artificial_viscosity = cfg.av;
  topt.c_av = cfg.c_av;
  topt.n_threads = cfg.threads;
  StateLayout lay{msh.dim, lm.gas.n_species()};
  const dg::TransportOperator op(&lm.gas, &msh, lay, cfg.p, topt);

  driver::DriverOptions dopt;
  dopt.limiter = cfg.limiter;
  dopt.scheme = cfg.scheme;
  dopt.eps = cfg.eps;
  dopt.cfl = cfg.cfl;
  dopt.reaction = cfg.reaction;
  dopt.n_threads = cfg.threads;
  const bool react = !lm.mech.reactions.empty();
  const driver::Driver drv(&op, react ? mech : nullptr, dopt);

  driver::RunState s(cli::initialize_case(cfg, msh, lm.gas, cfg.p));
  drv.start(s);

  std::ofstream audit;
  int sample = 0;
  const bool do_output = !cfg.output_dir.empty();
  if (do_output) {
    std::filesystem::create_directories(cfg.output_dir);
    audit.open(cfg.output_dir + "/audit.csv");
    cli::write_audit_header(audit, mech);
    cli::write_audit_row(audit, s.t, drv.conservation_audit(s));
    cli::write_vtk(cfg.output_dir + "/fields_0000.vtk", s, op, cfg.fields);
    ++sample;
  }

  Real next_out = cfg.output_interval;
  while (s.t < cfg.t_end * (1 - 1e-12)) {
    Real dt = drv.compute_dt(s, cfg.cfl);
    dt = std::min(dt, cfg.t_end - s.t);
    if (cfg.output_interval > 0) dt = std::min(dt, next_out - s.t + 1e-30);
    drv.retry_on_violation(s, dt);
    drv.update_pointwise_diagnostics(s);

    if (cfg.output_interval > 0 && s.t >= next_out * (1 - 1e-12)) {
      const driver::AuditReport a = drv.conservation_audit(s);
      if (do_output) {
        cli::write_audit_row(audit, s.t, a);
        char name[64];
        std::snprintf(name, sizeof(name), "/fields_%04d.vtk", sample);
        cli::write_vtk(cfg.output_dir + name, s, op, cfg.fields);
      }
      ++sample;
      next_out += cfg.output_interval;
      std::cerr << "t = " << s.t << "  steps = " << s.step_count
                << "  min T = " << a.min_T << "  mass err = " << a.mass_err << "\n";
    }
  }

  const driver::AuditReport fin = drv.conservation_audit(s);
  if (do_output) {
    cli::write_audit_row(audit, s.t, fin);
    cli::write_vtk(cfg.output_dir + "/fields_final.vtk", s, op, cfg.fields);
  }
  std::cout << "finished t = " << s.t << " after " << s.step_count
            << " steps; mass err " << fin.mass_err << ", energy err " << fin.energy_err
            << ", run min T " << s.run_min_T << " K, retries " << s.retry_count << "\n";
  return 0;
}

int run_check_mesh(const std::string& path) {
  const mesh::Mesh msh = mesh::read_gmsh_file(path);
  std::cout << "dim " << msh.dim << ", " << msh.n_elements() << " elements, "
            << msh.n_faces() << " faces\n";

  int n_bnd = 0;
  for (const auto& f : msh.faces)
    if (!f.interior()) ++n_bnd;
  std::cout << n_bnd << " boundary faces\n";

  Real worst_closed = 0, min_jac = 1e300;
  for (int e = 0; e < msh.n_elements(); ++e) {
    const auto& el = msh.elements[e];
    const mesh::ReferenceElement ref =
        mesh::build_reference(el.shape, 1, el.geom_degree, 5, 5);
    const mesh::ElementGeometry g =
        mesh::map_and_metrics(ref, msh.element_geom_nodes(e));
    for (Real j : g.jac_det) min_jac = std::min(min_jac, j);
    Real nx = 0, ny = 0;
    for (const auto& fg : g.faces)
      for (size_t l = 0; l < fg.nu.size(); ++l) {
        nx += fg.nu[l] * fg.normals[l * msh.dim];
        if (msh.dim > 1) ny += fg.nu[l] * fg.normals[l * msh.dim + 1];
      }
    worst_closed =
        std::max(worst_closed, std::sqrt(nx * nx + ny * ny) / g.surface());
  }
  std::cout << "min volume Jacobian " << min_jac << "\n";
  std::cout << "worst closed-surface defect " << worst_closed << " (tol 1e-12)\n";
  if (worst_closed > 1e-12) {
    std::cout << "FAIL: surface quadrature does not close\n";
    return 3;
  }
  std::cout << "OK\n";
  return 0;
}

int run_audit(const std::string& path) {
  const cli::AuditSummary s = cli::summarize_audit_file(path);
  std::cout << "rows " << s.rows << "\n"
            << "max mass drift " << s.max_mass_err << "\n"
            << "max energy drift " << s.max_energy_err << "\n"
            << "max atom drift " << s.max_atom_err << "\n"
            << "min T " << s.min_T << " K\n"
            << "min s " << s.min_s << " J/(kg K)\n";
  return 0;
}

int run_oracle(const std::string& name) {
  const suites::SuiteResult r = suites::run_suite(name);
  std::cout << (r.pass ? "PASS" : "FAIL") << " " << name << ": " << r.detail << "\n";
  return r.pass ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropy-bounded DG solver for reacting compressible flow"};
  app.require_subcommand(1);

  std::string config_path, mesh_path, audit_path, suite_name;
  auto* solve = app.add_subcommand("solve", "run a configured case");
  solve->add_option("config", config_path, "configuration file")->required();
  auto* check = app.add_subcommand("check-mesh", "validate a gmsh mesh");
  check->add_option("mesh", mesh_path, "MSH 2.2/4.1 ASCII file")->required();
  auto* audit = app.add_subcommand("audit", "summarize a conservation audit CSV");
  audit->add_option("csv", audit_path, "audit CSV produced by solve")->required();
  auto* oracle = app.add_subcommand("oracle", "run a property suite");
  oracle->add_option("suite", suite_name,
                     "theorem1 | decomp | limiter | alpha | auxpoly")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve->parsed()) return run_solve(config_path);
    if (check->parsed()) return run_check_mesh(mesh_path);
    if (audit->parsed()) return run_audit(audit_path);
    if (oracle->parsed()) return run_oracle(suite_name);
  } catch (const rxdg::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rxdg::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rxdg::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rxdg::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

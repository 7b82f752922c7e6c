#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>

#include <tbb/parallel_for.h>

#include <gaah/errors.hpp>
#include <gaah/io.hpp>
#include <gaah/lattice.hpp>
#include <gaah/oracle.hpp>

#include "manifest.hpp"
#include "plotdata.hpp"

namespace gaah::cli {

namespace fs = std::filesystem;
using Files = std::vector<fs::path>;

std::optional<Command> parse_command(std::string_view s) {
  if (s == "spectrum") return Command::Spectrum;
  if (s == "evolve") return Command::Evolve;
  if (s == "poles") return Command::Poles;
  if (s == "oracle") return Command::Oracle;
  if (s == "sweep") return Command::Sweep;
  if (s == "figdata") return Command::Figdata;
  return std::nullopt;
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Spectrum: return "spectrum";
    case Command::Evolve: return "evolve";
    case Command::Poles: return "poles";
    case Command::Oracle: return "oracle";
    case Command::Sweep: return "sweep";
    case Command::Figdata: return "figdata";
  }
  return "?";
}

namespace {

fs::path emit(const fs::path& root, const std::string& name,
              const std::function<void(std::ostream&)>& body) {
  std::ostringstream os;
  body(os);
  const fs::path p = root / name;
  write_atomic(p, os.str());
  return p;
}

io::Metadata run_metadata(const RunConfig& cfg) {
  io::Metadata m;
  m.emplace_back("bath.prescription", std::string(bath::to_string(cfg.self_energy.prescription)));
  m.emplace_back("bath.evaluation", std::string(bath::to_string(cfg.self_energy.mode)));
  m.emplace_back("dynamics.init", cfg.init);
  if (cfg.init == "site") m.emplace_back("dynamics.init_site", std::to_string(cfg.init_site));
  return m;
}

io::Metadata parameter_metadata(const RunConfig& cfg) {
  io::Metadata m = io::describe(cfg.model);
  for (auto& kv : io::describe(cfg.bath)) m.push_back(std::move(kv));
  for (auto& kv : run_metadata(cfg)) m.push_back(std::move(kv));
  return m;
}

ComplexVector highest_state(const lattice::ModelParams& model) {
  return lattice::highest_excited_state(lattice::diagonalize(lattice::build_hamiltonian(model)));
}

dynamics::WaveFunction initial_state(const RunConfig& cfg) {
  if (cfg.init == "site") {
    ComplexVector v = ComplexVector::Zero(cfg.model.N);
    v(cfg.init_site - 1) = 1.0;
    return {v};
  }
  return {highest_state(cfg.model)};
}

dynamics::Trajectory evolve_config(const RunConfig& cfg, const dynamics::TimeGrid& grid) {
  return dynamics::evolve(cfg.model, cfg.bath, initial_state(cfg), grid,
                          {.site_amplitudes = cfg.record_sites}, cfg.solver);
}

std::string value_tag(double v) { return io::format_double(v); }

// ---------------------------------------------------------------- spectrum

Files spectrum_task(const RunConfig& cfg, const fs::path& root) {
  const auto H = lattice::build_hamiltonian(cfg.model);
  const auto d = lattice::diagonalize(H);
  io::Metadata meta = io::describe(cfg.model);
  const auto edge = lattice::mobility_edge(cfg.model);
  meta.emplace_back("mobility_edge", edge ? io::format_double(*edge) : std::string("none"));

  Files out;
  out.push_back(emit(root, "spectrum.csv", [&](std::ostream& os) {
    io::write_header(os, meta);
    os << "index,energy,ipr,localized\n";
    for (Eigen::Index k = 0; k < d.energies.size(); ++k) {
      const double E = d.energies(k);
      // Above the edge for a > 0, below it for a < 0; a = 0 has none.
      std::string loc = "n/a";
      if (edge) loc = ((cfg.model.a > 0) == (E > *edge)) ? "1" : "0";
      os << k << ',' << io::format_double(E) << ',' << io::format_double(lattice::state_ipr(RealVector(d.states.col(k))))
         << ',' << loc << '\n';
    }
  }));
  out.push_back(emit(root, "potential.csv", [&](std::ostream& os) {
    io::write_header(os, meta);
    os << "n,onsite,es_amplitude\n";
    const RealVector es = d.states.col(d.states.cols() - 1);
    for (int n = 1; n <= cfg.model.N; ++n) {
      os << n << ',' << io::format_double(lattice::onsite_potential(cfg.model, n)) << ','
         << io::format_double(es(n - 1)) << '\n';
    }
  }));
  return out;
}

// ------------------------------------------------------------------ evolve

fs::path write_trajectory(const fs::path& root, const std::string& name, const dynamics::Trajectory& tr,
                          const io::Metadata& extra) {
  return emit(root, name, [&](std::ostream& os) { io::write_trajectory_csv(os, tr, extra); });
}

fs::path write_sites(const fs::path& root, const std::string& name, const dynamics::Trajectory& tr,
                     const io::Metadata& extra) {
  return emit(root, name, [&](std::ostream& os) {
    io::Metadata meta = io::describe(tr.model);
    for (const auto& kv : extra) meta.push_back(kv);
    io::write_header(os, meta);
    os << 't';
    for (int n = 1; n <= tr.model.N; ++n) os << ",Re" << n << ",Im" << n;
    os << '\n';
    for (std::size_t i = 0; i < tr.sites.size(); ++i) {
      os << io::format_double(tr.grid.time(i));
      for (Eigen::Index n = 0; n < tr.sites[i].size(); ++n) {
        os << ',' << io::format_double(tr.sites[i](n).real()) << ','
           << io::format_double(tr.sites[i](n).imag());
      }
      os << '\n';
    }
  });
}

Files evolve_task(const RunConfig& cfg, const fs::path& root, const std::string& stem,
                  dynamics::Trajectory* keep = nullptr) {
  auto tr = evolve_config(cfg, cfg.grid());
  Files out;
  const auto extra = run_metadata(cfg);
  out.push_back(write_trajectory(root, stem + ".csv", tr, extra));
  if (cfg.record_sites) out.push_back(write_sites(root, stem + "_sites.csv", tr, extra));
  if (cfg.output_svg) {
    const fs::path svg = root / (stem + "_SP.svg");
    write_panel_svg(svg, stem, Observable::SP, {{"SP", &tr}});
    out.push_back(svg);
  }
  if (keep) *keep = std::move(tr);
  return out;
}

// ------------------------------------------------------------------- poles

Files poles_task(const RunConfig& cfg, const fs::path& root, const std::string& stem,
                 std::vector<resonance::ResonancePole>* keep = nullptr) {
  const auto opts = cfg.pole_options();
  auto poles = resonance::find_poles(cfg.model, cfg.bath, opts);
  const ComplexVector es = highest_state(cfg.model);
  for (auto& p : poles) p.overlap = resonance::state_overlap(es, p.null_vector);

  io::Metadata meta = parameter_metadata(cfg);
  const resonance::Region region = opts.region.value_or(resonance::default_region(cfg.model));
  meta.emplace_back("poles.region", io::format_double(region.re_min) + "," + io::format_double(region.re_max) +
                                        "," + io::format_double(region.im_min) + "," +
                                        io::format_double(region.im_max));
  if (poles.size() >= 2) {
    meta.emplace_back("transition_frequency", io::format_double(resonance::transition_frequency(poles[0], poles[1])));
  }

  Files out;
  out.push_back(emit(root, stem + ".csv", [&](std::ostream& os) { io::write_poles_csv(os, poles, meta); }));
  const auto grid = resonance::scan_grid(cfg.model, cfg.bath, region, opts.resolution, opts.self_energy);
  out.push_back(emit(root, stem + "_grid.csv", [&](std::ostream& os) { io::write_grid_csv(os, grid, meta); }));
  if (cfg.output_svg) {
    const fs::path svg = root / (stem + "_grid.svg");
    write_grid_svg(svg, stem, grid);
    out.push_back(svg);
  }
  if (keep) *keep = std::move(poles);
  return out;
}

// ------------------------------------------------------------------ oracle

Files oracle_task(const RunConfig& cfg, const fs::path& root, std::string& failure) {
  RunConfig small = cfg;
  small.model.N = cfg.oracle.N;
  small.model.validate();
  const dynamics::TimeGrid grid{cfg.dt, static_cast<std::size_t>(std::llround(cfg.oracle.t_max / cfg.dt))};
  grid.validate();
  oracle::ValidationSettings vs;
  vs.modes = static_cast<std::size_t>(cfg.oracle.modes);
  vs.omega_max = cfg.oracle.omega_max;
  vs.tolerance = cfg.oracle.tolerance;
  const auto res = oracle::validate_against_oracle(small.model, cfg.bath, grid, vs);

  io::Metadata extra = run_metadata(small);
  extra.emplace_back("oracle.modes", std::to_string(vs.modes));
  extra.emplace_back("oracle.omega_max", io::format_double(vs.omega_max));

  Files out;
  out.push_back(write_trajectory(root, "volterra.csv", res.volterra, extra));
  out.push_back(write_trajectory(root, "oracle.csv", res.oracle, extra));
  out.push_back(emit(root, "deviation.csv", [&](std::ostream& os) {
    io::Metadata meta = parameter_metadata(small);
    meta.emplace_back("oracle.tolerance", io::format_double(vs.tolerance));
    meta.emplace_back("passed", res.report.passed ? "true" : "false");
    io::write_header(os, meta);
    os << "observable,max,rms\n";
    for (const auto& o : res.report.observables) {
      os << o.name << ',' << io::format_double(o.max) << ',' << io::format_double(o.rms) << '\n';
    }
  }));
  if (!res.report.passed) {
    failure = "oracle mismatch: max |dSP| = " + io::format_double(res.report.get("SP").max) +
              ", max |dIPR| = " + io::format_double(res.report.get("IPR").max) + " > " +
              io::format_double(vs.tolerance);
  }
  return out;
}

// ---------------------------------------------------------- parallel tasks

// Runs every job concurrently; rethrows the first failure (in job order)
// only after all jobs have finished.
void run_all(std::size_t n, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(n);
  tbb::parallel_for(std::size_t{0}, n, [&](std::size_t i) {
    try {
      job(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

// ------------------------------------------------------------------- sweep

Files run_sweep(const RunConfig& cfg, const fs::path& root) {
  if (cfg.sweep.param.empty()) throw ConfigError("sweep.param", "required by the sweep command");
  if (cfg.sweep.values.empty()) throw ConfigError("sweep.values", "required by the sweep command");

  const std::size_t n = cfg.sweep.values.size();
  std::vector<RunConfig> points(n, cfg);
  for (std::size_t i = 0; i < n; ++i) {
    apply(points[i], cfg.sweep.param, value_tag(cfg.sweep.values[i]));
    validate(points[i]);
  }

  std::vector<Files> files(n);
  std::vector<dynamics::Trajectory> trajs(n);
  std::vector<std::vector<resonance::ResonancePole>> poles(n);
  const bool evolving = cfg.sweep.task == "evolve";
  run_all(n, [&](std::size_t i) {
    const std::string stem = cfg.sweep.task + "_" + cfg.sweep.param + "=" + value_tag(cfg.sweep.values[i]);
    files[i] = evolving ? evolve_task(points[i], root, stem, &trajs[i])
                        : poles_task(points[i], root, stem, &poles[i]);
  });

  Files out;
  for (auto& f : files) out.insert(out.end(), f.begin(), f.end());
  out.push_back(emit(root, "summary.csv", [&](std::ostream& os) {
    io::Metadata meta = parameter_metadata(cfg);
    meta.emplace_back("sweep.param", cfg.sweep.param);
    meta.emplace_back("sweep.task", cfg.sweep.task);
    io::write_header(os, meta);
    if (evolving) {
      const auto grid = cfg.grid();
      const double t_ref = std::min(200.0, grid.t_max());
      const auto k = static_cast<std::size_t>(std::llround(t_ref / grid.dt));
      os << "value,t_ref,SP_t_ref,IPR_t_ref,SP_final,IPR_final,norm_final\n";
      for (std::size_t i = 0; i < n; ++i) {
        const auto& tr = trajs[i];
        os << io::format_double(cfg.sweep.values[i]) << ',' << io::format_double(t_ref) << ','
           << io::format_double(tr.sp[k]) << ',' << io::format_double(tr.ipr[k]) << ','
           << io::format_double(tr.sp.back()) << ',' << io::format_double(tr.ipr.back()) << ','
           << io::format_double(tr.norm.back()) << '\n';
      }
    } else {
      os << "value,ReE1,ImE1,ReE2,ImE2,transition_frequency,overlap1\n";
      for (std::size_t i = 0; i < n; ++i) {
        const auto& p = poles[i];
        auto field = [&](std::size_t j, bool re) {
          return j < p.size() ? io::format_double(re ? p[j].E.real() : p[j].E.imag()) : std::string("nan");
        };
        os << io::format_double(cfg.sweep.values[i]) << ',' << field(0, true) << ',' << field(0, false) << ','
           << field(1, true) << ',' << field(1, false) << ','
           << (p.size() >= 2 ? io::format_double(resonance::transition_frequency(p[0], p[1])) : "nan") << ','
           << (p.empty() ? "nan" : io::format_double(p[0].overlap.value_or(NAN))) << '\n';
      }
    }
  }));
  return out;
}

// ----------------------------------------------------------------- figdata

namespace {

struct Case {
  std::string panel;  // panel letter the case belongs to
  double a = 0.0;
  double Delta = 0.0;
  double eta = 0.1;
};

std::string case_stem(const std::string& bundle, const Case& c) {
  return bundle + "_a" + value_tag(c.a) + "_Delta" + value_tag(c.Delta) + "_eta" + value_tag(c.eta);
}

std::vector<Case> bundle_cases(const std::string& bundle, double eta) {
  std::vector<Case> cs;
  auto add = [&](const std::string& panel, double a, std::initializer_list<double> deltas, double e) {
    for (double d : deltas) cs.push_back({panel, a, d, e});
  };
  if (bundle == "fig1") {
    add("a", 0.0, {1.0, 2.0, 2.5}, eta);
    add("b", 0.0, {3.0, 4.0, 6.0, 10.0}, eta);
  } else if (bundle == "fig2") {
    add("a", 0.5, {0.5, 0.76, 1.0, 1.5, 2.0}, eta);
    add("b", 0.5, {3.0, 6.0, 10.0}, eta);
  } else if (bundle == "fig3") {
    const std::pair<double, double> panels[] = {{0.0, 1.0}, {0.0, 2.5}, {0.0, 6.0},
                                                {0.5, 0.5}, {0.5, 1.0}, {0.5, 6.0}};
    char letter = 'a';
    for (const auto& [a, d] : panels) {
      const std::string p(1, letter++);
      add(p, a, {d}, 0.1);
      add(p, a, {d}, 0.5);
    }
  } else if (bundle == "figA2") {
    add("a", 0.0, {1.0, 2.5, 6.0}, eta);
    add("b", 0.5, {0.5, 1.0, 3.0}, eta);
  }
  return cs;
}

std::string series_label(const std::string& bundle, const Case& c) {
  if (bundle == "fig3") return "eta_" + value_tag(c.eta);
  if (bundle == "figA2") return "a" + value_tag(c.a) + "_Delta_" + value_tag(c.Delta);
  return "Delta_" + value_tag(c.Delta);
}

Files trajectory_bundle(const RunConfig& cfg, const fs::path& root) {
  const std::string& bundle = cfg.figdata_bundle;
  const auto cases = bundle_cases(bundle, cfg.bath.eta);
  dynamics::TimeGrid grid = cfg.grid();
  if (cfg.figdata_full) grid = {0.01, 120000};

  std::vector<RunConfig> cfgs(cases.size(), cfg);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    cfgs[i].model.a = cases[i].a;
    cfgs[i].model.Delta = cases[i].Delta;
    cfgs[i].bath.eta = cases[i].eta;
    cfgs[i].init = "es";
    validate(cfgs[i]);
  }
  std::vector<dynamics::Trajectory> trajs(cases.size());
  run_all(cases.size(), [&](std::size_t i) { trajs[i] = evolve_config(cfgs[i], grid); });

  Files out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    out.push_back(write_trajectory(root, case_stem(bundle, cases[i]) + ".csv", trajs[i], run_metadata(cfgs[i])));
  }

  const std::vector<Observable> observables =
      bundle == "figA2" ? std::vector<Observable>{Observable::Variance}
                        : std::vector<Observable>{Observable::SP, Observable::IPR};
  std::vector<std::string> panels;
  for (const auto& c : cases) {
    if (std::find(panels.begin(), panels.end(), c.panel) == panels.end()) panels.push_back(c.panel);
  }
  for (const auto& panel : panels) {
    std::vector<Series> series;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      if (cases[i].panel == panel) series.push_back({series_label(bundle, cases[i]), &trajs[i]});
    }
    io::Metadata meta{{"figdata.bundle", bundle}, {"panel", panel}};
    const auto& first = *series.front().trajectory;
    for (auto& kv : io::describe(first.model)) {
      if (kv.first != "model.Delta" && !(bundle == "figA2" && kv.first == "model.a")) meta.push_back(kv);
    }
    for (auto& kv : io::describe(first.bath)) {
      if (!(bundle == "fig3" && kv.first == "bath.eta")) meta.push_back(kv);
    }
    for (auto obs : observables) {
      const std::string stem = bundle + "_" + panel + "_" + std::string(to_string(obs));
      out.push_back(emit(root, stem + ".csv", [&](std::ostream& os) { write_panel_csv(os, obs, series, meta); }));
      if (cfg.output_svg) {
        write_panel_svg(root / (stem + ".svg"), stem, obs, series);
        out.push_back(root / (stem + ".svg"));
      }
    }
  }
  return out;
}

Files determinant_bundle(const RunConfig& cfg, const fs::path& root) {
  const std::pair<double, double> cases[] = {{0.0, 2.5}, {0.5, 1.0}};
  std::vector<Files> files(2);
  run_all(2, [&](std::size_t i) {
    RunConfig c = cfg;
    c.model.a = cases[i].first;
    c.model.Delta = cases[i].second;
    validate(c);
    const std::string stem = "figA1_" + std::string(1, static_cast<char>('a' + i));
    std::vector<resonance::ResonancePole> poles;
    files[i] = poles_task(c, root, stem, &poles);

    // Zoomed grids around the two highest poles.
    const auto opts = c.pole_options();
    for (std::size_t k = 0; k < std::min<std::size_t>(2, poles.size()); ++k) {
      const auto E = poles[k].E;
      const double half = std::max(1e-3, 20.0 * std::abs(E.imag()));
      const resonance::Region zoom{E.real() - half, E.real() + half, 3.0 * E.imag() - 1e-9, 0.0};
      const resonance::Resolution res{64, 32};
      const auto grid = resonance::scan_grid(c.model, c.bath, zoom, res, opts.self_energy);
      io::Metadata meta = parameter_metadata(c);
      meta.emplace_back("zoom_pole", std::to_string(k + 1));
      const std::string zstem = stem + "_zoom" + std::to_string(k + 1);
      files[i].push_back(
          emit(root, zstem + ".csv", [&](std::ostream& os) { io::write_grid_csv(os, grid, meta); }));
      if (c.output_svg) {
        write_grid_svg(root / (zstem + ".svg"), zstem, grid);
        files[i].push_back(root / (zstem + ".svg"));
      }
    }
  });
  Files out;
  for (auto& f : files) out.insert(out.end(), f.begin(), f.end());
  return out;
}

}  // namespace

Files run_figdata(const RunConfig& cfg, const fs::path& root) {
  if (cfg.figdata_bundle == "figA1") return determinant_bundle(cfg, root);
  return trajectory_bundle(cfg, root);
}

// --------------------------------------------------------------------- run

int run(Command cmd, const RunConfig& cfg, const fs::path& out_dir) {
  const std::string command(to_string(cmd));
  const std::string config_text = serialize(cfg);
  auto fail = [&](int code, const std::string& kind, const std::string& module, const std::string& msg) {
    try {
      write_error_record(out_dir, command, kind, module, msg, config_text);
    } catch (const std::exception&) {
      // The error record is best effort; the exit status still reports the failure.
    }
    return code;
  };

  const auto start = std::chrono::steady_clock::now();
  try {
    validate(cfg);
    fs::create_directories(out_dir);
    std::error_code ec;
    fs::remove(out_dir / "error.json", ec);

    Files files;
    std::string failure;
    switch (cmd) {
      case Command::Spectrum: files = spectrum_task(cfg, out_dir); break;
      case Command::Evolve: files = evolve_task(cfg, out_dir, "trajectory"); break;
      case Command::Poles: files = poles_task(cfg, out_dir, "poles"); break;
      case Command::Oracle: files = oracle_task(cfg, out_dir, failure); break;
      case Command::Sweep: files = run_sweep(cfg, out_dir); break;
      case Command::Figdata: files = run_figdata(cfg, out_dir); break;
    }

    Manifest manifest(command, config_text);
    for (const auto& f : files) manifest.add_file(out_dir, f);
    manifest.task({command, failure.empty() ? "ok" : "failed", failure});
    manifest.set_wall_clock(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    manifest.write(out_dir);
    if (!failure.empty()) return fail(exit_code::validation, "validation", "oracle", failure);
    return exit_code::ok;
  } catch (const ConfigError& e) {
    return fail(exit_code::config, "config", e.key(), e.what());
  } catch (const ParameterDomainError& e) {
    return fail(exit_code::config, "domain", e.module(), e.what());
  } catch (const NumericFailure& e) {
    return fail(exit_code::numeric, "numeric", e.module(), e.what());
  } catch (const std::invalid_argument& e) {
    return fail(exit_code::config, "input", "plotdata", e.what());
  } catch (const std::exception& e) {
    return fail(exit_code::io, "io", "cli", e.what());
  }
}

}  // namespace gaah::cli

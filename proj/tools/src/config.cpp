#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <gaah/errors.hpp>
#include <gaah/io.hpp>

namespace gaah::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError(key, "expected a real number, got '" + v + "'");
  }
  return x;
}

long to_int(const std::string& key, const std::string& v) {
  long x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

std::string choice(const std::string& key, const std::string& v,
                   std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return v;
    list += list.empty() ? a : std::string(", ") + a;
  }
  throw ConfigError(key, "expected one of {" + list + "}, got '" + v + "'");
}

// Builders for the common key shapes.
template <typename Ref>
KeyInfo real_key(const std::string& name, const std::string& desc, Ref ref,
                 std::function<void(const std::string&, double)> check = {}) {
  return {name, "real", desc,
          [name, ref, check](RunConfig& c, const std::string& v) {
            const double x = to_real(name, v);
            if (check) check(name, x);
            ref(c) = x;
          },
          [ref](const RunConfig& c) { return io::format_double(ref(c)); }};
}

template <typename Ref>
KeyInfo int_key(const std::string& name, const std::string& desc, Ref ref, long min_value) {
  return {name, "integer", desc,
          [name, ref, min_value](RunConfig& c, const std::string& v) {
            const long x = to_int(name, v);
            if (x < min_value) {
              throw ConfigError(name, "must be >= " + std::to_string(min_value));
            }
            ref(c) = static_cast<int>(x);
          },
          [ref](const RunConfig& c) { return std::to_string(ref(c)); }};
}

template <typename Ref>
KeyInfo bool_key(const std::string& name, const std::string& desc, Ref ref) {
  return {name, "bool", desc,
          [name, ref](RunConfig& c, const std::string& v) { ref(c) = to_bool(name, v); },
          [ref](const RunConfig& c) { return from_bool(ref(c)); }};
}

template <typename Ref>
KeyInfo auto_real_key(const std::string& name, const std::string& desc, Ref ref) {
  return {name, "real|auto", desc,
          [name, ref](RunConfig& c, const std::string& v) {
            if (v == "auto") {
              ref(c).reset();
            } else {
              ref(c) = to_real(name, v);
            }
          },
          [ref](const RunConfig& c) {
            const auto& o = ref(c);
            return o ? io::format_double(*o) : std::string("auto");
          }};
}

void positive(const std::string& key, double x) {
  if (!(x > 0.0)) throw ConfigError(key, "must be > 0");
}

void non_negative(const std::string& key, double x) {
  if (!(x >= 0.0)) throw ConfigError(key, "must be >= 0");
}

std::vector<KeyInfo> build_registry() {
  std::vector<KeyInfo> r;
  r.push_back(int_key("model.N", "number of lattice sites", [](auto& c) -> auto& { return c.model.N; }, 2));
  r.push_back(real_key("model.lambda", "hopping amplitude", [](auto& c) -> auto& { return c.model.lambda; }));
  r.push_back(real_key("model.Delta", "quasi-periodic potential strength", [](auto& c) -> auto& { return c.model.Delta; }));
  r.push_back(real_key("model.a", "deformation parameter, |a| < 1", [](auto& c) -> auto& { return c.model.a; },
                       [](const std::string& k, double x) {
                         if (!(std::abs(x) < 1.0)) throw ConfigError(k, "must satisfy |a| < 1");
                       }));
  r.push_back(real_key("model.beta", "incommensurability", [](auto& c) -> auto& { return c.model.beta; }));
  r.push_back(real_key("model.phi", "phase offset (radians)", [](auto& c) -> auto& { return c.model.phi; }));
  r.push_back(real_key("bath.eta", "coupling strength", [](auto& c) -> auto& { return c.bath.eta; }, non_negative));
  r.push_back(real_key("bath.omega_c", "cutoff frequency", [](auto& c) -> auto& { return c.bath.omega_c; }, positive));
  r.push_back(real_key("bath.s", "Ohmicity exponent", [](auto& c) -> auto& { return c.bath.s; }, positive));
  r.push_back({"bath.prescription", "half|full", "residue of the regularized self-energy",
               [](RunConfig& c, const std::string& v) {
                 c.self_energy.prescription =
                     *bath::parse_prescription(choice("bath.prescription", v, {"half", "full"}));
               },
               [](const RunConfig& c) { return std::string(bath::to_string(c.self_energy.prescription)); }});
  r.push_back({"bath.evaluation", "continued|real_axis", "self-energy at complex E or at Re E",
               [](RunConfig& c, const std::string& v) {
                 c.self_energy.mode =
                     *bath::parse_mode(choice("bath.evaluation", v, {"continued", "real_axis"}));
               },
               [](const RunConfig& c) { return std::string(bath::to_string(c.self_energy.mode)); }});
  r.push_back(real_key("grid.dt", "time step", [](auto& c) -> auto& { return c.dt; }, positive));
  r.push_back(real_key("grid.t_max", "final time", [](auto& c) -> auto& { return c.t_max; }, positive));
  r.push_back({"dynamics.init", "es|site", "initial state: highest excited eigenstate or one site",
               [](RunConfig& c, const std::string& v) { c.init = choice("dynamics.init", v, {"es", "site"}); },
               [](const RunConfig& c) { return c.init; }});
  r.push_back(int_key("dynamics.init_site", "occupied site (1-based) when dynamics.init = site",
                      [](auto& c) -> auto& { return c.init_site; }, 1));
  r.push_back(bool_key("dynamics.markovian", "replace alpha(tau) by alpha(t) under the memory integral",
                       [](auto& c) -> auto& { return c.solver.markovian; }));
  r.push_back({"dynamics.kernel_window", "integer", "memory truncation in steps, 0 keeps the full history",
               [](RunConfig& c, const std::string& v) {
                 const long x = to_int("dynamics.kernel_window", v);
                 if (x < 0) throw ConfigError("dynamics.kernel_window", "must be >= 0");
                 c.solver.kernel_window = static_cast<std::size_t>(x);
               },
               [](const RunConfig& c) { return std::to_string(c.solver.kernel_window); }});
  r.push_back({"dynamics.band_limit", "real|none", "restrict J to [0, band_limit] in the kernel",
               [](RunConfig& c, const std::string& v) {
                 if (v == "none") {
                   c.solver.band_limit.reset();
                   return;
                 }
                 const double x = to_real("dynamics.band_limit", v);
                 positive("dynamics.band_limit", x);
                 c.solver.band_limit = x;
               },
               [](const RunConfig& c) {
                 return c.solver.band_limit ? io::format_double(*c.solver.band_limit) : std::string("none");
               }});
  r.push_back(bool_key("dynamics.record_sites", "also write site amplitudes",
                       [](auto& c) -> auto& { return c.record_sites; }));
  r.push_back(auto_real_key("poles.re_min", "search region, real part lower bound",
                            [](auto& c) -> auto& { return c.poles.re_min; }));
  r.push_back(auto_real_key("poles.re_max", "search region, real part upper bound",
                            [](auto& c) -> auto& { return c.poles.re_max; }));
  r.push_back(auto_real_key("poles.im_min", "search region, imaginary part lower bound",
                            [](auto& c) -> auto& { return c.poles.im_min; }));
  r.push_back(auto_real_key("poles.im_max", "search region, imaginary part upper bound",
                            [](auto& c) -> auto& { return c.poles.im_max; }));
  r.push_back(int_key("poles.resolution_re", "determinant grid cells along Re E",
                      [](auto& c) -> auto& { return c.poles.resolution_re; }, 8));
  r.push_back(int_key("poles.resolution_im", "determinant grid cells along Im E",
                      [](auto& c) -> auto& { return c.poles.resolution_im; }, 8));
  r.push_back(int_key("poles.count", "number of highest poles reported, 0 for all",
                      [](auto& c) -> auto& { return c.poles.count; }, 0));
  r.push_back(int_key("oracle.N", "lattice size of the oracle comparison",
                      [](auto& c) -> auto& { return c.oracle.N; }, 2));
  r.push_back(int_key("oracle.modes", "number of discrete bath modes",
                      [](auto& c) -> auto& { return c.oracle.modes; }, 2));
  r.push_back(real_key("oracle.omega_max", "highest sampled bath frequency",
                       [](auto& c) -> auto& { return c.oracle.omega_max; }, positive));
  r.push_back(real_key("oracle.t_max", "comparison horizon",
                       [](auto& c) -> auto& { return c.oracle.t_max; }, positive));
  r.push_back(real_key("oracle.tolerance", "allowed max deviation of SP and IPR",
                       [](auto& c) -> auto& { return c.oracle.tolerance; }, positive));
  r.push_back({"sweep.param", "key", "numeric key varied by the sweep",
               [](RunConfig& c, const std::string& v) { c.sweep.param = v; },
               [](const RunConfig& c) { return c.sweep.param; }});
  r.push_back({"sweep.values", "real list", "comma-separated values of sweep.param",
               [](RunConfig& c, const std::string& v) {
                 c.sweep.values.clear();
                 std::stringstream ss(v);
                 std::string item;
                 while (std::getline(ss, item, ',')) {
                   const std::string t = trim(item);
                   if (!t.empty()) c.sweep.values.push_back(to_real("sweep.values", t));
                 }
               },
               [](const RunConfig& c) {
                 std::string out;
                 for (double x : c.sweep.values) out += (out.empty() ? "" : ",") + io::format_double(x);
                 return out;
               }});
  r.push_back({"sweep.task", "evolve|poles", "pipeline run at each sweep point",
               [](RunConfig& c, const std::string& v) { c.sweep.task = choice("sweep.task", v, {"evolve", "poles"}); },
               [](const RunConfig& c) { return c.sweep.task; }});
  r.push_back({"figdata.bundle", "fig1|fig2|fig3|figA1|figA2", "figure data bundle",
               [](RunConfig& c, const std::string& v) {
                 c.figdata_bundle = choice("figdata.bundle", v, {"fig1", "fig2", "fig3", "figA1", "figA2"});
               },
               [](const RunConfig& c) { return c.figdata_bundle; }});
  r.push_back(bool_key("figdata.full", "long-time grid (t_max = 1200, dt = 0.01)",
                       [](auto& c) -> auto& { return c.figdata_full; }));
  r.push_back({"output.dir", "path", "output directory",
               [](RunConfig& c, const std::string& v) {
                 if (v.empty()) throw ConfigError("output.dir", "must not be empty");
                 c.output_dir = v;
               },
               [](const RunConfig& c) { return c.output_dir; }});
  r.push_back(bool_key("output.svg", "also render simple SVG plots",
                       [](auto& c) -> auto& { return c.output_svg; }));
  return r;
}

}  // namespace

dynamics::TimeGrid RunConfig::grid() const {
  return {dt, static_cast<std::size_t>(std::llround(t_max / dt))};
}

resonance::PoleSearchOptions RunConfig::pole_options() const {
  resonance::PoleSearchOptions o;
  o.self_energy = self_energy;
  o.resolution = {poles.resolution_re, poles.resolution_im};
  o.count = static_cast<std::size_t>(poles.count);
  if (poles.re_min || poles.re_max || poles.im_min || poles.im_max) {
    resonance::Region r = resonance::default_region(model);
    if (poles.re_min) r.re_min = *poles.re_min;
    if (poles.re_max) r.re_max = *poles.re_max;
    if (poles.im_min) r.im_min = *poles.im_min;
    if (poles.im_max) r.im_max = *poles.im_max;
    o.region = r;
  }
  return o;
}

const std::vector<KeyInfo>& key_registry() {
  static const std::vector<KeyInfo> registry = build_registry();
  return registry;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& k : key_registry()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw ConfigError(key, "unknown configuration key");
}

void validate(const RunConfig& cfg) {
  auto wrap = [](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const gaah::Error& e) {
      throw ConfigError(key, e.what());
    }
  };
  wrap("model", [&] { cfg.model.validate(); });
  wrap("bath", [&] { cfg.bath.validate(); });
  if (cfg.t_max / cfg.dt < 1.0) throw ConfigError("grid.t_max", "must be at least one step (grid.dt)");
  if (std::abs(cfg.t_max / cfg.dt - std::round(cfg.t_max / cfg.dt)) > 1e-6) {
    throw ConfigError("grid.t_max", "must be an integer multiple of grid.dt");
  }
  if (cfg.init == "site" && cfg.init_site > cfg.model.N) {
    throw ConfigError("dynamics.init_site", "exceeds model.N");
  }
  const bool region_set = cfg.poles.re_min && cfg.poles.re_max && cfg.poles.im_min && cfg.poles.im_max;
  if (region_set && (!(*cfg.poles.re_max > *cfg.poles.re_min) || !(*cfg.poles.im_max > *cfg.poles.im_min))) {
    throw ConfigError("poles.re_min", "search region must have positive area");
  }
  if (!cfg.sweep.param.empty()) {
    const auto& reg = key_registry();
    auto it = std::find_if(reg.begin(), reg.end(), [&](const KeyInfo& k) { return k.name == cfg.sweep.param; });
    if (it == reg.end() || (it->type != "real" && it->type != "integer")) {
      throw ConfigError("sweep.param", "must name a numeric key, got '" + cfg.sweep.param + "'");
    }
  }
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    apply(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : key_registry()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return serialize(a) == serialize(b); }

std::string describe_keys() {
  const RunConfig defaults;
  std::string out = "Configuration keys (key = value, one per line; '#' starts a comment):\n";
  for (const auto& k : key_registry()) {
    out += "  " + k.name + " [" + k.type + "] default " + k.get(defaults) + "\n      " + k.description + "\n";
  }
  return out;
}

}  // namespace gaah::cli

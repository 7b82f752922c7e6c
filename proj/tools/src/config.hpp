#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gaah/bath.hpp>
#include <gaah/dynamics.hpp>
#include <gaah/lattice.hpp>
#include <gaah/resonance.hpp>

namespace gaah::cli {

/// Configuration problem; `key()` is the dotted key path (may be empty for
/// syntax errors that precede the key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct PoleSettings {
  std::optional<double> re_min, re_max, im_min, im_max;  ///< unset: automatic region
  int resolution_re = 600;
  int resolution_im = 8;
  int count = 2;
};

struct OracleSettings {
  int N = 7;
  int modes = 2000;
  double omega_max = 80.0;
  double t_max = 50.0;
  double tolerance = 1e-3;
};

struct SweepSettings {
  std::string param;  ///< any numeric configuration key
  std::vector<double> values;
  std::string task = "evolve";  ///< evolve | poles
};

struct RunConfig {
  lattice::ModelParams model;
  bath::BathParams bath;
  bath::SelfEnergyOptions self_energy;
  double dt = 0.01;
  double t_max = 200.0;
  std::string init = "es";  ///< es | site
  int init_site = 1;
  bool record_sites = false;
  dynamics::SolverOptions solver;
  PoleSettings poles;
  OracleSettings oracle;
  SweepSettings sweep;
  std::string figdata_bundle = "fig1";
  bool figdata_full = false;
  std::string output_dir = "out";
  bool output_svg = false;

  dynamics::TimeGrid grid() const;
  resonance::PoleSearchOptions pole_options() const;
};

struct KeyInfo {
  std::string name;
  std::string type;
  std::string description;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

/// Every recognized key, in serialization order.
const std::vector<KeyInfo>& key_registry();

/// Applies one `key = value` assignment; unknown keys and bad values throw.
void apply(RunConfig& cfg, const std::string& key, const std::string& value);

/// Cross-field validation (model and bath invariants, grid sizes).
void validate(const RunConfig& cfg);

/// Flat `key = value` text, `#` comments and blank lines ignored.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// `key = value` lines for every key; parse_config_text(serialize(c)) == c.
std::string serialize(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

/// Human-readable key table for --help.
std::string describe_keys();

}  // namespace gaah::cli

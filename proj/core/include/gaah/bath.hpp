#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>

namespace gaah::bath {

/// Ohmic-family spectral density J(w) = eta w (w/w_c)^(s-1) exp(-w/w_c).
struct BathParams {
  double eta = 0.1;
  double omega_c = 10.0;
  double s = 1.0;

  void validate() const;

  friend bool operator==(const BathParams&, const BathParams&) = default;
};

/// Imaginary part of the regularized self-energy: -i (pi/2) J(E) or -i pi J(E).
enum class ResiduePrescription { Half, Full };

/// Where the self-energy is evaluated for complex E.
///  - Continued: the subtracted principal-value formula continued
///    analytically to complex E (default).
///  - RealAxis: evaluated at Re(E); only the sign of Im(E) matters, selecting
///    the side of the cut (lower half plane: -i c J, upper: +i c J).
enum class SelfEnergyMode { Continued, RealAxis };

std::string_view to_string(ResiduePrescription p);
std::string_view to_string(SelfEnergyMode m);
std::optional<ResiduePrescription> parse_prescription(std::string_view s);
std::optional<SelfEnergyMode> parse_mode(std::string_view s);

/// Residue coefficient c in -i c J(E).
double residue_factor(ResiduePrescription p);

double spectral_density(const BathParams& b, double omega);

/// Analytic continuation of J to complex argument (principal power).
std::complex<double> spectral_density(const BathParams& b, std::complex<double> z);

/// dJ/dz of the continued density.
std::complex<double> spectral_density_derivative(const BathParams& b, std::complex<double> z);

/// Integral of J over [0, upper] (upper may be +inf).
double integrated_density(const BathParams& b, double upper);

/// Closed-form kernel f(t) = int_0^inf J(w) exp(-i w t) dw
///   = eta / w_c^(s-1) Gamma(s+1) / (i t + 1/w_c)^(s+1).
std::complex<double> memory_kernel(const BathParams& b, double t);

/// Memory kernel of the spectral density restricted to [0, band_limit]; used
/// to compare against a finite discretized bath. Closed form for s = 1,
/// adaptive quadrature otherwise.
std::complex<double> band_limited_kernel(const BathParams& b, double band_limit, double t);

/// Callable kernel: full continuum, or band-limited when `band_limit` is set.
class MemoryKernel {
 public:
  explicit MemoryKernel(BathParams b, std::optional<double> band_limit = std::nullopt);

  std::complex<double> operator()(double t) const;
  const BathParams& params() const noexcept { return params_; }
  std::optional<double> band_limit() const noexcept { return band_limit_; }

 private:
  BathParams params_;
  std::optional<double> band_limit_;
};

struct SelfEnergyOptions {
  ResiduePrescription prescription = ResiduePrescription::Half;
  SelfEnergyMode mode = SelfEnergyMode::Continued;
};

/// Regularized bath integral  int_0^inf J(w)/(E - w) dw.
///
/// For Re E > 0 the principal value is obtained by singularity subtraction
///   int_0^W [J(w) - J(E)]/(E - w) dw + J(E) log(E/(W - E)) + tail,  W = 40 w_c,
/// followed by the residue term -i c J(E). For Re E <= 0 the integral is
/// regular and evaluated directly. Requires |Re E| <= 10 w_c.
std::complex<double> self_energy(const BathParams& b, std::complex<double> E,
                                 const SelfEnergyOptions& opts = {});

}  // namespace gaah::bath

#include "gaah/bath.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "gaah/errors.hpp"
#include "gaah/quadrature.hpp"

namespace gaah::bath {

namespace {

constexpr const char* kModule = "bath";
constexpr double kAbsTol = 1e-10;
constexpr double kCutoffFactor = 40.0;  // W = 40 w_c
constexpr double kTailFactor = 100.0;   // tail integrated out to 100 w_c; beyond is < e^-100

using cplx = std::complex<double>;

}  // namespace

void BathParams::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ParameterDomainError(kModule, "bath.eta must be >= 0");
  }
  if (!(omega_c > 0.0) || !std::isfinite(omega_c)) {
    throw ParameterDomainError(kModule, "bath.omega_c must be > 0");
  }
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw ParameterDomainError(kModule, "bath.s must be > 0");
  }
}

std::string_view to_string(ResiduePrescription p) {
  return p == ResiduePrescription::Half ? "half" : "full";
}

std::string_view to_string(SelfEnergyMode m) {
  return m == SelfEnergyMode::Continued ? "continued" : "real_axis";
}

std::optional<ResiduePrescription> parse_prescription(std::string_view s) {
  if (s == "half") return ResiduePrescription::Half;
  if (s == "full") return ResiduePrescription::Full;
  return std::nullopt;
}

std::optional<SelfEnergyMode> parse_mode(std::string_view s) {
  if (s == "continued") return SelfEnergyMode::Continued;
  if (s == "real_axis") return SelfEnergyMode::RealAxis;
  return std::nullopt;
}

double residue_factor(ResiduePrescription p) {
  return p == ResiduePrescription::Half ? std::numbers::pi / 2.0 : std::numbers::pi;
}

double spectral_density(const BathParams& b, double omega) {
  if (omega < 0.0) throw ParameterDomainError(kModule, "spectral_density: omega must be >= 0");
  if (omega == 0.0) return 0.0;
  return b.eta * omega * std::pow(omega / b.omega_c, b.s - 1.0) * std::exp(-omega / b.omega_c);
}

cplx spectral_density(const BathParams& b, cplx z) {
  if (z == cplx{}) return {};
  const cplx power = b.s == 1.0 ? z : std::pow(z / b.omega_c, b.s - 1.0) * z;
  return b.eta * power * std::exp(-z / b.omega_c);
}

cplx spectral_density_derivative(const BathParams& b, cplx z) {
  if (z == cplx{}) return b.s == 1.0 ? cplx{b.eta} : cplx{};
  return spectral_density(b, z) * (b.s / z - 1.0 / b.omega_c);
}

double integrated_density(const BathParams& b, double upper) {
  const double scale = b.eta * b.omega_c * b.omega_c * std::tgamma(b.s + 1.0);
  if (std::isinf(upper)) return scale;
  return scale * boost::math::gamma_p(b.s + 1.0, upper / b.omega_c);
}

cplx memory_kernel(const BathParams& b, double t) {
  const cplx base{1.0 / b.omega_c, t};
  const double pref = b.eta / std::pow(b.omega_c, b.s - 1.0) * std::tgamma(b.s + 1.0);
  if (b.s == 1.0) return pref / (base * base);
  return pref * std::pow(base, -(b.s + 1.0));
}

cplx band_limited_kernel(const BathParams& b, double band_limit, double t) {
  if (!(band_limit > 0.0)) throw ParameterDomainError(kModule, "band limit must be > 0");
  if (b.s == 1.0) {
    // eta int_0^W w exp(-p w) dw = eta [1 - exp(-pW)(1 + pW)] / p^2
    const cplx p{1.0 / b.omega_c, t};
    const cplx pw = p * band_limit;
    return b.eta * (1.0 - std::exp(-pw) * (1.0 + pw)) / (p * p);
  }
  auto integrand = [&](double w) { return spectral_density(b, w) * std::exp(cplx{0.0, -w * t}); };
  // Panels no wider than half an oscillation keep the adaptive rule efficient.
  const double width = t > 0.0 ? std::min(band_limit, std::numbers::pi / t) : band_limit;
  cplx sum{};
  for (double lo = 0.0; lo < band_limit; lo += width) {
    const double hi = std::min(band_limit, lo + width);
    sum += quadrature::integrate(integrand, lo, hi, 1e-13, kModule).value;
  }
  return sum;
}

MemoryKernel::MemoryKernel(BathParams b, std::optional<double> band_limit)
    : params_(b), band_limit_(band_limit) {
  params_.validate();
}

cplx MemoryKernel::operator()(double t) const {
  return band_limit_ ? band_limited_kernel(params_, *band_limit_, t) : memory_kernel(params_, t);
}

namespace {

// int_W^(100 w_c) J(w)/(E - w) dw; J ~ exp(-40) here so this is a small correction.
cplx tail(const BathParams& b, cplx E, double W) {
  auto f = [&](double w) { return spectral_density(b, w) / (E - w); };
  return quadrature::integrate(f, W, kTailFactor * b.omega_c, kAbsTol, kModule).value;
}

// Regular integral int_0^inf J(w)/(E - w) dw for Re E <= 0.
cplx direct(const BathParams& b, cplx E) {
  auto f = [&](double w) { return spectral_density(b, w) / (E - w); };
  const double W = kCutoffFactor * b.omega_c;
  cplx sum = quadrature::integrate(f, 0.0, b.omega_c, kAbsTol, kModule).value;
  sum += quadrature::integrate(f, b.omega_c, W, kAbsTol, kModule).value;
  return sum + tail(b, E, W);
}

// Principal part by subtraction; E may be complex (analytic continuation).
cplx subtracted(const BathParams& b, cplx E) {
  const double W = kCutoffFactor * b.omega_c;
  const cplx JE = spectral_density(b, E);
  const cplx dJE = spectral_density_derivative(b, E);
  const double guard = 1e-13 * (1.0 + std::abs(E));
  auto f = [&](double w) -> cplx {
    const cplx d = E - w;
    if (std::abs(d) < guard) return -dJE;
    return (spectral_density(b, w) - JE) / d;
  };
  const double x = E.real();
  cplx sum{};
  double lo = 0.0;
  for (double split : {x, b.omega_c, W}) {
    if (split <= lo) continue;
    sum += quadrature::integrate(f, lo, split, kAbsTol, kModule).value;
    lo = split;
  }
  // Continuation of P int_0^W dw/(x - w) = log(x / (W - x)).
  const cplx log_term = std::log(E) - std::log(cplx{W} - E);
  return sum + JE * log_term + tail(b, E, W);
}

}  // namespace

cplx self_energy(const BathParams& b, cplx E, const SelfEnergyOptions& opts) {
  b.validate();
  if (!std::isfinite(E.real()) || !std::isfinite(E.imag())) {
    throw ParameterDomainError(kModule, "self_energy: E must be finite");
  }
  if (std::abs(E.real()) > 10.0 * b.omega_c) {
    throw ParameterDomainError(kModule, "self_energy: Re E outside [-10 w_c, 10 w_c]");
  }
  if (b.eta == 0.0) return {};
  // Approached from above the cut the residue changes sign.
  if (opts.mode == SelfEnergyMode::RealAxis && E.imag() > 0.0) return std::conj(self_energy(b, std::conj(E), opts));
  const cplx z = opts.mode == SelfEnergyMode::RealAxis ? cplx{E.real(), 0.0} : E;
  if (z.real() <= 0.0) return direct(b, z);
  const double c = residue_factor(opts.prescription);
  return subtracted(b, z) - cplx{0.0, c} * spectral_density(b, z);
}

}  // namespace gaah::bath

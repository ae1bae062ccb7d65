#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace sasbayes {

// Unit system: lengths in nm, q in 1/nm, scattering length densities in
// 1/nm^2, intensities and the flat background b in 1/cm, counting times in s.
// The contrast term drho^2 * V of the scattering cross-section is assembled
// in 1/nm and converted to the conventional absolute scale of 1/cm here.
inline constexpr double kInverseNmToInverseCm = 1.0e7;

// First positive root of tan(x) = x, i.e. the first zero of the sphere form
// amplitude.  Useful in tests and when reasoning about intensity minima.
inline constexpr double kSphereAmplitudeFirstRoot = 4.493409457909064;

// Shared instrument/sample constants of the sphere models.
struct SphereConstants {
  double volume_fraction = 1.0;   // dimensionless
  double rho_solvent = 1.0e-4;    // particle scattering length density, 1/nm^2
  double rho_medium = 6.3e-4;     // matrix scattering length density, 1/nm^2

  double contrast() const { return rho_solvent - rho_medium; }

  void validate() const {
    if (!(volume_fraction > 0.0))
      throw std::invalid_argument("SphereConstants: volume_fraction must be > 0");
    if (contrast() == 0.0)
      throw std::invalid_argument("SphereConstants: contrast (rho_solvent - rho_medium) must be nonzero");
  }
};

struct MonodisperseParams {
  double radius;      // R, nm
  double background;  // b, 1/cm
  double time;        // t, s

  void validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("MonodisperseParams: radius must be > 0");
    if (!(background > 0.0)) throw std::invalid_argument("MonodisperseParams: background must be > 0");
    if (!(time > 0.0)) throw std::invalid_argument("MonodisperseParams: time must be > 0");
  }
};

struct PolydisperseParams {
  double mean_radius;  // R, nm
  double sigma;        // Gaussian size-distribution width, nm
  double background;   // b, 1/cm
  double time;         // t, s

  void validate() const {
    if (!(mean_radius > 0.0)) throw std::invalid_argument("PolydisperseParams: mean_radius must be > 0");
    if (!(sigma > 0.0)) throw std::invalid_argument("PolydisperseParams: sigma must be > 0");
    if (!(background > 0.0)) throw std::invalid_argument("PolydisperseParams: background must be > 0");
    if (!(time > 0.0)) throw std::invalid_argument("PolydisperseParams: time must be > 0");
  }
};

// Composite-Simpson rule over [max(0, R - w*sigma), R + w*sigma].
struct QuadratureSpec {
  int node_count = 257;                  // odd, >= 33
  double window_halfwidth_sigmas = 6.0;  // w, >= 5

  void validate() const {
    if (node_count < 33 || node_count % 2 == 0)
      throw std::invalid_argument("QuadratureSpec: node_count must be odd and >= 33");
    if (!(window_halfwidth_sigmas >= 5.0))
      throw std::invalid_argument("QuadratureSpec: window_halfwidth_sigmas must be >= 5");
  }
};

// Sphere form amplitude Phi(x) = 3 [sin x - x cos x] / x^3.
//
// Direct evaluation below x ~ 1e-2 loses relative accuracy to cancellation
// (sin x - x cos x ~ x^3/3 while each term is ~x), so small arguments use the
// Taylor series 1 - x^2/10 + x^4/280; the next term, x^6/15120 ~ 7e-17 at the
// crossover, is below double precision.
inline double sphere_form_amplitude(double x) {
  const double x2 = x * x;
  if (x2 < 1.0e-4) return 1.0 - x2 / 10.0 + x2 * x2 / 280.0;
  return 3.0 * (std::sin(x) - x * std::cos(x)) / (x2 * x);
}

inline double sphere_volume(double radius) {
  return (4.0 * std::numbers::pi / 3.0) * radius * radius * radius;
}

// Unnormalized Gaussian number density of radii, f(r) = exp(-(r-R)^2/2s^2) / (s sqrt(2 pi)).
// The quadrature window clips it; no renormalization over the window.
inline double gaussian_size_pdf(double r, double mean_radius, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_size_pdf: sigma must be > 0");
  const double z = (r - mean_radius) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

// Mean particle volume under the Gaussian size distribution over r in
// (-inf, inf): <V> = (4 pi / 3) R^3 (1 + 3 sigma^2 / R^2); the r and r^3
// moments of the truncated negative tail are negligible for sigma << R.
inline double mean_volume(double mean_radius, double sigma) {
  if (!(mean_radius > 0.0)) throw std::invalid_argument("mean_volume: mean_radius must be > 0");
  if (!(sigma >= 0.0)) throw std::invalid_argument("mean_volume: sigma must be >= 0");
  const double ratio = sigma / mean_radius;
  return sphere_volume(mean_radius) * (1.0 + 3.0 * ratio * ratio);
}

// Expected counts of a monodisperse sphere sample:
//   I(q) = (scale * phi * drho^2 * V * Phi(qR)^2 + b) * t.
inline double monodisperse_intensity(double q, const MonodisperseParams& p,
                                     const SphereConstants& c) {
  if (!(q >= 0.0)) throw std::invalid_argument("monodisperse_intensity: q must be >= 0");
  p.validate();
  c.validate();
  const double drho = c.contrast();
  const double amp = sphere_form_amplitude(q * p.radius);
  const double cross_section =
      kInverseNmToInverseCm * c.volume_fraction * drho * drho * sphere_volume(p.radius) * amp * amp;
  return (cross_section + p.background) * p.time;
}

namespace detail {

// Per-node factors of the polydisperse quadrature that do not depend on q:
//   A_k = simpson_w_k * scale * (phi / <V>) * drho^2 * ((4 pi/3) r_k^3)^2 * f(r_k),
// so that I(q) = (sum_k A_k Phi(q r_k)^2 + b) * t.
struct PolyNodes {
  double lo = 0.0;
  double step = 0.0;
  std::vector<double> weight;
};

inline PolyNodes make_poly_nodes(const PolydisperseParams& p, const SphereConstants& c,
                                 const QuadratureSpec& quad) {
  const int n = quad.node_count;
  const double lo = std::max(0.0, p.mean_radius - quad.window_halfwidth_sigmas * p.sigma);
  const double hi = p.mean_radius + quad.window_halfwidth_sigmas * p.sigma;
  const double h = (hi - lo) / static_cast<double>(n - 1);
  const double drho = c.contrast();
  const double prefactor = kInverseNmToInverseCm * c.volume_fraction /
                           mean_volume(p.mean_radius, p.sigma) * drho * drho * (h / 3.0);

  PolyNodes nodes;
  nodes.lo = lo;
  nodes.step = h;
  nodes.weight.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double r = (k == n - 1) ? hi : lo + h * static_cast<double>(k);
    const double simpson = (k == 0 || k == n - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const double form_volume = sphere_volume(r);
    nodes.weight[static_cast<std::size_t>(k)] =
        simpson * prefactor * form_volume * form_volume * gaussian_size_pdf(r, p.mean_radius, p.sigma);
  }
  return nodes;
}

// Quadrature sum at one q, with sin/cos advanced by the angle-addition
// rotation across the equally spaced nodes: one sincos per q instead of one
// per node.  The rotation drift over a few hundred steps is ~1e-13 relative,
// far below the quadrature tolerance.
inline double poly_quadrature_sum(double q, const PolyNodes& nodes) {
  const double dx = q * nodes.step;
  double x = q * nodes.lo;
  double s = std::sin(x);
  double c = std::cos(x);
  const double sd = std::sin(dx);
  const double cd = std::cos(dx);
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes.weight.size(); ++k) {
    double amp;
    const double x2 = x * x;
    if (x2 < 1.0e-4) {
      amp = 1.0 - x2 / 10.0 + x2 * x2 / 280.0;
    } else {
      amp = 3.0 * (s - x * c) / (x2 * x);
    }
    sum += nodes.weight[k] * amp * amp;
    const double s_next = s * cd + c * sd;
    c = c * cd - s * sd;
    s = s_next;
    x += dx;
  }
  return sum;
}

}  // namespace detail

// Expected counts of a polydisperse sphere sample:
//   I(q) = (scale * (phi / <V>) * integral F(q,r)^2 f(r) dr + b) * t,
// with F(q,r) = drho (4 pi/3) r^3 Phi(qr), integrated by composite Simpson
// over [max(0, R - w s), R + w s].  This per-node form is the plain reference
// path; the model wrapper below shares nodes across a whole curve.
inline double polydisperse_intensity(double q, const PolydisperseParams& p,
                                     const SphereConstants& c, const QuadratureSpec& quad = {}) {
  if (!(q >= 0.0)) throw std::invalid_argument("polydisperse_intensity: q must be >= 0");
  p.validate();
  c.validate();
  quad.validate();
  const detail::PolyNodes nodes = detail::make_poly_nodes(p, c, quad);
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes.weight.size(); ++k) {
    const double x = q * (nodes.lo + nodes.step * static_cast<double>(k));
    const double amp = sphere_form_amplitude(x);
    sum += nodes.weight[k] * amp * amp;
  }
  return (sum + p.background) * p.time;
}

// Model interface used by the likelihood and the sampler.  A model maps a
// parameter vector to expected counts; the curve form exists because the
// per-proposal cost evaluates a whole dataset at once.
template <typename M>
concept ScatteringModel = requires(const M& m, double q, std::span<const double> theta,
                                   std::span<const double> qs, std::span<double> out) {
  { m.dimension() } -> std::convertible_to<std::size_t>;
  { m.parameter_name(std::size_t{0}) } -> std::convertible_to<std::string_view>;
  { m.intensity(q, theta) } -> std::convertible_to<double>;
  m.intensity_curve(qs, theta, out);
};

class MonodisperseModel {
 public:
  explicit MonodisperseModel(const SphereConstants& constants = {}) : constants_(constants) {
    constants_.validate();
  }

  std::size_t dimension() const { return 3; }

  std::string_view parameter_name(std::size_t i) const {
    static constexpr std::string_view names[] = {"R", "b", "t"};
    if (i >= 3) throw std::out_of_range("MonodisperseModel: parameter index out of range");
    return names[i];
  }

  static MonodisperseParams unpack(std::span<const double> theta) {
    if (theta.size() != 3)
      throw std::invalid_argument("MonodisperseModel: expected 3 parameters (R, b, t)");
    return {theta[0], theta[1], theta[2]};
  }

  double intensity(double q, std::span<const double> theta) const {
    return monodisperse_intensity(q, unpack(theta), constants_);
  }

  void intensity_curve(std::span<const double> qs, std::span<const double> theta,
                       std::span<double> out) const {
    if (out.size() != qs.size())
      throw std::invalid_argument("intensity_curve: output size must match q size");
    const MonodisperseParams p = unpack(theta);
    p.validate();
    const double drho = constants_.contrast();
    const double k = kInverseNmToInverseCm * constants_.volume_fraction * drho * drho *
                     sphere_volume(p.radius);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      if (!(qs[i] >= 0.0)) throw std::invalid_argument("intensity_curve: q must be >= 0");
      const double amp = sphere_form_amplitude(qs[i] * p.radius);
      out[i] = (k * amp * amp + p.background) * p.time;
    }
  }

  const SphereConstants& constants() const { return constants_; }

 private:
  SphereConstants constants_;
};

class PolydisperseModel {
 public:
  explicit PolydisperseModel(const SphereConstants& constants = {},
                             const QuadratureSpec& quadrature = {})
      : constants_(constants), quadrature_(quadrature) {
    constants_.validate();
    quadrature_.validate();
  }

  std::size_t dimension() const { return 4; }

  std::string_view parameter_name(std::size_t i) const {
    static constexpr std::string_view names[] = {"R", "sigma", "b", "t"};
    if (i >= 4) throw std::out_of_range("PolydisperseModel: parameter index out of range");
    return names[i];
  }

  static PolydisperseParams unpack(std::span<const double> theta) {
    if (theta.size() != 4)
      throw std::invalid_argument("PolydisperseModel: expected 4 parameters (R, sigma, b, t)");
    return {theta[0], theta[1], theta[2], theta[3]};
  }

  double intensity(double q, std::span<const double> theta) const {
    return polydisperse_intensity(q, unpack(theta), constants_, quadrature_);
  }

  void intensity_curve(std::span<const double> qs, std::span<const double> theta,
                       std::span<double> out) const {
    if (out.size() != qs.size())
      throw std::invalid_argument("intensity_curve: output size must match q size");
    const PolydisperseParams p = unpack(theta);
    p.validate();
    const detail::PolyNodes nodes = detail::make_poly_nodes(p, constants_, quadrature_);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      if (!(qs[i] >= 0.0)) throw std::invalid_argument("intensity_curve: q must be >= 0");
      out[i] = (detail::poly_quadrature_sum(qs[i], nodes) + p.background) * p.time;
    }
  }

  const SphereConstants& constants() const { return constants_; }
  const QuadratureSpec& quadrature() const { return quadrature_; }

 private:
  SphereConstants constants_;
  QuadratureSpec quadrature_;
};

static_assert(ScatteringModel<MonodisperseModel>);
static_assert(ScatteringModel<PolydisperseModel>);

}  // namespace sasbayes

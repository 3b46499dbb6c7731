#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "oef/units.hpp"

// Closed-form frequency-domain pipeline models: distributed circuit
// parameters, two-port transmission parameters, lumped pi equivalents and
// the heat transmission factor.
//
// Both pipe families reduce to the first-order system
//
//   d/dx [u; f] = [[-k, -z], [-y, 0]] [u; f]
//
// (u = pressure or temperature phasor, f = mass or heat flow phasor,
// z = series impedance per length, y = shunt admittance per length, k = the
// pressure-controlled source coefficient, zero for heat). The two-port is
// the matrix exponential of that system over the pipe length, evaluated
// with combined exponents so large attenuation never overflows and with a
// series fallback where the hyperbolic argument is tiny.

namespace oef {

using Complex = std::complex<double>;

struct GasPipeGeometry {
  double length = 0.0;         // m
  double diameter = 0.0;       // m
  double cross_section = 0.0;  // m^2; <= 0 means derive from diameter
  double friction = 0.0;       // Darcy friction factor, dimensionless
  double incline_angle = 0.0;  // rad
  double sonic_speed = 340.0;  // m/s
  double base_velocity = 0.0;  // m/s, linearization point of the friction term

  void validate() const {
    if (!(length > 0.0)) throw std::invalid_argument("gas pipe: length <= 0");
    if (!(diameter > 0.0)) throw std::invalid_argument("gas pipe: diameter <= 0");
    if (friction < 0.0) throw std::invalid_argument("gas pipe: friction < 0");
    if (!(sonic_speed > 0.0)) throw std::invalid_argument("gas pipe: sonic speed <= 0");
    if (cross_section > 0.0) {
      const double derived = std::numbers::pi * diameter * diameter / 4.0;
      if (std::abs(cross_section - derived) > 0.01 * derived)
        throw std::invalid_argument("gas pipe: cross_section inconsistent with diameter");
    }
  }
  double section() const {
    return cross_section > 0.0 ? cross_section
                               : std::numbers::pi * diameter * diameter / 4.0;
  }
};

// Per-length parameters of the hydraulic circuit.
struct GasLineParams {
  double resistance = 0.0;   // R', Pa.s/(kg.m)
  double inertance = 0.0;    // L', 1/m^2
  double capacitance = 0.0;  // C', kg/(Pa.m)
  double source_gain = 0.0;  // K', 1/m; couples pressure into the flow gradient
};

struct HeatPipeGeometry {
  double length = 0.0;         // m
  double cross_section = 0.0;  // m^2
  double heat_loss = 0.0;      // mu, W/(m.K)
  double specific_heat = 4182.0;  // c_p, J/(kg.K)
  double density = 1000.0;        // rho, kg/m^3
  double mass_flow = 0.0;         // m, kg/s (preset constant, quality regulation)

  void validate() const {
    if (!(length > 0.0)) throw std::invalid_argument("heat pipe: length <= 0");
    if (!(cross_section > 0.0)) throw std::invalid_argument("heat pipe: cross_section <= 0");
    if (heat_loss < 0.0) throw std::invalid_argument("heat pipe: heat_loss < 0");
    if (!(specific_heat > 0.0)) throw std::invalid_argument("heat pipe: specific_heat <= 0");
    if (!(density > 0.0)) throw std::invalid_argument("heat pipe: density <= 0");
    if (!(mass_flow > 0.0)) throw std::invalid_argument("heat pipe: mass_flow <= 0");
  }
};

// Per-length parameters of the thermal circuit.
struct HeatLineParams {
  double resistance = 0.0;   // R'
  double inertance = 0.0;    // L'
  double conductance = 0.0;  // G'
  double capacitance = 0.0;  // C'
};

struct TwoPortParams {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};
  Complex c{0.0, 0.0};
  Complex d{1.0, 0.0};
  double omega = 0.0;

  Complex determinant() const { return a * d - b * c; }

  // Transfer-matrix composition: the two-port of two pipes in series
  // (this pipe first, `next` downstream).
  TwoPortParams cascade(const TwoPortParams& next) const {
    TwoPortParams out;
    out.a = next.a * a + next.b * c;
    out.b = next.a * b + next.b * d;
    out.c = next.c * a + next.d * c;
    out.d = next.c * b + next.d * d;
    out.omega = omega;
    return out;
  }
};

// Pi-equivalent of a two-port. Heat pipes are reciprocal: source_gain = 0
// and the two shunts coincide.
struct LumpedPi {
  Complex series_impedance{0.0, 0.0};
  Complex source_gain{0.0, 0.0};
  Complex shunt_from{0.0, 0.0};
  Complex shunt_to{0.0, 0.0};
};

inline GasLineParams gas_distributed_params(const GasPipeGeometry& geom) {
  geom.validate();
  const double s = geom.section();
  const double d = geom.diameter;
  const double v = geom.base_velocity;
  const double cs2 = geom.sonic_speed * geom.sonic_speed;
  GasLineParams p;
  p.resistance = geom.friction * v / (s * d);
  p.inertance = 1.0 / s;
  p.capacitance = s / cs2;
  p.source_gain = (2.0 * d * units::kGravity * std::sin(geom.incline_angle) -
                   geom.friction * v * v) /
                  (2.0 * d * cs2);
  return p;
}

inline HeatLineParams heat_distributed_params(const HeatPipeGeometry& geom) {
  geom.validate();
  HeatLineParams p;
  const double cp = geom.specific_heat;
  const double m2 = geom.mass_flow * geom.mass_flow;
  p.resistance = geom.heat_loss / (cp * cp * m2);
  p.inertance = geom.density * geom.cross_section / (cp * m2);
  p.conductance = geom.heat_loss;
  p.capacitance = cp * geom.density * geom.cross_section;
  return p;
}

namespace detail {

// exp(l * [[-k, -z], [-y, 0]]) via the shifted eigenvalue pair
// -k/2 +- sigma, sigma = sqrt(k^2/4 + z*y).
inline TwoPortParams propagate(Complex z_series, Complex y_shunt, double source_gain,
                               double length, double omega) {
  const Complex sigma = std::sqrt(Complex{source_gain * source_gain / 4.0, 0.0} +
                                  z_series * y_shunt);
  const Complex sl = sigma * length;
  const double half_drift = source_gain * length / 2.0;

  Complex cosh_term;       // e^{-kl/2} cosh(sigma l)
  Complex sinh_over_sig;   // e^{-kl/2} sinh(sigma l) / sigma
  if (std::abs(sl) < 1e-2) {
    const Complex sl2 = sl * sl;
    const Complex scale = std::exp(Complex{-half_drift, 0.0});
    cosh_term = scale * (1.0 + sl2 / 2.0 + sl2 * sl2 / 24.0);
    sinh_over_sig = scale * length * (1.0 + sl2 / 6.0 + sl2 * sl2 / 120.0);
  } else {
    const Complex ep = std::exp(sl - half_drift);
    const Complex em = std::exp(-sl - half_drift);
    cosh_term = (ep + em) / 2.0;
    sinh_over_sig = (ep - em) / (2.0 * sigma);
  }

  TwoPortParams tp;
  tp.omega = omega;
  const Complex half_gain{source_gain / 2.0, 0.0};
  tp.a = cosh_term - half_gain * sinh_over_sig;
  tp.b = -z_series * sinh_over_sig;
  tp.c = -y_shunt * sinh_over_sig;
  tp.d = cosh_term + half_gain * sinh_over_sig;
  return tp;
}

}  // namespace detail

inline TwoPortParams gas_two_port(const GasLineParams& p, double omega, double length) {
  if (!(length > 0.0)) throw std::invalid_argument("gas_two_port: length <= 0");
  if (omega < 0.0) throw std::invalid_argument("gas_two_port: omega < 0");
  const Complex z{p.resistance, omega * p.inertance};
  const Complex y{0.0, omega * p.capacitance};
  return detail::propagate(z, y, p.source_gain, length, omega);
}

inline TwoPortParams heat_two_port(const HeatLineParams& p, double omega, double length) {
  if (!(length > 0.0)) throw std::invalid_argument("heat_two_port: length <= 0");
  if (omega < 0.0) throw std::invalid_argument("heat_two_port: omega < 0");
  const Complex z{p.resistance, omega * p.inertance};
  const Complex y{p.conductance, omega * p.capacitance};
  return detail::propagate(z, y, 0.0, length, omega);
}

// phi = e^{-gamma l}: outlet heat-flow phasor over inlet heat-flow phasor.
inline Complex heat_transmission_factor(const HeatLineParams& p, double omega,
                                        double length) {
  if (!(length > 0.0)) throw std::invalid_argument("heat_transmission_factor: length <= 0");
  const Complex z{p.resistance, omega * p.inertance};
  const Complex y{p.conductance, omega * p.capacitance};
  const Complex gamma = std::sqrt(z * y);
  return std::exp(-gamma * length);
}

inline LumpedPi gas_lumped(const TwoPortParams& tp) {
  if (std::abs(tp.b) == 0.0)
    throw std::invalid_argument("gas_lumped: degenerate two-port (B = 0)");
  LumpedPi pi;
  const Complex det = tp.determinant();
  pi.series_impedance = -tp.b;
  pi.source_gain = 1.0 - det;
  pi.shunt_from = (det - tp.a) / tp.b;
  pi.shunt_to = (1.0 - tp.d) / tp.b;
  return pi;
}

inline LumpedPi heat_lumped(const TwoPortParams& tp) {
  if (std::abs(tp.b) == 0.0)
    throw std::invalid_argument("heat_lumped: degenerate two-port (B = 0)");
  LumpedPi pi;
  pi.series_impedance = -tp.b;
  pi.source_gain = Complex{0.0, 0.0};
  pi.shunt_from = (1.0 - tp.a) / tp.b;
  pi.shunt_to = pi.shunt_from;
  return pi;
}

// Re-expand a pi equivalent into transmission parameters. Used by tests and
// by the admittance-assembly checks; algebraic inverse of gas_lumped /
// heat_lumped.
inline TwoPortParams lumped_to_two_port(const LumpedPi& pi, double omega) {
  TwoPortParams tp;
  tp.omega = omega;
  const Complex z = pi.series_impedance;
  tp.a = 1.0 - pi.source_gain + z * pi.shunt_from;
  tp.b = -z;
  tp.c = -(pi.shunt_from + pi.shunt_to * tp.a);
  tp.d = 1.0 + z * pi.shunt_to;
  return tp;
}

}  // namespace oef

#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

// One-sided discrete Fourier analysis/synthesis with the magnitude
// convention used throughout the dispatch model: coefficient kappa of a
// real N-point series x is
//
//   c(kappa) = v(kappa)/N * sum_tau x(tau) e^{-j 2 pi kappa tau / N}
//
// with v = 1 at DC and (for even N) at Nyquist, v = 2 otherwise, so that
// x(tau) = sum_kappa Re( c(kappa) e^{j 2 pi kappa tau / N} ).
//
// Transforms are direct O(N^2): horizons are a few hundred points and the
// synthesis rows are needed explicitly as constraint coefficients anyway.

namespace oef {

using Complex = std::complex<double>;

struct HorizonConfig {
  int history_steps = 0;   // N_ht
  int dispatch_steps = 1;  // N_dt
  double step_seconds = 900.0;

  int total_steps() const { return history_steps + dispatch_steps; }
  int freq_count() const { return 1 + total_steps() / 2; }
  // angular frequency of component kappa over the periodically extended
  // horizon
  double omega(int kappa) const {
    return 2.0 * std::numbers::pi * kappa / (total_steps() * step_seconds);
  }
  int first_dispatch_index() const { return history_steps; }

  void validate() const {
    if (history_steps < 0) throw std::invalid_argument("horizon: history_steps < 0");
    if (dispatch_steps < 1) throw std::invalid_argument("horizon: dispatch_steps < 1");
    if (!(step_seconds > 0.0)) throw std::invalid_argument("horizon: step_seconds <= 0");
  }
};

// Magnitude scaling v(kappa) of the one-sided spectrum.
inline double onesided_scale(int kappa, int n_total) {
  return (kappa == 0 || 2 * kappa == n_total) ? 1.0 : 2.0;
}

// Frequency indices whose imaginary part is structurally zero: DC, plus
// Nyquist when the horizon length is even. Keeps the real degree-of-freedom
// count of the spectrum equal to the series length.
inline std::vector<int> freedom_mask(int n_total) {
  if (n_total < 1) throw std::invalid_argument("freedom_mask: n_total < 1");
  std::vector<int> mask{0};
  if (n_total % 2 == 0 && n_total > 1) mask.push_back(n_total / 2);
  return mask;
}

inline std::vector<Complex> forward_dft(std::span<const double> series) {
  const int n = static_cast<int>(series.size());
  if (n < 1) throw std::invalid_argument("forward_dft: empty series");
  const int nf = 1 + n / 2;
  std::vector<Complex> coeffs(nf);
  for (int k = 0; k < nf; ++k) {
    Complex acc{0.0, 0.0};
    for (int t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * k * t / n;
      acc += series[t] * Complex{std::cos(ang), std::sin(ang)};
    }
    coeffs[k] = acc * (onesided_scale(k, n) / n);
  }
  return coeffs;
}

// Synthesis row: entries w^{tau kappa}, w = e^{j 2 pi / N}. The synthesized
// sample is Re(row . coeffs).
inline std::vector<Complex> idft_row(int tau, int n_total, int n_freq) {
  std::vector<Complex> row(n_freq);
  for (int k = 0; k < n_freq; ++k) {
    const double ang = 2.0 * std::numbers::pi * k * tau / n_total;
    row[k] = Complex{std::cos(ang), std::sin(ang)};
  }
  return row;
}

inline double inverse_dft(std::span<const Complex> coeffs, int tau, int n_total) {
  double value = 0.0;
  for (int k = 0; k < static_cast<int>(coeffs.size()); ++k) {
    const double ang = 2.0 * std::numbers::pi * k * tau / n_total;
    value += coeffs[k].real() * std::cos(ang) - coeffs[k].imag() * std::sin(ang);
  }
  return value;
}

inline std::vector<double> inverse_dft_series(std::span<const Complex> coeffs, int n_total) {
  std::vector<double> out(n_total);
  for (int t = 0; t < n_total; ++t) out[t] = inverse_dft(coeffs, t, n_total);
  return out;
}

}  // namespace oef

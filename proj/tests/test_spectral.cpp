#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "oef/spectral.hpp"

using oef::Complex;

TEST_CASE("forward_dft of hand-evaluated series") {
  // constant series
  auto c = oef::forward_dft(std::vector<double>{1, 1, 1, 1});
  REQUIRE(c.size() == 3);
  CHECK(std::abs(c[0] - Complex{1, 0}) < 1e-12);
  CHECK(std::abs(c[1]) < 1e-12);
  CHECK(std::abs(c[2]) < 1e-12);

  // alternating series: v = (1,2,1), sums evaluated by hand
  c = oef::forward_dft(std::vector<double>{1, 0, 1, 0});
  CHECK(std::abs(c[0] - Complex{0.5, 0}) < 1e-12);
  CHECK(std::abs(c[1]) < 1e-12);
  CHECK(std::abs(c[2] - Complex{0.5, 0}) < 1e-12);

  // single spike, geometric-sum evaluation
  c = oef::forward_dft(std::vector<double>{1, 0, 0, 0});
  CHECK(std::abs(c[0] - Complex{0.25, 0}) < 1e-12);
  CHECK(std::abs(c[1] - Complex{0.5, 0}) < 1e-12);
  CHECK(std::abs(c[2] - Complex{0.25, 0}) < 1e-12);
}

TEST_CASE("inverse_dft continues the alternating example") {
  std::vector<Complex> c{{0.5, 0}, {0, 0}, {0.5, 0}};
  const double expect[4] = {1, 0, 1, 0};
  for (int t = 0; t < 4; ++t)
    CHECK(oef::inverse_dft(c, t, 4) == Catch::Approx(expect[t]).margin(1e-12));

  std::vector<Complex> zeros{{0, 0}, {0, 0}, {0, 0}};
  for (int t = 0; t < 4; ++t) CHECK(oef::inverse_dft(zeros, t, 4) == 0.0);
}

TEST_CASE("round trip reproduces random series") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int len : {1, 2, 3, 4, 5, 17, 96, 97, 192}) {
    std::vector<double> x(len);
    for (auto& v : x) v = dist(rng);
    auto c = oef::forward_dft(x);
    for (int t = 0; t < len; ++t)
      REQUIRE(oef::inverse_dft(c, t, len) == Catch::Approx(x[t]).margin(1e-10));
  }
}

TEST_CASE("freedom mask and degree-of-freedom count") {
  CHECK(oef::freedom_mask(4) == std::vector<int>{0, 2});
  CHECK(oef::freedom_mask(5) == std::vector<int>{0});
  CHECK(oef::freedom_mask(1) == std::vector<int>{0});
  for (int n = 1; n <= 40; ++n) {
    const int nf = 1 + n / 2;
    const int mask = static_cast<int>(oef::freedom_mask(n).size());
    CHECK(2 * nf - mask == n);
  }
}

TEST_CASE("idft_row matches inverse_dft and reconstructs the identity") {
  const int n = 6, nf = 4;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Complex> c(nf);
  for (auto& v : c) v = {dist(rng), dist(rng)};
  c[0].imag(0.0);
  c[3].imag(0.0);
  for (int t = 0; t < n; ++t) {
    auto row = oef::idft_row(t, n, nf);
    double via_row = 0.0;
    for (int k = 0; k < nf; ++k)
      via_row += row[k].real() * c[k].real() - row[k].imag() * c[k].imag();
    CHECK(via_row == Catch::Approx(oef::inverse_dft(c, t, n)).margin(1e-13));
  }
  // row(tau) dotted with the transform of each basis vector gives e_tau
  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < n; ++s) {
      std::vector<double> basis(n, 0.0);
      basis[s] = 1.0;
      auto cb = oef::forward_dft(basis);
      const double v = oef::inverse_dft(cb, t, n);
      CHECK(v == Catch::Approx(t == s ? 1.0 : 0.0).margin(1e-10));
    }
  }
  // tau = 0 row is all ones
  auto row0 = oef::idft_row(0, n, nf);
  for (auto& w : row0) CHECK(std::abs(w - Complex{1, 0}) < 1e-15);
}

TEST_CASE("linearity and periodic extension") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const int n = 24;
  std::vector<double> x(n), y(n), z(n);
  for (int i = 0; i < n; ++i) {
    x[i] = dist(rng);
    y[i] = dist(rng);
    z[i] = 1.5 * x[i] - 0.25 * y[i];
  }
  auto cx = oef::forward_dft(x), cy = oef::forward_dft(y), cz = oef::forward_dft(z);
  for (size_t k = 0; k < cz.size(); ++k)
    CHECK(std::abs(cz[k] - (1.5 * cx[k] - 0.25 * cy[k])) < 1e-12);
  for (int t = 0; t < n; ++t)
    CHECK(oef::inverse_dft(cx, t, n) ==
          Catch::Approx(oef::inverse_dft(cx, t + n, n)).margin(1e-10));
}

TEST_CASE("energy consistency between series and one-sided coefficients") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int n : {5, 8, 33, 96}) {
    std::vector<double> x(n);
    for (auto& v : x) v = dist(rng);
    auto c = oef::forward_dft(x);
    double lhs = 0.0;
    for (double v : x) lhs += v * v;
    lhs /= n;
    double rhs = 0.0;
    for (size_t k = 0; k < c.size(); ++k)
      rhs += std::norm(c[k]) / oef::onesided_scale(static_cast<int>(k), n);
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-9));
  }
}

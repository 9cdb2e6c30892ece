#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "bloch/dilog.hpp"
#include "bloch/errors.hpp"
#include "oracles.hpp"

using bloch::Complex;
using bloch::pi;

namespace {

std::mt19937 rng(20240901);

Complex random_point(double rmin, double rmax) {
  std::uniform_real_distribution<double> mod(rmin, rmax);
  std::uniform_real_distribution<double> ang(-pi, pi);
  return std::polar(mod(rng), ang(rng));
}

bool off_excluded(Complex z, double margin = 0.05) {
  return std::abs(z) > margin && std::abs(z - Complex(1.0)) > margin;
}

}  // namespace

TEST_CASE("li2 special values") {
  CHECK(bloch::li2(Complex(0.0)) == Complex(0.0));
  CHECK(bloch::li2(Complex(1.0)).real() == doctest::Approx(pi * pi / 6).epsilon(1e-15));
  CHECK(bloch::li2(Complex(1.0)).imag() == 0.0);

  // z = 1/2: series oracle and the closed form pi^2/12 - ln^2(2)/2
  const Complex at_half = bloch::li2(Complex(0.5));
  const Complex series = oracles::li2_series_truncated(Complex(0.5), 200);
  CHECK(std::abs(at_half - series) < 1e-15);
  const double closed = pi * pi / 12 - 0.5 * std::log(2.0) * std::log(2.0);
  CHECK(std::abs(at_half.real() - closed) < 1e-15);
  CHECK(at_half.imag() == 0.0);

  // z = -1: alternating series -pi^2/12
  const Complex at_minus1 = bloch::li2(Complex(-1.0));
  CHECK(std::abs(at_minus1.real() + pi * pi / 12) < 1e-15);
  CHECK(std::abs(at_minus1 - oracles::li2_series_truncated(Complex(-1.0), 2000000)) < 1e-12);

  // z = i: real part -pi^2/48, imaginary part Catalan's constant
  const Complex at_i = bloch::li2(Complex(0.0, 1.0));
  CHECK(std::abs(at_i.real() + pi * pi / 48) < 1e-15);
  CHECK(std::abs(at_i.imag() - oracles::catalan_series()) < 1e-14);
}

TEST_CASE("li2 agrees with the power series on |z| <= 1/2") {
  double worst = 0.0;
  for (int n = 0; n < 500; ++n) {
    const Complex z = random_point(1e-3, 0.5);
    const Complex ref = oracles::li2_series_truncated(z, 200);
    worst = std::max(worst, std::abs(bloch::li2(z) - ref));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("li2 matches the long series inside the unit disc") {
  // 0.5 < |z| < 0.95 exercises the reflection and log-argument routes
  // while the defining series still converges for a reference value
  double worst = 0.0;
  for (int n = 0; n < 300; ++n) {
    const Complex z = random_point(0.55, 0.95);
    if (std::abs(z - Complex(1.0)) < 0.05) continue;
    const Complex ref = oracles::li2_series_truncated(z, 2000);
    worst = std::max(worst, std::abs(bloch::li2(z) - ref));
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("li2 region consistency via reflection and inversion identities") {
  const double pi2_6 = pi * pi / 6;
  double worst_refl = 0.0, worst_inv = 0.0;
  for (int n = 0; n < 400; ++n) {
    Complex z = random_point(0.1, 10.0);
    if (std::abs(z.imag()) < 1e-3) continue;  // keep clear of both cuts
    const Complex one_minus = Complex(1.0) - z;
    const Complex lhs = bloch::li2(z) + bloch::li2(one_minus);
    const Complex rhs = pi2_6 - std::log(z) * std::log(one_minus);
    worst_refl = std::max(worst_refl, std::abs(lhs - rhs));
    const Complex lz = std::log(-z);
    const Complex lhs2 = bloch::li2(z) + bloch::li2(1.0 / z);
    const Complex rhs2 = -pi2_6 - 0.5 * lz * lz;
    worst_inv = std::max(worst_inv, std::abs(lhs2 - rhs2));
  }
  CHECK(worst_refl < 1e-13);
  CHECK(worst_inv < 1e-13);
}

TEST_CASE("li2 branch cut behavior") {
  CHECK_THROWS_AS(bloch::li2(Complex(1.5, 0.0), bloch::CutPolicy::strict_error),
                  bloch::domain_error);
  // default: limit from Im z < 0
  const Complex on_cut = bloch::li2(Complex(1.8, 0.0));
  CHECK(std::abs(on_cut.imag() + pi * std::log(1.8)) < 1e-14);
  const Complex below = bloch::li2(Complex(1.8, -1e-9));
  CHECK(std::abs(on_cut - below) < 1e-7);
  // x in (1, 2) exercises the reflection path of the cut formula
  const Complex on_cut2 = bloch::li2(Complex(1.2, 0.0));
  CHECK(std::abs(on_cut2.imag() + pi * std::log(1.2)) < 1e-14);
  CHECK(std::abs(on_cut2 - bloch::li2(Complex(1.2, -1e-9))) < 1e-7);
  CHECK_THROWS_AS(bloch::li2(Complex(std::nan(""), 0.0)), bloch::domain_error);
}

TEST_CASE("li2 extended precision path agrees") {
  for (int n = 0; n < 100; ++n) {
    const Complex z = random_point(0.1, 5.0);
    if (!off_excluded(z)) continue;
    const auto ext = bloch::li2_ext({z.real(), z.imag()});
    CHECK(std::abs(bloch::li2(z) -
                   Complex(static_cast<double>(ext.real()),
                           static_cast<double>(ext.imag()))) < 1e-14);
  }
}

TEST_CASE("bloch_wigner_d values") {
  CHECK_THROWS_AS(bloch::bloch_wigner_d(Complex(0.0)), bloch::domain_error);
  CHECK_THROWS_AS(bloch::bloch_wigner_d(Complex(1.0)), bloch::domain_error);

  // vanishes identically on the real line
  CHECK(bloch::bloch_wigner_d(Complex(0.37)) == 0.0);
  CHECK(bloch::bloch_wigner_d(Complex(-2.5)) == 0.0);
  CHECK(bloch::bloch_wigner_d(Complex(17.0)) == 0.0);

  // D(i) = Catalan (|i| = 1 kills the correction term)
  CHECK(std::abs(bloch::bloch_wigner_d(Complex(0.0, 1.0)) -
                 oracles::catalan_series()) < 1e-14);

  // the maximum of D, at the regular shape
  const double dmax = bloch::bloch_wigner_d(std::polar(1.0, pi / 3));
  CHECK(std::abs(dmax - oracles::clausen_cl2(pi / 3)) < 1e-13);
  CHECK(dmax == doctest::Approx(1.014941606409653).epsilon(1e-12));
}

TEST_CASE("bloch_wigner_d oddness and six-fold symmetry") {
  double worst = 0.0;
  for (int n = 0; n < 300; ++n) {
    const Complex z = random_point(0.1, 10.0);
    if (!off_excluded(z) || std::abs(z.imag()) < 1e-3) continue;
    const double d = bloch::bloch_wigner_d(z);
    worst = std::max(worst, std::abs(bloch::bloch_wigner_d(std::conj(z)) + d));
    worst = std::max(worst, std::abs(bloch::bloch_wigner_d(1.0 - 1.0 / z) - d));
    worst = std::max(worst, std::abs(bloch::bloch_wigner_d(1.0 / (1.0 - z)) - d));
    worst = std::max(worst, std::abs(bloch::bloch_wigner_d(1.0 / z) + d));
    worst = std::max(worst, std::abs(bloch::bloch_wigner_d(1.0 - z) + d));
    worst = std::max(worst, std::abs(bloch::bloch_wigner_d(z / (z - 1.0)) + d));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("rogers_r") {
  CHECK_THROWS_AS(bloch::rogers_r(Complex(0.0)), bloch::domain_error);
  CHECK_THROWS_AS(bloch::rogers_r(Complex(1.0)), bloch::domain_error);

  // R(1/2) = pi^2/12 (the log product cancels the series defect)
  CHECK(std::abs(bloch::rogers_r(Complex(0.5)).real() - pi * pi / 12) < 1e-14);
  CHECK(bloch::rogers_r(Complex(0.5)).imag() == 0.0);

  // R(z) -> 0 as z -> 0 along the positive axis
  CHECK(std::abs(bloch::rogers_r(Complex(1e-9, 0.0))) < 1e-7);

  // reflection: R(z) + R(1-z) is the constant pi^2/6
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    Complex z = random_point(0.05, 3.0);
    if (!off_excluded(z) || std::abs(z.imag()) < 1e-3) continue;
    const Complex sum = bloch::rogers_r(z) + bloch::rogers_r(1.0 - z);
    worst = std::max(worst, std::abs(sum - Complex(pi * pi / 6)));
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("extended_rogers") {
  // zero flattening: identical bits
  for (int n = 0; n < 100; ++n) {
    const Complex z = random_point(0.1, 5.0);
    if (!off_excluded(z)) continue;
    const Complex r = bloch::rogers_r(z);
    const Complex e = bloch::extended_rogers(z, {0, 0});
    CHECK(r.real() == e.real());
    CHECK(r.imag() == e.imag());
  }

  // linearity of the correction in (p, q)
  const Complex z = std::polar(1.0, pi / 3);
  const Complex d20 = bloch::extended_rogers(z, {2, 0}) -
                      bloch::extended_rogers(z, {0, 0});
  const Complex expected = Complex(0.0, pi / 2) * 2.0 * std::log(Complex(1.0) - z);
  CHECK(std::abs(d20 - expected) < 1e-13);
  const Complex d01 = bloch::extended_rogers(z, {0, 1}) -
                      bloch::extended_rogers(z, {0, 0});
  CHECK(std::abs(d01 - Complex(0.0, pi / 2) * std::log(z)) < 1e-13);

  // offset switch
  const Complex with_offset = bloch::extended_rogers(
      z, {0, 0}, bloch::RogersOffset::subtract_pi_sq_over_6);
  CHECK(std::abs(with_offset - (bloch::rogers_r(z) - pi * pi / 6)) < 1e-15);

  // flattened sum over the two regular tetrahedra of the figure-eight
  // complement reproduces i * volume
  const Complex sum = bloch::extended_rogers(z, {-1, 0}) +
                      bloch::extended_rogers(z, {0, 0});
  const double vol = 2.0 * oracles::clausen_cl2(pi / 3);
  CHECK(std::abs(sum.imag() - vol) < 1e-12);
  CHECK(sum.imag() == doctest::Approx(2.029883212819307).epsilon(1e-12));
}

TEST_CASE("evaluation is reentrant across threads") {
  // pure functions over value types: concurrent calls must agree with
  // serial ones bit for bit
  std::vector<Complex> pts;
  for (int n = 0; n < 64; ++n) {
    const Complex z = random_point(0.2, 4.0);
    if (off_excluded(z) && std::abs(z.imag()) > 1e-3) pts.push_back(z);
  }
  std::vector<double> serial(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    serial[i] = bloch::bloch_wigner_d(pts[i]);
  }
  std::vector<double> parallel(pts.size());
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < pts.size(); i += 4) {
        parallel[i] = bloch::bloch_wigner_d(pts[i]);
      }
    });
  }
  for (auto& t : workers) t.join();
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(serial[i] == parallel[i]);
}

TEST_CASE("five_term_defect") {
  CHECK(bloch::five_term_defect(Complex(0, 2), Complex(3, 1)) < 1e-12);
  CHECK_THROWS_AS(bloch::five_term_defect(Complex(0, 2), Complex(0, 2)),
                  bloch::degenerate_configuration_error);
  CHECK_THROWS_AS(bloch::five_term_defect(Complex(0.5), Complex(1.0, 1e-14)),
                  bloch::degenerate_configuration_error);

  std::uniform_real_distribution<double> mod(0.1, 10.0), ang(-pi, pi);
  double worst = 0.0;
  int n = 0;
  while (n < 1000) {
    const Complex z1 = std::polar(mod(rng), ang(rng));
    const Complex z2 = std::polar(mod(rng), ang(rng));
    try {
      const double d = bloch::five_term_defect(z1, z2);
      worst = std::max(worst, d);
      ++n;
    } catch (const bloch::degenerate_configuration_error&) {
      continue;
    }
  }
  CHECK(worst < 1e-11);
}

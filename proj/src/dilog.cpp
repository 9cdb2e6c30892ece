#include "bloch/dilog.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "bloch/errors.hpp"

namespace bloch {
namespace {

template <typename R>
constexpr R pi_of = std::numbers::pi_v<R>;

// zeta at even integers: exact closed forms where direct summation is
// slow, direct summation from 12 up where the tail dies immediately.
template <typename R>
R zeta_even(int two_k) {
  const R p2 = pi_of<R> * pi_of<R>;
  switch (two_k) {
    case 2: return p2 / R(6);
    case 4: return p2 * p2 / R(90);
    case 6: return p2 * p2 * p2 / R(945);
    case 8: return p2 * p2 * p2 * p2 / R(9450);
    case 10: return p2 * p2 * p2 * p2 * p2 / R(93555);
    default: break;
  }
  R sum = R(1);
  for (int j = 2; j < 80; ++j) {
    R term = std::pow(R(j), -two_k);
    sum += term;
    if (term < std::numeric_limits<R>::epsilon() * R(0.25)) break;
  }
  return sum;
}

// Li2(z) = sum_{n>=1} c_n u^n with u = -log(1-z):
//   c_1 = 1, c_2 = -1/4,
//   c_{2k+1} = 2 (-1)^{k+1} zeta(2k) / ((2k+1) (2 pi)^{2k}),
// all other even coefficients zero. Equivalent to the classical
// Bernoulli-number expansion B_n u^{n+1}/(n+1)! but computed through
// zeta values, which stays stable in plain floating point.
constexpr int kLogSeriesOrder = 73;

template <typename R>
const std::array<R, kLogSeriesOrder + 1>& log_series_coeffs() {
  static const std::array<R, kLogSeriesOrder + 1> table = [] {
    std::array<R, kLogSeriesOrder + 1> c{};
    c[1] = R(1);
    c[2] = R(-1) / R(4);
    const R four_pi_sq = R(4) * pi_of<R> * pi_of<R>;
    R pow_two_pi = R(1);  // (2 pi)^{2k}
    R sign = R(1);        // (-1)^{k+1}
    for (int k = 1; 2 * k + 1 <= kLogSeriesOrder; ++k) {
      pow_two_pi *= four_pi_sq;
      c[2 * k + 1] = sign * R(2) * zeta_even<R>(2 * k) / (R(2 * k + 1) * pow_two_pi);
      sign = -sign;
    }
    return c;
  }();
  return table;
}

// Power series sum z^k/k^2, for |z| <= 1/2.
template <typename R>
std::complex<R> li2_power_series(std::complex<R> z) {
  std::complex<R> term = z;
  std::complex<R> acc = z;
  const R eps = std::numeric_limits<R>::epsilon();
  for (int k = 2; k <= 220; ++k) {
    term *= z;
    const std::complex<R> add = term / R(k * k);
    acc += add;
    if (std::abs(add) <= eps * R(0.25) * std::abs(acc)) break;
  }
  return acc;
}

template <typename R>
std::complex<R> li2_log_series(std::complex<R> u) {
  const auto& c = log_series_coeffs<R>();
  const R eps = std::numeric_limits<R>::epsilon();
  const std::complex<R> u2 = u * u;
  std::complex<R> acc = c[1] * u + c[2] * u2;
  std::complex<R> upow = u2 * u;  // u^3, then odd powers only
  for (int n = 3; n <= kLogSeriesOrder; n += 2) {
    const std::complex<R> add = c[n] * upow;
    acc += add;
    if (std::abs(add) <= eps * R(0.25) * std::abs(acc)) break;
    upow *= u2;
  }
  return acc;
}

// Main evaluator away from the cut. Argument reduction: power series on
// |z| <= 1/2, inversion for |z| >= 2, reflection when 1-z is small, and
// the log-argument series on the remaining annulus (where no Moebius
// image of z has small modulus -- e.g. the orbit of e^{i pi/3} sits
// entirely on the unit circle).
template <typename R>
std::complex<R> li2_main(std::complex<R> z) {
  const R quarter = R(1) / R(4);
  const R pi2_6 = pi_of<R> * pi_of<R> / R(6);
  const R nz = std::norm(z);
  if (nz <= quarter) {
    return li2_power_series(z);
  }
  if (nz >= R(4)) {
    const std::complex<R> lz = std::log(-z);
    return -li2_power_series(R(1) / z) - pi2_6 - lz * lz / R(2);
  }
  const std::complex<R> w = R(1) - z;
  if (std::norm(w) <= quarter) {
    return pi2_6 - std::log(z) * std::log(w) - li2_power_series(w);
  }
  return li2_log_series(-std::log(w));
}

template <typename R>
std::complex<R> li2_impl(std::complex<R> z, CutPolicy policy) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw domain_error("li2: non-finite argument");
  }
  const R pi2 = pi_of<R> * pi_of<R>;
  if (z.imag() == R(0)) {
    const R x = z.real();
    if (x == R(0)) return std::complex<R>(R(0), R(0));
    if (x == R(1)) return std::complex<R>(pi2 / R(6), R(0));
    if (x > R(1)) {
      if (policy == CutPolicy::strict_error) {
        throw domain_error(
            "li2: argument on the branch cut (1, inf) in strict mode");
      }
      // limit from Im z < 0:
      //   Li2(x - i0) = pi^2/3 - log^2(x)/2 - Li2(1/x) - i pi log x
      const R lx = std::log(x);
      const R re = pi2 / R(3) - lx * lx / R(2) -
                   li2_main(std::complex<R>(R(1) / x, R(0))).real();
      return std::complex<R>(re, -pi_of<R> * lx);
    }
    // Li2 is real on (-inf, 1); keep signed zeros out of the result.
    return std::complex<R>(li2_main(std::complex<R>(x, R(0))).real(), R(0));
  }
  return li2_main(z);
}

template <typename R>
R bloch_wigner_impl(std::complex<R> z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw domain_error("bloch_wigner_d: non-finite argument");
  }
  if (z.imag() == R(0) && (z.real() == R(0) || z.real() == R(1))) {
    throw domain_error("bloch_wigner_d: argument in {0, 1}");
  }
  if (z.imag() == R(0)) return R(0);  // D vanishes on the real line
  const std::complex<R> l = li2_impl(z, CutPolicy::limit_from_below);
  return l.imag() + std::arg(std::complex<R>(R(1), R(0)) - z) *
                        std::log(std::abs(z));
}

bool near(Complex a, Complex b) { return std::abs(a - b) <= 1e-12; }

}  // namespace

Complex li2(Complex z, CutPolicy policy) { return li2_impl(z, policy); }

std::complex<long double> li2_ext(std::complex<long double> z) {
  return li2_impl(z, CutPolicy::limit_from_below);
}

double bloch_wigner_d(Complex z) { return bloch_wigner_impl(z); }

long double bloch_wigner_d_ext(std::complex<long double> z) {
  return bloch_wigner_impl(z);
}

Complex rogers_r(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw domain_error("rogers_r: non-finite argument");
  }
  if (z.imag() == 0.0 && (z.real() == 0.0 || z.real() == 1.0)) {
    throw domain_error("rogers_r: argument in {0, 1}");
  }
  return li2(z) + 0.5 * std::log(z) * std::log(Complex(1.0) - z);
}

Complex extended_rogers(Complex z, Flattening f, RogersOffset offset) {
  const Complex r = rogers_r(z);
  if (f.p == 0 && f.q == 0 && offset == RogersOffset::none) {
    return r;  // zero correction is the identity, bit for bit
  }
  const Complex half_pi_i(0.0, pi / 2.0);
  Complex out = r + half_pi_i * (static_cast<double>(f.q) * std::log(z) +
                                 static_cast<double>(f.p) *
                                     std::log(Complex(1.0) - z));
  if (offset == RogersOffset::subtract_pi_sq_over_6) {
    out -= pi_squared / 6.0;
  }
  return out;
}

namespace detail {

std::array<Complex, 5> five_term_arguments(Complex z1, Complex z2) {
  if (near(z1, z2)) {
    throw degenerate_configuration_error("five-term relation: z1 = z2");
  }
  const Complex one(1.0);
  const std::array<Complex, 5> args = {
      z1, z2, z2 / z1, (one - z2) / (one - z1),
      (one - one / z2) / (one - one / z1)};
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (near(args[i], Complex(0.0)) || near(args[i], one)) {
      throw degenerate_configuration_error(
          "five-term relation: argument " + std::to_string(i + 1) +
          " hits {0, 1}");
    }
  }
  return args;
}

}  // namespace detail

double five_term_defect(Complex z1, Complex z2) {
  const auto args = detail::five_term_arguments(z1, z2);
  const double value = bloch_wigner_d(args[0]) - bloch_wigner_d(args[1]) +
                       bloch_wigner_d(args[2]) - bloch_wigner_d(args[3]) +
                       bloch_wigner_d(args[4]);
  return std::abs(value);
}

}  // namespace bloch

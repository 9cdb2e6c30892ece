#include "bloch/prebloch.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>

#include "bloch/errors.hpp"

namespace bloch {
namespace {

bool shape_close(Complex a, Complex b, double tol) {
  return std::abs(a - b) <= tol;
}

std::string fmt_complex(Complex z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

std::vector<PreBlochTerm> normalize_terms(std::vector<PreBlochTerm> raw,
                                          double tol) {
  std::erase_if(raw, [](const PreBlochTerm& t) { return t.coeff.is_zero(); });
  std::stable_sort(raw.begin(), raw.end(),
                   [](const PreBlochTerm& x, const PreBlochTerm& y) {
                     if (x.shape.real() != y.shape.real())
                       return x.shape.real() < y.shape.real();
                     return x.shape.imag() < y.shape.imag();
                   });
  std::vector<PreBlochTerm> out;
  for (const auto& t : raw) {
    if (!out.empty() && shape_close(out.back().shape, t.shape, tol)) {
      out.back().coeff += t.coeff;  // keep the first representative
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const PreBlochTerm& t) { return t.coeff.is_zero(); });
  return out;
}

}  // namespace

PreBlochElement make_element(std::vector<PreBlochTerm> raw) {
  const double tol = PreBlochElement::shape_tolerance;
  std::string offenders;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Complex z = raw[i].shape;
    const bool bad = !std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
                     std::abs(z) <= tol || std::abs(z - Complex(1.0)) <= tol;
    if (bad) {
      if (!offenders.empty()) offenders += ", ";
      offenders += "term " + std::to_string(i) + ": " + fmt_complex(z);
    }
  }
  if (!offenders.empty()) {
    throw invalid_shape_error("shapes must avoid {0, 1}: " + offenders);
  }
  PreBlochElement e;
  e.terms_ = normalize_terms(std::move(raw), tol);
  return e;
}

PreBlochElement operator+(const PreBlochElement& a, const PreBlochElement& b) {
  std::vector<PreBlochTerm> raw = a.terms_;
  raw.insert(raw.end(), b.terms_.begin(), b.terms_.end());
  return make_element(std::move(raw));
}

PreBlochElement operator-(const PreBlochElement& a, const PreBlochElement& b) {
  std::vector<PreBlochTerm> raw = a.terms_;
  for (const auto& t : b.terms_) raw.push_back({-t.coeff, t.shape});
  return make_element(std::move(raw));
}

PreBlochElement PreBlochElement::scaled(const Rational& r) const {
  std::vector<PreBlochTerm> raw;
  raw.reserve(terms_.size());
  for (const auto& t : terms_) raw.push_back({t.coeff * r, t.shape});
  return make_element(std::move(raw));
}

PreBlochElement five_term_element(Complex z1, Complex z2) {
  const auto args = detail::five_term_arguments(z1, z2);
  std::vector<PreBlochTerm> raw;
  raw.reserve(5);
  for (std::size_t i = 0; i < args.size(); ++i) {
    raw.push_back({Rational(i % 2 == 0 ? 1 : -1), args[i]});
  }
  return make_element(std::move(raw));
}

PreBlochElement conjugate(const PreBlochElement& x) {
  std::vector<PreBlochTerm> raw;
  raw.reserve(x.terms().size());
  for (const auto& t : x.terms()) raw.push_back({t.coeff, std::conj(t.shape)});
  return make_element(std::move(raw));
}

PreBlochElement minus_eigenprojection(const PreBlochElement& x) {
  return (x - conjugate(x)).scaled(Rational(1, 2));
}

namespace detail {

int torsion_order(Complex z, int order_bound, double tolerance) {
  if (std::abs(std::abs(z) - 1.0) > tolerance) return 0;
  Complex p = z;
  for (int n = 1; n <= order_bound; ++n) {
    // a factor within tolerance of an n-th root has |z^n - 1| ~ n*tol
    if (std::abs(p - Complex(1.0)) <= 64.0 * tolerance) return n;
    p *= z;
  }
  return 0;
}

bool is_torsion_factor(Complex z, int order_bound, double tolerance) {
  return torsion_order(z, order_bound, tolerance) > 0;
}

}  // namespace detail

namespace {

// Canonical factor order: by (|.|, arg .).
bool factor_less(Complex x, Complex y) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  if (ax != ay) return ax < ay;
  return std::arg(x) < std::arg(y);
}

int lcm_capped(int a, int b, int cap) {
  const long l = std::lcm(static_cast<long>(a), static_cast<long>(b));
  return static_cast<int>(std::min(l, static_cast<long>(cap)));
}

// Factors agreeing up to a bounded-order root of unity -- directly or
// after inversion -- represent the same class in the quotient; rewrite
// each as (the inverse of) the canonically smallest representative of
// its class so formal cancellations become literal. Returns the lcm of
// the torsion orders encountered (capped at the order bound).
int canonicalize_mod_torsion(std::vector<WedgeTerm>& terms,
                             const WedgeOptions& opts) {
  int scale = 2;
  std::vector<Complex> reps;
  auto reduce = [&](Complex x) {
    for (Complex& r : reps) {
      if (const int n = detail::torsion_order(x / r, opts.torsion_order_bound,
                                              opts.tolerance)) {
        scale = lcm_capped(scale, n, opts.torsion_order_bound);
        if (factor_less(x, r)) r = x;
        return r;
      }
      if (const int n = detail::torsion_order(x * r, opts.torsion_order_bound,
                                              opts.tolerance)) {
        scale = lcm_capped(scale, n, opts.torsion_order_bound);
        return Complex(1.0) / r;
      }
    }
    reps.push_back(x);
    return x;
  };
  // two passes so every class ends on its final (smallest) representative
  for (int pass = 0; pass < 2; ++pass) {
    for (auto& t : terms) {
      t.a = reduce(t.a);
      t.b = reduce(t.b);
    }
  }
  return scale;
}

std::pair<std::vector<WedgeTerm>, int> normalize_wedge(
    std::vector<WedgeTerm> raw, const WedgeOptions& opts) {
  int scale = 2;
  std::vector<WedgeTerm> kept;
  for (auto& t : raw) {
    if (t.coeff.is_zero()) continue;
    if (std::abs(t.a) <= opts.tolerance || std::abs(t.b) <= opts.tolerance) {
      throw invalid_shape_error("wedge factors must be nonzero");
    }
    const int na =
        detail::torsion_order(t.a, opts.torsion_order_bound, opts.tolerance);
    const int nb =
        detail::torsion_order(t.b, opts.torsion_order_bound, opts.tolerance);
    if (na > 0 || nb > 0) {  // torsion dies in the quotient
      scale = lcm_capped(scale, std::max(na, nb), opts.torsion_order_bound);
      continue;
    }
    kept.push_back(t);
  }
  scale = lcm_capped(scale, canonicalize_mod_torsion(kept, opts),
                     opts.torsion_order_bound);
  std::erase_if(kept, [&](const WedgeTerm& t) {
    // a ^ a = 0 and a ^ (1/a) = -(a ^ a) = 0
    return shape_close(t.a, t.b, opts.tolerance) ||
           shape_close(t.a * t.b, Complex(1.0), opts.tolerance);
  });
  for (auto& t : kept) {
    if (factor_less(t.b, t.a)) {
      std::swap(t.a, t.b);
      t.coeff = -t.coeff;
    }
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const WedgeTerm& x, const WedgeTerm& y) {
                     if (factor_less(x.a, y.a)) return true;
                     if (factor_less(y.a, x.a)) return false;
                     return factor_less(x.b, y.b);
                   });
  std::vector<WedgeTerm> out;
  for (const auto& t : kept) {
    if (!out.empty() && shape_close(out.back().a, t.a, opts.tolerance) &&
        shape_close(out.back().b, t.b, opts.tolerance)) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const WedgeTerm& t) { return t.coeff.is_zero(); });
  return {std::move(out), scale};
}

}  // namespace

WedgeElement make_wedge(std::vector<WedgeTerm> raw, const WedgeOptions& opts) {
  WedgeElement w;
  auto [terms, scale] = normalize_wedge(std::move(raw), opts);
  w.terms_ = std::move(terms);
  w.torsion_scale_ = scale;
  return w;
}

WedgeElement operator+(const WedgeElement& a, const WedgeElement& b) {
  std::vector<WedgeTerm> raw = a.terms_;
  raw.insert(raw.end(), b.terms_.begin(), b.terms_.end());
  return make_wedge(std::move(raw));
}

WedgeElement wedge_delta(const PreBlochElement& x, const WedgeOptions& opts) {
  std::vector<WedgeTerm> raw;
  raw.reserve(x.terms().size());
  for (const auto& t : x.terms()) {
    raw.push_back({t.coeff * Rational(2), t.shape, Complex(1.0) - t.shape});
  }
  return make_wedge(std::move(raw), opts);
}

namespace {

// |base + sum w_j n_j| minimized over the integer box [-B, B]^d.
// Exact meet-in-the-middle for small d, deterministic multistart
// coordinate descent beyond that (the residual is heuristic anyway).
double min_abs_affine(double base, const std::vector<double>& w, int bound) {
  const int d = static_cast<int>(w.size());
  if (d == 0) return std::abs(base);
  const int width = 2 * bound + 1;

  auto enumerate = [&](int lo, int hi) {
    std::vector<double> sums{0.0};
    for (int j = lo; j < hi; ++j) {
      std::vector<double> next;
      next.reserve(sums.size() * width);
      for (double s : sums) {
        for (int n = -bound; n <= bound; ++n) next.push_back(s + w[j] * n);
      }
      sums.swap(next);
    }
    return sums;
  };

  const int half = (d + 1) / 2;
  double half_size = 1.0;
  for (int j = 0; j < half && half_size <= 2e6; ++j) half_size *= width;
  if (half_size <= 2e6) {  // meet in the middle, exact over the box
    std::vector<double> left = enumerate(0, half);
    std::vector<double> right = enumerate(half, d);
    std::sort(left.begin(), left.end());
    double best = std::numeric_limits<double>::infinity();
    for (double s : right) {
      const double target = -base - s;
      auto it = std::lower_bound(left.begin(), left.end(), target);
      if (it != left.end()) best = std::min(best, std::abs(base + s + *it));
      if (it != left.begin()) {
        best = std::min(best, std::abs(base + s + *(it - 1)));
      }
    }
    return best;
  }

  // coordinate descent from deterministic starts
  std::uint64_t lcg = 0x9e3779b97f4a7c15ull;
  auto next_int = [&]() {
    lcg = lcg * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<int>((lcg >> 33) % width) - bound;
  };
  double best = std::numeric_limits<double>::infinity();
  for (int start = 0; start < 48; ++start) {
    std::vector<int> n(d, 0);
    if (start > 0) {
      for (int j = 0; j < d; ++j) n[j] = next_int();
    }
    double value = base;
    for (int j = 0; j < d; ++j) value += w[j] * n[j];
    for (int sweep = 0; sweep < 64; ++sweep) {
      bool changed = false;
      for (int j = 0; j < d; ++j) {
        if (w[j] == 0.0) continue;
        const double rest = value - w[j] * n[j];
        int cand = static_cast<int>(std::lround(-rest / w[j]));
        cand = std::clamp(cand, -bound, bound);
        if (cand != n[j]) {
          value = rest + w[j] * cand;
          n[j] = cand;
          changed = true;
        }
      }
      if (!changed) break;
    }
    best = std::min(best, std::abs(value));
  }
  return best;
}

}  // namespace

double bloch_defect(const PreBlochElement& x, int shift_bound) {
  if (shift_bound < 0) {
    throw domain_error("bloch_defect: shift_bound must be >= 0");
  }
  const WedgeElement w = wedge_delta(x);
  if (w.empty()) return 0.0;

  // lambda = sum c_i [ log|a_i| (arg b_i + g l_i) - (arg a_i + g k_i) log|b_i| ]
  // with shift step g = 2 pi / torsion_scale. The target lives modulo
  // torsion, so arguments are only defined up to multiples of 2 pi over
  // the torsion orders met during reduction; the step must reach those
  // (a half turn at minimum, since 2 (a ^ -1) = a ^ 1 cancels only when
  // -1 can embed at the origin). The box is widened to keep the angular
  // range at shift_bound full turns.
  const double step = 2.0 * pi / w.torsion_scale();
  const int box = shift_bound * (w.torsion_scale() / 2);
  double base = 0.0;
  std::vector<double> weights;
  weights.reserve(2 * w.terms().size());
  for (const auto& t : w.terms()) {
    const double c = t.coeff.to_double();
    const double la = std::log(std::abs(t.a));
    const double ta = std::arg(t.a);
    const double lb = std::log(std::abs(t.b));
    const double tb = std::arg(t.b);
    base += c * (la * tb - ta * lb);
    weights.push_back(-step * c * lb);  // multiplies k_i
    weights.push_back(step * c * la);   // multiplies l_i
  }
  const double lambda = min_abs_affine(base, weights, box);
  return std::numbers::sqrt2 * lambda;  // Frobenius norm of the 2x2 tensor
}

double volume(const PreBlochElement& x) {
  double v = 0.0;
  for (const auto& t : x.terms()) {
    v += t.coeff.to_double() * bloch_wigner_d(t.shape);
  }
  return v;
}

double borel_regulator(const PreBlochElement& x) {
  return volume(x) / two_pi_squared;
}

Complex mu_regulator(const PreBlochElement& x,
                     const std::vector<Flattening>& flats) {
  if (flats.size() != x.terms().size()) {
    throw alignment_error(
        "mu_regulator: " + std::to_string(flats.size()) +
        " flattenings for " + std::to_string(x.terms().size()) + " terms");
  }
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < flats.size(); ++i) {
    const PreBlochTerm& t = x.terms()[i];
    if (!t.coeff.is_integer()) {
      throw domain_error("mu_regulator: non-integer coefficient " +
                         t.coeff.to_string() + " at term " +
                         std::to_string(i));
    }
    acc += static_cast<double>(t.coeff.as_integer()) *
           extended_rogers(t.shape, flats[i]);
  }
  return acc / two_pi_squared;
}

Complex mu_regulator_shapes(const std::vector<Complex>& shapes,
                            const std::vector<Flattening>& flats) {
  if (flats.size() != shapes.size()) {
    throw alignment_error(
        "mu_regulator_shapes: " + std::to_string(flats.size()) +
        " flattenings for " + std::to_string(shapes.size()) + " shapes");
  }
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    acc += extended_rogers(shapes[i], flats[i]);
  }
  return acc / two_pi_squared;
}

}  // namespace bloch

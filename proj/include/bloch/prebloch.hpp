#ifndef BLOCHINV_PREBLOCH_HPP
#define BLOCHINV_PREBLOCH_HPP

#include <vector>

#include "bloch/dilog.hpp"
#include "bloch/rational.hpp"

namespace bloch {

// One summand n*[z] of a formal linear combination.
struct PreBlochTerm {
  Rational coeff;
  Complex shape;
};

// Formal Q-linear combination of symbols [z], z off {0,1}, representing
// a class in the pre-Bloch group. Terms are kept normalized: shapes are
// validated against {0,1} (tolerance 1e-12), equal shapes (same
// tolerance) merged, zero coefficients dropped, order canonical.
class PreBlochElement {
 public:
  static constexpr double shape_tolerance = 1e-12;

  PreBlochElement() = default;

  const std::vector<PreBlochTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  friend PreBlochElement operator+(const PreBlochElement& a,
                                   const PreBlochElement& b);
  friend PreBlochElement operator-(const PreBlochElement& a,
                                   const PreBlochElement& b);
  PreBlochElement scaled(const Rational& r) const;

 private:
  friend PreBlochElement make_element(std::vector<PreBlochTerm> raw);
  std::vector<PreBlochTerm> terms_;
};

// Normalizing constructor. Throws invalid_shape_error listing every
// offending entry when a shape is within tolerance of {0,1} or not finite.
PreBlochElement make_element(std::vector<PreBlochTerm> raw);

// [z1] - [z2] + [z2/z1] - [(1-z2)/(1-z1)] + [(1-1/z2)/(1-1/z1)],
// the defining relation of the group. Degenerate configurations throw.
PreBlochElement five_term_element(Complex z1, Complex z2);

// Shape-wise complex conjugation; coefficients unchanged.
PreBlochElement conjugate(const PreBlochElement& x);

// (x - conjugate(x)) / 2; satisfies conjugate(out) = -out.
PreBlochElement minus_eigenprojection(const PreBlochElement& x);

// One summand n*(a ^ b) of an antisymmetric formal combination over
// nonzero complex numbers modulo roots of unity.
struct WedgeTerm {
  Rational coeff;
  Complex a;
  Complex b;
};

struct WedgeOptions {
  // Factors within tolerance of a root of unity of order <= this bound
  // are treated as torsion and reduce the term to zero. The quotient
  // kills all of the (infinite) torsion; a bounded detector is the only
  // finite procedure, so the bound is part of the configuration.
  int torsion_order_bound = 24;
  double tolerance = 1e-12;
};

class WedgeElement {
 public:
  WedgeElement() = default;

  const std::vector<WedgeTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // lcm of the torsion orders met while reducing (at least 2). Branch
  // shifts in the membership residual move in steps of 2 pi / this.
  int torsion_scale() const { return torsion_scale_; }

  friend WedgeElement operator+(const WedgeElement& a, const WedgeElement& b);

 private:
  friend WedgeElement make_wedge(std::vector<WedgeTerm> raw,
                                 const WedgeOptions& opts);
  std::vector<WedgeTerm> terms_;
  int torsion_scale_ = 2;
};

// Normalizes: drops a^a and torsion-factor terms, enforces antisymmetry
// by ordering factors canonically on (|.|, arg .), merges equal pairs.
WedgeElement make_wedge(std::vector<WedgeTerm> raw,
                        const WedgeOptions& opts = {});

// The map [z] -> 2 (z ^ (1-z)) extended linearly; its kernel is the
// Bloch group, so the image measures the obstruction to membership.
WedgeElement wedge_delta(const PreBlochElement& x,
                         const WedgeOptions& opts = {});

// Heuristic numeric membership residual: embed each wedge factor as
// (log|.|, arg . + pi k) in R^2 and minimize the Frobenius norm of the
// antisymmetrized sum over branch shifts |k| <= shift_bound per factor.
// Shifts move in half turns so that 2-torsion factors can embed at the
// origin; the residual of a true Bloch class then reaches rounding
// level. Zero certifies nothing; a gluing-equation certificate is the
// sound membership path. Small values are evidence.
double bloch_defect(const PreBlochElement& x, int shift_bound);

// sum n_i D(z_i): the hyperbolic volume of the class.
double volume(const PreBlochElement& x);

// volume / (2 pi^2), computed from the same volume path.
double borel_regulator(const PreBlochElement& x);

// (1/(2 pi^2)) sum n_i R^(z_i; p_i, q_i) with the extended Rogers
// function. Imaginary part reproduces volume/(2 pi^2); the real part is
// -CS/(2 pi^2) up to the flattening ambiguity lattice. Flattenings must
// align index-wise with terms(), and coefficients must be integers.
Complex mu_regulator(const PreBlochElement& x,
                     const std::vector<Flattening>& flats);

// Same accumulation at per-shape granularity with unit coefficients.
// The triangulation pipeline uses this form because merged element terms
// need not admit a common flattening.
Complex mu_regulator_shapes(const std::vector<Complex>& shapes,
                            const std::vector<Flattening>& flats);

namespace detail {
// Smallest n <= bound with z^n within tolerance of 1, or 0 when z is not
// close to a root of unity of bounded order.
int torsion_order(Complex z, int order_bound, double tolerance);

// True when z is within tolerance of a root of unity of order <= bound.
bool is_torsion_factor(Complex z, int order_bound, double tolerance);
}  // namespace detail

}  // namespace bloch

#endif  // BLOCHINV_PREBLOCH_HPP

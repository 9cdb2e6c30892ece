#ifndef BLOCHINV_DILOG_HPP
#define BLOCHINV_DILOG_HPP

#include <array>
#include <complex>
#include <numbers>

namespace bloch {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double pi_squared = pi * pi;
inline constexpr double two_pi_squared = 2.0 * pi * pi;

// Behavior of li2 on its branch cut (1, inf).
//   limit_from_below — value is the limit from Im z < 0, so
//                      Im li2(x) = -pi*log(x) for real x > 1.
//   strict_error     — arguments exactly on the open cut throw.
// Off the cut both policies agree. log keeps the std principal branch
// with arg in (-pi, pi]; combined with the from-below li2 limit this
// makes the Bloch-Wigner function vanish identically on the real line.
enum class CutPolicy { limit_from_below, strict_error };

// Integer log-branch corrections (p, q) attached to one tetrahedron shape.
struct Flattening {
  int p = 0;
  int q = 0;
  friend bool operator==(const Flattening&, const Flattening&) = default;
};

// Whether extended_rogers subtracts the constant pi^2/6. The default keeps
// the plain Rogers value at zero flattening; the subtracted variant matches
// the normalization in which the five-term relation maps to 0.
enum class RogersOffset { none, subtract_pi_sq_over_6 };

// Principal-branch dilogarithm Li2(z) = sum_{k>=1} z^k / k^2 (|z| <= 1),
// analytically continued. Series on |z| <= 1/2, inversion for |z| >= 2,
// reflection z -> 1-z near 1; the leftover annulus is summed in the
// log argument u = -log(1-z), where the series converges geometrically.
Complex li2(Complex z, CutPolicy policy = CutPolicy::limit_from_below);

// Bloch-Wigner function D(z) = Im Li2(z) + arg(1-z) log|z|.
// Single-valued and continuous on C - {0,1}, zero on the real line,
// odd under conjugation. Throws domain_error at z in {0,1}.
double bloch_wigner_d(Complex z);

// Rogers dilogarithm R(z) = Li2(z) + (1/2) log(z) log(1-z).
Complex rogers_r(Complex z);

// Flattening-corrected Rogers function
//   R(z) + (pi i / 2) (q log z + p log(1-z))   [- pi^2/6 if requested].
// Summed over a flattened triangulation this computes -CS + i*vol up to
// the flattening ambiguity lattice.
Complex extended_rogers(Complex z, Flattening f,
                        RogersOffset offset = RogersOffset::none);

// |D(z1) - D(z2) + D(z2/z1) - D((1-z2)/(1-z1)) + D((1-1/z2)/(1-1/z1))|.
// Mathematically zero; the returned value is pure floating-point noise.
// Throws degenerate_configuration_error when z1 = z2 or any of the five
// arguments lands on {0,1}.
double five_term_defect(Complex z1, Complex z2);

// Extended-precision path, same contracts as li2 / bloch_wigner_d.
// Used for acceptance reruns where the double targets want headroom.
std::complex<long double> li2_ext(std::complex<long double> z);
long double bloch_wigner_d_ext(std::complex<long double> z);

namespace detail {
// The five cross-ratio arguments of the five-term relation, validated
// against the excluded set. Shared by the defect and the formal element.
std::array<Complex, 5> five_term_arguments(Complex z1, Complex z2);
}  // namespace detail

}  // namespace bloch

#endif  // BLOCHINV_DILOG_HPP

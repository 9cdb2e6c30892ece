#ifndef BLOCHINV_TRIANGULATION_HPP
#define BLOCHINV_TRIANGULATION_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bloch/dilog.hpp"
#include "bloch/prebloch.hpp"

namespace bloch {

// One logarithmic gluing equation:
//   sum_j a_j log z_j + b_j log(1-z_j)  +  c * pi i
// equal to 2 pi i for an edge row, 0 for a cusp (completeness) row.
struct GluingRow {
  std::vector<long> a;
  std::vector<long> b;
  long c = 0;
};

struct IdealTriangulation {
  std::string name;
  int n_tet = 0;
  std::vector<GluingRow> edges;
  std::vector<GluingRow> cusps;
  std::vector<std::string> warnings;  // non-fatal invariant violations
};

// Parses the triangulation JSON schema
//   { "name": str, "n_tet": int, "edges": [{"a": [int], "b": [int], "c": int}],
//     "cusps": [same row shape] }.
// Unknown fields are rejected in strict mode, ignored otherwise.
IdealTriangulation parse_triangulation(std::string_view text,
                                       bool strict = false);

struct ShapeAssignment {
  std::vector<Complex> shapes;
  // (log z_j, log(1-z_j)) as used by the solver
  std::vector<std::pair<Complex, Complex>> log_shapes;
  double residual = 0.0;  // max-norm gluing defect
  std::vector<double> residual_history;
  int iterations = 0;
};

// Row-by-row defect of the gluing equations at the given shapes,
// edge rows first, then cusp rows. Principal logs throughout.
std::vector<Complex> gluing_defect(const IdealTriangulation& tri,
                                   const std::vector<Complex>& shapes);
std::vector<Complex> gluing_defect(const IdealTriangulation& tri,
                                   const ShapeAssignment& s);

// d(row_k)/d(log z_j) = a_kj - b_kj * z_j / (1 - z_j).
std::vector<std::vector<Complex>> gluing_jacobian(
    const IdealTriangulation& tri, const std::vector<Complex>& shapes);

struct SolveOptions {
  int max_iterations = 100;
  double tolerance = 1e-12;
  // When set, solutions with flat or negatively oriented tetrahedra
  // (Im z <= 0) are returned instead of raising.
  bool permissive = false;
};

// Damped Newton iteration on the logarithmic gluing system, Gauss-Newton
// least squares on the (typically overdetermined, consistent) row set.
// Default initial guess is the regular shape exp(i pi / 3) everywhere.
ShapeAssignment solve_shapes(
    const IdealTriangulation& tri,
    const std::optional<std::vector<Complex>>& initial = std::nullopt,
    const SolveOptions& opts = {});

// Residual below this bound certifies the assignment: the gluing
// equations hold, hence the class lies in the Bloch group.
inline constexpr double certificate_threshold = 1e-9;

struct BlochInvariantResult {
  PreBlochElement element;  // sum of [z_j], merged
  bool certificate = false;
  double residual = 0.0;
};

// The class sum_j [z_j] of a certified solution. Throws residual_error
// when s.residual exceeds the certificate threshold.
BlochInvariantResult bloch_invariant(const IdealTriangulation& tri,
                                     const ShapeAssignment& s);

// One (p, q) pair per tetrahedron.
using FlatteningAssignment = std::vector<Flattening>;

// Integer corrections making every flattened edge row vanish exactly:
//   sum_j a_kj (log z_j + p_j pi i) - b_kj (-log(1-z_j) + q_j pi i) = 0,
// equivalently  sum_j (a_kj p_j - b_kj q_j) = c_k - 2  given that the
// principal-log rows already meet their 2 pi i target. Solvability is
// decided by Smith normal form; representatives inside the box
// |p|,|q| <= bound are enumerated exhaustively with pruning and returned
// sorted by max-norm then lexicographically, capped at max_solutions.
std::vector<FlatteningAssignment> flattenings_search(
    const IdealTriangulation& tri, const ShapeAssignment& s, int bound,
    int max_solutions = 64);

}  // namespace bloch

#endif  // BLOCHINV_TRIANGULATION_HPP

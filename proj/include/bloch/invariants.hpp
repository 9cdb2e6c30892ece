#ifndef BLOCHINV_INVARIANTS_HPP
#define BLOCHINV_INVARIANTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "bloch/triangulation.hpp"

namespace bloch {

// Lift ambiguity taxonomy: a closed manifold determines its class
// uniquely; a cusped one determines a pair of natural lifts, cut down
// from a Q/Z family of lifts.
enum class Ambiguity { unique, plus_minus_pair, q_mod_z_family };

const char* ambiguity_name(Ambiguity a);

struct InvariantReport {
  std::string name;
  int n_tet = 0;
  std::vector<Complex> shapes;
  double residual = 0.0;
  double volume = 0.0;
  double borel_regulator = 0.0;  // volume / (2 pi^2), same arithmetic path
  Complex mu;
  double cs = 0.0;            // -2 pi^2 Re(mu)
  double cs_ambiguity = 0.0;  // measured flattening-lattice modulus, 0 if unobserved
  std::string cs_note;
  double bloch_defect = 0.0;
  bool certificate = false;
  bool cusped = false;
  Ambiguity ambiguity = Ambiguity::unique;
  std::string ambiguity_note;
  FlatteningAssignment flattening;  // the canonical (smallest) one used for mu
  std::vector<std::string> warnings;
};

struct ReportOptions {
  SolveOptions solve;
  std::optional<std::vector<Complex>> initial;
  int shift_bound = 4;
  int flattening_bound = 4;
};

// Full pipeline: solve shapes, extract the Bloch invariant, evaluate
// volume / Borel regulator / mu, search flattenings, measure the
// Chern-Simons ambiguity lattice across the found flattenings. Errors
// from any stage are rethrown as staged_error with the stage label.
InvariantReport compute_report(const IdealTriangulation& tri,
                               const ReportOptions& opts = {});

// Deterministic serializations; `precision` is significant digits.
std::string report_to_json(const InvariantReport& r, int precision = 15);
std::string report_to_text(const InvariantReport& r, int precision = 15);

struct FieldDiff {
  std::string field;
  double delta = 0.0;
};

struct DiffSummary {
  std::vector<FieldDiff> entries;  // only fields differing beyond tolerance
  bool empty() const { return entries.empty(); }
  std::string to_string() const;
};

// Field-by-field comparison. volume is compared absolutely, cs modulo
// the (larger) measured ambiguity modulus, shapes as sorted multisets.
DiffSummary compare_reports(const InvariantReport& a, const InvariantReport& b,
                            double tol);

}  // namespace bloch

#endif  // BLOCHINV_INVARIANTS_HPP

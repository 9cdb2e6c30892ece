#ifndef BLOCHINV_ERRORS_HPP
#define BLOCHINV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bloch {

// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation
// (e.g. a dilogarithm argument on {0,1} or on the cut in strict mode).
struct domain_error : error {
  using error::error;
};

// A shape in a formal element is too close to 0 or 1.
struct invalid_shape_error : error {
  using error::error;
};

// A five-term configuration hit one of its excluded points.
struct degenerate_configuration_error : error {
  using error::error;
};

// Flattening list does not line up with element terms, or coefficients
// are not integers where integers are required.
struct alignment_error : error {
  using error::error;
};

// Malformed input text; carries 1-based line/column when known.
struct parse_error : error {
  int line = 0;
  int column = 0;
  parse_error(const std::string& msg, int line_, int column_)
      : error(msg), line(line_), column(column_) {}
};

// Structurally valid JSON that violates the file schema.
struct schema_error : error {
  using error::error;
};

// Newton iteration failed; final residual attached.
struct solve_error : error {
  double residual = 0.0;
  solve_error(const std::string& msg, double residual_)
      : error(msg), residual(residual_) {}
};

// Jacobian lost rank during iteration.
struct singular_jacobian_error : error {
  int iteration = 0;
  singular_jacobian_error(const std::string& msg, int iteration_)
      : error(msg), iteration(iteration_) {}
};

// A solution was found but has non-positively-oriented tetrahedra.
struct degenerate_solution_error : error {
  using error::error;
};

// Residual above the certificate threshold.
struct residual_error : error {
  double residual = 0.0;
  residual_error(const std::string& msg, double residual_)
      : error(msg), residual(residual_) {}
};

// No flattening exists within the search box.
struct no_flattening_error : error {
  using error::error;
};

// Boundary maps do not compose to zero.
struct not_a_complex_error : error {
  using error::error;
};

// Pipeline stage names used in staged error messages.
enum class Stage { parse, solve, invariant, regulator, flattening };

const char* stage_name(Stage s);

// Wraps a module error with the pipeline stage it occurred in.
struct staged_error : error {
  Stage stage;
  staged_error(Stage stage_, const std::string& msg)
      : error(std::string(stage_name(stage_)) + ": " + msg), stage(stage_) {}
};

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::parse: return "parse";
    case Stage::solve: return "solve";
    case Stage::invariant: return "invariant";
    case Stage::regulator: return "regulator";
    case Stage::flattening: return "flattening";
  }
  return "unknown";
}

}  // namespace bloch

#endif  // BLOCHINV_ERRORS_HPP

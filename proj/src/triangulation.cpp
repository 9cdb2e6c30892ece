#include "bloch/triangulation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "bloch/errors.hpp"
#include "bloch/homology.hpp"

namespace bloch {
namespace {

using nlohmann::json;

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void reject_unknown_fields(const json& obj, std::initializer_list<const char*> known,
                           const char* where, bool strict) {
  if (!strict) return;
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw schema_error(std::string("unknown field \"") + item.key() +
                         "\" in " + where + " (strict mode)");
    }
  }
}

std::vector<long> int_vector(const json& j, const char* field, int expected,
                             const char* where) {
  if (!j.is_array()) {
    throw schema_error(std::string(field) + " in " + where +
                       " must be an array of integers");
  }
  std::vector<long> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer()) {
      throw schema_error(std::string(field) + " in " + where +
                         " must contain integers only");
    }
    out.push_back(v.get<long>());
  }
  if (static_cast<int>(out.size()) != expected) {
    throw schema_error(std::string(field) + " in " + where + " has length " +
                       std::to_string(out.size()) + ", expected " +
                       std::to_string(expected));
  }
  return out;
}

GluingRow parse_row(const json& j, int n_tet, const char* where, bool strict) {
  if (!j.is_object()) {
    throw schema_error(std::string(where) + " must be an object");
  }
  reject_unknown_fields(j, {"a", "b", "c"}, where, strict);
  for (const char* f : {"a", "b", "c"}) {
    if (!j.contains(f)) {
      throw schema_error(std::string("missing field \"") + f + "\" in " + where);
    }
  }
  if (!j["c"].is_number_integer()) {
    throw schema_error(std::string("c in ") + where + " must be an integer");
  }
  GluingRow row;
  row.a = int_vector(j["a"], "a", n_tet, where);
  row.b = int_vector(j["b"], "b", n_tet, where);
  row.c = j["c"].get<long>();
  return row;
}

constexpr Complex kTwoPiI{0.0, 2.0 * pi};

Complex row_value(const GluingRow& row, const std::vector<Complex>& logs,
                  const std::vector<Complex>& log1m) {
  Complex acc(0.0, 0.0);
  for (std::size_t j = 0; j < logs.size(); ++j) {
    if (row.a[j] != 0) acc += static_cast<double>(row.a[j]) * logs[j];
    if (row.b[j] != 0) acc += static_cast<double>(row.b[j]) * log1m[j];
  }
  acc += Complex(0.0, pi * static_cast<double>(row.c));
  return acc;
}

void check_shapes_usable(const std::vector<Complex>& shapes) {
  for (std::size_t j = 0; j < shapes.size(); ++j) {
    const Complex z = shapes[j];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
        std::abs(z) <= 1e-14 || std::abs(z - Complex(1.0)) <= 1e-14) {
      throw domain_error("shape " + std::to_string(j) +
                         " is on {0, 1}; gluing logs undefined");
    }
  }
}

// Householder QR least squares for complex A (m >= n), minimizing |A x - b|.
// Returns false when A is numerically rank deficient.
bool least_squares(std::vector<std::vector<Complex>> a, std::vector<Complex> b,
                   std::vector<Complex>& x) {
  const int m = static_cast<int>(a.size());
  const int n = m == 0 ? 0 : static_cast<int>(a[0].size());
  double scale = 0.0;
  for (const auto& row : a) {
    for (const Complex& v : row) scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0) return false;

  for (int k = 0; k < n; ++k) {
    double norm = 0.0;
    for (int i = k; i < m; ++i) norm += std::norm(a[i][k]);
    norm = std::sqrt(norm);
    if (norm <= 1e-13 * scale) return false;
    const Complex akk = a[k][k];
    const Complex alpha =
        (std::abs(akk) == 0.0) ? Complex(-norm, 0.0) : -(akk / std::abs(akk)) * norm;
    // v = x - alpha e1, applied as the reflector I - 2 v v^H / |v|^2
    std::vector<Complex> v(m - k);
    v[0] = akk - alpha;
    for (int i = k + 1; i < m; ++i) v[i - k] = a[i][k];
    double vnorm2 = 0.0;
    for (const Complex& t : v) vnorm2 += std::norm(t);
    if (vnorm2 == 0.0) return false;
    for (int j = k; j < n; ++j) {
      Complex dot(0.0, 0.0);
      for (int i = k; i < m; ++i) dot += std::conj(v[i - k]) * a[i][j];
      const Complex f = 2.0 * dot / vnorm2;
      for (int i = k; i < m; ++i) a[i][j] -= f * v[i - k];
    }
    {
      Complex dot(0.0, 0.0);
      for (int i = k; i < m; ++i) dot += std::conj(v[i - k]) * b[i];
      const Complex f = 2.0 * dot / vnorm2;
      for (int i = k; i < m; ++i) b[i] -= f * v[i - k];
    }
    a[k][k] = alpha;
  }

  x.assign(n, Complex(0.0, 0.0));
  for (int i = n - 1; i >= 0; --i) {
    Complex s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    if (std::abs(a[i][i]) <= 1e-13 * scale) return false;
    x[i] = s / a[i][i];
  }
  return true;
}

struct LogData {
  std::vector<Complex> z, logz, log1m;
  bool valid = false;
};

LogData eval_logs(const std::vector<Complex>& u) {
  LogData d;
  d.z.resize(u.size());
  d.logz.resize(u.size());
  d.log1m.resize(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const Complex z = std::exp(u[j]);
    const Complex w = Complex(1.0) - z;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
        std::abs(w) < 1e-300 || std::abs(z) < 1e-300) {
      return d;  // invalid
    }
    d.z[j] = z;
    d.logz[j] = u[j];
    d.log1m[j] = std::log(w);
  }
  d.valid = true;
  return d;
}

double max_norm(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const Complex& x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<Complex> defect_rows(const IdealTriangulation& tri,
                                 const std::vector<Complex>& logz,
                                 const std::vector<Complex>& log1m) {
  std::vector<Complex> out;
  out.reserve(tri.edges.size() + tri.cusps.size());
  for (const auto& row : tri.edges) {
    out.push_back(row_value(row, logz, log1m) - kTwoPiI);
  }
  for (const auto& row : tri.cusps) {
    out.push_back(row_value(row, logz, log1m));
  }
  return out;
}

}  // namespace

IdealTriangulation parse_triangulation(std::string_view text, bool strict) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw parse_error("triangulation JSON: " + std::string(e.what()), line, col);
  }
  if (!doc.is_object()) {
    throw schema_error("triangulation file must contain a JSON object");
  }
  reject_unknown_fields(doc, {"name", "n_tet", "edges", "cusps"},
                        "triangulation", strict);
  for (const char* f : {"name", "n_tet", "edges", "cusps"}) {
    if (!doc.contains(f)) {
      throw schema_error(std::string("missing field \"") + f + "\"");
    }
  }
  if (!doc["name"].is_string()) throw schema_error("name must be a string");
  if (!doc["n_tet"].is_number_integer()) {
    throw schema_error("n_tet must be an integer");
  }

  IdealTriangulation tri;
  tri.name = doc["name"].get<std::string>();
  tri.n_tet = doc["n_tet"].get<int>();
  if (tri.n_tet < 1) throw schema_error("n_tet must be positive");

  if (!doc["edges"].is_array() || doc["edges"].empty()) {
    throw schema_error("edges must be a non-empty array of gluing rows");
  }
  if (!doc["cusps"].is_array()) {
    throw schema_error("cusps must be an array of gluing rows");
  }
  int idx = 0;
  for (const auto& row : doc["edges"]) {
    const std::string where = "edges[" + std::to_string(idx++) + "]";
    tri.edges.push_back(parse_row(row, tri.n_tet, where.c_str(), strict));
  }
  idx = 0;
  for (const auto& row : doc["cusps"]) {
    const std::string where = "cusps[" + std::to_string(idx++) + "]";
    tri.cusps.push_back(parse_row(row, tri.n_tet, where.c_str(), strict));
  }

  if (static_cast<int>(tri.edges.size()) != tri.n_tet) {
    tri.warnings.push_back(
        "edge count " + std::to_string(tri.edges.size()) + " != n_tet " +
        std::to_string(tri.n_tet) +
        "; a cusped triangulation normally has one edge per tetrahedron");
  }
  return tri;
}

std::vector<Complex> gluing_defect(const IdealTriangulation& tri,
                                   const std::vector<Complex>& shapes) {
  if (static_cast<int>(shapes.size()) != tri.n_tet) {
    throw domain_error("gluing_defect: expected " + std::to_string(tri.n_tet) +
                       " shapes, got " + std::to_string(shapes.size()));
  }
  check_shapes_usable(shapes);
  std::vector<Complex> logz(shapes.size()), log1m(shapes.size());
  for (std::size_t j = 0; j < shapes.size(); ++j) {
    logz[j] = std::log(shapes[j]);
    log1m[j] = std::log(Complex(1.0) - shapes[j]);
  }
  return defect_rows(tri, logz, log1m);
}

std::vector<Complex> gluing_defect(const IdealTriangulation& tri,
                                   const ShapeAssignment& s) {
  return gluing_defect(tri, s.shapes);
}

std::vector<std::vector<Complex>> gluing_jacobian(
    const IdealTriangulation& tri, const std::vector<Complex>& shapes) {
  check_shapes_usable(shapes);
  std::vector<std::vector<Complex>> jac;
  jac.reserve(tri.edges.size() + tri.cusps.size());
  auto push_row = [&](const GluingRow& row) {
    std::vector<Complex> r(shapes.size());
    for (std::size_t j = 0; j < shapes.size(); ++j) {
      const Complex z = shapes[j];
      // d log(1-z) / d log z = -z / (1-z)
      r[j] = static_cast<double>(row.a[j]) -
             static_cast<double>(row.b[j]) * z / (Complex(1.0) - z);
    }
    jac.push_back(std::move(r));
  };
  for (const auto& row : tri.edges) push_row(row);
  for (const auto& row : tri.cusps) push_row(row);
  return jac;
}

ShapeAssignment solve_shapes(const IdealTriangulation& tri,
                             const std::optional<std::vector<Complex>>& initial,
                             const SolveOptions& opts) {
  const int n = tri.n_tet;
  const int m = static_cast<int>(tri.edges.size() + tri.cusps.size());
  if (m < n) {
    throw solve_error("underdetermined gluing system: " + std::to_string(m) +
                          " rows for " + std::to_string(n) + " shapes",
                      std::numeric_limits<double>::infinity());
  }

  std::vector<Complex> u(n, Complex(0.0, pi / 3.0));
  if (initial) {
    if (static_cast<int>(initial->size()) != n) {
      throw domain_error("solve_shapes: initial guess has wrong length");
    }
    check_shapes_usable(*initial);
    for (int j = 0; j < n; ++j) u[j] = std::log((*initial)[j]);
  }

  ShapeAssignment out;
  LogData cur = eval_logs(u);
  if (!cur.valid) {
    throw solve_error("initial guess degenerates the gluing logs",
                      std::numeric_limits<double>::infinity());
  }
  std::vector<Complex> f = defect_rows(tri, cur.logz, cur.log1m);
  double res = max_norm(f);
  out.residual_history.push_back(res);

  int iter = 0;
  for (; iter < opts.max_iterations && res >= opts.tolerance; ++iter) {
    const auto jac = gluing_jacobian(tri, cur.z);
    std::vector<Complex> rhs(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = -f[i];
    std::vector<Complex> du;
    if (!least_squares(jac, rhs, du)) {
      throw singular_jacobian_error(
          "singular Jacobian at iteration " + std::to_string(iter), iter);
    }

    // halve the step until the defect decreases
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= 20; ++h, lambda *= 0.5) {
      std::vector<Complex> trial(u);
      for (int j = 0; j < n; ++j) trial[j] += lambda * du[j];
      LogData next = eval_logs(trial);
      if (!next.valid) continue;
      std::vector<Complex> fn = defect_rows(tri, next.logz, next.log1m);
      const double rn = max_norm(fn);
      if (rn < res) {
        u = std::move(trial);
        cur = std::move(next);
        f = std::move(fn);
        res = rn;
        accepted = true;
        break;
      }
    }
    out.residual_history.push_back(res);
    if (!accepted) {
      throw solve_error("non-convergence: no descent after 20 step halvings (residual " +
                            std::to_string(res) + ")",
                        res);
    }
  }

  if (res >= opts.tolerance) {
    throw solve_error("non-convergence after " +
                          std::to_string(opts.max_iterations) +
                          " iterations (residual " + std::to_string(res) + ")",
                      res);
  }

  if (!opts.permissive) {
    std::string flat;
    for (int j = 0; j < n; ++j) {
      if (cur.z[j].imag() <= 0.0) {
        if (!flat.empty()) flat += ", ";
        flat += std::to_string(j);
      }
    }
    if (!flat.empty()) {
      throw degenerate_solution_error(
          "solution has flat or negatively oriented tetrahedra at index " +
          flat + " (Im z <= 0); set the permissive flag to accept");
    }
  }

  out.shapes = cur.z;
  out.log_shapes.resize(n);
  for (int j = 0; j < n; ++j) out.log_shapes[j] = {cur.logz[j], cur.log1m[j]};
  out.residual = res;
  out.iterations = iter;
  return out;
}

BlochInvariantResult bloch_invariant(const IdealTriangulation& tri,
                                     const ShapeAssignment& s) {
  if (static_cast<int>(s.shapes.size()) != tri.n_tet) {
    throw domain_error("bloch_invariant: assignment does not match n_tet");
  }
  if (!(s.residual <= certificate_threshold)) {
    throw residual_error(
        "bloch_invariant: residual " + std::to_string(s.residual) +
            " above certificate threshold 1e-9; no membership certificate",
        s.residual);
  }
  std::vector<PreBlochTerm> raw;
  raw.reserve(s.shapes.size());
  for (const Complex& z : s.shapes) raw.push_back({Rational(1), z});
  return {make_element(std::move(raw)), true, s.residual};
}

namespace {

// Exhaustive enumeration of A n = r over the box [-B, B]^d with
// per-row interval pruning; values tried outward from zero so small
// assignments surface first.
void box_solutions(const std::vector<std::vector<long>>& a,
                   const std::vector<long>& r, int bound, std::size_t cap,
                   std::vector<std::vector<int>>& out) {
  const std::size_t rows = a.size();
  const std::size_t d = rows == 0 ? 0 : a[0].size();
  // suffix_abs[k][j] = bound * sum_{j' >= j} |a[k][j']|
  std::vector<std::vector<long>> suffix_abs(rows, std::vector<long>(d + 1, 0));
  for (std::size_t k = 0; k < rows; ++k) {
    for (std::size_t j = d; j-- > 0;) {
      suffix_abs[k][j] = suffix_abs[k][j + 1] + std::abs(a[k][j]) * bound;
    }
  }
  std::vector<int> n(d, 0);
  std::vector<long> partial(rows, 0);

  std::vector<int> order;  // 0, 1, -1, 2, -2, ...
  order.push_back(0);
  for (int v = 1; v <= bound; ++v) {
    order.push_back(v);
    order.push_back(-v);
  }

  auto feasible = [&](std::size_t depth) {
    for (std::size_t k = 0; k < rows; ++k) {
      const long rest = r[k] - partial[k];
      if (std::abs(rest) > suffix_abs[k][depth]) return false;
    }
    return true;
  };

  auto rec = [&](auto&& self, std::size_t depth) -> void {
    if (out.size() >= cap) return;
    if (depth == d) {
      out.push_back(n);
      return;
    }
    for (int v : order) {
      n[depth] = v;
      for (std::size_t k = 0; k < rows; ++k) partial[k] += a[k][depth] * v;
      if (feasible(depth + 1)) self(self, depth + 1);
      for (std::size_t k = 0; k < rows; ++k) partial[k] -= a[k][depth] * v;
      if (out.size() >= cap) return;
    }
    n[depth] = 0;
  };
  rec(rec, 0);
}

}  // namespace

std::vector<FlatteningAssignment> flattenings_search(
    const IdealTriangulation& tri, const ShapeAssignment& s, int bound,
    int max_solutions) {
  if (bound < 0) throw domain_error("flattenings_search: bound must be >= 0");
  if (!(s.residual <= certificate_threshold)) {
    throw residual_error(
        "flattenings_search: requires a certified solution (residual " +
            std::to_string(s.residual) + ")",
        s.residual);
  }
  const int n = tri.n_tet;
  const int e = static_cast<int>(tri.edges.size());

  // integer system: sum_j a_kj p_j - b_kj q_j = c_k - 2 + winding correction
  const std::vector<Complex> defects = gluing_defect(tri, s);
  std::vector<std::vector<long>> a(e, std::vector<long>(2 * n, 0));
  std::vector<long> rhs(e, 0);
  for (int k = 0; k < e; ++k) {
    for (int j = 0; j < n; ++j) {
      a[k][j] = tri.edges[k].a[j];
      a[k][n + j] = -tri.edges[k].b[j];
    }
    // defect/(pi i) carries any residual winding; it must be integral
    const Complex wind = defects[k] / Complex(0.0, pi);
    const long w = std::lround(wind.real());
    if (std::abs(wind.real() - static_cast<double>(w)) > 1e-6 ||
        std::abs(wind.imag()) > 1e-6) {
      throw residual_error(
          "flattenings_search: edge row " + std::to_string(k) +
              " defect is not an integral winding",
          std::abs(defects[k]));
    }
    rhs[k] = tri.edges[k].c - 2 - w;
  }

  // Smith normal form decides solvability over Z independent of the box.
  IntegerMatrix am(e, 2 * n);
  for (int k = 0; k < e; ++k) {
    for (int j = 0; j < 2 * n; ++j) am.at(k, j) = a[k][j];
  }
  const SmithNormalForm snf = smith_normal_form(am);
  {
    IntegerMatrix rv(e, 1);
    for (int k = 0; k < e; ++k) rv.at(k, 0) = rhs[k];
    const IntegerMatrix ur = snf.u * rv;
    const int diag = std::min(e, 2 * n);
    for (int i = 0; i < e; ++i) {
      const mpz_class di = (i < diag) ? snf.d.at(i, i) : mpz_class(0);
      if (di == 0) {
        if (ur.at(i, 0) != 0) {
          throw no_flattening_error(
              "flattening system is inconsistent; no flattening exists for "
              "any bound");
        }
      } else if (ur.at(i, 0) % di != 0) {
        throw no_flattening_error(
            "flattening system has no integer solution (divisibility "
            "obstruction)");
      }
    }
  }

  std::vector<std::vector<int>> raw;
  box_solutions(a, rhs, bound, 4096, raw);
  if (raw.empty()) {
    throw no_flattening_error(
        "no flattening within |p|,|q| <= " + std::to_string(bound) +
        "; the system is solvable, try a larger bound");
  }
  std::sort(raw.begin(), raw.end(),
            [](const std::vector<int>& x, const std::vector<int>& y) {
              const int mx = std::abs(*std::max_element(
                  x.begin(), x.end(),
                  [](int p, int q) { return std::abs(p) < std::abs(q); }));
              const int my = std::abs(*std::max_element(
                  y.begin(), y.end(),
                  [](int p, int q) { return std::abs(p) < std::abs(q); }));
              if (mx != my) return mx < my;
              return x < y;
            });
  if (static_cast<int>(raw.size()) > max_solutions) {
    raw.resize(max_solutions);
  }

  std::vector<FlatteningAssignment> out;
  out.reserve(raw.size());
  for (const auto& v : raw) {
    FlatteningAssignment fa(n);
    for (int j = 0; j < n; ++j) fa[j] = {v[j], v[n + j]};
    out.push_back(std::move(fa));
  }
  return out;
}

}  // namespace bloch

#include "bloch/homology.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>

#include "bloch/errors.hpp"

namespace bloch {

IntegerMatrix IntegerMatrix::identity(int n) {
  IntegerMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntegerMatrix IntegerMatrix::from_rows(
    const std::vector<std::vector<long long>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
  IntegerMatrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) {
      throw std::invalid_argument("IntegerMatrix::from_rows: ragged rows");
    }
    for (int j = 0; j < c; ++j) m.at(i, j) = static_cast<long>(rows[i][j]);
  }
  return m;
}

bool IntegerMatrix::is_zero() const {
  for (const auto& x : e_) {
    if (x != 0) return false;
  }
  return true;
}

bool operator==(const IntegerMatrix& a, const IntegerMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
}

IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b) {
  if (a.cols_ != b.rows_) {
    throw std::invalid_argument("IntegerMatrix: dimension mismatch in product");
  }
  IntegerMatrix out(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i) {
    for (int k = 0; k < a.cols_; ++k) {
      const mpz_class& aik = a.at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < b.cols_; ++j) {
        out.at(i, j) += aik * b.at(k, j);
      }
    }
  }
  return out;
}

std::vector<mpz_class> SmithNormalForm::invariant_factors() const {
  std::vector<mpz_class> out;
  const int n = std::min(d.rows(), d.cols());
  for (int i = 0; i < n; ++i) {
    if (d.at(i, i) != 0) out.push_back(d.at(i, i));
  }
  return out;
}

namespace {

// quotient with |n - q*d| <= |d|/2
mpz_class nearest_quotient(const mpz_class& n, const mpz_class& d) {
  mpz_class q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  mpz_class r2 = 2 * abs(r);
  if (r2 > abs(d)) {
    q += (sgn(r) == sgn(d)) ? 1 : -1;
  }
  return q;
}

struct SnfWorker {
  IntegerMatrix d, u, v;

  explicit SnfWorker(const IntegerMatrix& m)
      : d(m),
        u(IntegerMatrix::identity(m.rows())),
        v(IntegerMatrix::identity(m.cols())) {}

  void swap_rows(int a, int b) {
    if (a == b) return;
    for (int j = 0; j < d.cols(); ++j) std::swap(d.at(a, j), d.at(b, j));
    for (int j = 0; j < u.cols(); ++j) std::swap(u.at(a, j), u.at(b, j));
  }
  void swap_cols(int a, int b) {
    if (a == b) return;
    for (int i = 0; i < d.rows(); ++i) std::swap(d.at(i, a), d.at(i, b));
    for (int i = 0; i < v.rows(); ++i) std::swap(v.at(i, a), v.at(i, b));
  }
  // row dst -= q * row src
  void row_axpy(int dst, int src, const mpz_class& q) {
    if (q == 0) return;
    for (int j = 0; j < d.cols(); ++j) d.at(dst, j) -= q * d.at(src, j);
    for (int j = 0; j < u.cols(); ++j) u.at(dst, j) -= q * u.at(src, j);
  }
  void col_axpy(int dst, int src, const mpz_class& q) {
    if (q == 0) return;
    for (int i = 0; i < d.rows(); ++i) d.at(i, dst) -= q * d.at(i, src);
    for (int i = 0; i < v.rows(); ++i) v.at(i, dst) -= q * v.at(i, src);
  }
  void negate_row(int r) {
    for (int j = 0; j < d.cols(); ++j) d.at(r, j) = -d.at(r, j);
    for (int j = 0; j < u.cols(); ++j) u.at(r, j) = -u.at(r, j);
  }

  // smallest |entry| != 0 in the trailing submatrix, or false
  bool find_pivot(int t, int& pr, int& pc) const {
    bool found = false;
    mpz_class best;
    for (int i = t; i < d.rows(); ++i) {
      for (int j = t; j < d.cols(); ++j) {
        const mpz_class& x = d.at(i, j);
        if (x == 0) continue;
        mpz_class a = abs(x);
        if (!found || a < best) {
          found = true;
          best = a;
          pr = i;
          pc = j;
        }
      }
    }
    return found;
  }

  void run() {
    const int limit = std::min(d.rows(), d.cols());
    for (int t = 0; t < limit; ++t) {
      int pr = 0, pc = 0;
      if (!find_pivot(t, pr, pc)) break;
      for (;;) {
        // always work from the minimal-absolute-value pivot; every rerun
        // of this loop has strictly shrunk it, so growth stays tame
        swap_rows(t, pr);
        swap_cols(t, pc);

        // clear column t; nonzero remainders become the next pivot
        bool dirty = false;
        for (int i = t + 1; i < d.rows(); ++i) {
          if (d.at(i, t) == 0) continue;
          row_axpy(i, t, nearest_quotient(d.at(i, t), d.at(t, t)));
          if (d.at(i, t) != 0) dirty = true;
        }
        if (dirty) {
          find_pivot(t, pr, pc);
          continue;
        }
        // column t is zero below the pivot, so these touch row t only
        for (int j = t + 1; j < d.cols(); ++j) {
          if (d.at(t, j) == 0) continue;
          col_axpy(j, t, nearest_quotient(d.at(t, j), d.at(t, t)));
          if (d.at(t, j) != 0) dirty = true;
        }
        if (dirty) {
          find_pivot(t, pr, pc);
          continue;
        }
        // pivot must divide the rest for the divisibility chain
        bool divides_all = true;
        for (int i = t + 1; i < d.rows() && divides_all; ++i) {
          for (int j = t + 1; j < d.cols(); ++j) {
            if (d.at(i, j) % d.at(t, t) != 0) {
              row_axpy(t, i, mpz_class(-1));  // pull the row up, re-reduce
              divides_all = false;
              break;
            }
          }
        }
        if (divides_all) break;
        pr = t;
        pc = t;
      }
      if (d.at(t, t) < 0) negate_row(t);
    }
  }
};

}  // namespace

SmithNormalForm smith_normal_form(const IntegerMatrix& m) {
  SnfWorker w(m);
  w.run();
  return {std::move(w.u), std::move(w.d), std::move(w.v)};
}

mpz_class determinant(const IntegerMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("determinant: matrix not square");
  }
  const int n = m.rows();
  if (n == 0) return 1;
  IntegerMatrix a = m;
  int sign = 1;
  mpz_class prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a.at(k, k) == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i) {
        if (a.at(i, k) != 0) {
          swap = i;
          break;
        }
      }
      if (swap < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(swap, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        mpz_class t = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
        a.at(i, j) = t / prev;  // Bareiss: exact division
      }
      a.at(i, k) = 0;
    }
    prev = a.at(k, k);
  }
  return sign > 0 ? a.at(n - 1, n - 1) : mpz_class(-a.at(n - 1, n - 1));
}

long rank_mod2(const IntegerMatrix& m) {
  const int rows = m.rows();
  const int cols = m.cols();
  std::vector<std::vector<unsigned char>> a(
      rows, std::vector<unsigned char>(cols, 0));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      a[i][j] = static_cast<unsigned char>(mpz_odd_p(m.at(i, j).get_mpz_t()));
    }
  }
  long rank = 0;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int pivot = -1;
    for (int i = row; i < rows; ++i) {
      if (a[i][col]) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(a[row], a[pivot]);
    for (int i = 0; i < rows; ++i) {
      if (i != row && a[i][col]) {
        for (int j = col; j < cols; ++j) a[i][j] ^= a[row][j];
      }
    }
    ++row;
    ++rank;
  }
  return rank;
}

ChainComplex make_chain_complex(std::array<long, 4> dims, IntegerMatrix d3,
                                IntegerMatrix d2, IntegerMatrix d1) {
  auto check_shape = [&](const IntegerMatrix& m, long r, long c,
                         const char* name) {
    if (m.rows() != r || m.cols() != c) {
      throw not_a_complex_error(std::string(name) + " must be " +
                                std::to_string(r) + "x" + std::to_string(c) +
                                ", got " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
    }
  };
  check_shape(d1, dims[0], dims[1], "d1");
  check_shape(d2, dims[1], dims[2], "d2");
  check_shape(d3, dims[2], dims[3], "d3");
  if (!(d1 * d2).is_zero()) {
    throw not_a_complex_error("d1 o d2 != 0: boundary maps do not compose");
  }
  if (!(d2 * d3).is_zero()) {
    throw not_a_complex_error("d2 o d3 != 0: boundary maps do not compose");
  }
  return {dims, std::move(d1), std::move(d2), std::move(d3)};
}

HomologySummary homology(const ChainComplex& c, bool mod2) {
  const std::array<const IntegerMatrix*, 5> boundary = {nullptr, &c.d1, &c.d2,
                                                        &c.d3, nullptr};
  std::array<long, 5> rank_z{};
  std::array<std::vector<mpz_class>, 5> factors{};
  for (int k = 1; k <= 3; ++k) {
    const auto snf = smith_normal_form(*boundary[k]);
    factors[k] = snf.invariant_factors();
    rank_z[k] = static_cast<long>(factors[k].size());
  }

  HomologySummary h;
  for (int i = 0; i <= 3; ++i) {
    const long rank_in = (i < 3) ? rank_z[i + 1] : 0;
    const long rank_out = rank_z[i];
    h.rank[i] = c.dims[i] - rank_out - rank_in;
    if (i < 3) {
      for (const auto& f : factors[i + 1]) {
        if (f > 1) h.torsion[i].push_back(f);
      }
    }
  }
  if (mod2) {
    std::array<long, 5> rank2{};
    for (int k = 1; k <= 3; ++k) rank2[k] = rank_mod2(*boundary[k]);
    for (int i = 0; i <= 3; ++i) {
      const long rank_in = (i < 3) ? rank2[i + 1] : 0;
      h.mod2_dim[i] = c.dims[i] - rank2[i] - rank_in;
    }
    h.has_mod2 = true;
  }
  return h;
}

namespace {

long pow2_checked(long e, const char* what) {
  if (e < 0 || e >= 62) {
    throw std::overflow_error(std::string(what) + ": exponent " +
                              std::to_string(e) + " out of range");
  }
  return 1L << e;
}

}  // namespace

long count_spin_structures(const HomologySummary& h) {
  if (!h.has_mod2) {
    throw domain_error("count_spin_structures: mod-2 dimensions not computed");
  }
  return pow2_checked(h.mod2_dim[1], "count_spin_structures");
}

long count_stable_orientations(const HomologySummary& h) {
  if (!h.has_mod2) {
    throw domain_error(
        "count_stable_orientations: mod-2 dimensions not computed");
  }
  const long h1 = pow2_checked(h.mod2_dim[1], "count_stable_orientations");
  const long h2 = pow2_checked(h.mod2_dim[2], "count_stable_orientations");
  return stable_three_stem_order * h1 * h2 * 2;
}

namespace {

using nlohmann::json;

IntegerMatrix matrix_from_json(const json& j, const char* name) {
  if (!j.is_array()) {
    throw schema_error(std::string(name) + " must be an array of rows");
  }
  std::vector<std::vector<long long>> rows;
  rows.reserve(j.size());
  for (const auto& row : j) {
    if (!row.is_array()) {
      throw schema_error(std::string(name) + " rows must be arrays");
    }
    std::vector<long long> r;
    r.reserve(row.size());
    for (const auto& v : row) {
      if (!v.is_number_integer()) {
        throw schema_error(std::string(name) + " entries must be integers");
      }
      r.push_back(v.get<long long>());
    }
    rows.push_back(std::move(r));
  }
  for (const auto& r : rows) {
    if (r.size() != rows[0].size()) {
      throw schema_error(std::string(name) + " has ragged rows");
    }
  }
  return IntegerMatrix::from_rows(rows);
}

// An entryless matrix (r or c zero) may be given as []; resize to the
// declared dims when they carry no entries.
IntegerMatrix fit_empty(IntegerMatrix m, long r, long c, const char* name) {
  if ((r == 0 || c == 0) && m.rows() == 0) {
    return IntegerMatrix(static_cast<int>(r), static_cast<int>(c));
  }
  if (m.rows() == static_cast<int>(r) && m.cols() == 0 && c == 0) {
    return IntegerMatrix(static_cast<int>(r), 0);
  }
  if (m.rows() != static_cast<int>(r) || m.cols() != static_cast<int>(c)) {
    throw schema_error(std::string(name) + " is " + std::to_string(m.rows()) +
                       "x" + std::to_string(m.cols()) + " but dims require " +
                       std::to_string(r) + "x" + std::to_string(c));
  }
  return m;
}

}  // namespace

ChainComplex parse_chain_complex(std::string_view text, bool strict) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error("chain complex JSON: " + std::string(e.what()), 0, 0);
  }
  if (!doc.is_object()) {
    throw schema_error("chain complex file must contain a JSON object");
  }
  if (strict) {
    for (const auto& item : doc.items()) {
      const std::string& k = item.key();
      if (k != "d1" && k != "d2" && k != "d3" && k != "dims") {
        throw schema_error("unknown field \"" + k +
                           "\" in chain complex (strict mode)");
      }
    }
  }
  for (const char* f : {"d1", "d2", "d3"}) {
    if (!doc.contains(f)) {
      throw schema_error(std::string("missing field \"") + f + "\"");
    }
  }
  IntegerMatrix d1 = matrix_from_json(doc["d1"], "d1");
  IntegerMatrix d2 = matrix_from_json(doc["d2"], "d2");
  IntegerMatrix d3 = matrix_from_json(doc["d3"], "d3");

  std::array<long, 4> dims{};
  if (doc.contains("dims")) {
    const auto& dj = doc["dims"];
    if (!dj.is_array() || dj.size() != 4) {
      throw schema_error("dims must be an array of 4 integers");
    }
    for (int i = 0; i < 4; ++i) {
      if (!dj[i].is_number_integer() || dj[i].get<long>() < 0) {
        throw schema_error("dims entries must be non-negative integers");
      }
      dims[static_cast<std::size_t>(i)] = dj[i].get<long>();
    }
    d1 = fit_empty(std::move(d1), dims[0], dims[1], "d1");
    d2 = fit_empty(std::move(d2), dims[1], dims[2], "d2");
    d3 = fit_empty(std::move(d3), dims[2], dims[3], "d3");
  } else {
    dims = {d1.rows(), d1.cols(), d2.cols(), d3.cols()};
    if (d2.rows() != d1.cols() || d3.rows() != d2.cols()) {
      throw schema_error(
          "boundary matrix shapes do not chain; give explicit dims for "
          "complexes with entryless boundaries");
    }
  }
  return make_chain_complex(dims, std::move(d3), std::move(d2), std::move(d1));
}

}  // namespace bloch

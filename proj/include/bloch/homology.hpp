#ifndef BLOCHINV_HOMOLOGY_HPP
#define BLOCHINV_HOMOLOGY_HPP

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace bloch {

// Dense integer matrix, arbitrary-precision entries, row-major.
class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), e_(static_cast<std::size_t>(rows) * cols) {}

  static IntegerMatrix identity(int n);
  static IntegerMatrix from_rows(const std::vector<std::vector<long long>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  mpz_class& at(int r, int c) { return e_[static_cast<std::size_t>(r) * cols_ + c]; }
  const mpz_class& at(int r, int c) const {
    return e_[static_cast<std::size_t>(r) * cols_ + c];
  }

  bool is_zero() const;

  friend bool operator==(const IntegerMatrix& a, const IntegerMatrix& b);
  friend IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<mpz_class> e_;
};

// u * m * v = d with u, v unimodular and d diagonal, nonnegative,
// d_1 | d_2 | ... Pivots pick the minimal-absolute-value entry to keep
// coefficient growth down.
struct SmithNormalForm {
  IntegerMatrix u, d, v;
  std::vector<mpz_class> invariant_factors() const;  // nonzero diagonal
};

SmithNormalForm smith_normal_form(const IntegerMatrix& m);

// Exact determinant (Bareiss). Square input required.
mpz_class determinant(const IntegerMatrix& m);

long rank_mod2(const IntegerMatrix& m);

// Boundary maps of a finite chain complex C_3 -> C_2 -> C_1 -> C_0.
// d_k has rows = dim C_{k-1}, cols = dim C_k; dims are carried explicitly
// so empty boundary matrices stay unambiguous.
struct ChainComplex {
  std::array<long, 4> dims{};
  IntegerMatrix d1, d2, d3;
};

// Validates dimensions and d o d = 0; throws not_a_complex_error.
ChainComplex make_chain_complex(std::array<long, 4> dims, IntegerMatrix d3,
                                IntegerMatrix d2, IntegerMatrix d1);

// Parses { "d3": [[int]], "d2": [[int]], "d1": [[int]] } with an optional
// "dims": [c0, c1, c2, c3]. Without dims they are inferred from the
// matrix shapes; complexes with entryless boundary matrices (e.g. a
// sphere with cells only in degrees 0 and 3) need dims spelled out.
ChainComplex parse_chain_complex(std::string_view text, bool strict = false);

struct HomologySummary {
  std::array<long, 4> rank{};
  std::array<std::vector<mpz_class>, 4> torsion{};  // invariant factors > 1
  std::array<long, 4> mod2_dim{};
  bool has_mod2 = false;
};

HomologySummary homology(const ChainComplex& c, bool mod2 = true);

// Order of the third stable stem, Z/24.
inline constexpr long stable_three_stem_order = 24;

// 2^{dim H_1(.; Z/2)}: the number of Spin-structures on a closed
// orientable 3-manifold with this homology.
long count_spin_structures(const HomologySummary& h);

// 24 * 2^{h1} * 2^{h2} * 2: stable-homotopy orientations, parametrized by
// the third stable stem, H_1 and H_2 mod 2, and a global sign.
long count_stable_orientations(const HomologySummary& h);

}  // namespace bloch

#endif  // BLOCHINV_HOMOLOGY_HPP

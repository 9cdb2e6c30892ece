#ifndef BLOCHINV_RATIONAL_HPP
#define BLOCHINV_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace bloch {

// Exact rational with 64-bit numerator/denominator, always normalized
// (gcd 1, positive denominator). Coefficients in formal elements stay
// tiny (eigenprojections halve, sums add), so 64 bits with checked
// intermediates is ample; overflow throws instead of wrapping.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  std::int64_t as_integer() const {
    if (!is_integer()) {
      throw std::domain_error("Rational::as_integer: " + to_string() +
                              " is not an integer");
    }
    return num_;
  }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational operator-() const { return Rational(checked(-static_cast<__int128>(num_)), den_, already_normal{}); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.den_ +
                 static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return make(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.num_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return make(n, d);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    __int128 n = static_cast<__int128>(a.num_) * b.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.num_;
    return make(n, d);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <
           static_cast<__int128>(b.num_) * a.den_;
  }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
  }

 private:
  struct already_normal {};
  Rational(std::int64_t n, std::int64_t d, already_normal) : num_(n), den_(d) {}

  static std::int64_t checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) {
      throw std::overflow_error("Rational: 64-bit overflow");
    }
    return static_cast<std::int64_t>(v);
  }

  static Rational make(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    return Rational(checked(n), checked(d), already_normal{});
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  void normalize() { *this = make(num_, den_); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace bloch

#endif  // BLOCHINV_RATIONAL_HPP

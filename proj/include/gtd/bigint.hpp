#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gtd {

// Arbitrary-precision signed integer with an inline int64 fast path.
// Values that fit in int64 never touch the heap; larger values carry a
// base-2^32 little-endian magnitude.
class BigInt {
public:
  BigInt() = default;
  BigInt(int64_t v) : small_(v) {}

  static BigInt from_string(const std::string& s);
  std::string to_string() const;

  bool is_zero() const { return mag_.empty() ? small_ == 0 : false; }
  int sign() const;
  bool is_small() const { return mag_.empty(); }
  bool fits_int64() const { return mag_.empty(); }
  int64_t to_int64() const { return small_; }

  BigInt operator-() const;
  BigInt abs() const;

  friend BigInt operator+(const BigInt& a, const BigInt& b);
  friend BigInt operator-(const BigInt& a, const BigInt& b);
  friend BigInt operator*(const BigInt& a, const BigInt& b);
  friend BigInt operator/(const BigInt& a, const BigInt& b);
  friend BigInt operator%(const BigInt& a, const BigInt& b);

  BigInt& operator+=(const BigInt& o) { *this = *this + o; return *this; }
  BigInt& operator-=(const BigInt& o) { *this = *this - o; return *this; }
  BigInt& operator*=(const BigInt& o) { *this = *this * o; return *this; }

  // Truncating division: a == q*b + r with |r| < |b| and sign(r) == sign(a).
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
  static BigInt gcd(const BigInt& a, const BigInt& b);

  bool divisible_by(const BigInt& d) const;

  friend bool operator==(const BigInt& a, const BigInt& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return cmp(a, b) != 0; }
  friend bool operator<(const BigInt& a, const BigInt& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const BigInt& a, const BigInt& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const BigInt& a, const BigInt& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const BigInt& a, const BigInt& b) { return cmp(a, b) >= 0; }

  static int cmp(const BigInt& a, const BigInt& b);

private:
  // mag_ empty: value is small_. Otherwise value is sign_ * mag_ (mag_ has no
  // leading zero word and represents a magnitude that may exceed int64).
  int64_t small_ = 0;
  int sign_ = 0;
  std::vector<uint32_t> mag_;

  void normalize();
  std::vector<uint32_t> magnitude() const;
  static BigInt from_magnitude(int sign, std::vector<uint32_t> mag);

  static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
  static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
  static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
  static std::vector<uint32_t> mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
  static void divmod_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                         std::vector<uint32_t>& q, std::vector<uint32_t>& r);
};

}  // namespace gtd

#include "gtd/bigint.hpp"

#include <algorithm>
#include <stdexcept>

namespace gtd {

namespace {
constexpr uint64_t kBase = uint64_t(1) << 32;
}

int BigInt::sign() const {
  if (!mag_.empty()) return sign_;
  return small_ > 0 ? 1 : (small_ < 0 ? -1 : 0);
}

std::vector<uint32_t> BigInt::magnitude() const {
  if (!mag_.empty()) return mag_;
  uint64_t v = small_ >= 0 ? uint64_t(small_) : ~uint64_t(small_) + 1;
  std::vector<uint32_t> m;
  while (v) {
    m.push_back(uint32_t(v & 0xffffffffu));
    v >>= 32;
  }
  return m;
}

BigInt BigInt::from_magnitude(int sign, std::vector<uint32_t> mag) {
  while (!mag.empty() && mag.back() == 0) mag.pop_back();
  BigInt r;
  if (mag.empty()) return r;
  if (mag.size() <= 2) {
    uint64_t v = mag[0];
    if (mag.size() == 2) v |= uint64_t(mag[1]) << 32;
    if (sign > 0 && v <= uint64_t(INT64_MAX)) {
      r.small_ = int64_t(v);
      return r;
    }
    if (sign < 0 && v <= uint64_t(INT64_MAX) + 1) {
      r.small_ = int64_t(-v);  // wraps correctly for INT64_MIN
      return r;
    }
  }
  r.sign_ = sign;
  r.mag_ = std::move(mag);
  return r;
}

int BigInt::cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

std::vector<uint32_t> BigInt::add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  std::vector<uint32_t> r;
  r.reserve(std::max(a.size(), b.size()) + 1);
  uint64_t carry = 0;
  for (size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    uint64_t s = carry;
    if (i < a.size()) s += a[i];
    if (i < b.size()) s += b[i];
    r.push_back(uint32_t(s & 0xffffffffu));
    carry = s >> 32;
  }
  if (carry) r.push_back(uint32_t(carry));
  return r;
}

// requires a >= b
std::vector<uint32_t> BigInt::sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  std::vector<uint32_t> r;
  r.reserve(a.size());
  int64_t borrow = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    int64_t s = int64_t(a[i]) - borrow - (i < b.size() ? int64_t(b[i]) : 0);
    if (s < 0) {
      s += int64_t(kBase);
      borrow = 1;
    } else {
      borrow = 0;
    }
    r.push_back(uint32_t(s));
  }
  while (!r.empty() && r.back() == 0) r.pop_back();
  return r;
}

std::vector<uint32_t> BigInt::mul_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<uint32_t> r(a.size() + b.size(), 0);
  for (size_t i = 0; i < a.size(); ++i) {
    uint64_t carry = 0;
    for (size_t j = 0; j < b.size(); ++j) {
      uint64_t cur = uint64_t(r[i + j]) + uint64_t(a[i]) * b[j] + carry;
      r[i + j] = uint32_t(cur & 0xffffffffu);
      carry = cur >> 32;
    }
    size_t k = i + b.size();
    while (carry) {
      uint64_t cur = uint64_t(r[k]) + carry;
      r[k] = uint32_t(cur & 0xffffffffu);
      carry = cur >> 32;
      ++k;
    }
  }
  while (!r.empty() && r.back() == 0) r.pop_back();
  return r;
}

// Binary long division on magnitudes. Slow but simple; operands in this
// library stay a few words long.
void BigInt::divmod_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                        std::vector<uint32_t>& q, std::vector<uint32_t>& r) {
  q.assign(a.size(), 0);
  r.clear();
  for (size_t bit = a.size() * 32; bit-- > 0;) {
    // r = r*2 + bit
    uint32_t carry = (a[bit / 32] >> (bit % 32)) & 1u;
    for (size_t i = 0; i < r.size(); ++i) {
      uint32_t next = r[i] >> 31;
      r[i] = (r[i] << 1) | carry;
      carry = next;
    }
    if (carry) r.push_back(carry);
    if (cmp_mag(r, b) >= 0) {
      r = sub_mag(r, b);
      q[bit / 32] |= uint32_t(1) << (bit % 32);
    }
  }
  while (!q.empty() && q.back() == 0) q.pop_back();
}

int BigInt::cmp(const BigInt& a, const BigInt& b) {
  if (a.is_small() && b.is_small())
    return a.small_ < b.small_ ? -1 : (a.small_ > b.small_ ? 1 : 0);
  int sa = a.sign(), sb = b.sign();
  if (sa != sb) return sa < sb ? -1 : 1;
  int c = cmp_mag(a.magnitude(), b.magnitude());
  return sa >= 0 ? c : -c;
}

BigInt BigInt::operator-() const {
  if (is_small()) {
    if (small_ != INT64_MIN) return BigInt(-small_);
  }
  BigInt r = *this;
  if (r.is_small()) {
    // INT64_MIN: promote
    return from_magnitude(1, magnitude());
  }
  r.sign_ = -r.sign_;
  return r;
}

BigInt BigInt::abs() const { return sign() < 0 ? -*this : *this; }

BigInt operator+(const BigInt& a, const BigInt& b) {
  if (a.is_small() && b.is_small()) {
    int64_t r;
    if (!__builtin_add_overflow(a.small_, b.small_, &r)) return BigInt(r);
  }
  int sa = a.sign(), sb = b.sign();
  if (sa == 0) return b;
  if (sb == 0) return a;
  auto ma = a.magnitude(), mb = b.magnitude();
  if (sa == sb) return BigInt::from_magnitude(sa, BigInt::add_mag(ma, mb));
  int c = BigInt::cmp_mag(ma, mb);
  if (c == 0) return BigInt();
  if (c > 0) return BigInt::from_magnitude(sa, BigInt::sub_mag(ma, mb));
  return BigInt::from_magnitude(sb, BigInt::sub_mag(mb, ma));
}

BigInt operator-(const BigInt& a, const BigInt& b) {
  if (a.is_small() && b.is_small()) {
    int64_t r;
    if (!__builtin_sub_overflow(a.small_, b.small_, &r)) return BigInt(r);
  }
  return a + (-b);
}

BigInt operator*(const BigInt& a, const BigInt& b) {
  if (a.is_small() && b.is_small()) {
    int64_t r;
    if (!__builtin_mul_overflow(a.small_, b.small_, &r)) return BigInt(r);
  }
  int s = a.sign() * b.sign();
  if (s == 0) return BigInt();
  return BigInt::from_magnitude(s, BigInt::mul_mag(a.magnitude(), b.magnitude()));
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
  if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
  if (a.is_small() && b.is_small() && !(a.small_ == INT64_MIN && b.small_ == -1)) {
    q = BigInt(a.small_ / b.small_);
    r = BigInt(a.small_ % b.small_);
    return;
  }
  std::vector<uint32_t> qm, rm;
  divmod_mag(a.magnitude(), b.magnitude(), qm, rm);
  int qs = a.sign() * b.sign();
  q = from_magnitude(qs, std::move(qm));
  r = from_magnitude(a.sign(), std::move(rm));
}

BigInt operator/(const BigInt& a, const BigInt& b) {
  BigInt q, r;
  BigInt::divmod(a, b, q, r);
  return q;
}

BigInt operator%(const BigInt& a, const BigInt& b) {
  BigInt q, r;
  BigInt::divmod(a, b, q, r);
  return r;
}

BigInt BigInt::gcd(const BigInt& a, const BigInt& b) {
  BigInt x = a.abs(), y = b.abs();
  while (!y.is_zero()) {
    BigInt q, r;
    divmod(x, y, q, r);
    x = y;
    y = r;
  }
  return x;
}

bool BigInt::divisible_by(const BigInt& d) const {
  if (d.is_zero()) return is_zero();
  return (*this % d).is_zero();
}

BigInt BigInt::from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("BigInt: empty string");
  size_t i = 0;
  int sign = 1;
  if (s[0] == '-') {
    sign = -1;
    i = 1;
  } else if (s[0] == '+') {
    i = 1;
  }
  if (i == s.size()) throw std::invalid_argument("BigInt: bad integer '" + s + "'");
  BigInt r;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9')
      throw std::invalid_argument("BigInt: bad integer '" + s + "'");
    r = r * BigInt(10) + BigInt(s[i] - '0');
  }
  return sign < 0 ? -r : r;
}

std::string BigInt::to_string() const {
  if (is_small()) return std::to_string(small_);
  std::string out;
  BigInt v = abs();
  BigInt ten9(1000000000);
  std::vector<uint32_t> chunks;
  while (!v.is_zero()) {
    BigInt q, r;
    divmod(v, ten9, q, r);
    chunks.push_back(uint32_t(r.to_int64()));
    v = q;
  }
  out = std::to_string(chunks.back());
  for (size_t i = chunks.size() - 1; i-- > 0;) {
    std::string part = std::to_string(chunks[i]);
    out += std::string(9 - part.size(), '0') + part;
  }
  return sign() < 0 ? "-" + out : out;
}

}  // namespace gtd

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace wheelhouse {

// Arbitrary-precision signed integer, sign/magnitude with 32-bit limbs.
// Schoolbook arithmetic; values in this project are small (structure
// constants and elimination pivots), so asymptotics do not matter.
class BigInt {
public:
  BigInt() : sign_(0) {}
  BigInt(long long v) : sign_(0) {
    if (v == 0) return;
    sign_ = v > 0 ? 1 : -1;
    unsigned long long a = v > 0 ? static_cast<unsigned long long>(v)
                                 : 0ULL - static_cast<unsigned long long>(v);
    while (a) {
      limbs_.push_back(static_cast<std::uint32_t>(a & 0xffffffffULL));
      a >>= 32;
    }
  }

  static BigInt from_string(const std::string& s) {
    BigInt r;
    std::size_t i = 0;
    int sgn = 1;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      if (s[i] == '-') sgn = -1;
      ++i;
    }
    if (i == s.size()) throw std::invalid_argument("BigInt: empty literal");
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BigInt: bad digit");
      r.mul_small_inplace(10);
      r.add_small_inplace(static_cast<std::uint32_t>(s[i] - '0'));
    }
    if (!r.limbs_.empty()) r.sign_ = sgn;
    return r;
  }

  bool is_zero() const { return sign_ == 0; }
  bool is_one() const { return sign_ == 1 && limbs_.size() == 1 && limbs_[0] == 1; }
  int sign() const { return sign_; }

  bool fits_int64() const {
    if (limbs_.size() > 2) return false;
    unsigned long long a = abs_u64_unchecked();
    if (sign_ >= 0) return a <= 0x7fffffffffffffffULL;
    return a <= 0x8000000000000000ULL;
  }
  long long to_int64() const {
    if (!fits_int64()) throw std::overflow_error("BigInt: does not fit int64");
    unsigned long long a = abs_u64_unchecked();
    if (sign_ >= 0) return static_cast<long long>(a);
    return -static_cast<long long>(a - 1) - 1;
  }

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.sign_ == b.sign_ && a.limbs_ == b.limbs_;
  }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
  friend bool operator<(const BigInt& a, const BigInt& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const BigInt& a, const BigInt& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const BigInt& a, const BigInt& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const BigInt& a, const BigInt& b) { return cmp(a, b) >= 0; }

  static int cmp(const BigInt& a, const BigInt& b) {
    if (a.sign_ != b.sign_) return a.sign_ < b.sign_ ? -1 : 1;
    int c = cmp_abs(a.limbs_, b.limbs_);
    return a.sign_ >= 0 ? c : -c;
  }

  BigInt operator-() const {
    BigInt r = *this;
    r.sign_ = -r.sign_;
    return r;
  }

  friend BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    BigInt r;
    if (a.sign_ == b.sign_) {
      r.limbs_ = add_abs(a.limbs_, b.limbs_);
      r.sign_ = a.sign_;
    } else {
      int c = cmp_abs(a.limbs_, b.limbs_);
      if (c == 0) return BigInt();
      if (c > 0) {
        r.limbs_ = sub_abs(a.limbs_, b.limbs_);
        r.sign_ = a.sign_;
      } else {
        r.limbs_ = sub_abs(b.limbs_, a.limbs_);
        r.sign_ = b.sign_;
      }
    }
    return r;
  }
  friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return BigInt();
    BigInt r;
    r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
    for (std::size_t i = 0; i < a.limbs_.size(); ++i) {
      std::uint64_t carry = 0;
      for (std::size_t j = 0; j < b.limbs_.size(); ++j) {
        std::uint64_t cur = static_cast<std::uint64_t>(a.limbs_[i]) * b.limbs_[j] +
                            r.limbs_[i + j] + carry;
        r.limbs_[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
        carry = cur >> 32;
      }
      std::size_t k = i + b.limbs_.size();
      while (carry) {
        std::uint64_t cur = r.limbs_[k] + carry;
        r.limbs_[k] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
        carry = cur >> 32;
        ++k;
      }
    }
    r.trim();
    r.sign_ = a.sign_ * b.sign_;
    return r;
  }

  // Truncated quotient (rounds toward zero), matching C semantics.
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.sign_ == 0) throw std::domain_error("BigInt: division by zero");
    if (cmp_abs(a.limbs_, b.limbs_) < 0) {
      q = BigInt();
      r = a;
      return;
    }
    std::vector<std::uint32_t> qm, rm;
    divmod_abs(a.limbs_, b.limbs_, qm, rm);
    q.limbs_ = std::move(qm);
    q.trim();
    q.sign_ = q.limbs_.empty() ? 0 : a.sign_ * b.sign_;
    r.limbs_ = std::move(rm);
    r.trim();
    r.sign_ = r.limbs_.empty() ? 0 : a.sign_;
  }

  friend BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return q;
  }
  friend BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return r;
  }

  // Exact division; throws if the remainder is nonzero.
  static BigInt div_exact(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    if (!r.is_zero()) throw std::logic_error("BigInt: inexact division");
    return q;
  }

  BigInt abs() const {
    BigInt r = *this;
    if (r.sign_ < 0) r.sign_ = 1;
    return r;
  }

  static BigInt gcd(BigInt a, BigInt b) {
    a.sign_ = a.limbs_.empty() ? 0 : 1;
    b.sign_ = b.limbs_.empty() ? 0 : 1;
    while (!b.is_zero()) {
      BigInt q, r;
      divmod(a, b, q, r);
      a = std::move(b);
      b = std::move(r);
    }
    return a;
  }

  std::string to_string() const {
    if (sign_ == 0) return "0";
    std::vector<std::uint32_t> tmp = limbs_;
    std::string digits;
    while (!tmp.empty()) {
      std::uint64_t rem = 0;
      for (std::size_t i = tmp.size(); i-- > 0;) {
        std::uint64_t cur = (rem << 32) | tmp[i];
        tmp[i] = static_cast<std::uint32_t>(cur / 1000000000ULL);
        rem = cur % 1000000000ULL;
      }
      while (!tmp.empty() && tmp.back() == 0) tmp.pop_back();
      for (int k = 0; k < 9; ++k) {
        digits.push_back(static_cast<char>('0' + rem % 10));
        rem /= 10;
      }
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    std::string out;
    if (sign_ < 0) out.push_back('-');
    out.append(digits.rbegin(), digits.rend());
    return out;
  }

  std::size_t hash() const {
    std::size_t h = static_cast<std::size_t>(sign_ + 2);
    for (std::uint32_t l : limbs_) h = h * 1000003u + l;
    return h;
  }

  // Residue modulo a word-size prime, in [0, p).
  std::uint64_t mod_u64(std::uint64_t p) const {
    std::uint64_t r = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) r = ((r << 32) | limbs_[i]) % p;
    if (sign_ < 0 && r != 0) r = p - r;
    return r;
  }

private:
  int sign_;
  std::vector<std::uint32_t> limbs_;

  unsigned long long abs_u64_unchecked() const {
    unsigned long long a = 0;
    if (limbs_.size() > 1) a = static_cast<unsigned long long>(limbs_[1]) << 32;
    if (!limbs_.empty()) a |= limbs_[0];
    return a;
  }

  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) sign_ = 0;
  }

  void mul_small_inplace(std::uint32_t m) {
    std::uint64_t carry = 0;
    for (auto& l : limbs_) {
      std::uint64_t cur = static_cast<std::uint64_t>(l) * m + carry;
      l = static_cast<std::uint32_t>(cur & 0xffffffffULL);
      carry = cur >> 32;
    }
    if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
  }
  void add_small_inplace(std::uint32_t v) {
    if (v == 0) return;
    if (limbs_.empty()) {
      limbs_.push_back(v);
      sign_ = 1;
      return;
    }
    std::uint64_t carry = v;
    for (auto& l : limbs_) {
      std::uint64_t cur = static_cast<std::uint64_t>(l) + carry;
      l = static_cast<std::uint32_t>(cur & 0xffffffffULL);
      carry = cur >> 32;
      if (!carry) break;
    }
    if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
  }

  static int cmp_abs(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
  }

  static std::vector<std::uint32_t> add_abs(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r(std::max(a.size(), b.size()) + 1, 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::uint64_t cur = carry;
      if (i < a.size()) cur += a[i];
      if (i < b.size()) cur += b[i];
      r[i] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
      carry = cur >> 32;
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }

  // Requires |a| >= |b|.
  static std::vector<std::uint32_t> sub_abs(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> r = a;
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::int64_t cur = static_cast<std::int64_t>(r[i]) - borrow -
                         (i < b.size() ? static_cast<std::int64_t>(b[i]) : 0);
      if (cur < 0) {
        cur += (1LL << 32);
        borrow = 1;
      } else {
        borrow = 0;
      }
      r[i] = static_cast<std::uint32_t>(cur);
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }

  // Knuth algorithm D on magnitudes; |a| >= |b|, b nonzero.
  static void divmod_abs(const std::vector<std::uint32_t>& a,
                         const std::vector<std::uint32_t>& b,
                         std::vector<std::uint32_t>& q,
                         std::vector<std::uint32_t>& r) {
    if (b.size() == 1) {
      q.assign(a.size(), 0);
      std::uint64_t rem = 0;
      for (std::size_t i = a.size(); i-- > 0;) {
        std::uint64_t cur = (rem << 32) | a[i];
        q[i] = static_cast<std::uint32_t>(cur / b[0]);
        rem = cur % b[0];
      }
      r.clear();
      if (rem) r.push_back(static_cast<std::uint32_t>(rem));
      return;
    }
    int shift = 0;
    std::uint32_t top = b.back();
    while (!(top & 0x80000000u)) {
      top <<= 1;
      ++shift;
    }
    std::vector<std::uint32_t> u = shl_bits(a, shift);
    std::vector<std::uint32_t> v = shl_bits(b, shift);
    u.push_back(0);
    std::size_t n = v.size(), m = u.size() - n - 1;
    q.assign(m + 1, 0);
    for (std::size_t j = m + 1; j-- > 0;) {
      std::uint64_t num = (static_cast<std::uint64_t>(u[j + n]) << 32) | u[j + n - 1];
      std::uint64_t qhat = num / v[n - 1];
      std::uint64_t rhat = num % v[n - 1];
      while (qhat > 0xffffffffULL ||
             qhat * v[n - 2] > ((rhat << 32) | u[j + n - 2])) {
        --qhat;
        rhat += v[n - 1];
        if (rhat > 0xffffffffULL) break;
      }
      // multiply-subtract
      std::int64_t borrow = 0;
      std::uint64_t carry = 0;
      for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t p = qhat * v[i] + carry;
        carry = p >> 32;
        std::int64_t t = static_cast<std::int64_t>(u[i + j]) -
                         static_cast<std::int64_t>(p & 0xffffffffULL) - borrow;
        if (t < 0) {
          t += (1LL << 32);
          borrow = 1;
        } else {
          borrow = 0;
        }
        u[i + j] = static_cast<std::uint32_t>(t);
      }
      std::int64_t t = static_cast<std::int64_t>(u[j + n]) -
                       static_cast<std::int64_t>(carry) - borrow;
      if (t < 0) {
        // qhat was one too large; add back
        t += (1LL << 32);
        --qhat;
        std::uint64_t c2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
          std::uint64_t cur = static_cast<std::uint64_t>(u[i + j]) + v[i] + c2;
          u[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffULL);
          c2 = cur >> 32;
        }
        t += static_cast<std::int64_t>(c2);
      }
      u[j + n] = static_cast<std::uint32_t>(t);
      q[j] = static_cast<std::uint32_t>(qhat);
    }
    u.resize(n);
    r = shr_bits(u, shift);
  }

  static std::vector<std::uint32_t> shl_bits(const std::vector<std::uint32_t>& a, int s) {
    if (s == 0) return a;
    std::vector<std::uint32_t> r(a.size() + 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      r[i] |= a[i] << s;
      r[i + 1] = a[i] >> (32 - s);
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }
  static std::vector<std::uint32_t> shr_bits(const std::vector<std::uint32_t>& a, int s) {
    std::vector<std::uint32_t> r = a;
    if (s) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] >>= s;
        if (i + 1 < r.size()) r[i] |= r[i + 1] << (32 - s);
      }
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }
};

}  // namespace wheelhouse

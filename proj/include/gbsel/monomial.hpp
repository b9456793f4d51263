#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>

#include "gbsel/errors.hpp"

namespace gbsel {

/// Largest supported number of variables.
inline constexpr int kMaxVars = 20;

/// Exponent vector x^a = x_0^{a_0} ... x_{n-1}^{a_{n-1}} with inline storage.
///
/// Entries past nvars() are always zero, so equality and hashing can work on
/// the whole buffer. The total degree is cached.
class Monomial {
 public:
  using Exponent = std::uint16_t;

  Monomial() = default;

  /// The constant monomial 1 in `nvars` variables.
  explicit Monomial(int nvars) : n_(checked_nvars(nvars)) {}

  Monomial(std::initializer_list<int> exps) : Monomial(std::span<const int>(exps.begin(), exps.size())) {}

  explicit Monomial(std::span<const int> exps) : n_(checked_nvars(static_cast<int>(exps.size()))) {
    for (std::size_t i = 0; i < exps.size(); ++i) {
      if (exps[i] < 0 || exps[i] > std::numeric_limits<Exponent>::max())
        throw std::invalid_argument("exponent out of range: " + std::to_string(exps[i]));
      e_[i] = static_cast<Exponent>(exps[i]);
      degree_ += static_cast<std::uint32_t>(exps[i]);
    }
  }

  int nvars() const noexcept { return n_; }
  int degree() const noexcept { return static_cast<int>(degree_); }
  int operator[](int i) const noexcept { return e_[static_cast<std::size_t>(i)]; }
  bool is_one() const noexcept { return degree_ == 0; }

  std::span<const Exponent> exponents() const noexcept { return {e_.data(), n_}; }

  /// Variable-support bitmask; bit i set iff the exponent of x_i is positive.
  std::uint32_t support() const noexcept {
    std::uint32_t s = 0;
    for (int i = 0; i < n_; ++i)
      if (e_[i] != 0) s |= 1u << i;
    return s;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) noexcept {
    return a.n_ == b.n_ && a.degree_ == b.degree_ && a.e_ == b.e_;
  }

  // Componentwise ops. All require matching nvars.

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    check_same(a, b);
    Monomial r(a.n_);
    for (int i = 0; i < a.n_; ++i) {
      unsigned s = unsigned(a.e_[i]) + b.e_[i];
      if (s > std::numeric_limits<Exponent>::max())
        throw std::overflow_error("monomial exponent overflow");
      r.e_[i] = static_cast<Exponent>(s);
    }
    r.degree_ = a.degree_ + b.degree_;
    return r;
  }

  friend Monomial lcm(const Monomial& a, const Monomial& b) {
    check_same(a, b);
    Monomial r(a.n_);
    for (int i = 0; i < a.n_; ++i) {
      r.e_[i] = std::max(a.e_[i], b.e_[i]);
      r.degree_ += r.e_[i];
    }
    return r;
  }

  friend Monomial gcd(const Monomial& a, const Monomial& b) {
    check_same(a, b);
    Monomial r(a.n_);
    for (int i = 0; i < a.n_; ++i) {
      r.e_[i] = std::min(a.e_[i], b.e_[i]);
      r.degree_ += r.e_[i];
    }
    return r;
  }

  /// True iff `a` divides `b`.
  friend bool divides(const Monomial& a, const Monomial& b) {
    check_same(a, b);
    if (a.degree_ > b.degree_) return false;
    for (int i = 0; i < a.n_; ++i)
      if (a.e_[i] > b.e_[i]) return false;
    return true;
  }

  /// a / b; requires b | a.
  friend Monomial quotient(const Monomial& a, const Monomial& b) {
    if (!divides(b, a)) throw DivisibilityError("monomial quotient: divisor does not divide");
    Monomial r(a.n_);
    for (int i = 0; i < a.n_; ++i) r.e_[i] = static_cast<Exponent>(a.e_[i] - b.e_[i]);
    r.degree_ = a.degree_ - b.degree_;
    return r;
  }

  friend bool coprime(const Monomial& a, const Monomial& b) {
    check_same(a, b);
    for (int i = 0; i < a.n_; ++i)
      if (a.e_[i] != 0 && b.e_[i] != 0) return false;
    return true;
  }

  std::size_t hash() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull ^ n_;
    for (int i = 0; i < n_; ++i) h = (h ^ e_[i]) * 0x100000001b3ull;
    return static_cast<std::size_t>(h);
  }

  friend void check_same(const Monomial& a, const Monomial& b) {
    if (a.n_ != b.n_)
      throw DimensionError("monomials in " + std::to_string(a.n_) + " and " +
                           std::to_string(b.n_) + " variables");
  }

 private:
  static std::uint8_t checked_nvars(int n) {
    if (n < 0 || n > kMaxVars)
      throw DimensionError("variable count " + std::to_string(n) + " outside [0, " +
                           std::to_string(kMaxVars) + "]");
    return static_cast<std::uint8_t>(n);
  }

  std::array<Exponent, kMaxVars> e_{};
  std::uint32_t degree_ = 0;
  std::uint8_t n_ = 0;
};

/// Graded reverse lexicographic comparison: higher total degree wins; on a
/// tie, a > b iff the last nonzero entry of a - b is negative.
inline std::strong_ordering grevlex_cmp(const Monomial& a, const Monomial& b) {
  check_same(a, b);
  if (a.degree() != b.degree()) return a.degree() <=> b.degree();
  for (int i = a.nvars() - 1; i >= 0; --i) {
    if (a[i] != b[i]) return b[i] <=> a[i];
  }
  return std::strong_ordering::equal;
}

/// Strict-weak-order functor for sorting ascending in grevlex.
struct GrevlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return grevlex_cmp(a, b) < 0; }
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept { return m.hash(); }
};

}  // namespace gbsel

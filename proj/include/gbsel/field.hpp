#pragma once

#include <cstdint>
#include <string>

#include "gbsel/errors.hpp"

namespace gbsel {

constexpr std::uint32_t kDefaultPrime = 32003;

constexpr bool is_prime(std::uint32_t p) noexcept {
  if (p < 2) return false;
  if (p % 2 == 0) return p == 2;
  for (std::uint32_t d = 3; static_cast<std::uint64_t>(d) * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

static_assert(is_prime(kDefaultPrime));

/// An element of Z/pZ. Always holds a value fully reduced into [0, p).
/// The modulus is not stored here; arithmetic goes through PrimeField.
class FieldElement {
 public:
  constexpr FieldElement() noexcept = default;
  constexpr explicit FieldElement(std::uint32_t v) noexcept : value_(v) {}

  constexpr std::uint32_t value() const noexcept { return value_; }
  constexpr bool is_zero() const noexcept { return value_ == 0; }

  friend constexpr bool operator==(FieldElement, FieldElement) noexcept = default;

 private:
  std::uint32_t value_ = 0;
};

/// The prime field F_p. The prime is a runtime value checked at
/// construction; the check is constexpr so fixed primes can be verified at
/// compile time.
class PrimeField {
 public:
  constexpr PrimeField() noexcept = default;

  constexpr explicit PrimeField(std::uint32_t p) : p_(p) {
    if (!is_prime(p) || p > (1u << 31))
      throw std::invalid_argument("field modulus must be a prime below 2^31, got " +
                                  std::to_string(p));
  }

  constexpr std::uint32_t characteristic() const noexcept { return p_; }

  /// Reduce an arbitrary signed integer into the field.
  constexpr FieldElement from_int(std::int64_t v) const noexcept {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return FieldElement(static_cast<std::uint32_t>(r));
  }

  constexpr FieldElement add(FieldElement a, FieldElement b) const noexcept {
    std::uint32_t s = a.value() + b.value();
    return FieldElement(s >= p_ ? s - p_ : s);
  }

  constexpr FieldElement sub(FieldElement a, FieldElement b) const noexcept {
    return FieldElement(a.value() >= b.value() ? a.value() - b.value()
                                               : a.value() + p_ - b.value());
  }

  constexpr FieldElement neg(FieldElement a) const noexcept {
    return FieldElement(a.value() == 0 ? 0 : p_ - a.value());
  }

  constexpr FieldElement mul(FieldElement a, FieldElement b) const noexcept {
    return FieldElement(static_cast<std::uint32_t>(
        static_cast<std::uint64_t>(a.value()) * b.value() % p_));
  }

  /// Multiplicative inverse via the extended Euclidean algorithm.
  constexpr FieldElement inv(FieldElement a) const {
    if (a.is_zero()) throw DivisionByZero("inverse of zero in F_" + std::to_string(p_));
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = p_, new_r = a.value();
    while (new_r != 0) {
      std::int64_t q = r / new_r;
      std::int64_t tmp = t - q * new_t;
      t = new_t;
      new_t = tmp;
      tmp = r - q * new_r;
      r = new_r;
      new_r = tmp;
    }
    return from_int(t);
  }

  constexpr FieldElement div(FieldElement a, FieldElement b) const { return mul(a, inv(b)); }

  friend constexpr bool operator==(const PrimeField&, const PrimeField&) noexcept = default;

 private:
  std::uint32_t p_ = kDefaultPrime;
};

static_assert(PrimeField(kDefaultPrime).inv(FieldElement(2)).value() == 16002);

}  // namespace gbsel

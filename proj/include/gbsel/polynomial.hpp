#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "gbsel/field.hpp"
#include "gbsel/monomial.hpp"

namespace gbsel {

struct Term {
  FieldElement coeff;
  Monomial monomial;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Sparse polynomial over F_p in a fixed number of variables.
///
/// Terms are kept strictly decreasing in grevlex with nonzero coefficients,
/// so terms()[0] is the leading term. The empty sequence is zero.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int nvars, PrimeField field = PrimeField{}) : field_(field), n_(nvars) {
    if (nvars < 0 || nvars > kMaxVars)
      throw DimensionError("variable count " + std::to_string(nvars) + " not supported");
  }

  /// Build from terms in any order. Like monomials are combined and zero
  /// coefficients dropped.
  static Polynomial from_terms(int nvars, PrimeField field, std::vector<Term> terms) {
    Polynomial p(nvars, field);
    for (const Term& t : terms)
      if (t.monomial.nvars() != nvars)
        throw DimensionError("term has " + std::to_string(t.monomial.nvars()) +
                             " variables, polynomial has " + std::to_string(nvars));
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
      return grevlex_cmp(a.monomial, b.monomial) > 0;
    });
    for (Term& t : terms) {
      if (!p.terms_.empty() && p.terms_.back().monomial == t.monomial) {
        p.terms_.back().coeff = field.add(p.terms_.back().coeff, t.coeff);
        if (p.terms_.back().coeff.is_zero()) p.terms_.pop_back();
      } else if (!t.coeff.is_zero()) {
        p.terms_.push_back(std::move(t));
      }
    }
    return p;
  }

  /// Single term c * m.
  static Polynomial monomial(PrimeField field, FieldElement c, const Monomial& m) {
    Polynomial p(m.nvars(), field);
    if (!c.is_zero()) p.terms_.push_back({c, m});
    return p;
  }

  int nvars() const noexcept { return n_; }
  const PrimeField& field() const noexcept { return field_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  const Term& lead_term() const { return front(); }
  const Monomial& lead_monomial() const { return front().monomial; }
  FieldElement lead_coeff() const { return front().coeff; }

  /// Total degree; equals the degree of the leading monomial in a graded
  /// order. Zero polynomial has degree -1.
  int degree() const noexcept { return terms_.empty() ? -1 : terms_.front().monomial.degree(); }

  Polynomial monic() const {
    if (is_zero()) return *this;
    FieldElement s = field_.inv(lead_coeff());
    return scaled(s);
  }

  Polynomial scaled(FieldElement c) const {
    Polynomial r(n_, field_);
    if (c.is_zero()) return r;
    r.terms_.reserve(terms_.size());
    for (const Term& t : terms_) r.terms_.push_back({field_.mul(c, t.coeff), t.monomial});
    return r;
  }

  /// c * m * f
  friend Polynomial mul_term(const Polynomial& f, FieldElement c, const Monomial& m) {
    Polynomial r(f.n_, f.field_);
    if (c.is_zero()) return r;
    r.terms_.reserve(f.terms_.size());
    for (const Term& t : f.terms_) r.terms_.push_back({f.field_.mul(c, t.coeff), t.monomial * m});
    return r;
  }

  /// r - c * m * f, merged in one pass.
  friend Polynomial sub_scaled(const Polynomial& r, FieldElement c, const Monomial& m,
                               const Polynomial& f) {
    check_compatible(r, f);
    if (m.nvars() != r.n_) throw DimensionError("multiplier monomial has wrong variable count");
    const PrimeField& F = r.field_;
    Polynomial out(r.n_, F);
    out.terms_.reserve(r.terms_.size() + f.terms_.size());
    const FieldElement nc = F.neg(c);
    auto rit = r.terms_.begin();
    auto fit = f.terms_.begin();
    if (nc.is_zero()) fit = f.terms_.end();
    while (rit != r.terms_.end() && fit != f.terms_.end()) {
      Monomial fm = fit->monomial * m;
      auto ord = grevlex_cmp(rit->monomial, fm);
      if (ord > 0) {
        out.terms_.push_back(*rit++);
      } else if (ord < 0) {
        out.terms_.push_back({F.mul(nc, fit->coeff), fm});
        ++fit;
      } else {
        FieldElement s = F.add(rit->coeff, F.mul(nc, fit->coeff));
        if (!s.is_zero()) out.terms_.push_back({s, rit->monomial});
        ++rit;
        ++fit;
      }
    }
    for (; rit != r.terms_.end(); ++rit) out.terms_.push_back(*rit);
    for (; fit != f.terms_.end(); ++fit)
      out.terms_.push_back({F.mul(nc, fit->coeff), fit->monomial * m});
    return out;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    return sub_scaled(a, a.field_.neg(FieldElement(1)), Monomial(a.n_), b);
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    return sub_scaled(a, FieldElement(1), Monomial(a.n_), b);
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    check_compatible(a, b);
    Polynomial acc(a.n_, a.field_);
    for (const Term& t : b.terms_) acc = sub_scaled(acc, a.field_.neg(t.coeff), t.monomial, a);
    return acc;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_ == b.n_ && a.field_ == b.field_ && a.terms_ == b.terms_;
  }

  friend void check_compatible(const Polynomial& a, const Polynomial& b) {
    if (a.n_ != b.n_)
      throw DimensionError("polynomials in " + std::to_string(a.n_) + " and " +
                           std::to_string(b.n_) + " variables");
    if (!(a.field_ == b.field_)) throw DimensionError("polynomials over different fields");
  }

 private:
  const Term& front() const {
    if (terms_.empty()) throw InvalidState("leading term of the zero polynomial");
    return terms_.front();
  }

  std::vector<Term> terms_;
  PrimeField field_{};
  int n_ = 0;
};

// ---------------------------------------------------------------------------
// Text form: terms `c*x0^e0*x2^e2` joined by `+` (or `-`), variables x0..x{n-1}.

inline std::string to_string(const Monomial& m) {
  std::string s;
  for (int i = 0; i < m.nvars(); ++i) {
    if (m[i] == 0) continue;
    if (!s.empty()) s += '*';
    s += 'x' + std::to_string(i);
    if (m[i] != 1) s += '^' + std::to_string(m[i]);
  }
  return s.empty() ? "1" : s;
}

inline std::string to_string(const Polynomial& f) {
  if (f.is_zero()) return "0";
  std::string s;
  for (const Term& t : f.terms()) {
    if (!s.empty()) s += '+';
    if (t.monomial.is_one()) {
      s += std::to_string(t.coeff.value());
    } else {
      if (t.coeff.value() != 1) s += std::to_string(t.coeff.value()) + '*';
      s += to_string(t.monomial);
    }
  }
  return s;
}

namespace detail {

class PolyParser {
 public:
  PolyParser(std::string_view text, int nvars, PrimeField field, int line)
      : s_(text), n_(nvars), field_(field), line_(line) {}

  Polynomial parse() {
    std::vector<Term> terms;
    skip_ws();
    bool first = true;
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) {
        if (first) fail("empty polynomial");
        break;
      }
      bool negative = false;
      if (peek() == '+' || peek() == '-') {
        negative = peek() == '-';
        ++pos_;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      terms.push_back(parse_term(negative));
      first = false;
    }
    return Polynomial::from_terms(n_, field_, std::move(terms));
  }

 private:
  Term parse_term(bool negative) {
    std::int64_t coeff = 1;
    std::vector<int> exps(static_cast<std::size_t>(n_), 0);
    bool any_factor = false;
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) fail("expected a factor");
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        coeff = field_.mul(field_.from_int(coeff), field_.from_int(parse_int())).value();
      } else if (peek() == 'x') {
        std::size_t start = pos_;
        ++pos_;
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(peek())))
          fail("expected variable index after 'x'");
        std::int64_t idx = parse_int();
        if (idx >= n_) {
          pos_ = start;
          fail("variable x" + std::to_string(idx) + " out of range for " + std::to_string(n_) +
               " variables");
        }
        std::int64_t e = 1;
        skip_ws();
        if (pos_ < s_.size() && peek() == '^') {
          ++pos_;
          skip_ws();
          if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(peek())))
            fail("expected exponent after '^'");
          e = parse_int();
        }
        std::int64_t total = exps[static_cast<std::size_t>(idx)] + e;
        if (total > std::numeric_limits<Monomial::Exponent>::max()) fail("exponent too large");
        exps[static_cast<std::size_t>(idx)] = static_cast<int>(total);
      } else {
        fail(std::string("unexpected character '") + peek() + "'");
      }
      any_factor = true;
      skip_ws();
      if (pos_ < s_.size() && peek() == '*') {
        ++pos_;
        continue;
      }
      break;
    }
    if (!any_factor) fail("empty term");
    FieldElement c = field_.from_int(coeff);
    if (negative) c = field_.neg(c);
    return {c, Monomial(std::span<const int>(exps))};
  }

  std::int64_t parse_int() {
    std::int64_t v = 0;
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (peek() - '0');
      if (v > (std::int64_t{1} << 40)) {
        pos_ = start;
        fail("integer too large");
      }
      ++pos_;
    }
    return v;
  }

  char peek() const { return s_[pos_]; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, static_cast<int>(pos_) + 1);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int n_;
  PrimeField field_;
  int line_;
};

}  // namespace detail

/// Parse a polynomial in the text form. Unit coefficients and exponents may
/// be omitted; `-` is accepted as a separator. `line` is reported in errors.
inline Polynomial parse_polynomial(std::string_view text, int nvars, PrimeField field = PrimeField{},
                                   int line = 0) {
  return detail::PolyParser(text, nvars, field, line).parse();
}

/// Highest variable index referenced in `text` plus one (0 if none).
inline int infer_nvars(std::string_view text) {
  int n = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != 'x') continue;
    std::size_t j = i + 1;
    int idx = 0;
    bool any = false;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      idx = idx * 10 + (text[j] - '0');
      any = true;
      ++j;
      if (idx > 1000) break;
    }
    if (any) n = std::max(n, idx + 1);
  }
  return n;
}

}  // namespace gbsel

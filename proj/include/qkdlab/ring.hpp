// Copyright 2026 The qkdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Exact arithmetic in the cyclotomic field Q(zeta_d), zeta_d = exp(2 pi i / d).
//
// Elements are stored as length-d rational coefficient vectors over the
// powers 1, zeta, ..., zeta^(d-1). For prime d the minimal polynomial of zeta
// is 1 + x + ... + x^(d-1), so subtracting the top coefficient from every
// coefficient yields a unique representative with coeffs[d-1] == 0. That
// representative is what makes exact equality decidable. For composite d no
// such normal form is maintained and zero tests fall back to a float
// evaluation at kFloatTolerance.

#include <gmpxx.h>

#include <atomic>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qkdlab/error.hpp"

namespace qkdlab {

using Rational = mpq_class;
using ComplexF = std::complex<double>;

/// Absolute tolerance used wherever float evaluation decides equality.
inline constexpr double kFloatTolerance = 1e-12;

inline bool is_prime(int n) {
  if (n < 2) return false;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) return false;
  }
  return true;
}

/// Representative of a mod m in [0, m).
inline long mod_floor(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

inline void require_dimension(int d) {
  if (d < 2) throw InvalidDimension("qudit dimension must be >= 2, got " + std::to_string(d));
}

/// Always "n/d", including integers ("3/1"), so consumers can split on '/'.
inline std::string to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

/// Parses "n/d" or "n".
inline Rational rational_from_string(std::string_view text) {
  Rational r;
  if (r.set_str(std::string(text), 10) != 0) {
    throw ConfigError("not a rational: " + std::string(text));
  }
  r.canonicalize();
  return r;
}

/// e^{2 pi i t / d}, exact at multiples of a quarter turn.
inline ComplexF unit_root(int d, long t) {
  const long r = mod_floor(t, d);
  if ((4 * r) % d == 0) {
    switch ((4 * r) / d) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(d);
  return {std::cos(angle), std::sin(angle)};
}

namespace detail {

inline void warn_composite_zero_test(int d) {
  static std::atomic<bool> warned{false};
  if (!warned.exchange(true)) {
    std::clog << "qkdlab: warning: zero test in Q(zeta_" << d
              << ") uses float evaluation (composite dimension has no canonical form)\n";
  }
}

}  // namespace detail

class CycloElem {
 public:
  /// The zero element of Q(zeta_d).
  explicit CycloElem(int dim) : dim_(dim), prime_(is_prime(dim)) {
    require_dimension(dim);
    coeffs_.assign(static_cast<std::size_t>(dim), Rational(0));
  }

  /// Raw coefficient vector, NOT reduced. Use canonical_reduce() to normalize.
  static CycloElem from_coefficients(int dim, std::vector<Rational> coeffs) {
    CycloElem out(dim);
    if (coeffs.size() != static_cast<std::size_t>(dim)) {
      throw DimensionMismatch("coefficient vector length " + std::to_string(coeffs.size()) +
                              " != dimension " + std::to_string(dim));
    }
    out.coeffs_ = std::move(coeffs);
    return out;
  }

  static CycloElem from_rational(int dim, const Rational& value) {
    CycloElem out(dim);
    out.coeffs_[0] = value;
    return out;
  }

  static CycloElem one(int dim) { return from_rational(dim, Rational(1)); }

  int dim() const { return dim_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  /// True when this is the unique normal form (prime d only).
  bool is_canonical() const { return prime_ && sgn(coeffs_.back()) == 0; }

  bool is_zero() const {
    bool all_zero = true;
    for (const auto& c : coeffs_) all_zero = all_zero && sgn(c) == 0;
    if (all_zero) return true;
    if (prime_) {
      // Canonical form is zero iff every coefficient equals the top one.
      for (const auto& c : coeffs_) {
        if (c != coeffs_.back()) return false;
      }
      return true;
    }
    detail::warn_composite_zero_test(dim_);
    return std::abs(to_complex()) < kFloatTolerance;
  }

  ComplexF to_complex() const {
    ComplexF sum{0.0, 0.0};
    for (int t = 0; t < dim_; ++t) {
      if (sgn(coeffs_[t]) != 0) sum += coeffs_[t].get_d() * unit_root(dim_, t);
    }
    return sum;
  }

  /// Complex conjugate: zeta^t -> zeta^(d-t).
  CycloElem conj() const {
    CycloElem out(dim_);
    for (int t = 0; t < dim_; ++t) out.coeffs_[mod_floor(-t, dim_)] = coeffs_[t];
    out.reduce();
    return out;
  }

  /// this * zeta^e.
  CycloElem times_zeta(long e) const {
    CycloElem out(dim_);
    for (int t = 0; t < dim_; ++t) out.coeffs_[mod_floor(t + e, dim_)] = coeffs_[t];
    out.reduce();
    return out;
  }

  /// The value as a rational number, when it is one.
  std::optional<Rational> as_rational() const {
    CycloElem r = *this;
    r.reduce();
    for (int t = 1; t < dim_; ++t) {
      if (sgn(r.coeffs_[t]) != 0) return std::nullopt;
    }
    return r.coeffs_[0];
  }

  /// True when every coefficient is an integer divisible by m.
  bool divisible_by(long m) const {
    for (const auto& c : coeffs_) {
      if (c.get_den() != 1) return false;
      if (mpz_divisible_ui_p(c.get_num().get_mpz_t(), static_cast<unsigned long>(m)) == 0) return false;
    }
    return true;
  }

  CycloElem& operator+=(const CycloElem& other) {
    check_dim(other);
    for (int t = 0; t < dim_; ++t) coeffs_[t] += other.coeffs_[t];
    reduce();
    return *this;
  }

  CycloElem& operator-=(const CycloElem& other) {
    check_dim(other);
    for (int t = 0; t < dim_; ++t) coeffs_[t] -= other.coeffs_[t];
    reduce();
    return *this;
  }

  CycloElem& operator*=(const Rational& scalar) {
    for (auto& c : coeffs_) c *= scalar;
    return *this;
  }

  CycloElem& operator*=(const CycloElem& other) {
    *this = *this * other;
    return *this;
  }

  friend CycloElem operator+(CycloElem a, const CycloElem& b) { return a += b; }
  friend CycloElem operator-(CycloElem a, const CycloElem& b) { return a -= b; }
  friend CycloElem operator*(CycloElem a, const Rational& s) { return a *= s; }
  friend CycloElem operator*(const Rational& s, CycloElem a) { return a *= s; }

  friend CycloElem operator-(CycloElem a) {
    for (auto& c : a.coeffs_) c = -c;
    return a;
  }

  friend CycloElem operator*(const CycloElem& a, const CycloElem& b) {
    a.check_dim(b);
    const int d = a.dim_;
    CycloElem out(d);
    for (int i = 0; i < d; ++i) {
      if (sgn(a.coeffs_[i]) == 0) continue;
      for (int j = 0; j < d; ++j) {
        if (sgn(b.coeffs_[j]) == 0) continue;
        out.coeffs_[(i + j) % d] += a.coeffs_[i] * b.coeffs_[j];
      }
    }
    out.reduce();
    return out;
  }

  friend bool operator==(const CycloElem& a, const CycloElem& b) {
    a.check_dim(b);
    if (a.prime_) {
      CycloElem ra = a, rb = b;
      ra.reduce();
      rb.reduce();
      return ra.coeffs_ == rb.coeffs_;
    }
    return (a - b).is_zero();
  }

  friend CycloElem canonical_reduce(CycloElem a) {
    a.reduce();
    return a;
  }

 private:
  friend class CycloAccumulator;

  void check_dim(const CycloElem& other) const {
    if (other.dim_ != dim_) {
      throw DimensionMismatch("cyclotomic dimensions differ: " + std::to_string(dim_) + " vs " +
                              std::to_string(other.dim_));
    }
  }

  // Uses 1 + zeta + ... + zeta^(d-1) = 0; a no-op for composite d.
  void reduce() {
    if (!prime_) return;
    const Rational top = coeffs_.back();
    if (sgn(top) == 0) return;
    for (auto& c : coeffs_) c -= top;
  }

  int dim_;
  bool prime_;
  std::vector<Rational> coeffs_;
};

/// Sums of rotated elements, reduced once at the end.
class CycloAccumulator {
 public:
  explicit CycloAccumulator(int dim) : value_(dim) {}

  /// += src * zeta^shift
  void add_rotated(const CycloElem& src, long shift) {
    const int d = value_.dim_;
    const long base = mod_floor(shift, d);
    for (int t = 0; t < d; ++t) {
      if (sgn(src.coeffs_[t]) == 0) continue;
      value_.coeffs_[(t + base) % d] += src.coeffs_[t];
    }
  }

  CycloElem finish() && {
    value_.reduce();
    return std::move(value_);
  }

 private:
  CycloElem value_;
};

/// zeta^(e mod d), canonical.
inline CycloElem zeta_pow(int d, long e) {
  require_dimension(d);
  std::vector<Rational> coeffs(static_cast<std::size_t>(d));
  coeffs[static_cast<std::size_t>(mod_floor(e, d))] = 1;
  return canonical_reduce(CycloElem::from_coefficients(d, std::move(coeffs)));
}

inline CycloElem cyclo_add(const CycloElem& a, const CycloElem& b) { return a + b; }
inline CycloElem cyclo_mul(const CycloElem& a, const CycloElem& b) { return a * b; }
inline bool is_zero(const CycloElem& a) { return a.is_zero(); }
inline ComplexF to_complex(const CycloElem& a) { return a.to_complex(); }
inline CycloElem conj(const CycloElem& a) { return a.conj(); }

inline std::ostream& operator<<(std::ostream& os, const CycloElem& a) {
  bool first = true;
  for (int t = 0; t < a.dim(); ++t) {
    const Rational& c = a.coeffs()[t];
    if (sgn(c) == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << c;
    if (t > 0) os << "*z^" << t;
  }
  if (first) os << "0";
  return os;
}

// Amplitude backends. The register and protocol layers are written once
// against this interface and instantiated for exact and float arithmetic.
template <class A>
struct amplitude_traits;

template <>
struct amplitude_traits<CycloElem> {
  static constexpr bool exact = true;
  static constexpr std::string_view mode_name = "exact";
  using probability_type = Rational;
  using accumulator_type = CycloAccumulator;

  static CycloElem zero(int d) { return CycloElem(d); }
  static CycloElem one(int d) { return CycloElem::one(d); }
  static CycloElem zeta(int d, long e) { return zeta_pow(d, e); }
  static bool is_zero(const CycloElem& a) { return a.is_zero(); }
  static CycloElem conj(const CycloElem& a) { return a.conj(); }
  static ComplexF to_complex(const CycloElem& a) { return a.to_complex(); }
  static accumulator_type accumulator(int d) { return CycloAccumulator(d); }
  static void add_rotated(accumulator_type& acc, const CycloElem& src, long shift, int /*d*/) {
    acc.add_rotated(src, shift);
  }
  static CycloElem finish(accumulator_type&& acc, int /*d*/) { return std::move(acc).finish(); }
  static double to_double(const Rational& p) { return p.get_d(); }
};

template <>
struct amplitude_traits<ComplexF> {
  static constexpr bool exact = false;
  static constexpr std::string_view mode_name = "float";
  using probability_type = double;
  using accumulator_type = ComplexF;

  static ComplexF zero(int /*d*/) { return {0.0, 0.0}; }
  static ComplexF one(int /*d*/) { return {1.0, 0.0}; }
  static ComplexF zeta(int d, long e) { return unit_root(d, e); }
  static bool is_zero(const ComplexF& a) { return std::abs(a) < kFloatTolerance; }
  static ComplexF conj(const ComplexF& a) { return std::conj(a); }
  static ComplexF to_complex(const ComplexF& a) { return a; }
  static accumulator_type accumulator(int /*d*/) { return {0.0, 0.0}; }
  static void add_rotated(accumulator_type& acc, const ComplexF& src, long shift, int d) {
    acc += src * unit_root(d, shift);
  }
  static ComplexF finish(accumulator_type&& acc, int /*d*/) { return acc; }
  static double to_double(double p) { return p; }
};

template <class A>
concept Amplitude = requires {
  { amplitude_traits<A>::exact } -> std::convertible_to<bool>;
};

}  // namespace qkdlab

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

// Sparse pure states over labeled qudit wires.
//
// A state is a map from basis tuples to amplitudes plus a global factor.
// In the exact backend the global factor is sqrt(norm_factor) * d^(-s/2):
// the d^(-1/2) produced by every Fourier gate lives in the integer scale
// exponent s, so amplitudes stay inside Q(zeta_d). The float backend folds
// the global factor into its complex amplitudes on construction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qkdlab/error.hpp"
#include "qkdlab/random.hpp"
#include "qkdlab/ring.hpp"

namespace qkdlab {

using Dit = int;

/// A named qudit. Labels are unique within a state.
struct Wire {
  std::string label;

  Wire() = default;
  explicit Wire(std::string l) : label(std::move(l)) {}

  friend auto operator<=>(const Wire&, const Wire&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Wire& w) { return os << w.label; }

namespace wires {
inline const Wire alice{"a"};
inline const Wire bob{"b"};
inline const Wire key{"k"};
inline const Wire eve{"e"};
}  // namespace wires

/// One dit per wire, in the owning state's wire order.
using BasisTuple = std::vector<Dit>;

enum class ShiftDirection { right, left };
enum class CompareMode { exact, up_to_global_phase };

template <Amplitude A>
class PureState {
 public:
  using amplitude_type = A;
  using traits = amplitude_traits<A>;
  using TermMap = std::map<BasisTuple, A>;

  PureState(int dim, std::vector<Wire> wires, int scale_exp, TermMap terms,
            Rational norm_factor = Rational(1))
      : dim_(dim),
        wires_(std::move(wires)),
        scale_exp_(scale_exp),
        norm_factor_(std::move(norm_factor)),
        terms_(std::move(terms)) {
    require_dimension(dim_);
    validate();
    normalize_global_factor();
  }

  int dim() const { return dim_; }
  const std::vector<Wire>& wires() const { return wires_; }
  std::size_t wire_count() const { return wires_.size(); }
  int scale_exp() const { return scale_exp_; }
  const Rational& norm_factor() const { return norm_factor_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  bool has_wire(const Wire& w) const { return std::find(wires_.begin(), wires_.end(), w) != wires_.end(); }

  std::size_t wire_index(const Wire& w) const {
    auto it = std::find(wires_.begin(), wires_.end(), w);
    if (it == wires_.end()) throw WireError("wire '" + w.label + "' not present in state");
    return static_cast<std::size_t>(it - wires_.begin());
  }

  /// Square of the global factor: norm_factor / d^s.
  Rational global_factor_sq() const {
    mpz_class power;
    mpz_ui_pow_ui(power.get_mpz_t(), static_cast<unsigned long>(dim_), static_cast<unsigned long>(scale_exp_));
    Rational g = norm_factor_ / Rational(power);
    g.canonicalize();
    return g;
  }

  /// Complex value of a stored amplitude including the global factor.
  ComplexF value_of(const A& amp) const {
    if constexpr (traits::exact) {
      return traits::to_complex(amp) * std::sqrt(global_factor_sq().get_d());
    } else {
      return amp;
    }
  }

  /// Complex coefficient of a basis tuple (zero when absent).
  ComplexF value_at(const BasisTuple& t) const {
    auto it = terms_.find(t);
    return it == terms_.end() ? ComplexF{} : value_of(it->second);
  }

 private:
  void validate() {
    std::set<std::string> labels;
    for (const auto& w : wires_) {
      if (w.label.empty()) throw WireError("empty wire label");
      if (!labels.insert(w.label).second) throw WireError("duplicate wire label '" + w.label + "'");
    }
    if (scale_exp_ < 0) throw ConfigError("scale exponent must be non-negative");
    if (sgn(norm_factor_) <= 0) throw ConfigError("norm factor must be positive");
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->first.size() != wires_.size()) {
        throw WireError("basis tuple length " + std::to_string(it->first.size()) + " != wire count " +
                        std::to_string(wires_.size()));
      }
      for (Dit v : it->first) {
        if (v < 0 || v >= dim_) throw InvalidDimension("dit " + std::to_string(v) + " outside 0.." + std::to_string(dim_ - 1));
      }
      if constexpr (traits::exact) {
        if (it->second.dim() != dim_) throw DimensionMismatch("amplitude ring dimension differs from state dimension");
      }
      it = traits::is_zero(it->second) ? terms_.erase(it) : std::next(it);
    }
  }

  void normalize_global_factor() {
    if constexpr (traits::exact) {
      // Move powers of d between norm_factor and the scale exponent.
      const Rational d_rat(dim_);
      while (mpz_divisible_ui_p(norm_factor_.get_num().get_mpz_t(), static_cast<unsigned long>(dim_)) != 0) {
        norm_factor_ /= d_rat;
        if (scale_exp_ >= 1) {
          scale_exp_ -= 1;
        } else {
          // factor^2 d = (amp d)^2 / d
          for (auto& [t, amp] : terms_) amp *= d_rat;
          scale_exp_ = 1;
        }
      }
      while (mpz_divisible_ui_p(norm_factor_.get_den().get_mpz_t(), static_cast<unsigned long>(dim_)) != 0) {
        norm_factor_ *= d_rat;
        scale_exp_ += 1;
      }
      while (scale_exp_ >= 2 && !terms_.empty() &&
             std::all_of(terms_.begin(), terms_.end(), [&](const auto& kv) { return kv.second.divisible_by(dim_); })) {
        const Rational inv(1, dim_);
        for (auto& [t, amp] : terms_) amp *= inv;
        scale_exp_ -= 2;
      }
    } else {
      if (scale_exp_ != 0 || norm_factor_ != 1) {
        const double factor = std::sqrt(norm_factor_.get_d()) * std::pow(static_cast<double>(dim_), -0.5 * scale_exp_);
        for (auto& [t, amp] : terms_) amp *= factor;
        scale_exp_ = 0;
        norm_factor_ = 1;
      }
    }
  }

  int dim_;
  std::vector<Wire> wires_;
  int scale_exp_;
  Rational norm_factor_;
  TermMap terms_;
};

using ExactState = PureState<CycloElem>;
using FloatState = PureState<ComplexF>;

template <Amplitude A>
std::ostream& operator<<(std::ostream& os, const PureState<A>& st) {
  os << "d=" << st.dim() << " wires=(";
  for (std::size_t i = 0; i < st.wires().size(); ++i) os << (i ? "," : "") << st.wires()[i];
  os << ") s=" << st.scale_exp();
  if (st.norm_factor() != 1) os << " c=" << st.norm_factor();
  os << " {";
  bool first = true;
  for (const auto& [t, amp] : st.terms()) {
    os << (first ? " " : ", ") << "(";
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
    os << "):" << amp;
    first = false;
  }
  return os << " }";
}

// ---------------------------------------------------------------------------
// Constructors

/// (1/sqrt(d)) sum_j |j,j> on wires (first, second).
template <Amplitude A>
PureState<A> bell_state(int d, const Wire& first = wires::alice, const Wire& second = wires::bob) {
  require_dimension(d);
  typename PureState<A>::TermMap terms;
  for (Dit j = 0; j < d; ++j) terms.emplace(BasisTuple{j, j}, amplitude_traits<A>::one(d));
  return PureState<A>(d, {first, second}, 1, std::move(terms));
}

/// Product of computational basis states.
template <Amplitude A>
PureState<A> basis_state(int d, const std::vector<std::pair<Wire, Dit>>& wire_values) {
  require_dimension(d);
  std::vector<Wire> ws;
  BasisTuple t;
  for (const auto& [w, v] : wire_values) {
    ws.push_back(w);
    t.push_back(v);
  }
  typename PureState<A>::TermMap terms;
  terms.emplace(std::move(t), amplitude_traits<A>::one(d));
  return PureState<A>(d, std::move(ws), 0, std::move(terms));
}

template <Amplitude A>
PureState<A> tensor(const PureState<A>& lhs, const PureState<A>& rhs) {
  if (lhs.dim() != rhs.dim()) throw DimensionMismatch("tensor of states with different dimensions");
  std::vector<Wire> ws = lhs.wires();
  for (const auto& w : rhs.wires()) {
    if (lhs.has_wire(w)) throw WireError("tensor: duplicate wire label '" + w.label + "'");
    ws.push_back(w);
  }
  typename PureState<A>::TermMap terms;
  for (const auto& [ta, aa] : lhs.terms()) {
    for (const auto& [tb, ab] : rhs.terms()) {
      BasisTuple t = ta;
      t.insert(t.end(), tb.begin(), tb.end());
      terms.emplace(std::move(t), aa * ab);
    }
  }
  return PureState<A>(lhs.dim(), std::move(ws), lhs.scale_exp() + rhs.scale_exp(), std::move(terms),
                      lhs.norm_factor() * rhs.norm_factor());
}

/// Reorders wires; `order` must be a permutation of the state's wires.
template <Amplitude A>
PureState<A> permute_wires(const PureState<A>& st, const std::vector<Wire>& order) {
  if (order.size() != st.wire_count()) throw WireError("permute_wires: wire count mismatch");
  std::vector<std::size_t> source;
  for (const auto& w : order) source.push_back(st.wire_index(w));
  if (std::set<std::size_t>(source.begin(), source.end()).size() != source.size()) {
    throw WireError("permute_wires: repeated wire in order");
  }
  typename PureState<A>::TermMap terms;
  for (const auto& [t, amp] : st.terms()) {
    BasisTuple out(t.size());
    for (std::size_t i = 0; i < source.size(); ++i) out[i] = t[source[i]];
    terms.emplace(std::move(out), amp);
  }
  return PureState<A>(st.dim(), order, st.scale_exp(), std::move(terms), st.norm_factor());
}

template <Amplitude A>
PureState<A> sorted_by_label(const PureState<A>& st) {
  std::vector<Wire> order = st.wires();
  std::sort(order.begin(), order.end());
  return permute_wires(st, order);
}

// ---------------------------------------------------------------------------
// Gates

/// target <- target + control (right) or target - control (left), mod d.
template <Amplitude A>
PureState<A> apply_controlled_shift(const PureState<A>& st, const Wire& control, const Wire& target,
                                    ShiftDirection direction) {
  if (control == target) throw WireError("controlled shift needs distinct control and target");
  const std::size_t ci = st.wire_index(control);
  const std::size_t ti = st.wire_index(target);
  const int d = st.dim();
  const int sign = direction == ShiftDirection::right ? 1 : -1;
  typename PureState<A>::TermMap terms;
  for (const auto& [t, amp] : st.terms()) {
    BasisTuple out = t;
    out[ti] = static_cast<Dit>(mod_floor(t[ti] + sign * t[ci], d));
    terms.emplace(std::move(out), amp);
  }
  return PureState<A>(d, st.wires(), st.scale_exp(), std::move(terms), st.norm_factor());
}

/// Fourier gate H|j> = d^(-1/2) sum_k zeta^(jk) |k>; conjugate=true applies H*
/// (zeta^(-jk)), which is also the inverse of H.
template <Amplitude A>
PureState<A> apply_hadamard(const PureState<A>& st, const Wire& wire, bool conjugate) {
  using traits = amplitude_traits<A>;
  const std::size_t wi = st.wire_index(wire);
  const int d = st.dim();
  const long sign = conjugate ? -1 : 1;
  std::map<BasisTuple, typename traits::accumulator_type> acc;
  for (const auto& [t, amp] : st.terms()) {
    BasisTuple out = t;
    const long j = t[wi];
    for (Dit k = 0; k < d; ++k) {
      out[wi] = k;
      auto it = acc.find(out);
      if (it == acc.end()) it = acc.emplace(out, traits::accumulator(d)).first;
      traits::add_rotated(it->second, amp, sign * j * k, d);
    }
  }
  typename PureState<A>::TermMap terms;
  for (auto& [t, a] : acc) {
    A value = traits::finish(std::move(a), d);
    if constexpr (!traits::exact) value /= std::sqrt(static_cast<double>(d));
    if (!traits::is_zero(value)) terms.emplace(t, std::move(value));
  }
  const int s = st.scale_exp() + (traits::exact ? 1 : 0);
  return PureState<A>(d, st.wires(), s, std::move(terms), st.norm_factor());
}

// ---------------------------------------------------------------------------
// Norms and measurement

namespace detail {

template <Amplitude A>
A scaled(A amp, const Rational& factor) {
  if constexpr (amplitude_traits<A>::exact) {
    amp *= factor;
    return amp;
  } else {
    return amp * factor.get_d();
  }
}

/// Sum of |amp|^2 times the squared global factor, over terms accepted by `keep`.
template <Amplitude A, class Pred>
typename amplitude_traits<A>::probability_type weight_of(const PureState<A>& st, Pred keep) {
  using traits = amplitude_traits<A>;
  if constexpr (traits::exact) {
    CycloElem sum(st.dim());
    for (const auto& [t, amp] : st.terms()) {
      if (keep(t)) sum += amp * amp.conj();
    }
    auto value = sum.as_rational();
    if (!value) throw NotRational("squared norm is not rational; exact probabilities need monomial-like amplitudes");
    Rational out = *value * st.global_factor_sq();
    out.canonicalize();
    return out;
  } else {
    double sum = 0.0;
    for (const auto& [t, amp] : st.terms()) {
      if (keep(t)) sum += std::norm(amp);
    }
    return sum;
  }
}

}  // namespace detail

/// Squared norm; exactly 1 for every state the protocol produces.
template <Amplitude A>
typename amplitude_traits<A>::probability_type norm_squared(const PureState<A>& st) {
  return detail::weight_of(st, [](const BasisTuple&) { return true; });
}

template <Amplitude A>
struct MeasurementBranch {
  Dit outcome;
  typename amplitude_traits<A>::probability_type probability;
  PureState<A> collapsed;
};

template <Amplitude A>
struct MeasurementResult {
  Dit outcome;
  PureState<A> collapsed;
  typename amplitude_traits<A>::probability_type probability;
};

/// Every outcome with nonzero probability, ascending, with its renormalized
/// post-measurement state (the measured wire stays in place).
template <Amplitude A>
std::vector<MeasurementBranch<A>> measure_branches(const PureState<A>& st, const Wire& wire) {
  using traits = amplitude_traits<A>;
  const std::size_t wi = st.wire_index(wire);
  std::vector<MeasurementBranch<A>> branches;
  for (Dit v = 0; v < st.dim(); ++v) {
    auto in_branch = [&](const BasisTuple& t) { return t[wi] == v; };
    auto p = detail::weight_of(st, in_branch);
    if constexpr (traits::exact) {
      if (sgn(p) == 0) continue;
    } else {
      if (p < kFloatTolerance * kFloatTolerance) continue;
    }
    typename PureState<A>::TermMap terms;
    for (const auto& [t, amp] : st.terms()) {
      if (in_branch(t)) terms.emplace(t, amp);
    }
    if constexpr (traits::exact) {
      // new global factor^2 = old / p, carried by norm_factor and folded back
      // into the scale exponent by the constructor when p is a power of d.
      Rational c = st.norm_factor() / p;
      c.canonicalize();
      branches.push_back({v, p, PureState<A>(st.dim(), st.wires(), st.scale_exp(), std::move(terms), c)});
    } else {
      const double inv = 1.0 / std::sqrt(p);
      for (auto& [t, amp] : terms) amp *= inv;
      branches.push_back({v, p, PureState<A>(st.dim(), st.wires(), 0, std::move(terms))});
    }
  }
  return branches;
}

/// Computational-basis measurement with Born-rule sampling through `picker`.
template <Amplitude A>
MeasurementResult<A> measure_computational(const PureState<A>& st, const Wire& wire, OutcomePicker& picker) {
  auto branches = measure_branches(st, wire);
  if (branches.empty()) throw InvariantViolation("measurement of a zero state");
  std::vector<double> weights;
  for (const auto& b : branches) weights.push_back(amplitude_traits<A>::to_double(b.probability));
  const std::size_t i = branches.size() == 1 ? 0 : picker.pick(weights);
  auto& chosen = branches.at(i);
  return {chosen.outcome, std::move(chosen.collapsed), std::move(chosen.probability)};
}

/// The dit held by `wire` when it is the same in every stored term.
template <Amplitude A>
std::optional<Dit> deterministic_outcome(const PureState<A>& st, const Wire& wire) {
  const std::size_t wi = st.wire_index(wire);
  std::optional<Dit> value;
  for (const auto& [t, amp] : st.terms()) {
    if (!value) {
      value = t[wi];
    } else if (*value != t[wi]) {
      return std::nullopt;
    }
  }
  return value;
}

/// Drops a wire that holds a definite value (a product factor of the state).
template <Amplitude A>
PureState<A> remove_wire(const PureState<A>& st, const Wire& wire) {
  const std::size_t wi = st.wire_index(wire);
  if (!deterministic_outcome(st, wire)) {
    throw WireError("cannot remove wire '" + wire.label + "': it is entangled or in superposition");
  }
  std::vector<Wire> ws = st.wires();
  ws.erase(ws.begin() + static_cast<std::ptrdiff_t>(wi));
  typename PureState<A>::TermMap terms;
  for (const auto& [t, amp] : st.terms()) {
    BasisTuple out = t;
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(wi));
    terms.emplace(std::move(out), amp);
  }
  return PureState<A>(st.dim(), std::move(ws), st.scale_exp(), std::move(terms), st.norm_factor());
}

// ---------------------------------------------------------------------------
// Reduced density of a single wire

template <Amplitude A>
struct DensityMatrixSlice {
  int dim;
  std::vector<std::vector<A>> entries;

  const A& at(int i, int j) const { return entries.at(i).at(j); }

  A trace() const {
    A sum = amplitude_traits<A>::zero(dim);
    for (int i = 0; i < dim; ++i) sum = sum + entries[i][i];
    return sum;
  }

  bool is_hermitian() const {
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        if (!amplitude_traits<A>::is_zero(entries[i][j] - amplitude_traits<A>::conj(entries[j][i]))) return false;
      }
    }
    return true;
  }

  /// Equal to diag(p_0, ..., p_{d-1}) with the given (real) diagonal.
  bool is_diagonal_with(const std::vector<Rational>& diagonal) const {
    using traits = amplitude_traits<A>;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        A expected = traits::zero(dim);
        if (i == j) expected = detail::scaled(traits::one(dim), diagonal.at(i));
        if (!traits::is_zero(entries[i][j] - expected)) return false;
      }
    }
    return true;
  }

  /// Equal to Identity / d.
  bool is_maximally_mixed() const { return is_diagonal_with(std::vector<Rational>(dim, Rational(1, dim))); }
};

template <Amplitude A>
DensityMatrixSlice<A> reduced_density(const PureState<A>& st, const Wire& wire) {
  using traits = amplitude_traits<A>;
  const std::size_t wi = st.wire_index(wire);
  const int d = st.dim();
  std::map<BasisTuple, std::vector<std::pair<Dit, const A*>>> by_rest;
  for (const auto& [t, amp] : st.terms()) {
    BasisTuple rest = t;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(wi));
    by_rest[rest].emplace_back(t[wi], &amp);
  }
  DensityMatrixSlice<A> rho{d, std::vector<std::vector<A>>(d, std::vector<A>(d, traits::zero(d)))};
  for (const auto& [rest, column] : by_rest) {
    for (const auto& [i, ai] : column) {
      for (const auto& [j, aj] : column) rho.entries[i][j] = rho.entries[i][j] + (*ai) * traits::conj(*aj);
    }
  }
  const Rational g = st.global_factor_sq();
  for (auto& row : rho.entries) {
    for (auto& e : row) e = detail::scaled(e, g);
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Comparison

namespace detail {

inline std::optional<Rational> rational_sqrt(const Rational& r) {
  if (sgn(r) < 0) return std::nullopt;
  if (mpz_perfect_square_p(r.get_num().get_mpz_t()) == 0) return std::nullopt;
  if (mpz_perfect_square_p(r.get_den().get_mpz_t()) == 0) return std::nullopt;
  Rational out(sqrt(r.get_num()), sqrt(r.get_den()));
  out.canonicalize();
  return out;
}

inline std::string tuple_string(const BasisTuple& t) {
  std::string s = "|";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + ">";
}

inline std::string complex_string(ComplexF z) {
  std::ostringstream os;
  os.precision(15);
  os << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
  return os.str();
}

template <Amplitude A>
std::set<BasisTuple> key_union(const PureState<A>& a, const PureState<A>& b) {
  std::set<BasisTuple> keys;
  for (const auto& kv : a.terms()) keys.insert(kv.first);
  for (const auto& kv : b.terms()) keys.insert(kv.first);
  return keys;
}

template <Amplitude A>
std::optional<std::string> exact_difference(const PureState<A>& a, const PureState<A>& b) {
  using traits = amplitude_traits<A>;
  const int d = a.dim();
  const Rational ratio = a.global_factor_sq() / b.global_factor_sq();
  const auto sigma = rational_sqrt(ratio);
  for (const auto& key : key_union(a, b)) {
    auto ia = a.terms().find(key);
    auto ib = b.terms().find(key);
    const A za = ia == a.terms().end() ? traits::zero(d) : ia->second;
    const A zb = ib == b.terms().end() ? traits::zero(d) : ib->second;
    bool same;
    if (sigma) {
      same = traits::is_zero(scaled(za, *sigma) - zb);
    } else {
      // Global factors differ by an irrational ratio (odd power of sqrt d):
      // compare squared magnitudes term-wise instead.
      same = traits::is_zero(scaled(za * traits::conj(za), ratio) - zb * traits::conj(zb));
    }
    if (!same) {
      return "term " + tuple_string(key) + ": " + complex_string(a.value_at(key)) + " vs " +
             complex_string(b.value_at(key));
    }
  }
  return std::nullopt;
}

template <Amplitude A>
std::optional<std::string> float_difference(const PureState<A>& a, const PureState<A>& b, CompareMode mode) {
  const auto keys = key_union(a, b);
  ComplexF phase{1.0, 0.0};
  if (mode == CompareMode::up_to_global_phase) {
    for (const auto& key : keys) {
      const ComplexF va = a.value_at(key);
      if (std::abs(va) > kFloatTolerance) {
        phase = b.value_at(key) / va;
        break;
      }
    }
    if (std::abs(std::abs(phase) - 1.0) > 1e-9) return "global ratio is not a phase: " + complex_string(phase);
  }
  for (const auto& key : keys) {
    const ComplexF va = a.value_at(key) * phase;
    const ComplexF vb = b.value_at(key);
    if (std::abs(va - vb) > kFloatTolerance) {
      return "term " + tuple_string(key) + ": " + complex_string(va) + " vs " + complex_string(vb);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Describes the first term where two states differ, or nullopt when equal.
/// Wire order is normalized by label before comparing.
template <Amplitude A>
std::optional<std::string> first_difference(const PureState<A>& lhs, const PureState<A>& rhs,
                                            CompareMode mode = CompareMode::exact) {
  if (lhs.dim() != rhs.dim()) throw DimensionMismatch("comparing states of different dimension");
  std::vector<Wire> wl = lhs.wires(), wr = rhs.wires();
  std::sort(wl.begin(), wl.end());
  std::sort(wr.begin(), wr.end());
  if (wl != wr) throw WireError("comparing states over different wire sets");
  const auto a = permute_wires(lhs, wl);
  const auto b = permute_wires(rhs, wr);
  if (mode == CompareMode::exact && amplitude_traits<A>::exact) return detail::exact_difference(a, b);
  return detail::float_difference(a, b, mode);
}

template <Amplitude A>
bool state_equals(const PureState<A>& lhs, const PureState<A>& rhs, CompareMode mode = CompareMode::exact) {
  return !first_difference(lhs, rhs, mode).has_value();
}

/// Float copy of an exact state.
inline FloatState to_float(const ExactState& st) {
  FloatState::TermMap terms;
  for (const auto& [t, amp] : st.terms()) terms.emplace(t, st.value_of(amp));
  return FloatState(st.dim(), st.wires(), 0, std::move(terms));
}

}  // namespace qkdlab

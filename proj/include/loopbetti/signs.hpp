// Every sign exponent used by the symbolic operations lives here.
#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <vector>

namespace loopbetti::signs {

inline mpz_class sign(long exponent) { return (exponent % 2 == 0) ? 1 : -1; }

/// epsilon_i = |a_1| + ... + |a_i| + i for the left arguments of E_{k,1}.
inline long epsilon(const std::vector<int>& degrees, std::size_t i) {
  long e = static_cast<long>(i);
  for (std::size_t j = 0; j < i; ++j) e += degrees[j];
  return e;
}

// Terms of dE_{k,1}(a_1..a_k; b), positions 1-based as in the formula.
inline long internal_term(const std::vector<int>& a, std::size_t i) { return epsilon(a, i - 1); }
inline long right_internal_term(const std::vector<int>& a) { return epsilon(a, a.size()); }
inline long contraction_term(const std::vector<int>& a, std::size_t i) { return epsilon(a, i); }
inline long right_extremal_term(const std::vector<int>& a, int b) {
  return epsilon(a, a.size()) + static_cast<long>(a.back()) * b;
}
inline long left_extremal_term(const std::vector<int>& a) { return a.front(); }

/// E_{k,1}(a; b.c): term splitting after a_i carries |b|(epsilon_i + epsilon_k).
inline long product_split(const std::vector<int>& a, int b, std::size_t i) {
  return static_cast<long>(b) * (epsilon(a, i) + epsilon(a, a.size()));
}

/// E(a; E(b; c)) = E(E(a;b); c) + E_{2,1}(a,b;c) + (-1)^{this} E_{2,1}(b,a;c).
inline long right_nested_swap(int a, int b) { return static_cast<long>(a + 1) * (b + 1); }

/// Associativity block E_{q,1}(a_{i+1}..a_{end}; b) inside E_{p,1}(..; c):
/// (|b| + 1)(epsilon_end + epsilon_k).
inline long nested_block(const std::vector<int>& a, int b, std::size_t end) {
  return static_cast<long>(b + 1) * (epsilon(a, end) + epsilon(a, a.size()));
}

/// d(a_1 U2 ... U2 a_n): unshuffle term with first block I carries sum_{i in I} |a_i|.
inline long unshuffle(const std::vector<int>& first_block) {
  long e = 0;
  for (int d : first_block) e += d;
  return e;
}

/// eta_{x,c} term (-1)^{|a_i|} E_{2,1}(a_i, b_i; c).
inline long eta_term(int a) { return a; }

/// Bar differential: internal term at letter k uses eps_{k-1}, product of
/// letters k and k+1 uses eps_k, eps_k = sum_{j<=k} (|a_j| - 1).
inline long bar_epsilon(const std::vector<int>& letter_degrees, std::size_t k) {
  long e = 0;
  for (std::size_t j = 0; j < k; ++j) e += letter_degrees[j] - 1;
  return e;
}

/// Koszul sign for moving a letter of degree q past a letter of degree p in
/// the desuspended bar grading.
inline long bar_transposition(int p, int q) { return static_cast<long>(p - 1) * (q - 1); }

/// Cobar-on-bar model: d v_w contains sum over w = u|v of (-1)^{|v_u|} v_u v_v.
inline long cobar_split(int vu_degree) { return vu_degree; }

}  // namespace loopbetti::signs

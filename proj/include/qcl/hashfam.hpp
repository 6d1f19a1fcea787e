// Copyright 2026 The qcommit-lab Authors
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

// Exactly pairwise-independent hash family {x -> top_m(a*x + b)} over
// GF(2^n), n = max(lambda, m). Keys x are lambda-bit words embedded in the
// field by zero extension; the output is the m most significant bits of the
// n-bit field element.
//
// Irreducible polynomials (bit i = coefficient of x^i):
//
//   n | polynomial          | hex
//   --+---------------------+------
//   1 | x + 1               | 0x3
//   2 | x^2 + x + 1         | 0x7
//   3 | x^3 + x + 1         | 0xB
//   4 | x^4 + x + 1         | 0x13
//   5 | x^5 + x^2 + 1       | 0x25
//   6 | x^6 + x + 1         | 0x43
//   7 | x^7 + x + 1         | 0x83
//   8 | x^8 + x^4 + x^3 + x + 1 | 0x11B

#include <cstdint>
#include <random>
#include <vector>

namespace qcl::hashfam {

inline constexpr int kMaxBits = 8;

/// Irreducible polynomial used for GF(2^n), 1 <= n <= kMaxBits.
std::uint32_t irreducible_polynomial(int n);

/// Carry-less multiplication modulo the degree-n irreducible polynomial.
std::uint32_t gf_mul(std::uint32_t a, std::uint32_t b, int n);

class HashFamily {
 public:
  /// 1 <= lambda, m <= kMaxBits; throws std::invalid_argument otherwise.
  HashFamily(int lambda, int m);

  int lambda() const { return lambda_; }
  int m() const { return m_; }
  /// Field degree n = max(lambda, m).
  int field_bits() const { return field_bits_; }
  std::uint32_t key_count() const { return 1u << lambda_; }
  std::uint32_t range_size() const { return 1u << m_; }
  /// |H| = 2^(2n).
  std::uint32_t size() const { return 1u << (2 * field_bits_); }

 private:
  int lambda_;
  int m_;
  int field_bits_;
};

/// One family member. `index()` is its position in lexicographic (a, b)
/// enumeration order, which the commitment registers use as the label of h.
class HashFn {
 public:
  HashFn(const HashFamily& family, std::uint32_t a, std::uint32_t b);

  std::uint32_t a() const { return a_; }
  std::uint32_t b() const { return b_; }
  std::uint32_t index() const { return (a_ << family_.field_bits()) | b_; }
  const HashFamily& family() const { return family_; }

  std::uint32_t operator()(std::uint32_t x) const;

 private:
  HashFamily family_;
  std::uint32_t a_;
  std::uint32_t b_;
};

/// All 2^(2n) members, lexicographic in (a, b); member i has index() == i.
std::vector<HashFn> enumerate(const HashFamily& family);

/// Uniform member.
HashFn sample(const HashFamily& family, std::mt19937_64& rng);

/// Evaluation table value_table[h.index()][x] for the whole family.
std::vector<std::vector<std::uint32_t>> value_table(const HashFamily& family);

/// max over x != x', y, y' of |Pr_h[h(x)=y and h(x')=y'] - 2^(-2m)| over the
/// given members (defaults to the whole family). Exact rational arithmetic:
/// the result is returned as a double but computed from integer counts.
double pairwise_check(const HashFamily& family);
double pairwise_check(const HashFamily& family, const std::vector<HashFn>& members);

}  // namespace qcl::hashfam

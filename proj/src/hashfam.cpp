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

#include "qcl/hashfam.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace qcl::hashfam {

namespace {

constexpr std::array<std::uint32_t, kMaxBits + 1> kPolynomials = {
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11B};

}  // namespace

std::uint32_t irreducible_polynomial(int n) {
  if (n < 1 || n > kMaxBits) throw std::invalid_argument("field degree out of range");
  return kPolynomials[static_cast<std::size_t>(n)];
}

std::uint32_t gf_mul(std::uint32_t a, std::uint32_t b, int n) {
  const std::uint32_t poly = irreducible_polynomial(n);
  const std::uint32_t top = 1u << n;
  std::uint32_t acc = 0;
  while (b != 0) {
    if (b & 1u) acc ^= a;
    b >>= 1;
    a <<= 1;
    if (a & top) a ^= poly;
  }
  return acc;
}

HashFamily::HashFamily(int lambda, int m) : lambda_(lambda), m_(m), field_bits_(std::max(lambda, m)) {
  if (lambda < 1 || lambda > kMaxBits)
    throw std::invalid_argument("hash family: lambda must be in [1, " + std::to_string(kMaxBits) + "]");
  if (m < 1 || m > kMaxBits)
    throw std::invalid_argument("hash family: m must be in [1, " + std::to_string(kMaxBits) + "]");
}

HashFn::HashFn(const HashFamily& family, std::uint32_t a, std::uint32_t b)
    : family_(family), a_(a), b_(b) {
  const std::uint32_t field = 1u << family.field_bits();
  if (a >= field || b >= field) throw std::invalid_argument("hash coefficients out of range");
}

std::uint32_t HashFn::operator()(std::uint32_t x) const {
  const int n = family_.field_bits();
  return (gf_mul(a_, x, n) ^ b_) >> (n - family_.m());
}

std::vector<HashFn> enumerate(const HashFamily& family) {
  const std::uint32_t field = 1u << family.field_bits();
  std::vector<HashFn> out;
  out.reserve(family.size());
  for (std::uint32_t a = 0; a < field; ++a)
    for (std::uint32_t b = 0; b < field; ++b) out.emplace_back(family, a, b);
  return out;
}

HashFn sample(const HashFamily& family, std::mt19937_64& rng) {
  const std::uint32_t field = 1u << family.field_bits();
  const std::uint64_t draw = rng();
  return HashFn(family, static_cast<std::uint32_t>(draw % field),
                static_cast<std::uint32_t>((draw >> 32) % field));
}

std::vector<std::vector<std::uint32_t>> value_table(const HashFamily& family) {
  std::vector<std::vector<std::uint32_t>> table;
  table.reserve(family.size());
  for (const auto& h : enumerate(family)) {
    std::vector<std::uint32_t> row(family.key_count());
    for (std::uint32_t x = 0; x < family.key_count(); ++x) row[x] = h(x);
    table.push_back(std::move(row));
  }
  return table;
}

double pairwise_check(const HashFamily& family) { return pairwise_check(family, enumerate(family)); }

double pairwise_check(const HashFamily& family, const std::vector<HashFn>& members) {
  const std::uint32_t keys = family.key_count();
  const std::uint32_t range = family.range_size();
  const auto total = static_cast<std::int64_t>(members.size());
  if (total == 0) throw std::invalid_argument("pairwise_check: empty member list");
  // Pr = count / total; target 1 / range^2. Compare count * range^2 with total.
  const auto range_sq = static_cast<std::int64_t>(range) * range;
  std::int64_t worst = 0;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(range_sq));
  for (std::uint32_t x = 0; x < keys; ++x) {
    for (std::uint32_t xp = 0; xp < keys; ++xp) {
      if (x == xp) continue;
      std::fill(counts.begin(), counts.end(), 0);
      for (const auto& h : members) ++counts[h(x) * range + h(xp)];
      for (auto c : counts) worst = std::max<std::int64_t>(worst, std::llabs(c * range_sq - total));
    }
  }
  return static_cast<double>(worst) / static_cast<double>(total * range_sq);
}

}  // namespace qcl::hashfam

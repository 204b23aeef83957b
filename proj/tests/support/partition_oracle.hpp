#pragma once

#include <utility>
#include <vector>

#include "cmcausal/cumulants.hpp"
#include "cmcausal/errors.hpp"
#include "cmcausal/moments.hpp"

namespace cmcausal::testing {

inline constexpr int kPartitionOrderCap = 12;

using Block = std::pair<int, int>;  // (x count, y count)

namespace detail {

// Multisets of nonzero blocks summing to (a, b), blocks in non-increasing order.
template <typename Visit>
void vector_partitions(int a, int b, Block bound, std::vector<Block>& blocks, Visit& visit) {
  if (a == 0 && b == 0) {
    visit(blocks);
    return;
  }
  for (int p = std::min(a, bound.first); p >= 0; --p) {
    int qmax = p == bound.first ? std::min(b, bound.second) : b;
    for (int q = qmax; q >= 0; --q) {
      if (p + q == 0) continue;
      blocks.emplace_back(p, q);
      vector_partitions(a - p, b - q, Block{p, q}, blocks, visit);
      blocks.pop_back();
    }
  }
}

}  // namespace detail

/// kappa(a, b) as the sum over set partitions of {x * a, y * b}, grouped by
/// block type: a! b! / (prod p_i! q_i! * prod mult!) labeled partitions per type.
template <typename Scalar>
Scalar partition_cumulant(const MomentTable<Scalar>& m, int a, int b) {
  using cmcausal::detail::factorial;
  if (a + b > kPartitionOrderCap) throw ConfigError("partition oracle capped at total order 12");
  Scalar total(0);
  std::vector<Block> blocks;
  auto visit = [&](const std::vector<Block>& bs) {
    const int h = static_cast<int>(bs.size());
    Scalar count = Scalar(factorial(a) * factorial(b));
    Scalar prod(1);
    std::size_t i = 0;
    while (i < bs.size()) {
      std::size_t j = i;
      while (j < bs.size() && bs[j] == bs[i]) ++j;
      count /= Scalar(factorial(static_cast<int>(j - i)));
      i = j;
    }
    for (const auto& [p, q] : bs) {
      count /= Scalar(factorial(p) * factorial(q));
      prod *= m(p, q);
    }
    Scalar sign = (h - 1) % 2 == 0 ? Scalar(1) : Scalar(-1);
    total += sign * Scalar(factorial(h - 1)) * count * prod;
  };
  detail::vector_partitions(a, b, Block{a, b}, blocks, visit);
  return total;
}

template <typename Scalar>
CumulantTable<Scalar> moments_to_cumulants_partition(const MomentTable<Scalar>& m) {
  if (m.order() > kPartitionOrderCap) throw ConfigError("partition oracle capped at total order 12");
  if (!m.complete()) throw InputError("incomplete moment table");
  CumulantTable<Scalar> out(m.order());
  for (int a = 0; a <= m.order(); ++a)
    for (int b = 0; a + b <= m.order(); ++b)
      if (a + b > 0) out(a, b) = partition_cumulant(m, a, b);
  return out;
}

/// Literal sum over all set partitions of a + b labeled items (restricted
/// growth strings). Exponential; only for small orders.
template <typename Scalar>
Scalar brute_force_partition_cumulant(const MomentTable<Scalar>& m, int a, int b) {
  using cmcausal::detail::factorial;
  const int n = a + b;
  if (n == 0) return Scalar(0);
  std::vector<int> rgs(n, 0), maxv(n, 0);
  Scalar total(0);
  while (true) {
    int h = 0;
    for (int v : rgs) h = std::max(h, v + 1);
    std::vector<Block> blocks(h, Block{0, 0});
    for (int i = 0; i < n; ++i) (i < a ? blocks[rgs[i]].first : blocks[rgs[i]].second)++;
    Scalar prod(1);
    for (const auto& [p, q] : blocks) prod *= m(p, q);
    total += ((h - 1) % 2 == 0 ? Scalar(1) : Scalar(-1)) * Scalar(factorial(h - 1)) * prod;
    int i = n - 1;
    while (i > 0 && rgs[i] == maxv[i - 1] + 1) --i;
    if (i == 0) break;
    ++rgs[i];
    int mx = std::max(maxv[i - 1], rgs[i]);
    maxv[i] = mx;
    for (int j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      maxv[j] = mx;
    }
  }
  return total;
}

}  // namespace cmcausal::testing

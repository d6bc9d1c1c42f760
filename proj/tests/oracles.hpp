#ifndef OKFRAC_TESTS_ORACLES_HPP
#define OKFRAC_TESTS_ORACLES_HPP

// Reference implementations used only by tests. None of them share code
// paths with the library routines they check.

#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_map>
#include <vector>

#include "okfrac/core.hpp"
#include "okfrac/online.hpp"

namespace okfrac::testing {

/// Maximum objective over every (integral subset, one extra fractional item)
/// pair. Exponential; meant for n <= 12.
inline Rational exhaustive_optimum(const Instance<Rational>& inst) {
  const std::size_t n = inst.items.size();
  Rational best(0);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Rational size(0);
    Rational value(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        size += inst.items[i].size;
        value += inst.items[i].value;
      }
    }
    if (size > inst.capacity) continue;
    if (value > best) best = value;
    const Rational room = inst.capacity - size;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (1u << j)) continue;
      const Item<Rational>& it = inst.items[j];
      const Rational x = it.size <= room ? Rational(1) : Rational(room / it.size);
      const Rational total = value + it.value * x;
      if (total > best) best = total;
    }
  }
  return best;
}

/// Random instance with small rational data: values in {0..vmax}/vden,
/// sizes in {1..smax}/sden, capacity in {1..cmax}/cden.
inline Instance<Rational> random_small_instance(std::mt19937_64& rng, std::size_t n,
                                                int vmax = 12, int smax = 9, int cmax = 20) {
  std::uniform_int_distribution<int> vd(0, vmax), sd(1, smax), cd(1, cmax), den(1, 4);
  Instance<Rational> inst;
  inst.capacity = Rational(cd(rng), den(rng));
  for (std::size_t i = 0; i < n; ++i)
    inst.items.push_back({static_cast<ItemId>(i + 1), Rational(vd(rng), den(rng)),
                          Rational(sd(rng), den(rng))});
  return normalize(inst);
}

/// Reference online run: recomputes the optimal fractional solution from
/// scratch in every knapsack-phase round with a plain sort over the
/// revealed items.
inline Rational reference_run(const Instance<Rational>& inst, const std::vector<ItemId>& perm,
                              double c, double d) {
  const std::size_t n = inst.items.size();
  std::unordered_map<ItemId, const Item<Rational>*> by_id;
  for (const auto& it : inst.items) by_id[it.id] = &it;
  const auto sample_end = static_cast<std::size_t>(std::floor(c * n + 1e-9));
  const auto secretary_end = static_cast<std::size_t>(std::floor(d * n + 1e-9));

  std::vector<const Item<Rational>*> revealed;
  bool have_best = false;
  Rational best(0), used(0), objective(0);
  for (std::size_t k = 0; k < n; ++k) {
    const Item<Rational>& it = *by_id.at(perm[k]);
    revealed.push_back(&it);
    const std::size_t round = k + 1;
    Rational amount(0);
    const Rational room = inst.capacity - used;
    if (round <= sample_end) {
      if (!have_best || it.value > best) best = it.value;
      have_best = true;
    } else if (round <= secretary_end) {
      if (!have_best || it.value > best) amount = it.size < room ? it.size : room;
    } else {
      // Fraction of `it` in the optimum over the revealed items: capacity
      // left after every item that beats it in density order.
      Rational ahead(0);
      for (const auto* other : revealed) {
        if (other == &it) continue;
        const Rational lhs = other->value * it.size;
        const Rational rhs = it.value * other->size;
        const bool before = lhs > rhs || (lhs == rhs && (other->value > it.value ||
                                                         (other->value == it.value && other->id < it.id)));
        if (before) ahead += other->size;
      }
      Rational want(0);
      if (ahead < inst.capacity) {
        const Rational left = inst.capacity - ahead;
        want = left < it.size ? left : it.size;
      }
      amount = want < room ? want : room;
    }
    used += amount;
    objective += it.value * amount / it.size;
  }
  return objective;
}

/// p(i) through the positive tail series c * sum_{j >= i} ((1-c)^j - (1-d)^j) / j,
/// algebraically equal to the alternating binomial form.
inline long double p_tail(int i, long double c, long double d) {
  long double sum = 0;
  long double a = std::pow(1.0L - c, i);
  long double b = std::pow(1.0L - d, i);
  for (int j = i; j < 100000; ++j) {
    const long double term = (a - b) / j;
    sum += term;
    if (a < 1e-40L) break;
    a *= 1.0L - c;
    b *= 1.0L - d;
  }
  return c * sum;
}

}  // namespace okfrac::testing

#endif  // OKFRAC_TESTS_ORACLES_HPP

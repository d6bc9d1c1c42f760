#ifndef OKFRAC_CORE_HPP
#define OKFRAC_CORE_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "okfrac/errors.hpp"
#include "okfrac/scalar.hpp"

namespace okfrac {

using ItemId = std::int64_t;

template <Scalar S>
struct Item {
  ItemId id = 0;
  S value{};
  S size{};
};

template <Scalar S>
struct Instance {
  std::vector<Item<S>> items;
  S capacity{};

  std::size_t size() const { return items.size(); }
};

/// Canonical strict value order: value descending, then id ascending.
template <Scalar S>
bool value_before(const Item<S>& a, const Item<S>& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.id < b.id;
}

/// Density order v/s descending; equal densities fall back to the value order.
/// Compared by cross multiplication so rational mode never divides.
template <Scalar S>
bool density_before(const Item<S>& a, const Item<S>& b) {
  const S lhs = a.value * b.size;
  const S rhs = b.value * a.size;
  if (lhs != rhs) return lhs > rhs;
  return value_before(a, b);
}

template <Scalar S>
S density(const Item<S>& item) {
  return item.value / item.size;
}

/// Small sorted-by-id associative vector. Lookups are binary searches.
template <class T>
class IdMap {
 public:
  using Entry = std::pair<ItemId, T>;

  IdMap() = default;
  explicit IdMap(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    auto dup = std::adjacent_find(
        entries_.begin(), entries_.end(),
        [](const Entry& a, const Entry& b) { return a.first == b.first; });
    if (dup != entries_.end())
      throw DuplicateItem("id " + std::to_string(dup->first) + " appears twice");
  }

  const T* find(ItemId id) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), id,
        [](const Entry& e, ItemId key) { return e.first < key; });
    if (it == entries_.end() || it->first != id) return nullptr;
    return &it->second;
  }

  const T& at(ItemId id) const {
    const T* v = find(id);
    if (v == nullptr) throw KeyMismatch("unknown item id " + std::to_string(id));
    return *v;
  }

  bool contains(ItemId id) const { return find(id) != nullptr; }
  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const IdMap&, const IdMap&) = default;

 private:
  std::vector<Entry> entries_;
};

template <Scalar S>
struct FractionalPacking {
  IdMap<S> fractions;
  S instance_capacity{};

  S fraction(ItemId id) const {
    const S* x = fractions.find(id);
    return x == nullptr ? S(0) : *x;
  }
};

template <Scalar S>
struct OptimalSolution {
  FractionalPacking<S> packing;
  S objective{};
  S threshold_density{};
  std::size_t support_size = 0;
  IdMap<S> utilizations;
};

/// Validates a raw instance and brings it into the canonical form: sizes are
/// cut at the capacity and items are listed in the canonical value order.
template <Scalar S>
Instance<S> normalize(const Instance<S>& raw) {
  if (raw.items.empty()) throw InvalidInstance("instance has no items");
  if (!(raw.capacity > 0)) throw InvalidInstance("capacity must be positive");
  std::unordered_set<ItemId> seen;
  Instance<S> out;
  out.capacity = raw.capacity;
  out.items.reserve(raw.items.size());
  for (const auto& item : raw.items) {
    if (!(item.size > 0))
      throw InvalidInstance("item " + std::to_string(item.id) + " has non-positive size");
    if (item.value < 0)
      throw InvalidInstance("item " + std::to_string(item.id) + " has negative value");
    if (!seen.insert(item.id).second)
      throw InvalidInstance("duplicate item id " + std::to_string(item.id));
    Item<S> copy = item;
    if (copy.size > raw.capacity) copy.size = raw.capacity;
    out.items.push_back(std::move(copy));
  }
  std::sort(out.items.begin(), out.items.end(), value_before<S>);
  return out;
}

/// Exact offline optimum: greedy fill in density order. The first items are
/// packed whole and the boundary item receives the leftover capacity.
template <Scalar S>
OptimalSolution<S> solve_fractional(const Instance<S>& inst) {
  std::vector<const Item<S>*> order;
  order.reserve(inst.items.size());
  for (const auto& item : inst.items) order.push_back(&item);
  std::sort(order.begin(), order.end(),
            [](const Item<S>* a, const Item<S>* b) { return density_before(*a, *b); });

  std::vector<std::pair<ItemId, S>> fractions;
  std::vector<std::pair<ItemId, S>> utilizations;
  fractions.reserve(order.size());
  utilizations.reserve(order.size());

  OptimalSolution<S> sol;
  S remaining = inst.capacity;
  for (const Item<S>* item : order) {
    S x(0);
    if (remaining > 0) {
      x = item->size <= remaining ? S(1) : S(remaining / item->size);
      remaining -= item->size * x;
      if constexpr (!is_exact_v<S>) remaining = std::max(remaining, 0.0);
      sol.objective += item->value * x;
      sol.threshold_density = density(*item);
      ++sol.support_size;
    }
    utilizations.emplace_back(item->id, item->size * x / inst.capacity);
    fractions.emplace_back(item->id, std::move(x));
  }
  sol.packing = {IdMap<S>(std::move(fractions)), inst.capacity};
  sol.utilizations = IdMap<S>(std::move(utilizations));
  return sol;
}

/// Sum of v_i x_i. Ids absent from the packing count as zero.
template <Scalar S>
S objective_of(const FractionalPacking<S>& packing, const Instance<S>& inst) {
  IdMap<const Item<S>*> by_id = [&] {
    std::vector<std::pair<ItemId, const Item<S>*>> v;
    v.reserve(inst.items.size());
    for (const auto& item : inst.items) v.emplace_back(item.id, &item);
    return IdMap<const Item<S>*>(std::move(v));
  }();
  S total(0);
  for (const auto& [id, x] : packing.fractions) total += by_id.at(id)->value * x;
  return total;
}

/// Total size s_i x_i of a packing.
template <Scalar S>
S packed_size(const FractionalPacking<S>& packing, const Instance<S>& inst) {
  S total(0);
  for (const auto& item : inst.items) total += item.size * packing.fraction(item.id);
  return total;
}

template <Scalar To, Scalar From>
Instance<To> convert(const Instance<From>& inst) {
  Instance<To> out;
  out.capacity = scalar_cast<To>(inst.capacity);
  out.items.reserve(inst.items.size());
  for (const auto& item : inst.items)
    out.items.push_back({item.id, scalar_cast<To>(item.value), scalar_cast<To>(item.size)});
  return out;
}

/// 1-based rank of every item in the canonical value order.
template <Scalar S>
IdMap<std::size_t> value_ranks(const Instance<S>& inst) {
  std::vector<const Item<S>*> order;
  for (const auto& item : inst.items) order.push_back(&item);
  std::sort(order.begin(), order.end(),
            [](const Item<S>* a, const Item<S>* b) { return value_before(*a, *b); });
  std::vector<std::pair<ItemId, std::size_t>> ranks;
  for (std::size_t r = 0; r < order.size(); ++r) ranks.emplace_back(order[r]->id, r + 1);
  return IdMap<std::size_t>(std::move(ranks));
}

}  // namespace okfrac

#endif  // OKFRAC_CORE_HPP

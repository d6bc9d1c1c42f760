#ifndef OKFRAC_ONLINE_HPP
#define OKFRAC_ONLINE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "okfrac/core.hpp"

namespace okfrac {

/// Phase boundaries of the three-phase online algorithm.
///   sampling:  rounds 1 .. floor(c n)
///   secretary: rounds floor(c n)+1 .. floor(d n)
///   knapsack:  rounds floor(d n)+1 .. n
struct PhaseParams {
  double c = 0.47521;
  double d = 0.60138;
  std::size_t n = 0;

  void validate() const {
    if (!(c > 0.0 && c <= d && d <= 1.0))
      throw DomainError("phase parameters need 0 < c <= d <= 1");
  }

  // The 1e-9 guard keeps c*n from landing just below an integer it is
  // meant to equal (0.29 * 100 == 28.999...).
  std::size_t sampling_end() const { return boundary(c); }
  std::size_t secretary_end() const { return boundary(d); }

 private:
  std::size_t boundary(double fraction) const {
    const double rounds = std::floor(fraction * static_cast<double>(n) + 1e-9);
    return std::min(n, static_cast<std::size_t>(rounds));
  }
};

enum class Phase : std::uint8_t { sampling, secretary, knapsack };

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::sampling: return "sampling";
    case Phase::secretary: return "secretary";
    case Phase::knapsack: return "knapsack";
  }
  return "?";
}

/// Optimal fractional solution over a growing item set. Items are kept in a
/// treap ordered by density (ties by the canonical value order) and every
/// node carries the total size and value of its subtree, so the fraction of
/// any inserted item is one root-to-node walk away.
template <Scalar S>
class IncrementalSolver {
 public:
  explicit IncrementalSolver(S capacity) : capacity_(std::move(capacity)) {}

  void reserve(std::size_t n) {
    nodes_.reserve(n);
    index_.reserve(n);
  }

  void insert(const Item<S>& item) {
    if (!index_.emplace(item.id, static_cast<int>(nodes_.size())).second)
      throw DuplicateItem("id " + std::to_string(item.id) + " already inserted");
    const int node = static_cast<int>(nodes_.size());
    nodes_.push_back({item, priority(item.id), -1, -1, item.size, item.value});
    auto [left, right] = split(root_, item);
    root_ = merge(merge(left, node), right);
  }

  /// x_i of the optimal fractional solution over the inserted items.
  S query_fraction(ItemId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw KeyMismatch("id " + std::to_string(id) + " not inserted");
    const Item<S>& item = nodes_[it->second].item;
    const S ahead = size_ahead_of(item);
    if (ahead >= capacity_) return S(0);
    const S room = capacity_ - ahead;
    if (room >= item.size) return S(1);
    return S(room / item.size);
  }

  /// Objective value of the optimal fractional solution over the inserted items.
  S objective() const {
    S room = capacity_;
    S total(0);
    int t = root_;
    while (t != -1) {
      const Node& node = nodes_[t];
      const S left_size = subtree_size(node.left);
      if (left_size >= room) {
        t = node.left;
        continue;
      }
      total += subtree_value(node.left);
      room -= left_size;
      if (node.item.size >= room) {
        total += node.item.value * room / node.item.size;
        return total;
      }
      total += node.item.value;
      room -= node.item.size;
      t = node.right;
    }
    return total;
  }

  std::size_t size() const { return nodes_.size(); }
  const S& capacity() const { return capacity_; }

 private:
  struct Node {
    Item<S> item;
    std::uint64_t prio;
    int left;
    int right;
    S sub_size;
    S sub_value;
  };

  static std::uint64_t priority(ItemId id) {
    std::uint64_t z = static_cast<std::uint64_t>(id) + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  S subtree_size(int t) const { return t == -1 ? S(0) : nodes_[t].sub_size; }
  S subtree_value(int t) const { return t == -1 ? S(0) : nodes_[t].sub_value; }

  void pull(int t) {
    Node& node = nodes_[t];
    node.sub_size = node.item.size;
    node.sub_value = node.item.value;
    if (node.left != -1) {
      node.sub_size += nodes_[node.left].sub_size;
      node.sub_value += nodes_[node.left].sub_value;
    }
    if (node.right != -1) {
      node.sub_size += nodes_[node.right].sub_size;
      node.sub_value += nodes_[node.right].sub_value;
    }
  }

  // Left part holds the items ordered before `key`.
  std::pair<int, int> split(int t, const Item<S>& key) {
    if (t == -1) return {-1, -1};
    if (density_before(nodes_[t].item, key)) {
      auto [l, r] = split(nodes_[t].right, key);
      nodes_[t].right = l;
      pull(t);
      return {t, r};
    }
    auto [l, r] = split(nodes_[t].left, key);
    nodes_[t].left = r;
    pull(t);
    return {l, t};
  }

  int merge(int a, int b) {
    if (a == -1) return b;
    if (b == -1) return a;
    if (nodes_[a].prio > nodes_[b].prio) {
      nodes_[a].right = merge(nodes_[a].right, b);
      pull(a);
      return a;
    }
    nodes_[b].left = merge(a, nodes_[b].left);
    pull(b);
    return b;
  }

  S size_ahead_of(const Item<S>& item) const {
    S ahead(0);
    int t = root_;
    while (t != -1) {
      const Node& node = nodes_[t];
      if (node.item.id == item.id) return ahead + subtree_size(node.left);
      if (density_before(item, node.item)) {
        t = node.left;
      } else {
        ahead += subtree_size(node.left) + node.item.size;
        t = node.right;
      }
    }
    return ahead;
  }

  S capacity_;
  std::vector<Node> nodes_;
  std::unordered_map<ItemId, int> index_;
  int root_ = -1;
};

template <Scalar S>
struct RoundRecord {
  std::size_t round = 0;
  ItemId id = 0;
  Phase phase = Phase::sampling;
  S fraction{};
  S remaining{};
};

template <Scalar S>
struct RunTrace {
  std::vector<RoundRecord<S>> rounds;
  FractionalPacking<S> packing;
  S objective{};
  bool secretary_packed_nothing = true;
  std::optional<ItemId> first_secretary_accept;
  std::size_t secretary_accepts = 0;
  std::size_t knapsack_accepts = 0;
};

/// Runs the deterministic sampling / secretary / knapsack algorithm on `inst`
/// with items arriving in the order given by `permutation` (a list of ids).
template <Scalar S>
RunTrace<S> run(const Instance<S>& inst, std::span<const ItemId> permutation,
                const PhaseParams& params) {
  params.validate();
  const std::size_t n = inst.items.size();
  if (params.n != n)
    throw DomainError("phase parameters built for n=" + std::to_string(params.n) +
                      " but instance has " + std::to_string(n) + " items");
  if (permutation.size() != n)
    throw InvalidPermutation("permutation has " + std::to_string(permutation.size()) +
                             " entries for " + std::to_string(n) + " items");

  std::unordered_map<ItemId, std::size_t> where;
  where.reserve(n);
  for (std::size_t k = 0; k < n; ++k) where.emplace(inst.items[k].id, k);
  std::vector<bool> used(n, false);
  for (ItemId id : permutation) {
    auto it = where.find(id);
    if (it == where.end())
      throw InvalidPermutation("unknown id " + std::to_string(id));
    if (used[it->second]) throw InvalidPermutation("id " + std::to_string(id) + " repeated");
    used[it->second] = true;
  }

  const std::size_t sample_end = params.sampling_end();
  const std::size_t secretary_end = params.secretary_end();
  const S& capacity = inst.capacity;

  RunTrace<S> trace;
  trace.rounds.reserve(n);
  std::vector<std::pair<ItemId, S>> assigned;
  assigned.reserve(n);

  IncrementalSolver<S> revealed(capacity);
  revealed.reserve(n);
  std::optional<S> best_sample;  // empty means -infinity
  S consumed(0);

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t round = k + 1;
    const Item<S>& item = inst.items[where.at(permutation[k])];
    revealed.insert(item);

    S remaining = capacity - consumed;
    if constexpr (!is_exact_v<S>) remaining = std::max(remaining, 0.0);

    Phase phase;
    S amount(0);
    if (round <= sample_end) {
      phase = Phase::sampling;
      if (!best_sample || item.value > *best_sample) best_sample = item.value;
    } else if (round <= secretary_end) {
      phase = Phase::secretary;
      if (!best_sample || item.value > *best_sample)
        amount = item.size < remaining ? item.size : remaining;
    } else {
      phase = Phase::knapsack;
      const S wanted = item.size * revealed.query_fraction(item.id);
      amount = wanted < remaining ? wanted : remaining;
    }

    S fraction = amount / item.size;
    if (amount > 0) {
      if (phase == Phase::secretary) {
        if (trace.secretary_packed_nothing) trace.first_secretary_accept = item.id;
        trace.secretary_packed_nothing = false;
        ++trace.secretary_accepts;
      } else {
        ++trace.knapsack_accepts;
      }
    }
    consumed += amount;
    trace.objective += item.value * fraction;
    S left = capacity - consumed;
    if constexpr (!is_exact_v<S>) left = std::max(left, 0.0);
    trace.rounds.push_back({round, item.id, phase, fraction, std::move(left)});
    assigned.emplace_back(item.id, std::move(fraction));
  }
  trace.packing = {IdMap<S>(std::move(assigned)), capacity};
  return trace;
}

}  // namespace okfrac

#endif  // OKFRAC_ONLINE_HPP

#include "okfrac/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "okfrac/bounds.hpp"

namespace okfrac::sim {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Denominator for generated rationals; doubles represent them exactly.
constexpr std::int64_t kGrain = 1 << 20;

Rational grain(std::uint64_t numerator) {
  return Rational(static_cast<std::int64_t>(numerator), kGrain);
}

// Uniform in (0, 1] on the 2^-20 grid.
Rational unit_open(CounterRng& rng) { return grain(rng.below(kGrain) + 1); }

// Uniform in [0, 1) on the 2^-20 grid.
Rational unit_closed(CounterRng& rng) { return grain(rng.below(kGrain)); }

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidSpec(what);
}

// Neumaier compensated summation.
class Accumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0;
  double comp_ = 0;
};

struct Prepared {
  Instance<double> floating;
  const Instance<Rational>* exact = nullptr;
  OptimalSolution<Rational> optimum;
  double opt = 0;
  std::vector<ItemId> ids;  // inst.items order, indexed by permutation entries
  IdMap<std::size_t> ranks;
  // OPT items with their x*_i, s_i and W as doubles, for the delta events.
  struct OptItem {
    ItemId id;
    double x_star;
    double size;
    double utilization;
  };
  std::vector<OptItem> opt_items;
  double capacity = 0;
};

struct ChunkResult {
  std::vector<TrialOutcome> outcomes;
  std::vector<std::vector<std::uint32_t>> delta_hits;  // [delta][opt item]
  std::size_t violations = 0;
  std::size_t revisions = 0;
  double max_consumed = 0;
};

template <Scalar S>
void run_one(const Prepared& prep, const Instance<S>& inst, const PhaseParams& params,
             const std::vector<double>& deltas, const std::vector<std::size_t>& order,
             ChunkResult& out) {
  std::vector<ItemId> perm(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) perm[k] = prep.ids[order[k]];
  const RunTrace<S> trace = run(inst, std::span<const ItemId>(perm), params);

  TrialOutcome outcome;
  outcome.ratio = prep.opt > 0 ? to_double(trace.objective) / prep.opt : 0.0;
  outcome.secretary_empty = trace.secretary_packed_nothing;
  if (trace.first_secretary_accept)
    outcome.first_accept_rank = prep.ranks.at(*trace.first_secretary_accept);

  // Feasibility after every round, and irrevocability: the final packing
  // must carry exactly the fraction recorded in the round the item arrived.
  S consumed(0);
  double worst = 0;
  for (const auto& rec : trace.rounds) {
    const Item<S>& item = inst.items[order[rec.round - 1]];
    consumed += item.size * rec.fraction;
    if constexpr (is_exact_v<S>) {
      if (consumed > inst.capacity) ++out.violations;
    } else {
      if (consumed > inst.capacity * (1.0 + 1e-9)) ++out.violations;
    }
    worst = std::max(worst, to_double(consumed) / to_double(inst.capacity));
    if (trace.packing.fraction(rec.id) != rec.fraction) ++out.revisions;
  }
  out.max_consumed = std::max(out.max_consumed, worst);

  if (trace.secretary_packed_nothing) {
    for (std::size_t t = 0; t < deltas.size(); ++t) {
      for (std::size_t j = 0; j < prep.opt_items.size(); ++j) {
        const auto& oi = prep.opt_items[j];
        const double target = std::min(deltas[t] * prep.capacity / oi.size, oi.x_star);
        const double got = to_double(trace.packing.fraction(oi.id));
        if (got >= target * (1.0 - 1e-9)) ++out.delta_hits[t][j];
      }
    }
  }
  out.outcomes.push_back(outcome);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed + kGolden) ^ (stream * 0xd1b54a32d192ed03ULL + kGolden))) {}

std::uint64_t CounterRng::next() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

double CounterRng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::string family_name(Family f) {
  switch (f) {
    case Family::single_dominant: return "single_dominant";
    case Family::equal_k: return "equal_k";
    case Family::density_staircase: return "density_staircase";
    case Family::mu_bar_split: return "mu_bar_split";
    case Family::uniform_random: return "uniform_random";
    case Family::tiny_items: return "tiny_items";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (Family f : kAllFamilies)
    if (family_name(f) == name) return f;
  throw InvalidSpec("unknown family '" + name + "'");
}

Instance<Rational> generate(const GeneratorSpec& spec, std::uint64_t seed) {
  require(spec.n >= 1, "n must be at least 1");
  require(spec.capacity > 0, "capacity must be positive");
  const Rational& W = spec.capacity;
  const auto n = static_cast<std::int64_t>(spec.n);
  CounterRng rng(seed, 0x67656e /* "gen" */ + static_cast<std::uint64_t>(spec.family));
  Instance<Rational> inst;
  inst.capacity = W;
  inst.items.reserve(spec.n);

  switch (spec.family) {
    case Family::single_dominant: {
      // Others: value in (0,1], size in [W/2, W], so density <= 2/W.
      require(spec.dominance > 2.0, "dominance must exceed 2");
      inst.items.push_back({1, Rational(spec.dominance), W});
      for (std::int64_t id = 2; id <= n; ++id) {
        Rational size = W * (Rational(1, 2) + unit_closed(rng) / 2);
        inst.items.push_back({id, unit_open(rng), size});
      }
      break;
    }
    case Family::equal_k: {
      require(spec.k >= 1 && spec.k <= spec.n, "equal_k needs 1 <= K <= n");
      const Rational size = W / static_cast<std::int64_t>(spec.k);
      for (std::int64_t id = 1; id <= n; ++id) {
        // OPT items: value 1 + u/1000. Fillers: value in (0, 1/4].
        Rational value = id <= static_cast<std::int64_t>(spec.k)
                             ? Rational(1) + unit_closed(rng) / 1000
                             : unit_open(rng) / 4;
        inst.items.push_back({id, std::move(value), size});
      }
      break;
    }
    case Family::density_staircase: {
      // Density n - id + 1, strictly decreasing; sizes (2+2u)W/n, total > W.
      require(spec.n >= 2, "density_staircase needs n >= 2");
      for (std::int64_t id = 1; id <= n; ++id) {
        Rational size = W * (2 + 2 * unit_closed(rng)) / n;
        if (size > W) size = W;
        Rational value = size * (n - id + 1);
        inst.items.push_back({id, std::move(value), std::move(size)});
      }
      break;
    }
    case Family::mu_bar_split: {
      // Two OPT items filling mu_bar and 1 - mu_bar of W; fillers of
      // density at most 1/2 never enter OPT.
      require(spec.n >= 2, "mu_bar_split needs n >= 2");
      require(spec.d > bounds::d_min() && spec.d < 1.0, "mu_bar_split needs d_min < d < 1");
      const double mu = bounds::mu_bar(spec.d);
      const Rational share(static_cast<std::int64_t>(std::llround(mu * (1LL << 40))),
                           static_cast<std::int64_t>(1LL << 40));
      inst.items.push_back({1, 2 * share * W, share * W});
      inst.items.push_back({2, Rational(3, 2) * (1 - share) * W, (1 - share) * W});
      for (std::int64_t id = 3; id <= n; ++id) {
        Rational size = W * (Rational(1, 2) + unit_closed(rng) / 2);
        Rational value = size * unit_open(rng) / 2;
        inst.items.push_back({id, std::move(value), std::move(size)});
      }
      break;
    }
    case Family::uniform_random: {
      for (std::int64_t id = 1; id <= n; ++id) {
        Rational value = unit_open(rng);
        inst.items.push_back({id, std::move(value), W * unit_open(rng)});
      }
      break;
    }
    case Family::tiny_items: {
      // Sizes in [W/10000, W/1000], densities in [1/2, 3/2].
      for (std::int64_t id = 1; id <= n; ++id) {
        Rational size = W * (Rational(1, 10) + Rational(9, 10) * unit_open(rng)) / 1000;
        Rational value = size * (Rational(1, 2) + unit_closed(rng));
        inst.items.push_back({id, std::move(value), std::move(size)});
      }
      break;
    }
  }
  return normalize(inst);
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed,
                                            std::uint64_t trial_index) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  CounterRng rng(seed, trial_index);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::size_t default_threads() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OKFRAC_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) hw = std::min(hw, static_cast<std::size_t>(cap));
  }
  return hw;
}

TrialStats run_trials(const Instance<Rational>& inst, const PhaseParams& params,
                      std::size_t trials, std::uint64_t seed, const TrialOptions& options) {
  if (trials < 1) throw InvalidSpec("trials must be at least 1");
  params.validate();
  if (params.n != inst.items.size()) throw DomainError("phase parameters do not match n");
  for (double delta : options.deltas)
    if (!(delta > 0 && delta < 1)) throw InvalidSpec("delta must lie in (0, 1)");

  Prepared prep;
  prep.exact = &inst;
  prep.optimum = solve_fractional(inst);
  if (prep.optimum.objective == 0) throw DegenerateInstance("OPT is zero");
  prep.opt = to_double(prep.optimum.objective);
  prep.floating = convert<double>(inst);
  prep.capacity = to_double(inst.capacity);
  prep.ranks = value_ranks(inst);
  for (const auto& item : inst.items) {
    prep.ids.push_back(item.id);
    const Rational& x = prep.optimum.packing.fraction(item.id);
    if (x > 0) {
      prep.opt_items.push_back({item.id, to_double(x), to_double(item.size),
                                to_double(prep.optimum.utilizations.at(item.id))});
    }
  }

  constexpr std::size_t kChunk = 64;
  const std::size_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<ChunkResult> results(chunks);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      ChunkResult& out = results[c];
      out.delta_hits.assign(options.deltas.size(),
                            std::vector<std::uint32_t>(prep.opt_items.size(), 0));
      const std::size_t begin = c * kChunk;
      const std::size_t end = std::min(trials, begin + kChunk);
      out.outcomes.reserve(end - begin);
      for (std::size_t t = begin; t < end; ++t) {
        const auto order = random_permutation(inst.items.size(), seed, t);
        if (options.arithmetic == Arithmetic::rational) {
          run_one(prep, inst, params, options.deltas, order, out);
        } else {
          run_one(prep, prep.floating, params, options.deltas, order, out);
        }
      }
    }
  };

  const std::size_t threads =
      std::max<std::size_t>(1, std::min(options.threads ? options.threads : default_threads(),
                                         chunks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Single aggregation point, in trial order.
  TrialStats stats;
  stats.trials = trials;
  stats.opt = prep.opt;
  stats.first_accept_rank_freq.assign(options.max_rank, 0.0);
  std::vector<std::size_t> rank_counts(options.max_rank, 0);
  std::vector<std::vector<std::uint64_t>> hits(
      options.deltas.size(), std::vector<std::uint64_t>(prep.opt_items.size(), 0));
  Accumulator sum;
  for (const auto& chunk : results) {
    for (const auto& o : chunk.outcomes) {
      sum.add(o.ratio);
      if (o.secretary_empty) ++stats.empty_after_secretary;
      if (o.first_accept_rank >= 1 && o.first_accept_rank <= options.max_rank)
        ++rank_counts[o.first_accept_rank - 1];
      if (options.keep_per_trial) stats.per_trial.push_back(o);
    }
    for (std::size_t t = 0; t < hits.size(); ++t)
      for (std::size_t j = 0; j < hits[t].size(); ++j) hits[t][j] += chunk.delta_hits[t][j];
    stats.feasibility_violations += chunk.violations;
    stats.revisions += chunk.revisions;
    stats.max_consumed_fraction = std::max(stats.max_consumed_fraction, chunk.max_consumed);
  }
  const double count = static_cast<double>(trials);
  stats.mean_ratio = sum.value() / count;
  if (trials > 1) {
    Accumulator sq;
    for (const auto& chunk : results)
      for (const auto& o : chunk.outcomes) sq.add((o.ratio - stats.mean_ratio) * (o.ratio - stats.mean_ratio));
    stats.ratio_stderr = std::sqrt(sq.value() / (count - 1.0) / count);
  }
  stats.empty_after_secretary_freq = static_cast<double>(stats.empty_after_secretary) / count;
  for (std::size_t r = 0; r < options.max_rank; ++r)
    stats.first_accept_rank_freq[r] = static_cast<double>(rank_counts[r]) / count;
  for (std::size_t t = 0; t < options.deltas.size(); ++t) {
    DeltaFrequencies df{options.deltas[t], {}};
    for (std::size_t j = 0; j < prep.opt_items.size(); ++j) {
      const double freq = stats.empty_after_secretary == 0
                              ? 0.0
                              : static_cast<double>(hits[t][j]) /
                                    static_cast<double>(stats.empty_after_secretary);
      df.items.push_back({prep.opt_items[j].id, prep.opt_items[j].utilization, freq});
    }
    stats.per_item_pack_freq.push_back(std::move(df));
  }
  return stats;
}

std::vector<double> estimate_p_ranks(const Instance<Rational>& inst, const PhaseParams& params,
                                     std::size_t trials, std::uint64_t seed,
                                     std::size_t max_rank, std::size_t threads) {
  std::vector<const Item<Rational>*> order;
  for (const auto& item : inst.items) order.push_back(&item);
  if (order.size() < max_rank)
    throw InvalidInstance("instance has fewer than max_rank items");
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return value_before(*a, *b);
  });
  // The top max_rank values must be distinct (and strictly above the next one).
  for (std::size_t r = 0; r < max_rank && r + 1 < order.size(); ++r)
    if (order[r]->value == order[r + 1]->value)
      throw InvalidInstance("top-ranked values are not distinct");
  TrialOptions options;
  options.max_rank = max_rank;
  options.threads = threads;
  return run_trials(inst, params, trials, seed, options).first_accept_rank_freq;
}

}  // namespace okfrac::sim

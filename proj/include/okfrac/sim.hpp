#ifndef OKFRAC_SIM_HPP
#define OKFRAC_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "okfrac/core.hpp"
#include "okfrac/online.hpp"

namespace okfrac::sim {

/// Counter-based generator: the stream for (seed, trial) is a pure function
/// of both, so trial t is reproducible without replaying trials 0..t-1.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double unit();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class Family {
  single_dominant,
  equal_k,
  density_staircase,
  mu_bar_split,
  uniform_random,
  tiny_items,
};

inline constexpr Family kAllFamilies[] = {
    Family::single_dominant, Family::equal_k,        Family::density_staircase,
    Family::mu_bar_split,    Family::uniform_random, Family::tiny_items,
};

std::string family_name(Family f);
Family parse_family(const std::string& name);

struct GeneratorSpec {
  Family family = Family::single_dominant;
  std::size_t n = 2000;
  std::size_t k = 10;          // equal_k: number of OPT items
  double dominance = 1000.0;   // single_dominant: value of the dominant item
  double d = 0.6013835672302987;  // mu_bar_split: phase parameter fixing mu_bar
  Rational capacity{1};
};

/// Deterministic per (spec, seed). Every generated size is at most the capacity.
Instance<Rational> generate(const GeneratorSpec& spec, std::uint64_t seed);

/// Uniform shuffle of 0..n-1 keyed by (seed, trial_index).
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed,
                                            std::uint64_t trial_index);

enum class Arithmetic { floating, rational };

struct TrialOptions {
  std::vector<double> deltas;   // delta values for the per-item packing frequencies
  std::size_t max_rank = 10;    // ranks tracked for first secretary acceptance
  std::size_t threads = 0;      // 0: hardware concurrency
  Arithmetic arithmetic = Arithmetic::floating;
  bool keep_per_trial = false;
};

struct TrialOutcome {
  double ratio = 0;
  bool secretary_empty = true;
  std::size_t first_accept_rank = 0;  // 0: nothing accepted in the secretary phase
};

struct ItemFrequency {
  ItemId id;
  double utilization;
  double frequency;
};

struct DeltaFrequencies {
  double delta;
  std::vector<ItemFrequency> items;  // OPT items only
};

struct TrialStats {
  std::size_t trials = 0;
  double mean_ratio = 0;
  std::optional<double> ratio_stderr;  // empty for a single trial
  double empty_after_secretary_freq = 0;
  std::size_t empty_after_secretary = 0;
  std::vector<double> first_accept_rank_freq;  // index r-1 for rank r
  std::vector<DeltaFrequencies> per_item_pack_freq;  // conditioned on an empty secretary phase
  double opt = 0;
  // Invariant monitors over every round of every trial.
  std::size_t feasibility_violations = 0;
  std::size_t revisions = 0;
  double max_consumed_fraction = 0;  // max over trials of consumed / W
  std::vector<TrialOutcome> per_trial;  // only with keep_per_trial
};

/// Runs the online algorithm once per independent random permutation and
/// aggregates the outcomes. Results do not depend on the thread count.
TrialStats run_trials(const Instance<Rational>& inst, const PhaseParams& params,
                      std::size_t trials, std::uint64_t seed, const TrialOptions& options = {});

/// Empirical frequency that the rank-r most valuable item (r = 1..max_rank) is
/// the first item accepted in the secretary phase.
std::vector<double> estimate_p_ranks(const Instance<Rational>& inst, const PhaseParams& params,
                                     std::size_t trials, std::uint64_t seed,
                                     std::size_t max_rank, std::size_t threads = 0);

/// Thread count from OKFRAC_THREADS, falling back to the hardware concurrency.
std::size_t default_threads();

}  // namespace okfrac::sim

#endif  // OKFRAC_SIM_HPP

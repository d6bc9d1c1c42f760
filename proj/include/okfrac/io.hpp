#ifndef OKFRAC_IO_HPP
#define OKFRAC_IO_HPP

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "okfrac/core.hpp"
#include "okfrac/online.hpp"
#include "okfrac/sim.hpp"

namespace okfrac::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Instance JSON: {"capacity": q, "items": [{"id": int, "value": q, "size": q}]}
/// where q is a number or a "p/q" string. Strings are exact; numbers are
/// read as doubles (and converted exactly in rational mode).
template <Scalar S>
Instance<S> instance_from_json(const json& doc);

template <Scalar S>
json instance_to_json(const Instance<S>& inst);

template <Scalar S>
Instance<S> read_instance(const std::string& path);

template <Scalar S>
json solution_to_json(const OptimalSolution<S>& sol);

/// CSV with header id,fraction,utilization.
template <Scalar S>
void write_solution_csv(std::ostream& os, const OptimalSolution<S>& sol);

template <Scalar S>
json run_summary_to_json(const RunTrace<S>& trace, const Rational& opt, const PhaseParams& params);

/// CSV with header round,id,phase,fraction,remaining.
template <Scalar S>
void write_trace_csv(std::ostream& os, const RunTrace<S>& trace);

json trial_stats_to_json(const sim::TrialStats& stats);

/// Per-trial CSV with header trial,ratio,secretary_empty,first_accept_rank.
void write_per_trial_csv(std::ostream& os, const sim::TrialStats& stats);

}  // namespace okfrac::io

#endif  // OKFRAC_IO_HPP

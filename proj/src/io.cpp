#include "okfrac/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

namespace okfrac {

namespace {

namespace mp = boost::multiprecision;

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  return true;
}

mp::mpz_int parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw InvalidInstance("malformed rational '" + std::string(whole) + "'");
  // A leading zero would make the string parse as octal.
  s.remove_prefix(std::min(s.find_first_not_of('0'), s.size() - 1));
  mp::mpz_int v{std::string(s)};
  return negative ? mp::mpz_int(-v) : v;
}

mp::mpz_int pow10(long e) {
  mp::mpz_int r(1);
  for (long k = 0; k < e; ++k) r *= 10;
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw InvalidInstance("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const mp::mpz_int num = parse_integer(text.substr(0, slash), text);
    const mp::mpz_int den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw InvalidInstance("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  // Decimal literal: [sign] digits [. digits] [e [sign] digits]
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    const mp::mpz_int ex = parse_integer(text.substr(e + 1), text);
    if (ex > 400 || ex < -400) throw InvalidInstance("exponent out of range in '" + std::string(text) + "'");
    exponent = ex.convert_to<long>();
    mantissa = text.substr(0, e);
  }
  std::string digits;
  long scale = 0;
  bool negative = false;
  std::string_view m = mantissa;
  if (!m.empty() && (m.front() == '-' || m.front() == '+')) {
    negative = m.front() == '-';
    m.remove_prefix(1);
  }
  if (auto dot = m.find('.'); dot != std::string_view::npos) {
    digits = std::string(m.substr(0, dot)) + std::string(m.substr(dot + 1));
    scale = static_cast<long>(m.size() - dot - 1);
  } else {
    digits = std::string(m);
  }
  if (!all_digits(digits)) throw InvalidInstance("malformed rational '" + std::string(text) + "'");
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  mp::mpz_int num{digits};
  if (negative) num = -num;
  const long shift = exponent - scale;
  if (shift >= 0) return Rational(mp::mpz_int(num * pow10(shift)));
  return Rational(num, pow10(-shift));
}

std::string format_rational(const Rational& x) {
  const auto num = mp::numerator(x);
  const auto den = mp::denominator(x);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace io {

namespace {

template <Scalar S>
S scalar_from_json(const json& v, const char* what) {
  if (v.is_string()) return scalar_cast<S>(parse_rational(v.get<std::string>()));
  if (v.is_number_integer()) {
    if constexpr (is_exact_v<S>) {
      if (v.is_number_unsigned()) return Rational(mp::mpz_int(v.get<std::uint64_t>()));
      return Rational(v.get<std::int64_t>());
    } else {
      return v.get<double>();
    }
  }
  if (v.is_number()) return scalar_cast<S>(v.get<double>());
  throw InvalidInstance(std::string("field '") + what + "' must be a number or a \"p/q\" string");
}

json scalar_to_json(double x) { return x; }
json scalar_to_json(const Rational& x) { return format_rational(x); }

}  // namespace

template <Scalar S>
Instance<S> instance_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidInstance("instance must be a JSON object");
  if (!doc.contains("capacity")) throw InvalidInstance("missing 'capacity'");
  if (!doc.contains("items") || !doc["items"].is_array()) throw InvalidInstance("missing 'items' array");
  Instance<S> inst;
  inst.capacity = scalar_from_json<S>(doc["capacity"], "capacity");
  for (const auto& entry : doc["items"]) {
    if (!entry.is_object() || !entry.contains("id") || !entry.contains("value") ||
        !entry.contains("size"))
      throw InvalidInstance("each item needs id, value and size");
    if (!entry["id"].is_number_integer()) throw InvalidInstance("item id must be an integer");
    inst.items.push_back({entry["id"].get<ItemId>(), scalar_from_json<S>(entry["value"], "value"),
                          scalar_from_json<S>(entry["size"], "size")});
  }
  return inst;
}

template <Scalar S>
json instance_to_json(const Instance<S>& inst) {
  json items = json::array();
  for (const auto& item : inst.items)
    items.push_back({{"id", item.id}, {"value", scalar_to_json(item.value)},
                     {"size", scalar_to_json(item.size)}});
  return {{"capacity", scalar_to_json(inst.capacity)}, {"items", std::move(items)}};
}

template <Scalar S>
Instance<S> read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInstance("cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidInstance("'" + path + "': " + e.what());
  }
  return instance_from_json<S>(doc);
}

template <Scalar S>
json solution_to_json(const OptimalSolution<S>& sol) {
  json items = json::array();
  for (const auto& [id, x] : sol.packing.fractions)
    items.push_back({{"id", id}, {"fraction", scalar_to_json(x)},
                     {"utilization", scalar_to_json(sol.utilizations.at(id))}});
  json out = {{"schema_version", kSchemaVersion},
              {"objective", scalar_to_json(sol.objective)},
              {"objective_float", to_double(sol.objective)},
              {"threshold_density", scalar_to_json(sol.threshold_density)},
              {"support_size", sol.support_size},
              {"items", std::move(items)}};
  return out;
}

template <Scalar S>
void write_solution_csv(std::ostream& os, const OptimalSolution<S>& sol) {
  os << "id,fraction,utilization\n";
  for (const auto& [id, x] : sol.packing.fractions) {
    os << id << ',' << scalar_to_json(x).dump() << ','
       << scalar_to_json(sol.utilizations.at(id)).dump() << '\n';
  }
}

template <Scalar S>
json run_summary_to_json(const RunTrace<S>& trace, const Rational& opt, const PhaseParams& params) {
  std::size_t sampled = 0;
  for (const auto& r : trace.rounds)
    if (r.phase == Phase::sampling) ++sampled;
  const double opt_f = to_double(opt);
  json out = {{"schema_version", kSchemaVersion},
              {"n", params.n},
              {"c", params.c},
              {"d", params.d},
              {"sampling_rounds", params.sampling_end()},
              {"secretary_rounds", params.secretary_end() - params.sampling_end()},
              {"knapsack_rounds", params.n - params.secretary_end()},
              {"objective", scalar_to_json(trace.objective)},
              {"objective_float", to_double(trace.objective)},
              {"opt", format_rational(opt)},
              {"ratio", opt_f > 0 ? to_double(trace.objective) / opt_f : 0.0},
              {"secretary_accepts", trace.secretary_accepts},
              {"knapsack_accepts", trace.knapsack_accepts},
              {"secretary_packed_nothing", trace.secretary_packed_nothing}};
  out["first_secretary_accept"] =
      trace.first_secretary_accept ? json(*trace.first_secretary_accept) : json(nullptr);
  return out;
}

template <Scalar S>
void write_trace_csv(std::ostream& os, const RunTrace<S>& trace) {
  os << "round,id,phase,fraction,remaining\n";
  for (const auto& r : trace.rounds) {
    os << r.round << ',' << r.id << ',' << phase_name(r.phase) << ','
       << scalar_to_json(r.fraction).dump() << ',' << scalar_to_json(r.remaining).dump() << '\n';
  }
}

json trial_stats_to_json(const sim::TrialStats& stats) {
  json deltas = json::array();
  for (const auto& df : stats.per_item_pack_freq) {
    json items = json::array();
    for (const auto& it : df.items)
      items.push_back({{"id", it.id}, {"utilization", it.utilization}, {"frequency", it.frequency}});
    deltas.push_back({{"delta", df.delta}, {"items", std::move(items)}});
  }
  json out = {{"schema_version", kSchemaVersion},
              {"trials", stats.trials},
              {"opt", stats.opt},
              {"mean_ratio", stats.mean_ratio},
              {"empty_after_secretary_freq", stats.empty_after_secretary_freq},
              {"empty_after_secretary", stats.empty_after_secretary},
              {"first_accept_rank_freq", stats.first_accept_rank_freq},
              {"per_item_pack_freq", std::move(deltas)},
              {"feasibility_violations", stats.feasibility_violations},
              {"revisions", stats.revisions},
              {"max_consumed_fraction", stats.max_consumed_fraction}};
  out["ratio_stderr"] = stats.ratio_stderr ? json(*stats.ratio_stderr) : json(nullptr);
  return out;
}

void write_per_trial_csv(std::ostream& os, const sim::TrialStats& stats) {
  os << "trial,ratio,secretary_empty,first_accept_rank\n";
  for (std::size_t t = 0; t < stats.per_trial.size(); ++t) {
    const auto& o = stats.per_trial[t];
    os << t << ',' << json(o.ratio).dump() << ',' << (o.secretary_empty ? 1 : 0) << ','
       << o.first_accept_rank << '\n';
  }
}

#define OKFRAC_INSTANTIATE(S)                                                              \
  template Instance<S> instance_from_json<S>(const json&);                                 \
  template json instance_to_json<S>(const Instance<S>&);                                   \
  template Instance<S> read_instance<S>(const std::string&);                               \
  template json solution_to_json<S>(const OptimalSolution<S>&);                            \
  template void write_solution_csv<S>(std::ostream&, const OptimalSolution<S>&);           \
  template json run_summary_to_json<S>(const RunTrace<S>&, const Rational&, const PhaseParams&); \
  template void write_trace_csv<S>(std::ostream&, const RunTrace<S>&);

OKFRAC_INSTANTIATE(double)
OKFRAC_INSTANTIATE(Rational)

#undef OKFRAC_INSTANTIATE

}  // namespace io
}  // namespace okfrac

// okfrac: offline oracle, online runs, Monte Carlo campaigns and analytic
// bounds for online fractional knapsack in the random order model.
//
// Exit codes: 0 success, 2 usage or input error, 3 convergence failure.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "okfrac/bounds.hpp"
#include "okfrac/core.hpp"
#include "okfrac/io.hpp"
#include "okfrac/online.hpp"
#include "okfrac/sim.hpp"

namespace {

using okfrac::Instance;
using okfrac::ItemId;
using okfrac::Rational;
using nlohmann::json;

constexpr int kUsageError = 2;
constexpr int kConvergenceError = 3;

struct Config {
  std::string instance;
  std::string family = "single_dominant";
  std::size_t n = 2000;
  std::size_t k = 10;
  double dominance = 1000.0;
  double c = 0.47521;
  double d = 0.60138;
  std::size_t trials = 20000;
  std::uint64_t seed = 1;
  std::uint64_t trial = 0;
  std::string permutation;
  std::vector<double> delta_grid;
  std::size_t max_rank = 10;
  std::string format = "json";
  std::string mode;
  std::string out;
  double tolerance = 1e-10;
  bool force_c_eq_d = false;
  std::size_t grid_points = 200;
  int i_max = 5;
  double mu_step = 0.1;
  std::optional<std::int64_t> bound_n;
  bool only_d_min = false;
  bool only_z_many = false;
  bool only_z_single = false;
  bool only_mu_bar = false;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw okfrac::InvalidSpec("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

Instance<Rational> load_exact(const Config& cfg) {
  if (!cfg.instance.empty()) return okfrac::normalize(okfrac::io::read_instance<Rational>(cfg.instance));
  okfrac::sim::GeneratorSpec spec;
  spec.family = okfrac::sim::parse_family(cfg.family);
  spec.n = cfg.n;
  spec.k = cfg.k;
  spec.dominance = cfg.dominance;
  if (spec.family == okfrac::sim::Family::mu_bar_split) spec.d = cfg.d;
  return okfrac::sim::generate(spec, cfg.seed);
}

std::vector<ItemId> parse_permutation(const std::string& text) {
  std::vector<ItemId> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(token, &used));
      if (used != token.size() && token.find_first_not_of(' ', used) != std::string::npos)
        throw std::invalid_argument(token);
    } catch (const std::logic_error&) {
      throw okfrac::InvalidPermutation("malformed entry '" + token + "'");
    }
  }
  return out;
}

template <okfrac::Scalar S>
int solve_in(const Config& cfg) {
  const Instance<S> inst = okfrac::normalize(okfrac::io::read_instance<S>(cfg.instance));
  const auto sol = okfrac::solve_fractional(inst);
  Output out(cfg.out);
  if (cfg.format == "csv") {
    okfrac::io::write_solution_csv(out.stream(), sol);
  } else {
    out.stream() << okfrac::io::solution_to_json(sol).dump(2) << '\n';
  }
  return 0;
}

int cmd_solve(const Config& cfg) {
  if (cfg.instance.empty()) throw okfrac::InvalidSpec("solve needs --instance");
  return cfg.mode == "float" ? solve_in<double>(cfg) : solve_in<Rational>(cfg);
}

template <okfrac::Scalar S>
int run_in(const Config& cfg, const Instance<Rational>& exact) {
  const Instance<S> inst = okfrac::convert<S>(exact);
  std::vector<ItemId> perm;
  if (!cfg.permutation.empty()) {
    perm = parse_permutation(cfg.permutation);
  } else {
    for (std::size_t k : okfrac::sim::random_permutation(inst.size(), cfg.seed, cfg.trial))
      perm.push_back(inst.items[k].id);
  }
  const okfrac::PhaseParams params{cfg.c, cfg.d, inst.size()};
  const auto trace = okfrac::run(inst, std::span<const ItemId>(perm), params);
  const Rational opt = okfrac::solve_fractional(exact).objective;
  Output out(cfg.out);
  if (cfg.format == "csv") {
    okfrac::io::write_trace_csv(out.stream(), trace);
  } else {
    out.stream() << okfrac::io::run_summary_to_json(trace, opt, params).dump(2) << '\n';
  }
  return 0;
}

int cmd_run(const Config& cfg) {
  const Instance<Rational> exact = load_exact(cfg);
  return cfg.mode == "rational" ? run_in<Rational>(cfg, exact) : run_in<double>(cfg, exact);
}

int cmd_simulate(const Config& cfg) {
  const Instance<Rational> inst = load_exact(cfg);
  const okfrac::PhaseParams params{cfg.c, cfg.d, inst.size()};
  okfrac::sim::TrialOptions options;
  options.deltas = cfg.delta_grid;
  options.max_rank = cfg.max_rank;
  options.threads = okfrac::sim::default_threads();
  options.arithmetic =
      cfg.mode == "rational" ? okfrac::sim::Arithmetic::rational : okfrac::sim::Arithmetic::floating;
  options.keep_per_trial = cfg.format == "csv";
  const auto stats = okfrac::sim::run_trials(inst, params, cfg.trials, cfg.seed, options);
  Output out(cfg.out);
  if (cfg.format == "csv") {
    okfrac::io::write_per_trial_csv(out.stream(), stats);
  } else {
    json doc = okfrac::io::trial_stats_to_json(stats);
    doc["c"] = cfg.c;
    doc["d"] = cfg.d;
    doc["n"] = inst.size();
    doc["seed"] = cfg.seed;
    doc["source"] = cfg.instance.empty() ? cfg.family : cfg.instance;
    out.stream() << doc.dump(2) << '\n';
  }
  return 0;
}

int cmd_bounds(const Config& cfg) {
  namespace b = okfrac::bounds;
  Output out(cfg.out);
  auto& os = out.stream();
  if (cfg.only_d_min) {
    os << format_number(b::d_min()) << '\n';
    return 0;
  }
  if (cfg.only_z_many) {
    os << format_number(b::z_many(cfg.c, cfg.d)) << '\n';
    return 0;
  }
  if (cfg.only_z_single) {
    os << format_number(b::z_single(cfg.c, cfg.d)) << '\n';
    return 0;
  }
  if (cfg.only_mu_bar) {
    os << format_number(b::mu_bar(cfg.d)) << '\n';
    return 0;
  }
  if (!(cfg.d > b::d_min() && cfg.d < 1.0))
    throw okfrac::DomainError("bounds report needs d_min < d < 1");

  json p = json::array();
  for (int i = 1; i <= cfg.i_max; ++i) p.push_back({{"i", i}, {"p", b::p_lower(i, cfg.c, cfg.d)}});
  json q = json::array();
  if (!(cfg.mu_step > 0 && cfg.mu_step <= 1)) throw okfrac::DomainError("--mu-step must lie in (0, 1]");
  const auto steps = static_cast<int>(std::floor(1.0 / cfg.mu_step + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const double mu = std::min(1.0, k * cfg.mu_step);
    q.push_back({{"mu", mu}, {"q", b::q_lower(mu, cfg.d)}});
  }
  json pack = json::array();
  for (double delta : cfg.delta_grid) {
    json row = {{"delta", delta}, {"asymptotic", b::prob_pack_total(cfg.d, delta)}};
    if (cfg.bound_n) row["finite_n"] = b::prob_pack_total(cfg.d, delta, cfg.bound_n);
    pack.push_back(std::move(row));
  }
  const auto excess = b::excess_constants(cfg.c, cfg.d);
  json doc = {{"schema_version", okfrac::io::kSchemaVersion},
              {"c", cfg.c},
              {"d", cfg.d},
              {"d_min", b::d_min()},
              {"mu_bar", b::mu_bar(cfg.d)},
              {"p", std::move(p)},
              {"q", std::move(q)},
              {"prob_pack_total", std::move(pack)},
              {"z_single", b::z_single(cfg.c, cfg.d)},
              {"z_many", b::z_many(cfg.c, cfg.d)},
              {"excess_constants",
               {{"below_mu_bar", excess.below_mu_bar}, {"above_mu_bar", excess.above_mu_bar}}}};
  os << doc.dump(2) << '\n';
  return 0;
}

int cmd_optimize(const Config& cfg) {
  namespace b = okfrac::bounds;
  Output out(cfg.out);
  if (cfg.format == "csv") {
    out.stream() << "d,c_of_d,z,ratio\n";
    for (const auto& row : b::sweep(cfg.grid_points)) {
      out.stream() << format_number(row.d) << ',' << format_number(row.c_of_d) << ','
                   << format_number(row.z) << ',' << format_number(row.ratio) << '\n';
    }
    return 0;
  }
  const auto r = b::optimize_params(cfg.tolerance, cfg.force_c_eq_d ? b::Constraint::c_equals_d
                                                                    : b::Constraint::free);
  json doc = {{"schema_version", okfrac::io::kSchemaVersion},
              {"constraint", cfg.force_c_eq_d ? "c_equals_d" : "free"},
              {"c_star", r.c_star},
              {"d_star", r.d_star},
              {"z_star", r.z_star},
              {"ratio", r.ratio},
              {"constraint_gap", r.constraint_gap},
              {"grid_local_maxima", r.grid_local_maxima}};
  out.stream() << doc.dump(2) << '\n';
  return 0;
}

void add_phase_flags(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--c", cfg.c, "end of the sampling phase as a fraction of n");
  cmd->add_option("--d", cfg.d, "end of the secretary phase as a fraction of n");
}

void add_source_flags(CLI::App* cmd, Config& cfg) {
  auto* inst = cmd->add_option("--instance", cfg.instance, "instance JSON file");
  auto* fam = cmd->add_option("--family", cfg.family, "generator family")
                  ->check(CLI::IsMember({"single_dominant", "equal_k", "density_staircase",
                                         "mu_bar_split", "uniform_random", "tiny_items"}));
  inst->excludes(fam);
  cmd->add_option("--n", cfg.n, "generated item count");
  cmd->add_option("--k", cfg.k, "equal_k: number of OPT items");
  cmd->add_option("--dominance", cfg.dominance, "single_dominant: value of the dominant item");
  cmd->add_option("--seed", cfg.seed, "seed for generation and permutations");
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Online fractional knapsack in the random order model"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "exact offline fractional optimum");
  solve->add_option("--instance", cfg.instance, "instance JSON file")->required();
  solve->add_option("--mode", cfg.mode, "arithmetic")->check(CLI::IsMember({"rational", "float"}));
  solve->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
  solve->add_option("--out", cfg.out);

  auto* run = app.add_subcommand("run", "one run of the online algorithm");
  add_source_flags(run, cfg);
  add_phase_flags(run, cfg);
  run->add_option("--permutation", cfg.permutation, "arrival order as comma-separated ids");
  run->add_option("--trial", cfg.trial, "trial index keying the random permutation");
  run->add_option("--mode", cfg.mode, "arithmetic")->check(CLI::IsMember({"rational", "float"}));
  run->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--out", cfg.out);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate over random orders");
  add_source_flags(simulate, cfg);
  add_phase_flags(simulate, cfg);
  simulate->add_option("--trials", cfg.trials)->check(CLI::PositiveNumber);
  simulate->add_option("--delta-grid", cfg.delta_grid, "delta values for per-item packing frequencies")
      ->delimiter(',');
  simulate->add_option("--max-rank", cfg.max_rank);
  simulate->add_option("--mode", cfg.mode, "arithmetic")->check(CLI::IsMember({"rational", "float"}));
  simulate->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
  simulate->add_option("--out", cfg.out);

  auto* bnds = app.add_subcommand("bounds", "analytic probability and profit bounds");
  add_phase_flags(bnds, cfg);
  bnds->add_option("--i-max", cfg.i_max, "largest rank i for p(i)")->check(CLI::PositiveNumber);
  bnds->add_option("--mu-step", cfg.mu_step, "step of the mu grid for q(mu)");
  bnds->add_option("--n", cfg.bound_n, "item count for finite-n forms");
  bnds->add_option("--delta-grid", cfg.delta_grid)->delimiter(',');
  bnds->add_flag("--d-min", cfg.only_d_min, "print only d_min");
  bnds->add_flag("--z-many", cfg.only_z_many, "print only z_many(c, d)");
  bnds->add_flag("--z-single", cfg.only_z_single, "print only z_single(c, d)");
  bnds->add_flag("--mu-bar", cfg.only_mu_bar, "print only mu_bar(d)");
  bnds->add_option("--format", cfg.format)->check(CLI::IsMember({"json"}));
  bnds->add_option("--out", cfg.out);

  auto* optimize = app.add_subcommand("optimize", "optimal phase parameters");
  optimize->add_option("--tolerance", cfg.tolerance)->check(CLI::PositiveNumber);
  optimize->add_flag("--force-c-eq-d", cfg.force_c_eq_d, "restrict the search to c = d");
  optimize->add_option("--grid-points", cfg.grid_points, "rows of the csv sweep");
  optimize->add_option("--format", cfg.format, "json result or csv sweep")
      ->check(CLI::IsMember({"json", "csv"}));
  optimize->add_option("--out", cfg.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg);
    if (run->parsed()) return cmd_run(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (bnds->parsed()) return cmd_bounds(cfg);
    if (optimize->parsed()) return cmd_optimize(cfg);
  } catch (const okfrac::ConvergenceFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConvergenceError;
  } catch (const okfrac::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

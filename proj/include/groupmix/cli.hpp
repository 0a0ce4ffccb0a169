#pragma once

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "groupmix/codes.hpp"
#include "groupmix/experiments.hpp"
#include "groupmix/json_io.hpp"
#include "groupmix/walk_bounds.hpp"

namespace groupmix::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRowFailed = 1;
inline constexpr int kExitConfigInvalid = 2;
inline constexpr int kExitCapExceeded = 3;
inline constexpr int kExitIoError = 4;

struct RunOutput {
  std::vector<ResultRow> rows;
  Json sidecar_extra = Json::object();
};

// ---------------------------------------------------------------------------
// lattice cache (GROUPMIX_CACHE_DIR)
// ---------------------------------------------------------------------------

/// Optional on-disk memo for subgroup lattices, keyed by the Cayley-table
/// hash. Entries that fail to load are silently recomputed.
inline SubgroupLattice cached_subgroup_lattice(const GroupPtr& g) {
  const char* dir = std::getenv("GROUPMIX_CACHE_DIR");
  if (!dir) return subgroup_lattice(g);
  std::ostringstream name;
  name << "lattice-" << std::hex << g->table_hash() << ".json";
  const std::filesystem::path path = std::filesystem::path(dir) / name.str();
  if (std::filesystem::exists(path)) {
    try {
      return lattice_from_json(load_json_file(path.string()), g);
    } catch (const Error&) {
      // fall through to recompute
    }
  }
  SubgroupLattice lat = subgroup_lattice(g);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!ec) {
    try {
      write_text_file(path.string(), lattice_to_json(lat).dump());
    } catch (const IoError&) {
      // cache writes are best-effort
    }
  }
  return lat;
}

// ---------------------------------------------------------------------------
// per-command runners
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim_key(double v) {
  std::string s = format_double(v);
  return s;
}

inline RunOutput run_walk_verify(const Json& params, std::uint64_t seed,
                                 unsigned threads) {
  (void)threads;
  require_fields(params,
                 {"suite", "instances", "tolerance", "ns", "k_max", "ps",
                  "group", "chain", "steps"},
                 "walk-verify parameters");
  RunOutput out;
  const double tol = params.value("tolerance", 1e-8);
  const std::string suite = params.value("suite", std::string("explicit"));

  if (suite == "random-soundness") {
    const std::size_t instances = params.at("instances").get<std::size_t>();
    auto rows = walk_soundness_suite(instances, seed, tol);
    Json detail = Json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      ResultRow row;
      row.experiment_id = "soundness-" + std::to_string(i) + "-" + r.group_name;
      row.statistic_name = "walk_distance_sq";
      row.value = r.lhs;
      row.bound = r.rhs;
      row.pass = r.pass;
      out.rows.push_back(std::move(row));
      detail.push_back({{"group", r.group_name},
                        {"steps", r.steps},
                        {"levels", r.levels},
                        {"feasible", r.feasible}});
    }
    out.sidecar_extra["instances"] = detail;
    return out;
  }

  if (suite == "dihedral-golden") {
    const auto ns = params.value("ns", std::vector<std::size_t>{4, 6});
    const int k_max = params.value("k_max", 8);
    const auto ps = params.value("ps", std::vector<double>{0.1, 0.3, 0.5});
    for (std::size_t n : ns)
      for (int k = 1; k <= k_max; ++k)
        for (double p : ps) {
          DihedralGoldenRow g = dihedral_golden_instance(n, k, p);
          const std::string id = "dihedral-n" + std::to_string(n) + "-k" +
                                 std::to_string(k) + "-p" + trim_key(p);
          ResultRow sig;
          sig.experiment_id = id;
          sig.statistic_name = "sigma_even_error";
          sig.value = std::abs(g.sigma_even - std::abs(1.0 - 2.0 * p));
          sig.bound = 1e-10;
          sig.pass = sig.value <= 1e-10;
          out.rows.push_back(std::move(sig));
          ResultRow dist;
          dist.experiment_id = id;
          dist.statistic_name = "walk_distance_sq";
          dist.value = g.lhs;
          dist.bound = g.paper_bound;
          dist.pass = g.lhs <= g.paper_bound + tol;
          out.rows.push_back(std::move(dist));
        }
    return out;
  }

  if (suite == "a5-counterexample") {
    A5CounterexampleReport rep = a5_counterexample();
    ResultRow prob;
    prob.experiment_id = "a5-counterexample";
    prob.statistic_name = "prob_maps_3_to_4";
    prob.value = rep.probability_3_to_4;
    prob.reference_value = 0.0;
    prob.pass = std::abs(rep.probability_3_to_4) < 1e-15;
    out.rows.push_back(std::move(prob));
    ResultRow ref;
    ref.experiment_id = "a5-counterexample";
    ref.statistic_name = "uniform_prob_maps_3_to_4";
    ref.value = rep.uniform_reference;
    ref.reference_value = 0.2;
    ref.pass = std::abs(rep.uniform_reference - 0.2) < 1e-12;
    out.rows.push_back(std::move(ref));
    for (int s = 0; s < 3; ++s) {
      ResultRow sig;
      sig.experiment_id = "a5-counterexample";
      sig.statistic_name = "step" + std::to_string(s + 1) + "_sigma";
      sig.value = rep.step_sigmas[s];
      sig.bound = 1e-10;
      sig.pass = rep.step_sigmas[s] <= 1e-10;
      out.rows.push_back(std::move(sig));
    }
    ResultRow dist;
    dist.experiment_id = "a5-counterexample";
    dist.statistic_name = "walk_distance_sq";
    dist.value = rep.walk_distance_sq;
    dist.pass = rep.walk_distance_sq > 0.0;
    out.rows.push_back(std::move(dist));
    return out;
  }

  if (suite != "explicit")
    throw ConfigInvalidError("unknown walk-verify suite '" + suite + "'");

  GroupPtr g = group_from_json(params.at("group"));
  std::vector<Subgroup> ascending;
  const Json& chain_spec = params.at("chain");
  if (chain_spec.is_string() && chain_spec.get<std::string>() == "greedy") {
    ascending = greedy_normal_chain(g, cached_subgroup_lattice(g));
  } else {
    for (const auto& elems : chain_spec) {
      std::vector<Element> e = elems.get<std::vector<Element>>();
      std::sort(e.begin(), e.end());
      ascending.push_back(Subgroup{g, std::move(e)});
    }
  }
  QuotientChain chain = chain_from_ascending_normal(g, ascending);
  WalkInstance w{g, {}};
  for (const auto& step : params.at("steps"))
    w.steps.push_back(measure_from_json(step, g));
  BoundReport rep = strong_walk_bound(w, chain);
  ResultRow row;
  row.experiment_id = "walk-verify";
  row.statistic_name = "walk_distance_sq";
  row.value = rep.lhs;
  row.bound = rep.rhs;
  row.pass = !rep.feasible || rep.lhs <= rep.rhs + tol;
  out.rows.push_back(std::move(row));
  Json levels = Json::array();
  for (std::size_t j = 0; j < rep.level_terms.size(); ++j) {
    Json lvl;
    lvl["term"] = rep.level_terms[j];
    lvl["steps"] = rep.classification[j];
    Json sigmas = Json::object();
    for (const auto& [i, s] : rep.per_step_sigma[j])
      sigmas[std::to_string(i)] = s;
    lvl["sigmas"] = sigmas;
    levels.push_back(lvl);
  }
  out.sidecar_extra["feasible"] = rep.feasible;
  out.sidecar_extra["levels"] = levels;
  return out;
}

inline RunOutput run_sigma_bound(const Json& params, std::uint64_t seed) {
  require_fields(params, {"suite", "instances", "tolerance"}, "sigma-bound");
  const std::string suite = params.at("suite").get<std::string>();
  const std::size_t instances = params.at("instances").get<std::size_t>();
  const double tol = params.value("tolerance", 1e-8);
  std::vector<SigmaBoundRow> rows;
  if (suite == "abelian")
    rows = sigma_bound_abelian_suite(instances, seed, tol);
  else if (suite == "nonabelian")
    rows = sigma_bound_nonabelian_suite(instances, seed, tol);
  else
    throw ConfigInvalidError("unknown sigma-bound suite '" + suite + "'");
  RunOutput out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    ResultRow row;
    row.experiment_id =
        "sigma-" + suite + "-" + std::to_string(i) + "-" + r.group_name;
    row.statistic_name = "second_singular_value";
    row.value = r.sigma;
    row.bound = r.bound;
    row.pass = r.pass;
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline RunOutput run_moment_estimate(const Json& params, std::uint64_t seed,
                                     unsigned threads) {
  require_fields(params, {"cases"}, "moment-estimate");
  RunOutput out;
  for (const Json& c : params.at("cases")) {
    require_fields(c, {"id", "n", "u", "group", "model", "samples"},
                   "moment case");
    const std::size_t n = c.at("n").get<std::size_t>();
    const int u = c.at("u").get<int>();
    const AbelianGroup g = abelian_from_json(c.at("group"));
    const std::size_t samples = c.at("samples").get<std::size_t>();
    BalancedMatrixModel model = model_from_json(c.at("model"), n, n + u);
    MomentEstimate est = moment_estimate(model, g, u, samples, seed, threads);
    ResultRow row;
    row.experiment_id = c.value(
        "id", "moment-" + g.key() + "-u" + std::to_string(u) + "-" +
                  c.at("model").at("family").get<std::string>());
    row.statistic_name = "sur_moment_mean";
    row.value = est.mean;
    row.std_error = est.std_error;
    row.reference_value = est.reference;
    row.pass = std::abs(est.mean - est.reference) <= 3.0 * est.std_error ||
               (est.std_error == 0.0 && est.mean == est.reference);
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline RunOutput run_class_distribution(const Json& params, std::uint64_t seed,
                                        unsigned threads) {
  require_fields(params, {"cases"}, "class-distribution");
  RunOutput out;
  for (const Json& c : params.at("cases")) {
    require_fields(c, {"id", "n", "u", "a", "model", "samples", "reference_tol"},
                   "class-distribution case");
    const std::size_t n = c.at("n").get<std::size_t>();
    const int u = c.at("u").get<int>();
    const std::int64_t a = c.at("a").get<std::int64_t>();
    const std::size_t samples = c.at("samples").get<std::size_t>();
    const double tol = c.value("reference_tol", 1e-9);
    BalancedMatrixModel model = model_from_json(c.at("model"), n, n + u);
    ClassDistribution dist =
        cokernel_class_distribution(model, a, u, samples, seed, threads, tol);
    const std::string id =
        c.value("id", "classdist-a" + std::to_string(a) + "-u" + std::to_string(u));
    double freq_total = 0.0;
    for (const auto& r : dist.rows) {
      freq_total += r.frequency;
      ResultRow row;
      row.experiment_id = id;
      row.statistic_name = "freq[" + r.class_key + "]";
      row.value = r.frequency;
      row.std_error = r.std_error;
      row.reference_value = r.reference;
      // Informational band: only classes with enough expected mass can be
      // meaningfully compared; a 4-sigma band keeps the sweep stable.
      if (r.reference && *r.reference * static_cast<double>(samples) >= 25.0)
        row.pass = std::abs(r.frequency - *r.reference) <=
                   4.0 * r.std_error + 1.0 / static_cast<double>(samples);
      else
        row.pass = true;
      out.rows.push_back(std::move(row));
      if (r.class_key == "1") {
        ResultRow triv;
        triv.experiment_id = id;
        triv.statistic_name = "trivial_class_freq";
        triv.value = r.frequency;
        triv.std_error = r.std_error;
        triv.reference_value = r.reference;
        triv.pass = r.reference &&
                    std::abs(r.frequency - *r.reference) <= 3.0 * r.std_error;
        out.rows.push_back(std::move(triv));
      }
    }
    ResultRow total;
    total.experiment_id = id;
    total.statistic_name = "freq_total";
    total.value = freq_total;
    total.reference_value = 1.0;
    total.pass = std::abs(freq_total - 1.0) < 1e-12;
    out.rows.push_back(std::move(total));
  }
  return out;
}

inline RunOutput run_depth_census(const Json& params) {
  require_fields(params, {"n", "a", "groups", "partition", "deltas"},
                 "depth-census");
  const std::size_t n = params.at("n").get<std::size_t>();
  const std::int64_t a = params.at("a").get<std::int64_t>();
  const Partition p = partition_from_json(params.at("partition"), n);
  RunOutput out;
  for (const Json& gj : params.at("groups")) {
    const AbelianGroup g_ab = abelian_from_json(gj);
    const GroupPtr g = realize(g_ab);
    for (const double delta : params.at("deltas").get<std::vector<double>>()) {
      const auto rows = depth_census(n, a, g, p, delta);
      const std::string id = "census-" + g_ab.key() + "-delta" + trim_key(delta);
      for (const auto& r : rows) {
        ResultRow row;
        row.experiment_id = id;
        row.statistic_name = "count[D=" + std::to_string(r.depth) + "]";
        row.value = static_cast<double>(r.count);
        if (r.depth > 1) row.bound = r.bound;
        row.pass = r.within_bound;
        out.rows.push_back(std::move(row));
      }
    }
  }
  return out;
}

inline RunOutput run_equidistribution(const Json& params) {
  require_fields(params, {"cases"}, "equidistribution");
  RunOutput out;
  int case_index = 0;
  for (const Json& c : params.at("cases")) {
    require_fields(
        c, {"id", "group", "a", "n", "images", "partition", "r", "targets",
            "model"},
        "equidistribution case");
    const AbelianGroup g_ab = abelian_from_json(c.at("group"));
    const GroupPtr g = realize(g_ab);
    const std::size_t n = c.at("n").get<std::size_t>();
    HomMap f{g, c.at("images").get<std::vector<Element>>(),
             c.at("a").get<std::int64_t>()};
    if (f.images.size() != n)
      throw ConfigInvalidError("images must have one entry per column of f");
    f.validate();
    const Partition p = partition_from_json(c.at("partition"), n);
    const std::size_t r = c.at("r").get<std::size_t>();
    const auto targets = c.at("targets").get<std::vector<Element>>();
    const Json& mj = c.at("model");
    require_fields(mj, {"family", "a", "values", "probs", "epsilon"},
                   "equidistribution model");
    if (mj.at("family").get<std::string>() != "iid")
      throw ConfigInvalidError("exact equidistribution supports iid blocks");
    BlockSampler sampler = IidEntriesSampler{
        entry_distribution_from_json(mj.at("values"), mj.at("probs"))};
    const double eps = mj.at("epsilon").get<double>();
    EquidistributionReport rep =
        equidistribution_gap(f, p, sampler, r, targets, eps);
    ResultRow row;
    row.experiment_id =
        c.value("id", "equidist-" + std::to_string(case_index));
    row.statistic_name = "gap";
    row.value = rep.gap;
    row.bound = rep.bound;
    row.pass = rep.within_bound;
    out.rows.push_back(std::move(row));
    ++case_index;
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// config execution
// ---------------------------------------------------------------------------

struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<unsigned> threads_override;
  std::optional<std::string> out_override;
};

/// Executes a config and writes <out>.csv plus a <out>.json provenance
/// sidecar. Returns the spec'd exit code. No output files are produced when
/// the config is invalid.
inline int run_config(const CliOptions& opts, std::ostream& log) {
  Json config;
  std::vector<ResultRow> rows;
  RunOutput output;
  std::string command;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_base;
  try {
    config = load_json_file(opts.config_path);
    require_fields(config,
                   {"command", "parameters", "seed", "threads", "output_path"},
                   "config");
    command = config.at("command").get<std::string>();
    seed = opts.seed_override.value_or(config.value("seed", 0ULL));
    threads = opts.threads_override.value_or(config.value("threads", 1U));
    if (threads == 0) throw ConfigInvalidError("threads must be positive");
    out_base = opts.out_override.value_or(config.value(
        "output_path",
        std::filesystem::path(opts.config_path).stem().string() + "-results"));
    const Json params = config.value("parameters", Json::object());

    if (command == "walk-verify")
      output = detail::run_walk_verify(params, seed, threads);
    else if (command == "sigma-bound")
      output = detail::run_sigma_bound(params, seed);
    else if (command == "moment-estimate")
      output = detail::run_moment_estimate(params, seed, threads);
    else if (command == "class-distribution")
      output = detail::run_class_distribution(params, seed, threads);
    else if (command == "depth-census")
      output = detail::run_depth_census(params);
    else if (command == "equidistribution")
      output = detail::run_equidistribution(params);
    else
      throw ConfigInvalidError("unknown command '" + command + "'");
  } catch (const ConfigInvalidError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigInvalid;
  } catch (const CapExceededError& e) {
    log << "cap exceeded: " << e.what() << "\n";
    return kExitCapExceeded;
  } catch (const IoError& e) {
    log << "io error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const Error& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigInvalid;
  }

  try {
    write_text_file(out_base + ".csv", to_csv(output.rows));
    Json sidecar;
#ifdef GROUPMIX_GIT_HASH
    sidecar["git_hash"] = GROUPMIX_GIT_HASH;
#else
    sidecar["git_hash"] = "unknown";
#endif
    sidecar["command"] = command;
    sidecar["seed"] = seed;
    sidecar["threads"] = threads;
    sidecar["config"] = config;
    sidecar["csv"] = out_base + ".csv";
    sidecar["rows"] = output.rows.size();
    sidecar["all_pass"] = all_pass(output.rows);
    for (auto it = output.sidecar_extra.begin(); it != output.sidecar_extra.end();
         ++it)
      sidecar[it.key()] = it.value();
    write_text_file(out_base + ".json", sidecar.dump(2) + "\n");
  } catch (const IoError& e) {
    log << "io error: " << e.what() << "\n";
    return kExitIoError;
  }

  std::size_t failed = 0;
  for (const ResultRow& r : output.rows)
    if (!r.pass) ++failed;
  log << out_base << ".csv: " << output.rows.size() << " rows, " << failed
      << " failing\n";
  return failed == 0 ? kExitOk : kExitRowFailed;
}

// ---------------------------------------------------------------------------
// builtin experiment manifest
// ---------------------------------------------------------------------------

struct BuiltinExperiment {
  std::string name;
  std::string file;
  std::string description;
};

inline const std::vector<BuiltinExperiment>& builtin_experiments() {
  static const std::vector<BuiltinExperiment> manifest = {
      {"a5-counterexample", "a5-counterexample.json",
       "three-step A5 walk that provably cannot reach 3 -> 4"},
      {"dihedral-golden", "dihedral-golden.json",
       "dihedral rotate/flip walk against sigma^k + |1-2p|^k"},
      {"walk-soundness", "walk-soundness.json",
       "500 randomized quotient-chain bound instances"},
      {"sigma-bound-abelian", "sigma-bound-abelian.json",
       "1000 random measures vs exp(-eps/a^2) on abelian groups"},
      {"sigma-bound-nonabelian", "sigma-bound-nonabelian.json",
       "200 random measures vs exp(-eps/(2|G|^3))"},
      {"moment-universality", "moment-universality.json",
       "surjection moments vs |G|^{-u} for iid and shared-shift models"},
      {"moment-z2-u0-iid", "moment-z2-u0-iid.json",
       "single moment case used by the determinism check"},
      {"class-distribution-a2", "class-distribution-a2.json",
       "mod-2 cokernel class frequencies vs the universal masses"},
      {"depth-census", "depth-census.json",
       "exhaustive depth tallies vs the counting bound"},
      {"equidistribution", "equidistribution.json",
       "exact image distribution gaps vs the walk bound"},
  };
  return manifest;
}

inline std::string config_directory() {
  if (const char* dir = std::getenv("GROUPMIX_CONFIG_DIR")) return dir;
  return "configs";
}

inline int list_builtin_experiments(std::ostream& os) {
  const std::string dir = config_directory();
  for (const BuiltinExperiment& e : builtin_experiments()) {
    const std::string path = dir + "/" + e.file;
    os << e.name << "\t" << path << "\t" << e.description << "\n";
  }
  return kExitOk;
}

}  // namespace groupmix::cli

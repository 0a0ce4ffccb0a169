#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "groupmix/abelian.hpp"
#include "groupmix/balanced.hpp"
#include "groupmix/errors.hpp"
#include "groupmix/smith.hpp"
#include "groupmix/spectral.hpp"
#include "groupmix/walk_bounds.hpp"

namespace groupmix {

// ---------------------------------------------------------------------------
// result rows and CSV output
// ---------------------------------------------------------------------------

struct ResultRow {
  std::string experiment_id;
  std::string statistic_name;
  double value = 0.0;
  std::optional<double> std_error;
  std::optional<double> reference_value;
  std::optional<double> bound;
  bool pass = false;
};

/// Locale-free shortest round-trip formatting; identical output on every
/// thread count is part of the determinism contract.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out =
      "experiment_id,statistic_name,value,stderr,reference_value,bound,pass\n";
  for (const ResultRow& r : rows) {
    out += r.experiment_id;
    out += ',';
    out += r.statistic_name;
    out += ',';
    out += format_double(r.value);
    out += ',';
    if (r.std_error) out += format_double(*r.std_error);
    out += ',';
    if (r.reference_value) out += format_double(*r.reference_value);
    out += ',';
    if (r.bound) out += format_double(*r.bound);
    out += ',';
    out += r.pass ? "true" : "false";
    out += '\n';
  }
  return out;
}

inline bool all_pass(const std::vector<ResultRow>& rows) {
  for (const ResultRow& r : rows)
    if (!r.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------
// deterministic parallel map
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, count) on the given number of threads. Work items
/// write to per-index slots, so scheduling cannot affect results; any
/// aggregation happens afterwards in index order.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// moment estimation
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kMomentStream = 11;
inline constexpr std::uint64_t kClassStream = 12;

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  double reference = 0.0;  // |G|^{-u}
};

/// Sample mean and standard error of #Sur(coker(M) (x) Z/aZ, G) with
/// a = exponent(G); every surjection from the integer cokernel onto G
/// factors through the mod-a reduction, so the mod-a cokernel carries the
/// full count. Moments are accumulated exactly in big integers (surjection
/// counts are heavy-tailed) and converted at the end. Deterministic for a
/// fixed seed regardless of thread count.
inline MomentEstimate moment_estimate(const BalancedMatrixModel& model,
                                      const AbelianGroup& g, int u,
                                      std::size_t samples, std::uint64_t seed,
                                      unsigned threads) {
  model.validate();
  if (model.n_cols != model.n_rows + static_cast<std::size_t>(u))
    throw ConfigInvalidError("moment experiment expects an n x (n+u) model");
  const BigInt exponent = g.exponent();
  const std::int64_t a = exponent.convert_to<std::int64_t>();
  if (model.modulus != 0 && model.modulus % a != 0)
    throw ConfigInvalidError("model modulus must be a multiple of exponent(G)");
  const SurjectionCounter counter(g);

  std::vector<BigInt> values(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    thread_local I64Matrix buf;
    sample_matrix_into(model, seed, kMomentStream, i, buf);
    values[i] = counter.count(cokernel_mod_fast(buf, a));
  });

  BigInt sum = 0, sum_sq = 0;
  for (const BigInt& x : values) {
    sum += x;
    sum_sq += x * x;
  }
  MomentEstimate est;
  est.samples = samples;
  const BigInt n(samples);
  est.mean = BigRational(sum, n).convert_to<double>();
  if (samples > 1) {
    BigRational var(n * sum_sq - sum * sum, n * n * (n - 1));
    est.std_error = std::sqrt(std::max(0.0, var.convert_to<double>()));
  }
  est.reference = std::pow(g.order().convert_to<double>(), -u);
  return est;
}

/// Exact finite-n moment for the uniform-entry model: with entries uniform
/// on Z/aZ every surjection f sends the matrix to a uniform element of
/// G^{n+u}, so E[#Sur] = #Sur((Z/a)^n, G) / |G|^{n+u}, evaluated exactly.
inline double exact_uniform_moment(std::size_t n, const AbelianGroup& g, int u) {
  const SurjectionCounter counter(g);
  BigRational total = 0;
  const BigInt g_order = g.order();
  const BigInt denom =
      boost::multiprecision::pow(g_order, static_cast<unsigned>(n) + u);
  for (const auto& [mu, h] : counter.terms()) {
    // #Hom((Z/a)^n, H) = |H|^n when exponent(H) divides a.
    const BigInt hom = boost::multiprecision::pow(h.order(), static_cast<unsigned>(n));
    total += BigRational(mu * hom, denom);
  }
  return total.convert_to<double>();
}

// ---------------------------------------------------------------------------
// cokernel class distribution
// ---------------------------------------------------------------------------

struct ClassDistributionRow {
  std::string class_key;
  std::size_t count = 0;
  double frequency = 0.0;
  double std_error = 0.0;
  std::optional<double> reference;  // lambda_u(U_{a,H})
};

struct ClassDistribution {
  std::size_t samples = 0;
  std::vector<ClassDistributionRow> rows;  // sorted by class key
};

/// Tabulates isomorphism classes of coker(M) (x) Z/aZ over the sample run,
/// with the universal-distribution reference mass for each observed class.
inline ClassDistribution cokernel_class_distribution(
    const BalancedMatrixModel& model, std::int64_t a, int u,
    std::size_t samples, std::uint64_t seed, unsigned threads,
    double reference_tol = 1e-9) {
  model.validate();
  if (a < 2) throw ConfigInvalidError("class distribution needs a >= 2");
  if (model.modulus != 0 && model.modulus % a != 0)
    throw ConfigInvalidError("model modulus must be a multiple of a");
  std::vector<std::string> keys(samples);
  std::vector<AbelianGroup> reps(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    thread_local I64Matrix buf;
    sample_matrix_into(model, seed, kClassStream, i, buf);
    AbelianGroup cls = tensor_mod(cokernel_mod_fast(buf, a), a);
    keys[i] = cls.key();
    reps[i] = std::move(cls);
  });
  std::map<std::string, std::pair<std::size_t, AbelianGroup>> tally;
  for (std::size_t i = 0; i < samples; ++i) {
    auto& slot = tally[keys[i]];
    slot.first += 1;
    slot.second = reps[i];
  }
  ClassDistribution out;
  out.samples = samples;
  for (auto& [key, slot] : tally) {
    ClassDistributionRow row;
    row.class_key = key;
    row.count = slot.first;
    row.frequency = static_cast<double>(slot.first) / static_cast<double>(samples);
    row.std_error = std::sqrt(row.frequency * (1.0 - row.frequency) /
                              static_cast<double>(samples));
    row.reference = lambda_u_tensor_mass(a, slot.second, u, reference_tol);
    out.rows.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// singular-value bound suites
// ---------------------------------------------------------------------------

struct SigmaBoundRow {
  std::string group_name;
  double epsilon = 0.0;
  double sigma = 0.0;
  double bound = 0.0;
  bool pass = false;
};

namespace detail {

struct SigmaSuiteGroup {
  std::string name;
  GroupPtr group;
  SubgroupLattice lattice;
  std::size_t exponent;
};

inline std::vector<SigmaSuiteGroup> abelian_sigma_pool() {
  std::vector<std::pair<std::string, GroupPtr>> defs;
  for (std::size_t n = 2; n <= 12; ++n)
    defs.emplace_back("Z" + std::to_string(n), FiniteGroup::cyclic(n));
  auto prod = [](std::size_t x, std::size_t y) {
    return FiniteGroup::product(FiniteGroup::cyclic(x), FiniteGroup::cyclic(y));
  };
  defs.emplace_back("Z2xZ2", prod(2, 2));
  defs.emplace_back("Z2xZ4", prod(2, 4));
  defs.emplace_back("Z2xZ6", prod(2, 6));
  defs.emplace_back("Z2xZ12", prod(2, 12));
  defs.emplace_back("Z3xZ3", prod(3, 3));
  defs.emplace_back("Z3xZ6", prod(3, 6));
  defs.emplace_back("Z4xZ4", prod(4, 4));
  defs.emplace_back("Z6xZ6", prod(6, 6));
  defs.emplace_back("Z3xZ12", prod(3, 12));
  std::vector<SigmaSuiteGroup> out;
  for (auto& [name, g] : defs)
    out.push_back(SigmaSuiteGroup{name, g, subgroup_lattice(g), g->exponent()});
  return out;
}

inline std::vector<SigmaSuiteGroup> nonabelian_sigma_pool() {
  std::vector<std::pair<std::string, GroupPtr>> defs;
  for (std::size_t n = 3; n <= 12; ++n)
    defs.emplace_back("D" + std::to_string(2 * n), FiniteGroup::dihedral(n));
  defs.emplace_back("Q8", FiniteGroup::quaternion());
  std::vector<SigmaSuiteGroup> out;
  for (auto& [name, g] : defs)
    out.push_back(SigmaSuiteGroup{name, g, subgroup_lattice(g), g->exponent()});
  return out;
}

inline SignedMeasure random_measure(const GroupPtr& g, Rng& rng) {
  SignedMeasure mu{g, std::vector<double>(g->order(), 0.0)};
  double total = 0.0;
  // Random support with skewed weights; resample until nonempty.
  while (total == 0.0) {
    for (double& w : mu.weights)
      if (rng.below(2) == 0) {
        const double x = rng.u01();
        w = 0.05 + x * x;
        total += w;
      } else {
        w = 0.0;
      }
  }
  for (double& w : mu.weights) w /= total;
  return mu;
}

}  // namespace detail

/// sigma <= exp(-eps/a^2) on abelian groups of exponent a, with eps measured
/// exhaustively and sigma taken on all of L^2(G).
inline std::vector<SigmaBoundRow> sigma_bound_abelian_suite(
    std::size_t instances, std::uint64_t seed, double tolerance = 1e-8) {
  static const auto pool = detail::abelian_sigma_pool();
  std::vector<SigmaBoundRow> rows(instances);
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng(seed, 201, i);
    const auto& sg = pool[rng.below(pool.size())];
    SignedMeasure mu = detail::random_measure(sg.group, rng);
    SigmaBoundRow row;
    row.group_name = sg.name;
    row.epsilon = epsilon_balanced(mu, sg.lattice);
    row.sigma = second_of(singular_values(convolution_matrix(mu)));
    row.bound = sigma_bound_abelian(row.epsilon, sg.exponent);
    row.pass = row.sigma <= row.bound + tolerance;
    rows[i] = std::move(row);
  }
  return rows;
}

/// sigma <= exp(-eps/(2|G|^3)) on nonabelian groups of order <= 24.
inline std::vector<SigmaBoundRow> sigma_bound_nonabelian_suite(
    std::size_t instances, std::uint64_t seed, double tolerance = 1e-8) {
  static const auto pool = detail::nonabelian_sigma_pool();
  std::vector<SigmaBoundRow> rows(instances);
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng(seed, 202, i);
    const auto& sg = pool[rng.below(pool.size())];
    SignedMeasure mu = detail::random_measure(sg.group, rng);
    SigmaBoundRow row;
    row.group_name = sg.name;
    row.epsilon = epsilon_balanced(mu, sg.lattice);
    row.sigma = second_of(singular_values(convolution_matrix(mu)));
    row.bound = sigma_bound_general(row.epsilon, sg.group->order());
    row.pass = row.sigma <= row.bound + tolerance;
    rows[i] = std::move(row);
  }
  return rows;
}

}  // namespace groupmix

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "groupmix/errors.hpp"
#include "groupmix/rng.hpp"
#include "groupmix/smith.hpp"

namespace groupmix {

/// Partition of {0, ..., n-1} into disjoint nonempty blocks. |P| is the
/// largest block size, #P the block count.
struct Partition {
  std::size_t ground_size = 0;
  std::vector<std::vector<std::size_t>> blocks;

  std::size_t max_block() const {
    std::size_t m = 0;
    for (const auto& b : blocks) m = std::max(m, b.size());
    return m;
  }
  std::size_t count() const { return blocks.size(); }

  void validate() const {
    std::vector<bool> seen(ground_size, false);
    std::size_t covered = 0;
    for (const auto& b : blocks) {
      if (b.empty()) throw ConfigInvalidError("partition block is empty");
      for (std::size_t x : b) {
        if (x >= ground_size || seen[x])
          throw ConfigInvalidError("partition is not a disjoint cover");
        seen[x] = true;
        ++covered;
      }
    }
    if (covered != ground_size)
      throw ConfigInvalidError("partition does not cover the ground set");
  }

  static Partition singletons(std::size_t n) {
    Partition p;
    p.ground_size = n;
    for (std::size_t i = 0; i < n; ++i) p.blocks.push_back({i});
    return p;
  }

  static Partition consecutive(std::size_t n, std::size_t block_size) {
    if (block_size == 0) throw ConfigInvalidError("block size must be positive");
    Partition p;
    p.ground_size = n;
    for (std::size_t start = 0; start < n; start += block_size) {
      std::vector<std::size_t> b;
      for (std::size_t i = start; i < std::min(n, start + block_size); ++i)
        b.push_back(i);
      p.blocks.push_back(std::move(b));
    }
    return p;
  }
};

// ---------------------------------------------------------------------------
// block samplers
// ---------------------------------------------------------------------------

/// Finite entry distribution: value v[i] with probability prob[i].
struct EntryDistribution {
  std::vector<std::int64_t> values;
  std::vector<double> probs;

  void validate() const {
    if (values.empty() || values.size() != probs.size())
      throw ConfigInvalidError("entry distribution needs matched value/prob lists");
    double s = 0;
    for (double p : probs) {
      if (p < 0) throw ConfigInvalidError("negative entry probability");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-9)
      throw ConfigInvalidError("entry probabilities must sum to 1");
  }

  std::vector<double> cumulative() const {
    std::vector<double> c(probs.size());
    double s = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      s += probs[i];
      c[i] = s;
    }
    return c;
  }
};

/// Independent entries, each from the same finite distribution.
struct IidEntriesSampler {
  EntryDistribution entry;
};

/// Independent entries plus one uniform offset (mod a) shared by the whole
/// block: entries within a block are correlated, blocks stay independent.
/// Still eps-balanced with the iid model's eps, since conditioning on the
/// shift only translates cosets.
struct SharedShiftSampler {
  EntryDistribution entry;
};

/// One random row copied to every row of the block, plus independent noise
/// on each entry. Balanced with the noise distribution's eps: conditioned on
/// the duplicated row the block is an independent-entry matrix shifted by a
/// constant.
struct RowDuplicateSampler {
  EntryDistribution row_entry;
  EntryDistribution noise;
};

using BlockSampler =
    std::variant<IidEntriesSampler, SharedShiftSampler, RowDuplicateSampler>;

inline std::string sampler_family(const BlockSampler& s) {
  if (std::holds_alternative<IidEntriesSampler>(s)) return "iid";
  if (std::holds_alternative<SharedShiftSampler>(s)) return "shared-shift";
  return "row-duplicate";
}

namespace detail {

inline std::int64_t reduce_mod(std::int64_t v, std::int64_t a) {
  if (a == 0) return v;  // integer model, no reduction
  v %= a;
  return v < 0 ? v + a : v;
}

}  // namespace detail

/// Draws one block (rows x cols) into out[r*stride + c]; entries reduced
/// mod a when a > 0.
inline void sample_block(const BlockSampler& sampler, std::size_t rows,
                         std::size_t cols, std::int64_t a, Rng& rng,
                         std::int64_t* out, std::size_t stride) {
  auto draw = [&rng](const EntryDistribution& d,
                     const std::vector<double>& cum) {
    return d.values[rng.pick_cumulative(cum)];
  };
  if (const auto* iid = std::get_if<IidEntriesSampler>(&sampler)) {
    const auto cum = iid->entry.cumulative();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        out[r * stride + c] = detail::reduce_mod(draw(iid->entry, cum), a);
  } else if (const auto* ss = std::get_if<SharedShiftSampler>(&sampler)) {
    if (a < 1)
      throw ConfigInvalidError("shared-shift sampler needs a positive modulus");
    const auto cum = ss->entry.cumulative();
    const std::int64_t shift = static_cast<std::int64_t>(rng.below(a));
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        out[r * stride + c] = detail::reduce_mod(draw(ss->entry, cum) + shift, a);
  } else {
    const auto* rd = std::get_if<RowDuplicateSampler>(&sampler);
    const auto row_cum = rd->row_entry.cumulative();
    const auto noise_cum = rd->noise.cumulative();
    std::vector<std::int64_t> base(cols);
    for (std::size_t c = 0; c < cols; ++c) base[c] = draw(rd->row_entry, row_cum);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        out[r * stride + c] =
            detail::reduce_mod(base[c] + draw(rd->noise, noise_cum), a);
  }
}

/// Visits every outcome of the block distribution with its probability:
/// callback(entries row-major, probability). Exhaustive; callers cap the
/// outcome count.
inline void enumerate_block(const BlockSampler& sampler, std::size_t rows,
                            std::size_t cols, std::int64_t a,
                            const std::function<void(const std::vector<std::int64_t>&,
                                                     double)>& fn,
                            std::size_t outcome_cap = 10'000'000) {
  const std::size_t cells = rows * cols;
  auto count_outcomes = [&]() -> double {
    if (const auto* iid = std::get_if<IidEntriesSampler>(&sampler))
      return std::pow(static_cast<double>(iid->entry.values.size()),
                      static_cast<double>(cells));
    if (const auto* ss = std::get_if<SharedShiftSampler>(&sampler))
      return static_cast<double>(a) *
             std::pow(static_cast<double>(ss->entry.values.size()),
                      static_cast<double>(cells));
    const auto* rd = std::get_if<RowDuplicateSampler>(&sampler);
    return std::pow(static_cast<double>(rd->row_entry.values.size()),
                    static_cast<double>(cols)) *
           std::pow(static_cast<double>(rd->noise.values.size()),
                    static_cast<double>(cells));
  };
  if (count_outcomes() > static_cast<double>(outcome_cap))
    throw CapExceededError("block distribution too large to enumerate");

  std::vector<std::int64_t> entries(cells, 0);
  // Generic odometer over independent draws, assembled per sampler family.
  if (const auto* iid = std::get_if<IidEntriesSampler>(&sampler)) {
    const auto& d = iid->entry;
    std::vector<std::size_t> idx(cells, 0);
    for (;;) {
      double p = 1.0;
      for (std::size_t i = 0; i < cells; ++i) {
        entries[i] = detail::reduce_mod(d.values[idx[i]], a);
        p *= d.probs[idx[i]];
      }
      fn(entries, p);
      std::size_t k = 0;
      while (k < cells && ++idx[k] == d.values.size()) idx[k++] = 0;
      if (k == cells) break;
    }
  } else if (const auto* ss = std::get_if<SharedShiftSampler>(&sampler)) {
    const auto& d = ss->entry;
    std::vector<std::size_t> idx(cells, 0);
    for (;;) {
      for (std::int64_t shift = 0; shift < a; ++shift) {
        double p = 1.0 / static_cast<double>(a);
        for (std::size_t i = 0; i < cells; ++i) {
          entries[i] = detail::reduce_mod(d.values[idx[i]] + shift, a);
          p *= d.probs[idx[i]];
        }
        fn(entries, p);
      }
      std::size_t k = 0;
      while (k < cells && ++idx[k] == d.values.size()) idx[k++] = 0;
      if (k == cells) break;
    }
  } else {
    const auto* rd = std::get_if<RowDuplicateSampler>(&sampler);
    std::vector<std::size_t> row_idx(cols, 0);
    for (;;) {
      std::vector<std::size_t> noise_idx(cells, 0);
      for (;;) {
        double p = 1.0;
        for (std::size_t c = 0; c < cols; ++c) p *= rd->row_entry.probs[row_idx[c]];
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t i = r * cols + c;
            entries[i] = detail::reduce_mod(
                rd->row_entry.values[row_idx[c]] + rd->noise.values[noise_idx[i]],
                a);
            p *= rd->noise.probs[noise_idx[i]];
          }
        fn(entries, p);
        std::size_t k = 0;
        while (k < cells && ++noise_idx[k] == rd->noise.values.size())
          noise_idx[k++] = 0;
        if (k == cells) break;
      }
      std::size_t k = 0;
      while (k < cols && ++row_idx[k] == rd->row_entry.values.size())
        row_idx[k++] = 0;
      if (k == cols) break;
    }
  }
}

// ---------------------------------------------------------------------------
// the matrix model
// ---------------------------------------------------------------------------

/// Generative model behind the (w, h, eps)-balanced definition: a row
/// partition P, a column partition Q, and an independent sampler per block
/// pair. Declared w bounds |Q|, declared h bounds |P|.
struct BalancedMatrixModel {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::int64_t modulus = 0;  // 0 means integer entries
  Partition row_partition;
  Partition col_partition;
  BlockSampler block_sampler;  // shared prototype; blocks draw independently
  double declared_epsilon = 0.0;
  std::size_t declared_w = 1;
  std::size_t declared_h = 1;

  void validate() const {
    row_partition.validate();
    col_partition.validate();
    if (row_partition.ground_size != n_rows ||
        col_partition.ground_size != n_cols)
      throw ConfigInvalidError("partition sizes do not match the matrix shape");
    if (col_partition.max_block() > declared_w ||
        row_partition.max_block() > declared_h)
      throw ConfigInvalidError("declared (w, h) below actual block sizes");
  }

  static BalancedMatrixModel iid(std::size_t rows, std::size_t cols,
                                 std::int64_t a, EntryDistribution entry,
                                 double eps) {
    BalancedMatrixModel m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.modulus = a;
    m.row_partition = Partition::singletons(rows);
    m.col_partition = Partition::singletons(cols);
    m.block_sampler = IidEntriesSampler{std::move(entry)};
    m.declared_epsilon = eps;
    m.declared_w = 1;
    m.declared_h = 1;
    return m;
  }

  static BalancedMatrixModel shared_shift(std::size_t rows, std::size_t cols,
                                          std::int64_t a, EntryDistribution entry,
                                          double eps, std::size_t w,
                                          std::size_t h) {
    BalancedMatrixModel m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.modulus = a;
    m.row_partition = Partition::consecutive(rows, h);
    m.col_partition = Partition::consecutive(cols, w);
    m.block_sampler = SharedShiftSampler{std::move(entry)};
    m.declared_epsilon = eps;
    m.declared_w = w;
    m.declared_h = h;
    return m;
  }

  static BalancedMatrixModel row_duplicate(std::size_t rows, std::size_t cols,
                                           std::int64_t a,
                                           EntryDistribution row_entry,
                                           EntryDistribution noise, double eps,
                                           std::size_t w, std::size_t h) {
    BalancedMatrixModel m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.modulus = a;
    m.row_partition = Partition::consecutive(rows, h);
    m.col_partition = Partition::consecutive(cols, w);
    m.block_sampler = RowDuplicateSampler{std::move(row_entry), std::move(noise)};
    m.declared_epsilon = eps;
    m.declared_w = w;
    m.declared_h = h;
    return m;
  }
};

/// Draws the whole matrix; block (i, j) uses its own counter-derived stream,
/// so the result is a pure function of (seed, stream, sample_index).
inline void sample_matrix_into(const BalancedMatrixModel& model,
                               std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t sample_index, I64Matrix& out) {
  out.rows = model.n_rows;
  out.cols = model.n_cols;
  out.entries.assign(model.n_rows * model.n_cols, 0);
  std::vector<std::int64_t> block_buf;
  std::uint64_t block_id = 0;
  for (const auto& rows : model.row_partition.blocks) {
    for (const auto& cols : model.col_partition.blocks) {
      Rng rng(seed, stream ^ (0x9E3779B97F4A7C15ULL * (block_id + 1)),
              sample_index);
      block_buf.assign(rows.size() * cols.size(), 0);
      sample_block(model.block_sampler, rows.size(), cols.size(), model.modulus,
                   rng, block_buf.data(), cols.size());
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
          out.entries[rows[r] * model.n_cols + cols[c]] =
              block_buf[r * cols.size() + c];
      ++block_id;
    }
  }
}

inline IntMatrix sample_matrix(const BalancedMatrixModel& model,
                               std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t sample_index) {
  I64Matrix m;
  sample_matrix_into(model, seed, stream, sample_index, m);
  IntMatrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.entries.size(); ++i) out.entries[i] = m.entries[i];
  return out;
}

// ---------------------------------------------------------------------------
// balance verification
// ---------------------------------------------------------------------------

struct BalanceReport {
  bool ok = false;
  double measured_epsilon = 0.0;
  bool exhaustive = false;  // Monte-Carlo mode can only falsify, not certify
  std::string detail;
};

namespace detail {

/// Max coset mass over index-p subgroups of (Z/a)^m for the given outcome
/// distribution. Index-p subgroups are kernels of nonzero characters
/// x -> sum chi_i x_i mod p, enumerated up to scalar.
inline double max_index_p_coset_mass(
    const std::vector<std::pair<std::vector<std::int64_t>, double>>& outcomes,
    std::size_t m, std::int64_t p) {
  std::vector<std::int64_t> chi(m, 0);
  double worst = 0.0;
  // First nonzero coordinate fixed to 1 kills the scalar redundancy.
  for (std::size_t lead = 0; lead < m; ++lead) {
    std::fill(chi.begin(), chi.end(), 0);
    chi[lead] = 1;
    for (;;) {
      std::vector<double> mass(static_cast<std::size_t>(p), 0.0);
      for (const auto& [entries, prob] : outcomes) {
        std::int64_t dot = 0;
        for (std::size_t i = lead; i < m; ++i) dot += chi[i] * entries[i];
        mass[static_cast<std::size_t>(((dot % p) + p) % p)] += prob;
      }
      for (double x : mass) worst = std::max(worst, x);
      // Odometer over coordinates past the leading 1.
      std::size_t k = lead + 1;
      while (k < m && ++chi[k] == p) chi[k++] = 0;
      if (k == m) break;
    }
  }
  return worst;
}

}  // namespace detail

/// Checks the declared eps for one block shape. Exhaustive mode enumerates
/// the block distribution and all maximal (index-p) subgroups of the block
/// group (Z/a)^{rows*cols}; coset mass is monotone under subgroup inclusion,
/// so maximal subgroups witness the worst coset. Monte-Carlo mode estimates
/// masses for sampled characters only: it can reject but not certify.
inline BalanceReport verify_block_balanced(const BlockSampler& sampler,
                                           std::size_t rows, std::size_t cols,
                                           std::int64_t a, double epsilon,
                                           bool exhaustive = true,
                                           std::size_t mc_samples = 20000,
                                           std::uint64_t seed = 1) {
  if (a < 2) throw ConfigInvalidError("balance check needs modulus >= 2");
  const std::size_t m = rows * cols;
  BalanceReport rep;
  if (exhaustive) {
    double group_size = std::pow(static_cast<double>(a), static_cast<double>(m));
    if (group_size > 4096.0)
      throw CapExceededError("block group too large for exhaustive check");
    std::vector<std::pair<std::vector<std::int64_t>, double>> outcomes;
    enumerate_block(sampler, rows, cols, a,
                    [&outcomes](const std::vector<std::int64_t>& e, double p) {
                      outcomes.emplace_back(e, p);
                    });
    double worst = 0.0;
    for (const auto& [p, e] : factorize(BigInt(a))) {
      (void)e;
      worst = std::max(worst, detail::max_index_p_coset_mass(
                                  outcomes, m, p.convert_to<std::int64_t>()));
    }
    rep.measured_epsilon = 1.0 - worst;
    rep.exhaustive = true;
    rep.ok = rep.measured_epsilon >= epsilon - 1e-12;
    return rep;
  }
  // Monte-Carlo: sample blocks, estimate coset masses for random characters.
  std::vector<std::vector<std::int64_t>> draws(mc_samples);
  std::vector<std::int64_t> buf(m);
  for (std::size_t s = 0; s < mc_samples; ++s) {
    Rng rng(seed, 777, s);
    sample_block(sampler, rows, cols, a, rng, buf.data(), cols);
    draws[s] = buf;
  }
  double worst = 0.0;
  Rng chi_rng(seed, 778, 0);
  for (const auto& [pb, e] : factorize(BigInt(a))) {
    (void)e;
    const std::int64_t p = pb.convert_to<std::int64_t>();
    const std::size_t tries = std::min<std::size_t>(200, m * 8);
    for (std::size_t t = 0; t < tries; ++t) {
      std::vector<std::int64_t> chi(m, 0);
      bool nonzero = false;
      for (std::size_t i = 0; i < m; ++i) {
        chi[i] = static_cast<std::int64_t>(chi_rng.below(p));
        nonzero = nonzero || chi[i] != 0;
      }
      if (!nonzero) chi[t % m] = 1;
      std::vector<double> mass(static_cast<std::size_t>(p), 0.0);
      for (const auto& d : draws) {
        std::int64_t dot = 0;
        for (std::size_t i = 0; i < m; ++i) dot += chi[i] * d[i];
        mass[static_cast<std::size_t>(((dot % p) + p) % p)] +=
            1.0 / static_cast<double>(mc_samples);
      }
      for (double x : mass) worst = std::max(worst, x);
    }
  }
  rep.measured_epsilon = 1.0 - worst;
  rep.exhaustive = false;
  rep.ok = rep.measured_epsilon >= epsilon - 3.0 / std::sqrt(static_cast<double>(mc_samples));
  rep.detail = "monte-carlo estimate; rejection-only soundness";
  return rep;
}

}  // namespace groupmix

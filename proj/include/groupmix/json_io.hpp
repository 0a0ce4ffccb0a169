#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "groupmix/abelian.hpp"
#include "groupmix/balanced.hpp"
#include "groupmix/codes.hpp"
#include "groupmix/errors.hpp"
#include "groupmix/group.hpp"
#include "groupmix/int_matrix.hpp"
#include "groupmix/measure.hpp"

namespace groupmix {

using Json = nlohmann::json;

/// Strict field check: configs with unknown fields are rejected rather than
/// silently ignored.
inline void require_fields(const Json& obj, const std::vector<std::string>& allowed,
                           const std::string& context) {
  if (!obj.is_object())
    throw ConfigInvalidError(context + ": expected a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const std::string& f : allowed)
      if (it.key() == f) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigInvalidError(context + ": unknown field '" + it.key() + "'");
  }
}

// ---------------------------------------------------------------------------
// groups
// ---------------------------------------------------------------------------

inline Json group_to_json(const FiniteGroup& g) {
  Json j;
  j["order"] = g.order();
  j["table"] = g.table();
  if (g.has_labels()) j["labels"] = g.labels();
  return j;
}

/// Group specs accepted by configs: builtin constructors, direct products,
/// or a raw Cayley table {order, table (row-major), labels}.
inline GroupPtr group_from_json(const Json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "quaternion") return FiniteGroup::quaternion();
    if (s == "a5") return alternating_group_5().group;
    if (s.rfind("cyclic:", 0) == 0)
      return FiniteGroup::cyclic(std::stoul(s.substr(7)));
    if (s.rfind("dihedral:", 0) == 0)
      return FiniteGroup::dihedral(std::stoul(s.substr(9)));
    throw ConfigInvalidError("unknown group name '" + s + "'");
  }
  if (j.is_array()) {  // invariant factors of an abelian group
    std::vector<BigInt> factors;
    for (const auto& x : j) factors.emplace_back(x.get<long long>());
    return realize(AbelianGroup::canonical(0, std::move(factors)));
  }
  require_fields(j, {"kind", "n", "factors", "order", "table", "labels"}, "group");
  const std::string kind = j.value("kind", std::string("table"));
  if (kind == "cyclic") return FiniteGroup::cyclic(j.at("n").get<std::size_t>());
  if (kind == "dihedral") return FiniteGroup::dihedral(j.at("n").get<std::size_t>());
  if (kind == "quaternion") return FiniteGroup::quaternion();
  if (kind == "a5") return alternating_group_5().group;
  if (kind == "product") {
    GroupPtr out = FiniteGroup::trivial();
    for (const auto& f : j.at("factors")) out = FiniteGroup::product(out, group_from_json(f));
    return out;
  }
  if (kind == "table") {
    const std::size_t order = j.at("order").get<std::size_t>();
    const auto flat = j.at("table").get<std::vector<int>>();
    if (flat.size() != order * order)
      throw ConfigInvalidError("table length must be order^2 (row-major)");
    std::vector<std::vector<int>> rows(order, std::vector<int>(order));
    for (std::size_t r = 0; r < order; ++r)
      for (std::size_t c = 0; c < order; ++c) rows[r][c] = flat[r * order + c];
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return FiniteGroup::from_cayley_table(rows, std::move(labels));
  }
  throw ConfigInvalidError("unknown group kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// measures
// ---------------------------------------------------------------------------

inline Json measure_to_json(const SignedMeasure& mu, const std::string& group_ref) {
  Json j;
  j["group_ref"] = group_ref;
  j["weights"] = mu.weights;
  return j;
}

/// {group_ref?, weights} or {uniform_on: [elements]} or {dirac: g}.
inline SignedMeasure measure_from_json(const Json& j, const GroupPtr& g) {
  require_fields(j, {"group_ref", "weights", "uniform_on", "dirac"}, "measure");
  if (j.contains("weights")) {
    auto w = j.at("weights").get<std::vector<double>>();
    if (w.size() != g->order())
      throw ConfigInvalidError("measure weight count does not match group order");
    return SignedMeasure{g, std::move(w)};
  }
  if (j.contains("uniform_on")) {
    auto elems = j.at("uniform_on").get<std::vector<Element>>();
    for (Element e : elems)
      if (e >= g->order()) throw ConfigInvalidError("measure support out of range");
    return uniform_on(g, elems);
  }
  if (j.contains("dirac")) {
    const Element e = j.at("dirac").get<Element>();
    if (e >= g->order()) throw ConfigInvalidError("dirac point out of range");
    return dirac(g, e);
  }
  throw ConfigInvalidError("measure needs weights, uniform_on, or dirac");
}

// ---------------------------------------------------------------------------
// abelian groups, matrices, lattices
// ---------------------------------------------------------------------------

inline Json abelian_to_json(const AbelianGroup& g) {
  Json j;
  j["free_rank"] = g.free_rank;
  std::vector<std::string> factors;
  for (const BigInt& d : g.invariant_factors) factors.push_back(d.str());
  j["invariant_factors"] = factors;
  return j;
}

inline AbelianGroup abelian_from_json(const Json& j) {
  if (j.is_array()) {
    std::vector<BigInt> factors;
    for (const auto& x : j) factors.emplace_back(x.get<long long>());
    return AbelianGroup::canonical(0, std::move(factors));
  }
  require_fields(j, {"free_rank", "invariant_factors"}, "abelian group");
  std::vector<BigInt> factors;
  for (const auto& x : j.at("invariant_factors")) {
    if (x.is_string())
      factors.emplace_back(x.get<std::string>());
    else
      factors.emplace_back(x.get<long long>());
  }
  return AbelianGroup::canonical(j.value("free_rank", 0), std::move(factors));
}

inline Json matrix_to_json(const IntMatrix& m) {
  Json j;
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  std::vector<std::string> entries;
  entries.reserve(m.entries.size());
  for (const BigInt& e : m.entries) entries.push_back(e.str());
  j["entries"] = entries;
  return j;
}

inline IntMatrix matrix_from_json(const Json& j) {
  require_fields(j, {"rows", "cols", "entries"}, "matrix");
  IntMatrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto& entries = j.at("entries");
  if (entries.size() != m.entries.size())
    throw ConfigInvalidError("matrix entry count mismatch");
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.is_string())
      m.entries[i] = BigInt(e.get<std::string>());
    else
      m.entries[i] = BigInt(e.get<long long>());
  }
  return m;
}

inline Json lattice_to_json(const SubgroupLattice& lat) {
  Json subs = Json::array();
  for (const Subgroup& h : lat.subgroups) subs.push_back(h.elements);
  Json j;
  j["table_hash"] = lat.group->table_hash();
  j["subgroups"] = subs;
  return j;
}

inline SubgroupLattice lattice_from_json(const Json& j, const GroupPtr& g) {
  require_fields(j, {"table_hash", "subgroups"}, "lattice");
  if (j.at("table_hash").get<std::uint64_t>() != g->table_hash())
    throw ConfigInvalidError("cached lattice belongs to a different group");
  SubgroupLattice lat;
  lat.group = g;
  for (const auto& elems : j.at("subgroups"))
    lat.subgroups.push_back(Subgroup{g, elems.get<std::vector<Element>>()});
  const std::size_t m = lat.subgroups.size();
  lat.leq.assign(m, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k)
      lat.leq[i][k] = std::includes(lat.subgroups[k].elements.begin(),
                                    lat.subgroups[k].elements.end(),
                                    lat.subgroups[i].elements.begin(),
                                    lat.subgroups[i].elements.end());
  return lat;
}

// ---------------------------------------------------------------------------
// models, partitions, hom maps
// ---------------------------------------------------------------------------

inline EntryDistribution entry_distribution_from_json(const Json& values,
                                                      const Json& probs) {
  EntryDistribution d;
  d.values = values.get<std::vector<std::int64_t>>();
  d.probs = probs.get<std::vector<double>>();
  d.validate();
  return d;
}

/// {family: iid|shared-shift|row-duplicate, a, values, probs,
///  [noise_values, noise_probs], [w, h], epsilon}
inline BalancedMatrixModel model_from_json(const Json& j, std::size_t rows,
                                           std::size_t cols) {
  require_fields(j,
                 {"family", "a", "values", "probs", "noise_values",
                  "noise_probs", "w", "h", "epsilon"},
                 "model");
  const std::string family = j.at("family").get<std::string>();
  const std::int64_t a = j.at("a").get<std::int64_t>();
  const double eps = j.at("epsilon").get<double>();
  if (family == "iid")
    return BalancedMatrixModel::iid(
        rows, cols, a,
        entry_distribution_from_json(j.at("values"), j.at("probs")), eps);
  const std::size_t w = j.at("w").get<std::size_t>();
  const std::size_t h = j.at("h").get<std::size_t>();
  if (family == "shared-shift")
    return BalancedMatrixModel::shared_shift(
        rows, cols, a,
        entry_distribution_from_json(j.at("values"), j.at("probs")), eps, w, h);
  if (family == "row-duplicate")
    return BalancedMatrixModel::row_duplicate(
        rows, cols, a,
        entry_distribution_from_json(j.at("values"), j.at("probs")),
        entry_distribution_from_json(j.at("noise_values"), j.at("noise_probs")),
        eps, w, h);
  throw ConfigInvalidError("unknown model family '" + family + "'");
}

inline Partition partition_from_json(const Json& j, std::size_t n) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "singletons") return Partition::singletons(n);
    if (s.rfind("consecutive:", 0) == 0)
      return Partition::consecutive(n, std::stoul(s.substr(12)));
    throw ConfigInvalidError("unknown partition shorthand '" + s + "'");
  }
  Partition p;
  p.ground_size = n;
  p.blocks = j.get<std::vector<std::vector<std::size_t>>>();
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// files
// ---------------------------------------------------------------------------

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigInvalidError("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace groupmix

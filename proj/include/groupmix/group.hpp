#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "groupmix/errors.hpp"

namespace groupmix {

class FiniteGroup;
using GroupPtr = std::shared_ptr<const FiniteGroup>;
using Element = std::uint16_t;

/// A finite group as a validated Cayley table. Immutable after construction;
/// the identity is always element 0 (constructors relabel to enforce this).
class FiniteGroup {
 public:
  static constexpr std::size_t kMaxOrder = 4096;
  // Exhaustive axiom validation is cubic; above this order we trust
  // construction-by-recipe (direct products of validated groups).
  static constexpr std::size_t kValidateOrderLimit = 256;

  std::size_t order() const { return order_; }
  Element identity() const { return 0; }
  Element mul(Element a, Element b) const { return table_[a * order_ + b]; }
  Element inv(Element a) const { return inverse_[a]; }
  const Element* row(Element a) const { return table_.data() + a * order_; }
  const std::vector<Element>& table() const { return table_; }
  const std::vector<Element>& inverses() const { return inverse_; }
  bool is_abelian() const { return abelian_; }
  bool has_labels() const { return !labels_.empty(); }

  const std::string& label(Element a) const {
    static const std::string empty;
    return labels_.empty() ? empty : labels_[a];
  }
  const std::vector<std::string>& labels() const { return labels_; }

  std::size_t element_order(Element a) const {
    std::size_t k = 1;
    Element x = a;
    while (x != 0) {
      x = mul(x, a);
      ++k;
    }
    return k;
  }

  // lcm of element orders.
  std::size_t exponent() const {
    std::size_t e = 1;
    for (Element g = 0; g < order_; ++g)
      e = std::lcm(e, element_order(g));
    return e;
  }

  // FNV-1a over the table, used as a stable cache key.
  std::uint64_t table_hash() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (Element x : table_) {
      h ^= x;
      h *= 0x100000001B3ULL;
    }
    return h;
  }

  /// Validates and wraps a raw Cayley table. The identity element is located
  /// and relabeled to index 0 if needed. Throws NoIdentityError,
  /// NotLatinSquareError or NotAssociativeError naming the failing position.
  static GroupPtr from_cayley_table(const std::vector<std::vector<int>>& table,
                                    std::vector<std::string> labels = {});

  static GroupPtr trivial() { return cyclic(1); }
  static GroupPtr cyclic(std::size_t n);
  static GroupPtr dihedral(std::size_t n);
  static GroupPtr quaternion();
  static GroupPtr product(const GroupPtr& g, const GroupPtr& h);

  // Internal: construct from an already-normalized table.
  FiniteGroup(std::size_t order, std::vector<Element> table,
              std::vector<std::string> labels, bool run_validation);

 private:
  void compute_inverses();
  void validate() const;

  std::size_t order_;
  std::vector<Element> table_;
  std::vector<Element> inverse_;
  std::vector<std::string> labels_;
  bool abelian_ = false;
};

/// A subgroup is its sorted element set; it always contains the identity.
struct Subgroup {
  GroupPtr parent;
  std::vector<Element> elements;  // sorted ascending, elements[0] == 0

  std::size_t order() const { return elements.size(); }
  std::size_t index() const { return parent->order() / elements.size(); }
  bool contains(Element g) const {
    return std::binary_search(elements.begin(), elements.end(), g);
  }
  bool operator==(const Subgroup& other) const {
    return elements == other.elements;
  }
};

/// A homomorphism between finite groups, given elementwise. Validated on
/// construction: identity to identity and multiplicativity on all pairs.
struct Homomorphism {
  GroupPtr source;
  GroupPtr target;
  std::vector<Element> map;
  bool surjective = false;

  Element operator()(Element g) const { return map[g]; }

  static Homomorphism make(GroupPtr source, GroupPtr target,
                           std::vector<Element> map) {
    Homomorphism f{std::move(source), std::move(target), std::move(map), false};
    if (f.map.size() != f.source->order())
      throw GroupMismatchError("homomorphism map has wrong length");
    if (f.map[0] != 0)
      throw GroupMismatchError("homomorphism does not fix the identity");
    const std::size_t n = f.source->order();
    for (Element a = 0; a < n; ++a)
      for (Element b = 0; b < n; ++b)
        if (f.map[f.source->mul(a, b)] != f.target->mul(f.map[a], f.map[b]))
          throw GroupMismatchError("map is not multiplicative at (" +
                                   std::to_string(a) + ", " +
                                   std::to_string(b) + ")");
    std::vector<bool> hit(f.target->order(), false);
    std::size_t count = 0;
    for (Element y : f.map)
      if (!hit[y]) {
        hit[y] = true;
        ++count;
      }
    f.surjective = count == f.target->order();
    return f;
  }

  static Homomorphism identity(const GroupPtr& g) {
    std::vector<Element> id(g->order());
    std::iota(id.begin(), id.end(), Element{0});
    return Homomorphism{g, g, std::move(id), true};
  }

  /// this ∘ first, i.e. apply `first`, then this map.
  Homomorphism after(const Homomorphism& first) const {
    if (first.target.get() != source.get())
      throw ChainMismatchError("composition endpoints do not match");
    std::vector<Element> composed(first.map.size());
    for (std::size_t g = 0; g < composed.size(); ++g)
      composed[g] = map[first.map[g]];
    return Homomorphism{first.source, target, std::move(composed),
                        surjective && first.surjective};
  }
};

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

inline FiniteGroup::FiniteGroup(std::size_t order, std::vector<Element> table,
                                std::vector<std::string> labels,
                                bool run_validation)
    : order_(order), table_(std::move(table)), labels_(std::move(labels)) {
  if (order_ == 0 || order_ > kMaxOrder)
    throw CapExceededError("group order " + std::to_string(order_) +
                           " out of range");
  if (run_validation && order_ <= kValidateOrderLimit) validate();
  compute_inverses();
  abelian_ = true;
  for (Element a = 0; a < order_ && abelian_; ++a)
    for (Element b = a + 1; b < order_; ++b)
      if (mul(a, b) != mul(b, a)) {
        abelian_ = false;
        break;
      }
}

inline void FiniteGroup::validate() const {
  const std::size_t n = order_;
  // Identity row/column.
  for (Element g = 0; g < n; ++g) {
    if (mul(0, g) != g || mul(g, 0) != g)
      throw NoIdentityError("element 0 is not an identity at " +
                            std::to_string(g));
  }
  // Latin square: every row and column is a permutation.
  std::vector<bool> seen(n);
  for (Element r = 0; r < n; ++r) {
    std::fill(seen.begin(), seen.end(), false);
    for (Element c = 0; c < n; ++c) {
      Element v = mul(r, c);
      if (seen[v])
        throw NotLatinSquareError("row " + std::to_string(r) +
                                  " repeats value at column " +
                                  std::to_string(c));
      seen[v] = true;
    }
  }
  for (Element c = 0; c < n; ++c) {
    std::fill(seen.begin(), seen.end(), false);
    for (Element r = 0; r < n; ++r) {
      Element v = mul(r, c);
      if (seen[v])
        throw NotLatinSquareError("column " + std::to_string(c) +
                                  " repeats value at row " + std::to_string(r));
      seen[v] = true;
    }
  }
  for (Element a = 0; a < n; ++a)
    for (Element b = 0; b < n; ++b)
      for (Element c = 0; c < n; ++c)
        if (mul(mul(a, b), c) != mul(a, mul(b, c)))
          throw NotAssociativeError("associativity fails at triple (" +
                                    std::to_string(a) + ", " +
                                    std::to_string(b) + ", " +
                                    std::to_string(c) + ")");
}

inline void FiniteGroup::compute_inverses() {
  inverse_.assign(order_, 0);
  for (Element g = 0; g < order_; ++g) {
    bool found = false;
    for (Element h = 0; h < order_; ++h)
      if (mul(g, h) == 0) {
        inverse_[g] = h;
        found = true;
        break;
      }
    if (!found)
      throw NotLatinSquareError("element " + std::to_string(g) +
                                " has no inverse");
  }
}

inline GroupPtr FiniteGroup::from_cayley_table(
    const std::vector<std::vector<int>>& table,
    std::vector<std::string> labels) {
  const std::size_t n = table.size();
  if (n == 0) throw NoIdentityError("empty table");
  for (std::size_t r = 0; r < n; ++r) {
    if (table[r].size() != n)
      throw NotLatinSquareError("table is not square at row " +
                                std::to_string(r));
    for (std::size_t c = 0; c < n; ++c)
      if (table[r][c] < 0 || static_cast<std::size_t>(table[r][c]) >= n)
        throw NotLatinSquareError("entry out of range at (" +
                                  std::to_string(r) + ", " +
                                  std::to_string(c) + ")");
  }
  // Locate the two-sided identity.
  std::size_t e = n;
  for (std::size_t g = 0; g < n; ++g) {
    bool ok = true;
    for (std::size_t h = 0; h < n && ok; ++h)
      ok = static_cast<std::size_t>(table[g][h]) == h &&
           static_cast<std::size_t>(table[h][g]) == h;
    if (ok) {
      e = g;
      break;
    }
  }
  if (e == n) throw NoIdentityError("table has no two-sided identity");

  // Relabel so the identity sits at index 0 (swap 0 <-> e).
  std::vector<Element> relabel(n);
  std::iota(relabel.begin(), relabel.end(), Element{0});
  std::swap(relabel[0], relabel[e]);

  std::vector<Element> flat(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      flat[relabel[a] * n + relabel[b]] =
          relabel[static_cast<std::size_t>(table[a][b])];
  std::vector<std::string> new_labels;
  if (!labels.empty()) {
    if (labels.size() != n)
      throw NotLatinSquareError("label count does not match order");
    new_labels.resize(n);
    for (std::size_t a = 0; a < n; ++a) new_labels[relabel[a]] = labels[a];
  }
  return std::make_shared<FiniteGroup>(n, std::move(flat),
                                       std::move(new_labels), true);
}

inline GroupPtr FiniteGroup::cyclic(std::size_t n) {
  if (n == 0) throw CapExceededError("cyclic group order must be positive");
  std::vector<Element> flat(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      flat[a * n + b] = static_cast<Element>((a + b) % n);
  std::vector<std::string> labels(n);
  for (std::size_t a = 0; a < n; ++a) labels[a] = std::to_string(a);
  return std::make_shared<FiniteGroup>(n, std::move(flat), std::move(labels),
                                       true);
}

/// Dihedral group of order 2n from <r, s | r^n = s^2 = (rs)^2 = e>.
/// Element a + n*b encodes r^a s^b: rotations are indices 0..n-1 and
/// reflections r^a s are indices n..2n-1.
inline GroupPtr FiniteGroup::dihedral(std::size_t n) {
  if (n < 3) throw CapExceededError("dihedral group needs n >= 3");
  const std::size_t order = 2 * n;
  std::vector<Element> flat(order * order);
  auto enc = [n](std::size_t a, std::size_t b) {
    return static_cast<Element>(a + n * b);
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < 2; ++d) {
          // r^a s^b r^c s^d = r^{a + (-1)^b c} s^{b+d}
          std::size_t rot = b == 0 ? (a + c) % n : (a + n - c % n) % n;
          flat[enc(a, b) * order + enc(c, d)] = enc(rot, (b + d) % 2);
        }
  std::vector<std::string> labels(order);
  for (std::size_t a = 0; a < n; ++a) {
    std::string rpow = a == 0 ? "" : (a == 1 ? "r" : "r^" + std::to_string(a));
    labels[enc(a, 0)] = a == 0 ? "e" : rpow;
    labels[enc(a, 1)] = a == 0 ? "s" : rpow + " s";
  }
  return std::make_shared<FiniteGroup>(order, std::move(flat),
                                       std::move(labels), true);
}

/// Quaternion group {1, -1, i, -i, j, -j, k, -k} in that element order.
inline GroupPtr FiniteGroup::quaternion() {
  // 0:1 1:-1 2:i 3:-i 4:j 5:-j 6:k 7:-k
  auto neg = [](int x) { return x ^ 1; };
  auto mul_base = [neg](int x, int y) -> int {
    // multiplication on {1, i, j, k} (even indices), sign carried separately
    if (x == 0) return y;
    if (y == 0) return x;
    if (x == y) return 1;  // i*i = j*j = k*k = -1
    // i*j=k, j*k=i, k*i=j; reversed order picks up a sign.
    if (x == 2 && y == 4) return 6;
    if (x == 4 && y == 6) return 2;
    if (x == 6 && y == 2) return 4;
    if (x == 4 && y == 2) return neg(6);
    if (x == 6 && y == 4) return neg(2);
    if (x == 2 && y == 6) return neg(4);
    return -1;
  };
  std::vector<Element> flat(64);
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      int sign = (x & 1) ^ (y & 1);
      int base = mul_base(x & ~1, y & ~1);
      if (base == 1) {  // squared to -1
        base = 0;
        sign ^= 1;
      }
      flat[x * 8 + y] = static_cast<Element>(base ^ sign);
    }
  std::vector<std::string> labels = {"1", "-1", "i", "-i", "j", "-j", "k", "-k"};
  return std::make_shared<FiniteGroup>(8, std::move(flat), std::move(labels),
                                       true);
}

/// Direct product with componentwise multiplication; element (g, h) gets
/// index g*|H| + h. Associativity is inherited, so only the cheap checks run.
inline GroupPtr FiniteGroup::product(const GroupPtr& g, const GroupPtr& h) {
  const std::size_t ng = g->order(), nh = h->order(), n = ng * nh;
  if (n > kMaxOrder) throw CapExceededError("product order exceeds cap");
  std::vector<Element> flat(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    const Element ag = static_cast<Element>(a / nh), ah = static_cast<Element>(a % nh);
    for (std::size_t b = 0; b < n; ++b) {
      const Element bg = static_cast<Element>(b / nh), bh = static_cast<Element>(b % nh);
      flat[a * n + b] =
          static_cast<Element>(g->mul(ag, bg) * nh + h->mul(ah, bh));
    }
  }
  std::vector<std::string> labels;
  if (g->has_labels() && h->has_labels()) {
    labels.resize(n);
    for (std::size_t a = 0; a < n; ++a)
      labels[a] = "(" + g->label(static_cast<Element>(a / nh)) + "," +
                  h->label(static_cast<Element>(a % nh)) + ")";
  }
  return std::make_shared<FiniteGroup>(n, std::move(flat), std::move(labels),
                                       false);
}

// ---------------------------------------------------------------------------
// subgroup machinery
// ---------------------------------------------------------------------------

/// Least subgroup containing the generators, by worklist closure.
inline Subgroup generated_subgroup(const GroupPtr& g,
                                   const std::vector<Element>& gens) {
  std::vector<bool> in(g->order(), false);
  std::vector<Element> members{0};
  in[0] = true;
  std::vector<Element> work{0};
  for (Element x : gens)
    if (x >= g->order())
      throw GroupMismatchError("generator out of range");
    else if (!in[x]) {
      in[x] = true;
      members.push_back(x);
      work.push_back(x);
    }
  // Close under multiplication; inverses come for free in a finite group.
  while (!work.empty()) {
    Element x = work.back();
    work.pop_back();
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (Element y : {g->mul(x, members[i]), g->mul(members[i], x)}) {
        if (!in[y]) {
          in[y] = true;
          members.push_back(y);
          work.push_back(y);
        }
      }
    }
  }
  std::sort(members.begin(), members.end());
  return Subgroup{g, std::move(members)};
}

inline bool is_normal(const GroupPtr& g, const Subgroup& h) {
  for (Element x = 0; x < g->order(); ++x) {
    const Element xi = g->inv(x);
    for (Element m : h.elements)
      if (!h.contains(g->mul(g->mul(x, m), xi))) return false;
  }
  return true;
}

/// Partition of the group into left cosets gH, ordered by least element;
/// coset 0 is H itself.
struct LeftCosets {
  std::vector<std::vector<Element>> cosets;
  std::vector<Element> coset_of;  // element -> coset index
};

inline LeftCosets left_cosets(const GroupPtr& g, const Subgroup& h) {
  LeftCosets out;
  out.coset_of.assign(g->order(), static_cast<Element>(g->order()));
  for (Element x = 0; x < g->order(); ++x) {
    if (out.coset_of[x] != g->order()) continue;
    std::vector<Element> coset;
    coset.reserve(h.order());
    for (Element m : h.elements) coset.push_back(g->mul(x, m));
    std::sort(coset.begin(), coset.end());
    const Element idx = static_cast<Element>(out.cosets.size());
    for (Element y : coset) out.coset_of[y] = idx;
    out.cosets.push_back(std::move(coset));
  }
  return out;
}

/// Quotient by a normal subgroup. Cosets are labeled by their least element
/// (so the identity coset is element 0) and the canonical projection is
/// returned alongside the quotient group.
struct QuotientResult {
  GroupPtr group;
  Homomorphism projection;
  std::vector<Element> representatives;  // least element per coset
};

inline QuotientResult quotient(const GroupPtr& g, const Subgroup& n) {
  if (!is_normal(g, n)) throw NotNormalError("subgroup is not normal");
  LeftCosets cosets = left_cosets(g, n);
  const std::size_t q = cosets.cosets.size();
  std::vector<Element> reps(q);
  for (std::size_t c = 0; c < q; ++c) reps[c] = cosets.cosets[c][0];
  std::vector<Element> flat(q * q);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b)
      flat[a * q + b] = cosets.coset_of[g->mul(reps[a], reps[b])];
  std::vector<std::string> labels;
  if (g->has_labels()) {
    labels.resize(q);
    for (std::size_t c = 0; c < q; ++c) labels[c] = g->label(reps[c]) + "N";
  }
  auto qg = std::make_shared<FiniteGroup>(q, std::move(flat),
                                          std::move(labels), true);
  Homomorphism proj{g, qg, cosets.coset_of, true};
  return QuotientResult{qg, std::move(proj), std::move(reps)};
}

/// All subgroups with the inclusion relation, found by cyclic-extension
/// closure: grow each known subgroup by one extra generator until no new
/// subgroup appears. Complete because every subgroup is reachable from the
/// trivial one by adding generators one at a time.
struct SubgroupLattice {
  GroupPtr group;
  std::vector<Subgroup> subgroups;        // sorted by (order, elements)
  std::vector<std::vector<bool>> leq;     // leq[i][j]: subgroup i <= subgroup j

  std::size_t size() const { return subgroups.size(); }

  std::size_t find(const Subgroup& h) const {
    for (std::size_t i = 0; i < subgroups.size(); ++i)
      if (subgroups[i].elements == h.elements) return i;
    return subgroups.size();
  }

  std::vector<std::size_t> maximal_proper() const {
    std::vector<std::size_t> out;
    const std::size_t top = subgroups.size() - 1;
    for (std::size_t i = 0; i + 1 < subgroups.size(); ++i) {
      bool maximal = true;
      for (std::size_t j = 0; j < subgroups.size() && maximal; ++j)
        if (j != i && j != top && leq[i][j]) maximal = false;
      if (maximal) out.push_back(i);
    }
    return out;
  }
};

inline SubgroupLattice subgroup_lattice(const GroupPtr& g,
                                        std::size_t cap = 256) {
  if (g->order() > cap)
    throw CapExceededError("subgroup enumeration capped at order " +
                           std::to_string(cap));
  std::vector<std::vector<Element>> found;
  auto insert_new = [&found](std::vector<Element> elems) {
    auto it = std::lower_bound(found.begin(), found.end(), elems);
    if (it != found.end() && *it == elems) return false;
    found.insert(it, std::move(elems));
    return true;
  };
  insert_new({0});
  std::vector<std::vector<Element>> frontier{{0}};
  while (!frontier.empty()) {
    std::vector<std::vector<Element>> next;
    for (const auto& elems : frontier) {
      Subgroup h{g, elems};
      for (Element x = 0; x < g->order(); ++x) {
        if (h.contains(x)) continue;
        std::vector<Element> gens = elems;
        gens.push_back(x);
        Subgroup k = generated_subgroup(g, gens);
        if (insert_new(k.elements)) next.push_back(k.elements);
      }
    }
    frontier = std::move(next);
  }
  SubgroupLattice lat;
  lat.group = g;
  std::sort(found.begin(), found.end(),
            [](const std::vector<Element>& a, const std::vector<Element>& b) {
              return a.size() != b.size() ? a.size() < b.size() : a < b;
            });
  for (auto& elems : found) lat.subgroups.push_back(Subgroup{g, std::move(elems)});
  const std::size_t m = lat.subgroups.size();
  lat.leq.assign(m, std::vector<bool>(m, false));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      lat.leq[i][j] = std::includes(lat.subgroups[j].elements.begin(),
                                    lat.subgroups[j].elements.end(),
                                    lat.subgroups[i].elements.begin(),
                                    lat.subgroups[i].elements.end());
  return lat;
}

// ---------------------------------------------------------------------------
// subgroups as groups in their own right
// ---------------------------------------------------------------------------

/// A subgroup realized as a standalone FiniteGroup; sorted order keeps the
/// identity at index 0. to_sub maps parent elements into the new group.
struct RealizedSubgroup {
  GroupPtr group;
  std::vector<Element> to_parent;               // new index -> parent element
  std::vector<Element> to_sub;                  // parent element -> new index
};

inline RealizedSubgroup realize_subgroup(const Subgroup& h) {
  const GroupPtr& g = h.parent;
  const std::size_t n = h.order();
  RealizedSubgroup out;
  out.to_parent = h.elements;
  out.to_sub.assign(g->order(), 0);
  for (std::size_t i = 0; i < n; ++i) out.to_sub[h.elements[i]] = static_cast<Element>(i);
  std::vector<Element> flat(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      flat[a * n + b] = out.to_sub[g->mul(h.elements[a], h.elements[b])];
  std::vector<std::string> labels;
  if (g->has_labels()) {
    labels.resize(n);
    for (std::size_t a = 0; a < n; ++a) labels[a] = g->label(h.elements[a]);
  }
  out.group = std::make_shared<FiniteGroup>(n, std::move(flat),
                                            std::move(labels), false);
  return out;
}

// ---------------------------------------------------------------------------
// alternating group A5
// ---------------------------------------------------------------------------

/// A5 as all even permutations of {1..5} in lexicographic one-line order.
/// The product p*q acts on points as (p*q)(x) = p(q(x)): in a walk product
/// X1 X2 X3, the rightmost factor moves points first. The A5 golden test
/// depends on this convention.
struct AlternatingGroup5 {
  GroupPtr group;
  std::vector<std::array<int, 5>> perms;  // perms[g][x] = image of point x

  /// True if element g maps 1-based point `from` to `to`.
  bool maps(Element g, int from, int to) const {
    return perms[g][from - 1] == to - 1;
  }
};

inline std::string cycle_notation(const std::array<int, 5>& p) {
  std::string out;
  std::array<bool, 5> seen{};
  for (int s = 0; s < 5; ++s) {
    if (seen[s] || p[s] == s) continue;
    out += "(";
    int x = s;
    bool first = true;
    while (!seen[x]) {
      seen[x] = true;
      out += (first ? "" : " ") + std::to_string(x + 1);
      first = false;
      x = p[x];
    }
    out += ")";
  }
  return out.empty() ? "e" : out;
}

inline AlternatingGroup5 alternating_group_5() {
  std::array<int, 5> pts{0, 1, 2, 3, 4};
  std::vector<std::array<int, 5>> perms;
  do {
    int inversions = 0;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        if (pts[i] > pts[j]) ++inversions;
    if (inversions % 2 == 0) perms.push_back(pts);
  } while (std::next_permutation(pts.begin(), pts.end()));
  // Lexicographic order puts the identity first.
  const std::size_t n = perms.size();
  auto index_of = [&perms](const std::array<int, 5>& p) {
    return static_cast<Element>(
        std::lower_bound(perms.begin(), perms.end(), p) - perms.begin());
  };
  std::vector<Element> flat(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      std::array<int, 5> composed;
      for (int x = 0; x < 5; ++x) composed[x] = perms[a][perms[b][x]];
      flat[a * n + b] = index_of(composed);
    }
  std::vector<std::string> labels(n);
  for (std::size_t a = 0; a < n; ++a) labels[a] = cycle_notation(perms[a]);
  AlternatingGroup5 out;
  out.group = std::make_shared<FiniteGroup>(n, std::move(flat),
                                            std::move(labels), true);
  out.perms = std::move(perms);
  return out;
}

/// Element index of a permutation cycle such as {1,2,3} meaning (1 2 3),
/// with 1-based points.
inline Element a5_cycle(const AlternatingGroup5& a5,
                        const std::vector<int>& cycle) {
  std::array<int, 5> p{0, 1, 2, 3, 4};
  for (std::size_t i = 0; i < cycle.size(); ++i)
    p[cycle[i] - 1] = cycle[(i + 1) % cycle.size()] - 1;
  for (Element g = 0; g < a5.group->order(); ++g)
    if (a5.perms[g] == p) return g;
  throw GroupMismatchError("cycle is not an even permutation");
}

}  // namespace groupmix

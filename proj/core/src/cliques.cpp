#include "coarsetk/cliques.hpp"

#include <algorithm>
#include <unordered_map>

namespace coarsetk {

namespace {

constexpr PointId kMaxGenericPoints = 8192;

// ----------------------------------------------------------------------------
// Small dynamic bitset for the Bron-Kerbosch kernel
// ----------------------------------------------------------------------------

struct Bits {
  std::vector<std::uint64_t> w;

  explicit Bits(size_t n = 0) : w((n + 63) / 64, 0) {}
  void set(size_t i) { w[i >> 6] |= std::uint64_t(1) << (i & 63); }
  void reset(size_t i) { w[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }
  bool test(size_t i) const { return (w[i >> 6] >> (i & 63)) & 1; }
  bool any() const {
    for (auto x : w)
      if (x) return true;
    return false;
  }
  int count_and(const Bits& o) const {
    int c = 0;
    for (size_t k = 0; k < w.size(); ++k) c += __builtin_popcountll(w[k] & o.w[k]);
    return c;
  }
  Bits and_with(const Bits& o) const {
    Bits r(*this);
    for (size_t k = 0; k < w.size(); ++k) r.w[k] &= o.w[k];
    return r;
  }
  template <class F>
  void for_each(F&& f) const {
    for (size_t k = 0; k < w.size(); ++k) {
      std::uint64_t x = w[k];
      while (x) {
        int b = __builtin_ctzll(x);
        f(k * 64 + b);
        x &= x - 1;
      }
    }
  }
};

struct BronKerbosch {
  const std::vector<Bits>& adj;
  const std::function<void(const PointSet&)>& sink;
  CliqueEnumStats stats;
  i64 budget;
  PointSet current;

  bool run(Bits p, Bits x) {
    ++stats.expansions;
    if (budget >= 0 && stats.expansions > budget) {
      stats.complete = false;
      return false;
    }
    if (!p.any() && !x.any()) {
      ++stats.cliques;
      sink(current);
      return true;
    }
    // pivot: vertex of P|X with the most neighbours in P
    int pivot = -1, best = -1;
    auto consider = [&](size_t u) {
      int c = adj[u].count_and(p);
      if (c > best) {
        best = c;
        pivot = static_cast<int>(u);
      }
    };
    p.for_each(consider);
    x.for_each(consider);
    std::vector<size_t> order;
    p.for_each([&](size_t v) {
      if (pivot < 0 || !adj[static_cast<size_t>(pivot)].test(v)) order.push_back(v);
    });
    for (size_t v : order) {
      current.push_back(static_cast<PointId>(v));
      if (!run(p.and_with(adj[v]), x.and_with(adj[v]))) return false;
      current.pop_back();
      p.reset(v);
      x.set(v);
    }
    return true;
  }
};

template <class Thresh>
CliqueEnumStats enumerate_generic(const Space& s, const Thresh& r,
                                  const std::function<void(const PointSet&)>& sink, i64 budget) {
  PointId n = s.size();
  if (n > kMaxGenericPoints)
    throw validation_error("space too large for generic subset enumeration");
  std::vector<Bits> adj(n, Bits(n));
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j)
      if (s.dist(i, j) <= r) {
        adj[i].set(j);
        adj[j].set(i);
      }
  BronKerbosch bk{adj, sink, {}, budget, {}};
  Bits p(n), x(n);
  for (PointId i = 0; i < n; ++i) p.set(i);
  bk.run(std::move(p), std::move(x));
  return bk.stats;
}

i64 threshold_floor(const Rat& r) { return r.floor(); }
i64 threshold_floor(const Dist& r) { return r.floor_int(); }

// ----------------------------------------------------------------------------
// Structured fast paths
// ----------------------------------------------------------------------------

template <class Thresh>
CliqueEnumStats enumerate_boxes(const Space& s, const Thresh& r,
                                const std::function<void(const PointSet&)>& sink, i64 budget) {
  const auto& l = s.lattice_geometry();
  i64 w = threshold_floor(r);  // window spread
  std::vector<std::vector<i64>> starts(l.dim);
  for (int ax = 0; ax < l.dim; ++ax) {
    i64 lo = l.box[ax][0], hi = l.box[ax][1];
    if (hi - lo <= w) {
      starts[ax].push_back(lo);
    } else {
      for (i64 a = lo; a + w <= hi; ++a) starts[ax].push_back(a);
    }
  }
  CliqueEnumStats stats;
  std::vector<size_t> pick(l.dim, 0);
  PointSet box;
  for (;;) {
    ++stats.expansions;
    if (budget >= 0 && stats.expansions > budget) {
      stats.complete = false;
      return stats;
    }
    box.clear();
    std::vector<i64> cur(l.dim);
    std::vector<std::array<i64, 2>> rng(l.dim);
    for (int ax = 0; ax < l.dim; ++ax) {
      i64 a = starts[ax][pick[ax]];
      rng[ax] = {a, std::min(a + w, l.box[ax][1])};
      cur[ax] = a;
    }
    for (;;) {
      box.push_back(s.index_of(cur));
      int ax = l.dim - 1;
      while (ax >= 0 && cur[ax] == rng[ax][1]) {
        cur[ax] = rng[ax][0];
        --ax;
      }
      if (ax < 0) break;
      ++cur[ax];
    }
    std::sort(box.begin(), box.end());
    ++stats.cliques;
    sink(box);
    int ax = l.dim - 1;
    while (ax >= 0 && pick[ax] + 1 == starts[ax].size()) pick[ax--] = 0;
    if (ax < 0) break;
    ++pick[ax];
  }
  return stats;
}

template <class Thresh>
CliqueEnumStats enumerate_blocks(const Space& s, const Thresh& r,
                                 const std::function<void(const PointSet&)>& sink, i64 budget) {
  const auto& u = s.ultra_geometry();
  int levels = static_cast<int>(u.block_id.size());
  int j = -1;
  for (int lv = 0; lv < levels; ++lv) {
    if (Dist::integer(pow_checked(u.base, lv)) <= r)
      j = lv;
    else
      break;
  }
  CliqueEnumStats stats;
  auto emit = [&](const PointSet& c) {
    ++stats.expansions;
    ++stats.cliques;
    sink(c);
  };
  if (j < 0) {
    PointSet single(1);
    for (PointId leaf = 0; leaf < s.size(); ++leaf) {
      single[0] = leaf;
      emit(single);
      if (budget >= 0 && stats.expansions > budget) {
        stats.complete = false;
        return stats;
      }
    }
    return stats;
  }
  // group leaves by their block at level j, in first-seen order
  std::vector<PointSet> groups;
  std::unordered_map<PointId, int> slot;
  for (PointId leaf = 0; leaf < s.size(); ++leaf) {
    PointId b = u.block_id[j][leaf];
    auto [it, inserted] = slot.emplace(b, static_cast<int>(groups.size()));
    if (inserted) groups.emplace_back();
    groups[static_cast<size_t>(it->second)].push_back(leaf);
  }
  for (const auto& g : groups) {
    emit(g);
    if (budget >= 0 && stats.expansions > budget) {
      stats.complete = false;
      return stats;
    }
  }
  return stats;
}

template <class Thresh>
CliqueEnumStats enumerate_products(const Space& s, const Thresh& r,
                                   const std::function<void(const PointSet&)>& sink, i64 budget) {
  // A subset of a max-metric product has diameter <= r iff both coordinate
  // projections do, so maximal subsets are exactly products of maximal
  // component subsets.
  const auto& pr = s.product_geometry();
  PointId nr = pr.right->size();
  std::vector<PointSet> left_cliques;
  CliqueEnumStats lstats = for_each_max_rclique(
      *pr.left, r, [&](const PointSet& c) { left_cliques.push_back(c); }, budget);
  CliqueEnumStats stats;
  stats.expansions = lstats.expansions;
  if (!lstats.complete) {
    stats.complete = false;
    return stats;
  }
  PointSet prod;
  bool aborted = false;
  CliqueEnumStats rstats = for_each_max_rclique(
      *pr.right, r,
      [&](const PointSet& rc) {
        if (aborted) return;
        for (const PointSet& lc : left_cliques) {
          ++stats.expansions;
          if (budget >= 0 && stats.expansions > budget) {
            aborted = true;
            return;
          }
          prod.clear();
          prod.reserve(lc.size() * rc.size());
          for (PointId a : lc)
            for (PointId b : rc) prod.push_back(a * nr + b);
          ++stats.cliques;
          sink(prod);
        }
      },
      budget);
  stats.expansions += rstats.expansions;
  if (!rstats.complete || aborted) stats.complete = false;
  return stats;
}

template <class Thresh>
CliqueEnumStats dispatch(const Space& s, const Thresh& r,
                         const std::function<void(const PointSet&)>& sink, i64 budget) {
  if (s.is_lattice()) {
    const auto& l = s.lattice_geometry();
    if (l.dim == 1 || l.norm == Norm::linf) return enumerate_boxes(s, r, sink, budget);
    return enumerate_generic(s, r, sink, budget);
  }
  if (s.is_ultrametric()) return enumerate_blocks(s, r, sink, budget);
  if (s.is_product()) return enumerate_products(s, r, sink, budget);
  return enumerate_generic(s, r, sink, budget);
}

}  // namespace

CliqueEnumStats for_each_max_rclique(const Space& s, const Rat& r,
                                     const std::function<void(const PointSet&)>& sink,
                                     i64 expansion_budget) {
  return dispatch(s, r, sink, expansion_budget);
}

CliqueEnumStats for_each_max_rclique(const Space& s, const Dist& r,
                                     const std::function<void(const PointSet&)>& sink,
                                     i64 expansion_budget) {
  return dispatch(s, r, sink, expansion_budget);
}

}  // namespace coarsetk

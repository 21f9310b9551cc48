#include "coarsetk/space.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <unordered_map>

namespace coarsetk {

namespace {

constexpr i64 kMaxPoints = 20'000'000;
constexpr i64 kMaxMatrixPoints = 1024;
constexpr i64 kMaxMatrixEntry = 2'000'000'000;  // keeps squared values in i64

std::string coord_label(const std::vector<i64>& c) {
  std::string out = "(";
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(c[i]);
  }
  out += ")";
  return out;
}

}  // namespace

std::string norm_name(Norm n) {
  switch (n) {
    case Norm::l1: return "l1";
    case Norm::linf: return "linf";
    case Norm::l2: return "l2";
  }
  return "?";
}

std::optional<Norm> norm_from_name(const std::string& s) {
  if (s == "l1") return Norm::l1;
  if (s == "linf") return Norm::linf;
  if (s == "l2") return Norm::l2;
  return std::nullopt;
}

// ============================================================================
// Construction and validation
// ============================================================================

Space Space::from_matrix(std::string id, PointId n, std::vector<i64> dist_rowmajor,
                         std::optional<i64> scale_cap, std::vector<std::string> labels) {
  if (n <= 0) throw validation_error("matrix space needs at least one point");
  if (n > kMaxMatrixPoints) throw validation_error("matrix space too large");
  if (static_cast<i64>(dist_rowmajor.size()) != static_cast<i64>(n) * n)
    throw validation_error("distance matrix size mismatch");
  auto at = [&](PointId a, PointId b) -> i64 { return dist_rowmajor[static_cast<size_t>(a) * n + b]; };
  for (PointId i = 0; i < n; ++i) {
    if (at(i, i) != 0) throw validation_error("nonzero diagonal at point " + std::to_string(i));
    for (PointId j = 0; j < n; ++j) {
      if (at(i, j) < 0 || at(i, j) > kMaxMatrixEntry)
        throw validation_error("distance out of range at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (at(i, j) != at(j, i))
        throw validation_error("asymmetric distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (i != j && at(i, j) == 0)
        throw validation_error("zero distance between distinct points " + std::to_string(i) + "," + std::to_string(j));
    }
  }
  for (PointId i = 0; i < n; ++i)
    for (PointId j = i + 1; j < n; ++j)
      for (PointId k = 0; k < n; ++k)
        if (at(i, j) > at(i, k) + at(k, j))
          throw validation_error("triangle inequality fails for points " + std::to_string(i) + "," +
                                 std::to_string(j) + " via " + std::to_string(k));
  if (!labels.empty() && static_cast<PointId>(labels.size()) != n)
    throw validation_error("label count mismatch");

  Space s;
  s.id_ = std::move(id);
  s.size_ = n;
  s.labels_ = std::move(labels);
  s.geom_ = MatrixGeometry{n, std::move(dist_rowmajor)};
  s.finish_init(scale_cap);
  return s;
}

Space Space::lattice(std::string id, std::vector<std::array<i64, 2>> box, Norm norm,
                     std::optional<i64> scale_cap) {
  if (box.empty()) throw validation_error("lattice needs at least one axis");
  i64 count = 1;
  for (const auto& [lo, hi] : box) {
    if (hi < lo) throw validation_error("empty axis range");
    i64 w = hi - lo + 1;
    count = narrow_checked(mul_checked(count, w));
    if (count > kMaxPoints) throw validation_error("lattice too large");
  }
  Space s;
  s.id_ = std::move(id);
  s.size_ = static_cast<PointId>(count);
  s.strides_.assign(box.size(), 1);
  for (int a = static_cast<int>(box.size()) - 2; a >= 0; --a)
    s.strides_[a] = s.strides_[a + 1] * (box[a + 1][1] - box[a + 1][0] + 1);
  s.geom_ = LatticeGeometry{static_cast<int>(box.size()), std::move(box), norm};
  s.finish_init(scale_cap);
  return s;
}

Space Space::ultrametric(std::string id, i64 base, std::vector<std::vector<PointId>> block_id,
                         std::optional<i64> scale_cap, std::vector<std::string> leaf_labels) {
  if (base < 2) throw validation_error("ultrametric base must be >= 2");
  if (block_id.empty() || block_id.front().empty())
    throw validation_error("ultrametric structure needs at least one level and leaf");
  size_t nleaves = block_id.front().size();
  for (const auto& level : block_id)
    if (level.size() != nleaves) throw validation_error("ragged block table");
  // Level 0 must separate leaves; blocks must be nested upward; the top
  // level must be a single block so every pair has a distance.
  {
    std::set<PointId> seen(block_id[0].begin(), block_id[0].end());
    if (seen.size() != nleaves) throw validation_error("level 0 does not separate leaves");
  }
  for (size_t lv = 0; lv + 1 < block_id.size(); ++lv) {
    std::unordered_map<PointId, PointId> parent;
    for (size_t leaf = 0; leaf < nleaves; ++leaf) {
      auto [it, inserted] = parent.emplace(block_id[lv][leaf], block_id[lv + 1][leaf]);
      if (!inserted && it->second != block_id[lv + 1][leaf])
        throw validation_error("blocks are not nested at level " + std::to_string(lv));
    }
  }
  {
    std::set<PointId> top(block_id.back().begin(), block_id.back().end());
    if (top.size() != 1) throw validation_error("top level must be a single block");
  }
  if (!leaf_labels.empty() && leaf_labels.size() != nleaves)
    throw validation_error("label count mismatch");
  pow_checked(base, static_cast<int>(block_id.size()) - 1);  // distances must stay in range

  Space s;
  s.id_ = std::move(id);
  s.size_ = static_cast<PointId>(nleaves);
  s.labels_ = std::move(leaf_labels);
  s.geom_ = UltraGeometry{base, std::move(block_id)};
  s.finish_init(scale_cap);
  return s;
}

Space Space::product_max(std::shared_ptr<const Space> left, std::shared_ptr<const Space> right,
                         std::optional<i64> scale_cap) {
  if (!left || !right) throw validation_error("product of null spaces");
  i64 count = narrow_checked(mul_checked(left->size(), right->size()));
  if (count > kMaxPoints) throw validation_error("product space too large");
  Space s;
  s.id_ = "prod(" + left->id() + "," + right->id() + ")";
  s.size_ = static_cast<PointId>(count);
  s.geom_ = ProductGeometry{std::move(left), std::move(right)};
  s.finish_init(scale_cap);
  return s;
}

void Space::finish_init(std::optional<i64> cap) {
  diameter_ = computed_diameter();
  if (cap) {
    if (*cap < 0) throw validation_error("negative scale cap");
    scale_cap_ = *cap;
  } else {
    scale_cap_ = diameter_.ceil_int();
  }
}

// ============================================================================
// Distance and diameter
// ============================================================================

Dist Space::dist(PointId a, PointId b) const {
  if (a == b) return Dist();
  if (const auto* m = std::get_if<MatrixGeometry>(&geom_))
    return Dist::integer(m->d[static_cast<size_t>(a) * m->n + b]);
  if (const auto* l = std::get_if<LatticeGeometry>(&geom_)) {
    i64 acc = 0;
    PointId ra = a, rb = b;
    for (int ax = 0; ax < l->dim; ++ax) {
      i64 w = l->box[ax][1] - l->box[ax][0] + 1;
      i64 ca = (ax + 1 < l->dim) ? ra / strides_[ax] : ra % w;
      i64 cb = (ax + 1 < l->dim) ? rb / strides_[ax] : rb % w;
      if (ax + 1 < l->dim) {
        ra %= static_cast<PointId>(strides_[ax]);
        rb %= static_cast<PointId>(strides_[ax]);
      }
      i64 delta = ca > cb ? ca - cb : cb - ca;
      switch (l->norm) {
        case Norm::l1: acc += delta; break;
        case Norm::linf: acc = std::max(acc, delta); break;
        case Norm::l2: acc += delta * delta; break;
      }
    }
    return l->norm == Norm::l2 ? Dist::sqrt_of(acc) : Dist::integer(acc);
  }
  if (const auto* u = std::get_if<UltraGeometry>(&geom_)) {
    int p = shared_level(a, b);
    return Dist::integer(pow_checked(u->base, p));
  }
  const auto& pr = std::get<ProductGeometry>(geom_);
  PointId nr = pr.right->size();
  Dist dl = pr.left->dist(a / nr, b / nr);
  Dist dr = pr.right->dist(a % nr, b % nr);
  return std::max(dl, dr);
}

int Space::shared_level(PointId a, PointId b) const {
  const auto& u = std::get<UltraGeometry>(geom_);
  for (size_t lv = 0; lv < u.block_id.size(); ++lv)
    if (u.block_id[lv][a] == u.block_id[lv][b]) return static_cast<int>(lv);
  throw validation_error("leaves never share a block");  // unreachable: top is single
}

int Space::ultra_levels() const { return static_cast<int>(std::get<UltraGeometry>(geom_).block_id.size()); }

Dist Space::computed_diameter() const {
  if (const auto* m = std::get_if<MatrixGeometry>(&geom_)) {
    i64 best = 0;
    for (i64 v : m->d) best = std::max(best, v);
    return Dist::integer(best);
  }
  if (const auto* l = std::get_if<LatticeGeometry>(&geom_)) {
    i64 acc = 0;
    for (const auto& [lo, hi] : l->box) {
      i64 w = hi - lo;
      switch (l->norm) {
        case Norm::l1: acc += w; break;
        case Norm::linf: acc = std::max(acc, w); break;
        case Norm::l2: acc += w * w; break;
      }
    }
    return l->norm == Norm::l2 ? Dist::sqrt_of(acc) : Dist::integer(acc);
  }
  if (const auto* u = std::get_if<UltraGeometry>(&geom_)) {
    if (size_ == 1) return Dist();
    for (size_t lv = 0;; ++lv) {
      std::set<PointId> blocks(u->block_id[lv].begin(), u->block_id[lv].end());
      if (blocks.size() == 1) return Dist::integer(pow_checked(u->base, static_cast<int>(lv)));
    }
  }
  const auto& pr = std::get<ProductGeometry>(geom_);
  return std::max(pr.left->diameter(), pr.right->diameter());
}

Dist Space::diameter() const { return diameter_; }

std::string Space::label(PointId p) const {
  if (!labels_.empty()) return labels_[p];
  if (is_lattice()) return coord_label(coords(p));
  if (is_product()) {
    const auto& pr = product_geometry();
    PointId nr = pr.right->size();
    return "(" + pr.left->label(p / nr) + "," + pr.right->label(p % nr) + ")";
  }
  if (is_ultrametric()) return "u" + std::to_string(p);
  return "p" + std::to_string(p);
}

std::vector<i64> Space::coords(PointId p) const {
  const auto& l = lattice_geometry();
  std::vector<i64> c(l.dim);
  PointId rest = p;
  for (int ax = 0; ax < l.dim; ++ax) {
    i64 w = l.box[ax][1] - l.box[ax][0] + 1;
    i64 off = (ax + 1 < l.dim) ? rest / strides_[ax] : rest % w;
    if (ax + 1 < l.dim) rest %= static_cast<PointId>(strides_[ax]);
    c[ax] = l.box[ax][0] + off;
  }
  return c;
}

PointId Space::index_of(const std::vector<i64>& coords) const {
  const auto& l = lattice_geometry();
  if (static_cast<int>(coords.size()) != l.dim) throw validation_error("coordinate arity mismatch");
  i64 idx = 0;
  for (int ax = 0; ax < l.dim; ++ax) {
    if (coords[ax] < l.box[ax][0] || coords[ax] > l.box[ax][1])
      throw validation_error("coordinate outside box");
    idx += (coords[ax] - l.box[ax][0]) * strides_[ax];
  }
  return static_cast<PointId>(idx);
}

// ============================================================================
// Distance value sets
// ============================================================================

const std::vector<Dist>& Space::distance_values() const {
  if (!distance_values_.empty()) return distance_values_;
  std::set<i64> radicands;  // distances keyed by squared value
  std::set<i64> ints;
  if (const auto* m = std::get_if<MatrixGeometry>(&geom_)) {
    for (i64 v : m->d) ints.insert(v);
  } else if (const auto* l = std::get_if<LatticeGeometry>(&geom_)) {
    std::vector<i64> widths;
    for (const auto& [lo, hi] : l->box) widths.push_back(hi - lo);
    if (l->norm == Norm::l1) {
      i64 total = 0;
      for (i64 w : widths) total += w;
      for (i64 v = 0; v <= total; ++v) ints.insert(v);
    } else if (l->norm == Norm::linf) {
      i64 total = 0;
      for (i64 w : widths) total = std::max(total, w);
      for (i64 v = 0; v <= total; ++v) ints.insert(v);
    } else {
      i64 combos = 1;
      for (i64 w : widths) combos = narrow_checked(mul_checked(combos, w + 1));
      if (combos > 4'000'000) throw exact_range_error();
      std::vector<i64> delta(widths.size(), 0);
      for (;;) {
        i64 sq = 0;
        for (i64 d : delta) sq += d * d;
        radicands.insert(sq);
        int ax = static_cast<int>(widths.size()) - 1;
        while (ax >= 0 && delta[ax] == widths[ax]) delta[ax--] = 0;
        if (ax < 0) break;
        ++delta[ax];
      }
    }
  } else if (const auto* u = std::get_if<UltraGeometry>(&geom_)) {
    ints.insert(0);
    for (size_t lv = 1; lv < u->block_id.size(); ++lv) {
      // base^lv occurs iff some level-lv block holds two level-(lv-1) blocks
      std::set<std::pair<PointId, PointId>> pairs;
      for (PointId leaf = 0; leaf < size_; ++leaf)
        pairs.emplace(u->block_id[lv][leaf], u->block_id[lv - 1][leaf]);
      std::unordered_map<PointId, int> children;
      bool occurs = false;
      for (const auto& [blk, child] : pairs) {
        (void)child;
        if (++children[blk] >= 2) { occurs = true; break; }
      }
      if (occurs) ints.insert(pow_checked(u->base, static_cast<int>(lv)));
    }
  } else {
    const auto& pr = std::get<ProductGeometry>(geom_);
    for (const Dist& d : pr.left->distance_values()) radicands.insert(d.squared());
    for (const Dist& d : pr.right->distance_values()) radicands.insert(d.squared());
  }
  for (i64 v : ints) radicands.insert(narrow_checked(mul_checked(v, v)));
  distance_values_.reserve(radicands.size());
  for (i64 sq : radicands) distance_values_.push_back(Dist::sqrt_of(sq));
  return distance_values_;
}

// ============================================================================
// Point set operations
// ============================================================================

void require_sorted_subset(const Space& s, const PointSet& pts) {
  PointId prev = -1;
  for (PointId p : pts) {
    if (p <= prev) throw validation_error("point set not strictly increasing");
    if (p < 0 || p >= s.size()) throw validation_error("point index out of range");
    prev = p;
  }
}

Dist set_diameter(const Space& s, const PointSet& pts) {
  if (pts.size() < 2) return Dist();
  if (s.is_lattice()) {
    const auto& l = s.lattice_geometry();
    if (l.norm == Norm::linf) {
      // linf diameter = max per-axis coordinate spread
      std::vector<i64> lo(l.dim, std::numeric_limits<i64>::max());
      std::vector<i64> hi(l.dim, std::numeric_limits<i64>::min());
      for (PointId p : pts) {
        auto c = s.coords(p);
        for (int ax = 0; ax < l.dim; ++ax) {
          lo[ax] = std::min(lo[ax], c[ax]);
          hi[ax] = std::max(hi[ax], c[ax]);
        }
      }
      i64 acc = 0;
      for (int ax = 0; ax < l.dim; ++ax) acc = std::max(acc, hi[ax] - lo[ax]);
      return Dist::integer(acc);
    }
    if (l.norm == Norm::l1 && l.dim <= 8) {
      // l1 distance is the max of 2^(dim-1) signed coordinate sums, so the
      // l1 diameter is the largest spread among those linear functionals.
      int combos = 1 << (l.dim - 1);
      std::vector<i64> lo(combos, std::numeric_limits<i64>::max());
      std::vector<i64> hi(combos, std::numeric_limits<i64>::min());
      for (PointId p : pts) {
        auto c = s.coords(p);
        for (int m = 0; m < combos; ++m) {
          i64 v = c[0];  // first sign fixed positive
          for (int ax = 1; ax < l.dim; ++ax) v += (m >> (ax - 1)) & 1 ? -c[ax] : c[ax];
          lo[m] = std::min(lo[m], v);
          hi[m] = std::max(hi[m], v);
        }
      }
      i64 acc = 0;
      for (int m = 0; m < combos; ++m) acc = std::max(acc, hi[m] - lo[m]);
      return Dist::integer(acc);
    }
  }
  Dist best;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, s.dist(pts[i], pts[j]));
  return best;
}

PointSet ball(const Space& s, PointId center, const Rat& r) {
  PointSet out;
  if (s.is_lattice()) {
    // Scan only the bounding box of the ball; any axis spread is <= floor(r).
    const auto& l = s.lattice_geometry();
    i64 reach = r.floor();
    auto c0 = s.coords(center);
    std::vector<std::array<i64, 2>> sub(l.dim);
    for (int ax = 0; ax < l.dim; ++ax)
      sub[ax] = {std::max(l.box[ax][0], c0[ax] - reach), std::min(l.box[ax][1], c0[ax] + reach)};
    std::vector<i64> cur(l.dim);
    for (int ax = 0; ax < l.dim; ++ax) cur[ax] = sub[ax][0];
    for (;;) {
      PointId p = s.index_of(cur);
      if (s.dist(center, p) <= r) out.push_back(p);
      int ax = l.dim - 1;
      while (ax >= 0 && cur[ax] == sub[ax][1]) {
        cur[ax] = sub[ax][0];
        --ax;
      }
      if (ax < 0) break;
      ++cur[ax];
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  for (PointId p = 0; p < s.size(); ++p)
    if (s.dist(center, p) <= r) out.push_back(p);
  return out;
}

namespace {

/// Multi-source BFS distances on a lattice box; exact for l1 (axis steps)
/// and linf (king moves) because boxes are geodesically convex for both.
PointSet lattice_neighborhood(const Space& s, const PointSet& base, const Rat& r, Openness mode) {
  const auto& l = s.lattice_geometry();
  // integer distance d qualifies iff d < r (open) or d <= r (closed)
  i64 depth;
  if (mode == Openness::open) {
    if (r.is_zero()) return base;  // zero-expansion convention
    depth = r.is_integer() ? r.num() - 1 : r.floor();
  } else {
    depth = r.floor();
  }
  if (depth < 0) return {};
  std::vector<i64> dist(s.size(), -1);
  std::deque<PointId> queue;
  for (PointId p : base) {
    dist[p] = 0;
    queue.push_back(p);
  }
  std::vector<i64> cur(l.dim);
  while (!queue.empty()) {
    PointId p = queue.front();
    queue.pop_front();
    if (dist[p] == depth) continue;
    auto c = s.coords(p);
    auto visit = [&](const std::vector<i64>& cc) {
      for (int ax = 0; ax < l.dim; ++ax)
        if (cc[ax] < l.box[ax][0] || cc[ax] > l.box[ax][1]) return;
      PointId q = s.index_of(cc);
      if (dist[q] < 0) {
        dist[q] = dist[p] + 1;
        queue.push_back(q);
      }
    };
    if (l.norm == Norm::l1) {
      for (int ax = 0; ax < l.dim; ++ax)
        for (i64 step : {i64(-1), i64(1)}) {
          cur = c;
          cur[ax] += step;
          visit(cur);
        }
    } else {
      // king moves: all nonzero {-1,0,1}^dim offsets
      std::vector<i64> off(l.dim, -1);
      for (;;) {
        bool nonzero = false;
        for (i64 o : off) nonzero |= (o != 0);
        if (nonzero) {
          cur = c;
          for (int ax = 0; ax < l.dim; ++ax) cur[ax] += off[ax];
          visit(cur);
        }
        int ax = l.dim - 1;
        while (ax >= 0 && off[ax] == 1) off[ax--] = -1;
        if (ax < 0) break;
        ++off[ax];
      }
    }
  }
  PointSet out;
  for (PointId p = 0; p < s.size(); ++p)
    if (dist[p] >= 0) out.push_back(p);
  return out;
}

}  // namespace

PointSet neighborhood(const Space& s, const PointSet& base, const Rat& r, Openness mode) {
  if (base.empty()) return {};
  // zero expansion keeps the set unchanged (rather than the strict open
  // reading, which would be empty)
  if (mode == Openness::open && r.is_zero()) return base;
  if (s.is_lattice() && s.lattice_geometry().norm != Norm::l2)
    return lattice_neighborhood(s, base, r, mode);
  PointSet out;
  for (PointId p = 0; p < s.size(); ++p) {
    for (PointId b : base) {
      Dist d = s.dist(p, b);
      if (mode == Openness::open ? d < r : d <= r) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

Dist set_distance(const Space& s, const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) throw validation_error("distance of empty set");
  bool first = true;
  Dist best;
  for (PointId x : a)
    for (PointId y : b) {
      Dist d = s.dist(x, y);
      if (first || d < best) {
        best = d;
        first = false;
      }
      if (best.is_zero()) return best;
    }
  return best;
}

bool set_contains(const PointSet& sorted, PointId p) {
  return std::binary_search(sorted.begin(), sorted.end(), p);
}

PointSet set_union(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool subset_of(const PointSet& inner, const PointSet& outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

std::vector<Rat> geometric_schedule(i64 cap) {
  std::vector<Rat> out;
  if (cap <= 0) {
    out.emplace_back(0);
    return out;
  }
  for (i64 r = 1; r <= cap; r = narrow_checked(mul_checked(r, 2))) {
    out.emplace_back(r);
    if (r > cap / 2) break;
  }
  if (out.back() != Rat(cap)) out.emplace_back(cap);
  return out;
}

}  // namespace coarsetk

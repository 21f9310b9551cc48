#include "coarsetk/witness.hpp"

#include <algorithm>

namespace coarsetk {

namespace {

i64 fdiv(i64 a, i64 b) {
  i64 q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Points of box [x0,x1] x ... clipped to the lattice, ascending ids.
PointSet clipped_box(const Space& s, const std::vector<std::array<i64, 2>>& want) {
  const auto& l = s.lattice_geometry();
  std::vector<std::array<i64, 2>> rng(l.dim);
  for (int ax = 0; ax < l.dim; ++ax) {
    rng[ax] = {std::max(want[ax][0], l.box[ax][0]), std::min(want[ax][1], l.box[ax][1])};
    if (rng[ax][0] > rng[ax][1]) return {};
  }
  PointSet out;
  std::vector<i64> cur(l.dim);
  for (int ax = 0; ax < l.dim; ++ax) cur[ax] = rng[ax][0];
  for (;;) {
    out.push_back(s.index_of(cur));
    int ax = l.dim - 1;
    while (ax >= 0 && cur[ax] == rng[ax][1]) {
      cur[ax] = rng[ax][0];
      --ax;
    }
    if (ax < 0) break;
    ++cur[ax];
  }
  std::sort(out.begin(), out.end());
  return out;
}

void self_check(const Space& s, const DisjointFamilies& f, const char* what) {
  FamiliesReport rep = validate_families(s, f);
  if (!rep.ok)
    throw validation_error(std::string(what) + " generator produced an invalid family list: " +
                           rep.failure);
}

}  // namespace

// ============================================================================
// Generators
// ============================================================================

DisjointFamilies alternating_blocks(const Space& s, i64 r) {
  const auto& l = s.lattice_geometry();
  if (l.dim != 1) throw validation_error("alternating blocks need a 1-d lattice");
  if (r < 0) throw validation_error("negative scale");
  i64 len = std::max<i64>(r, 1);
  i64 lo = l.box[0][0], hi = l.box[0][1];
  i64 anchor = (lo + hi) / 2 - len / 2;  // a single block absorbs the box once len is large
  DisjointFamilies f;
  f.space_id = s.id();
  f.r = Rat(r);
  f.families.assign(2, {});
  for (i64 j = fdiv(lo - anchor, len);; ++j) {
    i64 a = anchor + j * len;
    if (a > hi) break;
    PointSet blk = clipped_box(s, {{a, a + len - 1}});
    if (!blk.empty()) f.families[static_cast<size_t>(((j % 2) + 2) % 2)].push_back(std::move(blk));
  }
  std::erase_if(f.families, [](const auto& fam) { return fam.empty(); });
  self_check(s, f, "alternating block");
  return f;
}

DisjointFamilies staircase_bricks(const Space& s, i64 r) {
  const auto& l = s.lattice_geometry();
  if (l.dim != 2) throw validation_error("staircase bricks need a 2-d lattice");
  if (r < 0) throw validation_error("negative scale");
  i64 g = std::max<i64>(r, 1);
  i64 xlo = l.box[0][0], xhi = l.box[0][1];
  i64 ylo = l.box[1][0], yhi = l.box[1][1];
  // brick(i,j): x in [ax + 3g*i + g*j, .. + 3g - 1], y in [ay + g*j, .. + g - 1],
  // colour (i - j) mod 3. Anchored near the box centre so one brick
  // eventually swallows the whole box as g grows.
  i64 ax = (xlo + xhi) / 2 - g;
  i64 ay = (ylo + yhi) / 2 - g / 2;
  DisjointFamilies f;
  f.space_id = s.id();
  f.r = Rat(r);
  f.families.assign(3, {});
  i64 jmin = fdiv(ylo - ay - (g - 1), g), jmax = fdiv(yhi - ay, g);
  for (i64 j = jmin; j <= jmax; ++j) {
    i64 imin = fdiv(xlo - ax - g * j - (3 * g - 1), 3 * g);
    i64 imax = fdiv(xhi - ax - g * j, 3 * g);
    for (i64 i = imin; i <= imax; ++i) {
      i64 bx = ax + 3 * g * i + g * j;
      i64 by = ay + g * j;
      PointSet brick = clipped_box(s, {{bx, bx + 3 * g - 1}, {by, by + g - 1}});
      if (brick.empty()) continue;
      size_t colour = static_cast<size_t>((((i - j) % 3) + 3) % 3);
      f.families[colour].push_back(std::move(brick));
    }
  }
  std::erase_if(f.families, [](const auto& fam) { return fam.empty(); });
  self_check(s, f, "staircase brick");
  return f;
}

DisjointFamilies axis_product_blocks(const Space& s, i64 r) {
  const auto& l = s.lattice_geometry();
  if (r < 0) throw validation_error("negative scale");
  if (l.dim > 16) throw validation_error("too many axes for product blocks");
  i64 len = std::max<i64>(r, 1);
  // per-axis alternating segments, anchored at the axis midpoint
  struct Seg {
    std::array<i64, 2> range;
    int parity;
  };
  std::vector<std::vector<Seg>> per_axis(l.dim);
  for (int ax = 0; ax < l.dim; ++ax) {
    i64 lo = l.box[ax][0], hi = l.box[ax][1];
    i64 anchor = (lo + hi) / 2 - len / 2;
    for (i64 j = fdiv(lo - anchor, len);; ++j) {
      i64 a = anchor + j * len;
      if (a > hi) break;
      i64 b = std::min(a + len - 1, hi);
      if (b < lo) continue;
      per_axis[ax].push_back({{std::max(a, lo), b}, static_cast<int>(((j % 2) + 2) % 2)});
    }
  }
  DisjointFamilies f;
  f.space_id = s.id();
  f.r = Rat(r);
  f.families.assign(size_t(1) << l.dim, {});
  std::vector<size_t> pick(l.dim, 0);
  for (;;) {
    std::vector<std::array<i64, 2>> want(l.dim);
    size_t fam = 0;
    for (int ax = 0; ax < l.dim; ++ax) {
      const Seg& seg = per_axis[ax][pick[ax]];
      want[ax] = seg.range;
      fam |= static_cast<size_t>(seg.parity) << ax;
    }
    PointSet cell = clipped_box(s, want);
    if (!cell.empty()) f.families[fam].push_back(std::move(cell));
    int ax = l.dim - 1;
    while (ax >= 0 && pick[ax] + 1 == per_axis[ax].size()) {
      pick[ax] = 0;
      --ax;
    }
    if (ax < 0) break;
    ++pick[ax];
  }
  // drop families that received no cells (tiny boxes)
  std::erase_if(f.families, [](const auto& fam) { return fam.empty(); });
  self_check(s, f, "axis product block");
  return f;
}

DisjointFamilies net_families(const Space& s, i64 r) {
  if (r < 0) throw validation_error("negative scale");
  Rat sep(2 * r);  // centres pairwise > 2r apart
  std::vector<PointId> centres;
  for (PointId p = 0; p < s.size(); ++p) {
    bool taken = true;
    for (PointId c : centres)
      if (s.dist(p, c) <= sep) {
        taken = false;
        break;
      }
    if (taken) centres.push_back(p);
  }
  // nearest-centre cells (ties to the lowest centre index)
  std::vector<PointSet> cells(centres.size());
  for (PointId p = 0; p < s.size(); ++p) {
    size_t best = 0;
    Dist bd = s.dist(p, centres[0]);
    for (size_t c = 1; c < centres.size(); ++c) {
      Dist d = s.dist(p, centres[c]);
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    cells[best].push_back(p);
  }
  // greedy colouring of cells whose separation is <= r
  Rat rr(r);
  std::vector<int> colour(cells.size(), -1);
  int colours = 0;
  for (size_t i = 0; i < cells.size(); ++i) {
    std::vector<char> used(cells.size() + 1, 0);
    for (size_t j = 0; j < i; ++j)
      if (set_distance(s, cells[i], cells[j]) <= rr) used[static_cast<size_t>(colour[j])] = 1;
    int c = 0;
    while (used[static_cast<size_t>(c)]) ++c;
    colour[i] = c;
    colours = std::max(colours, c + 1);
  }
  DisjointFamilies f;
  f.space_id = s.id();
  f.r = rr;
  f.families.assign(static_cast<size_t>(colours), {});
  for (size_t i = 0; i < cells.size(); ++i)
    f.families[static_cast<size_t>(colour[i])].push_back(std::move(cells[i]));
  self_check(s, f, "net");
  return f;
}

DisjointFamilies component_families(const Space& s, const Rat& r) {
  // parts of the graph joining points at distance <= r; distinct parts are
  // more than r apart by maximality
  std::vector<PointId> part(s.size(), -1);
  PointId parts = 0;
  std::vector<PointId> stack;
  for (PointId seed = 0; seed < s.size(); ++seed) {
    if (part[seed] >= 0) continue;
    part[seed] = parts;
    stack.push_back(seed);
    while (!stack.empty()) {
      PointId p = stack.back();
      stack.pop_back();
      for (PointId q = 0; q < s.size(); ++q)
        if (part[q] < 0 && s.dist(p, q) <= r) {
          part[q] = parts;
          stack.push_back(q);
        }
    }
    ++parts;
  }
  DisjointFamilies f;
  f.space_id = s.id();
  f.r = r;
  f.families.assign(1, std::vector<PointSet>(static_cast<size_t>(parts)));
  for (PointId p = 0; p < s.size(); ++p) f.families[0][static_cast<size_t>(part[p])].push_back(p);
  self_check(s, f, "component");
  return f;
}

DisjointFamilies default_families(const Space& s, i64 r) {
  if (s.is_lattice()) {
    int dim = s.lattice_geometry().dim;
    if (dim == 1) return alternating_blocks(s, r);
    if (dim == 2 && s.lattice_geometry().norm != Norm::l2) return staircase_bricks(s, r);
    return axis_product_blocks(s, r);
  }
  return net_families(s, r);
}

// ============================================================================
// Witness assembly
// ============================================================================

Dist DimensionWitness::control_at(const Rat& r) const {
  Dist best;
  for (const auto& sc : scales)
    if (sc.r <= r) best = std::max(best, sc.control);
  return best;
}

ControlFit fit_linear_control(const DimensionWitness& w) {
  ControlFit fit;
  Rat c(0), d(0);
  for (const auto& sc : w.scales) {
    bool exact = false;
    Rat ctrl = Dist::ratio_upper(sc.control, Dist::integer(1), &exact);  // exact for integers,
    if (sc.r.is_zero()) d = std::max(d, ctrl);                           // ceil for square roots
    else c = std::max(c, ctrl / sc.r);
  }
  fit.c = c;
  fit.d = d;
  fit.holds = true;
  for (const auto& sc : w.scales)
    if (!(sc.control <= fit.c * sc.r + fit.d)) fit.holds = false;
  return fit;
}

DimensionWitness witness_from_disjoint_families(const Space& s,
                                                const std::vector<DisjointFamilies>& per_scale) {
  if (per_scale.empty()) throw validation_error("witness needs at least one scale");
  DimensionWitness w;
  w.space_id = s.id();
  int max_fams = 0;
  for (const auto& f : per_scale) {
    FamiliesReport rep = validate_families(s, f);
    if (!rep.ok) {
      std::string detail = rep.failure;
      if (!rep.disjointness.ok)
        detail += ": sets " + std::to_string(rep.disjointness.elem_a) + " and " +
                  std::to_string(rep.disjointness.elem_b) + " at distance " +
                  rep.disjointness.distance.str() + " (points " + s.label(rep.disjointness.point_a) +
                  ", " + s.label(rep.disjointness.point_b) + ")";
      throw validation_error("scale " + f.r.str() + ": " + detail);
    }
    ScaleCertificate sc;
    sc.r = f.r;
    sc.families = f;
    sc.control = rep.mesh;
    sc.verified = true;
    w.scales.push_back(std::move(sc));
    max_fams = std::max(max_fams, static_cast<int>(f.family_count()));
  }
  std::sort(w.scales.begin(), w.scales.end(),
            [](const ScaleCertificate& a, const ScaleCertificate& b) { return a.r < b.r; });
  w.n = max_fams - 1;
  return w;
}

ExpandReport expand_to_lebesgue_cover(const Space& s, const DisjointFamilies& f, const Rat& scale_s,
                                      const Rat& t, const Budget& budget) {
  FamiliesReport frep = validate_families(s, f);
  if (!frep.ok) throw validation_error("families invalid: " + frep.failure);
  if (f.r < scale_s + t * Rat(4))
    throw validation_error("separation " + f.r.str() + " below s + 4t = " +
                           (scale_s + t * Rat(4)).str());
  Rat two_t = t * Rat(2);
  std::vector<PointSet> elems;
  for (const auto& fam : f.families)
    for (const auto& u : fam) {
      PointSet e = t.is_zero() ? u : neighborhood(s, u, two_t, Openness::open);
      elems.push_back(std::move(e));
    }
  ExpandReport rep{Cover::make(s, std::move(elems)), 0, false, true, Dist()};
  rep.mesh = rep.cover.mesh();
  if (!le_affine(rep.mesh, Rat(1), frep.mesh, t * Rat(4)))
    throw validation_error("expanded mesh exceeds families mesh + 4t");
  RMultiplicityResult mult = r_multiplicity(s, rep.cover, scale_s, budget);
  if (!mult.exact)
    throw budget_error("could not certify multiplicity of the expanded cover exactly");
  rep.s_multiplicity = mult.value;
  if (mult.value > static_cast<int>(f.family_count()))
    throw validation_error("expanded cover multiplicity " + std::to_string(mult.value) +
                           " exceeds family count " + std::to_string(f.family_count()));
  bool exact_used = true;
  rep.lebesgue_ok = lebesgue_at_least(s, rep.cover, t, LebesgueMode::exact, budget, &exact_used);
  rep.lebesgue_exact = exact_used;
  if (!rep.lebesgue_ok)
    throw validation_error("expanded cover fails the scale-" + t.str() + " absorption check");
  return rep;
}

DimensionWitness product_zero_dim_witness(const Space& x, const DimensionWitness& wx,
                                          const Space& y, const DimensionWitness& wy,
                                          const Space& product) {
  if (wx.n != 0) throw validation_error("left factor witness must certify dimension 0");
  if (wx.space_id != x.id() || wy.space_id != y.id())
    throw validation_error("witness space ids do not match the factors");
  if (!product.is_product()) throw validation_error("target is not a product space");
  const auto& pg = product.product_geometry();
  if (pg.left->id() != x.id() || pg.right->id() != y.id())
    throw validation_error("product factors do not match the witnesses");
  PointId ny = y.size();

  std::vector<DisjointFamilies> per_scale;
  for (const auto& sy : wy.scales) {
    if (!sy.families) continue;
    const ScaleCertificate* sx = nullptr;
    for (const auto& cand : wx.scales)
      if (cand.r == sy.r && cand.families) {
        sx = &cand;
        break;
      }
    if (!sx) continue;
    const auto& fx = sx->families->families;
    if (fx.size() != 1) throw validation_error("zero-dimension witness must hold one family");
    DisjointFamilies fp;
    fp.space_id = product.id();
    fp.r = sy.r;
    for (const auto& fam_y : sy.families->families) {
      std::vector<PointSet> fam;
      for (const PointSet& v : fx[0])
        for (const PointSet& u : fam_y) {
          PointSet cell;
          cell.reserve(v.size() * u.size());
          for (PointId a : v)
            for (PointId b : u) cell.push_back(a * ny + b);
          fam.push_back(std::move(cell));
        }
      fp.families.push_back(std::move(fam));
    }
    per_scale.push_back(std::move(fp));
  }
  if (per_scale.empty())
    throw validation_error("witnesses share no scale with family certificates");
  return witness_from_disjoint_families(product, per_scale);
}

}  // namespace coarsetk

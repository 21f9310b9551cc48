#include "coarsetk/json_io.hpp"

#include <fstream>

namespace coarsetk {

// ============================================================================
// Exact scalars
// ============================================================================

json rat_to_json(const Rat& r) {
  if (r.is_integer()) return r.num();
  return r.str();
}

Rat rat_from_json(const json& j) {
  if (j.is_number_integer()) return Rat(j.get<i64>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(std::stoll(s));
    return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  }
  throw validation_error("expected an integer or \"p/q\" string");
}

json dist_to_json(const Dist& d) {
  if (d.is_integer()) return d.int_value();
  return "sqrt(" + std::to_string(d.squared()) + ")";
}

Dist dist_from_json(const json& j) {
  if (j.is_number_integer()) return Dist::integer(j.get<i64>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.rfind("sqrt(", 0) == 0 && s.back() == ')')
      return Dist::sqrt_of(std::stoll(s.substr(5, s.size() - 6)));
    return Dist::integer(std::stoll(s));
  }
  throw validation_error("expected an integer or \"sqrt(q)\" string");
}

// ============================================================================
// Space
// ============================================================================

json space_to_json(const Space& s) {
  json j;
  j["id"] = s.id();
  json g;
  if (s.is_lattice()) {
    const auto& l = s.lattice_geometry();
    g["kind"] = "lattice";
    json box = json::array();
    for (const auto& ax : l.box) box.push_back(json::array({ax[0], ax[1]}));
    g["box"] = std::move(box);
    g["norm"] = norm_name(l.norm);
  } else if (s.is_ultrametric()) {
    const auto& u = s.ultra_geometry();
    g["kind"] = "ultrametric";
    g["base"] = u.base;
    g["block_id"] = u.block_id;
    json labels = json::array();
    for (PointId p = 0; p < s.size(); ++p) labels.push_back(s.label(p));
    j["labels"] = std::move(labels);
  } else if (s.is_product()) {
    const auto& pr = s.product_geometry();
    g["kind"] = "product";
    g["left"] = space_to_json(*pr.left);
    g["right"] = space_to_json(*pr.right);
  } else {
    const auto& m = std::get<MatrixGeometry>(s.geometry());
    g["kind"] = "matrix";
    g["n"] = m.n;
    g["d"] = m.d;
    json labels = json::array();
    for (PointId p = 0; p < s.size(); ++p) labels.push_back(s.label(p));
    j["labels"] = std::move(labels);
  }
  j["geometry"] = std::move(g);
  j["scale_cap"] = s.scale_cap();
  return j;
}

Space space_from_json(const json& j) {
  const std::string id = j.at("id").get<std::string>();
  const json& g = j.at("geometry");
  const std::string kind = g.at("kind").get<std::string>();
  std::optional<i64> cap;
  if (j.contains("scale_cap")) cap = j.at("scale_cap").get<i64>();
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();

  if (kind == "lattice") {
    std::vector<std::array<i64, 2>> box;
    for (const auto& ax : g.at("box")) box.push_back({ax.at(0).get<i64>(), ax.at(1).get<i64>()});
    auto norm = norm_from_name(g.at("norm").get<std::string>());
    if (!norm) throw validation_error("unknown norm: " + g.at("norm").get<std::string>());
    return Space::lattice(id, std::move(box), *norm, cap);
  }
  if (kind == "ultrametric") {
    return Space::ultrametric(id, g.at("base").get<i64>(),
                              g.at("block_id").get<std::vector<std::vector<PointId>>>(), cap,
                              std::move(labels));
  }
  if (kind == "product") {
    auto left = std::make_shared<Space>(space_from_json(g.at("left")));
    auto right = std::make_shared<Space>(space_from_json(g.at("right")));
    Space prod = Space::product_max(std::move(left), std::move(right), cap);
    if (prod.id() != id)
      throw validation_error("product space id mismatch: stored " + id + ", rebuilt " + prod.id());
    return prod;
  }
  if (kind == "matrix") {
    return Space::from_matrix(id, g.at("n").get<PointId>(), g.at("d").get<std::vector<i64>>(),
                              cap, std::move(labels));
  }
  throw validation_error("unknown space kind: " + kind);
}

// ============================================================================
// Cover / map / precode
// ============================================================================

json cover_to_json(const Cover& c) {
  json j;
  j["space"] = c.space_id();
  j["covers_space"] = c.covers_space();
  j["elements"] = c.elements();
  return j;
}

Cover cover_from_json(const Space& s, const json& j) {
  if (j.at("space").get<std::string>() != s.id())
    throw validation_error("cover belongs to space " + j.at("space").get<std::string>() +
                           ", not " + s.id());
  bool require_cover = j.value("covers_space", true);
  return Cover::make(s, j.at("elements").get<std::vector<PointSet>>(), require_cover);
}

json map_to_json(const MapTable& m) {
  json j;
  j["domain"] = m.domain_id;
  j["codomain"] = m.codomain_id;
  j["table"] = m.table;
  return j;
}

MapTable map_from_json(const Space& domain, const Space& codomain, const json& j) {
  if (j.at("domain").get<std::string>() != domain.id())
    throw validation_error("map domain is " + j.at("domain").get<std::string>() + ", not " +
                           domain.id());
  if (j.at("codomain").get<std::string>() != codomain.id())
    throw validation_error("map codomain is " + j.at("codomain").get<std::string>() + ", not " +
                           codomain.id());
  return make_map(domain, codomain, j.at("table").get<std::vector<PointId>>());
}

json precode_to_json(const Precode& p) {
  json j;
  j["space"] = p.space_id;
  j["kind"] = p.kind == PrecodeKind::an ? "an" : "plain";
  j["base"] = p.base;
  j["i0"] = p.i0;
  j["an_c"] = rat_to_json(p.an_c);
  j["an_r0"] = rat_to_json(p.an_r0);
  json levels = json::array();
  for (const Cover& lv : p.levels) levels.push_back(cover_to_json(lv));
  j["levels"] = std::move(levels);
  j["parent"] = p.parent;
  return j;
}

Precode precode_from_json(const Space& s, const json& j) {
  Precode p;
  p.space_id = j.at("space").get<std::string>();
  if (p.space_id != s.id())
    throw validation_error("precode belongs to space " + p.space_id + ", not " + s.id());
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "an")
    p.kind = PrecodeKind::an;
  else if (kind == "plain")
    p.kind = PrecodeKind::plain;
  else
    throw validation_error("unknown precode kind: " + kind);
  p.base = j.at("base").get<i64>();
  p.i0 = j.at("i0").get<int>();
  p.an_c = rat_from_json(j.at("an_c"));
  p.an_r0 = rat_from_json(j.at("an_r0"));
  for (const json& lv : j.at("levels")) p.levels.push_back(cover_from_json(s, lv));
  p.parent = j.at("parent").get<std::vector<std::vector<std::int32_t>>>();
  return p;
}

// ============================================================================
// Reports
// ============================================================================

json witness_to_json(const DimensionWitness& w) {
  json j;
  j["space"] = w.space_id;
  j["n"] = w.n;
  json scales = json::array();
  for (const ScaleCertificate& sc : w.scales) {
    json e;
    e["r"] = rat_to_json(sc.r);
    e["control"] = dist_to_json(sc.control);
    e["verified"] = sc.verified;
    if (sc.families) {
      e["form"] = "families";
      e["family_count"] = sc.families->family_count();
    } else if (sc.cover) {
      e["form"] = "cover";
      e["elements"] = sc.cover->size();
      if (sc.lebesgue_bound) e["lebesgue_bound"] = rat_to_json(*sc.lebesgue_bound);
    }
    scales.push_back(std::move(e));
  }
  j["scales"] = std::move(scales);
  return j;
}

json control_fit_to_json(const ControlFit& f) {
  json j;
  j["c"] = rat_to_json(f.c);
  j["d"] = rat_to_json(f.d);
  j["holds"] = f.holds;
  return j;
}

json expand_to_json(const ExpandReport& r) {
  json j;
  j["cover"] = cover_to_json(r.cover);
  j["s_multiplicity"] = r.s_multiplicity;
  j["lebesgue_ok"] = r.lebesgue_ok;
  j["lebesgue_exact"] = r.lebesgue_exact;
  j["mesh"] = dist_to_json(r.mesh);
  return j;
}

namespace {

json rows_to_json(const std::vector<ModulusRow>& rows) {
  json out = json::array();
  for (const ModulusRow& row : rows)
    out.push_back(json{{"r", dist_to_json(row.r)}, {"value", dist_to_json(row.value)}});
  return out;
}

}  // namespace

json map_record_to_json(const MapRecord& r) {
  json j;
  j["map"] = map_to_json(r.map);
  j["delta"] = rows_to_json(r.delta);
  j["gamma"] = rows_to_json(r.gamma);
  j["properness"] = rows_to_json(r.properness);
  j["lipschitz"] = rat_to_json(r.lipschitz);
  j["lipschitz_exact"] = r.lipschitz_exact;
  j["affine_c"] = rat_to_json(r.affine_c);
  j["affine_b"] = rat_to_json(r.affine_b);
  j["quasi_isometric"] = r.quasi_isometric;
  j["qi_b"] = rat_to_json(r.qi_b);
  return j;
}

json equivalence_to_json(const EquivalenceReport& r) {
  json j;
  j["s_on_codomain"] = dist_to_json(r.s_on_codomain);
  j["s_on_domain"] = dist_to_json(r.s_on_domain);
  j["within_cap"] = r.within_cap;
  j["record_f"] = map_record_to_json(r.record_f);
  j["record_g"] = map_record_to_json(r.record_g);
  return j;
}

json bn_to_json(const BnResult& r) {
  json j;
  j["n"] = r.n;
  j["r"] = rat_to_json(r.r);
  j["d_lower"] = dist_to_json(r.d_lower);
  j["d_upper"] = dist_to_json(r.d_upper);
  j["exact"] = r.exact;
  j["minimal"] = r.minimal;
  j["worst_b"] = r.worst_b;
  j["decomposition"] = r.decomposition;
  j["clique_expansions"] = r.clique_expansions;
  j["coloring_nodes"] = r.coloring_nodes;
  return j;
}

json cn_to_json(const CnResult& r) {
  json j;
  j["n"] = r.n;
  j["c"] = rat_to_json(r.c);
  j["r0"] = rat_to_json(r.r0);
  j["holds"] = r.holds;
  j["c_affine"] = rat_to_json(r.c_affine);
  j["d_affine"] = rat_to_json(r.d_affine);
  j["exact"] = r.exact;
  json sched = json::array();
  for (const auto& [rr, bn] : r.schedule)
    sched.push_back(json{{"r", rat_to_json(rr)}, {"check", bn_to_json(bn)}});
  j["schedule"] = std::move(sched);
  return j;
}

json bn_compose_to_json(const BnCompose& r) {
  json j;
  j["map"] = map_to_json(r.map);
  j["parts"] = r.parts;
  j["d_predicted"] = dist_to_json(r.d_predicted);
  j["check"] = bn_to_json(r.check);
  return j;
}

json b_linear_to_json(const BLinearResult& r) {
  json j;
  json sched = json::array();
  for (const auto& [rr, dd] : r.schedule)
    sched.push_back(json{{"r", rat_to_json(rr)}, {"d", dist_to_json(dd)}});
  j["schedule"] = std::move(sched);
  j["d"] = rat_to_json(r.d);
  j["exact"] = r.exact;
  j["binding_r"] = rat_to_json(r.binding_r);
  return j;
}

json precode_report_to_json(const PrecodeReport& r) {
  json j;
  j["ok"] = r.ok;
  j["failure"] = r.failure;
  j["levels_disjoint"] = r.levels_disjoint;
  json mesh = json::array();
  for (const Dist& m : r.level_mesh) mesh.push_back(dist_to_json(m));
  j["level_mesh"] = std::move(mesh);
  json sched = json::array();
  for (const auto& [rr, lvl] : r.schedule)
    sched.push_back(json{{"r", rat_to_json(rr)}, {"level", lvl}});
  j["schedule"] = std::move(sched);
  j["exact"] = r.exact;
  return j;
}

json quotient_to_json(const QuotientCheck& q) {
  json j;
  j["q"] = map_to_json(q.q);
  j["chosen"] = q.chosen;
  j["displacement_ok"] = q.displacement_ok;
  return j;
}

json ultra_build_to_json(const UltraBuild& u) {
  json j;
  j["space"] = space_to_json(u.space);
  j["chain_method"] = u.chain_method;
  j["divergence"] = u.divergence;
  return j;
}

json builder_trace_to_json(const BuilderTrace& t) {
  json j;
  j["provider"] = t.provider;
  j["x0"] = t.x0;
  j["n"] = t.n;
  j["absorbed"] = t.absorbed;
  json levels = json::array();
  for (const LevelBuildRecord& rec : t.levels) {
    json e;
    e["level"] = rec.level;
    e["s"] = rat_to_json(rec.s);
    e["t"] = rat_to_json(rec.t);
    e["ball_radius"] = rat_to_json(rec.ball_radius);
    e["alpha"] = rec.alpha;
    e["tau"] = rec.tau;
    e["provider_elements"] = rec.provider_elements;
    e["mesh"] = dist_to_json(rec.mesh);
    e["mesh_bound"] = rat_to_json(rec.mesh_bound);
    e["scale"] = rat_to_json(rec.scale);
    e["multiplicity"] = rec.multiplicity;
    e["checks"] = rec.checks;
    levels.push_back(std::move(e));
  }
  j["levels"] = std::move(levels);
  return j;
}

// ============================================================================
// Tree exports
// ============================================================================

namespace {

std::string newick_label(const std::string& raw) {
  // keep [A-Za-z0-9._-]; runs of other characters become single interior
  // underscores, so "(3,-4)" renders as "3_-4"
  std::string out;
  out.reserve(raw.size());
  bool pending_sep = false;
  for (char ch : raw) {
    bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
              ch == '.' || ch == '_' || ch == '-';
    if (!ok) {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out.push_back('_');
    pending_sep = false;
    out.push_back(ch);
  }
  return out.empty() ? std::string("x") : out;
}

void newick_node(const Space& base, const Precode& p, int level, std::int32_t elem,
                 const std::vector<std::vector<std::vector<std::int32_t>>>& children,
                 std::string& out) {
  if (level == 0) {
    out += newick_label(base.label(p.levels[0].element(static_cast<size_t>(elem)).front()));
    return;
  }
  const auto& kids = children[static_cast<size_t>(level - 1)][static_cast<size_t>(elem)];
  out += '(';
  for (size_t i = 0; i < kids.size(); ++i) {
    if (i) out += ',';
    newick_node(base, p, level - 1, kids[i], children, out);
  }
  out += ')';
}

}  // namespace

std::string newick_export(const Space& base, const Precode& p) {
  if (p.levels.empty()) throw validation_error("precode has no levels");
  if (p.levels.back().size() != 1) throw validation_error("top level is not a single element");
  // children[i][parent elem at level i+1] = elems at level i, ascending
  std::vector<std::vector<std::vector<std::int32_t>>> children(p.parent.size());
  for (size_t i = 0; i < p.parent.size(); ++i) {
    children[i].resize(p.levels[i + 1].size());
    for (size_t e = 0; e < p.parent[i].size(); ++e)
      children[i][static_cast<size_t>(p.parent[i][e])].push_back(static_cast<std::int32_t>(e));
  }
  std::string out;
  if (p.levels.size() == 1) {
    out += newick_label(base.label(p.levels[0].element(0).front()));
  } else {
    newick_node(base, p, static_cast<int>(p.levels.size()) - 1, 0, children, out);
  }
  out += ';';
  return out;
}

json leaf_matrix_json(const Space& ultra) {
  if (!ultra.is_ultrametric()) throw validation_error("leaf matrix export needs an ultrametric space");
  json j;
  j["id"] = ultra.id();
  json labels = json::array();
  for (PointId p = 0; p < ultra.size(); ++p) labels.push_back(ultra.label(p));
  j["labels"] = std::move(labels);
  json rows = json::array();
  for (PointId a = 0; a < ultra.size(); ++a) {
    json row = json::array();
    for (PointId b = 0; b < ultra.size(); ++b) row.push_back(dist_to_json(ultra.dist(a, b)));
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j;
}

// ============================================================================
// Files
// ============================================================================

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("invalid JSON in " + path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace coarsetk

// coarsetk — covers, dimension witnesses, fiber-decomposition certificates,
// precode structures, and quotient ultrametrics on finite metric spaces.
//
// Exit codes: 0 success, 2 validation failure, 3 budget exhaustion.
// The environment variable COARSETK_BUDGET (either "N" or
// "cliques=N,coloring=M") overrides the default work limits; the --budget
// option overrides both.

#include <array>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coarsetk/builders.hpp"
#include "coarsetk/json_io.hpp"
#include "coarsetk/verify.hpp"

using namespace coarsetk;

namespace {

struct Ctx {
  Budget budget = Budget::from_env();
  std::string budget_text;
  int threads = 1;  // accepted for sweep compatibility; execution is sequential
  int rc = 0;

  void finalize_budget() {
    if (!budget_text.empty()) budget = Budget::parse(budget_text, budget);
  }
};

void emit(const json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(2) << "\n";
  else
    save_json_file(out, j);
}

Space load_space(const std::string& path) { return space_from_json(load_json_file(path)); }

std::array<i64, 2> parse_range(const std::string& text) {
  size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw validation_error("box range must be lo:hi, got \"" + text + "\"");
  try {
    i64 lo = std::stoll(text.substr(0, colon));
    i64 hi = std::stoll(text.substr(colon + 1));
    return {lo, hi};
  } catch (const std::exception&) {
    throw validation_error("box range must be lo:hi with integers, got \"" + text + "\"");
  }
}

Rat parse_rat(const std::string& text) {
  size_t slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rat(std::stoll(text));
    return Rat(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const validation_error&) {
    throw;
  } catch (const std::exception&) {
    throw validation_error("expected a nonnegative rational (p or p/q), got \"" + text + "\"");
  }
}

std::string trace_path_for(const std::string& out) {
  size_t dot = out.rfind(".json");
  if (dot != std::string::npos && dot == out.size() - 5)
    return out.substr(0, dot) + ".trace.json";
  return out + ".trace.json";
}

// ----------------------------------------------------------------------------
// space
// ----------------------------------------------------------------------------

void add_space(CLI::App& app, Ctx& ctx) {
  CLI::App* space = app.add_subcommand("space", "Generate and validate metric spaces");
  space->require_subcommand(1);

  struct Opts1 {
    int lattice = 1;
    std::vector<std::string> box;
    std::string norm = "l1";
    std::string id;
    i64 cap = -1;
    std::string out;
  };
  auto gen_opts = std::make_shared<Opts1>();
  CLI::App* gen = space->add_subcommand("gen", "Generate a lattice space");
  gen->add_option("--lattice", gen_opts->lattice, "Number of dimensions")->check(CLI::Range(1, 8));
  gen->add_option("--box", gen_opts->box, "Coordinate range lo:hi (once per axis, or once for all)")
      ->required();
  gen->add_option("--norm", gen_opts->norm, "Metric: l1, linf, or l2");
  gen->add_option("--id", gen_opts->id, "Space id (default derived from the box)");
  gen->add_option("--cap", gen_opts->cap, "Scale cap override (default: diameter)");
  gen->add_option("--out", gen_opts->out, "Output file (default stdout)");
  gen->callback([gen_opts, &ctx] {
    ctx.finalize_budget();
    std::vector<std::array<i64, 2>> box;
    if (gen_opts->box.size() == 1)
      box.assign(static_cast<size_t>(gen_opts->lattice), parse_range(gen_opts->box[0]));
    else
      for (const std::string& b : gen_opts->box) box.push_back(parse_range(b));
    if (static_cast<int>(box.size()) != gen_opts->lattice)
      throw validation_error("expected " + std::to_string(gen_opts->lattice) +
                             " box ranges, got " + std::to_string(box.size()));
    std::optional<Norm> norm = norm_from_name(gen_opts->norm);
    if (!norm) throw validation_error("unknown norm \"" + gen_opts->norm + "\"");
    std::string id = gen_opts->id;
    if (id.empty()) {
      id = "lattice" + std::to_string(gen_opts->lattice) + "d";
      for (const auto& [lo, hi] : box)
        id += "_" + std::to_string(lo) + ":" + std::to_string(hi);
      id += "_" + gen_opts->norm;
    }
    std::optional<i64> cap;
    if (gen_opts->cap >= 0) cap = gen_opts->cap;
    emit(space_to_json(Space::lattice(id, box, *norm, cap)), gen_opts->out);
  });

  struct Opts2 {
    std::string file;
  };
  auto val_opts = std::make_shared<Opts2>();
  CLI::App* val = space->add_subcommand("validate", "Validate a space file (metric axioms)");
  val->add_option("file", val_opts->file, "Space JSON")->required();
  val->callback([val_opts, &ctx] {
    ctx.finalize_budget();
    Space s = load_space(val_opts->file);
    json j;
    j["id"] = s.id();
    j["points"] = s.size();
    j["diameter"] = dist_to_json(s.diameter());
    j["scale_cap"] = s.scale_cap();
    j["valid"] = true;
    emit(j, "");
  });
}

// ----------------------------------------------------------------------------
// cover
// ----------------------------------------------------------------------------

void add_cover(CLI::App& app, Ctx& ctx) {
  CLI::App* cover = app.add_subcommand("cover", "Cover invariants");
  cover->require_subcommand(1);

  struct Opts3 {
    std::string space, cover, out;
    std::vector<std::string> scales;
    std::string mode = "exact";
  };
  auto opts = std::make_shared<Opts3>();
  CLI::App* rep = cover->add_subcommand("report", "Mesh, multiplicity, and Lebesgue number");
  rep->add_option("--space", opts->space, "Space JSON")->required();
  rep->add_option("--cover", opts->cover, "Cover JSON")->required();
  rep->add_option("--r", opts->scales, "Also report r-multiplicity at these scales");
  rep->add_option("--mode", opts->mode, "Lebesgue mode: exact or ball");
  rep->add_option("--out", opts->out, "Output file (default stdout)");
  rep->callback([opts, &ctx] {
    ctx.finalize_budget();
    Space s = load_space(opts->space);
    Cover c = cover_from_json(s, load_json_file(opts->cover));
    LebesgueMode mode;
    if (opts->mode == "exact")
      mode = LebesgueMode::exact;
    else if (opts->mode == "ball")
      mode = LebesgueMode::ball_certificate;
    else
      throw validation_error("unknown Lebesgue mode \"" + opts->mode + "\"");
    LebesgueResult leb = lebesgue_number(s, c, mode, ctx.budget);
    json j;
    j["space"] = s.id();
    j["elements"] = c.size();
    j["mesh"] = dist_to_json(c.mesh());
    j["multiplicity"] = c.multiplicity();
    j["pairwise_disjoint"] = c.pairwise_disjoint();
    json lj;
    lj["value"] = dist_to_json(leb.value);
    lj["at_cap"] = leb.at_cap;
    lj["mode"] = leb.mode_used == LebesgueMode::exact ? "exact" : "ball";
    lj["exact"] = leb.exact;
    if (!leb.witness_bad_set.empty()) lj["witness_bad_set"] = leb.witness_bad_set;
    j["lebesgue"] = lj;
    if (!opts->scales.empty()) {
      json arr = json::array();
      for (const std::string& rt : opts->scales) {
        Rat r = parse_rat(rt);
        RMultiplicityResult m = r_multiplicity(s, c, r, ctx.budget);
        json mj;
        mj["r"] = rat_to_json(r);
        mj["value"] = m.value;
        mj["exact"] = m.exact;
        mj["witness"] = m.witness;
        arr.push_back(mj);
      }
      j["r_multiplicity"] = arr;
    }
    emit(j, opts->out);
  });
}

// ----------------------------------------------------------------------------
// dim
// ----------------------------------------------------------------------------

void add_dim(CLI::App& app, Ctx& ctx) {
  CLI::App* dim = app.add_subcommand("dim", "Dimension witnesses");
  dim->require_subcommand(1);

  struct Opts4 {
    std::string space, out;
    int n = 0;
    i64 r_max = -1;
  };
  auto opts = std::make_shared<Opts4>();
  CLI::App* wit = dim->add_subcommand(
      "witness", "Build and verify a dimension witness from separated families");
  wit->add_option("--space", opts->space, "Space JSON")->required();
  wit->add_option("--n", opts->n, "Claimed dimension bound")->required();
  wit->add_option("--r-max", opts->r_max, "Largest scale (default: scale cap)");
  wit->add_option("--out", opts->out, "Output file (default stdout)");
  wit->callback([opts, &ctx] {
    ctx.finalize_budget();
    Space s = load_space(opts->space);
    i64 cap = opts->r_max >= 0 ? std::min(opts->r_max, s.scale_cap()) : s.scale_cap();
    std::vector<DisjointFamilies> per_scale;
    for (const Rat& r : geometric_schedule(cap)) {
      i64 ri = r.num() / r.den();
      per_scale.push_back(default_families(s, ri));
    }
    DimensionWitness w = witness_from_disjoint_families(s, per_scale);
    if (w.n > opts->n)
      throw validation_error("families need dimension " + std::to_string(w.n) +
                             ", above the claimed bound " + std::to_string(opts->n));
    ControlFit fit = fit_linear_control(w);
    json j = witness_to_json(w);
    j["claimed_n"] = opts->n;
    j["control_fit"] = control_fit_to_json(fit);
    emit(j, opts->out);
  });
}

// ----------------------------------------------------------------------------
// map
// ----------------------------------------------------------------------------

void add_map(CLI::App& app, Ctx& ctx) {
  CLI::App* map = app.add_subcommand("map", "Map moduli and fiber-decomposition certificates");
  map->require_subcommand(1);

  struct Opts5 {
    std::string domain, codomain, map, out;
  };
  auto fo = std::make_shared<Opts5>();
  CLI::App* fit = map->add_subcommand("fit", "Expansion/separation/properness moduli");
  fit->add_option("--domain", fo->domain, "Domain space JSON")->required();
  fit->add_option("--codomain", fo->codomain, "Codomain space JSON")->required();
  fit->add_option("--map", fo->map, "Map JSON")->required();
  fit->add_option("--out", fo->out, "Output file (default stdout)");
  fit->callback([fo, &ctx] {
    ctx.finalize_budget();
    Space x = load_space(fo->domain), y = load_space(fo->codomain);
    MapTable f = map_from_json(x, y, load_json_file(fo->map));
    emit(map_record_to_json(fit_moduli(x, y, f)), fo->out);
  });

  struct Opts6 {
    std::string domain, codomain, f, g;
  };
  auto co = std::make_shared<Opts6>();
  CLI::App* close = map->add_subcommand("close", "Max displacement between two parallel maps");
  close->add_option("--domain", co->domain, "Domain space JSON")->required();
  close->add_option("--codomain", co->codomain, "Codomain space JSON")->required();
  close->add_option("--f", co->f, "First map JSON")->required();
  close->add_option("--g", co->g, "Second map JSON")->required();
  close->callback([co, &ctx] {
    ctx.finalize_budget();
    Space x = load_space(co->domain), y = load_space(co->codomain);
    MapTable f = map_from_json(x, y, load_json_file(co->f));
    MapTable g = map_from_json(x, y, load_json_file(co->g));
    json j;
    j["closeness"] = dist_to_json(check_close(x, y, f, g));
    emit(j, "");
  });

  struct Opts7 {
    std::string x, y, f, g, out;
  };
  auto eo = std::make_shared<Opts7>();
  CLI::App* equiv = map->add_subcommand("equiv", "Coarse equivalence certificate for (f, g)");
  equiv->add_option("--x", eo->x, "First space JSON (domain of f)")->required();
  equiv->add_option("--y", eo->y, "Second space JSON (domain of g)")->required();
  equiv->add_option("--f", eo->f, "Map X -> Y JSON")->required();
  equiv->add_option("--g", eo->g, "Map Y -> X JSON")->required();
  equiv->add_option("--out", eo->out, "Output file (default stdout)");
  equiv->callback([eo, &ctx] {
    ctx.finalize_budget();
    Space x = load_space(eo->x), y = load_space(eo->y);
    MapTable f = map_from_json(x, y, load_json_file(eo->f));
    MapTable g = map_from_json(y, x, load_json_file(eo->g));
    emit(equivalence_to_json(check_coarse_equivalence(x, y, f, g)), eo->out);
  });

  struct Opts8 {
    std::string domain, codomain, map, r, out;
    int n = 1;
  };
  auto bo = std::make_shared<Opts8>();
  auto add_b = [&](CLI::App* cmd, bool with_n) {
    cmd->add_option("--domain", bo->domain, "Domain space JSON")->required();
    cmd->add_option("--codomain", bo->codomain, "Codomain space JSON")->required();
    cmd->add_option("--map", bo->map, "Map JSON")->required();
    if (with_n) cmd->add_option("--n", bo->n, "Number of parts")->required();
    cmd->add_option("--r", bo->r, "Codomain subset diameter bound")->required();
    cmd->add_option("--out", bo->out, "Output file (default stdout)");
  };
  CLI::App* checkb = map->add_subcommand(
      "check-b", "Minimal d with every diameter-r preimage of diameter <= d (one part)");
  add_b(checkb, false);
  checkb->callback([bo, &ctx] {
    ctx.finalize_budget();
    Space x = load_space(bo->domain), y = load_space(bo->codomain);
    MapTable f = map_from_json(x, y, load_json_file(bo->map));
    emit(bn_to_json(check_bn(x, y, f, 1, parse_rat(bo->r), ctx.budget)), bo->out);
  });
  CLI::App* checkbn = map->add_subcommand(
      "check-bn", "Minimal d with every diameter-r preimage split into n parts of diameter <= d");
  add_b(checkbn, true);
  checkbn->callback([bo, &ctx] {
    ctx.finalize_budget();
    Space x = load_space(bo->domain), y = load_space(bo->codomain);
    MapTable f = map_from_json(x, y, load_json_file(bo->map));
    emit(bn_to_json(check_bn(x, y, f, bo->n, parse_rat(bo->r), ctx.budget)), bo->out);
  });

  struct Opts9 {
    std::string domain, codomain, map, out;
    int n = 1;
  };
  auto cno = std::make_shared<Opts9>();
  CLI::App* checkcn =
      map->add_subcommand("check-cn", "Linear control fit over the geometric scale schedule");
  checkcn->add_option("--domain", cno->domain, "Domain space JSON")->required();
  checkcn->add_option("--codomain", cno->codomain, "Codomain space JSON")->required();
  checkcn->add_option("--map", cno->map, "Map JSON")->required();
  checkcn->add_option("--n", cno->n, "Number of parts")->required();
  checkcn->add_option("--out", cno->out, "Output file (default stdout)");
  checkcn->callback([cno, &ctx] {
    ctx.finalize_budget();
    Space x = load_space(cno->domain), y = load_space(cno->codomain);
    MapTable f = map_from_json(x, y, load_json_file(cno->map));
    emit(cn_to_json(check_cn(x, y, f, cno->n, ctx.budget)), cno->out);
  });

  struct Opts10 {
    std::string domain, codomain, map, out;
  };
  auto blo = std::make_shared<Opts10>();
  CLI::App* checkbl = map->add_subcommand(
      "check-b-linear", "Linear preimage-selection bound over the scale schedule");
  checkbl->add_option("--domain", blo->domain, "Domain space JSON")->required();
  checkbl->add_option("--codomain", blo->codomain, "Codomain space JSON")->required();
  checkbl->add_option("--map", blo->map, "Map JSON")->required();
  checkbl->add_option("--out", blo->out, "Output file (default stdout)");
  checkbl->callback([blo, &ctx] {
    ctx.finalize_budget();
    Space x = load_space(blo->domain), y = load_space(blo->codomain);
    MapTable f = map_from_json(x, y, load_json_file(blo->map));
    emit(b_linear_to_json(check_b_linear(x, y, f, ctx.budget)), blo->out);
  });
}

// ----------------------------------------------------------------------------
// precode
// ----------------------------------------------------------------------------

void add_precode(CLI::App& app, Ctx& ctx) {
  CLI::App* pre = app.add_subcommand("precode", "Nested level structures and their quotients");
  pre->require_subcommand(1);

  struct Opts11 {
    std::string kind;
    i64 n = 8;
    int k = 2;
    bool an = false;
    i64 b = 2, s = 8;
    int l = 3;
    std::string out_space, out_precode;
  };
  auto bo = std::make_shared<Opts11>();
  CLI::App* build = pre->add_subcommand("build-example", "Stock structures");
  build->add_option("--kind", bo->kind, "dyadic, triadic, or clusters")->required();
  build->add_option("--n", bo->n, "dyadic: number of points (power of two)");
  build->add_option("--k", bo->k, "triadic: top level index");
  build->add_flag("--an", bo->an, "triadic: tag with geometric mesh constants");
  build->add_option("--b", bo->b, "clusters: branching factor");
  build->add_option("--l", bo->l, "clusters: number of levels");
  build->add_option("--s", bo->s, "clusters: coordinate spread");
  build->add_option("--out-space", bo->out_space, "Space output file")->required();
  build->add_option("--out-precode", bo->out_precode, "Structure output file")->required();
  build->callback([bo, &ctx] {
    ctx.finalize_budget();
    PrecodeExample ex = [&] {
      if (bo->kind == "dyadic") return example_dyadic(bo->n);
      if (bo->kind == "triadic") return example_triadic(bo->k, bo->an);
      if (bo->kind == "clusters") return example_clusters(bo->b, bo->l, bo->s);
      throw validation_error("unknown example kind \"" + bo->kind + "\"");
    }();
    save_json_file(bo->out_space, space_to_json(ex.space));
    save_json_file(bo->out_precode, precode_to_json(ex.precode));
  });

  struct Opts12 {
    std::string space, precode, out;
    int n = 1;
  };
  auto vo = std::make_shared<Opts12>();
  CLI::App* val = pre->add_subcommand("validate", "Full structure validation");
  val->add_option("--space", vo->space, "Space JSON")->required();
  val->add_option("--precode", vo->precode, "Structure JSON")->required();
  val->add_option("--n", vo->n, "Multiplicity bound per scheduled scale")->required();
  val->add_option("--out", vo->out, "Output file (default stdout)");
  val->callback([vo, &ctx] {
    ctx.finalize_budget();
    Space s = load_space(vo->space);
    Precode p = precode_from_json(s, load_json_file(vo->precode));
    PrecodeReport rep = validate_precode(s, p, vo->n, ctx.budget);
    emit(precode_report_to_json(rep), vo->out);
    if (!rep.exact) throw budget_error(rep.ok ? "validation incomplete within the work budget"
                                              : rep.failure);
    if (!rep.ok) throw validation_error(rep.failure);
  });

  struct Opts13 {
    std::string space, precode, out, report;
  };
  auto uo = std::make_shared<Opts13>();
  CLI::App* ultra = pre->add_subcommand("ultrametric", "Quotient ultrametric space");
  ultra->add_option("--space", uo->space, "Space JSON")->required();
  ultra->add_option("--precode", uo->precode, "Structure JSON")->required();
  ultra->add_option("--out", uo->out, "Ultrametric space output file")->required();
  ultra->add_option("--report", uo->report, "Build report output file");
  ultra->callback([uo, &ctx] {
    ctx.finalize_budget();
    Space s = load_space(uo->space);
    Precode p = precode_from_json(s, load_json_file(uo->precode));
    UltraBuild ub = build_ultrametric(s, p);
    save_json_file(uo->out, space_to_json(ub.space));
    if (!uo->report.empty()) save_json_file(uo->report, ultra_build_to_json(ub));
  });

  struct Opts14 {
    std::string space, precode, out, out_map, section;
  };
  auto qo = std::make_shared<Opts14>();
  CLI::App* quot = pre->add_subcommand("quotient", "Quotient map and its displacement bound");
  quot->add_option("--space", qo->space, "Space JSON")->required();
  quot->add_option("--precode", qo->precode, "Structure JSON")->required();
  quot->add_option("--out", qo->out, "Report output file (default stdout)");
  quot->add_option("--out-map", qo->out_map, "Quotient map output file");
  quot->add_option("--section", qo->section, "Also emit the inverse section (needs n=1)");
  quot->callback([qo, &ctx] {
    ctx.finalize_budget();
    Space s = load_space(qo->space);
    Precode p = precode_from_json(s, load_json_file(qo->precode));
    UltraBuild ub = build_ultrametric(s, p);
    QuotientCheck qc = quotient_map(s, p, ub.space);
    if (!qo->out_map.empty()) save_json_file(qo->out_map, map_to_json(qc.q));
    if (!qo->section.empty())
      save_json_file(qo->section, map_to_json(inverse_section(s, p, ub.space, ctx.budget)));
    emit(quotient_to_json(qc), qo->out);
    if (!qc.displacement_ok) throw validation_error("quotient displacement bound failed");
  });
}

// ----------------------------------------------------------------------------
// build
// ----------------------------------------------------------------------------

void add_build(CLI::App& app, Ctx& ctx) {
  CLI::App* build = app.add_subcommand("build", "Inductive precode construction");
  build->require_subcommand(1);

  struct Opts15 {
    std::string space, provider = "grid-brick", out;
    int n = 1;
    i64 x0 = -1;
    int levels = 16;
  };
  auto opts = std::make_shared<Opts15>();
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--space", opts->space, "Space JSON")->required();
    cmd->add_option("--n", opts->n, "Dimension bound (levels carry multiplicity <= n+1)")
        ->required();
    cmd->add_option("--provider", opts->provider, "grid-brick, greedy-net, or component");
    cmd->add_option("--x0", opts->x0, "Base point index (default 0)");
    cmd->add_option("--levels", opts->levels, "Merge step cap");
    cmd->add_option("--out", opts->out, "Structure output file (trace written alongside)")
        ->required();
  };
  auto run = [opts, &ctx](bool an) {
    ctx.finalize_budget();
    Space s = load_space(opts->space);
    std::unique_ptr<ControlCoverProvider> provider = make_provider(opts->provider);
    PointId x0 = opts->x0 < 0 ? 0 : static_cast<PointId>(opts->x0);
    BuiltPrecode bp = an ? build_precode_an(s, opts->n, *provider, x0, opts->levels, ctx.budget)
                         : build_precode_asdim(s, opts->n, *provider, x0, opts->levels, ctx.budget);
    save_json_file(opts->out, precode_to_json(bp.precode));
    save_json_file(trace_path_for(opts->out), builder_trace_to_json(bp.trace));
    if (!bp.trace.absorbed) throw validation_error("level cap reached before absorption");
  };

  CLI::App* asdim = build->add_subcommand(
      "asdim", "Additive scale steps: level k has k-multiplicity <= n+1");
  add_common(asdim);
  asdim->callback([run] { run(false); });

  CLI::App* an = build->add_subcommand(
      "an", "Geometric scale steps: mesh(level i) <= base^i with measured (c, r0)");
  add_common(an);
  an->callback([run] { run(true); });
}

// ----------------------------------------------------------------------------
// verify / export
// ----------------------------------------------------------------------------

void add_verify(CLI::App& app, Ctx& ctx) {
  struct Opts16 {
    std::string suite, out;
    std::uint64_t seed = 0;
  };
  auto opts = std::make_shared<Opts16>();
  CLI::App* verify = app.add_subcommand("verify", "Run a named check suite");
  verify->add_option("--suite", opts->suite, "lemmas, examples, builders, or all")->required();
  verify->add_option("--seed", opts->seed, "Seed for the randomized instances");
  verify->add_option("--out", opts->out, "Also write the report to this file");
  verify->callback([opts, &ctx] {
    ctx.finalize_budget();
    SuiteReport rep = run_suite(opts->suite, opts->seed, ctx.budget);
    std::string text = render_report(rep);
    std::cout << text;
    if (!opts->out.empty()) {
      std::ofstream f(opts->out, std::ios::binary);
      if (!f) throw validation_error("cannot write " + opts->out);
      f << text;
    }
    if (!rep.all_pass()) ctx.rc = 2;
  });
}

void add_export(CLI::App& app, Ctx& ctx) {
  CLI::App* exp = app.add_subcommand("export", "Tree and matrix exports");
  exp->require_subcommand(1);

  struct Opts17 {
    std::string space, precode, format = "newick", out;
  };
  auto opts = std::make_shared<Opts17>();
  CLI::App* tree = exp->add_subcommand("tree", "Level hierarchy as Newick or distance matrix");
  tree->add_option("--space", opts->space, "Space JSON")->required();
  tree->add_option("--precode", opts->precode, "Structure JSON")->required();
  tree->add_option("--format", opts->format, "newick or json");
  tree->add_option("--out", opts->out, "Output file (default stdout)");
  tree->callback([opts, &ctx] {
    ctx.finalize_budget();
    Space s = load_space(opts->space);
    Precode p = precode_from_json(s, load_json_file(opts->precode));
    // structural validation only: with n = |space| every scale is satisfied
    // at level 0, so failures here are genuine structure defects
    PrecodeReport rep = validate_precode(s, p, s.size(), ctx.budget);
    if (!rep.ok) throw validation_error("structure does not validate: " + rep.failure);
    if (opts->format == "newick") {
      std::string text = newick_export(s, p) + "\n";
      if (opts->out.empty())
        std::cout << text;
      else {
        std::ofstream f(opts->out, std::ios::binary);
        if (!f) throw validation_error("cannot write " + opts->out);
        f << text;
      }
    } else if (opts->format == "json") {
      UltraBuild ub = build_ultrametric(s, p);
      emit(leaf_matrix_json(ub.space), opts->out);
    } else {
      throw validation_error("unknown export format \"" + opts->format + "\"");
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  Ctx ctx;
  CLI::App app{
      "coarsetk — covers, dimension witnesses, fiber-decomposition certificates, and quotient "
      "ultrametrics on finite metric spaces"};
  app.require_subcommand(1);
  app.add_option("--budget", ctx.budget_text,
                 "Work limits: N or cliques=N,coloring=M (overrides COARSETK_BUDGET)");
  app.add_option("--threads", ctx.threads,
                 "Sweep parallelism cap (accepted for compatibility; runs sequentially)");

  add_space(app, ctx);
  add_cover(app, ctx);
  add_dim(app, ctx);
  add_map(app, ctx);
  add_precode(app, ctx);
  add_build(app, ctx);
  add_verify(app, ctx);
  add_export(app, ctx);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const budget_error& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return 3;
  } catch (const validation_error& e) {
    std::cerr << "validation failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return ctx.rc;
}

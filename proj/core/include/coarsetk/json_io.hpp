#pragma once

#include <json.hpp>

#include "coarsetk/builders.hpp"
#include "coarsetk/precode.hpp"
#include "coarsetk/witness.hpp"

namespace coarsetk {

using json = nlohmann::ordered_json;

// ============================================================================
// Exact scalars: integers stay JSON numbers; "p/q" and "sqrt(q)" otherwise
// ============================================================================

json rat_to_json(const Rat& r);
Rat rat_from_json(const json& j);
json dist_to_json(const Dist& d);
Dist dist_from_json(const json& j);

// ============================================================================
// Core structures (round-trip)
// ============================================================================

json space_to_json(const Space& s);
Space space_from_json(const json& j);

json cover_to_json(const Cover& c);
Cover cover_from_json(const Space& s, const json& j);

json map_to_json(const MapTable& m);
MapTable map_from_json(const Space& domain, const Space& codomain, const json& j);

json precode_to_json(const Precode& p);
Precode precode_from_json(const Space& s, const json& j);

// ============================================================================
// Reports (one-way)
// ============================================================================

json witness_to_json(const DimensionWitness& w);
json control_fit_to_json(const ControlFit& f);
json expand_to_json(const ExpandReport& r);
json map_record_to_json(const MapRecord& r);
json equivalence_to_json(const EquivalenceReport& r);
json bn_to_json(const BnResult& r);
json cn_to_json(const CnResult& r);
json bn_compose_to_json(const BnCompose& r);
json b_linear_to_json(const BLinearResult& r);
json precode_report_to_json(const PrecodeReport& r);
json quotient_to_json(const QuotientCheck& q);
json ultra_build_to_json(const UltraBuild& u);
json builder_trace_to_json(const BuilderTrace& t);

// ============================================================================
// Tree exports
// ============================================================================

/// Newick form of the level hierarchy: leaves are level-0 elements labeled
/// by their minimum point's base-space label (sanitized), nesting follows
/// the parent rows up to the single top element.
std::string newick_export(const Space& base, const Precode& p);

/// Leaf-to-leaf distance matrix of an ultrametric space.
json leaf_matrix_json(const Space& ultra);

// ============================================================================
// Files
// ============================================================================

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace coarsetk

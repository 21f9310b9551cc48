#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coarsetk/exact.hpp"

namespace coarsetk {

using PointId = std::int32_t;
/// A subset of a space: strictly increasing point indices.
using PointSet = std::vector<PointId>;

enum class Norm { l1, linf, l2 };

std::string norm_name(Norm n);
std::optional<Norm> norm_from_name(const std::string& s);

/// Explicit distance matrix, validated as a metric on construction.
struct MatrixGeometry {
  PointId n = 0;
  std::vector<i64> d;  // row-major n*n
};

/// Integer box in Z^m under an l1, linf, or l2 norm. Points are indexed
/// row-major along the axes in order.
struct LatticeGeometry {
  int dim = 0;
  std::vector<std::array<i64, 2>> box;  // inclusive [lo, hi] per axis
  Norm norm = Norm::l1;
};

/// Hierarchical block structure: distance between distinct leaves is
/// base^p where p is the first level at which their blocks coincide.
/// Level 0 separates all leaves; the last level has a single block.
struct UltraGeometry {
  i64 base = 3;
  std::vector<std::vector<PointId>> block_id;  // [level][leaf] -> block
};

class Space;

/// Product of two spaces under the max metric; index = left * n_right + right.
struct ProductGeometry {
  std::shared_ptr<const Space> left;
  std::shared_ptr<const Space> right;
};

// ============================================================================
// Space
// ============================================================================

/// Finite metric space with an exact distance function and a scale cap.
/// All statements the toolkit certifies are relative to scales <= scale_cap.
class Space {
public:
  using Geometry = std::variant<MatrixGeometry, LatticeGeometry, UltraGeometry, ProductGeometry>;

  static Space from_matrix(std::string id, PointId n, std::vector<i64> dist_rowmajor,
                           std::optional<i64> scale_cap = std::nullopt,
                           std::vector<std::string> labels = {});
  static Space lattice(std::string id, std::vector<std::array<i64, 2>> box, Norm norm,
                       std::optional<i64> scale_cap = std::nullopt);
  static Space ultrametric(std::string id, i64 base, std::vector<std::vector<PointId>> block_id,
                           std::optional<i64> scale_cap = std::nullopt,
                           std::vector<std::string> leaf_labels = {});
  static Space product_max(std::shared_ptr<const Space> left, std::shared_ptr<const Space> right,
                           std::optional<i64> scale_cap = std::nullopt);

  const std::string& id() const { return id_; }
  PointId size() const { return size_; }
  i64 scale_cap() const { return scale_cap_; }
  const Geometry& geometry() const { return geom_; }

  Dist dist(PointId a, PointId b) const;
  Dist diameter() const;
  std::string label(PointId p) const;

  /// Sorted distinct distance values occurring in the space (including 0).
  /// For product spaces this is the merged candidate superset of the
  /// component value sets, which contains every realized value.
  const std::vector<Dist>& distance_values() const;

  bool is_lattice() const { return std::holds_alternative<LatticeGeometry>(geom_); }
  bool is_ultrametric() const { return std::holds_alternative<UltraGeometry>(geom_); }
  bool is_product() const { return std::holds_alternative<ProductGeometry>(geom_); }

  const LatticeGeometry& lattice_geometry() const { return std::get<LatticeGeometry>(geom_); }
  const UltraGeometry& ultra_geometry() const { return std::get<UltraGeometry>(geom_); }
  const ProductGeometry& product_geometry() const { return std::get<ProductGeometry>(geom_); }

  /// Lattice coordinates of a point (lattice spaces only).
  std::vector<i64> coords(PointId p) const;
  PointId index_of(const std::vector<i64>& coords) const;

  /// First level at which two leaves share a block (ultrametric spaces only).
  int shared_level(PointId a, PointId b) const;
  int ultra_levels() const;  // number of levels

private:
  Space() = default;
  void finish_init(std::optional<i64> cap);
  Dist computed_diameter() const;

  std::string id_;
  Geometry geom_;
  PointId size_ = 0;
  i64 scale_cap_ = 0;
  std::vector<std::string> labels_;
  std::vector<i64> strides_;  // lattice indexing
  Dist diameter_;
  mutable std::vector<Dist> distance_values_;  // lazy
};

// ============================================================================
// Point set operations
// ============================================================================

void require_sorted_subset(const Space& s, const PointSet& pts);

/// Largest pairwise distance within `pts` (0 for empty or singleton sets).
Dist set_diameter(const Space& s, const PointSet& pts);

/// Closed ball: all points within distance <= r of `center`.
PointSet ball(const Space& s, PointId center, const Rat& r);

enum class Openness { open, closed };

/// Points within distance < r (open) or <= r (closed) of the set `base`.
PointSet neighborhood(const Space& s, const PointSet& base, const Rat& r,
                      Openness mode = Openness::open);

/// Exact distance between nonempty sets: min over cross pairs.
Dist set_distance(const Space& s, const PointSet& a, const PointSet& b);

bool set_contains(const PointSet& sorted, PointId p);
PointSet set_union(const PointSet& a, const PointSet& b);
bool subset_of(const PointSet& inner, const PointSet& outer);

/// Geometric scale schedule {1, 2, 4, ...} capped at `cap`, with `cap`
/// itself appended when not already a power of two in range.
std::vector<Rat> geometric_schedule(i64 cap);

}  // namespace coarsetk

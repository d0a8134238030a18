#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace pdwg {

using Point = Eigen::Vector2d;
using Vec2 = Eigen::Vector2d;

enum class DomainKind { UnitSquare, LShape, Polygon };

/// A polygonal computational domain. The boundary loop is simple and
/// counterclockwise.
struct Domain {
  DomainKind kind = DomainKind::UnitSquare;
  std::vector<Point> vertices;

  static Domain unit_square();
  /// (0,0),(0.5,0),(0.5,0.5),(1,0.5),(1,1),(0,1)
  static Domain l_shape();
  static Domain polygon(std::vector<Point> loop);

  [[nodiscard]] double area() const;
  /// Even-odd point-in-polygon test; points on the boundary count as inside.
  [[nodiscard]] bool contains(const Point& p, double tol = 1e-12) const;
};

enum class EdgeTag : std::uint8_t { Interior, Unclassified, Dirichlet, Neumann };

/// Edge index together with the sign relating the triangle's outward normal
/// to the edge's global normal.
struct EdgeRef {
  int edge = -1;
  int sign = 0;
};

struct EdgeFrame {
  Point midpoint;
  Vec2 tangent;  // lower -> higher vertex index
  Vec2 normal;   // tangent rotated by +90 degrees
  double length = 0.0;
};

using BoundaryClassifier = std::function<EdgeTag(const Point& midpoint, const Vec2& outward_normal)>;

/// Conforming triangulation with edge topology. Immutable once built; the
/// tagging and refinement operations return new meshes.
///
/// Local edge j of a triangle joins its vertices j and (j+1)%3, so the
/// outward normal of that edge is the counterclockwise traversal direction
/// rotated by -90 degrees.
class Mesh {
public:
  Mesh() = default;
  /// Builds the edge topology. Triangles must be counterclockwise with
  /// strictly positive area; boundary edges start out Unclassified.
  Mesh(std::vector<Point> points, std::vector<std::array<int, 3>> triangles);

  [[nodiscard]] int num_points() const { return static_cast<int>(points_.size()); }
  [[nodiscard]] int num_triangles() const { return static_cast<int>(triangles_.size()); }
  [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }

  [[nodiscard]] const std::vector<Point>& points() const { return points_; }
  [[nodiscard]] const Point& point(int i) const { return points_[i]; }
  [[nodiscard]] const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  [[nodiscard]] const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  [[nodiscard]] const std::array<EdgeRef, 3>& tri_edges(int t) const { return tri_edges_[t]; }
  /// Adjacent triangles; the second entry is -1 on boundary edges.
  [[nodiscard]] const std::array<int, 2>& edge_triangles(int e) const { return edge_tris_[e]; }
  [[nodiscard]] bool is_boundary(int e) const { return edge_tris_[e][1] < 0; }
  [[nodiscard]] EdgeTag tag(int e) const { return tags_[e]; }
  [[nodiscard]] const std::vector<EdgeTag>& tags() const { return tags_; }

  [[nodiscard]] double area(int t) const { return areas_[t]; }
  [[nodiscard]] double diameter(int t) const { return diameters_[t]; }
  [[nodiscard]] double h() const { return h_; }
  [[nodiscard]] Point centroid(int t) const;
  [[nodiscard]] std::array<Point, 3> vertices(int t) const;

  [[nodiscard]] EdgeFrame edge_frame(int e) const;
  /// Outward unit normal of triangle t on its local edge j.
  [[nodiscard]] Vec2 outward_normal(int t, int j) const;
  /// Endpoints of local edge j in counterclockwise order.
  [[nodiscard]] std::array<Point, 2> local_edge(int t, int j) const;

  [[nodiscard]] std::optional<int> find_edge(int v0, int v1) const;

  /// Copy of this mesh with the given per-edge tags. Interior edges must be
  /// tagged Interior and boundary edges anything else.
  [[nodiscard]] Mesh with_tags(std::vector<EdgeTag> tags) const;

private:
  std::vector<Point> points_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<EdgeRef, 3>> tri_edges_;
  std::vector<std::array<int, 2>> edge_tris_;
  std::vector<EdgeTag> tags_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  std::vector<std::pair<std::uint64_t, int>> edge_lookup_;  // sorted by key
  double h_ = 0.0;
};

/// Deterministic coarse triangulation: 2x2 squares split along the
/// positive-slope diagonal for the unit square, three such squares for the
/// L-shape, ear clipping for general polygons. Throws Error("invalid domain").
Mesh coarse_mesh(const Domain& domain);

/// Red refinement: every triangle is split into four congruent children by
/// joining edge midpoints. Boundary tags pass from parent to child edges.
Mesh refine_uniform(const Mesh& mesh);

/// Applies the classifier to every boundary edge (midpoint, outward normal).
Mesh tag_boundary(const Mesh& mesh, const BoundaryClassifier& classifier);

/// "pdwg-mesh v1" text format.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace pdwg

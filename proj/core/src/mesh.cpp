#include "pdwg/mesh.hpp"

#include "pdwg/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace pdwg {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * cross(b - a, c - a);
}

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32U) | hi;
}

double polygon_signed_area(const std::vector<Point>& loop) {
  double s = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    s += cross(loop[i], loop[(i + 1) % loop.size()]);
  }
  return 0.5 * s;
}

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](const Point& a, const Point& b, const Point& p, double d) {
    return std::abs(d) <= 1e-14 && p.x() >= std::min(a.x(), b.x()) - 1e-14 &&
           p.x() <= std::max(a.x(), b.x()) + 1e-14 && p.y() >= std::min(a.y(), b.y()) - 1e-14 &&
           p.y() <= std::max(a.y(), b.y()) + 1e-14;
  };
  return on_segment(p1, p2, q1, d1) || on_segment(p1, p2, q2, d2) || on_segment(q1, q2, p1, d3) ||
         on_segment(q1, q2, p2, d4);
}

void validate_loop(const std::vector<Point>& loop) {
  const std::size_t n = loop.size();
  PDWG_REQUIRE(n >= 3, Error, "invalid domain: fewer than three vertices");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      PDWG_REQUIRE((loop[i] - loop[j]).norm() > 1e-14, Error, "invalid domain: repeated vertex");
    }
  }
  PDWG_REQUIRE(polygon_signed_area(loop) > 0.0, Error,
               "invalid domain: boundary loop is not counterclockwise");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      PDWG_REQUIRE(!segments_intersect(loop[i], loop[(i + 1) % n], loop[j], loop[(j + 1) % n]), Error,
                   "invalid domain: boundary loop self-intersects");
    }
  }
}

bool point_in_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
  return signed_area(a, b, p) >= 0 && signed_area(b, c, p) >= 0 && signed_area(c, a, p) >= 0;
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<Point>& loop) {
  std::vector<int> idx(loop.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::array<int, 3>> tris;
  while (idx.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const int a = idx[(i + idx.size() - 1) % idx.size()];
      const int b = idx[i];
      const int c = idx[(i + 1) % idx.size()];
      if (signed_area(loop[a], loop[b], loop[c]) <= 1e-14) continue;
      bool ear = true;
      for (int v : idx) {
        if (v == a || v == b || v == c) continue;
        if (point_in_triangle(loop[v], loop[a], loop[b], loop[c])) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      tris.push_back({a, b, c});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    PDWG_REQUIRE(clipped, Error, "invalid domain: polygon could not be triangulated");
  }
  PDWG_REQUIRE(signed_area(loop[idx[0]], loop[idx[1]], loop[idx[2]]) > 1e-14, Error,
               "invalid domain: degenerate polygon");
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

/// Triangulates the listed unit cells of a (n+1)x(n+1) lattice with spacing
/// `step`, splitting each cell along its positive-slope diagonal.
Mesh lattice_mesh(int n, double step, const std::vector<std::array<int, 2>>& cells) {
  std::vector<int> id((n + 1) * (n + 1), -1);
  std::vector<Point> pts;
  auto node = [&](int i, int j) {
    int& slot = id[j * (n + 1) + i];
    if (slot < 0) {
      slot = static_cast<int>(pts.size());
      pts.emplace_back(i * step, j * step);
    }
    return slot;
  };
  // Number lattice nodes row by row so point order does not depend on cell order.
  std::vector<char> used((n + 1) * (n + 1), 0);
  for (const auto& [ci, cj] : cells) {
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) used[(cj + dj) * (n + 1) + ci + di] = 1;
  }
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      if (used[j * (n + 1) + i]) node(i, j);

  std::vector<std::array<int, 3>> tris;
  for (const auto& [i, j] : cells) {
    const int p00 = node(i, j), p10 = node(i + 1, j), p11 = node(i + 1, j + 1), p01 = node(i, j + 1);
    tris.push_back({p00, p10, p11});
    tris.push_back({p00, p11, p01});
  }
  return Mesh(std::move(pts), std::move(tris));
}

}  // namespace

// ---------------------------------------------------------------------------
// Domain

Domain Domain::unit_square() {
  return {DomainKind::UnitSquare, {Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}};
}

Domain Domain::l_shape() {
  return {DomainKind::LShape,
          {Point(0, 0), Point(0.5, 0), Point(0.5, 0.5), Point(1, 0.5), Point(1, 1), Point(0, 1)}};
}

Domain Domain::polygon(std::vector<Point> loop) {
  validate_loop(loop);
  return {DomainKind::Polygon, std::move(loop)};
}

double Domain::area() const { return polygon_signed_area(vertices); }

bool Domain::contains(const Point& p, double tol) const {
  const std::size_t n = vertices.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = vertices[i];
    const Point& b = vertices[j];
    // Distance to the boundary segment.
    const Vec2 ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    if ((a + t * ab - p).norm() <= tol) return true;
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x_cross = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

// ---------------------------------------------------------------------------
// Mesh

Mesh::Mesh(std::vector<Point> points, std::vector<std::array<int, 3>> triangles)
    : points_(std::move(points)), triangles_(std::move(triangles)) {
  const int nt = num_triangles();
  PDWG_REQUIRE(nt > 0, Error, "mesh has no triangles");
  areas_.resize(nt);
  diameters_.resize(nt);
  tri_edges_.resize(nt);

  std::unordered_map<std::uint64_t, int> numbering;
  numbering.reserve(3 * nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri) {
      PDWG_REQUIRE(v >= 0 && v < num_points(), Error, "triangle references a missing point");
    }
    const double a = signed_area(points_[tri[0]], points_[tri[1]], points_[tri[2]]);
    PDWG_REQUIRE(a > 0.0, Error, "triangle is degenerate or clockwise");
    areas_[t] = a;
    double diam = 0.0;
    for (int j = 0; j < 3; ++j) {
      const int v0 = tri[j];
      const int v1 = tri[(j + 1) % 3];
      diam = std::max(diam, (points_[v1] - points_[v0]).norm());
      // Edges are numbered in order of first appearance.
      const std::uint64_t key = edge_key(v0, v1);
      if (numbering.emplace(key, static_cast<int>(edges_.size())).second) {
        edges_.push_back({std::min(v0, v1), std::max(v0, v1)});
        edge_lookup_.emplace_back(key, static_cast<int>(edges_.size()) - 1);
      }
    }
    diameters_[t] = diam;
    h_ = std::max(h_, diam);
  }
  std::sort(edge_lookup_.begin(), edge_lookup_.end());

  edge_tris_.assign(edges_.size(), {-1, -1});
  for (int t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    for (int j = 0; j < 3; ++j) {
      const int e = *find_edge(tri[j], tri[(j + 1) % 3]);
      auto& adj = edge_tris_[e];
      if (adj[0] < 0) {
        adj[0] = t;
      } else {
        PDWG_REQUIRE(adj[1] < 0, Error, "non-manifold edge shared by more than two triangles");
        adj[1] = t;
      }
      const Vec2 outward = outward_normal(t, j);
      const EdgeFrame frame = edge_frame(e);
      tri_edges_[t][j] = {e, outward.dot(frame.normal) > 0 ? 1 : -1};
    }
  }
  tags_.resize(edges_.size());
  for (int e = 0; e < num_edges(); ++e) {
    if (edge_tris_[e][1] >= 0) {
      const int t0 = edge_tris_[e][0];
      const int t1 = edge_tris_[e][1];
      int s0 = 0, s1 = 0;
      for (const EdgeRef& r : tri_edges_[t0])
        if (r.edge == e) s0 = r.sign;
      for (const EdgeRef& r : tri_edges_[t1])
        if (r.edge == e) s1 = r.sign;
      PDWG_REQUIRE(s0 + s1 == 0, Error, "inconsistent triangle orientation across an interior edge");
      tags_[e] = EdgeTag::Interior;
    } else {
      tags_[e] = EdgeTag::Unclassified;
    }
  }
}

Point Mesh::centroid(int t) const {
  const auto& tri = triangles_[t];
  return (points_[tri[0]] + points_[tri[1]] + points_[tri[2]]) / 3.0;
}

std::array<Point, 3> Mesh::vertices(int t) const {
  const auto& tri = triangles_[t];
  return {points_[tri[0]], points_[tri[1]], points_[tri[2]]};
}

EdgeFrame Mesh::edge_frame(int e) const {
  const Point& a = points_[edges_[e][0]];
  const Point& b = points_[edges_[e][1]];
  EdgeFrame f;
  f.midpoint = 0.5 * (a + b);
  f.length = (b - a).norm();
  f.tangent = (b - a) / f.length;
  f.normal = Vec2(-f.tangent.y(), f.tangent.x());
  return f;
}

Vec2 Mesh::outward_normal(int t, int j) const {
  const auto& tri = triangles_[t];
  const Vec2 d = points_[tri[(j + 1) % 3]] - points_[tri[j]];
  return Vec2(d.y(), -d.x()) / d.norm();
}

std::array<Point, 2> Mesh::local_edge(int t, int j) const {
  const auto& tri = triangles_[t];
  return {points_[tri[j]], points_[tri[(j + 1) % 3]]};
}

std::optional<int> Mesh::find_edge(int v0, int v1) const {
  const std::uint64_t key = edge_key(v0, v1);
  auto it = std::lower_bound(edge_lookup_.begin(), edge_lookup_.end(), std::make_pair(key, -1));
  if (it == edge_lookup_.end() || it->first != key) return std::nullopt;
  return it->second;
}

Mesh Mesh::with_tags(std::vector<EdgeTag> tags) const {
  PDWG_REQUIRE(tags.size() == edges_.size(), Error, "tag vector size does not match edge count");
  for (int e = 0; e < num_edges(); ++e) {
    PDWG_REQUIRE(is_boundary(e) == (tags[e] != EdgeTag::Interior), Error,
                 "interior edges must be tagged Interior and boundary edges must not");
  }
  Mesh out = *this;
  out.tags_ = std::move(tags);
  return out;
}

// ---------------------------------------------------------------------------
// Construction

Mesh coarse_mesh(const Domain& domain) {
  switch (domain.kind) {
    case DomainKind::UnitSquare:
      return lattice_mesh(2, 0.5, {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    case DomainKind::LShape:
      return lattice_mesh(2, 0.5, {{0, 0}, {0, 1}, {1, 1}});
    case DomainKind::Polygon: {
      validate_loop(domain.vertices);
      auto tris = ear_clip(domain.vertices);
      return Mesh(domain.vertices, std::move(tris));
    }
  }
  throw Error("invalid domain");
}

Mesh refine_uniform(const Mesh& mesh) {
  const int np = mesh.num_points();
  std::vector<Point> pts = mesh.points();
  pts.reserve(np + mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& [a, b] = mesh.edge(e);
    pts.push_back(0.5 * (mesh.point(a) + mesh.point(b)));
  }
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangle(t);
    const auto& te = mesh.tri_edges(t);
    const int m0 = np + te[0].edge;  // midpoint of (v0, v1)
    const int m1 = np + te[1].edge;  // midpoint of (v1, v2)
    const int m2 = np + te[2].edge;  // midpoint of (v2, v0)
    tris.push_back({v[0], m0, m2});
    tris.push_back({m0, v[1], m1});
    tris.push_back({m2, m1, v[2]});
    tris.push_back({m0, m1, m2});
  }
  Mesh fine(std::move(pts), std::move(tris));

  std::vector<EdgeTag> tags = fine.tags();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.is_boundary(e)) continue;
    const auto& [a, b] = mesh.edge(e);
    const int mid = np + e;
    tags[*fine.find_edge(a, mid)] = mesh.tag(e);
    tags[*fine.find_edge(mid, b)] = mesh.tag(e);
  }
  return fine.with_tags(std::move(tags));
}

Mesh tag_boundary(const Mesh& mesh, const BoundaryClassifier& classifier) {
  std::vector<EdgeTag> tags = mesh.tags();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.is_boundary(e)) continue;
    const int t = mesh.edge_triangles(e)[0];
    int sign = 0;
    for (const EdgeRef& r : mesh.tri_edges(t))
      if (r.edge == e) sign = r.sign;
    const EdgeFrame f = mesh.edge_frame(e);
    const EdgeTag tag = classifier(f.midpoint, sign * f.normal);
    PDWG_REQUIRE(tag == EdgeTag::Dirichlet || tag == EdgeTag::Neumann, Error,
                 "boundary classifier must return Dirichlet or Neumann");
    tags[e] = tag;
  }
  return mesh.with_tags(std::move(tags));
}

// ---------------------------------------------------------------------------
// Text format

void write_mesh(std::ostream& os, const Mesh& mesh) {
  const auto old_precision = os.precision();
  os << "pdwg-mesh v1\n";
  os << "points " << mesh.num_points() << '\n';
  os << std::setprecision(17);
  for (const Point& p : mesh.points()) os << p.x() << ' ' << p.y() << '\n';
  os << "triangles " << mesh.num_triangles() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangle(t);
    os << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  }
  int tagged = 0;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.tag(e) == EdgeTag::Dirichlet || mesh.tag(e) == EdgeTag::Neumann) ++tagged;
  os << "edge-tags " << tagged << '\n';
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const EdgeTag tag = mesh.tag(e);
    if (tag != EdgeTag::Dirichlet && tag != EdgeTag::Neumann) continue;
    os << mesh.edge(e)[0] << ' ' << mesh.edge(e)[1] << ' ' << (tag == EdgeTag::Dirichlet ? 'D' : 'N')
       << '\n';
  }
  os.precision(old_precision);
}

Mesh read_mesh(std::istream& is) {
  std::string line;
  std::getline(is, line);
  PDWG_REQUIRE(line == "pdwg-mesh v1", Error, "not a pdwg-mesh v1 file");
  auto expect_section = [&is](const char* name) {
    std::string word;
    long long count = -1;
    is >> word >> count;
    PDWG_REQUIRE(is && word == name && count >= 0, Error,
                 std::string("malformed mesh file: expected section '") + name + "'");
    return static_cast<int>(count);
  };
  const int np = expect_section("points");
  std::vector<Point> pts(np);
  for (auto& p : pts) is >> p.x() >> p.y();
  const int nt = expect_section("triangles");
  std::vector<std::array<int, 3>> tris(nt);
  for (auto& t : tris) is >> t[0] >> t[1] >> t[2];
  PDWG_REQUIRE(static_cast<bool>(is), Error, "malformed mesh file: truncated data");
  Mesh mesh(std::move(pts), std::move(tris));

  const int ntag = expect_section("edge-tags");
  std::vector<EdgeTag> tags = mesh.tags();
  for (int i = 0; i < ntag; ++i) {
    int a = -1, b = -1;
    char c = 0;
    is >> a >> b >> c;
    PDWG_REQUIRE(static_cast<bool>(is), Error, "malformed mesh file: truncated edge tags");
    const auto e = mesh.find_edge(a, b);
    PDWG_REQUIRE(e.has_value() && mesh.is_boundary(*e), Error, "edge tag refers to a non-boundary edge");
    PDWG_REQUIRE(c == 'D' || c == 'N', Error, "unknown edge tag");
    tags[*e] = (c == 'D') ? EdgeTag::Dirichlet : EdgeTag::Neumann;
  }
  return mesh.with_tags(std::move(tags));
}

}  // namespace pdwg

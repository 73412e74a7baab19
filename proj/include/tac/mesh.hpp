#pragma once

// Triangulated body domain with marked boundary parts. The contact part of
// the boundary must be flat; its vertices carry the trace structure
// (ordering, outward normals, line cells) used by every surface assembly.

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "tac/errors.hpp"

namespace tac {

enum class BoundaryPart { Gamma1, Gamma2, GammaC };

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

// Predicate assigning a marker to a boundary facet, queried at its midpoint.
using MarkerRule = std::function<BoundaryPart(double x, double y)>;

struct Mesh {
  struct BFacet {
    int a = -1, b = -1;
    BoundaryPart marker = BoundaryPart::Gamma2;
  };

  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> cells;  // positively oriented
  std::vector<BFacet> boundary_facets;
  bool marked = false;

  // Contact trace structure (filled by mark_boundary):
  std::vector<int> contact_nodes;               // bulk vertex ids, ordered along the line
  std::vector<Eigen::Vector2d> contact_normals; // outward unit normal per contact node
  std::vector<std::array<int, 2>> contact_cells; // line cells, as contact-node indices
  std::vector<int> gamma1_nodes;                // bulk vertex ids on Gamma1
  std::vector<int> bulk_to_contact_idx;         // per vertex: contact index or -1

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_contact() const { return static_cast<int>(contact_nodes.size()); }

  double cell_area(int c) const {
    const auto& t = cells[c];
    const Eigen::Vector2d e1 = vertices[t[1]] - vertices[t[0]];
    const Eigen::Vector2d e2 = vertices[t[2]] - vertices[t[0]];
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  }

  double facet_length(const BFacet& f) const { return (vertices[f.b] - vertices[f.a]).norm(); }

  int bulk_to_contact(int v) const { return bulk_to_contact_idx.empty() ? -1 : bulk_to_contact_idx[v]; }
};

// The contact-node -> bulk-vertex association (stable ordering along the line).
inline const std::vector<int>& trace_map(const Mesh& mesh) { return mesh.contact_nodes; }

inline Mesh build_structured_rect(int nx, int ny, const Rect& r) {
  if (nx < 1 || ny < 1) throw InvalidExtents("build_structured_rect: nx, ny must be >= 1");
  if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) throw InvalidExtents("build_structured_rect: degenerate rectangle");

  Mesh m;
  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  m.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.emplace_back(r.x0 + (r.x1 - r.x0) * i / nx, r.y0 + (r.y1 - r.y0) * j / ny);

  m.cells.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      m.cells.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }

  for (int i = 0; i < nx; ++i) {
    m.boundary_facets.push_back({vid(i, 0), vid(i + 1, 0), BoundaryPart::Gamma2});
    m.boundary_facets.push_back({vid(i, ny), vid(i + 1, ny), BoundaryPart::Gamma2});
  }
  for (int j = 0; j < ny; ++j) {
    m.boundary_facets.push_back({vid(0, j), vid(0, j + 1), BoundaryPart::Gamma2});
    m.boundary_facets.push_back({vid(nx, j), vid(nx, j + 1), BoundaryPart::Gamma2});
  }
  return m;
}

namespace detail {

// Outward normal of a boundary facet: perpendicular to the edge, pointing
// away from the opposite vertex of the (unique) adjacent cell.
inline Eigen::Vector2d facet_outward_normal(const Mesh& m, const Mesh::BFacet& f) {
  for (const auto& c : m.cells) {
    int hit = 0, opp = -1;
    for (int v : c) {
      if (v == f.a || v == f.b) ++hit; else opp = v;
    }
    if (hit == 2) {
      Eigen::Vector2d edge = m.vertices[f.b] - m.vertices[f.a];
      Eigen::Vector2d n(edge.y(), -edge.x());
      n.normalize();
      const Eigen::Vector2d mid = 0.5 * (m.vertices[f.a] + m.vertices[f.b]);
      if (n.dot(m.vertices[opp] - mid) > 0.0) n = -n;
      return n;
    }
  }
  throw ValidationError("facet_outward_normal: boundary facet not adjacent to any cell");
}

// Orders contact vertices along the flat contact line, builds per-node
// normals, line cells, and the inverse trace index.
inline void build_contact_structure(Mesh& m) {
  std::vector<int> nodes;
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();
  bool first = true;
  for (const auto& f : m.boundary_facets) {
    if (f.marker != BoundaryPart::GammaC) continue;
    const Eigen::Vector2d n = facet_outward_normal(m, f);
    if (first) {
      normal = n;
      first = false;
    } else if ((n - normal).norm() > 1e-12) {
      throw ValidationError("mark_boundary: contact boundary is not flat");
    }
    nodes.push_back(f.a);
    nodes.push_back(f.b);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  const Eigen::Vector2d tangent(-normal.y(), normal.x());
  std::sort(nodes.begin(), nodes.end(), [&](int a, int b) {
    return tangent.dot(m.vertices[a]) < tangent.dot(m.vertices[b]);
  });

  m.contact_nodes = nodes;
  m.contact_normals.assign(nodes.size(), normal);
  m.bulk_to_contact_idx.assign(m.vertices.size(), -1);
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) m.bulk_to_contact_idx[nodes[i]] = i;

  m.contact_cells.clear();
  for (const auto& f : m.boundary_facets) {
    if (f.marker != BoundaryPart::GammaC) continue;
    m.contact_cells.push_back({m.bulk_to_contact_idx[f.a], m.bulk_to_contact_idx[f.b]});
  }

  m.gamma1_nodes.clear();
  std::vector<char> on_g1(m.vertices.size(), 0);
  for (const auto& f : m.boundary_facets) {
    if (f.marker != BoundaryPart::Gamma1) continue;
    on_g1[f.a] = on_g1[f.b] = 1;
  }
  for (int v = 0; v < m.n_vertices(); ++v)
    if (on_g1[v]) m.gamma1_nodes.push_back(v);
}

}  // namespace detail

// Assigns one marker per boundary facet and builds the contact structure.
// The clamped part Gamma1 and the contact part GammaC must both be nonempty.
inline Mesh mark_boundary(Mesh mesh, const MarkerRule& rule) {
  int n_g1 = 0, n_gc = 0;
  for (auto& f : mesh.boundary_facets) {
    const Eigen::Vector2d mid = 0.5 * (mesh.vertices[f.a] + mesh.vertices[f.b]);
    f.marker = rule(mid.x(), mid.y());
    n_g1 += f.marker == BoundaryPart::Gamma1;
    n_gc += f.marker == BoundaryPart::GammaC;
  }
  if (n_g1 == 0) throw EmptyRequiredPart("mark_boundary: Gamma1 has no facets");
  if (n_gc == 0) throw EmptyRequiredPart("mark_boundary: GammaC has no facets");
  detail::build_contact_structure(mesh);
  mesh.marked = true;
  return mesh;
}

// Standard marking of a rectangle: bottom edge is the contact surface,
// top edge is clamped, sides carry tractions.
inline Mesh mark_rect_standard(Mesh mesh, const Rect& r) {
  const double tol = 1e-12 * std::max(r.x1 - r.x0, r.y1 - r.y0);
  return mark_boundary(std::move(mesh), [&, tol](double, double y) {
    if (std::abs(y - r.y0) <= tol) return BoundaryPart::GammaC;
    if (std::abs(y - r.y1) <= tol) return BoundaryPart::Gamma1;
    return BoundaryPart::Gamma2;
  });
}

// ASCII mesh import. Format (whitespace separated, '#' starts a comment):
//   vertices <N>   followed by N lines "x y"
//   cells <M>      followed by M lines "i j k" (0-based, any orientation)
//   facets <K>     followed by K lines "i j <gamma1|gamma2|gammac>"
inline Mesh import_mesh_ascii(std::istream& in) {
  Mesh m;
  const auto next_token = [&in]() -> std::string {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw ParseError("mesh import: unexpected end of input");
  };
  const auto expect_int = [&](const char* what) {
    const std::string tok = next_token();
    try {
      size_t pos = 0;
      const int v = std::stoi(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError(std::string("mesh import: expected integer for ") + what + ", got '" + tok + "'");
    }
  };
  const auto expect_real = [&](const char* what) {
    const std::string tok = next_token();
    try {
      size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError(std::string("mesh import: expected number for ") + what + ", got '" + tok + "'");
    }
  };

  if (next_token() != "vertices") throw ParseError("mesh import: expected 'vertices'");
  const int nv = expect_int("vertex count");
  for (int i = 0; i < nv; ++i) {
    const double x = expect_real("vertex x");
    const double y = expect_real("vertex y");
    m.vertices.emplace_back(x, y);
  }
  if (next_token() != "cells") throw ParseError("mesh import: expected 'cells'");
  const int nc = expect_int("cell count");
  for (int i = 0; i < nc; ++i) {
    std::array<int, 3> t{};
    for (int k = 0; k < 3; ++k) {
      t[k] = expect_int("cell vertex");
      if (t[k] < 0 || t[k] >= nv) throw ParseError("mesh import: cell vertex index out of range");
    }
    m.cells.push_back(t);
  }
  // Normalize orientation so every cell is positively oriented.
  for (size_t c = 0; c < m.cells.size(); ++c)
    if (m.cell_area(static_cast<int>(c)) < 0.0) std::swap(m.cells[c][1], m.cells[c][2]);

  if (next_token() != "facets") throw ParseError("mesh import: expected 'facets'");
  const int nf = expect_int("facet count");
  int n_g1 = 0, n_gc = 0;
  for (int i = 0; i < nf; ++i) {
    Mesh::BFacet f;
    f.a = expect_int("facet vertex");
    f.b = expect_int("facet vertex");
    if (f.a < 0 || f.a >= nv || f.b < 0 || f.b >= nv)
      throw ParseError("mesh import: facet vertex index out of range");
    const std::string marker = next_token();
    if (marker == "gamma1") f.marker = BoundaryPart::Gamma1;
    else if (marker == "gamma2") f.marker = BoundaryPart::Gamma2;
    else if (marker == "gammac") f.marker = BoundaryPart::GammaC;
    else throw ParseError("mesh import: unknown facet marker '" + marker + "'");
    n_g1 += f.marker == BoundaryPart::Gamma1;
    n_gc += f.marker == BoundaryPart::GammaC;
    m.boundary_facets.push_back(f);
  }
  if (n_g1 == 0) throw EmptyRequiredPart("mesh import: Gamma1 has no facets");
  if (n_gc == 0) throw EmptyRequiredPart("mesh import: GammaC has no facets");
  detail::build_contact_structure(m);
  m.marked = true;
  return m;
}

}  // namespace tac

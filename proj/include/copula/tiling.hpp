#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "copula/common.hpp"
#include "copula/discrete_copula.hpp"

namespace copula {

/// The graph of a discrete copula as a pile of unit cubes: column (x,y) of
/// the n x n cell grid has height h(x,y) = C_{x,y}.  Heights are monotone
/// nondecreasing in both directions and h(n,n) = n.
struct CubePile {
  std::int64_t n = 0;
  Matrix<std::int32_t> h;  // n x n, 0-indexed cells for 1-indexed (x,y)
};

inline CubePile pile_from_copula(const DiscreteCopula& c) {
  CubePile p;
  p.n = c.n;
  p.h.assign(static_cast<std::size_t>(c.n), static_cast<std::size_t>(c.n), 0);
  for (std::int64_t x = 1; x <= c.n; ++x)
    for (std::int64_t y = 1; y <= c.n; ++y) p.h(x - 1, y - 1) = c.C(x, y);
  return p;
}

inline DiscreteCopula copula_from_pile(const CubePile& p) {
  DiscreteCopula c;
  c.n = p.n;
  c.C.assign(static_cast<std::size_t>(p.n + 1), static_cast<std::size_t>(p.n + 1), 0);
  for (std::int64_t x = 1; x <= p.n; ++x)
    for (std::int64_t y = 1; y <= p.n; ++y) c.C(x, y) = p.h(x - 1, y - 1);
  return c;
}

struct PileCheck {
  bool ok = true;
  std::string reason;
  std::int64_t x = -1, y = -1;
};

/// A pile is the image of a discrete copula iff the padded height table
/// satisfies the copula axioms: unit increments along the last row/column,
/// 2-increasing increments, and 0/1 cell masses (the last is implied by the
/// first two for integer tables).  The three forbidden local tiling
/// configurations are exactly the failures of these conditions.
inline PileCheck validate_pile(const CubePile& p) {
  if (p.n <= 0 || p.h.rows() != static_cast<std::size_t>(p.n) ||
      p.h.cols() != static_cast<std::size_t>(p.n))
    return {false, "height table shape mismatch", -1, -1};
  DiscreteCopula c = copula_from_pile(p);
  CopulaCheck chk = is_discrete_copula(c.C);
  if (!chk.ok) return {false, chk.reason, chk.a2 >= 0 ? chk.a2 : chk.a, chk.b2 >= 0 ? chk.b2 : chk.b};
  return {};
}

namespace detail {

// Isometric projection: unit cube edge 10 px, 30-degree lozenges.
// (x,y,z) integer corner -> screen point.
struct IsoPoint {
  double px, py;
};

inline IsoPoint iso(double x, double y, double z, double scale) {
  const double c30 = 0.8660254037844386;  // cos 30
  return {(x - y) * c30 * scale, (x + y) * 0.5 * scale - z * scale};
}

inline void append_quad(std::string& out, IsoPoint a, IsoPoint b, IsoPoint c, IsoPoint d,
                        const char* fill) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<polygon points=\"%.2f,%.2f %.2f,%.2f %.2f,%.2f %.2f,%.2f\" fill=\"%s\" "
                "stroke=\"#333333\" stroke-width=\"0.5\"/>\n",
                a.px, a.py, b.px, b.py, c.px, c.py, d.px, d.py, fill);
  out += buf;
}

}  // namespace detail

/// Deterministic SVG rendering of the pile as a lozenge tiling.  The pile is
/// viewed down the (1,1,1) axis after flipping both horizontal axes, so the
/// staircase faces the camera; top, x- and y-facing faces get the three
/// shades.  The two box walls behind a sub-maximal pile are drawn in the
/// matching face shades, completing the side-n hexagon.  Orientation note:
/// of the two reflection-equivalent projections, the one mapping the cell
/// grid's far corner to the hexagon's south vertex is used.
inline std::string tiling_svg(const CubePile& pile) {
  PileCheck chk = validate_pile(pile);
  if (!chk.ok) throw std::invalid_argument("tiling_svg: invalid pile: " + chk.reason);
  std::int64_t n = pile.n;
  const double scale = 10.0;
  // flipped heights: hh(x,y) = h(n+1-x, n+1-y), weakly decreasing away from
  // the origin corner, 1-indexed with hh(x,y) = 0 outside [1,n]^2
  auto hh = [&](std::int64_t x, std::int64_t y) -> std::int64_t {
    if (x < 1 || x > n || y < 1 || y > n) return 0;
    return pile.h(static_cast<std::size_t>(n - x), static_cast<std::size_t>(n - y));
  };
  const char* top_fill = "#e8e8e8";
  const char* xface_fill = "#8f8f8f";
  const char* yface_fill = "#bcbcbc";

  struct Face {
    std::int64_t depth;
    std::string svg;
  };
  std::vector<Face> faces;
  auto add_face = [&](std::int64_t depth, detail::IsoPoint a, detail::IsoPoint b, detail::IsoPoint c,
                      detail::IsoPoint d, const char* fill) {
    std::string s;
    detail::append_quad(s, a, b, c, d, fill);
    faces.push_back({depth, std::move(s)});
  };

  for (std::int64_t x = 1; x <= n; ++x)
    for (std::int64_t y = 1; y <= n; ++y) {
      std::int64_t z = hh(x, y);
      // top face of the column (or floor tile when z = 0)
      add_face(3 * (x + y + z),
               detail::iso(static_cast<double>(x - 1), static_cast<double>(y - 1), static_cast<double>(z), scale),
               detail::iso(static_cast<double>(x), static_cast<double>(y - 1), static_cast<double>(z), scale),
               detail::iso(static_cast<double>(x), static_cast<double>(y), static_cast<double>(z), scale),
               detail::iso(static_cast<double>(x - 1), static_cast<double>(y), static_cast<double>(z), scale),
               top_fill);
      // x-facing steps between column (x,y) and (x+1,y)
      for (std::int64_t zz = hh(x + 1, y) + 1; zz <= z; ++zz)
        add_face(3 * (x + y + zz) + 1,
                 detail::iso(static_cast<double>(x), static_cast<double>(y - 1), static_cast<double>(zz - 1), scale),
                 detail::iso(static_cast<double>(x), static_cast<double>(y), static_cast<double>(zz - 1), scale),
                 detail::iso(static_cast<double>(x), static_cast<double>(y), static_cast<double>(zz), scale),
                 detail::iso(static_cast<double>(x), static_cast<double>(y - 1), static_cast<double>(zz), scale),
                 xface_fill);
      // y-facing steps between column (x,y) and (x,y+1)
      for (std::int64_t zz = hh(x, y + 1) + 1; zz <= z; ++zz)
        add_face(3 * (x + y + zz) + 2,
                 detail::iso(static_cast<double>(x - 1), static_cast<double>(y), static_cast<double>(zz - 1), scale),
                 detail::iso(static_cast<double>(x), static_cast<double>(y), static_cast<double>(zz - 1), scale),
                 detail::iso(static_cast<double>(x), static_cast<double>(y), static_cast<double>(zz), scale),
                 detail::iso(static_cast<double>(x - 1), static_cast<double>(y), static_cast<double>(zz), scale),
                 yface_fill);
    }
  // forced box walls above the pile along the x = 0 and y = 0 planes
  for (std::int64_t y = 1; y <= n; ++y)
    for (std::int64_t zz = hh(1, y) + 1; zz <= n; ++zz)
      add_face(3 * (1 + y + zz) + 1,
               detail::iso(0.0, static_cast<double>(y - 1), static_cast<double>(zz - 1), scale),
               detail::iso(0.0, static_cast<double>(y), static_cast<double>(zz - 1), scale),
               detail::iso(0.0, static_cast<double>(y), static_cast<double>(zz), scale),
               detail::iso(0.0, static_cast<double>(y - 1), static_cast<double>(zz), scale),
               xface_fill);
  for (std::int64_t x = 1; x <= n; ++x)
    for (std::int64_t zz = hh(x, 1) + 1; zz <= n; ++zz)
      add_face(3 * (x + 1 + zz) + 2,
               detail::iso(static_cast<double>(x - 1), 0.0, static_cast<double>(zz - 1), scale),
               detail::iso(static_cast<double>(x), 0.0, static_cast<double>(zz - 1), scale),
               detail::iso(static_cast<double>(x), 0.0, static_cast<double>(zz), scale),
               detail::iso(static_cast<double>(x - 1), 0.0, static_cast<double>(zz), scale),
               yface_fill);

  std::stable_sort(faces.begin(), faces.end(),
                   [](const Face& a, const Face& b) { return a.depth < b.depth; });

  double c30 = 0.8660254037844386;
  double w = 2.0 * static_cast<double>(n) * c30 * scale;
  double hgt = 2.0 * static_cast<double>(n) * scale;
  char header[256];
  std::snprintf(header, sizeof(header),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.2f %.2f %.2f %.2f\">\n",
                -static_cast<double>(n) * c30 * scale - 1.0, -static_cast<double>(n) * scale - 1.0,
                w + 2.0, hgt + 2.0);
  std::string out = header;
  for (const auto& f : faces) out += f.svg;
  out += "</svg>\n";
  return out;
}

}  // namespace copula

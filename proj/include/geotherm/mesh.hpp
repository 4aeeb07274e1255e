#pragma once

// Structured conforming triangulation of the two-box channel domain:
// a porous rectangle below a fluid rectangle sharing the horizontal
// interface segment. Every cell splits along the lower-left -> upper-right
// diagonal so repeated builds are bit-identical.

#include "geotherm/core.hpp"

#include <algorithm>
#include <array>
#include <ostream>
#include <vector>

namespace geotherm {

struct ChannelGeometry {
    Interval x_range{0.0, 1.0};
    Interval y_range_p{0.0, 1.0}; // porous box, below the interface
    Interval y_range_f{1.0, 2.0}; // fluid box, above the interface
    double interface_y = 1.0;

    bool well_formed() const {
        return x_range.length() > 0.0 && y_range_p.length() > 0.0 && y_range_f.length() > 0.0 &&
               y_range_p.hi == interface_y && y_range_f.lo == interface_y;
    }
};

enum class EdgeKind { Interior, Boundary, Interface };

enum class BoundaryTag {
    None,
    Bottom,      // y = y_range_p.lo
    Top,         // y = y_range_f.hi
    LeftFluid,   // x = x lo, fluid side
    RightFluid,  // x = x hi, fluid side
    LeftPorous,  // x = x lo, porous side
    RightPorous, // x = x hi, porous side
    Interface,   // usable as a Dirichlet tag (velocity on I)
};

struct Triangle {
    std::array<int, 3> v{};
    Subdomain dom = Subdomain::Fluid;
};

struct Edge {
    int a = -1, b = -1; // vertex ids, a < b
    EdgeKind kind = EdgeKind::Interior;
    BoundaryTag tag = BoundaryTag::None;
    int tri[2] = {-1, -1}; // incident triangles; for interface edges tri[0] is fluid
};

struct InterfaceEdge {
    int edge = -1;
    int fluid_tri = -1;
    int porous_tri = -1;
    double length = 0.0;
};

struct Mesh {
    ChannelGeometry geom;
    int nx = 0, ny_f = 0, ny_p = 0;
    std::vector<Vec2> vertices;
    std::vector<Triangle> triangles;
    std::vector<Edge> edges;
    std::vector<int> interface_edge_ids; // ordered by x
    double h_grid = 0.0; // x spacing, the h of the tables and of gamma/h
    double h_max = 0.0;  // maximum element diameter

    int n_vertices(Subdomain d) const { return d == Subdomain::Fluid ? n_vert_f_ : n_vert_p_; }
    int n_triangles(Subdomain d) const { return d == Subdomain::Fluid ? n_tri_f_ : n_tri_p_; }
    int n_edges(Subdomain d) const { return d == Subdomain::Fluid ? n_edge_f_ : n_edge_p_; }

    double tri_area(int t) const {
        const Triangle& T = triangles[t];
        Vec2 p0 = vertices[T.v[0]], p1 = vertices[T.v[1]], p2 = vertices[T.v[2]];
        return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
    }

    int n_vert_f_ = 0, n_vert_p_ = 0, n_tri_f_ = 0, n_tri_p_ = 0, n_edge_f_ = 0, n_edge_p_ = 0;
};

inline Mesh build_channel_mesh(const ChannelGeometry& geom, int nx, int ny_f, int ny_p) {
    if (nx < 1 || ny_f < 1 || ny_p < 1) throw Error("build_channel_mesh: subdivisions must be >= 1");
    if (!geom.well_formed()) throw Error("build_channel_mesh: degenerate geometry");

    Mesh m;
    m.geom = geom;
    m.nx = nx;
    m.ny_f = ny_f;
    m.ny_p = ny_p;
    m.h_grid = geom.x_range.length() / nx;

    const int ny = ny_p + ny_f;
    const int npx = nx + 1;

    // Vertices row by row, porous rows first; the row j = ny_p sits on the interface
    // and is shared by both subdomains.
    m.vertices.reserve(static_cast<size_t>(npx) * (ny + 1));
    for (int j = 0; j <= ny; ++j) {
        double y;
        if (j <= ny_p)
            y = geom.y_range_p.lo + geom.y_range_p.length() * j / ny_p;
        else
            y = geom.interface_y + geom.y_range_f.length() * (j - ny_p) / ny_f;
        for (int i = 0; i <= nx; ++i) {
            double x = geom.x_range.lo + geom.x_range.length() * i / nx;
            m.vertices.push_back({x, y});
        }
    }

    auto vid = [npx](int i, int j) { return j * npx + i; };

    m.triangles.reserve(static_cast<size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j) {
        Subdomain dom = (j < ny_p) ? Subdomain::Porous : Subdomain::Fluid;
        for (int i = 0; i < nx; ++i) {
            int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            m.triangles.push_back({{v00, v10, v11}, dom});
            m.triangles.push_back({{v00, v11, v01}, dom});
        }
    }

    // Edge extraction with incidence. Key = (min vid, max vid).
    struct EdgeSlot {
        int id = -1;
    };
    std::vector<std::vector<std::pair<int, int>>> bucket(m.vertices.size()); // a -> (b, edge id)
    auto edge_id = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        for (auto& [bb, id] : bucket[a])
            if (bb == b) return id;
        int id = static_cast<int>(m.edges.size());
        Edge e;
        e.a = a;
        e.b = b;
        m.edges.push_back(e);
        bucket[a].push_back({b, id});
        return id;
    };

    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
        const auto& T = m.triangles[t];
        for (int k = 0; k < 3; ++k) {
            int id = edge_id(T.v[k], T.v[(k + 1) % 3]);
            Edge& e = m.edges[id];
            if (e.tri[0] < 0)
                e.tri[0] = t;
            else
                e.tri[1] = t;
        }
    }

    const double eps = 1e-12 * std::max(1.0, std::abs(geom.interface_y));
    auto on_line = [&](double v, double ref) { return std::abs(v - ref) <= eps; };

    for (int id = 0; id < static_cast<int>(m.edges.size()); ++id) {
        Edge& e = m.edges[id];
        Vec2 pa = m.vertices[e.a], pb = m.vertices[e.b];
        if (e.tri[1] >= 0) {
            Subdomain d0 = m.triangles[e.tri[0]].dom, d1 = m.triangles[e.tri[1]].dom;
            if (d0 != d1) {
                e.kind = EdgeKind::Interface;
                e.tag = BoundaryTag::Interface;
                if (d0 != Subdomain::Fluid) std::swap(e.tri[0], e.tri[1]); // tri[0] fluid
            } else {
                e.kind = EdgeKind::Interior;
            }
            continue;
        }
        e.kind = EdgeKind::Boundary;
        bool fluid = m.triangles[e.tri[0]].dom == Subdomain::Fluid;
        if (on_line(pa.y, geom.y_range_p.lo) && on_line(pb.y, geom.y_range_p.lo))
            e.tag = BoundaryTag::Bottom;
        else if (on_line(pa.y, geom.y_range_f.hi) && on_line(pb.y, geom.y_range_f.hi))
            e.tag = BoundaryTag::Top;
        else if (on_line(pa.x, geom.x_range.lo) && on_line(pb.x, geom.x_range.lo))
            e.tag = fluid ? BoundaryTag::LeftFluid : BoundaryTag::LeftPorous;
        else if (on_line(pa.x, geom.x_range.hi) && on_line(pb.x, geom.x_range.hi))
            e.tag = fluid ? BoundaryTag::RightFluid : BoundaryTag::RightPorous;
        else
            throw Error("build_channel_mesh: boundary edge off the rectangle outline");
    }

    for (int id = 0; id < static_cast<int>(m.edges.size()); ++id)
        if (m.edges[id].kind == EdgeKind::Interface) m.interface_edge_ids.push_back(id);
    std::sort(m.interface_edge_ids.begin(), m.interface_edge_ids.end(), [&](int l, int r) {
        double xl = std::min(m.vertices[m.edges[l].a].x, m.vertices[m.edges[l].b].x);
        double xr = std::min(m.vertices[m.edges[r].a].x, m.vertices[m.edges[r].b].x);
        return xl < xr;
    });

    // Per-subdomain entity counts (interface vertices/edges count for both sides).
    std::vector<char> vf(m.vertices.size(), 0), vp(m.vertices.size(), 0);
    for (const auto& T : m.triangles)
        for (int v : T.v)
            (T.dom == Subdomain::Fluid ? vf : vp)[v] = 1;
    m.n_vert_f_ = static_cast<int>(std::count(vf.begin(), vf.end(), 1));
    m.n_vert_p_ = static_cast<int>(std::count(vp.begin(), vp.end(), 1));
    for (const auto& T : m.triangles)
        (T.dom == Subdomain::Fluid ? m.n_tri_f_ : m.n_tri_p_)++;
    for (const auto& e : m.edges) {
        bool f0 = m.triangles[e.tri[0]].dom == Subdomain::Fluid;
        if (e.kind == EdgeKind::Interface) {
            m.n_edge_f_++;
            m.n_edge_p_++;
        } else {
            (f0 ? m.n_edge_f_ : m.n_edge_p_)++;
        }
    }

    double hmax = 0.0;
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
        const auto& T = m.triangles[t];
        for (int k = 0; k < 3; ++k)
            hmax = std::max(hmax, (m.vertices[T.v[k]] - m.vertices[T.v[(k + 1) % 3]]).norm());
    }
    m.h_max = hmax;
    return m;
}

inline std::vector<InterfaceEdge> interface_edges(const Mesh& m) {
    std::vector<InterfaceEdge> out;
    out.reserve(m.interface_edge_ids.size());
    for (int id : m.interface_edge_ids) {
        const Edge& e = m.edges[id];
        InterfaceEdge ie;
        ie.edge = id;
        ie.fluid_tri = e.tri[0];
        ie.porous_tri = e.tri[1];
        ie.length = (m.vertices[e.a] - m.vertices[e.b]).norm();
        out.push_back(ie);
    }
    return out;
}

/// Plain-text dump: one "x y" line per vertex, then one "v0 v1 v2 tag" line
/// per triangle.
inline void write_mesh_text(const Mesh& m, std::ostream& os) {
    os << m.vertices.size() << ' ' << m.triangles.size() << '\n';
    char buf[96];
    for (const auto& v : m.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", v.x, v.y);
        os << buf;
    }
    for (const auto& t : m.triangles)
        os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << to_string(t.dom) << '\n';
}

} // namespace geotherm

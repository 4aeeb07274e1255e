#pragma once

// Global dof numbering per discrete space, interpolation of analytic fields,
// and Dirichlet constraint extraction.
//
// Dof layouts:
//   P1          one dof per subdomain vertex
//   MiniVector  interleaved (x,y) at vertices, then (x,y) cell bubbles
//   P0          one dof per cell
//   BDM1        two dofs per subdomain edge (moments vs {1,s}), RT0 one
//
// The fluid and porous temperature spaces are independent P1 spaces; vertices
// on the interface carry one dof in each, coupling only through the interface
// integrals.

#include "geotherm/core.hpp"
#include "geotherm/elements.hpp"
#include "geotherm/mesh.hpp"
#include "geotherm/quadrature.hpp"

#include <functional>
#include <vector>

namespace geotherm {

enum class ElementFamily { P0, P1, MiniVector, BDM1, RT0 };

using ScalarField = std::function<double(Vec2)>;
using VectorField = std::function<Vec2(Vec2)>;

struct DofMap {
    ElementFamily family = ElementFamily::P1;
    Subdomain dom = Subdomain::Fluid;
    int n_dofs = 0;
    int n_vertex_dofs = 0; // scalar vertex count (MiniVector: per component)

    std::vector<int> cells;       // mesh triangle ids of this subdomain
    std::vector<int> cell_of_tri; // mesh triangle id -> local cell index or -1
    std::vector<int> vertex_dof;  // mesh vertex -> scalar vertex rank or -1
    std::vector<int> edge_dof;    // mesh edge -> first dof or -1 (H(div))
    std::vector<std::array<int, 3>> cell_edges; // local cell -> global mesh edge ids

    bool is_hdiv() const { return family == ElementFamily::BDM1 || family == ElementFamily::RT0; }
    int hdiv_dofs_per_edge() const { return family == ElementFamily::BDM1 ? 2 : 1; }
    int dofs_per_cell() const {
        switch (family) {
        case ElementFamily::P0: return 1;
        case ElementFamily::P1: return 3;
        case ElementFamily::MiniVector: return 8;
        case ElementFamily::BDM1: return 6;
        case ElementFamily::RT0: return 3;
        }
        return 0;
    }

    // Global dofs of one local cell, in the local basis order used by assembly:
    //   P1:   vertex 0..2
    //   Mini: (v0,x),(v0,y),(v1,x),(v1,y),(v2,x),(v2,y),(bubble,x),(bubble,y)
    //   Hdiv: edge01 moments, edge12 moments, edge20 moments
    void cell_global_dofs(int local_cell, const Mesh& mesh, int* out) const {
        const Triangle& T = mesh.triangles[cells[local_cell]];
        switch (family) {
        case ElementFamily::P0:
            out[0] = local_cell;
            return;
        case ElementFamily::P1:
            for (int k = 0; k < 3; ++k) out[k] = vertex_dof[T.v[k]];
            return;
        case ElementFamily::MiniVector:
            for (int k = 0; k < 3; ++k) {
                out[2 * k] = 2 * vertex_dof[T.v[k]];
                out[2 * k + 1] = 2 * vertex_dof[T.v[k]] + 1;
            }
            out[6] = 2 * n_vertex_dofs + 2 * local_cell;
            out[7] = 2 * n_vertex_dofs + 2 * local_cell + 1;
            return;
        case ElementFamily::BDM1:
            for (int k = 0; k < 3; ++k) {
                out[2 * k] = edge_dof[cell_edges[local_cell][k]];
                out[2 * k + 1] = edge_dof[cell_edges[local_cell][k]] + 1;
            }
            return;
        case ElementFamily::RT0:
            for (int k = 0; k < 3; ++k) out[k] = edge_dof[cell_edges[local_cell][k]];
            return;
        }
    }
};

inline DofMap build_dofmap(const Mesh& mesh, ElementFamily family, Subdomain dom) {
    DofMap dm;
    dm.family = family;
    dm.dom = dom;
    dm.cell_of_tri.assign(mesh.triangles.size(), -1);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        if (mesh.triangles[t].dom != dom) continue;
        dm.cell_of_tri[t] = static_cast<int>(dm.cells.size());
        dm.cells.push_back(t);
    }

    dm.vertex_dof.assign(mesh.vertices.size(), -1);
    int next = 0;
    for (int t : dm.cells)
        for (int v : mesh.triangles[t].v)
            if (dm.vertex_dof[v] < 0) dm.vertex_dof[v] = next++;
    dm.n_vertex_dofs = next;

    if (family == ElementFamily::BDM1 || family == ElementFamily::RT0) {
        dm.edge_dof.assign(mesh.edges.size(), -1);
        int per = dm.hdiv_dofs_per_edge();
        int nd = 0;
        // Edges of the subdomain, numbered in mesh edge order for determinism.
        for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e) {
            const Edge& ed = mesh.edges[e];
            bool touches = false;
            for (int s = 0; s < 2; ++s)
                if (ed.tri[s] >= 0 && mesh.triangles[ed.tri[s]].dom == dom) touches = true;
            if (touches) {
                dm.edge_dof[e] = nd;
                nd += per;
            }
        }
        dm.n_dofs = nd;

        // Per-cell edge ids in local order (v0,v1),(v1,v2),(v2,v0).
        std::vector<std::vector<std::pair<int, int>>> by_vertex(mesh.vertices.size());
        for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e)
            by_vertex[mesh.edges[e].a].push_back({mesh.edges[e].b, e});
        dm.cell_edges.resize(dm.cells.size());
        for (size_t c = 0; c < dm.cells.size(); ++c) {
            const Triangle& T = mesh.triangles[dm.cells[c]];
            for (int k = 0; k < 3; ++k) {
                int a = T.v[k], b = T.v[(k + 1) % 3];
                if (a > b) std::swap(a, b);
                int found = -1;
                for (auto& [bb, id] : by_vertex[a])
                    if (bb == b) {
                        found = id;
                        break;
                    }
                dm.cell_edges[c][k] = found;
            }
        }
    }

    switch (family) {
    case ElementFamily::P1: dm.n_dofs = dm.n_vertex_dofs; break;
    case ElementFamily::MiniVector: dm.n_dofs = 2 * (dm.n_vertex_dofs + static_cast<int>(dm.cells.size())); break;
    case ElementFamily::P0: dm.n_dofs = static_cast<int>(dm.cells.size()); break;
    default: break; // H(div) set above
    }
    return dm;
}

inline CellGeom cell_geometry(const Mesh& mesh, int tri) {
    const Triangle& T = mesh.triangles[tri];
    return CellGeom(mesh.vertices[T.v[0]], mesh.vertices[T.v[1]], mesh.vertices[T.v[2]]);
}

inline std::array<HdivBasis::EdgeFrame, 3> hdiv_edge_frames(const Mesh& mesh, const DofMap& dm,
                                                            int local_cell) {
    std::array<HdivBasis::EdgeFrame, 3> fr;
    for (int k = 0; k < 3; ++k) {
        const Edge& e = mesh.edges[dm.cell_edges[local_cell][k]];
        Vec2 a = mesh.vertices[e.a], b = mesh.vertices[e.b];
        Vec2 t = b - a;
        double len = t.norm();
        fr[k] = {a, b, {t.y / len, -t.x / len}, len};
    }
    return fr;
}

inline HdivBasis hdiv_basis(const Mesh& mesh, const DofMap& dm, int local_cell) {
    HdivFamily fam = dm.family == ElementFamily::BDM1 ? HdivFamily::BDM1 : HdivFamily::RT0;
    return HdivBasis(fam, cell_geometry(mesh, dm.cells[local_cell]), hdiv_edge_frames(mesh, dm, local_cell));
}

// ---- interpolation -------------------------------------------------------

inline std::vector<double> interpolate_scalar(const ScalarField& f, const DofMap& dm, const Mesh& mesh) {
    std::vector<double> x(dm.n_dofs, 0.0);
    if (dm.family == ElementFamily::P1) {
        for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
            if (dm.vertex_dof[v] >= 0) x[dm.vertex_dof[v]] = f(mesh.vertices[v]);
        return x;
    }
    if (dm.family == ElementFamily::P0) {
        QuadratureRule q = triangle_rule(4);
        for (size_t c = 0; c < dm.cells.size(); ++c) {
            CellGeom g = cell_geometry(mesh, dm.cells[c]);
            double acc = 0.0;
            for (const auto& qp : q.points) acc += 2.0 * qp.w * f(g.point({qp.l1, qp.l2, qp.l3}));
            x[c] = acc; // mean: (1/|T|) * Integral = 2A*sum(w f)/|T| with sum(w)=1/2
        }
        return x;
    }
    throw Error("interpolate_scalar: unsupported family");
}

inline std::vector<double> interpolate_velocity(const VectorField& f, const DofMap& dm, const Mesh& mesh) {
    if (dm.family != ElementFamily::MiniVector) throw Error("interpolate_velocity: MiniVector only");
    std::vector<double> x(dm.n_dofs, 0.0); // bubbles stay zero
    for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
        if (dm.vertex_dof[v] >= 0) {
            Vec2 val = f(mesh.vertices[v]);
            x[2 * dm.vertex_dof[v]] = val.x;
            x[2 * dm.vertex_dof[v] + 1] = val.y;
        }
    return x;
}

/// Edge normal moments with 8-point Gauss (effectively exact for smooth data).
inline std::vector<double> interpolate_hdiv(const VectorField& f, const DofMap& dm, const Mesh& mesh) {
    if (!dm.is_hdiv()) throw Error("interpolate_hdiv: H(div) family required");
    std::vector<double> x(dm.n_dofs, 0.0);
    Gauss1D g = gauss_legendre(8);
    for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e) {
        if (dm.edge_dof[e] < 0) continue;
        const Edge& ed = mesh.edges[e];
        Vec2 a = mesh.vertices[ed.a], b = mesh.vertices[ed.b];
        Vec2 t = b - a;
        double len = t.norm();
        Vec2 n = {t.y / len, -t.x / len};
        double m0 = 0.0, m1 = 0.0;
        for (size_t q = 0; q < g.nodes.size(); ++q) {
            double s = g.nodes[q];
            double w = g.weights[q] * len / 2.0;
            Vec2 p = {0.5 * (1 - s) * a.x + 0.5 * (1 + s) * b.x, 0.5 * (1 - s) * a.y + 0.5 * (1 + s) * b.y};
            double vn = f(p).dot(n);
            m0 += w * vn;
            m1 += w * vn * s;
        }
        x[dm.edge_dof[e]] = m0;
        if (dm.family == ElementFamily::BDM1) x[dm.edge_dof[e] + 1] = m1;
    }
    return x;
}

// ---- Dirichlet constraints -----------------------------------------------

struct DirichletBC {
    std::vector<std::pair<int, double>> rows; // (dof, value), deduplicated
};

namespace detail {
inline bool edge_tagged(const Edge& e, const std::vector<BoundaryTag>& tags) {
    for (BoundaryTag t : tags)
        if (e.tag == t) return true;
    return false;
}
} // namespace detail

inline DirichletBC dirichlet_scalar(const DofMap& dm, const Mesh& mesh,
                                    const std::vector<BoundaryTag>& tags,
                                    const std::function<double(Vec2)>& g) {
    DirichletBC bc;
    std::vector<char> seen(dm.n_dofs, 0);
    for (const Edge& e : mesh.edges) {
        if (!detail::edge_tagged(e, tags)) continue;
        for (int v : {e.a, e.b}) {
            int rank = dm.vertex_dof[v];
            if (rank < 0 || seen[rank]) continue;
            seen[rank] = 1;
            bc.rows.push_back({rank, g(mesh.vertices[v])});
        }
    }
    return bc;
}

inline DirichletBC dirichlet_velocity(const DofMap& dm, const Mesh& mesh,
                                      const std::vector<BoundaryTag>& tags,
                                      const std::function<Vec2(Vec2)>& g) {
    DirichletBC bc;
    std::vector<char> seen(dm.n_vertex_dofs, 0);
    for (const Edge& e : mesh.edges) {
        if (!detail::edge_tagged(e, tags)) continue;
        for (int v : {e.a, e.b}) {
            int rank = dm.vertex_dof[v];
            if (rank < 0 || seen[rank]) continue;
            seen[rank] = 1;
            Vec2 val = g(mesh.vertices[v]);
            bc.rows.push_back({2 * rank, val.x});
            bc.rows.push_back({2 * rank + 1, val.y});
        }
    }
    return bc;
}

/// Pins edge normal moments on tagged boundary edges (u.n condition).
inline DirichletBC dirichlet_hdiv_normal(const DofMap& dm, const Mesh& mesh,
                                         const std::vector<BoundaryTag>& tags,
                                         const std::function<Vec2(Vec2)>& g) {
    DirichletBC bc;
    Gauss1D gl = gauss_legendre(8);
    for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e) {
        const Edge& ed = mesh.edges[e];
        if (dm.edge_dof[e] < 0 || !detail::edge_tagged(ed, tags)) continue;
        Vec2 a = mesh.vertices[ed.a], b = mesh.vertices[ed.b];
        Vec2 t = b - a;
        double len = t.norm();
        Vec2 n = {t.y / len, -t.x / len};
        double m0 = 0.0, m1 = 0.0;
        for (size_t q = 0; q < gl.nodes.size(); ++q) {
            double s = gl.nodes[q];
            double w = gl.weights[q] * len / 2.0;
            Vec2 p = {0.5 * (1 - s) * a.x + 0.5 * (1 + s) * b.x, 0.5 * (1 - s) * a.y + 0.5 * (1 + s) * b.y};
            double vn = g(p).dot(n);
            m0 += w * vn;
            m1 += w * vn * s;
        }
        bc.rows.push_back({dm.edge_dof[e], m0});
        if (dm.family == ElementFamily::BDM1) bc.rows.push_back({dm.edge_dof[e] + 1, m1});
    }
    return bc;
}

/// Integral of each basis function; the zero-mean multiplier column.
inline std::vector<double> integral_weights(const DofMap& dm, const Mesh& mesh) {
    std::vector<double> c(dm.n_dofs, 0.0);
    if (dm.family == ElementFamily::P1) {
        for (size_t lc = 0; lc < dm.cells.size(); ++lc) {
            double A = mesh.tri_area(dm.cells[lc]);
            for (int v : mesh.triangles[dm.cells[lc]].v) c[dm.vertex_dof[v]] += A / 3.0;
        }
        return c;
    }
    if (dm.family == ElementFamily::P0) {
        for (size_t lc = 0; lc < dm.cells.size(); ++lc) c[lc] = mesh.tri_area(dm.cells[lc]);
        return c;
    }
    throw Error("integral_weights: pressure families only");
}

} // namespace geotherm

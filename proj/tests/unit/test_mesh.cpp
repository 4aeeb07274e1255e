#include "geotherm/mesh.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <set>
#include <sstream>

using namespace geotherm;

namespace {

ChannelGeometry unit_pair() {
    ChannelGeometry g;
    g.x_range = {0.0, 1.0};
    g.y_range_p = {0.0, 1.0};
    g.y_range_f = {1.0, 2.0};
    g.interface_y = 1.0;
    return g;
}

// Independent Euler count from the triangle list alone.
void check_euler(const Mesh& m, Subdomain dom) {
    std::set<int> verts;
    std::set<std::pair<int, int>> edges;
    int faces = 0;
    for (const Triangle& t : m.triangles) {
        if (t.dom != dom) continue;
        ++faces;
        for (int k = 0; k < 3; ++k) {
            verts.insert(t.v[k]);
            int a = t.v[k], b = t.v[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edges.insert({a, b});
        }
    }
    EXPECT_EQ(static_cast<int>(verts.size()) - static_cast<int>(edges.size()) + faces, 1);
    EXPECT_EQ(static_cast<int>(verts.size()), m.n_vertices(dom));
    EXPECT_EQ(static_cast<int>(edges.size()), m.n_edges(dom));
    EXPECT_EQ(faces, m.n_triangles(dom));
}

} // namespace

TEST(Mesh, SmallestMeshCounts) {
    Mesh m = build_channel_mesh(unit_pair(), 1, 1, 1);
    EXPECT_EQ(m.vertices.size(), 6u);
    EXPECT_EQ(m.triangles.size(), 4u);
    EXPECT_DOUBLE_EQ(m.h_grid, 1.0);
    EXPECT_EQ(m.interface_edge_ids.size(), 1u);
}

TEST(Mesh, UniformSubdivisionInterface) {
    Mesh m = build_channel_mesh(unit_pair(), 4, 4, 4);
    auto ifc = interface_edges(m);
    ASSERT_EQ(ifc.size(), 4u);
    double total = 0.0;
    for (const auto& e : ifc) {
        EXPECT_NEAR(e.length, 0.25, 1e-15);
        total += e.length;
        EXPECT_EQ(m.triangles[e.fluid_tri].dom, Subdomain::Fluid);
        EXPECT_EQ(m.triangles[e.porous_tri].dom, Subdomain::Porous);
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
    // ordered by x
    for (size_t i = 1; i < ifc.size(); ++i) {
        const Edge& prev = m.edges[ifc[i - 1].edge];
        const Edge& cur = m.edges[ifc[i].edge];
        EXPECT_LT(std::min(m.vertices[prev.a].x, m.vertices[prev.b].x),
                  std::min(m.vertices[cur.a].x, m.vertices[cur.b].x));
    }
}

TEST(Mesh, EulerRelationPerSubdomain) {
    for (int nx : {1, 2, 4, 8}) {
        Mesh m = build_channel_mesh(unit_pair(), nx, nx, nx);
        check_euler(m, Subdomain::Fluid);
        check_euler(m, Subdomain::Porous);
    }
    Mesh m = build_channel_mesh(unit_pair(), 3, 5, 2);
    check_euler(m, Subdomain::Fluid);
    check_euler(m, Subdomain::Porous);
}

TEST(Mesh, InterfaceEdgeSidesByCoordinateScan) {
    Mesh m = build_channel_mesh(unit_pair(), 8, 8, 8);
    auto ifc = interface_edges(m);
    ASSERT_EQ(ifc.size(), 8u);
    for (const auto& e : ifc) {
        for (int v : m.triangles[e.fluid_tri].v) EXPECT_GE(m.vertices[v].y, 1.0 - 1e-14);
        for (int v : m.triangles[e.porous_tri].v) EXPECT_LE(m.vertices[v].y, 1.0 + 1e-14);
        // every interface edge lies on y = interface_y
        EXPECT_NEAR(m.vertices[m.edges[e.edge].a].y, 1.0, 1e-15);
        EXPECT_NEAR(m.vertices[m.edges[e.edge].b].y, 1.0, 1e-15);
    }
}

TEST(Mesh, PositiveAreasSummingToDomainArea) {
    Mesh m = build_channel_mesh(unit_pair(), 5, 3, 4);
    double total = 0.0;
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
        double a = m.tri_area(t);
        EXPECT_GT(a, 0.0);
        total += a;
    }
    EXPECT_NEAR(total, 2.0, 2.0 * 1e-12);
}

TEST(Mesh, EdgeIncidenceConsistency) {
    Mesh m = build_channel_mesh(unit_pair(), 4, 4, 4);
    for (const Edge& e : m.edges) {
        if (e.kind == EdgeKind::Interior) {
            ASSERT_GE(e.tri[1], 0);
            EXPECT_EQ(m.triangles[e.tri[0]].dom, m.triangles[e.tri[1]].dom);
        } else if (e.kind == EdgeKind::Boundary) {
            EXPECT_LT(e.tri[1], 0);
            EXPECT_NE(e.tag, BoundaryTag::None);
        } else {
            ASSERT_GE(e.tri[1], 0);
            EXPECT_NE(m.triangles[e.tri[0]].dom, m.triangles[e.tri[1]].dom);
        }
    }
}

TEST(Mesh, DeterministicRebuild) {
    Mesh a = build_channel_mesh(unit_pair(), 6, 6, 6);
    Mesh b = build_channel_mesh(unit_pair(), 6, 6, 6);
    ASSERT_EQ(a.vertices.size(), b.vertices.size());
    EXPECT_EQ(0, std::memcmp(a.vertices.data(), b.vertices.data(), a.vertices.size() * sizeof(Vec2)));
    ASSERT_EQ(a.triangles.size(), b.triangles.size());
    for (size_t i = 0; i < a.triangles.size(); ++i) EXPECT_EQ(a.triangles[i].v, b.triangles[i].v);
}

TEST(Mesh, RejectsDegenerateGeometry) {
    ChannelGeometry g = unit_pair();
    g.x_range = {0.0, 0.0};
    EXPECT_THROW(build_channel_mesh(g, 1, 1, 1), Error);
    g = unit_pair();
    EXPECT_THROW(build_channel_mesh(g, 0, 1, 1), Error);
    g.y_range_p.hi = 0.9; // no longer meets the interface
    EXPECT_THROW(build_channel_mesh(g, 1, 1, 1), Error);
}

TEST(Mesh, TextDump) {
    Mesh m = build_channel_mesh(unit_pair(), 1, 1, 1);
    std::ostringstream os;
    write_mesh_text(m, os);
    std::istringstream is(os.str());
    int nv, nt;
    is >> nv >> nt;
    EXPECT_EQ(nv, 6);
    EXPECT_EQ(nt, 4);
    double x, y;
    for (int i = 0; i < nv; ++i) EXPECT_TRUE(static_cast<bool>(is >> x >> y));
    int v0, v1, v2;
    std::string tag;
    for (int i = 0; i < nt; ++i) {
        EXPECT_TRUE(static_cast<bool>(is >> v0 >> v1 >> v2 >> tag));
        EXPECT_TRUE(tag == "fluid" || tag == "porous");
    }
}
